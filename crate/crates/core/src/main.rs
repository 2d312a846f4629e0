use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use catbandit::dominance::{find_dominating_category, DominanceOrder};
use catbandit::harness::{
    builtin_scenarios, log_checkpoints, run_experiment, scenario, write_csv, ExperimentConfig,
};
use catbandit::lower_bounds::c_mu;
use catbandit::model::InstanceFile;
use catbandit::policies::{DeltaSchedule, PolicyConfig, PolicyKind};
use catbandit::MeanMatrix;

#[derive(Parser)]
#[command(name = "catbandit", version, about = "Categorized bandit simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write the aggregated trace as CSV.
    Run(RunArgs),
    /// List the built-in scenarios.
    Scenarios,
    /// Print the lower-bound constant and its terms for an instance.
    LowerBound {
        instance: PathBuf,
        #[arg(long)]
        order: DominanceOrder,
    },
    /// Print the index of the dominating category, or `none`.
    CheckDominance {
        instance: PathBuf,
        #[arg(long)]
        order: DominanceOrder,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    scenario: Option<String>,
    /// JSON file with `{"means": [[...], ...]}`.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// `ucb|ts|uct|catse|minmax|murphy`, optionally `name:order`. Repeatable.
    #[arg(long = "policy", required = true)]
    policies: Vec<String>,
    /// Order for structured policies without one, and for lower-bound ratios.
    #[arg(long)]
    order: Option<DominanceOrder>,
    /// `1/t`, `1/mt`, `1/2mkt2` or a fixed value in (0, 1).
    #[arg(long)]
    delta_schedule: Option<DeltaSchedule>,
    /// Potential sampling for group-sparse CatSE.
    #[arg(long)]
    potential_sampling: bool,
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    checkpoints: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_policy(spec: &str, args: &RunArgs, fallback: Option<DominanceOrder>) -> Result<PolicyConfig, String> {
    let (name, order) = match spec.split_once(':') {
        Some((n, o)) => (n, Some(o.parse::<DominanceOrder>().map_err(|e| e.to_string())?)),
        None => (spec, None),
    };
    let kind: PolicyKind = name.parse().map_err(|e: catbandit::policies::PolicyError| e.to_string())?;
    let mut cfg = PolicyConfig::new(kind);
    if kind.needs_order() {
        let o = order.or(fallback).ok_or_else(|| format!("policy `{spec}` needs an order"))?;
        cfg = cfg.with_order(o);
        if o == DominanceOrder::GroupSparse && kind == PolicyKind::CatSe {
            cfg = cfg.with_potential_sampling(args.potential_sampling);
        }
    } else if order.is_some() {
        return Err(format!("policy `{name}` does not take an order"));
    }
    if let Some(s) = args.delta_schedule {
        cfg = cfg.with_schedule(s);
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn load(path: &PathBuf) -> Result<(String, MeanMatrix), String> {
    let file = InstanceFile::load(path).map_err(|e| e.to_string())?;
    let means = file.to_means::<f64>().map_err(|e| e.to_string())?;
    let label = if file.label.is_empty() {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        file.label.clone()
    };
    Ok((label, means))
}

fn run(args: RunArgs) -> Result<(), String> {
    let (label, means, scenario_order) = match (&args.scenario, &args.instance) {
        (Some(name), _) => {
            let s = scenario(name).map_err(|e| e.to_string())?;
            let means = s.verify().map_err(|e| e.to_string())?;
            (s.name.to_string(), means, Some(s.order))
        }
        (None, Some(path)) => {
            let (label, means) = load(path)?;
            (label, means, None)
        }
        (None, None) => return Err("one of --scenario or --instance is required".into()),
    };
    let reference = args.order.or(scenario_order);
    let policies = args
        .policies
        .iter()
        .map(|p| parse_policy(p, &args, reference))
        .collect::<Result<Vec<_>, _>>()?;
    let config = ExperimentConfig {
        label,
        means,
        reference_order: reference,
        policies,
        horizon: args.horizon,
        runs: args.runs,
        base_seed: args.seed,
        checkpoints: log_checkpoints(args.horizon, args.checkpoints),
        jobs: args.jobs,
    };
    let trace = run_experiment(&config).map_err(|e| e.to_string())?;
    write_csv(&trace, &args.out).map_err(|e| e.to_string())?;
    for p in &trace.policies {
        let ratio = p.final_ratio().map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "{:<10} {:<7} final mean regret {:>10.3}  ratio {:>6}  clean violations {}",
            p.label,
            p.order.map(|o| o.to_string()).unwrap_or_default(),
            p.final_mean(),
            ratio,
            p.clean_violations()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Scenarios => {
            for s in builtin_scenarios() {
                println!("{:<18} {:<7} {}x{}", s.name, s.order.to_string(), s.means.len(), s.means[0].len());
            }
            Ok(())
        }
        Command::LowerBound { instance, order } => load(&instance).and_then(|(_, means)| {
            let r = c_mu(&means, order).map_err(|e| e.to_string())?;
            println!("c_mu {}", r.c_mu);
            for t in &r.terms {
                println!("  arm ({}, {}) {}", t.arm.category, t.arm.arm, t.value);
            }
            if let Some(rho) = r.rho {
                println!("rho {rho}");
            }
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }),
        Command::CheckDominance { instance, order } => load(&instance).map(|(_, means)| {
            match find_dominating_category(&means, order) {
                Some(c) => println!("{c}"),
                None => println!("none"),
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
