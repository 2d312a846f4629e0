//! Seeded Monte Carlo runner, aggregation and CSV output.
//!
//! Seeding: run `i` of an experiment with base seed `s` uses
//! `run_seed = splitmix64(s + (i + 1) * 0x9E3779B97F4A7C15)`. The environment
//! stream is `splitmix64(run_seed ^ 1)`; policy `j` gets
//! `splitmix64(run_seed ^ (j + 2) ^ config.rng_seed)`. Every policy therefore
//! faces the same reward stream in a given run, and adding runs or policies
//! never changes existing streams.

mod output;
mod scenarios;

use rayon::prelude::*;
use thiserror::Error;

use crate::dominance::DominanceOrder;
use crate::lower_bounds::c_mu;
use crate::model::{gaps, make_environment, Environment, History, MeanMatrix, ModelError, RegretTrace};
use crate::policies::{build_policy, Diagnostics, PolicyConfig, PolicyError};
use crate::scalar::Real;

pub use output::{to_csv_string, write_csv, CSV_HEADER};
pub use scenarios::{builtin_scenarios, scenario, Scenario};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{0}` does not satisfy its registered dominance")]
    CorruptScenario(String),
    #[error("checkpoints must be strictly increasing within [1, {0}]")]
    BadCheckpoints(usize),
    #[error("horizon and runs must be positive")]
    Empty,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    splitmix64(base_seed.wrapping_add((run as u64).wrapping_add(1).wrapping_mul(GOLDEN)))
}

pub fn env_seed(run_seed: u64) -> u64 {
    splitmix64(run_seed ^ 1)
}

pub fn policy_seed(run_seed: u64, policy_index: usize, config_seed: u64) -> u64 {
    splitmix64(run_seed ^ (policy_index as u64 + 2) ^ config_seed)
}

/// Up to `count` distinct integers in `[1, horizon]`, evenly spaced in log
/// scale, always including 1 and `horizon`.
pub fn log_checkpoints(horizon: usize, count: usize) -> Vec<usize> {
    if horizon == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![horizon];
    }
    let top = (horizon as f64).ln();
    let mut out: Vec<usize> = (0..count)
        .map(|i| ((top * i as f64 / (count - 1) as f64).exp().round() as usize).clamp(1, horizon))
        .collect();
    out.push(horizon);
    out.sort_unstable();
    out.dedup();
    out
}

fn check_checkpoints(checkpoints: &[usize], horizon: usize) -> Result<(), HarnessError> {
    let ok = checkpoints.windows(2).all(|w| w[0] < w[1])
        && checkpoints.first().is_none_or(|&c| c >= 1)
        && checkpoints.last().is_none_or(|&c| c <= horizon);
    if ok {
        Ok(())
    } else {
        Err(HarnessError::BadCheckpoints(horizon))
    }
}

/// Outcome of one run of one policy.
#[derive(Debug, Clone)]
pub struct Episode<T> {
    pub trace: RegretTrace<T>,
    pub history: History<T>,
    pub diagnostics: Diagnostics,
}

/// Pulls every arm once (category-major), then lets the policy play until
/// `horizon` pulls; pseudo-regret is recorded after each checkpoint pull.
pub fn run_episode<T: Real>(
    config: &PolicyConfig,
    env: &mut Environment<T>,
    horizon: usize,
    checkpoints: &[usize],
) -> Result<Episode<T>, HarnessError> {
    check_checkpoints(checkpoints, horizon)?;
    let means = env.means().clone();
    let (m, k) = (means.m(), means.k());
    let table = gaps(&means);
    let mut policy = build_policy::<T>(config, m, k, horizon)?;
    let mut history = History::new(m, k);
    let mut regret = T::zero();
    let mut next = 0;
    let mut trace = RegretTrace { checkpoints: Vec::with_capacity(checkpoints.len()), values: Vec::with_capacity(checkpoints.len()) };
    let init: Vec<_> = history.arms().collect();

    for step in 0..horizon {
        let arm = match init.get(step) {
            Some(&a) => a,
            None => policy.select(&history),
        };
        let reward = env.pull(arm.category, arm.arm)?;
        history.record(arm, reward);
        policy.observe(arm, reward, &history);
        regret = regret + table.get(arm.category, arm.arm);
        if next < checkpoints.len() && checkpoints[next] == history.t() {
            trace.checkpoints.push(history.t());
            trace.values.push(regret);
            next += 1;
        }
    }
    Ok(Episode { trace, history, diagnostics: policy.diagnostics() })
}

/// What to run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub label: String,
    pub means: MeanMatrix<f64>,
    /// Order used for lower-bound ratios of policies that carry none.
    pub reference_order: Option<DominanceOrder>,
    pub policies: Vec<PolicyConfig>,
    pub horizon: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub checkpoints: Vec<usize>,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    /// Built-in scenario with default checkpoints.
    pub fn from_scenario(
        scenario: &Scenario,
        policies: Vec<PolicyConfig>,
        horizon: usize,
        runs: usize,
        base_seed: u64,
    ) -> Result<Self, HarnessError> {
        Ok(Self {
            label: scenario.name.to_string(),
            means: scenario.verify()?,
            reference_order: Some(scenario.order),
            policies,
            horizon,
            runs,
            base_seed,
            checkpoints: log_checkpoints(horizon, 100),
            jobs: None,
        })
    }
}

/// Per-run summary kept for auditing.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub final_regret: f64,
    pub diagnostics: Diagnostics,
    /// Eliminations of the category holding the best arm.
    pub best_eliminations: usize,
    /// Of those, the ones made while the confidence inequalities held.
    pub clean_violations: usize,
}

/// Aggregated traces of one policy.
#[derive(Debug, Clone)]
pub struct PolicyTrace {
    pub label: String,
    pub config: PolicyConfig,
    /// Order the ratio refers to.
    pub order: Option<DominanceOrder>,
    pub c_mu: Option<f64>,
    pub checkpoints: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
    pub runs: Vec<RunSummary>,
}

impl PolicyTrace {
    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_ratio(&self) -> Option<f64> {
        self.ratio.last().copied().flatten()
    }

    pub fn clean_violations(&self) -> usize {
        self.runs.iter().map(|r| r.clean_violations).sum()
    }
}

#[derive(Debug, Clone)]
pub struct AggregateTrace {
    pub scenario: String,
    pub policies: Vec<PolicyTrace>,
}

impl AggregateTrace {
    pub fn policy(&self, label: &str) -> Option<&PolicyTrace> {
        self.policies.iter().find(|p| p.label == label)
    }
}

fn audit(summary: &mut RunSummary, truth: &MeanMatrix<f64>) {
    let best = truth.argmax().category;
    for e in &summary.diagnostics.eliminations {
        if e.eliminated.category == best {
            summary.best_eliminations += 1;
            if e.clean_event_holds(truth) {
                summary.clean_violations += 1;
            }
        }
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn run_policy(config: &ExperimentConfig, index: usize, policy: &PolicyConfig) -> Result<PolicyTrace, HarnessError> {
    let episodes: Vec<Result<(RegretTrace<f64>, RunSummary), HarnessError>> = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            let rs = run_seed(config.base_seed, run);
            let mut env = make_environment(config.means.clone(), env_seed(rs))?;
            let mut cfg = policy.clone();
            cfg.rng_seed = policy_seed(rs, index, policy.rng_seed);
            let ep = run_episode(&cfg, &mut env, config.horizon, &config.checkpoints)?;
            let final_regret = crate::model::pseudo_regret(&gaps(&config.means), &ep.history)?;
            let mut summary = RunSummary { final_regret, diagnostics: ep.diagnostics, best_eliminations: 0, clean_violations: 0 };
            audit(&mut summary, &config.means);
            Ok((ep.trace, summary))
        })
        .collect();

    let mut traces = Vec::with_capacity(config.runs);
    let mut runs = Vec::with_capacity(config.runs);
    for e in episodes {
        let (t, s) = e?;
        traces.push(t);
        runs.push(s);
    }

    let order = policy.order.or(config.reference_order);
    let c = order
        .and_then(|o| c_mu(&config.means, o).ok())
        .map(|r| r.c_mu)
        .filter(|&c| c > 0.0);
    let n_cp = config.checkpoints.len();
    let (mut mean, mut std, mut ratio) = (Vec::with_capacity(n_cp), Vec::with_capacity(n_cp), Vec::with_capacity(n_cp));
    for (i, &t) in config.checkpoints.iter().enumerate() {
        let column: Vec<f64> = traces.iter().map(|tr| tr.values[i]).collect();
        let (mu, sd) = mean_std(&column);
        mean.push(mu);
        std.push(sd);
        ratio.push(c.filter(|_| t >= 2).map(|c| mu / (c * (t as f64).ln())));
    }
    Ok(PolicyTrace {
        label: policy.label(),
        config: policy.clone(),
        order,
        c_mu: c,
        checkpoints: config.checkpoints.clone(),
        mean,
        std,
        ratio,
        runs,
    })
}

/// Runs every policy `runs` times. Results do not depend on `jobs`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregateTrace, HarnessError> {
    if config.runs == 0 || config.horizon == 0 {
        return Err(HarnessError::Empty);
    }
    check_checkpoints(&config.checkpoints, config.horizon)?;
    for p in &config.policies {
        p.validate()?;
    }
    let go = || -> Result<AggregateTrace, HarnessError> {
        let policies = config
            .policies
            .iter()
            .enumerate()
            .map(|(i, p)| run_policy(config, i, p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AggregateTrace { scenario: config.label.clone(), policies })
    };
    match config.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
            .install(go),
        None => go(),
    }
}
