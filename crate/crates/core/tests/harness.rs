use catbandit::harness::{
    builtin_scenarios, log_checkpoints, run_experiment, scenario, to_csv_string, write_csv, ExperimentConfig,
    HarnessError, Scenario, CSV_HEADER,
};
use catbandit::policies::{PolicyConfig, PolicyKind};
use catbandit::DominanceOrder;

fn config(runs: usize, checkpoints: Vec<usize>) -> ExperimentConfig {
    let s = scenario("strong-2x2").unwrap();
    let policies = vec![
        PolicyConfig::new(PolicyKind::Ucb),
        PolicyConfig::new(PolicyKind::CatSe).with_order(DominanceOrder::Strong),
    ];
    let mut c = ExperimentConfig::from_scenario(&s, policies, 500, runs, 17).unwrap();
    c.checkpoints = checkpoints;
    c
}

#[test]
fn same_seed_same_bytes_any_thread_count() {
    let mut c = config(12, log_checkpoints(500, 20));
    let a = to_csv_string(&run_experiment(&c).unwrap()).unwrap();
    c.jobs = Some(1);
    let b = to_csv_string(&run_experiment(&c).unwrap()).unwrap();
    c.jobs = Some(4);
    let d = to_csv_string(&run_experiment(&c).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, d);
    c.base_seed += 1;
    assert_ne!(a, to_csv_string(&run_experiment(&c).unwrap()).unwrap());
}

#[test]
fn adding_runs_keeps_existing_runs() {
    let short = run_experiment(&config(5, vec![500])).unwrap();
    let long = run_experiment(&config(10, vec![500])).unwrap();
    for (p, q) in short.policies.iter().zip(&long.policies) {
        let a: Vec<f64> = p.runs.iter().map(|r| r.final_regret).collect();
        let b: Vec<f64> = q.runs[..5].iter().map(|r| r.final_regret).collect();
        assert_eq!(a, b);
    }
}

#[test]
fn single_run_has_zero_std_and_bounded_mean() {
    let t = run_experiment(&config(1, log_checkpoints(500, 10))).unwrap();
    let max_gap = 2.0;
    for p in &t.policies {
        assert!(p.std.iter().all(|&s| s == 0.0));
        for (&cp, &m) in p.checkpoints.iter().zip(&p.mean) {
            assert!(m <= cp as f64 * max_gap);
        }
    }
}

#[test]
fn ratio_column() {
    let t = run_experiment(&config(3, vec![1, 2, 500])).unwrap();
    for p in &t.policies {
        assert_eq!(p.c_mu, Some(3.0));
        assert_eq!(p.ratio[0], None);
        let expect = p.mean[2] / (3.0 * 500f64.ln());
        assert!((p.ratio[2].unwrap() - expect).abs() < 1e-12);
    }
}

#[test]
fn csv_layout_and_round_trip() {
    let t = run_experiment(&config(4, vec![1, 50, 500])).unwrap();
    let text = to_csv_string(&t).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 6);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    write_csv(&t, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let mut i = 0;
    for p in &t.policies {
        for j in 0..p.checkpoints.len() {
            let row = &rows[i];
            assert_eq!(&row[0], "strong-2x2");
            assert_eq!(&row[1], p.label);
            assert_eq!(&row[2], "strong");
            assert_eq!(row[3].parse::<usize>().unwrap(), p.checkpoints[j]);
            let mean: f64 = row[4].parse().unwrap();
            let std: f64 = row[5].parse().unwrap();
            assert!((mean - p.mean[j]).abs() <= 1e-12 * p.mean[j].abs().max(1.0));
            assert!((std - p.std[j]).abs() <= 1e-12 * p.std[j].abs().max(1.0));
            match p.ratio[j] {
                Some(r) => assert!((row[6].parse::<f64>().unwrap() - r).abs() <= 1e-12),
                None => assert_eq!(&row[6], ""),
            }
            i += 1;
        }
    }
}

#[test]
fn empty_checkpoints_give_header_only() {
    let t = run_experiment(&config(2, vec![])).unwrap();
    assert_eq!(to_csv_string(&t).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn scenarios_are_checked_before_running() {
    for s in builtin_scenarios() {
        assert!(s.verify().is_ok(), "{}", s.name);
    }
    let bad = Scenario {
        name: "bad",
        means: vec![vec![1.0, 0.0], vec![2.0, -1.0]],
        order: DominanceOrder::Strong,
        dominating: 0,
    };
    assert!(matches!(bad.verify(), Err(HarnessError::CorruptScenario(_))));
    let err = ExperimentConfig::from_scenario(&bad, vec![PolicyConfig::new(PolicyKind::Ucb)], 10, 1, 0);
    assert!(err.is_err());
}

#[test]
fn invalid_experiments_are_rejected() {
    let mut c = config(0, vec![1]);
    assert!(matches!(run_experiment(&c), Err(HarnessError::Empty)));
    c.runs = 1;
    c.checkpoints = vec![600];
    assert!(matches!(run_experiment(&c), Err(HarnessError::BadCheckpoints(500))));
    c.checkpoints = vec![1];
    c.policies = vec![PolicyConfig::new(PolicyKind::CatSe)];
    assert!(matches!(run_experiment(&c), Err(HarnessError::Policy(_))));
}
