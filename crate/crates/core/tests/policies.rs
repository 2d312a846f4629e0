mod common;

use catbandit::confidence::{
    elimination_round_bound, hoeffding_radius, max_linear_minus_norm_exact, min_linear_plus_norm_exact,
};
use catbandit::harness::{run_episode, run_experiment, scenario, ExperimentConfig};
use catbandit::model::make_environment;
use catbandit::policies::{
    active_set_first_order, build_policy, DeltaSchedule, PolicyConfig, PolicyKind,
};
use catbandit::{DominanceOrder, History, MeanMatrix};
use proptest::prelude::*;

fn all_configs() -> Vec<PolicyConfig> {
    use DominanceOrder::*;
    use PolicyKind::*;
    let mut v = vec![PolicyConfig::new(Ucb), PolicyConfig::new(Ts), PolicyConfig::new(Uct), PolicyConfig::new(MinMaxUcb)];
    for o in DominanceOrder::ALL {
        v.push(PolicyConfig::new(CatSe).with_order(o));
        v.push(PolicyConfig::new(Murphy).with_order(o));
    }
    v.push(PolicyConfig::new(CatSe).with_order(GroupSparse).with_potential_sampling(true));
    v
}

#[test]
fn counts_sum_to_time_and_runs_are_deterministic() {
    for name in ["sparse-2x2", "strong-2x2", "fosd-2x2"] {
        let means = scenario(name).unwrap().verify().unwrap();
        for cfg in all_configs() {
            let cfg = cfg.with_seed(42);
            let play = || {
                let mut env = make_environment(means.clone(), 7).unwrap();
                run_episode::<f64>(&cfg, &mut env, 600, &[1, 10, 600]).unwrap()
            };
            let (a, b) = (play(), play());
            let total: usize = a.history.arms().map(|x| a.history.count(x.category, x.arm)).sum();
            assert_eq!(total, 600, "{name} {}", cfg.label());
            assert_eq!(a.history, b.history, "{name} {}", cfg.label());
            assert!(a.trace.is_non_decreasing());
        }
    }
}

#[test]
fn murphy_on_one_category_is_thompson() {
    let means = MeanMatrix::new(vec![vec![0.4, 0.0, -0.3]]).unwrap();
    let ts = PolicyConfig::new(PolicyKind::Ts).with_seed(3);
    let ms = PolicyConfig::new(PolicyKind::Murphy).with_order(DominanceOrder::FirstOrder).with_seed(3);
    let play = |cfg: &PolicyConfig| {
        let mut env = make_environment(means.clone(), 1).unwrap();
        run_episode::<f64>(cfg, &mut env, 2000, &[2000]).unwrap().history
    };
    assert_eq!(play(&ts), play(&ms));
}

#[test]
fn murphy_accepts_first_draws_late_in_a_run() {
    // The dominated category is almost never pulled, so its posterior stays
    // wide; the margin (2.9) has to exceed that spread for the posterior to
    // sit on the hypothesis. The strong scenario is tight (1 vs 1) and about
    // a third of its first draws are accepted.
    let means = MeanMatrix::new(vec![vec![2.0, 1.9], vec![-1.0, -2.0]]).unwrap();
    let cfg = PolicyConfig::new(PolicyKind::Murphy).with_order(DominanceOrder::Strong).with_seed(5);
    let mut policy = build_policy::<f64>(&cfg, 2, 2, 10_000).unwrap();
    let mut env = make_environment(means, 9).unwrap();
    let mut h = History::new(2, 2);
    let mut at_5000 = None;
    for step in 0..10_000 {
        let arm = if step < 4 { h.arms().nth(step).unwrap() } else { policy.select(&h) };
        let r = env.pull(arm.category, arm.arm).unwrap();
        h.record(arm, r);
        if step == 4_999 {
            at_5000 = Some(policy.diagnostics());
        }
    }
    let (early, late) = (at_5000.unwrap(), policy.diagnostics());
    let steps = late.murphy_steps - early.murphy_steps;
    let first = late.murphy_first_draw_accepts - early.murphy_first_draw_accepts;
    assert!(first as f64 / steps as f64 >= 0.99, "{first}/{steps}");
}

#[test]
fn ucb_regret_within_classical_sandwich() {
    let means = MeanMatrix::new(vec![vec![1.0], vec![0.0]]).unwrap();
    let cfg = ExperimentConfig {
        label: "two-singletons".into(),
        means,
        reference_order: None,
        policies: vec![PolicyConfig::new(PolicyKind::Ucb)],
        horizon: 10_000,
        runs: 20,
        base_seed: 4,
        checkpoints: vec![10_000],
        jobs: None,
    };
    let r = run_experiment(&cfg).unwrap().policies[0].final_mean();
    let ln_t = 10_000f64.ln();
    assert!(r >= 2.0 * ln_t * 0.5 && r <= 2.0 * ln_t * 10.0, "{r}");
}

#[test]
fn sparse_empty_steps_stop_early() {
    let s = scenario("sparse-2x2").unwrap();
    let cfg = PolicyConfig::new(PolicyKind::CatSe).with_order(DominanceOrder::GroupSparse);
    let run = |horizon| {
        let e = ExperimentConfig::from_scenario(&s, vec![cfg.clone()], horizon, 100, 6).unwrap();
        let t = run_experiment(&e).unwrap();
        t.policies[0].runs.iter().map(|r| r.diagnostics.empty_active_times.len()).sum::<usize>() as f64 / 100.0
    };
    let (short, long) = (run(1_000), run(10_000));
    assert!(long >= short);
    assert!(long - short < 5.0, "{short} vs {long}");
}

#[test]
fn strong_elimination_within_predicted_rounds() {
    let s = scenario("strong-2x2").unwrap();
    let means = s.verify().unwrap();
    let delta = 0.01;
    let bound = elimination_round_bound(means.row(0), means.row(1), delta, 2).unwrap();
    let cfg = PolicyConfig::new(PolicyKind::CatSe)
        .with_order(DominanceOrder::Strong)
        .with_schedule(DeltaSchedule::Fixed(delta));
    let e = ExperimentConfig::from_scenario(&s, vec![cfg], 2_000, 50, 2).unwrap();
    for run in &run_experiment(&e).unwrap().policies[0].runs {
        let first = run.diagnostics.eliminations.iter().find(|ev| ev.eliminated.category == 1);
        let first = first.expect("category 1 eliminated");
        assert!((first.round as f64) <= bound, "round {} > {bound}", first.round);
        assert_eq!(run.best_eliminations, 0);
    }
}

fn history_strategy() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<Vec<f64>>)> {
    (2usize..4, 2usize..5).prop_flat_map(|(m, k)| {
        (
            prop::collection::vec(prop::collection::vec(1usize..60, k), m),
            prop::collection::vec(prop::collection::vec(-3.0..3.0f64, k), m),
        )
    })
}

proptest! {
    #[test]
    fn first_order_test_ignores_arm_labels((counts, means) in history_strategy(), shift in 1usize..4, delta in 0.01..0.5f64) {
        let h = History::from_counts_and_means(&counts, &means);
        // Permute arms inside every category, keeping each arm's own count.
        let k = counts[0].len();
        fn rot<X: Clone>(v: &[X], s: usize) -> Vec<X> {
            let mut w = v.to_vec();
            w.rotate_left(s);
            w
        }
        let hp = History::from_counts_and_means(
            &counts.iter().map(|c| rot(c, shift % k)).collect::<Vec<_>>(),
            &means.iter().map(|c| rot(c, shift % k)).collect::<Vec<_>>(),
        );
        prop_assert_eq!(active_set_first_order(&h, delta), active_set_first_order(&hp, delta));
    }

    #[test]
    fn minmax_elimination_implies_simplex_elimination(
        a in prop::collection::vec(-3.0..3.0f64, 1..6),
        b in prop::collection::vec(-3.0..3.0f64, 1..6),
        r in 0.0..2.0f64,
    ) {
        // Vertex choices are feasible for the simplex test at the same radius.
        let minmax = a.iter().map(|x| x - r).fold(f64::NEG_INFINITY, f64::max)
            > b.iter().map(|x| x + r).fold(f64::INFINITY, f64::min);
        let simplex = max_linear_minus_norm_exact(&a, r).value > min_linear_plus_norm_exact(&b, r).value;
        prop_assert!(!minmax || simplex);
    }

    #[test]
    fn hoeffding_radius_matches_formula(n in 1usize..100_000, delta in 1e-6..0.99f64) {
        let r = hoeffding_radius(n, delta).unwrap().value();
        prop_assert!((r - (2.0 * (1.0 / delta).ln() / n as f64).sqrt()).abs() < 1e-12);
    }
}
