//! Independent oracles and generators shared by the integration suites.

#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;

/// Integer compositions of `n` into `k` parts, as simplex points.
pub fn lattice(k: usize, n: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / n as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, n, &mut Vec::new(), &mut out);
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `max <x, v> - c ||x||` over the 0.01-step simplex grid.
pub fn grid_max_linear_minus_norm(v: &[f64], c: f64) -> f64 {
    lattice(v.len(), 100).iter().map(|x| dot(x, v) - c * norm(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// `min <y, v> + c ||y||` over the 0.01-step simplex grid.
pub fn grid_min_linear_plus_norm(v: &[f64], c: f64) -> f64 {
    lattice(v.len(), 100).iter().map(|x| dot(x, v) + c * norm(x)).fold(f64::INFINITY, f64::min)
}

/// `max <x, d> / ||x||` over the 0.01-step simplex grid.
pub fn grid_ratio_max(d: &[f64]) -> f64 {
    lattice(d.len(), 100).iter().map(|x| dot(x, d) / norm(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Strong dominance straight from the definition: every arm of `a` at least
/// every arm of `b`.
pub fn strong_by_definition(a: &[f64], b: &[f64]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| x >= y))
}

/// First-order dominance from empirical CDFs evaluated at every atom.
pub fn first_order_by_cdf(a: &[f64], b: &[f64]) -> bool {
    let cdf = |v: &[f64], x: f64| v.iter().filter(|&&u| u <= x).count() as f64 / v.len() as f64;
    a.iter().chain(b).all(|&x| cdf(a, x) <= cdf(b, x))
}

/// Category pairs that hit dominance boundaries often: half drawn from a
/// coarse grid of values (ties), half continuous with `b` shifted down.
pub fn random_pair<R: Rng>(rng: &mut R, k: usize) -> (Vec<f64>, Vec<f64>) {
    if rng.random_bool(0.5) {
        let pick = |rng: &mut R| (rng.random_range(-2..=2) as f64) * 0.5;
        ((0..k).map(|_| pick(rng)).collect(), (0..k).map(|_| pick(rng)).collect())
    } else {
        let a: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shift = rng.random_range(-0.5..2.0);
        let b = (0..k).map(|_| rng.random_range(-1.0..1.0) - shift).collect();
        (a, b)
    }
}

/// Sample mean of `n` unit-variance Gaussian draws around `mu`.
pub fn sample_mean<R: Rng>(rng: &mut R, mu: f64, n: usize) -> f64 {
    mu + (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).sum::<f64>() / n as f64
}

pub fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

// Criterion checks shared by the suites and the acceptance runner.

use catbandit::confidence::{beta, gamma, hoeffding_radius, max_linear_minus_norm, min_linear_plus_norm, ratio_max};
use catbandit::dominance::{
    find_dominating_category, first_order_dominates, first_order_dominates_sorted, group_sparse_dominates,
    strong_simplex_check, strongly_dominates, SimplexGrid,
};
use catbandit::{DominanceOrder, MeanMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Default)]
pub struct SolverReport {
    pub instances: usize,
    /// Largest |solver - grid| over both norm-penalised problems.
    pub norm_err: f64,
    pub ratio_err: f64,
    /// Instances with some `d_k >= 0` where `ratio_max != ||d_+||`.
    pub closed_form_mismatches: usize,
}

pub fn solver_oracle(instances: usize, seed: u64) -> SolverReport {
    let mut r = rng(seed);
    let mut rep = SolverReport { instances, ..Default::default() };
    for _ in 0..instances {
        let k = r.random_range(2..=4);
        let v: Vec<f64> = (0..k).map(|_| r.random_range(-2.0..2.0)).collect();
        let c = r.random_range(0.0..2.0);
        let e1 = (max_linear_minus_norm(&v, c).value - grid_max_linear_minus_norm(&v, c)).abs();
        let e2 = (min_linear_plus_norm(&v, c).value - grid_min_linear_plus_norm(&v, c)).abs();
        rep.norm_err = rep.norm_err.max(e1).max(e2);
        let d: Vec<f64> = (0..k).map(|_| r.random_range(-2.0..2.0)).collect();
        let rm = ratio_max(&d).value;
        rep.ratio_err = rep.ratio_err.max((rm - grid_ratio_max(&d)).abs());
        if d.iter().any(|&x| x >= 0.0) {
            let pos: Vec<f64> = d.iter().map(|&x| x.max(0.0)).collect();
            if (rm - norm(&pos)).abs() > 1e-12 {
                rep.closed_form_mismatches += 1;
            }
        }
    }
    rep
}

#[derive(Debug, Default)]
pub struct DominanceReport {
    pub pairs: usize,
    pub chain_violations: usize,
    pub strong_simplex_mismatches: usize,
    pub first_order_mismatches: usize,
    /// How often each relation held, to show the sample is not vacuous.
    pub sparse_true: usize,
    pub strong_true: usize,
    pub first_order_true: usize,
}

pub fn dominance_logic(pairs: usize, seed: u64) -> DominanceReport {
    let mut r = rng(seed);
    let mut rep = DominanceReport { pairs, ..Default::default() };
    for _ in 0..pairs {
        let k = r.random_range(1..=5);
        let (a, b) = random_pair(&mut r, k);
        let gs = group_sparse_dominates(&a, &b);
        let st = strongly_dominates(&a, &b);
        let fo = first_order_dominates(&a, &b);
        rep.sparse_true += gs as usize;
        rep.strong_true += st as usize;
        rep.first_order_true += fo as usize;
        if (gs && !st) || (st && !fo) {
            rep.chain_violations += 1;
        }
        let grid = SimplexGrid::vertices_and_random(k, k, 200, &mut r);
        if strong_simplex_check(&a, &b, &grid) != st || st != strong_by_definition(&a, &b) {
            rep.strong_simplex_mismatches += 1;
        }
        let sorted = first_order_dominates_sorted(&a, &b).expect("equal sizes");
        if sorted != fo || fo != first_order_by_cdf(&a, &b) {
            rep.first_order_mismatches += 1;
        }
    }
    rep
}

/// `(name, delta, observed failure rate, allowed failure rate)` for each suite.
pub type CoverageRow = (String, f64, f64, f64);

/// Empirical miscoverage of the three radii at confidence `delta`.
pub fn coverage(delta: f64, reps: usize, seed: u64) -> Vec<CoverageRow> {
    let mut r = rng(seed);
    let mut rows = Vec::new();

    for n in [1usize, 5, 40] {
        let rad = hoeffding_radius(n, delta).unwrap().value();
        let fails = (0..reps).filter(|_| (sample_mean(&mut r, 0.3, n) - 0.3).abs() > rad).count();
        rows.push((format!("hoeffding n={n}"), delta, fails as f64 / reps as f64, 1.1 * 2.0 * delta));
    }

    let mu = [1.0, 0.5, 0.5, 0.0, -1.0];
    for (k, p) in [(2usize, 1usize), (5, 10)] {
        let rad = beta(p, delta, k).unwrap().value();
        let xs: Vec<Vec<f64>> = (0..1000).map(|_| catbandit::dominance::uniform_simplex_point(k, &mut r)).collect();
        let fails = (0..reps)
            .filter(|_| {
                let z: Vec<f64> = (0..k).map(|i| sample_mean(&mut r, mu[i], p) - mu[i]).collect();
                xs.iter().any(|x| dot(x, &z) > norm(x) * rad)
            })
            .count();
        rows.push((format!("beta K={k} p={p}"), delta, fails as f64 / reps as f64, 1.1 * delta));
    }

    for (k, p) in [(2usize, 1usize), (5, 10)] {
        let rad = gamma(p, delta, k).unwrap().value();
        let truth = sorted_desc(&mu[..k]);
        let fails = (0..reps)
            .filter(|_| {
                let est: Vec<f64> = (0..k).map(|i| sample_mean(&mut r, mu[i], p)).collect();
                let d: Vec<f64> = sorted_desc(&est).iter().zip(&truth).map(|(a, b)| a - b).collect();
                norm(&d) > rad
            })
            .count();
        rows.push((format!("gamma K={k} p={p}"), delta, fails as f64 / reps as f64, 1.1 * delta));
    }
    rows
}

/// The row of the global maximum, for checking `find_dominating_category`.
pub fn argmax_row(rows: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, row) in rows.iter().enumerate() {
        for &x in row {
            if x > best.1 {
                best = (i, x);
            }
        }
    }
    best.0
}

pub fn dominating_row_holds_max(rows: Vec<Vec<f64>>, order: DominanceOrder) -> bool {
    let m = MeanMatrix::new(rows.clone()).unwrap();
    match find_dominating_category(&m, order) {
        Some(c) => m.row(c).iter().any(|&x| x == m.max()),
        None => true,
    }
}
