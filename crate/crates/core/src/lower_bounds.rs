//! Instance-dependent constants `c_mu` in the `c_mu log T` regret lower bound.
//!
//! Unit-variance Gaussian arms throughout, so every arm's contribution has
//! the form `2 / gap`. Arm indices are those of the sorted [`MeanMatrix`].

use serde::Serialize;
use thiserror::Error;

use crate::confidence::{lattice_resolution, simplex_lattice};
use crate::dominance::{find_dominating_row, group_sparse_dominates_with, DominanceOrder, SparseRule};
use crate::model::{gaps, Arm, GapTable, MeanMatrix};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum LowerBoundError {
    #[error("instance does not satisfy {0} dominance")]
    DominanceViolated(DominanceOrder),
    #[error("best arm is not unique")]
    NoUniqueOptimum,
    #[error("expected a 2x2 instance, got {m}x{k}")]
    Shape { m: usize, k: usize },
    #[error("arms are not intertwined")]
    NotIntertwined,
    #[error("no closed form for {0} dominance on this shape")]
    Unsupported(DominanceOrder),
}

/// One additive contribution to `c_mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundTerm<T> {
    pub arm: Arm,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundResult<T> {
    pub c_mu: T,
    pub terms: Vec<LowerBoundTerm<T>>,
    /// First-order 2x2 only: the factor applied to `2 / gap_{2,1}`.
    pub rho: Option<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> LowerBoundResult<T> {
    fn from_terms(terms: Vec<LowerBoundTerm<T>>) -> Self {
        let c_mu = terms.iter().map(|t| t.value).sum();
        Self { c_mu, terms, rho: None, warnings: Vec::new() }
    }
}

fn two_over<T: Real>(gap: T) -> T {
    T::lit(2.0) / gap
}

fn best_category_terms<T: Real>(g: &GapTable<T>) -> Vec<LowerBoundTerm<T>> {
    let best = g.best();
    (0..g.k())
        .filter(|&a| a != best.arm)
        .map(|a| LowerBoundTerm { arm: Arm::new(best.category, a), value: two_over(g.get(best.category, a)) })
        .collect()
}

/// `sum_{k >= 2} 2 / gap_{1,k}` over the best category, without checking
/// dominance.
pub fn group_sparse_formula<T: Real>(means: &MeanMatrix<T>) -> LowerBoundResult<T> {
    LowerBoundResult::from_terms(best_category_terms(&gaps(means)))
}

/// Group-sparse terms plus `2 / gap_{m,K}` for every other category's worst
/// arm, without checking dominance. Warns when a worst arm is tied.
pub fn strong_formula<T: Real>(means: &MeanMatrix<T>) -> LowerBoundResult<T> {
    let g = gaps(means);
    let best = g.best();
    let k = g.k();
    let mut terms = best_category_terms(&g);
    let mut warnings = Vec::new();
    for c in (0..g.m()).filter(|&c| c != best.category) {
        terms.push(LowerBoundTerm { arm: Arm::new(c, k - 1), value: two_over(g.get(c, k - 1)) });
        if k >= 2 && means.get(c, k - 2) == means.get(c, k - 1) {
            warnings.push(format!("category {c} has a tied worst arm; using its minimum"));
        }
    }
    let mut r = LowerBoundResult::from_terms(terms);
    r.warnings = warnings;
    r
}

/// `sum 2 / gap` over every suboptimal arm: the bound with no structure.
pub fn unstructured_formula<T: Real>(means: &MeanMatrix<T>) -> LowerBoundResult<T> {
    let g = gaps(means);
    let best = g.best();
    let terms = (0..g.m())
        .flat_map(|c| (0..g.k()).map(move |a| Arm::new(c, a)))
        .filter(|&a| a != best)
        .map(|a| LowerBoundTerm { arm: a, value: two_over(g.get(a.category, a.arm)) })
        .collect();
    LowerBoundResult::from_terms(terms)
}

/// `rho = 1 - (gap_22 - gap_12)^2 / (gap_12^2 + gap_22^2)`.
pub fn first_order_rho<T: Real>(gap_12: T, gap_22: T) -> T {
    let d = gap_22 - gap_12;
    T::one() - d * d / (gap_12 * gap_12 + gap_22 * gap_22)
}

/// The 2x2 first-order closed form, without the intertwining check. Category
/// 1 is the one holding the best arm.
pub fn first_order_2x2_formula<T: Real>(means: &MeanMatrix<T>) -> Result<LowerBoundResult<T>, LowerBoundError> {
    if means.m() != 2 || means.k() != 2 {
        return Err(LowerBoundError::Shape { m: means.m(), k: means.k() });
    }
    let g = gaps(means);
    let (b, o) = (g.best().category, 1 - g.best().category);
    let (g12, g21, g22) = (g.get(b, 1), g.get(o, 0), g.get(o, 1));
    let rho = first_order_rho(g12, g22);
    let terms = vec![
        LowerBoundTerm { arm: Arm::new(b, 1), value: two_over(g12) },
        LowerBoundTerm { arm: Arm::new(o, 1), value: two_over(g22) },
        LowerBoundTerm { arm: Arm::new(o, 0), value: rho * two_over(g21) },
    ];
    let mut r = LowerBoundResult::from_terms(terms);
    r.rho = Some(rho);
    Ok(r)
}

fn require_unique<T: Real>(means: &MeanMatrix<T>) -> Result<(), LowerBoundError> {
    if means.has_unique_optimum() {
        Ok(())
    } else {
        Err(LowerBoundError::NoUniqueOptimum)
    }
}

/// Group-sparse `c_mu`. The best category must be non-negative with a
/// positive mean and every other category non-positive.
pub fn c_mu_group_sparse<T: Real>(means: &MeanMatrix<T>) -> Result<LowerBoundResult<T>, LowerBoundError> {
    require_unique(means)?;
    let best = means.argmax().category;
    let ok = (0..means.m())
        .filter(|&c| c != best)
        .all(|c| group_sparse_dominates_with(means.row(best), means.row(c), SparseRule::Prose))
        && group_sparse_dominates_with(means.row(best), &[], SparseRule::Prose);
    if !ok {
        return Err(LowerBoundError::DominanceViolated(DominanceOrder::GroupSparse));
    }
    Ok(group_sparse_formula(means))
}

pub fn c_mu_strong<T: Real>(means: &MeanMatrix<T>) -> Result<LowerBoundResult<T>, LowerBoundError> {
    require_unique(means)?;
    let rows = means.rows();
    let best = means.argmax().category;
    let ok = (0..means.m())
        .filter(|&c| c != best)
        .all(|c| crate::dominance::strongly_dominates(&rows[best], &rows[c]));
    if !ok {
        return Err(LowerBoundError::DominanceViolated(DominanceOrder::Strong));
    }
    Ok(strong_formula(means))
}

/// `mu^1_1 > mu^2_1 > mu^1_2 > mu^2_2` with category 1 the first row.
pub fn check_intertwined<T: Real>(means: &MeanMatrix<T>) -> Result<bool, LowerBoundError> {
    if means.m() != 2 || means.k() != 2 {
        return Err(LowerBoundError::Shape { m: means.m(), k: means.k() });
    }
    let (a, b) = (means.row(0), means.row(1));
    Ok(a[0] > b[0] && b[0] > a[1] && a[1] > b[1])
}

pub fn c_mu_first_order_2x2<T: Real>(means: &MeanMatrix<T>) -> Result<LowerBoundResult<T>, LowerBoundError> {
    if !check_intertwined(means)? {
        return Err(LowerBoundError::NotIntertwined);
    }
    first_order_2x2_formula(means)
}

/// `c_mu` for `order`, when a closed form exists for this instance.
pub fn c_mu<T: Real>(means: &MeanMatrix<T>, order: DominanceOrder) -> Result<LowerBoundResult<T>, LowerBoundError> {
    match order {
        DominanceOrder::GroupSparse => c_mu_group_sparse(means),
        DominanceOrder::Strong => c_mu_strong(means),
        DominanceOrder::FirstOrder => {
            if means.m() != 2 || means.k() != 2 {
                return Err(LowerBoundError::Unsupported(order));
            }
            if find_dominating_row(means.rows(), order).is_none() {
                return Err(LowerBoundError::DominanceViolated(order));
            }
            c_mu_first_order_2x2(means)
        }
    }
}

/// Grid minimiser of one allocation subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce<T> {
    pub value: T,
    pub allocation: Vec<T>,
}

/// Minimises `sum_k N_k gap_k` subject to `sum_k N_k gap_k^2 >= 2`, `N >= 0`,
/// over a lattice of directions (the constraint is tight at the optimum).
/// The closed form puts all mass on the largest gap: `2 / max gap`.
pub fn strong_category_brute_force<T: Real>(category_gaps: &[T]) -> BruteForce<T> {
    let k = category_gaps.len();
    let mut best = BruteForce { value: T::infinity(), allocation: vec![T::zero(); k] };
    for w in simplex_lattice::<T>(k, lattice_resolution(k, 20_000)) {
        let lin: T = w.iter().zip(category_gaps).map(|(&x, &g)| x * g).sum();
        let quad: T = w.iter().zip(category_gaps).map(|(&x, &g)| x * g * g).sum();
        if quad <= T::zero() {
            continue;
        }
        let scale = T::lit(2.0) / quad;
        let value = scale * lin;
        if value < best.value {
            best = BruteForce { value, allocation: w.iter().map(|&x| x * scale).collect() };
        }
    }
    best
}

/// The 2x2 first-order allocation problem: `N^1_2 >= 2 / gap_12^2`,
/// `N^2_2 >= 2 / gap_22^2`, and
/// `N^2_1 gap_21^2 + N^1_2 (mu^1_2 - m)^2 + N^2_2 (mu^2_2 - m)^2 >= 2` with `m`
/// the count-weighted mean of the two second arms.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderBruteForce<T> {
    /// Regret with `N^1_2`, `N^2_2` at their lower limits (the closed form).
    pub pinned: T,
    /// Grid minimum with `N^1_2`, `N^2_2` free above their limits.
    pub free: T,
    /// `[N^1_2, N^2_1, N^2_2]` at the free minimum.
    pub free_allocation: [T; 3],
}

/// Evaluates the 2x2 first-order system by grid search.
pub fn first_order_2x2_brute_force<T: Real>(means: &MeanMatrix<T>) -> Result<FirstOrderBruteForce<T>, LowerBoundError> {
    if !check_intertwined(means)? {
        return Err(LowerBoundError::NotIntertwined);
    }
    let (a, b) = (means.row(0), means.row(1));
    let (g12, g21, g22) = (a[0] - a[1], a[0] - b[0], a[0] - b[1]);
    let two = T::lit(2.0);
    // Cheapest N^2_1 for given (N^1_2, N^2_2), and the resulting regret.
    let regret = |x: T, y: T| -> (T, T) {
        let mix = (x * a[1] + y * b[1]) / (x + y);
        let covered = x * (a[1] - mix).powi(2) + y * (b[1] - mix).powi(2);
        let z = ((two - covered) / (g21 * g21)).max(T::zero());
        (x * g12 + z * g21 + y * g22, z)
    };
    let (x0, y0) = (two / (g12 * g12), two / (g22 * g22));
    let pinned = regret(x0, y0).0;
    // Beyond this extra cost the pinned point is already cheaper.
    let (xr, yr) = (pinned / g12, pinned / g22);
    let mut best = (pinned, [x0, regret(x0, y0).1, y0]);
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (x0, x0 + xr, y0, y0 + yr);
    let n = 400;
    for _ in 0..4 {
        let (mut bx, mut by) = (best.1[0], best.1[2]);
        for i in 0..=n {
            let x = xlo + (xhi - xlo) * T::from_count(i) / T::from_count(n);
            for j in 0..=n {
                let y = ylo + (yhi - ylo) * T::from_count(j) / T::from_count(n);
                let (r, z) = regret(x, y);
                if r < best.0 {
                    best = (r, [x, z, y]);
                    bx = x;
                    by = y;
                }
            }
        }
        let (wx, wy) = ((xhi - xlo) / T::lit(20.0), (yhi - ylo) / T::lit(20.0));
        xlo = (bx - wx).max(x0);
        xhi = bx + wx;
        ylo = (by - wy).max(y0);
        yhi = by + wy;
    }
    Ok(FirstOrderBruteForce { pinned, free: best.0, free_allocation: best.1 })
}
