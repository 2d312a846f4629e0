//! Dominance relations between categories.
//!
//! Three partial orders, from strongest to weakest:
//!
//! * group-sparse: `max(a) > min(a) >= 0 >= max(b)`,
//! * strong: `min(a) >= max(b)`,
//! * first-order: the uniform CDF over `a` lies below the one over `b`.
//!
//! Group-sparse implies strong implies first-order. Boundary comparisons use
//! the relative tolerance [`DOMINANCE_RTOL`](crate::scalar::DOMINANCE_RTOL).
//! The simplex characterisations are provided as independent checks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::MeanMatrix;
use crate::scalar::{approx_ge, dot, sorted_desc, strictly_gt, Real};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DominanceError {
    #[error("categories have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("unknown dominance order {0:?} (expected sparse, strong or first)")]
    UnknownOrder(String),
}

/// Model assumption on how categories are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DominanceOrder {
    GroupSparse,
    Strong,
    FirstOrder,
}

impl DominanceOrder {
    pub const ALL: [DominanceOrder; 3] =
        [DominanceOrder::GroupSparse, DominanceOrder::Strong, DominanceOrder::FirstOrder];

    pub fn as_str(self) -> &'static str {
        match self {
            DominanceOrder::GroupSparse => "sparse",
            DominanceOrder::Strong => "strong",
            DominanceOrder::FirstOrder => "first",
        }
    }
}

impl fmt::Display for DominanceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DominanceOrder {
    type Err = DominanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sparse" | "group-sparse" | "groupsparse" => Ok(DominanceOrder::GroupSparse),
            "strong" => Ok(DominanceOrder::Strong),
            "first" | "first-order" | "firstorder" | "fosd" => Ok(DominanceOrder::FirstOrder),
            _ => Err(DominanceError::UnknownOrder(s.to_string())),
        }
    }
}

/// Which reading of the group-sparse inequality to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SparseRule {
    /// `max(a) > min(a) >= 0 >= max(b)`. Excludes constant positive categories.
    #[default]
    Literal,
    /// `max(a) > 0`, `min(a) >= 0 >= max(b)`: non-negative with one positive.
    Prose,
}

fn min_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::infinity(), T::min)
}

fn max_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::neg_infinity(), T::max)
}

pub fn group_sparse_dominates<T: Real>(a: &[T], b: &[T]) -> bool {
    group_sparse_dominates_with(a, b, SparseRule::Literal)
}

pub fn group_sparse_dominates_with<T: Real>(a: &[T], b: &[T], rule: SparseRule) -> bool {
    if a.is_empty() {
        return false;
    }
    let (lo, hi) = (min_of(a), max_of(a));
    let top = match rule {
        SparseRule::Literal => strictly_gt(hi, lo),
        SparseRule::Prose => strictly_gt(hi, T::zero()),
    };
    top && approx_ge(lo, T::zero()) && (b.is_empty() || approx_ge(T::zero(), max_of(b)))
}

pub fn strongly_dominates<T: Real>(a: &[T], b: &[T]) -> bool {
    if a.is_empty() || b.is_empty() {
        return !a.is_empty();
    }
    approx_ge(min_of(a), max_of(b))
}

/// `sup_x F_a(x) - F_b(x) <= 0` with uniform CDFs; sizes may differ.
///
/// The tolerance is applied by shifting `b` down: `F_a(x) <= F_b(x + eps(x))`.
/// Both CDFs are step functions, so the supremum is attained at a point of `a`.
pub fn first_order_dominates<T: Real>(a: &[T], b: &[T]) -> bool {
    if a.is_empty() || b.is_empty() {
        return !a.is_empty();
    }
    let (na, nb) = (a.len(), b.len());
    a.iter().all(|&x| {
        let eps = T::lit(crate::scalar::DOMINANCE_RTOL) * T::one().max(x.abs());
        let fa = a.iter().filter(|&&v| v <= x).count();
        let fb = b.iter().filter(|&&v| v <= x + eps).count();
        fa * nb <= fb * na
    })
}

/// Equal-size first-order test: k-th largest of `a` >= k-th largest of `b`.
pub fn first_order_dominates_sorted<T: Real>(a: &[T], b: &[T]) -> Result<bool, DominanceError> {
    if a.len() != b.len() {
        return Err(DominanceError::SizeMismatch(a.len(), b.len()));
    }
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    Ok(sa.iter().zip(&sb).all(|(&x, &y)| approx_ge(x, y)))
}

pub fn dominates<T: Real>(order: DominanceOrder, a: &[T], b: &[T]) -> bool {
    match order {
        DominanceOrder::GroupSparse => group_sparse_dominates(a, b),
        DominanceOrder::Strong => strongly_dominates(a, b),
        DominanceOrder::FirstOrder => first_order_dominates(a, b),
    }
}

/// Points of the probability simplex used by the characterisation checks.
///
/// `xs` live in the simplex of the first category, `ys` in that of the second.
#[derive(Debug, Clone)]
pub struct SimplexGrid<T> {
    pub xs: Vec<Vec<T>>,
    pub ys: Vec<Vec<T>>,
}

impl<T: Real> SimplexGrid<T> {
    /// All vertices plus `random_per_side` uniform (Dirichlet(1,...,1)) points per side.
    pub fn vertices_and_random<R: Rng + ?Sized>(
        ka: usize,
        kb: usize,
        random_per_side: usize,
        rng: &mut R,
    ) -> Self {
        let side = |k: usize, rng: &mut R| {
            let mut pts = vertices(k);
            pts.extend((0..random_per_side).map(|_| uniform_simplex_point(k, rng)));
            pts
        };
        let xs = side(ka, rng);
        let ys = side(kb, rng);
        Self { xs, ys }
    }

    pub fn vertices_only(ka: usize, kb: usize) -> Self {
        Self { xs: vertices(ka), ys: vertices(kb) }
    }

    pub fn from_points(xs: Vec<Vec<T>>, ys: Vec<Vec<T>>) -> Self {
        Self { xs, ys }
    }
}

pub fn vertices<T: Real>(k: usize) -> Vec<Vec<T>> {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// Uniform point on the simplex via normalised exponentials.
pub fn uniform_simplex_point<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    let mut e: Vec<T> = (0..k).map(|_| -T::open01(rng).ln()).collect();
    let s: T = e.iter().copied().sum();
    e.iter_mut().for_each(|x| *x = *x / s);
    e
}

/// `<x, a> >= <y, b>` for every `x` in `grid.xs` and `y` in `grid.ys`.
///
/// The pairwise condition is evaluated as `min_x <x, a> >= max_y <y, b>`.
pub fn strong_simplex_check<T: Real>(a: &[T], b: &[T], grid: &SimplexGrid<T>) -> bool {
    let lo = grid.xs.iter().map(|x| dot(x, a)).fold(T::infinity(), T::min);
    let hi = grid.ys.iter().map(|y| dot(y, b)).fold(T::neg_infinity(), T::max);
    approx_ge(lo, hi)
}

/// `<x, sort(a)> >= <x, sort(b)>` for every grid point, both sides of the grid.
pub fn first_order_simplex_check<T: Real>(
    a: &[T],
    b: &[T],
    grid: &SimplexGrid<T>,
) -> Result<bool, DominanceError> {
    if a.len() != b.len() {
        return Err(DominanceError::SizeMismatch(a.len(), b.len()));
    }
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    Ok(grid
        .xs
        .iter()
        .chain(&grid.ys)
        .filter(|x| x.len() == sa.len())
        .all(|x| approx_ge(dot(x, &sa), dot(x, &sb))))
}

/// Index of the first row dominating every other row under `order`.
pub fn find_dominating_row<T: Real, R: AsRef<[T]>>(rows: &[R], order: DominanceOrder) -> Option<usize> {
    (0..rows.len()).find(|&m| {
        (0..rows.len())
            .filter(|&n| n != m)
            .all(|n| dominates(order, rows[m].as_ref(), rows[n].as_ref()))
    })
}

/// Category dominating all others, if any. When present it holds the global
/// maximal mean.
pub fn find_dominating_category<T: Real>(means: &MeanMatrix<T>, order: DominanceOrder) -> Option<usize> {
    find_dominating_row(means.rows(), order)
}

/// Strongest order under which some category dominates all others.
pub fn strongest_order<T: Real>(means: &MeanMatrix<T>) -> Option<(DominanceOrder, usize)> {
    DominanceOrder::ALL
        .iter()
        .find_map(|&o| find_dominating_category(means, o).map(|m| (o, m)))
}
