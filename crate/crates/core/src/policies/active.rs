//! Active-category tests for the three dominance orders and MinMaxUCB.

use super::PolicyError;
use crate::confidence::{
    beta, gamma, hoeffding_radius, max_linear_minus_norm_exact, min_linear_plus_norm_exact, ratio_max,
    sparse_activation_threshold,
};
use crate::model::{Arm, History};
use crate::scalar::Real;

/// Categories not yet ruled out, in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActiveSet {
    categories: Vec<usize>,
}

impl ActiveSet {
    pub fn new(mut categories: Vec<usize>) -> Self {
        categories.sort_unstable();
        categories.dedup();
        Self { categories }
    }

    pub fn contains(&self, category: usize) -> bool {
        self.categories.binary_search(&category).is_ok()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.categories
    }
}

/// Empirical means sorted non-increasing, with `values[i] = raw[permutation[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedEstimate<T> {
    pub values: Vec<T>,
    pub permutation: Vec<usize>,
}

impl<T: Real> SortedEstimate<T> {
    pub fn new(raw: &[T]) -> Self {
        let mut permutation: Vec<usize> = (0..raw.len()).collect();
        permutation.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap_or(std::cmp::Ordering::Equal));
        let values = permutation.iter().map(|&i| raw[i]).collect();
        Self { values, permutation }
    }
}

/// An arm is active when `mean >= 2 sqrt(log N / N)`; a category is active
/// when it holds an active arm. Unpulled arms are inactive.
pub fn active_set_group_sparse<T: Real>(history: &History<T>) -> ActiveSet {
    ActiveSet::new(
        (0..history.m())
            .filter(|&c| (0..history.k()).any(|a| arm_is_active(history, c, a)))
            .collect(),
    )
}

pub(crate) fn arm_is_active<T: Real>(history: &History<T>, category: usize, arm: usize) -> bool {
    match history.mean(category, arm) {
        Some(mu) => mu >= sparse_activation_threshold::<T>(history.count(category, arm)).value(),
        None => false,
    }
}

/// Sampling weights `(2 sqrt(log N / N) - mean)^-2` over all arms, normalised,
/// flattened category-major. Fails if any arm is active.
pub fn potential_weights<T: Real>(history: &History<T>) -> Result<Vec<T>, PolicyError> {
    let mut w = Vec::with_capacity(history.m() * history.k());
    for arm in history.arms() {
        let n = history.count(arm.category, arm.arm);
        let gap = sparse_activation_threshold::<T>(n).value() - history.mean_or_zero(arm.category, arm.arm);
        if n == 0 || !(gap > T::zero()) {
            return Err(PolicyError::ActiveArm { category: arm.category, arm: arm.arm });
        }
        w.push(T::one() / (gap * gap));
    }
    let total: T = w.iter().copied().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// `D = max_x <x, sort(b) - sort(a)> / ||x||`: evidence that the category with
/// means `b` beats the one with means `a` in first-order dominance.
pub fn first_order_statistic<T: Real>(a: &[T], b: &[T]) -> T {
    let sa = SortedEstimate::new(a).values;
    let sb = SortedEstimate::new(b).values;
    let d: Vec<T> = sb.iter().zip(&sa).map(|(&x, &y)| x - y).collect();
    ratio_max(&d).value
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Test {
    Strong,
    FirstOrder,
    MinMax,
}

/// Result of screening a candidate set once.
#[derive(Debug, Clone)]
pub(crate) struct Screen<T> {
    pub active: ActiveSet,
    /// `(eliminated, eliminator)` pairs, first eliminator in candidate order.
    pub eliminated: Vec<(usize, usize)>,
    /// Radius per candidate, aligned with the candidate slice.
    pub radius: Vec<T>,
}

/// Runs one elimination test over `candidates`. A category with an unpulled
/// arm is kept and cannot eliminate others.
pub(crate) fn screen<T: Real>(history: &History<T>, candidates: &[usize], delta: T, test: Test) -> Screen<T> {
    let k = history.k();
    let n_cand = candidates.len();
    let mut radius = Vec::with_capacity(n_cand);
    // Per-candidate (upper statistic used to eliminate others, lower statistic
    // others must exceed); FO uses the sorted means instead.
    let mut hi = vec![T::neg_infinity(); n_cand];
    let mut lo = vec![T::infinity(); n_cand];
    let mut ready = vec![false; n_cand];
    let means: Vec<Vec<T>> = candidates.iter().map(|&c| history.category_means(c)).collect();

    for (i, &c) in candidates.iter().enumerate() {
        let p = history.min_count(c);
        if p == 0 {
            radius.push(T::infinity());
            continue;
        }
        ready[i] = true;
        let r = match test {
            Test::Strong => beta(p, delta, k),
            Test::FirstOrder => gamma(p, delta, k),
            Test::MinMax => hoeffding_radius(p, delta),
        }
        .expect("delta in (0, 1) and p >= 1")
        .value();
        radius.push(r);
        match test {
            Test::Strong => {
                hi[i] = max_linear_minus_norm_exact(&means[i], r).value;
                lo[i] = min_linear_plus_norm_exact(&means[i], r).value;
            }
            Test::MinMax => {
                for a in 0..k {
                    let ra = hoeffding_radius(history.count(c, a), delta).expect("pulled").value();
                    hi[i] = hi[i].max(means[i][a] - ra);
                    lo[i] = lo[i].min(means[i][a] + ra);
                }
            }
            Test::FirstOrder => {}
        }
    }

    let mut active = Vec::new();
    let mut eliminated = Vec::new();
    for i in 0..n_cand {
        let by = (0..n_cand).find(|&j| {
            j != i
                && ready[i]
                && ready[j]
                && match test {
                    Test::Strong | Test::MinMax => hi[j] > lo[i],
                    Test::FirstOrder => first_order_statistic(&means[i], &means[j]) > radius[i] + radius[j],
                }
        });
        match by {
            Some(j) => eliminated.push((candidates[i], candidates[j])),
            None => active.push(candidates[i]),
        }
    }
    Screen { active: ActiveSet::new(active), eliminated, radius }
}

/// Cursor over all arms, category-major, that skips filtered categories.
#[derive(Debug, Clone, Default)]
pub(crate) struct RoundRobin {
    cursor: usize,
}

impl RoundRobin {
    /// Next arm at or after the cursor whose category passes `keep`.
    pub fn next(&mut self, m: usize, k: usize, keep: impl Fn(usize) -> bool) -> Arm {
        let n = m * k;
        for step in 0..n {
            let i = (self.cursor + step) % n;
            if keep(i / k) {
                self.cursor = (i + 1) % n;
                return Arm::new(i / k, i % k);
            }
        }
        unreachable!("round robin over an empty set")
    }
}

fn all_categories<T: Real>(history: &History<T>) -> Vec<usize> {
    (0..history.m()).collect()
}

/// Categories surviving the strong test `L_n^+ <= L_m^-` for every `n`, with
/// `beta` at each category's per-arm count.
pub fn active_set_strong<T: Real>(history: &History<T>, delta: T) -> ActiveSet {
    screen(history, &all_categories(history), delta, Test::Strong).active
}

/// Categories surviving `D_{m,n} <= gamma_m + gamma_n` for every `n`; with
/// equal counts this is the `2 gamma` test.
pub fn active_set_first_order<T: Real>(history: &History<T>, delta: T) -> ActiveSet {
    screen(history, &all_categories(history), delta, Test::FirstOrder).active
}

/// Categories surviving `max_k (mean - r) <= min_k (mean + r)` for every `n`.
pub fn active_set_minmax<T: Real>(history: &History<T>, delta: T) -> ActiveSet {
    screen(history, &all_categories(history), delta, Test::MinMax).active
}
