//! Bandit instances, reward generation and regret accounting.
//!
//! A [`MeanMatrix`] is the ground truth of an instance: `M` categories of `K`
//! arms. Arms are stored sorted in non-increasing order of mean inside each
//! category, so arm 0 is always the best arm of its category and arm `K - 1`
//! the worst. The permutation back to the caller's order is kept.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("instance has no categories or no arms")]
    Empty,
    #[error("category {row} has {found} arms, expected {expected} (instances must be rectangular)")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("mean of arm {arm} in category {category} is not finite")]
    NonFinite { category: usize, arm: usize },
    #[error("no unique optimum: the maximal mean is attained by more than one arm")]
    NoUniqueOptimum,
    #[error("arm ({category}, {arm}) out of range for a {m}x{k} instance")]
    IndexOutOfRange { category: usize, arm: usize, m: usize, k: usize },
    #[error("shape mismatch: expected {expected_m}x{expected_k}, found {found_m}x{found_k}")]
    ShapeMismatch {
        expected_m: usize,
        expected_k: usize,
        found_m: usize,
        found_k: usize,
    },
    #[error("reading instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing instance: {0}")]
    Json(#[from] serde_json::Error),
}

/// A (category, arm) pair. Arm indices refer to the sorted order of the
/// [`MeanMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arm {
    pub category: usize,
    pub arm: usize,
}

impl Arm {
    pub const fn new(category: usize, arm: usize) -> Self {
        Self { category, arm }
    }
}

/// `M x K` table of expected rewards, rows sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrix<T> {
    k: usize,
    rows: Vec<Vec<T>>,
    permutation: Vec<Vec<usize>>,
}

impl<T: Real> MeanMatrix<T> {
    /// Validates and sorts `rows`. Ties keep the caller's relative order.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, ModelError> {
        let k = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || k == 0 {
            return Err(ModelError::Empty);
        }
        let mut sorted_rows = Vec::with_capacity(rows.len());
        let mut permutation = Vec::with_capacity(rows.len());
        for (m, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(ModelError::Ragged { row: m, expected: k, found: row.len() });
            }
            if let Some(arm) = row.iter().position(|x| !x.is_finite()) {
                return Err(ModelError::NonFinite { category: m, arm });
            }
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).expect("finite"));
            sorted_rows.push(order.iter().map(|&i| row[i]).collect());
            permutation.push(order);
        }
        Ok(Self { k, rows: sorted_rows, permutation })
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect())
    }

    /// Number of categories.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of arms per category.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_arms(&self) -> usize {
        self.rows.len() * self.k
    }

    pub fn get(&self, category: usize, arm: usize) -> T {
        self.rows[category][arm]
    }

    /// Means of one category, sorted non-increasing.
    pub fn row(&self, category: usize) -> &[T] {
        &self.rows[category]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// `permutation(m)[k]` is the index, in the caller's original row, of
    /// sorted arm `k`.
    pub fn permutation(&self, category: usize) -> &[usize] {
        &self.permutation[category]
    }

    pub fn max(&self) -> T {
        self.rows.iter().map(|r| r[0]).fold(T::neg_infinity(), T::max)
    }

    /// Location of the maximal mean (lowest category on ties).
    pub fn argmax(&self) -> Arm {
        let mut best = Arm::new(0, 0);
        for m in 1..self.m() {
            if self.rows[m][0] > self.rows[best.category][0] {
                best = Arm::new(m, 0);
            }
        }
        best
    }

    /// True when exactly one arm attains the maximal mean.
    pub fn has_unique_optimum(&self) -> bool {
        let max = self.max();
        self.rows.iter().flatten().filter(|&&x| x == max).count() == 1
    }

    /// Applies `f` to every mean and re-sorts.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self, ModelError> {
        Self::new(self.rows.iter().map(|r| r.iter().map(|&x| f(x)).collect()).collect())
    }
}

/// On-disk instance description. Rows need not be sorted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub means: Vec<Vec<f64>>,
    #[serde(default)]
    pub label: String,
}

impl InstanceFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_means<T: Real>(&self) -> Result<MeanMatrix<T>, ModelError> {
        MeanMatrix::from_f64_rows(&self.means)
    }
}

/// Unit-variance Gaussian reward generator over a [`MeanMatrix`].
#[derive(Debug, Clone)]
pub struct Environment<T> {
    means: MeanMatrix<T>,
    rng: ChaCha8Rng,
    seed: u64,
    noise_scale: T,
}

/// Builds an environment, rejecting instances whose maximal mean is tied.
pub fn make_environment<T: Real>(means: MeanMatrix<T>, seed: u64) -> Result<Environment<T>, ModelError> {
    if !means.has_unique_optimum() {
        return Err(ModelError::NoUniqueOptimum);
    }
    Ok(Environment {
        means,
        rng: ChaCha8Rng::seed_from_u64(seed),
        seed,
        noise_scale: T::one(),
    })
}

impl<T: Real> Environment<T> {
    pub fn means(&self) -> &MeanMatrix<T> {
        &self.means
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Test hook: scales the Gaussian noise (0 makes rewards deterministic).
    pub fn with_noise_scale(mut self, scale: T) -> Self {
        self.noise_scale = scale;
        self
    }

    /// Draws `mu + eta` with `eta ~ N(0, 1)`.
    pub fn pull(&mut self, category: usize, arm: usize) -> Result<T, ModelError> {
        if category >= self.means.m() || arm >= self.means.k() {
            return Err(ModelError::IndexOutOfRange {
                category,
                arm,
                m: self.means.m(),
                k: self.means.k(),
            });
        }
        let noise = T::standard_normal(&mut self.rng);
        Ok(self.means.get(category, arm) + self.noise_scale * noise)
    }
}

/// `gaps[m][k] = max mean - mu[m][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTable<T> {
    k: usize,
    gaps: Vec<T>,
    best: Arm,
    degenerate: bool,
}

pub fn gaps<T: Real>(means: &MeanMatrix<T>) -> GapTable<T> {
    let max = means.max();
    GapTable {
        k: means.k(),
        gaps: means.rows().iter().flatten().map(|&x| max - x).collect(),
        best: means.argmax(),
        degenerate: !means.has_unique_optimum(),
    }
}

impl<T: Real> GapTable<T> {
    pub fn get(&self, category: usize, arm: usize) -> T {
        self.gaps[category * self.k + arm]
    }

    pub fn m(&self) -> usize {
        self.gaps.len() / self.k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn best(&self) -> Arm {
        self.best
    }

    /// True when the maximal mean is not unique.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn max_gap(&self) -> T {
        self.gaps.iter().copied().fold(T::zero(), T::max)
    }

    pub fn row(&self, category: usize) -> &[T] {
        &self.gaps[category * self.k..(category + 1) * self.k]
    }
}

/// Pull counts and reward sums per arm; the sufficient statistic of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct History<T> {
    m: usize,
    k: usize,
    counts: Vec<usize>,
    sums: Vec<T>,
    t: usize,
}

impl<T: Real> History<T> {
    pub fn new(m: usize, k: usize) -> Self {
        Self { m, k, counts: vec![0; m * k], sums: vec![T::zero(); m * k], t: 0 }
    }

    /// Builds a history with the given counts and empirical means.
    /// Arms with a zero count must have a zero mean.
    pub fn from_counts_and_means(counts: &[Vec<usize>], means: &[Vec<T>]) -> Self {
        let m = counts.len();
        let k = counts.first().map(Vec::len).unwrap_or(0);
        let mut h = Self::new(m, k);
        for c in 0..m {
            for a in 0..k {
                let n = counts[c][a];
                h.counts[c * k + a] = n;
                h.sums[c * k + a] = means[c][a] * T::from_count(n);
                h.t += n;
            }
        }
        h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of pulls so far.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn record(&mut self, arm: Arm, reward: T) {
        let i = arm.category * self.k + arm.arm;
        self.counts[i] += 1;
        self.sums[i] = self.sums[i] + reward;
        self.t += 1;
    }

    pub fn count(&self, category: usize, arm: usize) -> usize {
        self.counts[category * self.k + arm]
    }

    pub fn sum(&self, category: usize, arm: usize) -> T {
        self.sums[category * self.k + arm]
    }

    /// Empirical mean; `None` before the first pull.
    pub fn mean(&self, category: usize, arm: usize) -> Option<T> {
        let n = self.count(category, arm);
        (n > 0).then(|| self.sum(category, arm) / T::from_count(n))
    }

    /// Empirical mean, 0 for a never-pulled arm.
    pub fn mean_or_zero(&self, category: usize, arm: usize) -> T {
        self.mean(category, arm).unwrap_or_else(T::zero)
    }

    /// Empirical mean vector of one category (arms never pulled read 0).
    pub fn category_means(&self, category: usize) -> Vec<T> {
        (0..self.k).map(|a| self.mean_or_zero(category, a)).collect()
    }

    pub fn category_count(&self, category: usize) -> usize {
        self.counts[category * self.k..(category + 1) * self.k].iter().sum()
    }

    pub fn category_sum(&self, category: usize) -> T {
        self.sums[category * self.k..(category + 1) * self.k].iter().copied().sum()
    }

    /// Smallest per-arm count inside a category.
    pub fn min_count(&self, category: usize) -> usize {
        self.counts[category * self.k..(category + 1) * self.k]
            .iter()
            .copied()
            .min()
            .unwrap_or(0)
    }

    pub fn all_pulled(&self) -> bool {
        self.counts.iter().all(|&n| n > 0)
    }

    pub fn arms(&self) -> impl Iterator<Item = Arm> + '_ {
        let k = self.k;
        (0..self.m).flat_map(move |c| (0..k).map(move |a| Arm::new(c, a)))
    }
}

/// `sum_{m,k} gap[m][k] * N[m][k]`.
pub fn pseudo_regret<T: Real>(gaps: &GapTable<T>, history: &History<T>) -> Result<T, ModelError> {
    if gaps.m() != history.m() || gaps.k() != history.k() {
        return Err(ModelError::ShapeMismatch {
            expected_m: gaps.m(),
            expected_k: gaps.k(),
            found_m: history.m(),
            found_k: history.k(),
        });
    }
    Ok(gaps
        .gaps
        .iter()
        .zip(&history.counts)
        .map(|(&g, &n)| g * T::from_count(n))
        .sum())
}

/// Pseudo-regret sampled at checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace<T> {
    pub checkpoints: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> RegretTrace<T> {
    pub fn final_value(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}
