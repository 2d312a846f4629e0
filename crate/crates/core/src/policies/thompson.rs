//! Gaussian Thompson Sampling and Murphy Sampling.
//!
//! Murphy Sampling draws from the same posterior as TS but keeps only draws
//! whose mean matrix satisfies the dominance hypothesis, by rejection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Diagnostics, Policy};
use crate::dominance::{find_dominating_row, DominanceOrder};
use crate::model::{Arm, History};
use crate::scalar::{argmax_first, Real};

/// Proposal draws per step before Murphy Sampling gives up on the hypothesis.
pub const MURPHY_MAX_PROPOSALS: usize = 10_000;

/// Independent Gaussian posterior per arm: mean = empirical mean,
/// variance = `scale^2 / N`. Unpulled arms sample `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior<T> {
    m: usize,
    k: usize,
    means: Vec<T>,
    stds: Vec<T>,
}

impl<T: Real> Posterior<T> {
    pub fn from_history(history: &History<T>) -> Self {
        Self::with_scale(history, T::one())
    }

    /// `scale = 0` collapses the posterior onto the empirical means.
    pub fn with_scale(history: &History<T>, scale: T) -> Self {
        let mut means = Vec::with_capacity(history.m() * history.k());
        let mut stds = Vec::with_capacity(history.m() * history.k());
        for arm in history.arms() {
            let n = history.count(arm.category, arm.arm);
            if n == 0 {
                means.push(T::infinity());
                stds.push(T::zero());
            } else {
                means.push(history.mean_or_zero(arm.category, arm.arm));
                stds.push(scale / T::from_count(n).sqrt());
            }
        }
        Self { m: history.m(), k: history.k(), means, stds }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn means(&self) -> &[T] {
        &self.means
    }

    pub fn variance(&self, category: usize, arm: usize) -> T {
        let s = self.stds[category * self.k + arm];
        s * s
    }

    /// One joint draw, flattened category-major.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.means
            .iter()
            .zip(&self.stds)
            .map(|(&mu, &s)| mu + s * T::standard_normal(rng))
            .collect()
    }

    fn arm_of(&self, flat: usize) -> Arm {
        Arm::new(flat / self.k, flat % self.k)
    }
}

/// Argmax of one posterior draw.
pub fn ts_select<T: Real, R: rand::Rng + ?Sized>(posterior: &Posterior<T>, rng: &mut R) -> Arm {
    posterior.arm_of(argmax_first(&posterior.sample(rng)))
}

/// Whether a flattened mean matrix satisfies the dominance hypothesis.
///
/// Group-sparse: exactly one category has all entries `>= 0` with one `> 0`,
/// and every other category is `<= 0`. Strong and first-order: some category
/// dominates all others (vacuous for one category).
pub fn murphy_hypothesis<T: Real>(theta: &[T], k: usize, order: DominanceOrder) -> bool {
    let rows: Vec<&[T]> = theta.chunks(k).collect();
    match order {
        DominanceOrder::GroupSparse => {
            let mut positive = 0;
            for row in &rows {
                let lo = row.iter().copied().fold(T::infinity(), T::min);
                let hi = row.iter().copied().fold(T::neg_infinity(), T::max);
                if lo >= T::zero() && hi > T::zero() {
                    positive += 1;
                } else if hi > T::zero() {
                    return false;
                }
            }
            positive == 1
        }
        _ => find_dominating_row(&rows, order).is_some(),
    }
}

/// Outcome of one Murphy step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MurphyDraw {
    pub arm: Arm,
    pub proposals: usize,
    pub accepted: bool,
}

/// Rejection-samples the posterior conditioned on `order` (unconditioned when
/// `None`) and returns the argmax of the accepted draw. After `max_proposals`
/// rejections the last draw is used.
pub fn murphy_sample<T: Real, R: rand::Rng + ?Sized>(
    posterior: &Posterior<T>,
    order: Option<DominanceOrder>,
    rng: &mut R,
    max_proposals: usize,
) -> MurphyDraw {
    let mut last = Vec::new();
    for i in 1..=max_proposals.max(1) {
        last = posterior.sample(rng);
        if order.is_none_or(|o| murphy_hypothesis(&last, posterior.k, o)) {
            return MurphyDraw { arm: posterior.arm_of(argmax_first(&last)), proposals: i, accepted: true };
        }
    }
    MurphyDraw {
        arm: posterior.arm_of(argmax_first(&last)),
        proposals: max_proposals.max(1),
        accepted: false,
    }
}

/// Murphy Sampling; with no order this is plain Thompson Sampling.
#[derive(Debug, Clone)]
pub struct Murphy<T> {
    order: Option<DominanceOrder>,
    rng: ChaCha8Rng,
    scale: T,
    max_proposals: usize,
    diag: Diagnostics,
}

impl<T: Real> Murphy<T> {
    pub fn new(order: Option<DominanceOrder>, seed: u64) -> Self {
        Self {
            order,
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale: T::one(),
            max_proposals: MURPHY_MAX_PROPOSALS,
            diag: Diagnostics::default(),
        }
    }

    pub fn thompson(seed: u64) -> Self {
        Self::new(None, seed)
    }

    /// Test hook: rescales the posterior standard deviation.
    pub fn with_posterior_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_max_proposals(mut self, n: usize) -> Self {
        self.max_proposals = n;
        self
    }
}

impl<T: Real> Policy<T> for Murphy<T> {
    fn name(&self) -> String {
        if self.order.is_some() { "murphy" } else { "ts" }.into()
    }

    fn select(&mut self, history: &History<T>) -> Arm {
        let posterior = Posterior::with_scale(history, self.scale);
        let draw = murphy_sample(&posterior, self.order, &mut self.rng, self.max_proposals);
        self.diag.murphy_steps += 1;
        self.diag.murphy_proposals += draw.proposals as u64;
        if draw.accepted && draw.proposals == 1 {
            self.diag.murphy_first_draw_accepts += 1;
        }
        if !draw.accepted {
            self.diag.murphy_fallbacks += 1;
        }
        draw.arm
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diag.clone()
    }
}
