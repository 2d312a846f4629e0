//! Sequential decision rules behind one interface.
//!
//! The runner owns the [`History`]: it asks the policy for an arm, pulls it,
//! records the reward, then calls [`Policy::observe`]. Time `t` passed to the
//! confidence schedules is 1-indexed, i.e. `history.t() + 1` at selection.

mod active;
mod elimination;
mod index;
mod sparse;
mod thompson;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dominance::DominanceOrder;
use crate::model::{Arm, History};
use crate::scalar::Real;

pub use active::{
    active_set_first_order, active_set_group_sparse, active_set_minmax, active_set_strong,
    first_order_statistic, potential_weights, ActiveSet, SortedEstimate,
};
pub use elimination::{CategoryEliminator, EliminationEvent, EliminationTest, TestedCategory};
pub use index::{ucb_select, ucb_select_in, uct_select, Ucb, UcbIndex, Uct};
pub use sparse::SparseCatSe;
pub use thompson::{murphy_hypothesis, murphy_sample, ts_select, Murphy, Posterior, MURPHY_MAX_PROPOSALS};

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("policy `{0}` requires a dominance order")]
    MissingOrder(PolicyKind),
    #[error("policy `{0}` does not take a dominance order")]
    UnexpectedOrder(PolicyKind),
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("unknown delta schedule `{0}`")]
    UnknownSchedule(String),
    #[error("fixed delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("arm ({category}, {arm}) is active; potential weights are undefined")]
    ActiveArm { category: usize, arm: usize },
    #[error("potential sampling only applies to group-sparse CatSE")]
    PotentialSamplingUnsupported,
}

/// Which algorithm a [`PolicyConfig`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Ucb,
    Ts,
    Uct,
    CatSe,
    MinMaxUcb,
    Murphy,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Ucb,
        PolicyKind::Ts,
        PolicyKind::Uct,
        PolicyKind::CatSe,
        PolicyKind::MinMaxUcb,
        PolicyKind::Murphy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Ucb => "ucb",
            PolicyKind::Ts => "ts",
            PolicyKind::Uct => "uct",
            PolicyKind::CatSe => "catse",
            PolicyKind::MinMaxUcb => "minmax",
            PolicyKind::Murphy => "murphy",
        }
    }

    pub fn needs_order(self) -> bool {
        matches!(self, PolicyKind::CatSe | PolicyKind::Murphy)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ucb" => Ok(PolicyKind::Ucb),
            "ts" | "thompson" => Ok(PolicyKind::Ts),
            "uct" => Ok(PolicyKind::Uct),
            "catse" => Ok(PolicyKind::CatSe),
            "minmax" | "minmaxucb" => Ok(PolicyKind::MinMaxUcb),
            "murphy" => Ok(PolicyKind::Murphy),
            _ => Err(PolicyError::UnknownPolicy(s.to_string())),
        }
    }
}

/// Confidence level as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeltaSchedule {
    Fixed(f64),
    /// `1 / t`
    OneOverT,
    /// `1 / (M t)`
    OneOverMT,
    /// `1 / (2 M K T^2)` with `T` the horizon.
    OneOverMKTsq,
}

impl DeltaSchedule {
    /// Delta at 1-indexed time `t`, capped at 1/2 so radii stay positive.
    pub fn delta<T: Real>(self, t: usize, m: usize, k: usize, horizon: usize) -> T {
        let t = t.max(1) as f64;
        let d = match self {
            DeltaSchedule::Fixed(d) => d,
            DeltaSchedule::OneOverT => 1.0 / t,
            DeltaSchedule::OneOverMT => 1.0 / (m as f64 * t),
            DeltaSchedule::OneOverMKTsq => {
                let h = horizon.max(1) as f64;
                1.0 / (2.0 * (m * k) as f64 * h * h)
            }
        };
        T::lit(d.min(0.5))
    }
}

impl fmt::Display for DeltaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaSchedule::Fixed(d) => write!(f, "{d}"),
            DeltaSchedule::OneOverT => f.write_str("1/t"),
            DeltaSchedule::OneOverMT => f.write_str("1/mt"),
            DeltaSchedule::OneOverMKTsq => f.write_str("1/2mkt2"),
        }
    }
}

impl FromStr for DeltaSchedule {
    type Err = PolicyError;

    /// Accepts `1/t`, `1/mt`, `1/2mkt2` (case-insensitive) or a number in (0, 1).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(' ', "").as_str() {
            "1/t" | "t" => Ok(DeltaSchedule::OneOverT),
            "1/mt" | "mt" => Ok(DeltaSchedule::OneOverMT),
            "1/2mkt2" | "1/2mkt^2" | "mkt2" => Ok(DeltaSchedule::OneOverMKTsq),
            other => {
                let d: f64 = other.parse().map_err(|_| PolicyError::UnknownSchedule(s.to_string()))?;
                if d > 0.0 && d < 1.0 {
                    Ok(DeltaSchedule::Fixed(d))
                } else {
                    Err(PolicyError::InvalidDelta(d))
                }
            }
        }
    }
}

/// Everything needed to build one policy instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub order: Option<DominanceOrder>,
    /// `None` picks the per-algorithm default (see [`PolicyConfig::schedule`]).
    pub delta_schedule: Option<DeltaSchedule>,
    pub use_potential_sampling: bool,
    pub ucb_index: UcbIndex,
    pub rng_seed: u64,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            order: None,
            delta_schedule: None,
            use_potential_sampling: false,
            ucb_index: UcbIndex::Hoeffding,
            rng_seed: 0,
        }
    }

    pub fn with_order(mut self, order: DominanceOrder) -> Self {
        self.order = Some(order);
        self
    }

    pub fn with_schedule(mut self, schedule: DeltaSchedule) -> Self {
        self.delta_schedule = Some(schedule);
        self
    }

    pub fn with_potential_sampling(mut self, on: bool) -> Self {
        self.use_potential_sampling = on;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_ucb_index(mut self, index: UcbIndex) -> Self {
        self.ucb_index = index;
        self
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        match (self.kind.needs_order(), self.order) {
            (true, None) => return Err(PolicyError::MissingOrder(self.kind)),
            (false, Some(_)) => return Err(PolicyError::UnexpectedOrder(self.kind)),
            _ => {}
        }
        if self.use_potential_sampling
            && !(self.kind == PolicyKind::CatSe && self.order == Some(DominanceOrder::GroupSparse))
        {
            return Err(PolicyError::PotentialSamplingUnsupported);
        }
        if let Some(DeltaSchedule::Fixed(d)) = self.delta_schedule {
            if !(d > 0.0 && d < 1.0) {
                return Err(PolicyError::InvalidDelta(d));
            }
        }
        Ok(())
    }

    /// Effective schedule: `1/t` for UCB and group-sparse CatSE, `1/(Mt)` for
    /// the elimination algorithms, unless overridden.
    pub fn schedule(&self) -> DeltaSchedule {
        self.delta_schedule.unwrap_or(match (self.kind, self.order) {
            (PolicyKind::CatSe, Some(DominanceOrder::Strong | DominanceOrder::FirstOrder)) => {
                DeltaSchedule::OneOverMT
            }
            (PolicyKind::MinMaxUcb, _) => DeltaSchedule::OneOverMT,
            _ => DeltaSchedule::OneOverT,
        })
    }

    /// Short name, e.g. `catse`, `catse+ps`.
    pub fn label(&self) -> String {
        if self.use_potential_sampling {
            format!("{}+ps", self.kind)
        } else {
            self.kind.to_string()
        }
    }
}

/// Run-time counters a policy exposes for auditing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub eliminations: Vec<EliminationEvent>,
    /// Times (1-indexed) at which the active set was empty.
    pub empty_active_times: Vec<usize>,
    pub murphy_steps: usize,
    pub murphy_proposals: u64,
    pub murphy_first_draw_accepts: usize,
    pub murphy_fallbacks: usize,
}

pub trait Policy<T: Real>: Send {
    fn name(&self) -> String;

    /// Arm to pull at time `history.t() + 1`.
    fn select(&mut self, history: &History<T>) -> Arm;

    /// Called after `history` has recorded `reward` for `arm`.
    fn observe(&mut self, _arm: Arm, _reward: T, _history: &History<T>) {}

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics::default()
    }
}

/// Builds a policy for an `m x k` instance run to `horizon`.
pub fn build_policy<T: Real>(
    config: &PolicyConfig,
    m: usize,
    k: usize,
    horizon: usize,
) -> Result<Box<dyn Policy<T>>, PolicyError> {
    config.validate()?;
    let schedule = config.schedule();
    Ok(match config.kind {
        PolicyKind::Ucb => Box::new(Ucb::new(schedule, config.ucb_index, m, k, horizon)),
        PolicyKind::Ts => Box::new(Murphy::thompson(config.rng_seed)),
        PolicyKind::Uct => Box::new(Uct::new()),
        PolicyKind::Murphy => Box::new(Murphy::new(config.order, config.rng_seed)),
        PolicyKind::CatSe => match config.order.expect("validated") {
            DominanceOrder::GroupSparse => Box::new(SparseCatSe::new(
                schedule,
                config.use_potential_sampling,
                m,
                k,
                horizon,
                config.rng_seed,
            )),
            order @ (DominanceOrder::Strong | DominanceOrder::FirstOrder) => {
                let test = if order == DominanceOrder::Strong {
                    EliminationTest::Strong
                } else {
                    EliminationTest::FirstOrder
                };
                Box::new(CategoryEliminator::new(test, schedule, m, k, horizon))
            }
        },
        PolicyKind::MinMaxUcb => {
            Box::new(CategoryEliminator::new(EliminationTest::MinMax, schedule, m, k, horizon))
        }
    })
}
