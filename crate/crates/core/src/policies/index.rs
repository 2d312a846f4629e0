//! Index baselines: UCB over all arms and a two-level UCT.

use serde::{Deserialize, Serialize};

use super::{DeltaSchedule, Policy};
use crate::model::{Arm, History};
use crate::scalar::Real;

/// Exploration bonus used by [`Ucb`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UcbIndex {
    /// `sqrt(2 log(1/delta) / N)` with the policy's delta schedule.
    #[default]
    Hoeffding,
    /// `2 sqrt(log t / N)`.
    SparseLogT,
}

/// Argmax of `mean + bonus(N)` over `arms`, first index on ties. An unpulled
/// arm wins outright.
pub(crate) fn best_index<T: Real>(
    history: &History<T>,
    arms: impl IntoIterator<Item = Arm>,
    bonus: impl Fn(usize) -> T,
) -> Arm {
    let mut best: Option<(Arm, T)> = None;
    for arm in arms {
        let n = history.count(arm.category, arm.arm);
        if n == 0 {
            return arm;
        }
        let value = history.mean_or_zero(arm.category, arm.arm) + bonus(n);
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((arm, value));
        }
    }
    best.expect("at least one arm").0
}

fn hoeffding_bonus<T: Real>(delta: T) -> impl Fn(usize) -> T {
    let lead = T::lit(2.0) * (-delta.ln());
    move |n| (lead / T::from_count(n)).sqrt()
}

/// UCB over all `M K` arms with radius `sqrt(2 log(1/delta) / N)`.
pub fn ucb_select<T: Real>(history: &History<T>, delta: T) -> Arm {
    best_index(history, history.arms(), hoeffding_bonus(delta))
}

/// UCB restricted to one category.
pub fn ucb_select_in<T: Real>(history: &History<T>, category: usize, delta: T) -> Arm {
    best_index(history, (0..history.k()).map(|a| Arm::new(category, a)), hoeffding_bonus(delta))
}

#[derive(Debug, Clone)]
pub struct Ucb {
    schedule: DeltaSchedule,
    index: UcbIndex,
    m: usize,
    k: usize,
    horizon: usize,
}

impl Ucb {
    pub fn new(schedule: DeltaSchedule, index: UcbIndex, m: usize, k: usize, horizon: usize) -> Self {
        Self { schedule, index, m, k, horizon }
    }
}

impl<T: Real> Policy<T> for Ucb {
    fn name(&self) -> String {
        "ucb".into()
    }

    fn select(&mut self, history: &History<T>) -> Arm {
        let t = history.t() + 1;
        match self.index {
            UcbIndex::Hoeffding => {
                ucb_select(history, self.schedule.delta(t, self.m, self.k, self.horizon))
            }
            UcbIndex::SparseLogT => {
                let log_t = T::from_count(t).ln();
                best_index(history, history.arms(), |n| {
                    T::lit(2.0) * (log_t / T::from_count(n)).sqrt()
                })
            }
        }
    }
}

/// Two-level UCT: pick a category by UCB on its pooled reward average with
/// bonus `sqrt(2 log t / N^m)`, then an arm inside it by UCB1 with
/// `sqrt(2 log N^m / N_k^m)`.
pub fn uct_select<T: Real>(history: &History<T>) -> Arm {
    let t = history.t().max(1);
    let log_t = T::from_count(t).ln();
    let mut best: Option<(usize, T)> = None;
    for c in 0..history.m() {
        let n = history.category_count(c);
        if n == 0 {
            best = Some((c, T::infinity()));
            break;
        }
        let nf = T::from_count(n);
        let value = history.category_sum(c) / nf + (T::lit(2.0) * log_t / nf).sqrt();
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((c, value));
        }
    }
    let category = best.expect("at least one category").0;
    let log_n = T::from_count(history.category_count(category).max(1)).ln();
    best_index(history, (0..history.k()).map(|a| Arm::new(category, a)), |n| {
        (T::lit(2.0) * log_n / T::from_count(n)).sqrt()
    })
}

#[derive(Debug, Clone, Default)]
pub struct Uct;

impl Uct {
    pub fn new() -> Self {
        Self
    }
}

impl<T: Real> Policy<T> for Uct {
    fn name(&self) -> String {
        "uct".into()
    }

    fn select(&mut self, history: &History<T>) -> Arm {
        uct_select(history)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ucb_dominant_index() {
        let h = History::from_counts_and_means(&[vec![50, 50]], &[vec![1.0, 0.0]]);
        assert_eq!(ucb_select(&h, 0.1), Arm::new(0, 0));
    }

    #[test]
    fn ucb_prefers_wide_radius() {
        let h = History::from_counts_and_means(&[vec![100, 1]], &[vec![0.0, 0.0]]);
        assert_eq!(ucb_select(&h, 0.1), Arm::new(0, 1));
    }

    #[test]
    fn ucb_ties_go_to_lowest_index() {
        let h = History::from_counts_and_means(&[vec![3, 3], vec![3, 3]], &[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(ucb_select(&h, 0.1), Arm::new(0, 0));
        assert_eq!(ucb_select_in(&h, 1, 0.1), Arm::new(1, 0));
    }

    #[test]
    fn ucb_unpulled_arm_first() {
        let h = History::from_counts_and_means(&[vec![3, 0]], &[vec![5.0, 0.0]]);
        assert_eq!(ucb_select(&h, 0.1), Arm::new(0, 1));
    }

    #[test]
    fn uct_category_example() {
        // Pooled means 1.0 over 10 pulls vs 0.0 over 1000 pulls, t near 1e3.
        let h = History::from_counts_and_means(&[vec![5, 5], vec![500, 500]], &[vec![1.0, 1.0], vec![0.0, 0.0]]);
        let log_t = (1010f64).ln();
        let first = 1.0 + (2.0 * log_t / 10.0).sqrt();
        let second = 0.0 + (2.0 * log_t / 1000.0).sqrt();
        assert!(first > second);
        assert_eq!(uct_select(&h).category, 0);
    }

    #[test]
    fn uct_single_category_is_ucb1() {
        let h = History::from_counts_and_means(&[vec![40, 3, 10]], &[vec![0.5, 0.1, 0.4]]);
        let log_n = 53f64.ln();
        let idx: Vec<f64> = [(0.5, 40.0), (0.1, 3.0), (0.4, 10.0)]
            .iter()
            .map(|&(m, n): &(f64, f64)| m + (2.0 * log_n / n).sqrt())
            .collect();
        let expect = crate::scalar::argmax_first(&idx);
        assert_eq!(uct_select(&h), Arm::new(0, expect));
        assert_eq!(uct_select(&h), uct_select(&h));
    }

    #[test]
    fn sparse_log_t_variant() {
        let h = History::from_counts_and_means(&[vec![100, 1]], &[vec![0.3, 0.0]]);
        let mut p = Ucb::new(DeltaSchedule::OneOverT, UcbIndex::SparseLogT, 1, 2, 1000);
        assert_eq!(Policy::<f64>::select(&mut p, &h), Arm::new(0, 1));
    }
}
