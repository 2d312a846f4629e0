//! CatSE for group-sparse dominance.
//!
//! The active set is recomputed at every step from the per-arm thresholds.
//! With no active category the policy explores all arms, either in a global
//! round-robin or by potential sampling; with one it runs UCB inside it; with
//! several it round-robins over their arms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::active::RoundRobin;
use super::{active_set_group_sparse, potential_weights, ucb_select_in, DeltaSchedule, Diagnostics, Policy};
use crate::model::{Arm, History};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct SparseCatSe {
    schedule: DeltaSchedule,
    potential_sampling: bool,
    m: usize,
    k: usize,
    horizon: usize,
    cursor: RoundRobin,
    rng: ChaCha8Rng,
    diag: Diagnostics,
}

impl SparseCatSe {
    pub fn new(
        schedule: DeltaSchedule,
        potential_sampling: bool,
        m: usize,
        k: usize,
        horizon: usize,
        seed: u64,
    ) -> Self {
        Self {
            schedule,
            potential_sampling,
            m,
            k,
            horizon,
            cursor: RoundRobin::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            diag: Diagnostics::default(),
        }
    }

    fn sample_potential<T: Real>(&mut self, history: &History<T>) -> Option<Arm> {
        let w = potential_weights(history).ok()?;
        let u = T::open01(&mut self.rng);
        let mut acc = T::zero();
        for (i, &p) in w.iter().enumerate() {
            acc = acc + p;
            if u < acc {
                return Some(Arm::new(i / self.k, i % self.k));
            }
        }
        Some(Arm::new(self.m - 1, self.k - 1))
    }
}

impl<T: Real> Policy<T> for SparseCatSe {
    fn name(&self) -> String {
        if self.potential_sampling { "catse+ps" } else { "catse" }.into()
    }

    fn select(&mut self, history: &History<T>) -> Arm {
        let t = history.t() + 1;
        if let Some(arm) = history.arms().find(|a| history.count(a.category, a.arm) == 0) {
            return arm;
        }
        let active = active_set_group_sparse(history);
        match active.len() {
            0 => {
                self.diag.empty_active_times.push(t);
                if self.potential_sampling {
                    if let Some(arm) = self.sample_potential(history) {
                        return arm;
                    }
                }
                self.cursor.next(self.m, self.k, |_| true)
            }
            1 => {
                let delta: T = self.schedule.delta(t, self.m, self.k, self.horizon);
                ucb_select_in(history, active.as_slice()[0], delta)
            }
            _ => self.cursor.next(self.m, self.k, |c| active.contains(c)),
        }
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diag.clone()
    }
}
