//! Category elimination shared by CatSE (strong, first-order) and MinMaxUCB.
//!
//! Each iteration recomputes the active set over all categories from the
//! current counts and confidence level, then:
//! - none active: sweeps every arm once;
//! - one active: takes a single UCB step inside it;
//! - several active: sweeps every arm of the active categories once.
//!
//! A sweep is one arm per time step, category-major; the runner's initial
//! pull of each arm is the first sweep. Nothing is eliminated for good: a
//! category that stops being pulled re-enters when its radius outgrows the
//! evidence against it.

use std::collections::VecDeque;

use super::active::{screen, Test};
use super::{ucb_select_in, DeltaSchedule, Diagnostics, Policy};
use crate::confidence::hoeffding_radius;
use crate::model::{Arm, History, MeanMatrix};
use crate::scalar::{norm2, sorted_desc, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationTest {
    /// Optimised simplex bounds with `beta`.
    Strong,
    /// Sorted-mean ratio test with `gamma`.
    FirstOrder,
    /// Best-arm lower bound vs worst-arm upper bound with Hoeffding radii.
    MinMax,
}

impl EliminationTest {
    fn inner(self) -> Test {
        match self {
            EliminationTest::Strong => Test::Strong,
            EliminationTest::FirstOrder => Test::FirstOrder,
            EliminationTest::MinMax => Test::MinMax,
        }
    }
}

/// Snapshot of one category at an elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct TestedCategory {
    pub category: usize,
    pub means: Vec<f64>,
    pub counts: Vec<usize>,
    pub radius: f64,
}

/// One elimination decision, with what the test saw.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationEvent {
    /// 1-indexed time of the decision.
    pub t: usize,
    pub test: EliminationTest,
    /// Smallest arm count of the eliminated category, i.e. the sweeps it got.
    pub round: usize,
    pub delta: f64,
    pub eliminated: TestedCategory,
    pub eliminator: TestedCategory,
}

impl EliminationEvent {
    /// Whether the confidence inequalities behind the test held for both
    /// categories, given the true (sorted) means.
    pub fn clean_event_holds(&self, truth: &MeanMatrix<f64>) -> bool {
        [&self.eliminated, &self.eliminator].iter().all(|c| {
            let mu = truth.row(c.category);
            match self.test {
                EliminationTest::Strong => {
                    let d: Vec<f64> = c.means.iter().zip(mu).map(|(a, b)| a - b).collect();
                    norm2(&d) <= c.radius
                }
                EliminationTest::FirstOrder => {
                    let s = sorted_desc(&c.means);
                    let d: Vec<f64> = s.iter().zip(sorted_desc(mu).iter()).map(|(a, b)| a - b).collect();
                    norm2(&d) <= c.radius
                }
                EliminationTest::MinMax => c.means.iter().zip(mu).zip(&c.counts).all(|((a, b), &n)| {
                    hoeffding_radius(n, self.delta).is_ok_and(|r| (a - b).abs() <= r.value())
                }),
            }
        })
    }
}

impl TestedCategory {
    pub(crate) fn snapshot<T: Real>(history: &History<T>, category: usize, radius: T) -> Self {
        Self {
            category,
            means: history.category_means(category).iter().map(|x| x.as_f64()).collect(),
            counts: (0..history.k()).map(|a| history.count(category, a)).collect(),
            radius: radius.as_f64(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CategoryEliminator {
    test: EliminationTest,
    schedule: DeltaSchedule,
    m: usize,
    k: usize,
    horizon: usize,
    /// Last non-empty active set; drops from it are logged as eliminations.
    previous: Vec<usize>,
    queue: VecDeque<Arm>,
    exploit: Option<usize>,
    rounds: usize,
    diag: Diagnostics,
}

impl CategoryEliminator {
    pub fn new(test: EliminationTest, schedule: DeltaSchedule, m: usize, k: usize, horizon: usize) -> Self {
        Self {
            test,
            schedule,
            m,
            k,
            horizon,
            previous: (0..m).collect(),
            queue: VecDeque::new(),
            exploit: None,
            rounds: 1,
            diag: Diagnostics::default(),
        }
    }

    /// Last non-empty active set.
    pub fn active(&self) -> &[usize] {
        &self.previous
    }

    /// The category of the last UCB step, if the last iteration was one.
    pub fn exploited(&self) -> Option<usize> {
        self.exploit
    }

    /// Round-robin sweeps so far, counting the initial pulls.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn recompute<T: Real>(&mut self, history: &History<T>, t: usize, delta: T) {
        let all: Vec<usize> = (0..self.m).collect();
        let s = screen(history, &all, delta, self.test.inner());
        let active = s.active.as_slice().to_vec();
        self.exploit = None;
        if !active.is_empty() {
            for &(gone, by) in &s.eliminated {
                if self.previous.contains(&gone) {
                    self.diag.eliminations.push(EliminationEvent {
                        t,
                        test: self.test,
                        round: history.min_count(gone),
                        delta: delta.as_f64(),
                        eliminated: TestedCategory::snapshot(history, gone, s.radius[gone]),
                        eliminator: TestedCategory::snapshot(history, by, s.radius[by]),
                    });
                }
            }
            self.previous = active.clone();
        }
        match active.len() {
            1 => self.exploit = Some(active[0]),
            n => {
                if n == 0 {
                    self.diag.empty_active_times.push(t);
                }
                let sweep: &[usize] = if n == 0 { &all } else { &active };
                for &c in sweep {
                    self.queue.extend((0..self.k).map(|a| Arm::new(c, a)));
                }
                self.rounds += 1;
            }
        }
    }
}

impl<T: Real> Policy<T> for CategoryEliminator {
    fn name(&self) -> String {
        match self.test {
            EliminationTest::MinMax => "minmax",
            _ => "catse",
        }
        .into()
    }

    fn select(&mut self, history: &History<T>) -> Arm {
        let t = history.t() + 1;
        let delta: T = self.schedule.delta(t, self.m, self.k, self.horizon);
        if self.queue.is_empty() {
            self.recompute(history, t, delta);
        }
        if let Some(c) = self.exploit {
            return ucb_select_in(history, c, delta);
        }
        self.queue.pop_front().expect("non-empty sweep")
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diag.clone()
    }
}
