//! Built-in benchmark instances.

use crate::dominance::{find_dominating_category, DominanceOrder};
use crate::model::MeanMatrix;

use super::HarnessError;

/// A named instance together with the order its structure is meant to exhibit.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub means: Vec<Vec<f64>>,
    pub order: DominanceOrder,
    /// Index of the category expected to dominate all others.
    pub dominating: usize,
}

impl Scenario {
    /// Builds the mean matrix and confirms the registered dominating category.
    pub fn verify(&self) -> Result<MeanMatrix<f64>, HarnessError> {
        let means = MeanMatrix::from_f64_rows(&self.means)?;
        if find_dominating_category(&means, self.order) != Some(self.dominating) {
            return Err(HarnessError::CorruptScenario(self.name.to_string()));
        }
        Ok(means)
    }
}

fn repeat_rows(first: Vec<f64>, rest: Vec<f64>, copies: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![first];
    rows.extend(std::iter::repeat_n(rest, copies));
    rows
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut fosd_best = vec![5.0];
    fosd_best.extend([4.0; 5]);
    fosd_best.extend([3.0; 3]);
    fosd_best.push(2.0);
    let mut fosd_other = vec![4.5];
    fosd_other.extend([3.0; 8]);
    fosd_other.push(0.0);

    vec![
        Scenario {
            name: "sparse-2x2",
            means: vec![vec![0.5, 0.0], vec![0.0, 0.0]],
            order: DominanceOrder::GroupSparse,
            dominating: 0,
        },
        Scenario {
            name: "strong-2x2",
            means: vec![vec![2.0, 1.0], vec![1.0, 0.0]],
            order: DominanceOrder::Strong,
            dominating: 0,
        },
        Scenario {
            name: "fosd-2x2",
            means: vec![vec![5.0, 4.0], vec![4.5, 0.0]],
            order: DominanceOrder::FirstOrder,
            dominating: 0,
        },
        Scenario {
            name: "sparse-strong-5x5",
            means: repeat_rows(vec![1.0, 0.5, 0.5, 0.5, 0.0], vec![0.0, -0.5, -0.5, -0.5, -1.0], 4),
            order: DominanceOrder::GroupSparse,
            dominating: 0,
        },
        Scenario {
            name: "fosd-5x10",
            means: repeat_rows(fosd_best, fosd_other, 4),
            order: DominanceOrder::FirstOrder,
            dominating: 0,
        },
        Scenario {
            name: "fosd-5x5-appendix",
            means: repeat_rows(vec![5.0, 4.0, 4.0, 4.0, 4.0], vec![4.5, 3.0, 3.0, 3.0, 0.0], 4),
            order: DominanceOrder::FirstOrder,
            dominating: 0,
        },
    ]
}

pub fn scenario(name: &str) -> Result<Scenario, HarnessError> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| HarnessError::UnknownScenario(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::dominates;

    #[test]
    fn all_scenarios_verify() {
        for s in builtin_scenarios() {
            s.verify().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        }
    }

    #[test]
    fn scenario_contents() {
        assert_eq!(scenario("sparse-strong-5x5").unwrap().means[0], vec![1.0, 0.5, 0.5, 0.5, 0.0]);
        assert_eq!(scenario("fosd-5x10").unwrap().means[1], vec![4.5, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 0.0]);
        assert_eq!(scenario("fosd-5x10").unwrap().means[0], vec![5.0, 4.0, 4.0, 4.0, 4.0, 4.0, 3.0, 3.0, 3.0, 2.0]);
        assert_eq!(scenario("fosd-2x2").unwrap().means, vec![vec![5.0, 4.0], vec![4.5, 0.0]]);
        assert!(scenario("nope").is_err());
    }

    #[test]
    fn sparse_strong_scenario_is_also_strong() {
        let s = scenario("sparse-strong-5x5").unwrap();
        assert!(s.means[1..].iter().all(|r| dominates(DominanceOrder::Strong, &s.means[0], r)));
    }

    #[test]
    fn corrupt_scenario_is_rejected() {
        let mut s = scenario("strong-2x2").unwrap();
        s.means[1][0] = 3.0;
        assert!(matches!(s.verify(), Err(HarnessError::CorruptScenario(_))));
    }
}
