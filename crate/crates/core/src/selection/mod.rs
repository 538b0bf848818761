//! Per-class selection strategies and the `distill` driver.

mod baseline;
mod geometry;
mod greedy;
mod kmeans_mmd;
mod tacdt;

pub use baseline::{select_knapsack, select_random, select_top_score};
pub use greedy::{greedy_objective_search, select_greedy_objective, GreedyOutcome};
pub use kmeans_mmd::{kmeans_mmd_search, select_kmeans_mmd, KMeansMmdOutcome};
pub use tacdt::{build_class_tree, select_tacdt};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::objectives::{combined_objective, ObjectiveWeights};
use crate::rng::derive_stream;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    TopScore,
    Knapsack,
    Tacdt,
    GreedyObjective,
    KmeansMmd,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Random,
        Method::TopScore,
        Method::Knapsack,
        Method::Tacdt,
        Method::GreedyObjective,
        Method::KmeansMmd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::TopScore => "top_score",
            Method::Knapsack => "knapsack",
            Method::Tacdt => "tacdt",
            Method::GreedyObjective => "greedy_objective",
            Method::KmeansMmd => "kmeans_mmd",
        }
    }

    pub fn needs_scores(self) -> bool {
        matches!(self, Method::TopScore | Method::Knapsack)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::config(format!(
                    "unknown method {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Selection method and hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub method: Method,
    pub vpc: usize,
    pub weights: ObjectiveWeights,
    pub pca_dims: usize,
    pub birch_threshold_scale: f64,
    pub birch_branching: usize,
    pub master_seed: u64,
    pub local_search_max_sweeps: usize,
}

impl SelectionConfig {
    /// Config with every hyperparameter at its default; the objective
    /// weights follow the per-budget schedule of [`ObjectiveWeights::default_for_vpc`].
    pub fn new(method: Method, vpc: usize, master_seed: u64) -> Self {
        Self {
            method,
            vpc,
            weights: ObjectiveWeights::default_for_vpc(vpc),
            pca_dims: 32,
            birch_threshold_scale: 0.5,
            birch_branching: 50,
            master_seed,
            local_search_max_sweeps: 20,
        }
    }

    pub fn effective_weights(&self) -> ObjectiveWeights {
        self.weights.effective(self.vpc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vpc < 1 {
            return Err(Error::config("vpc must be >= 1"));
        }
        if self.pca_dims < 1 {
            return Err(Error::config("pca_dims must be >= 1"));
        }
        if self.birch_threshold_scale <= 0.0 || !self.birch_threshold_scale.is_finite() {
            return Err(Error::config(format!(
                "birch_threshold_scale must be positive, got {}",
                self.birch_threshold_scale
            )));
        }
        if self.birch_branching < 2 {
            return Err(Error::config("birch_branching must be >= 2"));
        }
        self.weights.validate()?;
        if self.method == Method::GreedyObjective {
            self.effective_weights().validate_for_optimization()?;
        }
        Ok(())
    }
}

/// Finite, non-negative per-item scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some((i, s)) = scores
            .iter()
            .enumerate()
            .find(|(_, s)| !s.is_finite() || **s < 0.0)
        {
            return Err(Error::domain(format!(
                "score {s} of item {i} is not finite and non-negative"
            )));
        }
        Ok(Self(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-class outcome of [`distill`]. Indices are global item indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub per_class: BTreeMap<u32, Vec<usize>>,
    /// Combined objective of the final selection under the effective
    /// weights; `None` for empty classes or when a selected vector has zero
    /// norm and the diversity term is undefined.
    pub per_class_objective: BTreeMap<u32, Option<f64>>,
    pub wall_time: BTreeMap<u32, Duration>,
}

impl SelectionResult {
    pub fn total_selected(&self) -> usize {
        self.per_class.values().map(Vec::len).sum()
    }

    /// All selected global indices, class by class.
    pub fn all_indices(&self) -> Vec<usize> {
        self.per_class.values().flatten().copied().collect()
    }
}

/// Runs the configured method on every class of `dataset`.
///
/// Class `c` draws from `derive_stream(master_seed, c)`, so the result does
/// not depend on how classes are scheduled across threads.
pub fn distill<T: Scalar>(
    dataset: &EmbeddingSet<T>,
    cfg: &SelectionConfig,
    scores: Option<&ScoreVector>,
) -> Result<SelectionResult> {
    cfg.validate()?;
    if cfg.method.needs_scores() {
        let scores = scores.ok_or_else(|| {
            Error::config(format!("method {} requires per-item scores", cfg.method))
        })?;
        if scores.len() != dataset.len() {
            return Err(Error::config(format!(
                "{} scores for {} items",
                scores.len(),
                dataset.len()
            )));
        }
    }
    let classes = dataset.class_indices();
    let outcomes: Vec<(Vec<usize>, Option<f64>, Duration)> = classes
        .par_iter()
        .enumerate()
        .map(|(c, idx)| {
            let start = Instant::now();
            let (sel, obj) = select_class(dataset, idx, c as u64, cfg, scores)?;
            Ok((sel, obj, start.elapsed()))
        })
        .collect::<Result<_>>()?;

    let mut result = SelectionResult {
        per_class: BTreeMap::new(),
        per_class_objective: BTreeMap::new(),
        wall_time: BTreeMap::new(),
    };
    for (c, (sel, obj, t)) in outcomes.into_iter().enumerate() {
        let c = c as u32;
        result.per_class.insert(c, sel);
        result.per_class_objective.insert(c, obj);
        result.wall_time.insert(c, t);
    }
    Ok(result)
}

fn select_class<T: Scalar>(
    dataset: &EmbeddingSet<T>,
    idx: &[usize],
    class: u64,
    cfg: &SelectionConfig,
    scores: Option<&ScoreVector>,
) -> Result<(Vec<usize>, Option<f64>)> {
    if idx.is_empty() {
        return Ok((Vec::new(), None));
    }
    let vectors: Vec<&Vector<T>> = idx.iter().map(|&i| &dataset.vectors()[i]).collect();
    let class_scores = || -> Vec<f64> {
        let s = scores.expect("checked by distill").as_slice();
        idx.iter().map(|&i| s[i]).collect()
    };
    let mut rng = derive_stream(cfg.master_seed, class);
    let weights = cfg.effective_weights();
    let local = match cfg.method {
        Method::Random => select_random(idx.len(), cfg.vpc, &mut rng),
        Method::TopScore => select_top_score(&class_scores(), cfg.vpc),
        Method::Knapsack => {
            // Unit costs with capacity vpc: the score-maximising vpc-subset.
            let costs = vec![1; idx.len()];
            select_knapsack(&class_scores(), &costs, cfg.vpc as u64)?
        }
        Method::Tacdt => select_tacdt(&vectors, cfg.vpc, cfg, &mut rng)?,
        Method::GreedyObjective => select_greedy_objective(&vectors, cfg.vpc, &weights, cfg)?,
        Method::KmeansMmd => select_kmeans_mmd(&vectors, cfg.vpc, cfg, &mut rng)?,
    };
    let objective = combined_objective(&vectors, &local, &weights)
        .ok()
        .map(|v| v.as_f64());
    Ok((local.into_iter().map(|i| idx[i]).collect(), objective))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn config_defaults_follow_schedule() {
        let c = SelectionConfig::new(Method::Tacdt, 1, 0);
        assert_eq!((c.weights.lambda_r, c.weights.lambda_d), (0.1, 0.0));
        for vpc in [5, 10] {
            let c = SelectionConfig::new(Method::Tacdt, vpc, 0);
            assert_eq!((c.weights.lambda_r, c.weights.lambda_d), (1.0, 0.1));
        }
        assert_eq!(c.pca_dims, 32);
        assert_eq!(c.birch_threshold_scale, 0.5);
        assert_eq!(c.birch_branching, 50);
        assert_eq!(c.local_search_max_sweeps, 20);
    }

    #[test]
    fn vpc_one_forces_zero_diversity_weight() {
        let mut c = SelectionConfig::new(Method::GreedyObjective, 1, 0);
        c.weights = ObjectiveWeights::new(0.7, 0.3).unwrap();
        assert_eq!(c.effective_weights().lambda_d, 0.0);
        c.weights = ObjectiveWeights::new(0.7, 0.0).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn score_vector_validation() {
        assert!(ScoreVector::new(vec![0.0, 1.0]).is_ok());
        assert!(ScoreVector::new(vec![-0.5]).is_err());
        assert!(ScoreVector::new(vec![f64::NAN]).is_err());
    }
}
