use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::{fit_centroids, predict_labels, predict_scores};
use super::metrics::{accuracy, macro_auc_ovr, macro_f1};
use crate::dataset::EmbeddingSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::{distill, ScoreVector, SelectionConfig};

pub const DEFAULT_RUNS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    pub macro_f1: f64,
    pub macro_auc: f64,
}

/// Mean and sample standard deviation (divisor `R - 1`, zero when `R = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub metrics: Metrics,
    pub auc_skipped: Vec<u32>,
    pub selection: BTreeMap<u32, Vec<usize>>,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub config: SelectionConfig,
    pub runs: Vec<RunRecord>,
    pub acc: MeanStd,
    pub macro_f1: MeanStd,
    pub macro_auc: MeanStd,
    /// Reference row: the classifier fitted on the entire pool.
    pub full_real: Metrics,
}

/// Fits the classifier on `train` and scores it on `test`.
pub fn evaluate_fit<T: Scalar>(
    train: &EmbeddingSet<T>,
    test: &EmbeddingSet<T>,
) -> Result<(Metrics, Vec<u32>)> {
    let model = fit_centroids(train)?;
    let scores = predict_scores(&model, test.vectors())?;
    let pred = predict_labels(&scores);
    let auc = macro_auc_ovr(&scores, test.labels())?;
    Ok((
        Metrics {
            acc: accuracy(&pred, test.labels())?,
            macro_f1: macro_f1(&pred, test.labels(), test.num_classes())?,
            macro_auc: auc.macro_auc,
        },
        auc.skipped,
    ))
}

/// Repeats selection and evaluation `runs` times, run `r` using master seed
/// `cfg.master_seed + r`. Selection only ever sees `pool`.
pub fn run_experiment<T: Scalar>(
    pool: &EmbeddingSet<T>,
    test: &EmbeddingSet<T>,
    cfg: &SelectionConfig,
    runs: usize,
    scores: Option<&ScoreVector>,
) -> Result<EvalReport> {
    if runs < 1 {
        return Err(Error::config("runs must be >= 1"));
    }
    if pool.num_classes() != test.num_classes() {
        return Err(Error::config(format!(
            "pool has {} classes but test has {}",
            pool.num_classes(),
            test.num_classes()
        )));
    }
    if !pool.is_empty() && !test.is_empty() && pool.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            left: pool.dim(),
            right: test.dim(),
        });
    }
    if test.is_empty() {
        return Err(Error::Eval("empty test set".into()));
    }
    cfg.validate()?;

    let records: Vec<RunRecord> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut run_cfg = cfg.clone();
            run_cfg.master_seed = cfg.master_seed.wrapping_add(run as u64);
            let sel = distill(pool, &run_cfg, scores)?;
            let train = pool.subset(&sel.all_indices());
            let (metrics, auc_skipped) = evaluate_fit(&train, test)?;
            Ok(RunRecord {
                run,
                seed: run_cfg.master_seed,
                metrics,
                auc_skipped,
                wall_time: sel.wall_time.values().sum(),
                selection: sel.per_class,
            })
        })
        .collect::<Result<_>>()?;

    let column =
        |f: fn(&Metrics) -> f64| -> Vec<f64> { records.iter().map(|r| f(&r.metrics)).collect() };
    let (full_real, _) = evaluate_fit(pool, test)?;
    Ok(EvalReport {
        config: cfg.clone(),
        acc: MeanStd::of(&column(|m| m.acc)),
        macro_f1: MeanStd::of(&column(|m| m.macro_f1)),
        macro_auc: MeanStd::of(&column(|m| m.macro_auc)),
        runs: records,
        full_real,
    })
}
