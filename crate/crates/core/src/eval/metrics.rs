use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b || a == 0 {
        return Err(Error::domain(format!(
            "metric inputs must have equal non-zero length, got {a} and {b}"
        )));
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn accuracy(pred: &[u32], truth: &[u32]) -> Result<f64> {
    check_lengths(pred.len(), truth.len())?;
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Unweighted mean of per-class F1 over the label universe `0..num_classes`.
/// A class with `P + R = 0` (including one absent from both inputs) scores 0.
pub fn macro_f1(pred: &[u32], truth: &[u32], num_classes: u32) -> Result<f64> {
    check_lengths(pred.len(), truth.len())?;
    if num_classes == 0 {
        return Err(Error::domain("macro F1 over zero classes"));
    }
    let c = num_classes as usize;
    let (mut tp, mut fp, mut fnn) = (vec![0usize; c], vec![0usize; c], vec![0usize; c]);
    for (&p, &t) in pred.iter().zip(truth) {
        if p as usize >= c || t as usize >= c {
            return Err(Error::domain(format!(
                "label outside universe of {num_classes} classes"
            )));
        }
        if p == t {
            tp[p as usize] += 1;
        } else {
            fp[p as usize] += 1;
            fnn[t as usize] += 1;
        }
    }
    let total: f64 = (0..c)
        .map(|k| {
            let precision = if tp[k] + fp[k] > 0 {
                tp[k] as f64 / (tp[k] + fp[k]) as f64
            } else {
                0.0
            };
            let recall = if tp[k] + fnn[k] > 0 {
                tp[k] as f64 / (tp[k] + fnn[k]) as f64
            } else {
                0.0
            };
            if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            }
        })
        .sum();
    Ok(total / c as f64)
}

/// ROC-AUC of `scores` against binary `positive` flags via the Mann–Whitney
/// rank statistic with mid-ranks for ties. `None` unless both classes occur.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share their mean.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            if positive[k] {
                rank_sum += mid;
            }
        }
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AucSummary {
    pub macro_auc: f64,
    /// Per-class AUC; `None` for skipped classes.
    pub per_class: Vec<Option<f64>>,
    /// Classes without both a positive and a negative test item.
    pub skipped: Vec<u32>,
}

/// Macro one-vs-rest AUC of a score matrix (one column per class).
pub fn macro_auc_ovr<T: Scalar>(scores: &[Vec<T>], truth: &[u32]) -> Result<AucSummary> {
    check_lengths(scores.len(), truth.len())?;
    let c = scores[0].len();
    if scores.iter().any(|r| r.len() != c) {
        return Err(Error::domain("ragged score matrix"));
    }
    let per_class: Vec<Option<f64>> = (0..c)
        .map(|k| {
            let col: Vec<f64> = scores.iter().map(|r| r[k].as_f64()).collect();
            let pos: Vec<bool> = truth.iter().map(|&t| t as usize == k).collect();
            roc_auc(&col, &pos)
        })
        .collect();
    let skipped: Vec<u32> = per_class
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_none())
        .map(|(k, _)| k as u32)
        .collect();
    let used: Vec<f64> = per_class.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::Eval("every class skipped in AUC".into()));
    }
    Ok(AucSummary {
        macro_auc: used.iter().sum::<f64>() / used.len() as f64,
        per_class,
        skipped,
    })
}
