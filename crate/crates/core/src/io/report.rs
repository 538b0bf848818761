//! Report and selection documents (JSON) and the flat CSV table.
//!
//! Every metric is rounded to six significant digits before it is stored,
//! so the JSON text is a pure function of the inputs. Aggregates are
//! rendered as `mean±std`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{EvalReport, MeanStd, Metrics};
use crate::objectives::ObjectiveWeights;
use crate::selection::{SelectionConfig, SelectionResult};

const SIG: usize = 6;

/// Formats `x` with `sig` significant digits: fixed notation for decimal
/// exponents in `[-5, sig)`, scientific otherwise.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", sig - 1, x);
    let exp: i64 = sci[sci.find('e').expect("scientific format") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..sig as i64).contains(&exp) {
        format!("{:.*}", (sig as i64 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

/// `x` rounded to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x, SIG).parse().expect("fmt_sig output parses")
}

pub fn fmt_mean_std(ms: MeanStd) -> String {
    format!("{}±{}", fmt_sig(ms.mean, SIG), fmt_sig(ms.std, SIG))
}

pub fn parse_mean_std(s: &str) -> Option<MeanStd> {
    let (m, sd) = s.split_once('±')?;
    Some(MeanStd {
        mean: m.parse().ok()?,
        std: sd.parse().ok()?,
    })
}

fn rounded(m: Metrics) -> Metrics {
    Metrics {
        acc: round_sig(m.acc),
        macro_f1: round_sig(m.macro_f1),
        macro_auc: round_sig(m.macro_auc),
    }
}

const METRICS: [&str; 3] = ["acc", "macro_f1", "macro_auc"];

fn metric_values(m: &Metrics) -> [f64; 3] {
    [m.acc, m.macro_f1, m.macro_auc]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    pub metrics: Metrics,
    pub auc_skipped_classes: Vec<u32>,
    pub selection: BTreeMap<u32, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Serialized form of an [`EvalReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub config: SelectionConfig,
    pub effective_weights: ObjectiveWeights,
    pub num_runs: usize,
    pub runs: Vec<RunRow>,
    /// Metric name to `mean±std`.
    pub aggregate: BTreeMap<String, String>,
    pub full_real: Metrics,
}

impl ReportDoc {
    /// Wall-times are included only when `timings` is set.
    pub fn from_eval(report: &EvalReport, timings: bool) -> Self {
        let runs = report
            .runs
            .iter()
            .map(|r| RunRow {
                run: r.run,
                seed: r.seed,
                metrics: rounded(r.metrics),
                auc_skipped_classes: r.auc_skipped.clone(),
                selection: r.selection.clone(),
                wall_time_s: timings.then(|| round_sig(r.wall_time.as_secs_f64())),
            })
            .collect();
        let aggregate = METRICS
            .iter()
            .zip([report.acc, report.macro_f1, report.macro_auc])
            .map(|(k, ms)| (k.to_string(), fmt_mean_std(ms)))
            .collect();
        Self {
            config: report.config.clone(),
            effective_weights: report.config.effective_weights(),
            num_runs: report.runs.len(),
            runs,
            aggregate,
            full_real: rounded(report.full_real),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        doc.check(path)?;
        Ok(doc)
    }

    fn check(&self, path: &Path) -> Result<()> {
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        if self.runs.len() != self.num_runs {
            return Err(bad(format!(
                "num_runs is {} but {} runs are listed",
                self.num_runs,
                self.runs.len()
            )));
        }
        for name in METRICS {
            let v = self
                .aggregate
                .get(name)
                .ok_or_else(|| bad(format!("aggregate is missing {name}")))?;
            parse_mean_std(v)
                .ok_or_else(|| bad(format!("aggregate {name} = {v:?} is not mean±std")))?;
        }
        Ok(())
    }

    /// Aggregates parsed back from their `mean±std` strings, in metric order.
    pub fn aggregates(&self) -> Vec<(&'static str, MeanStd)> {
        METRICS
            .iter()
            .filter_map(|&k| Some((k, parse_mean_std(self.aggregate.get(k)?)?)))
            .collect()
    }

    /// Plot table: header `run,metric,value`, one row per run and metric.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("run,metric,value\n");
        for r in &self.runs {
            for (k, v) in METRICS.iter().zip(metric_values(&r.metrics)) {
                writeln!(out, "{},{k},{}", r.run, fmt_sig(v, SIG)).expect("writing to a String");
            }
        }
        out
    }
}

pub fn write_report(doc: &ReportDoc, path: &Path) -> Result<()> {
    super::write_atomic(path, doc.to_json().as_bytes())
}

pub fn read_report(path: &Path) -> Result<ReportDoc> {
    ReportDoc::from_json(&super::read_text(path)?, path)
}

/// Serialized form of a [`SelectionResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionDoc {
    pub config: SelectionConfig,
    pub effective_weights: ObjectiveWeights,
    pub per_class: BTreeMap<u32, Vec<usize>>,
    pub per_class_objective: BTreeMap<u32, Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<BTreeMap<u32, f64>>,
}

impl SelectionDoc {
    pub fn from_result(cfg: &SelectionConfig, res: &SelectionResult, timings: bool) -> Self {
        Self {
            config: cfg.clone(),
            effective_weights: cfg.effective_weights(),
            per_class: res.per_class.clone(),
            per_class_objective: res
                .per_class_objective
                .iter()
                .map(|(&c, v)| (c, v.map(round_sig)))
                .collect(),
            wall_time_s: timings.then(|| {
                res.wall_time
                    .iter()
                    .map(|(&c, t)| (c, round_sig(t.as_secs_f64())))
                    .collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("selection serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        super::write_atomic(path, self.to_json().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&super::read_text(path)?, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(0.0, 6), "0.00000");
        assert_eq!(fmt_sig(-0.0, 6), "0.00000");
        assert_eq!(fmt_sig(41.47, 6), "41.4700");
        assert_eq!(fmt_sig(0.414734567, 6), "0.414735");
        assert_eq!(fmt_sig(1.0, 6), "1.00000");
        assert_eq!(fmt_sig(0.99999996, 6), "1.00000");
        assert_eq!(fmt_sig(123456.7, 6), "123457");
        assert_eq!(fmt_sig(999999.7, 6), "1.00000e6");
        assert_eq!(fmt_sig(1.5e-6, 6), "1.50000e-6");
        assert_eq!(fmt_sig(1.5e-5, 6), "0.0000150000");
        assert_eq!(fmt_sig(-2.5, 6), "-2.50000");
    }

    #[test]
    fn mean_std_rendering() {
        let ms = MeanStd {
            mean: 0.4147,
            std: 0.0032,
        };
        let s = fmt_mean_std(ms);
        assert_eq!(s, "0.414700±0.00320000");
        assert_eq!(parse_mean_std(&s), Some(ms));
        assert_eq!(parse_mean_std("0.4 +- 0.1"), None);
    }

    proptest! {
        #[test]
        fn fmt_sig_has_six_significant_digits(x in -1e9f64..1e9) {
            prop_assume!(x != 0.0);
            let s = fmt_sig(x, 6);
            let mantissa = s.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            prop_assert_eq!(digits.trim_start_matches('0').len(), 6, "{}", s);
            let back: f64 = s.parse().unwrap();
            prop_assert!(((back - x) / x).abs() <= 5e-6);
        }

        #[test]
        fn round_sig_is_idempotent(x in -1e9f64..1e9) {
            let r = round_sig(x);
            prop_assert_eq!(round_sig(r), r);
            prop_assert_eq!(fmt_sig(r, 6), fmt_sig(x, 6));
        }
    }
}
