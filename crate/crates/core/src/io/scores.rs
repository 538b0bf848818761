//! Score files: one `index<TAB>score` line per item. Omitted indices score 0.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::selection::ScoreVector;

/// Parses score-file text for a dataset of `n` items.
pub fn parse_scores(text: &str, n: usize, path: &Path) -> Result<ScoreVector> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut scores = vec![0.0; n];
    let mut seen = vec![false; n];
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let (idx, score) = raw
            .split_once('\t')
            .ok_or_else(|| err(line, "expected `index<TAB>score`".into()))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| err(line, format!("invalid index {idx:?}")))?;
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| err(line, format!("invalid score {score:?}")))?;
        if idx >= n {
            return Err(err(line, format!("index {idx} out of range for {n} items")));
        }
        if seen[idx] {
            return Err(err(line, format!("duplicate index {idx}")));
        }
        if !score.is_finite() || score < 0.0 {
            return Err(err(
                line,
                format!("score {score} must be finite and non-negative"),
            ));
        }
        seen[idx] = true;
        scores[idx] = score;
    }
    ScoreVector::new(scores)
}

pub fn render_scores(scores: &ScoreVector) -> String {
    let mut out = String::new();
    for (i, s) in scores.as_slice().iter().enumerate() {
        writeln!(out, "{i}\t{s:?}").expect("writing to a String");
    }
    out
}

pub fn read_scores(path: &Path, n: usize) -> Result<ScoreVector> {
    parse_scores(&super::read_text(path)?, n, path)
}

pub fn write_scores(scores: &ScoreVector, path: &Path) -> Result<()> {
    super::write_atomic(path, render_scores(scores).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Result<ScoreVector> {
        parse_scores(text, n, Path::new("s.tsv"))
    }

    #[test]
    fn omitted_indices_default_to_zero() {
        let s = p("2\t0.5\n0\t1e-3\n", 4).unwrap();
        assert_eq!(s.as_slice(), &[1e-3, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn malformed_lines_are_parse_errors() {
        for bad in [
            "0\t1\n0\t2\n",
            "4\t1\n",
            "x\t1\n",
            "0\tnan\n",
            "0\t-1\n",
            "0 1\n",
        ] {
            assert!(matches!(p(bad, 4), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(v in prop::collection::vec(0.0f64..1e12, 0..40)) {
            let s = ScoreVector::new(v.clone()).unwrap();
            let back = p(&render_scores(&s), v.len()).unwrap();
            prop_assert_eq!(back.as_slice(), v.as_slice());
        }
    }
}
