use super::geometry::ClassGeometry;
use super::SelectionConfig;
use crate::error::Result;
use crate::linalg::check_dims;
use crate::objectives::ObjectiveWeights;
use crate::scalar::Scalar;

const IMPROVEMENT_EPS: f64 = 1e-12;

/// Trace of a greedy-plus-local-search run; indices are class-local.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOutcome<T> {
    /// Selection after forward greedy only, in pick order.
    pub greedy_selected: Vec<usize>,
    pub greedy_objective: T,
    /// Final selection, ascending.
    pub selected: Vec<usize>,
    pub objective: T,
    pub swaps: usize,
    pub sweeps: usize,
}

/// Minimises the combined objective over `vpc`-subsets of `items`.
///
/// Forward greedy adds, one at a time, the item giving the lowest objective
/// for the augmented set (lowest index on ties). Local search then scans
/// every (selected position, unselected item) swap in order, applying each
/// swap that lowers the objective by more than `1e-12`, until a full sweep
/// applies none or `local_search_max_sweeps` sweeps have run.
pub fn greedy_objective_search<T: Scalar, R: AsRef<[T]>>(
    items: &[R],
    vpc: usize,
    weights: &ObjectiveWeights,
    cfg: &SelectionConfig,
) -> Result<GreedyOutcome<T>> {
    let n = items.len();
    if let Some(first) = items.first() {
        for x in items {
            check_dims(first.as_ref().len(), x.as_ref().len())?;
        }
    }
    let geo = ClassGeometry::new(items, weights);
    let k = vpc.min(n);
    if k == n {
        let all: Vec<usize> = (0..n).collect();
        let obj = if n == 0 {
            T::zero()
        } else {
            geo.objective(&all)
        };
        return Ok(GreedyOutcome {
            greedy_selected: all.clone(),
            greedy_objective: obj,
            selected: all,
            objective: obj,
            swaps: 0,
            sweeps: 0,
        });
    }

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut in_set = vec![false; n];
    let mut current = T::infinity();
    let mut trial = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, T)> = None;
        for c in (0..n).filter(|&c| !in_set[c]) {
            trial.clear();
            trial.extend_from_slice(&selected);
            trial.push(c);
            let v = geo.objective(&trial);
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((c, v));
            }
        }
        let (c, v) = best.expect("k < n leaves a candidate");
        selected.push(c);
        in_set[c] = true;
        current = v;
    }
    let greedy_selected = selected.clone();
    let greedy_objective = current;

    let eps = T::lit(IMPROVEMENT_EPS);
    let mut swaps = 0;
    let mut sweeps = 0;
    while sweeps < cfg.local_search_max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for p in 0..k {
            for u in 0..n {
                if in_set[u] {
                    continue;
                }
                let old = selected[p];
                selected[p] = u;
                let v = geo.objective(&selected);
                if v < current - eps {
                    in_set[old] = false;
                    in_set[u] = true;
                    current = v;
                    swaps += 1;
                    improved = true;
                } else {
                    selected[p] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    selected.sort_unstable();
    Ok(GreedyOutcome {
        greedy_selected,
        greedy_objective,
        selected,
        objective: current,
        swaps,
        sweeps,
    })
}

/// Class-local indices chosen by [`greedy_objective_search`].
pub fn select_greedy_objective<T: Scalar, R: AsRef<[T]>>(
    items: &[R],
    vpc: usize,
    weights: &ObjectiveWeights,
    cfg: &SelectionConfig,
) -> Result<Vec<usize>> {
    Ok(greedy_objective_search(items, vpc, weights, cfg)?.selected)
}
