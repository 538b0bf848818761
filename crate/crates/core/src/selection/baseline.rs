use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `min(vpc, n)` distinct indices drawn uniformly without replacement.
pub fn select_random(n: usize, vpc: usize, rng: &mut RngStream) -> Vec<usize> {
    rng.sample_indices(n, vpc)
}

/// The `vpc` highest-scoring indices, best first; equal scores keep index order.
pub fn select_top_score(scores: &[f64], vpc: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(vpc);
    order
}

/// 0/1 knapsack by dynamic programming over integer capacities.
///
/// Maximises the total score subject to total cost `<= capacity`. Totals
/// within `1e-12` relative count as equal; among equal totals the solution
/// with more items wins (so zero-score items still fill spare capacity), and
/// remaining ties are broken by a backtrace that excludes higher indices
/// whenever it can. Returns ascending indices.
pub fn select_knapsack(scores: &[f64], costs: &[u64], capacity: u64) -> Result<Vec<usize>> {
    if scores.len() != costs.len() {
        return Err(Error::domain(format!(
            "{} scores but {} costs",
            scores.len(),
            costs.len()
        )));
    }
    if capacity < 1 {
        return Err(Error::domain("knapsack capacity must be >= 1"));
    }
    if let Some(i) = costs.iter().position(|&c| c < 1) {
        return Err(Error::domain(format!(
            "knapsack cost of item {i} must be >= 1"
        )));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::domain(format!(
            "knapsack score of item {i} is not finite"
        )));
    }
    let n = scores.len();
    let cap = capacity as usize;
    // (value, count) of the best solution per capacity, rolled over items.
    let mut best: Vec<(f64, usize)> = vec![(0.0, 0); cap + 1];
    let mut keep = vec![false; n * (cap + 1)];
    for i in 0..n {
        let w = costs[i] as usize;
        if w > cap {
            continue;
        }
        for c in (w..=cap).rev() {
            let (bv, bn) = best[c - w];
            let incl = (bv + scores[i], bn + 1);
            if better(incl, best[c]) {
                best[c] = incl;
                keep[i * (cap + 1) + c] = true;
            }
        }
    }
    let mut c = cap;
    let mut picked = Vec::new();
    for i in (0..n).rev() {
        if keep[i * (cap + 1) + c] {
            picked.push(i);
            c -= costs[i] as usize;
        }
    }
    picked.reverse();
    Ok(picked)
}

fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    let tol = 1e-12 * a.0.abs().max(b.0.abs()).max(1.0);
    if a.0 > b.0 + tol {
        true
    } else if a.0 < b.0 - tol {
        false
    } else {
        a.1 > b.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn random_full_and_deterministic() {
        let mut a = select_random(5, 5, &mut derive_stream(1, 0));
        assert_eq!(a, select_random(5, 5, &mut derive_stream(1, 0)));
        a.sort_unstable();
        assert_eq!(a, vec![0, 1, 2, 3, 4]);
        assert_eq!(select_random(3, 10, &mut derive_stream(1, 0)).len(), 3);
    }

    #[test]
    fn random_frequencies_are_uniform() {
        let mut rng = derive_stream(2024, 0);
        let reps = 10_000;
        let mut hits = [0usize; 10];
        for _ in 0..reps {
            for i in select_random(10, 3, &mut rng) {
                hits[i] += 1;
            }
        }
        for h in hits {
            let f = h as f64 / reps as f64;
            assert!((0.27..=0.33).contains(&f), "{f}");
        }
    }

    #[test]
    fn top_score_examples() {
        assert_eq!(select_top_score(&[0.1, 0.9, 0.5], 2), vec![1, 2]);
        assert_eq!(select_top_score(&[0.3, 0.3, 0.3], 2), vec![0, 1]);
        assert_eq!(select_top_score(&[0.3], 4), vec![0]);
    }

    #[test]
    fn knapsack_worked_example() {
        let s = select_knapsack(&[6.0, 10.0, 12.0], &[1, 2, 3], 5).unwrap();
        assert_eq!(s, vec![1, 2]);
    }

    #[test]
    fn knapsack_infeasible_and_invalid() {
        assert_eq!(
            select_knapsack(&[1.0, 2.0], &[3, 4], 2).unwrap(),
            Vec::<usize>::new()
        );
        assert!(select_knapsack(&[1.0], &[0], 2).is_err());
        assert!(select_knapsack(&[1.0], &[1], 0).is_err());
        assert!(select_knapsack(&[1.0], &[1, 1], 2).is_err());
    }

    #[test]
    fn knapsack_ties_prefer_lower_indices() {
        assert_eq!(
            select_knapsack(&[1.0, 1.0, 1.0], &[1, 1, 1], 2).unwrap(),
            vec![0, 1]
        );
        // Zero scores still fill capacity, like top-k.
        assert_eq!(
            select_knapsack(&[0.0, 2.0, 0.0], &[1, 1, 1], 2).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn knapsack_sum_association_ties() {
        // 0.1 + 0.2 + 0.3 and 0.3 + 0.2 + 0.1 differ in the last bit.
        let s = [0.1, 0.2, 0.3, 0.3, 0.2, 0.1];
        let top = {
            let mut t = select_top_score(&s, 3);
            t.sort_unstable();
            t
        };
        assert_eq!(select_knapsack(&s, &[1; 6], 3).unwrap(), top);
    }
}
