use super::SelectionConfig;
use crate::birch::{cf_from_point, global_cluster, CfTree, LeafEntry};
use crate::error::Result;
use crate::linalg::{pca_fit, pca_transform, squared_distance, Vector};
use crate::objectives::median_pairwise_distance;
use crate::rng::RngStream;
use crate::scalar::Scalar;

const THRESHOLD_SAMPLE: usize = 512;
const MAX_THRESHOLD_HALVINGS: usize = 8;
const TIE_REL_TOL: f64 = 1e-9;

/// Cluster-based selection: PCA reduction, a BIRCH CF-tree over the reduced
/// items, global clustering of the leaf entries into `vpc` clusters, and
/// from each cluster the member nearest the cluster centroid.
pub fn select_tacdt<T: Scalar, R: AsRef<[T]>>(
    items: &[R],
    vpc: usize,
    cfg: &SelectionConfig,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    let n = items.len();
    if n <= vpc {
        return Ok((0..n).collect());
    }
    let dim = items[0].as_ref().len();
    let k = cfg.pca_dims.min(n - 1).min(dim);
    let model = pca_fit(items, k)?;
    let reduced = pca_transform(&model, items)?;

    let entries = build_class_tree(&reduced, vpc, cfg, rng)?;
    let clustering = global_cluster(&entries, vpc, rng)?;

    let mut picks = Vec::with_capacity(vpc);
    for (cluster, entry_ids) in clustering.clusters().iter().enumerate() {
        let centroid = &clustering.centroids[cluster];
        let mut best: Option<(usize, T)> = None;
        let mut members: Vec<usize> = entry_ids
            .iter()
            .flat_map(|&e| entries[e].members.iter().copied())
            .collect();
        members.sort_unstable();
        // Distances within a relative 1e-9 count as tied, so rounding
        // cannot override the lowest-index rule (two-member clusters tie exactly).
        for m in members {
            let d = squared_distance(&reduced[m], centroid);
            if best.is_none_or(|(_, b)| d < b - T::lit(TIE_REL_TOL) * b) {
                best = Some((m, d));
            }
        }
        picks.push(best.expect("clusters are non-empty").0);
    }
    picks.sort_unstable();
    Ok(picks)
}

/// Leaf entries of the class CF-tree, with at least `vpc` entries.
///
/// The threshold starts at `birch_threshold_scale` times the median pairwise
/// distance of (a seeded sample of at most 512 of) the reduced items and is
/// halved up to 8 times while the tree has fewer than `vpc` leaf entries;
/// after that every item becomes its own entry.
pub fn build_class_tree<T: Scalar>(
    reduced: &[Vector<T>],
    vpc: usize,
    cfg: &SelectionConfig,
    rng: &mut RngStream,
) -> Result<Vec<LeafEntry<T>>> {
    let n = reduced.len();
    let idx: Vec<usize> = if n > THRESHOLD_SAMPLE {
        let mut v = rng.sample_indices(n, THRESHOLD_SAMPLE);
        v.sort_unstable();
        v
    } else {
        (0..n).collect()
    };
    let median = median_pairwise_distance(reduced, &idx)?;
    let mut threshold = T::lit(cfg.birch_threshold_scale) * median;
    if threshold > T::zero() && threshold.is_finite() {
        for _ in 0..=MAX_THRESHOLD_HALVINGS {
            let mut tree = CfTree::new(threshold, cfg.birch_branching)?;
            for (id, x) in reduced.iter().enumerate() {
                tree.insert(x, id)?;
            }
            let entries = tree.leaf_entries();
            if entries.len() >= vpc {
                return Ok(entries);
            }
            threshold = threshold / T::lit(2.0);
        }
    }
    Ok(reduced
        .iter()
        .enumerate()
        .map(|(id, x)| LeafEntry {
            cf: cf_from_point(x),
            members: vec![id],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::selection::Method;

    fn cfg(vpc: usize) -> SelectionConfig {
        SelectionConfig::new(Method::Tacdt, vpc, 0)
    }

    #[test]
    fn small_class_is_identity() {
        let pts = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(
            select_tacdt(&pts, 2, &cfg(2), &mut derive_stream(0, 0)).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            select_tacdt(&pts, 5, &cfg(5), &mut derive_stream(0, 0)).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn two_far_pairs() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![100.0, 100.0],
            vec![0.1, 0.0],
            vec![100.0, 100.1],
        ];
        let s = select_tacdt(&pts, 2, &cfg(2), &mut derive_stream(0, 0)).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().any(|&i| i == 0 || i == 2));
        assert!(s.iter().any(|&i| i == 1 || i == 3));
    }

    #[test]
    fn identical_points_fall_back_to_singletons() {
        let pts = vec![vec![1.0, 1.0]; 6];
        let s = select_tacdt(&pts, 3, &cfg(3), &mut derive_stream(0, 0)).unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn deterministic() {
        let mut g = derive_stream(5, 0);
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..6).map(|_| g.normal()).collect())
            .collect();
        let a = select_tacdt(&pts, 5, &cfg(5), &mut derive_stream(9, 1)).unwrap();
        for _ in 0..4 {
            assert_eq!(
                a,
                select_tacdt(&pts, 5, &cfg(5), &mut derive_stream(9, 1)).unwrap()
            );
        }
        assert_eq!(a.len(), 5);
    }
}
