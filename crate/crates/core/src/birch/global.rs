use super::tree::LeafEntry;
use crate::error::{Error, Result};
use crate::kmeans::{weighted_kmeans, DEFAULT_MAX_ITERS};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Assignment of leaf entries to `k` clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalClustering<T> {
    /// Cluster id per leaf entry, in `[0, k)`.
    pub assignment: Vec<usize>,
    /// Count-weighted centroid per cluster.
    pub centroids: Vec<Vec<T>>,
}

impl<T: Scalar> GlobalClustering<T> {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Entry indices grouped by cluster.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (e, &c) in self.assignment.iter().enumerate() {
            out[c].push(e);
        }
        out
    }
}

/// Groups leaf entries into `k` clusters by count-weighted k-means over the
/// entry centroids. With `k >= entries.len()` every entry is its own cluster.
pub fn global_cluster<T: Scalar>(
    entries: &[LeafEntry<T>],
    k: usize,
    rng: &mut RngStream,
) -> Result<GlobalClustering<T>> {
    if k < 1 {
        return Err(Error::domain("global clustering needs k >= 1"));
    }
    if entries.is_empty() {
        return Err(Error::domain("global clustering of zero leaf entries"));
    }
    let centroids: Vec<Vec<T>> = entries.iter().map(|e| e.cf.centroid()).collect();
    if entries.len() <= k {
        return Ok(GlobalClustering {
            assignment: (0..entries.len()).collect(),
            centroids,
        });
    }
    let weights: Vec<T> = entries
        .iter()
        .map(|e| T::from_usize_lossy(e.cf.n))
        .collect();
    let r = weighted_kmeans(&centroids, &weights, k, rng, DEFAULT_MAX_ITERS);
    Ok(GlobalClustering {
        assignment: r.assignment,
        centroids: r.centroids,
    })
}
