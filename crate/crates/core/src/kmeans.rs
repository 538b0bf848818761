//! Weighted k-means with k-means++ seeding and Lloyd iterations.

use crate::linalg::squared_distance;
use crate::rng::RngStream;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult<T> {
    /// Cluster id of every point, in `[0, k)`.
    pub assignment: Vec<usize>,
    /// Weighted centroid of every cluster.
    pub centroids: Vec<Vec<T>>,
    pub iterations: usize,
}

impl<T: Scalar> KMeansResult<T> {
    /// Weighted sum of squared distances to assigned centroids.
    pub fn sse<R: AsRef<[T]>>(&self, points: &[R], weights: &[T]) -> T {
        points
            .iter()
            .zip(weights)
            .zip(&self.assignment)
            .map(|((p, &w), &c)| w * squared_distance(p.as_ref(), &self.centroids[c]))
            .sum()
    }
}

/// Clusters `points` into exactly `k` non-empty clusters.
///
/// Requires `1 <= k <= points.len()` and positive weights. Seeding is
/// k-means++ (first center drawn proportionally to weight, later ones
/// proportionally to `weight * D^2`; when every remaining `D^2` is zero the
/// draw falls back to weight among unchosen points). Lloyd iterations run
/// until the assignment stops changing or `max_iters` is reached; assignment
/// ties go to the lowest cluster id. A cluster left empty takes the point
/// farthest from its own centroid among clusters with more than one member.
pub fn weighted_kmeans<T: Scalar, R: AsRef<[T]>>(
    points: &[R],
    weights: &[T],
    k: usize,
    rng: &mut RngStream,
    max_iters: usize,
) -> KMeansResult<T> {
    let n = points.len();
    assert!(k >= 1 && k <= n, "k={k} out of range for {n} points");
    assert_eq!(weights.len(), n);

    let mut centroids = seed_plus_plus(points, weights, k, rng);
    let mut assignment = vec![usize::MAX; n];
    let mut iterations = 0;
    loop {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let c = nearest(p.as_ref(), &centroids);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        repair_empty(points, &mut assignment, &mut centroids, k);
        centroids = weighted_centroids(points, weights, &assignment, k);
        iterations += 1;
        if !changed || iterations >= max_iters {
            break;
        }
    }
    KMeansResult {
        assignment,
        centroids,
        iterations,
    }
}

pub(crate) fn nearest<T: Scalar>(p: &[T], centroids: &[Vec<T>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(p, &centroids[0]);
    for (c, cen) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(p, cen);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn seed_plus_plus<T: Scalar, R: AsRef<[T]>>(
    points: &[R],
    weights: &[T],
    k: usize,
    rng: &mut RngStream,
) -> Vec<Vec<T>> {
    let n = points.len();
    let w64: Vec<f64> = weights.iter().map(|w| w.as_f64()).collect();
    let mut chosen = vec![false; n];
    let first = rng.weighted_index(&w64).unwrap_or(0);
    chosen[first] = true;
    let mut centroids = vec![points[first].as_ref().to_vec()];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p.as_ref(), &centroids[0]).as_f64())
        .collect();
    while centroids.len() < k {
        let probs: Vec<f64> = (0..n)
            .map(|i| if chosen[i] { 0.0 } else { w64[i] * d2[i] })
            .collect();
        let next = rng.weighted_index(&probs).unwrap_or_else(|| {
            let fallback: Vec<f64> = (0..n)
                .map(|i| if chosen[i] { 0.0 } else { w64[i] })
                .collect();
            rng.weighted_index(&fallback)
                .unwrap_or_else(|| chosen.iter().position(|c| !c).expect("k <= n"))
        });
        chosen[next] = true;
        let c = points[next].as_ref().to_vec();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p.as_ref(), &c).as_f64());
        }
        centroids.push(c);
    }
    centroids
}

fn repair_empty<T: Scalar, R: AsRef<[T]>>(
    points: &[R],
    assignment: &mut [usize],
    centroids: &mut [Vec<T>],
    k: usize,
) {
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignment.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut donor = None;
        let mut donor_d = T::neg_infinity();
        for (i, p) in points.iter().enumerate() {
            let a = assignment[i];
            if counts[a] < 2 {
                continue;
            }
            let d = squared_distance(p.as_ref(), &centroids[a]);
            if d > donor_d {
                donor = Some(i);
                donor_d = d;
            }
        }
        let i = donor.expect("k <= n leaves a cluster with two members");
        assignment[i] = empty;
        centroids[empty] = points[i].as_ref().to_vec();
    }
}

fn weighted_centroids<T: Scalar, R: AsRef<[T]>>(
    points: &[R],
    weights: &[T],
    assignment: &[usize],
    k: usize,
) -> Vec<Vec<T>> {
    let dim = points[0].as_ref().len();
    let mut sums = vec![vec![T::zero(); dim]; k];
    let mut mass = vec![T::zero(); k];
    for ((p, &w), &a) in points.iter().zip(weights).zip(assignment) {
        mass[a] = mass[a] + w;
        for (s, &x) in sums[a].iter_mut().zip(p.as_ref()) {
            *s = *s + w * x;
        }
    }
    for (s, m) in sums.iter_mut().zip(mass) {
        s.iter_mut().for_each(|v| *v = *v / m);
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn separates_two_blobs() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![10.0, 10.0],
            vec![10.1, 10.0],
            vec![0.0, 0.1],
        ];
        let w = vec![1.0; 5];
        let r = weighted_kmeans(&pts, &w, 2, &mut derive_stream(0, 0), 100);
        assert_eq!(r.assignment[0], r.assignment[1]);
        assert_eq!(r.assignment[0], r.assignment[4]);
        assert_eq!(r.assignment[2], r.assignment[3]);
        assert_ne!(r.assignment[0], r.assignment[2]);
    }

    #[test]
    fn duplicate_points_still_yield_k_clusters() {
        let pts = vec![vec![1.0]; 4];
        let w = vec![1.0; 4];
        let r = weighted_kmeans(&pts, &w, 3, &mut derive_stream(1, 0), 100);
        let mut ids = r.assignment.clone();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 3);
    }

    #[test]
    fn deterministic_for_fixed_stream() {
        let mut s = derive_stream(4, 4);
        let pts: Vec<Vec<f64>> = (0..40).map(|_| vec![s.normal(), s.normal()]).collect();
        let w = vec![1.0; 40];
        let a = weighted_kmeans(&pts, &w, 4, &mut derive_stream(9, 1), 100);
        let b = weighted_kmeans(&pts, &w, 4, &mut derive_stream(9, 1), 100);
        assert_eq!(a, b);
    }
}
