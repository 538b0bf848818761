use super::SelectionConfig;
use crate::error::{Error, Result};
use crate::kmeans::{weighted_kmeans, DEFAULT_MAX_ITERS};
use crate::linalg::{check_dims, squared_distance};
use crate::objectives::{median_heuristic, KernelParams};
use crate::rng::RngStream;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansMmdOutcome<T> {
    /// Per-cluster members nearest their centroid, ascending.
    pub initial: Vec<usize>,
    /// `None` when the selection has fewer than two items.
    pub initial_mmd2: Option<T>,
    pub selected: Vec<usize>,
    pub mmd2: Option<T>,
    pub gamma: Option<T>,
}

/// k-means picks, then first-improvement swaps lowering the unbiased MMD^2
/// between the selection and the whole class (RBF kernel, median-heuristic
/// bandwidth over the class). Refinement needs at least two picks.
pub fn kmeans_mmd_search<T: Scalar, R: AsRef<[T]>>(
    items: &[R],
    vpc: usize,
    cfg: &SelectionConfig,
    rng: &mut RngStream,
) -> Result<KMeansMmdOutcome<T>> {
    let n = items.len();
    if n < 1 || vpc < 1 {
        return Err(Error::domain(
            "kmeans_mmd needs a non-empty class and vpc >= 1",
        ));
    }
    for x in items {
        check_dims(items[0].as_ref().len(), x.as_ref().len())?;
    }
    if n <= vpc {
        let all: Vec<usize> = (0..n).collect();
        return Ok(KMeansMmdOutcome {
            initial: all.clone(),
            initial_mmd2: None,
            selected: all,
            mmd2: None,
            gamma: None,
        });
    }

    let weights = vec![T::one(); n];
    let km = weighted_kmeans(items, &weights, vpc, rng, DEFAULT_MAX_ITERS);
    let mut initial = Vec::with_capacity(vpc);
    for (c, centroid) in km.centroids.iter().enumerate() {
        let mut best: Option<(usize, T)> = None;
        for (i, x) in items.iter().enumerate() {
            if km.assignment[i] != c {
                continue;
            }
            let d = squared_distance(x.as_ref(), centroid);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        initial.push(best.expect("k-means clusters are non-empty").0);
    }
    initial.sort_unstable();
    if vpc < 2 {
        return Ok(KMeansMmdOutcome {
            initial: initial.clone(),
            initial_mmd2: None,
            selected: initial,
            mmd2: None,
            gamma: None,
        });
    }

    let kernel = median_heuristic(items)?;
    let table = KernelTable::new(items, &kernel);
    let mut selected = initial.clone();
    let mut in_set = vec![false; n];
    selected.iter().for_each(|&i| in_set[i] = true);
    let initial_mmd2 = table.mmd2(&selected);
    let mut current = initial_mmd2;
    let eps = T::lit(1e-12);
    for _ in 0..cfg.local_search_max_sweeps {
        let mut improved = false;
        for p in 0..selected.len() {
            for u in 0..n {
                if in_set[u] {
                    continue;
                }
                let old = selected[p];
                selected[p] = u;
                let v = table.mmd2(&selected);
                if v < current - eps {
                    in_set[old] = false;
                    in_set[u] = true;
                    current = v;
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
    Ok(KMeansMmdOutcome {
        initial,
        initial_mmd2: Some(initial_mmd2),
        selected,
        mmd2: Some(current),
        gamma: Some(kernel.gamma),
    })
}

pub fn select_kmeans_mmd<T: Scalar, R: AsRef<[T]>>(
    items: &[R],
    vpc: usize,
    cfg: &SelectionConfig,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    Ok(kmeans_mmd_search(items, vpc, cfg, rng)?.selected)
}

/// Kernel matrix of one class with row sums and the class self-term.
struct KernelTable<T> {
    n: usize,
    k: Vec<T>,
    row_sum: Vec<T>,
    yy: T,
}

impl<T: Scalar> KernelTable<T> {
    fn new<R: AsRef<[T]>>(items: &[R], kernel: &KernelParams<T>) -> Self {
        let n = items.len();
        let mut k = vec![T::zero(); n * n];
        for i in 0..n {
            k[i * n + i] = T::one();
            for j in (i + 1)..n {
                let v = kernel.eval(items[i].as_ref(), items[j].as_ref());
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        let row_sum: Vec<T> = (0..n)
            .map(|i| k[i * n..(i + 1) * n].iter().copied().sum())
            .collect();
        let off: T = row_sum.iter().copied().sum::<T>() - T::from_usize_lossy(n);
        let yy = off / T::from_usize_lossy(n * (n - 1));
        Self { n, k, row_sum, yy }
    }

    /// Unbiased MMD^2 between the items at `sel` and the whole class.
    fn mmd2(&self, sel: &[usize]) -> T {
        let m = sel.len();
        let mut xx = T::zero();
        for a in 0..m {
            for b in (a + 1)..m {
                xx = xx + self.k[sel[a] * self.n + sel[b]];
            }
        }
        let xx = T::lit(2.0) * xx / T::from_usize_lossy(m * (m - 1));
        let xy: T = sel.iter().map(|&i| self.row_sum[i]).sum();
        xx + self.yy - T::lit(2.0) * xy / T::from_usize_lossy(m * self.n)
    }
}
