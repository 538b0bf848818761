use crate::linalg::{dist, dot, norm};
use crate::objectives::ObjectiveWeights;
use crate::scalar::Scalar;

/// Pairwise distances and cosines of one class, for evaluating the
/// combined objective of many candidate subsets.
pub(crate) struct ClassGeometry<T> {
    n: usize,
    dist: Vec<T>,
    cos: Vec<T>,
    lambda_d: T,
    lambda_r: T,
}

impl<T: Scalar> ClassGeometry<T> {
    pub(crate) fn new<R: AsRef<[T]>>(items: &[R], weights: &ObjectiveWeights) -> Self {
        let n = items.len();
        let norms: Vec<T> = items.iter().map(|x| norm(x.as_ref())).collect();
        let mut d = vec![T::zero(); n * n];
        let mut c = vec![T::zero(); n * n];
        for i in 0..n {
            c[i * n + i] = T::one();
            for j in (i + 1)..n {
                let dij = dist(items[i].as_ref(), items[j].as_ref());
                // Zero-norm items count as orthogonal to everything.
                let cij = if norms[i] > T::zero() && norms[j] > T::zero() {
                    (dot(items[i].as_ref(), items[j].as_ref()) / (norms[i] * norms[j]))
                        .max(-T::one())
                        .min(T::one())
                } else {
                    T::zero()
                };
                d[i * n + j] = dij;
                d[j * n + i] = dij;
                c[i * n + j] = cij;
                c[j * n + i] = cij;
            }
        }
        Self {
            n,
            dist: d,
            cos: c,
            lambda_d: T::lit(weights.lambda_d),
            lambda_r: T::lit(weights.lambda_r),
        }
    }

    #[inline]
    pub(crate) fn d(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    #[inline]
    fn c(&self, i: usize, j: usize) -> T {
        self.cos[i * self.n + j]
    }

    pub(crate) fn objective(&self, sel: &[usize]) -> T {
        let n = self.n;
        let total: T = (0..n)
            .map(|t| {
                sel.iter()
                    .map(|&i| self.d(t, i))
                    .fold(T::infinity(), T::min)
            })
            .sum();
        let rep = (-total / T::from_usize_lossy(n)).exp();
        let m = sel.len();
        let div = if m >= 2 {
            let mut s = T::zero();
            for a in 0..m {
                for b in (a + 1)..m {
                    s = s + self.c(sel[a], sel[b]);
                }
            }
            T::lit(2.0) * s / T::from_usize_lossy(m * (m - 1))
        } else {
            T::zero()
        };
        self.lambda_d * div - self.lambda_r * rep
    }
}
