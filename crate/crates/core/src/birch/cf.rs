use crate::error::{Error, Result};
use crate::linalg::{check_dims, dot};
use crate::scalar::Scalar;

/// BIRCH sufficient statistic: member count, linear sum and sum of squared norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringFeature<T> {
    pub n: usize,
    pub ls: Vec<T>,
    pub ss: T,
}

pub fn cf_from_point<T: Scalar>(x: &[T]) -> ClusteringFeature<T> {
    ClusteringFeature {
        n: 1,
        ls: x.to_vec(),
        ss: dot(x, x),
    }
}

pub fn cf_merge<T: Scalar>(
    a: &ClusteringFeature<T>,
    b: &ClusteringFeature<T>,
) -> Result<ClusteringFeature<T>> {
    check_dims(a.dim(), b.dim())?;
    let mut out = a.clone();
    out.absorb(b);
    Ok(out)
}

impl<T: Scalar> ClusteringFeature<T> {
    pub fn dim(&self) -> usize {
        self.ls.len()
    }

    /// In-place additive merge; dimensions must already agree.
    pub(crate) fn absorb(&mut self, other: &ClusteringFeature<T>) {
        debug_assert_eq!(self.dim(), other.dim());
        self.n += other.n;
        for (a, &b) in self.ls.iter_mut().zip(&other.ls) {
            *a = *a + b;
        }
        self.ss = self.ss + other.ss;
    }

    pub fn centroid(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.n);
        self.ls.iter().map(|&v| v / n).collect()
    }

    /// `ss/n - |ls/n|^2`, clamped at zero against cancellation.
    pub fn radius_squared(&self) -> T {
        let n = T::from_usize_lossy(self.n);
        let c = self.centroid();
        (self.ss / n - dot(&c, &c)).max(T::zero())
    }

    pub fn radius(&self) -> T {
        self.radius_squared().sqrt()
    }

    /// Radius the merge with `other` would have, without allocating the merge.
    pub fn merged_radius(&self, other: &ClusteringFeature<T>) -> T {
        let n = T::from_usize_lossy(self.n + other.n);
        let mut c2 = T::zero();
        for (&a, &b) in self.ls.iter().zip(&other.ls) {
            let c = (a + b) / n;
            c2 = c2 + c * c;
        }
        ((self.ss + other.ss) / n - c2).max(T::zero()).sqrt()
    }

    /// Folds a non-empty set of points.
    pub fn from_points<R: AsRef<[T]>>(points: &[R]) -> Result<Self> {
        let (first, rest) = points
            .split_first()
            .ok_or_else(|| Error::domain("clustering feature of an empty set"))?;
        let mut cf = cf_from_point(first.as_ref());
        for p in rest {
            check_dims(cf.dim(), p.as_ref().len())?;
            cf.absorb(&cf_from_point(p.as_ref()));
        }
        Ok(cf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let cf = cf_from_point(&[3.0, 4.0]);
        assert_eq!(cf.n, 1);
        assert_eq!(cf.ls, vec![3.0, 4.0]);
        assert_eq!(cf.ss, 25.0);
        assert_eq!(cf.radius(), 0.0);
        let z = cf_from_point(&[0.0_f64, 0.0]);
        assert_eq!((z.n, z.ss), (1, 0.0));
    }

    #[test]
    fn merge_pair() {
        let m = cf_merge(&cf_from_point(&[1.0, 0.0]), &cf_from_point(&[3.0, 0.0])).unwrap();
        assert_eq!(m.n, 2);
        assert_eq!(m.ls, vec![4.0, 0.0]);
        assert_eq!(m.ss, 10.0);
        assert_eq!(m.centroid(), vec![2.0, 0.0]);
        assert_eq!(m.radius(), 1.0);
        let a = cf_from_point(&[1.0_f64, 0.0]);
        assert_eq!(a.merged_radius(&cf_from_point(&[3.0, 0.0])), 1.0);
    }

    #[test]
    fn merge_with_itself_doubles() {
        let a = cf_from_point(&[1.5, -2.0]);
        let m = cf_merge(&a, &a).unwrap();
        assert_eq!(m.n, 2);
        assert_eq!(m.ls, vec![3.0, -4.0]);
        assert_eq!(m.ss, 2.0 * a.ss);
    }

    #[test]
    fn merge_dimension_mismatch() {
        let r = cf_merge(&cf_from_point(&[1.0]), &cf_from_point(&[1.0, 2.0]));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fold_is_order_independent() {
        let mut s = crate::rng::derive_stream(11, 0);
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![s.normal(), s.normal(), s.normal()])
            .collect();
        let a = ClusteringFeature::from_points(&pts).unwrap();
        let mut shuffled = pts.clone();
        let order = s.sample_indices(50, 50);
        for (i, &j) in order.iter().enumerate() {
            shuffled[i] = pts[j].clone();
        }
        let b = ClusteringFeature::from_points(&shuffled).unwrap();
        assert_eq!(a.n, b.n);
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        assert!(rel(a.ss, b.ss));
        assert!(a.ls.iter().zip(&b.ls).all(|(&x, &y)| rel(x, y)));
    }
}
