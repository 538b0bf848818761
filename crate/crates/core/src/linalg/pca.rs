use serde::{Deserialize, Serialize};

use super::{check_dims, dot, mean, norm, symmetric_eigen, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A fitted principal component projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel<T> {
    pub mean: Vector<T>,
    /// Orthonormal directions, ordered by descending eigenvalue.
    pub components: Vec<Vector<T>>,
    /// Sample-covariance eigenvalues (divisor `N - 1`), non-increasing.
    pub eigenvalues: Vec<T>,
    /// Trace of the sample covariance.
    pub total_variance: T,
}

impl<T: Scalar> PcaModel<T> {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.dim()
    }

    /// Maps reduced coordinates back to the input space.
    pub fn inverse_transform<R: AsRef<[T]>>(&self, ys: &[R]) -> Result<Vec<Vector<T>>> {
        ys.iter()
            .map(|y| {
                let y = y.as_ref();
                check_dims(y.len(), self.k())?;
                let mut x = self.mean.as_slice().to_vec();
                for (&coef, comp) in y.iter().zip(&self.components) {
                    for (xi, &ci) in x.iter_mut().zip(comp.iter()) {
                        *xi = *xi + coef * ci;
                    }
                }
                Ok(Vector::from_raw(x))
            })
            .collect()
    }
}

/// Fits a `k`-component PCA on `rows`.
///
/// The top-`k` eigenpairs of the sample covariance come from cyclic Jacobi
/// rotations. When `N <= D` the `N x N` Gram matrix of the centered data is
/// decomposed instead and mapped back, which has the same non-zero spectrum.
/// Each component's largest-magnitude coordinate is made positive.
/// Eigenvalues below the numerical noise floor are reported as zero and
/// their directions are completed deterministically from the standard basis.
pub fn pca_fit<T: Scalar, R: AsRef<[T]>>(rows: &[R], k: usize) -> Result<PcaModel<T>> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::domain(format!("pca needs at least 2 rows, got {n}")));
    }
    let d = rows[0].as_ref().len();
    for r in rows {
        check_dims(d, r.as_ref().len())?;
    }
    let k_max = (n - 1).min(d);
    if k == 0 || k > k_max {
        return Err(Error::domain(format!(
            "pca k={k} out of range [1, {k_max}] for {n} rows of dim {d}"
        )));
    }

    let mu = mean(rows);
    let centered: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.as_ref().iter().zip(&mu).map(|(&x, &m)| x - m).collect())
        .collect();
    let denom = T::from_usize_lossy(n - 1);
    let total_variance = centered.iter().map(|r| dot(r, r)).sum::<T>() / denom;

    let use_gram = n <= d;
    let m = if use_gram { n } else { d };
    let mut scatter = vec![T::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let s = if use_gram {
                dot(&centered[i], &centered[j])
            } else {
                centered.iter().fold(T::zero(), |acc, r| acc + r[i] * r[j])
            } / denom;
            scatter[i * m + j] = s;
            scatter[j * m + i] = s;
        }
    }
    let (values, vectors) = symmetric_eigen(&scatter, m);

    let mut order: Vec<usize> = (0..m).collect();
    // Stable: equal eigenvalues keep diagonal order.
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finite eigenvalues")
    });

    let lambda_max = values[order[0]].max(T::zero());
    let floor = lambda_max * T::epsilon() * T::from_usize_lossy(10 * m);

    let mut eigenvalues = Vec::with_capacity(k);
    let mut components: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut pending = 0usize;
    for &idx in order.iter().take(k) {
        let lambda = values[idx];
        if lambda <= floor || lambda <= T::zero() {
            eigenvalues.push(T::zero());
            pending += 1;
            continue;
        }
        let dir = if use_gram {
            // v = Xc^T u / sqrt((N-1) lambda)
            let u = &vectors[idx];
            let scale = T::one() / (denom * lambda).sqrt();
            (0..d)
                .map(|c| {
                    centered
                        .iter()
                        .zip(u)
                        .fold(T::zero(), |acc, (r, &ui)| acc + r[c] * ui)
                        * scale
                })
                .collect()
        } else {
            vectors[idx].clone()
        };
        eigenvalues.push(lambda);
        components.push(dir);
    }

    orthonormalize(&mut components);
    complete_basis(&mut components, pending, d);
    for c in components.iter_mut() {
        fix_sign(c);
    }

    Ok(PcaModel {
        mean: Vector::from_raw(mu),
        components: components.into_iter().map(Vector::from_raw).collect(),
        eigenvalues,
        total_variance,
    })
}

/// Projects rows onto the model: `y = components * (x - mean)`.
pub fn pca_transform<T: Scalar, R: AsRef<[T]>>(
    model: &PcaModel<T>,
    rows: &[R],
) -> Result<Vec<Vector<T>>> {
    let d = model.input_dim();
    let mut centered = vec![T::zero(); d];
    rows.iter()
        .map(|r| {
            let r = r.as_ref();
            check_dims(d, r.len())?;
            for ((c, &x), &m) in centered.iter_mut().zip(r).zip(model.mean.iter()) {
                *c = x - m;
            }
            Ok(Vector::from_raw(
                model.components.iter().map(|v| dot(v, &centered)).collect(),
            ))
        })
        .collect()
}

fn orthonormalize<T: Scalar>(vs: &mut [Vec<T>]) {
    for i in 0..vs.len() {
        let (done, rest) = vs.split_at_mut(i);
        let v = &mut rest[0];
        for u in done.iter() {
            let p = dot(v, u);
            v.iter_mut().zip(u).for_each(|(a, &b)| *a = *a - p * b);
        }
        let nv = norm(v);
        v.iter_mut().for_each(|a| *a = *a / nv);
    }
}

/// Appends `count` unit vectors orthogonal to `vs`, drawn from the standard
/// basis in index order by twice-applied Gram–Schmidt.
fn complete_basis<T: Scalar>(vs: &mut Vec<Vec<T>>, count: usize, d: usize) {
    let mut added = 0;
    let half = T::lit(0.5);
    for e in 0..d {
        if added == count {
            break;
        }
        let mut cand = vec![T::zero(); d];
        cand[e] = T::one();
        for _ in 0..2 {
            for u in vs.iter() {
                let p = dot(&cand, u);
                cand.iter_mut().zip(u).for_each(|(a, &b)| *a = *a - p * b);
            }
        }
        let nc = norm(&cand);
        if nc > half {
            cand.iter_mut().for_each(|a| *a = *a / nc);
            vs.push(cand);
            added += 1;
        }
    }
    debug_assert_eq!(added, count);
}

fn fix_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    fn random_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
        let mut s = derive_stream(seed, 0);
        (0..n)
            .map(|_| (0..d).map(|_| s.normal()).collect())
            .collect()
    }

    #[test]
    fn line_y_equals_x() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![-3.0, -3.0],
        ];
        let m = pca_fit(&rows, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.components[0][0] - h).abs() < 1e-12);
        assert!((m.components[0][1] - h).abs() < 1e-12);
        // Second eigenvalue is zero: all variance sits on the first component.
        assert!((m.eigenvalues[0] - m.total_variance).abs() < 1e-12);
    }

    #[test]
    fn identical_points_give_zero_variance() {
        let rows = vec![vec![1.0_f64, 2.0, 3.0]; 4];
        let m = pca_fit(&rows, 1).unwrap();
        assert_eq!(m.eigenvalues, vec![0.0]);
        assert!((norm(&m.components[0]) - 1.0).abs() < 1e-12);
        let big = m.components[0]
            .iter()
            .cloned()
            .fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
        assert!(big > 0.0);
    }

    #[test]
    fn k_out_of_range() {
        let rows = random_rows(1, 3, 5);
        assert!(pca_fit(&rows, 0).is_err());
        assert!(pca_fit(&rows, 3).is_err());
        assert!(pca_fit(&rows, 2).is_ok());
        assert!(pca_fit(&rows[..1], 1).is_err());
    }

    #[test]
    fn transform_of_mean_is_zero() {
        let rows = random_rows(2, 20, 5);
        let m = pca_fit(&rows, 3).unwrap();
        let y = pca_transform(&m, std::slice::from_ref(&m.mean)).unwrap();
        assert!(y[0].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn one_dimensional_data_recovers_centered_values() {
        let rows: Vec<Vec<f64>> = [1.0, 4.0, -2.0, 5.0].iter().map(|&v| vec![v]).collect();
        let m = pca_fit(&rows, 1).unwrap();
        assert_eq!(m.components[0].as_slice(), &[1.0]);
        let y = pca_transform(&m, &rows).unwrap();
        for (yi, r) in y.iter().zip(&rows) {
            assert!((yi[0] - (r[0] - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rank_reconstruction() {
        for (n, d) in [(20, 5), (4, 6), (7, 7)] {
            let rows = random_rows(n as u64 * 31 + d as u64, n, d);
            let k = (n - 1).min(d);
            let m = pca_fit(&rows, k).unwrap();
            let y = pca_transform(&m, &rows).unwrap();
            let back = m.inverse_transform(&y).unwrap();
            if k == d {
                for (b, r) in back.iter().zip(&rows) {
                    for (x, y) in b.iter().zip(r) {
                        assert!((x - y).abs() < 1e-5, "n={n} d={d}");
                    }
                }
            }
            // Gram matrix of components is the identity.
            for i in 0..k {
                for j in 0..k {
                    let g = dot(&m.components[i], &m.components[j]);
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn gram_route_matches_covariance_route() {
        // 6 rows in 6 dims uses the Gram route; the same rows padded to 5
        // dims use the covariance route. Compare via a common problem:
        // N = D + 1 forces covariance, N = D forces Gram on the transpose.
        let rows = random_rows(77, 6, 8);
        let m = pca_fit(&rows, 5).unwrap();
        let y = pca_transform(&m, &rows).unwrap();
        // Transformed covariance is diag(eigenvalues).
        for a in 0..5 {
            for b in 0..5 {
                let c: f64 = y.iter().map(|r| r[a] * r[b]).sum::<f64>() / 5.0;
                let e = if a == b { m.eigenvalues[a] } else { 0.0 };
                assert!((c - e).abs() < 1e-9, "{a},{b}: {c} vs {e}");
            }
        }
        let rank_sum: f64 = m.eigenvalues.iter().sum();
        assert!((rank_sum - m.total_variance).abs() < 1e-9);
    }

    #[test]
    fn works_in_f32() {
        let rows: Vec<Vec<f32>> = random_rows(5, 30, 4)
            .into_iter()
            .map(|r| r.into_iter().map(|v| v as f32).collect())
            .collect();
        let m = pca_fit(&rows, 2).unwrap();
        assert!(m.eigenvalues[0] >= m.eigenvalues[1]);
        assert!((norm(&m.components[0]) - 1.0).abs() < 1e-5);
    }
}
