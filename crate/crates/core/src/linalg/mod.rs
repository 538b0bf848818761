//! Dense vector math shared by every other module.

mod jacobi;
mod pca;

pub use jacobi::symmetric_eigen;
pub use pca::{pca_fit, pca_transform, PcaModel};

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite, non-empty feature vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("vector must have dim >= 1"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite coordinate at index {i}")));
        }
        Ok(Vector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Vector(vec![T::zero(); dim])
    }

    /// Wraps values the caller already knows are finite and non-empty.
    pub(crate) fn from_raw(values: Vec<T>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        Vector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn cast<U: Scalar>(&self) -> Vector<U> {
        Vector(
            self.0
                .iter()
                .map(|v| U::from_f64(v.as_f64()).expect("finite cast"))
                .collect(),
        )
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> AsRef<[T]> for Vector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Euclidean distance without the dimension check; for hot loops whose
/// inputs were validated upstream.
#[inline]
pub(crate) fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    squared_distance(a, b).sqrt()
}

/// Euclidean norm of `a - b`.
pub fn l2_distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    check_dims(a.len(), b.len())?;
    Ok(dist(a, b))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine_similarity<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    check_dims(a.len(), b.len())?;
    let na = norm(a);
    if na <= T::zero() {
        return Err(Error::ZeroNorm("a"));
    }
    let nb = norm(b);
    if nb <= T::zero() {
        return Err(Error::ZeroNorm("b"));
    }
    let c = dot(a, b) / (na * nb);
    Ok(c.max(-T::one()).min(T::one()))
}

/// Coordinate-wise mean of a non-empty set of equal-length rows.
pub fn mean<T: Scalar, R: AsRef<[T]>>(rows: &[R]) -> Vec<T> {
    let dim = rows[0].as_ref().len();
    let mut acc = vec![T::zero(); dim];
    for r in rows {
        for (a, &v) in acc.iter_mut().zip(r.as_ref()) {
            *a = *a + v;
        }
    }
    let n = T::from_usize_lossy(rows.len());
    acc.iter_mut().for_each(|a| *a = *a / n);
    acc
}

/// Median of a non-empty list; even lengths average the two middle values.
pub(crate) fn median<T: Scalar>(mut xs: Vec<T>) -> T {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / T::lit(2.0)
    }
}
