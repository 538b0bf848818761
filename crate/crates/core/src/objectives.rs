//! Subset objectives: diversity and representativeness of a selection,
//! their weighted combination, and an RBF-kernel MMD estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, cosine_similarity, dist, median, squared_distance};
use crate::rng::derive_stream;
use crate::scalar::Scalar;

/// Weights of the diversity and representativeness terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub lambda_d: f64,
    pub lambda_r: f64,
}

impl ObjectiveWeights {
    pub fn new(lambda_d: f64, lambda_r: f64) -> Result<Self> {
        let w = Self { lambda_d, lambda_r };
        w.validate()?;
        Ok(w)
    }

    /// Default schedule by budget: one item per class uses
    /// `(lambda_r, lambda_d) = (0.1, 0)`, larger budgets `(1, 0.1)`.
    pub fn default_for_vpc(vpc: usize) -> Self {
        if vpc <= 1 {
            Self {
                lambda_d: 0.0,
                lambda_r: 0.1,
            }
        } else {
            Self {
                lambda_d: 0.1,
                lambda_r: 1.0,
            }
        }
    }

    /// Weights actually applied for a budget: diversity is undefined for a
    /// single item, so `lambda_d` is forced to zero when `vpc == 1`.
    pub fn effective(self, vpc: usize) -> Self {
        if vpc <= 1 {
            Self {
                lambda_d: 0.0,
                ..self
            }
        } else {
            self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_d", self.lambda_d), ("lambda_r", self.lambda_r)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Validation for weights that drive an optimizer.
    pub fn validate_for_optimization(&self) -> Result<()> {
        self.validate()?;
        if self.lambda_d == 0.0 && self.lambda_r == 0.0 {
            return Err(Error::config("lambda_d and lambda_r are both zero"));
        }
        Ok(())
    }
}

/// RBF kernel `k(a, b) = exp(-gamma * |a - b|^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<T> {
    pub gamma: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma <= T::zero() || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "kernel gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    #[inline]
    pub fn eval(&self, a: &[T], b: &[T]) -> T {
        (-self.gamma * squared_distance(a, b)).exp()
    }
}

/// Mean cosine similarity over ordered pairs of distinct selected items.
/// Lower means a more spread-out selection.
pub fn diversity_loss<T: Scalar, R: AsRef<[T]>>(selected: &[R]) -> Result<T> {
    let n = selected.len();
    if n < 2 {
        return Err(Error::domain(format!(
            "diversity loss needs at least 2 selected items, got {n}"
        )));
    }
    let mut sum = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            sum = sum + cosine_similarity(selected[i].as_ref(), selected[j].as_ref())?;
        }
    }
    Ok(T::lit(2.0) * sum / T::from_usize_lossy(n * (n - 1)))
}

/// `exp(-mean_t min_{i in S} |x_t - x_i|)` over all class items `x_t`.
///
/// This is the raw coverage value: higher means the selection sits closer
/// to the rest of the class.
pub fn representativeness_loss<T: Scalar, R: AsRef<[T]>>(
    class_items: &[R],
    selected_ids: &[usize],
) -> Result<T> {
    validate_selection(class_items.len(), selected_ids)?;
    let dim = class_items[0].as_ref().len();
    for x in class_items {
        check_dims(dim, x.as_ref().len())?;
    }
    let total: T = class_items
        .iter()
        .map(|x| {
            selected_ids
                .iter()
                .map(|&i| dist(x.as_ref(), class_items[i].as_ref()))
                .fold(T::infinity(), T::min)
        })
        .sum();
    Ok((-total / T::from_usize_lossy(class_items.len())).exp())
}

/// `lambda_d * diversity - lambda_r * representativeness`; lower is better.
/// The diversity term is dropped for single-item selections.
pub fn combined_objective<T: Scalar, R: AsRef<[T]>>(
    class_items: &[R],
    selected_ids: &[usize],
    weights: &ObjectiveWeights,
) -> Result<T> {
    let rep = representativeness_loss(class_items, selected_ids)?;
    let div = if selected_ids.len() >= 2 {
        let sel: Vec<&[T]> = selected_ids
            .iter()
            .map(|&i| class_items[i].as_ref())
            .collect();
        diversity_loss(&sel)?
    } else {
        T::zero()
    };
    Ok(T::lit(weights.lambda_d) * div - T::lit(weights.lambda_r) * rep)
}

fn mean_offdiagonal_kernel<T: Scalar, R: AsRef<[T]>>(zs: &[R], kernel: &KernelParams<T>) -> T {
    let len = zs.len();
    let mut s = T::zero();
    for i in 0..len {
        for j in (i + 1)..len {
            s = s + kernel.eval(zs[i].as_ref(), zs[j].as_ref());
        }
    }
    T::lit(2.0) * s / T::from_usize_lossy(len * (len - 1))
}

pub(crate) fn validate_selection(n: usize, selected_ids: &[usize]) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("class has no items"));
    }
    if selected_ids.is_empty() {
        return Err(Error::domain("empty selection"));
    }
    let mut seen = vec![false; n];
    for &i in selected_ids {
        if i >= n {
            return Err(Error::domain(format!(
                "selected index {i} out of range for {n} items"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::domain(format!("selected index {i} repeated")));
        }
    }
    Ok(())
}

/// Unbiased estimate of the squared MMD between samples `xs` and `ys`.
/// May be slightly negative.
pub fn mmd2_unbiased<T: Scalar, R: AsRef<[T]>, S: AsRef<[T]>>(
    xs: &[R],
    ys: &[S],
    kernel: &KernelParams<T>,
) -> Result<T> {
    let (m, n) = (xs.len(), ys.len());
    if m < 2 || n < 2 {
        return Err(Error::domain(format!(
            "mmd needs at least 2 samples per side, got {m} and {n}"
        )));
    }
    let dim = xs[0].as_ref().len();
    for v in xs
        .iter()
        .map(AsRef::as_ref)
        .chain(ys.iter().map(AsRef::as_ref))
    {
        check_dims(dim, v.len())?;
    }
    let kxx = mean_offdiagonal_kernel(xs, kernel);
    let kyy = mean_offdiagonal_kernel(ys, kernel);
    let mut kxy = T::zero();
    for x in xs {
        for y in ys {
            kxy = kxy + kernel.eval(x.as_ref(), y.as_ref());
        }
    }
    Ok(kxx + kyy - T::lit(2.0) * kxy / T::from_usize_lossy(m * n))
}

/// Largest sample the median heuristic looks at.
pub const MEDIAN_SAMPLE: usize = 256;
const MEDIAN_SAMPLE_SEED: u64 = 0x6d65_6469_616e;

/// Bandwidth `gamma = 1 / (2 * median^2)` from the median pairwise distance.
///
/// Sets larger than 256 items are subsampled with a fixed stream, so the
/// result depends only on the input. A zero median falls back to `gamma = 1`.
pub fn median_heuristic<T: Scalar, R: AsRef<[T]>>(zs: &[R]) -> Result<KernelParams<T>> {
    if zs.len() < 2 {
        return Err(Error::domain("median heuristic needs at least 2 points"));
    }
    let idx: Vec<usize> = if zs.len() > MEDIAN_SAMPLE {
        let mut s = derive_stream(MEDIAN_SAMPLE_SEED, zs.len() as u64);
        let mut v = s.sample_indices(zs.len(), MEDIAN_SAMPLE);
        v.sort_unstable();
        v
    } else {
        (0..zs.len()).collect()
    };
    let med = median_pairwise_distance(zs, &idx)?;
    if med > T::zero() {
        KernelParams::new(T::one() / (T::lit(2.0) * med * med))
    } else {
        Ok(KernelParams { gamma: T::one() })
    }
}

pub(crate) fn median_pairwise_distance<T: Scalar, R: AsRef<[T]>>(
    zs: &[R],
    idx: &[usize],
) -> Result<T> {
    let dim = zs[idx[0]].as_ref().len();
    let mut d = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        check_dims(dim, zs[i].as_ref().len())?;
        for &j in &idx[a + 1..] {
            d.push(dist(zs[i].as_ref(), zs[j].as_ref()));
        }
    }
    Ok(median(d))
}
