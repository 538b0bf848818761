use crate::dataset::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg::{check_dims, dist, mean, Vector};
use crate::scalar::Scalar;

/// Nearest-centroid classifier with softmax scores over negative distances.
#[derive(Clone, Debug, PartialEq)]
pub struct CentroidModel<T> {
    pub centroids: Vec<Vector<T>>,
    pub temperature: T,
}

impl<T: Scalar> CentroidModel<T> {
    pub fn with_temperature(mut self, temperature: T) -> Result<Self> {
        if temperature <= T::zero() || !temperature.is_finite() {
            return Err(Error::domain(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        self.temperature = temperature;
        Ok(self)
    }

    pub fn num_classes(&self) -> usize {
        self.centroids.len()
    }
}

/// One centroid per class of the label universe, each the mean of that
/// class's items. Temperature defaults to 1.
pub fn fit_centroids<T: Scalar>(train: &EmbeddingSet<T>) -> Result<CentroidModel<T>> {
    let classes = train.class_indices();
    let centroids = classes
        .iter()
        .enumerate()
        .map(|(c, idx)| {
            if idx.is_empty() {
                return Err(Error::Eval(format!("class {c} has no training items")));
            }
            let rows: Vec<&[T]> = idx.iter().map(|&i| train.vectors()[i].as_slice()).collect();
            Ok(Vector::from_raw(mean(&rows)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CentroidModel {
        centroids,
        temperature: T::one(),
    })
}

/// `softmax_c(-|x - centroid_c| / temperature)` for every row of `xs`.
pub fn predict_scores<T: Scalar, R: AsRef<[T]>>(
    model: &CentroidModel<T>,
    xs: &[R],
) -> Result<Vec<Vec<T>>> {
    let dim = model.centroids.first().map_or(0, |c| c.dim());
    xs.iter()
        .map(|x| {
            let x = x.as_ref();
            check_dims(dim, x.len())?;
            let logits: Vec<T> = model
                .centroids
                .iter()
                .map(|c| -dist(x, c) / model.temperature)
                .collect();
            let top = logits.iter().copied().fold(T::neg_infinity(), T::max);
            let exps: Vec<T> = logits.iter().map(|&l| (l - top).exp()).collect();
            let z: T = exps.iter().copied().sum();
            Ok(exps.into_iter().map(|e| e / z).collect())
        })
        .collect()
}

/// Arg-max class per row; ties go to the lowest class id.
pub fn predict_labels<T: Scalar>(scores: &[Vec<T>]) -> Vec<u32> {
    scores
        .iter()
        .map(|row| {
            let mut best = 0;
            for (c, &s) in row.iter().enumerate() {
                if s > row[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect()
}
