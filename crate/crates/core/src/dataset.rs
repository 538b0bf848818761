use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Labelled feature vectors: `N` items of dimension `D` over `C` classes.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet<T> {
    dim: usize,
    num_classes: u32,
    vectors: Vec<Vector<T>>,
    labels: Vec<u32>,
}

impl<T: Scalar> EmbeddingSet<T> {
    pub fn new(
        dim: usize,
        num_classes: u32,
        vectors: Vec<Vector<T>>,
        labels: Vec<u32>,
    ) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::domain(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if !vectors.is_empty() && dim == 0 {
            return Err(Error::domain("non-empty embedding set with dim 0"));
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(Error::domain(format!(
                "label {l} of item {i} >= class count {num_classes}"
            )));
        }
        Ok(Self {
            dim,
            num_classes,
            vectors,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn vectors(&self) -> &[Vector<T>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Global item indices of every class, in ascending order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes as usize];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Items at `indices`, keeping the class universe.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            dim: self.dim,
            num_classes: self.num_classes,
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> EmbeddingSet<U> {
        EmbeddingSet {
            dim: self.dim,
            num_classes: self.num_classes,
            vectors: self.vectors.iter().map(Vector::cast).collect(),
            labels: self.labels.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(EmbeddingSet::new(2, 2, vec![v(&[1.0, 2.0])], vec![2]).is_err());
        assert!(EmbeddingSet::new(2, 2, vec![v(&[1.0])], vec![0]).is_err());
        assert!(EmbeddingSet::new(2, 2, vec![v(&[1.0, 2.0])], vec![]).is_err());
        assert!(EmbeddingSet::<f64>::new(0, 0, vec![], vec![]).is_ok());
    }

    #[test]
    fn class_indices_and_subset() {
        let s =
            EmbeddingSet::new(1, 3, vec![v(&[0.0]), v(&[1.0]), v(&[2.0])], vec![2, 0, 2]).unwrap();
        assert_eq!(s.class_indices(), vec![vec![1], vec![], vec![0, 2]]);
        let sub = s.subset(&[2]);
        assert_eq!(sub.labels(), &[2]);
        assert_eq!(sub.num_classes(), 3);
    }
}
