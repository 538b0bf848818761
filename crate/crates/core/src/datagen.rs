//! Seeded synthetic benchmark: multi-mode Gaussian mixtures per class.

use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::rng::{derive_stream, RngStream};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub classes: u32,
    pub per_class: usize,
    pub dim: usize,
    pub modes_per_class: usize,
    pub class_separation: f64,
    pub mode_spread: f64,
    pub noise_sigma: f64,
    pub test_per_class: usize,
    pub seed: u64,
    /// Seed for the test draws; defaults to `seed`. Changing it leaves the
    /// train pool untouched.
    pub test_seed: Option<u64>,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            classes: 10,
            per_class: 100,
            dim: 64,
            modes_per_class: 4,
            class_separation: 6.0,
            mode_spread: 1.5,
            noise_sigma: 1.0,
            test_per_class: 50,
            seed: 0,
            test_seed: None,
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        let positive_ints = [
            ("classes", self.classes as usize),
            ("per_class", self.per_class),
            ("dim", self.dim),
            ("modes_per_class", self.modes_per_class),
            ("test_per_class", self.test_per_class),
        ];
        for (name, v) in positive_ints {
            if v == 0 {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        let positive_reals = [
            ("class_separation", self.class_separation),
            ("mode_spread", self.mode_spread),
            ("noise_sigma", self.noise_sigma),
        ];
        for (name, v) in positive_reals {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.modes_per_class > self.per_class {
            return Err(Error::config("modes_per_class must not exceed per_class"));
        }
        Ok(())
    }
}

/// Generating structure of one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMixture {
    /// Uniform on the sphere of radius `class_separation`.
    pub mean: Vec<f64>,
    /// Mode centers relative to `mean`, each `N(0, mode_spread^2 I)`.
    pub mode_offsets: Vec<Vec<f64>>,
}

impl ClassMixture {
    /// Mean of the mixture when items are spread evenly over the modes.
    pub fn mixture_mean(&self) -> Vec<f64> {
        let k = self.mode_offsets.len() as f64;
        self.mean
            .iter()
            .enumerate()
            .map(|(d, &m)| m + self.mode_offsets.iter().map(|o| o[d]).sum::<f64>() / k)
            .collect()
    }
}

fn structure_stream(c: u32) -> u64 {
    3 * c as u64
}

/// Class means and mode offsets of every class.
pub fn mixtures(spec: &BenchmarkSpec) -> Vec<ClassMixture> {
    (0..spec.classes)
        .map(|c| {
            let mut s = derive_stream(spec.seed, structure_stream(c));
            let mut dir: Vec<f64> = (0..spec.dim).map(|_| s.normal()).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            dir.iter_mut()
                .for_each(|v| *v *= spec.class_separation / norm);
            let mode_offsets = (0..spec.modes_per_class)
                .map(|_| {
                    (0..spec.dim)
                        .map(|_| spec.mode_spread * s.normal())
                        .collect()
                })
                .collect();
            ClassMixture {
                mean: dir,
                mode_offsets,
            }
        })
        .collect()
}

fn draw<T: Scalar>(
    mix: &ClassMixture,
    count: usize,
    sigma: f64,
    s: &mut RngStream,
) -> Vec<Vector<T>> {
    (0..count)
        .map(|j| {
            let offset = &mix.mode_offsets[j % mix.mode_offsets.len()];
            let v = mix
                .mean
                .iter()
                .zip(offset)
                .map(|(&m, &o)| T::lit(m + o + sigma * s.normal()))
                .collect();
            Vector::from_raw(v)
        })
        .collect()
}

/// Train pool and test set, items grouped by class in class order. Items
/// are assigned to modes round-robin.
pub fn gen_benchmark<T: Scalar>(
    spec: &BenchmarkSpec,
) -> Result<(EmbeddingSet<T>, EmbeddingSet<T>)> {
    spec.validate()?;
    let test_seed = spec.test_seed.unwrap_or(spec.seed);
    let mut train = (Vec::new(), Vec::new());
    let mut test = (Vec::new(), Vec::new());
    for (c, mix) in mixtures(spec).iter().enumerate() {
        let c = c as u32;
        let mut s = derive_stream(spec.seed, structure_stream(c) + 1);
        train
            .0
            .extend(draw(mix, spec.per_class, spec.noise_sigma, &mut s));
        train.1.extend(std::iter::repeat_n(c, spec.per_class));
        let mut s = derive_stream(test_seed, structure_stream(c) + 2);
        test.0
            .extend(draw(mix, spec.test_per_class, spec.noise_sigma, &mut s));
        test.1.extend(std::iter::repeat_n(c, spec.test_per_class));
    }
    Ok((
        EmbeddingSet::new(spec.dim, spec.classes, train.0, train.1)?,
        EmbeddingSet::new(spec.dim, spec.classes, test.0, test.1)?,
    ))
}
