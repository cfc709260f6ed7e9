use alloc::vec::Vec;

use super::linalg::Matrix;
use crate::error::bail;
use crate::rff::{feature_map, gaussian_kernel_points, FeatureVector, FrequencyBasis};
use crate::Result;

/// Which kernel a model is fitted with.
#[derive(Debug, Clone, Copy)]
pub enum KernelMode<'a> {
    Exact,
    Rff(&'a FrequencyBasis),
}

/// Training points, stored the way the chosen kernel needs them.
#[derive(Debug, Clone)]
pub(crate) enum Embedding {
    Exact(Vec<Vec<f64>>),
    Rff {
        basis: FrequencyBasis,
        features: Vec<FeatureVector>,
    },
}

impl Embedding {
    pub fn new(points: &[Vec<f64>], mode: KernelMode<'_>) -> Result<Self> {
        Ok(match mode {
            KernelMode::Exact => Self::Exact(points.to_vec()),
            KernelMode::Rff(basis) => {
                if basis.dim() != points[0].len() {
                    bail!(
                        InvalidArgument,
                        "basis dimension {} does not match data dimension {}",
                        basis.dim(),
                        points[0].len()
                    );
                }
                Self::Rff {
                    basis: basis.clone(),
                    features: points
                        .iter()
                        .map(|p| feature_map(p, basis))
                        .collect::<Result<_>>()?,
                }
            }
        })
    }

    pub fn gram(&self) -> Matrix {
        match self {
            Self::Exact(p) => {
                Matrix::symmetric(p.len(), |i, j| gaussian_kernel_points(&p[i], &p[j]))
            }
            Self::Rff { features, .. } => {
                Matrix::symmetric(features.len(), |i, j| features[i].dot(&features[j]))
            }
        }
    }

    /// Kernel values between every training point and `x`.
    pub fn column(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Exact(p) => {
                if x.len() != p[0].len() {
                    bail!(
                        InvalidArgument,
                        "expected a {}-vector, got {}",
                        p[0].len(),
                        x.len()
                    );
                }
                Ok(p.iter().map(|q| gaussian_kernel_points(q, x)).collect())
            }
            Self::Rff { basis, features } => {
                let z = feature_map(x, basis)?;
                Ok(features.iter().map(|f| f.dot(&z)).collect())
            }
        }
    }
}
