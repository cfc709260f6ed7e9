//! Random Fourier features for the Gaussian kernel `k(Δ) = exp(-‖Δ‖²/2)`.
//!
//! Frequencies are drawn from the kernel's spectral measure `N(0, I_d)`.
//! A point maps to `z(x) = D^{-1/2} (cos ω₁ᵀx, sin ω₁ᵀx, …, cos ω_Dᵀx, sin ω_Dᵀx)`
//! and `⟨z(x), z(y)⟩ = D⁻¹ Σ cos ωᵢᵀ(x − y)` estimates `k(x − y)` without bias.

mod sup;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{cos, exp, sincos, sqrt};
use crate::rng::Stream;
use crate::Result;

pub use sup::{
    certified_sup_error, certified_sup_exceeds, default_grid_points, lipschitz_cap, SupDecision,
    SupErrorResult,
};

/// The sampled frequencies `ω₁ … ω_D ∈ ℝᵈ` of one feature map.
///
/// Draws come from stream `stream` of `seed`, in row-major order, so a basis
/// is a pure function of `(seed, stream, d, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBasis {
    dim: usize,
    count: usize,
    seed: u64,
    frequencies: Vec<f64>,
}

/// Samples `count` standard normal frequency vectors of length `dim`.
pub fn sample_frequencies(dim: usize, count: usize, seed: u64) -> Result<FrequencyBasis> {
    FrequencyBasis::sample_stream(dim, count, seed, 0)
}

impl FrequencyBasis {
    pub fn sample_stream(dim: usize, count: usize, seed: u64, stream: u64) -> Result<Self> {
        if dim == 0 {
            bail!(InvalidArgument, "frequency dimension d must be >= 1");
        }
        if count == 0 {
            bail!(InvalidArgument, "feature count D must be >= 1");
        }
        let mut frequencies = vec![0.0; dim * count];
        Stream::new(seed, stream).fill_standard_normal(&mut frequencies);
        Ok(Self {
            dim,
            count,
            seed,
            frequencies,
        })
    }

    /// Builds a basis from explicit frequency vectors (all of length `dim`).
    pub fn from_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 || vectors.is_empty() {
            bail!(
                InvalidArgument,
                "basis needs d >= 1 and at least one frequency"
            );
        }
        let mut frequencies = Vec::with_capacity(dim * vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                bail!(
                    InvalidArgument,
                    "frequency {j} has length {}, expected {dim}",
                    v.len()
                );
            }
            frequencies.extend_from_slice(v);
        }
        Ok(Self {
            dim,
            count: vectors.len(),
            seed: 0,
            frequencies,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of frequencies `D` (the feature vector has `2D` entries).
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequency(&self, j: usize) -> &[f64] {
        &self.frequencies[j * self.dim..(j + 1) * self.dim]
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &[f64]> {
        self.frequencies.chunks_exact(self.dim)
    }

    /// Coordinate `axis` of every frequency: the projections `ωᵢᵀe_axis`,
    /// which are i.i.d. standard normal.
    pub fn projections_on_axis(&self, axis: usize) -> Vec<f64> {
        self.frequencies().map(|w| w[axis]).collect()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            bail!(
                InvalidArgument,
                "point has dimension {}, basis expects {}",
                x.len(),
                self.dim
            );
        }
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The random feature vector `z(x)`: `D` (cos, sin) pairs scaled by `1/√D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn squared_norm(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        dot(&self.0, &other.0)
    }
}

pub fn feature_map(x: &[f64], basis: &FrequencyBasis) -> Result<FeatureVector> {
    basis.check_point(x)?;
    let scale = 1.0 / sqrt(basis.count as f64);
    let mut values = Vec::with_capacity(2 * basis.count);
    for w in basis.frequencies() {
        let (s, c) = sincos(dot(w, x));
        values.push(c * scale);
        values.push(s * scale);
    }
    Ok(FeatureVector(values))
}

/// RFF estimate `⟨z(x), z(y)⟩` of the Gaussian kernel.
pub fn approx_kernel(x: &[f64], y: &[f64], basis: &FrequencyBasis) -> Result<f64> {
    let zx = feature_map(x, basis)?;
    let zy = feature_map(y, basis)?;
    Ok(zx.dot(&zy))
}

/// The same estimate written as the cosine average `D⁻¹ Σ cos ωᵢᵀΔ`.
pub fn cosine_average(delta: &[f64], basis: &FrequencyBasis) -> Result<f64> {
    basis.check_point(delta)?;
    let total: f64 = basis.frequencies().map(|w| cos(dot(w, delta))).sum();
    Ok(total / basis.count as f64)
}

/// Gaussian kernel as a function of the distance `r = ‖Δ‖₂`.
pub fn gaussian_kernel(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        bail!(InvalidArgument, "distance must be nonnegative, got {r}");
    }
    Ok(gaussian(r))
}

#[inline]
pub(crate) fn gaussian(r: f64) -> f64 {
    exp(-0.5 * r * r)
}

/// Gaussian kernel between two points.
pub fn gaussian_kernel_points(x: &[f64], y: &[f64]) -> f64 {
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    exp(-0.5 * sq)
}

/// One-dimensional view of the error at distance `r`: along any direction,
/// `ωᵢᵀΔ` has the law of `αᵢ r` with `αᵢ ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProjection {
    alphas: Vec<f64>,
    r: f64,
    r_max: f64,
}

impl RadialProjection {
    pub fn new(alphas: Vec<f64>, r: f64, r_max: f64) -> Result<Self> {
        if alphas.is_empty() {
            bail!(
                InvalidArgument,
                "radial projection needs at least one alpha"
            );
        }
        if !(r >= 0.0 && r <= r_max) {
            bail!(
                InvalidArgument,
                "radius must satisfy 0 <= r <= R, got r={r}, R={r_max}"
            );
        }
        Ok(Self { alphas, r, r_max })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }
}

/// `f(r) = D⁻¹ Σ cos(αᵢ r) − exp(−r²/2)`, always in `[−2, 2]`.
pub fn radial_error(proj: &RadialProjection) -> f64 {
    radial_error_at(&proj.alphas, proj.r)
}

#[inline]
pub fn radial_error_at(alphas: &[f64], r: f64) -> f64 {
    radial_estimate(alphas, r) - gaussian(r)
}

/// `s(r) = D⁻¹ Σ cos(αᵢ r)`.
#[inline]
pub fn radial_estimate(alphas: &[f64], r: f64) -> f64 {
    alphas.iter().map(|a| cos(a * r)).sum::<f64>() / alphas.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_frequencies(3, 5, 42).unwrap();
        let b = sample_frequencies(3, 5, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count(), 5);
        assert_eq!(a.frequencies().count(), 5);
        assert!(a.frequencies().all(|w| w.len() == 3));
        assert_ne!(a, sample_frequencies(3, 5, 43).unwrap());
    }

    #[test]
    fn sampling_single_draw_shape() {
        let b = sample_frequencies(1, 1, 0).unwrap();
        assert_eq!(b.frequencies().count(), 1);
        assert_eq!(b.frequency(0).len(), 1);
        assert!(b.frequency(0)[0].is_finite());
    }

    #[test]
    fn sampling_rejects_zero_sizes() {
        assert!(matches!(
            sample_frequencies(0, 3, 1),
            Err(crate::Error::InvalidArgument(_))
        ));
        assert!(sample_frequencies(3, 0, 1).is_err());
    }

    #[test]
    fn sampled_moments_match_standard_normal() {
        let count = 100_000;
        let b = sample_frequencies(2, count, 7).unwrap();
        let tol = 4.0 / sqrt(count as f64);
        for axis in 0..2 {
            let xs = b.projections_on_axis(axis);
            let mean = xs.iter().sum::<f64>() / count as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
            assert!(mean.abs() < 0.02 && mean.abs() < tol, "mean {mean}");
            assert!((var - 1.0).abs() < 0.02, "var {var}");
        }
    }

    #[test]
    fn feature_vector_has_unit_norm() {
        let b = sample_frequencies(4, 33, 9).unwrap();
        for x in [[0.0; 4], [1.0, -2.0, 0.5, 3.0], [10.0, 10.0, -10.0, 0.1]] {
            let z = feature_map(&x, &b).unwrap();
            assert_eq!(z.values().len(), 66);
            assert!((z.squared_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn feature_map_special_angles() {
        let zero = FrequencyBasis::from_vectors(2, &[vec![0.0, 0.0]]).unwrap();
        let z = feature_map(&[3.0, -1.0], &zero).unwrap();
        assert_eq!(z.values(), &[1.0, 0.0]);

        let quarter = FrequencyBasis::from_vectors(1, &[vec![PI / 2.0]]).unwrap();
        let z = feature_map(&[1.0], &quarter).unwrap();
        assert!(z.values()[0].abs() < 1e-15);
        assert!((z.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let b = sample_frequencies(3, 4, 1).unwrap();
        assert!(feature_map(&[1.0, 2.0], &b).is_err());
        assert!(approx_kernel(&[1.0, 2.0, 3.0], &[1.0], &b).is_err());
    }

    #[test]
    fn approx_kernel_edge_cases() {
        let b = sample_frequencies(3, 50, 5).unwrap();
        let x = [0.3, -1.2, 2.0];
        assert!((approx_kernel(&x, &x, &b).unwrap() - 1.0).abs() < 1e-12);

        let half_turn = FrequencyBasis::from_vectors(1, &[vec![PI]]).unwrap();
        let v = approx_kernel(&[1.0], &[0.0], &half_turn).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_kernel_values() {
        assert_eq!(gaussian_kernel(0.0).unwrap(), 1.0);
        assert!((gaussian_kernel(1.0).unwrap() - 0.606_530_7).abs() < 1e-7);
        assert!((gaussian_kernel(3.0).unwrap() - 0.011_109_0).abs() < 1e-7);
        assert!(gaussian_kernel(-0.1).is_err());
    }

    #[test]
    fn radial_error_values() {
        let p = RadialProjection::new(vec![0.3, -2.0, 1.7], 0.0, 1.0).unwrap();
        assert_eq!(radial_error(&p), 0.0);
        let p = RadialProjection::new(vec![PI], 1.0, 1.0).unwrap();
        assert!((radial_error(&p) + 1.606_530_7).abs() < 1e-7);
        assert!(RadialProjection::new(vec![1.0], 2.0, 1.0).is_err());
        assert!(RadialProjection::new(vec![1.0], -0.5, 1.0).is_err());
    }

    #[test]
    fn radial_view_matches_points_view() {
        let b = sample_frequencies(4, 64, 11).unwrap();
        let alphas = b.projections_on_axis(0);
        for &r in &[0.0, 0.3, 1.0, 2.5, 7.0] {
            let x = [r + 0.5, 1.0, -2.0, 0.25];
            let y = [0.5, 1.0, -2.0, 0.25];
            let direct = approx_kernel(&x, &y, &b).unwrap() - gaussian_kernel(r).unwrap();
            let radial = radial_error(&RadialProjection::new(alphas.clone(), r, 7.0).unwrap());
            assert!((direct - radial).abs() < 1e-12, "r={r}");
        }
    }
}
