use alloc::vec::Vec;

use super::data::Dataset;
use super::kernel::{Embedding, KernelMode};
use super::linalg::solve_spd;
use crate::error::bail;
use crate::rff::{feature_map, gaussian_kernel_points, FrequencyBasis};
use crate::Result;

/// Kernel ridge regression `h(x) = yᵀ(K + λI)⁻¹k_x`.
#[derive(Debug, Clone)]
pub struct KrrModel {
    lambda: f64,
    dual: Vec<f64>,
    m: f64,
    residual: f64,
    embedding: Embedding,
}

impl KrrModel {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(K + λI)⁻¹y`.
    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual
    }

    /// Population standard deviation of the training targets.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// `‖(K + λI)a − y‖/‖y‖` after the solve.
    pub fn relative_residual(&self) -> f64 {
        self.residual
    }

    pub fn is_rff(&self) -> bool {
        matches!(self.embedding, Embedding::Rff { .. })
    }
}

pub fn krr_fit(data: &Dataset, lambda: f64, mode: KernelMode<'_>) -> Result<KrrModel> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        bail!(InvalidArgument, "lambda must be positive, got {lambda}");
    }
    let embedding = Embedding::new(data.points(), mode)?;
    let mut a = embedding.gram();
    a.add_diagonal(lambda);
    let (dual, residual) = solve_spd(&a, data.targets())?;
    Ok(KrrModel {
        lambda,
        dual,
        m: data.target_std(),
        residual,
        embedding,
    })
}

pub fn krr_predict(model: &KrrModel, x: &[f64]) -> Result<f64> {
    let k = model.embedding.column(x)?;
    Ok(model.dual.iter().zip(&k).map(|(a, b)| a * b).sum())
}

/// `(λ + 1)·m·u/λ²`: the prediction gap implied by a kernel error of `u`.
pub fn krr_gap_bound(lambda: f64, m: f64, u: f64) -> f64 {
    (lambda + 1.0) * m * u / (lambda * lambda)
}

/// Largest `|k(x, y) − ŝ(x, y)|` over pairs of training points and over
/// training/probe pairs.
pub fn realized_kernel_error(
    train: &[Vec<f64>],
    probes: &[Vec<f64>],
    basis: &FrequencyBasis,
) -> Result<f64> {
    let zt = train
        .iter()
        .map(|p| feature_map(p, basis))
        .collect::<Result<Vec<_>>>()?;
    let mut u: f64 = 0.0;
    for (i, p) in train.iter().enumerate() {
        for j in 0..=i {
            u = u.max((gaussian_kernel_points(p, &train[j]) - zt[i].dot(&zt[j])).abs());
        }
    }
    for q in probes {
        let zq = feature_map(q, basis)?;
        for (p, zp) in train.iter().zip(&zt) {
            u = u.max((gaussian_kernel_points(p, q) - zp.dot(&zq)).abs());
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrrGapCheck {
    /// Realized max kernel-entry error.
    pub u: f64,
    pub m: f64,
    /// `max_probe |ĥ(x) − h(x)|`.
    pub gap: f64,
    /// `None` when the targets are constant.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
    pub residual_exact: f64,
    pub residual_rff: f64,
}

/// Fits both models and compares the realized prediction gap on the probes
/// with the gap implied by the realized kernel error.
pub fn krr_gap_check(
    data: &Dataset,
    lambda: f64,
    basis: &FrequencyBasis,
    probes: &[Vec<f64>],
) -> Result<KrrGapCheck> {
    if probes.is_empty() {
        bail!(InvalidArgument, "need at least one probe point");
    }
    let exact = krr_fit(data, lambda, KernelMode::Exact)?;
    let approx = krr_fit(data, lambda, KernelMode::Rff(basis))?;
    let mut gap: f64 = 0.0;
    for x in probes {
        gap = gap.max((krr_predict(&approx, x)? - krr_predict(&exact, x)?).abs());
    }
    let u = realized_kernel_error(data.points(), probes, basis)?;
    let m = exact.m;
    let bound = (m > 0.0).then(|| krr_gap_bound(lambda, m, u));
    Ok(KrrGapCheck {
        u,
        m,
        gap,
        bound,
        holds: bound.map(|b| gap <= b),
        residual_exact: exact.residual,
        residual_rff: approx.residual,
    })
}
