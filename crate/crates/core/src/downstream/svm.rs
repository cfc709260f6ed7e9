use alloc::vec;
use alloc::vec::Vec;

use super::data::Dataset;
use super::kernel::{Embedding, KernelMode};
use super::krr::realized_kernel_error;
use crate::bounds::svm_error_propagation;
use crate::error::bail;
use crate::math::sqrt;
use crate::rff::{feature_map, gaussian_kernel_points, FrequencyBasis};
use crate::Error;
use crate::Result;

/// Largest training set accepted by [`svm_fit`].
pub const MAX_SVM_POINTS: usize = 500;
/// Coordinate sweeps allowed before giving up.
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;
const GAP_CHECK_EVERY: usize = 8;

/// Bias-free SVM `h(x) = ηᵀΦ(x)` minimizing
/// `½‖η‖² + (C₀/n) Σ max(0, 1 − yᵢ ηᵀΦ(xᵢ))`.
#[derive(Debug, Clone)]
pub struct SvmModel {
    c0: f64,
    alpha: Vec<f64>,
    solver_gap: f64,
    sweeps: usize,
    weights: Weights,
}

#[derive(Debug, Clone)]
enum Weights {
    /// `αᵢyᵢ` paired with the training points.
    Exact {
        coef: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    /// The explicit weight vector `η` over the random features.
    Rff {
        basis: FrequencyBasis,
        eta: Vec<f64>,
    },
}

impl SvmModel {
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Dual variables, each in `[0, C₀/n]`.
    pub fn dual(&self) -> &[f64] {
        &self.alpha
    }

    /// Certified primal minus dual objective at the returned solution.
    pub fn solver_gap(&self) -> f64 {
        self.solver_gap
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `η` in rff mode.
    pub fn weight_vector(&self) -> Option<&[f64]> {
        match &self.weights {
            Weights::Rff { eta, .. } => Some(eta),
            Weights::Exact { .. } => None,
        }
    }

    /// Bound on `|h(x) − h*(x)|` for the exact optimizer `h*`, valid at any
    /// `x` with `‖Φ(x)‖ = 1`: the primal is 1-strongly convex, so
    /// `‖η − η*‖ ≤ √(2·gap)`.
    pub fn prediction_slack(&self) -> f64 {
        sqrt(2.0 * self.solver_gap)
    }
}

pub fn svm_fit(data: &Dataset, c0: f64, mode: KernelMode<'_>, tol: f64) -> Result<SvmModel> {
    svm_fit_with_budget(data, c0, mode, tol, DEFAULT_MAX_SWEEPS)
}

/// Dual coordinate ascent on `max Σαᵢ − ½αᵀQα`, `0 ≤ αᵢ ≤ C₀/n`,
/// `Qᵢⱼ = yᵢyⱼk(xᵢ, xⱼ)`. Without a bias term there is no equality
/// constraint, so single coordinates can be optimized exactly.
pub fn svm_fit_with_budget(
    data: &Dataset,
    c0: f64,
    mode: KernelMode<'_>,
    tol: f64,
    max_sweeps: usize,
) -> Result<SvmModel> {
    if !data.has_binary_labels() {
        bail!(InvalidArgument, "SVM labels must be -1 or +1");
    }
    if data.len() > MAX_SVM_POINTS {
        bail!(
            InvalidArgument,
            "at most {MAX_SVM_POINTS} training points, got {}",
            data.len()
        );
    }
    if !(c0 > 0.0 && c0.is_finite()) || !(tol > 0.0) {
        bail!(InvalidArgument, "need C0 > 0 and tol > 0");
    }
    let n = data.len();
    let y = data.targets();
    let embedding = Embedding::new(data.points(), mode)?;
    let k = embedding.gram();
    let q = |i: usize, j: usize| y[i] * y[j] * k.get(i, j);
    let cap = c0 / n as f64;
    let mut alpha = vec![0.0; n];
    let mut qa = vec![0.0; n];
    let mut gap = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for i in 0..n {
            let qii = q(i, i);
            if qii <= 0.0 {
                continue;
            }
            let next = (alpha[i] + (1.0 - qa[i]) / qii).clamp(0.0, cap);
            let step = next - alpha[i];
            if step != 0.0 {
                alpha[i] = next;
                for (j, v) in qa.iter_mut().enumerate() {
                    *v += step * q(i, j);
                }
            }
        }
        if sweeps % GAP_CHECK_EVERY == 0 || sweeps == max_sweeps {
            gap = duality_gap(&embedding, &k, y, &alpha, cap);
            if gap <= tol {
                break;
            }
            // Refresh to keep rounding from accumulating.
            for (i, v) in qa.iter_mut().enumerate() {
                *v = (0..n).map(|j| q(i, j) * alpha[j]).sum();
            }
        }
    }
    if !(gap <= tol) {
        return Err(Error::Convergence {
            what: "SVM dual coordinate ascent",
            achieved: gap,
            target: tol,
        });
    }
    let weights = match embedding {
        Embedding::Exact(points) => Weights::Exact {
            coef: alpha.iter().zip(y).map(|(a, yi)| a * yi).collect(),
            points,
        },
        Embedding::Rff { basis, features } => Weights::Rff {
            eta: eta(&features, y, &alpha),
            basis,
        },
    };
    Ok(SvmModel {
        c0,
        alpha,
        solver_gap: gap,
        sweeps,
        weights,
    })
}

fn eta(features: &[crate::rff::FeatureVector], y: &[f64], alpha: &[f64]) -> Vec<f64> {
    let mut eta = vec![0.0; features[0].values().len()];
    for ((f, yi), a) in features.iter().zip(y).zip(alpha) {
        for (e, v) in eta.iter_mut().zip(f.values()) {
            *e += a * yi * v;
        }
    }
    eta
}

/// Primal minus dual objective. In rff mode the primal is evaluated on the
/// explicit weight vector.
fn duality_gap(
    embedding: &Embedding,
    k: &super::linalg::Matrix,
    y: &[f64],
    alpha: &[f64],
    cap: f64,
) -> f64 {
    let n = alpha.len();
    let (norm_sq, margins): (f64, Vec<f64>) = match embedding {
        Embedding::Exact(_) => {
            let beta: Vec<f64> = alpha.iter().zip(y).map(|(a, yi)| a * yi).collect();
            let h = k.mul_vec(&beta);
            let norm_sq = beta.iter().zip(&h).map(|(b, hi)| b * hi).sum();
            (norm_sq, h.iter().zip(y).map(|(hi, yi)| hi * yi).collect())
        }
        Embedding::Rff { features, .. } => {
            let eta = eta(features, y, alpha);
            let norm_sq = eta.iter().map(|e| e * e).sum();
            let margins = features
                .iter()
                .zip(y)
                .map(|(f, yi)| yi * f.values().iter().zip(&eta).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            (norm_sq, margins)
        }
    };
    let hinge: f64 = margins.iter().map(|m| (1.0 - m).max(0.0)).sum();
    let primal = 0.5 * norm_sq + cap * hinge;
    let dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
    debug_assert_eq!(margins.len(), n);
    (primal - dual).max(0.0)
}

pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<f64> {
    match &model.weights {
        Weights::Exact { coef, points } => {
            if x.len() != points[0].len() {
                bail!(
                    InvalidArgument,
                    "expected a {}-vector, got {}",
                    points[0].len(),
                    x.len()
                );
            }
            Ok(coef
                .iter()
                .zip(points)
                .map(|(c, p)| c * gaussian_kernel_points(p, x))
                .sum())
        }
        Weights::Rff { basis, eta } => {
            let z = feature_map(x, basis)?;
            Ok(z.values().iter().zip(eta).map(|(a, b)| a * b).sum())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmGapCheck {
    /// Realized max kernel-entry error.
    pub u: f64,
    /// `max_probe |ĥ(x) − h(x)|`.
    pub gap: f64,
    /// Propagation bound at `ε = u` for exact optimizers.
    pub propagation: f64,
    /// `2·max(√(2·gap_exact), √(2·gap_rff))`.
    pub slack: f64,
    pub bound: f64,
    pub holds: bool,
    pub solver_gap_exact: f64,
    pub solver_gap_rff: f64,
}

pub fn svm_gap_check(
    data: &Dataset,
    c0: f64,
    basis: &FrequencyBasis,
    probes: &[Vec<f64>],
    tol: f64,
) -> Result<SvmGapCheck> {
    if probes.is_empty() {
        bail!(InvalidArgument, "need at least one probe point");
    }
    let exact = svm_fit(data, c0, KernelMode::Exact, tol)?;
    let approx = svm_fit(data, c0, KernelMode::Rff(basis), tol)?;
    let mut gap: f64 = 0.0;
    for x in probes {
        gap = gap.max((svm_decision(&approx, x)? - svm_decision(&exact, x)?).abs());
    }
    let u = realized_kernel_error(data.points(), probes, basis)?;
    let propagation = svm_error_propagation(c0, data.len() as u64, u);
    let slack = 2.0 * exact.prediction_slack().max(approx.prediction_slack());
    let bound = propagation + slack;
    Ok(SvmGapCheck {
        u,
        gap,
        propagation,
        slack,
        bound,
        holds: gap <= bound,
        solver_gap_exact: exact.solver_gap,
        solver_gap_rff: approx.solver_gap,
    })
}
