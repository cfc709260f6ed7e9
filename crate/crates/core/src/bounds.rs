//! Closed-form bounds on the uniform RFF approximation error.
//!
//! Upper bounds on `P[sup_{‖Δ‖≤R} |s(Δ) − k(Δ)| ≥ ε]` (the dimension-free one
//! and three covering/Rademacher-style competitors), Le Cam two-point lower
//! bounds, the bound on the expected supremum, and the inversions used by
//! the downstream applications. Values are never clipped to 1.

use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{cbrt, exp, expm1, ln, ln1p, powf, sqrt};
use crate::special::{gamma_fn, lambert_w0};
use crate::Result;

/// Parameters of a bound evaluation.
///
/// `features` is the number of cosine terms `D`; `dim` is the data dimension
/// `d`, which only the competitor bounds use. `sigma_p` is `√E‖ω‖²`, equal
/// to `√d` for the Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub r: f64,
    pub features: u64,
    pub dim: u32,
    pub eps: f64,
    pub delta: f64,
    pub tau: f64,
    pub sigma_p: f64,
}

impl BoundQuery {
    /// Query with `δ = 0.05`, `τ = 0` and `σ_P = √d`.
    pub fn new(r: f64, features: u64, dim: u32, eps: f64) -> Result<Self> {
        let q = Self {
            r,
            features,
            dim,
            eps,
            delta: 0.05,
            tau: 0.0,
            sigma_p: sqrt(dim as f64),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.tau = tau;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sigma_p(mut self, sigma_p: f64) -> Result<Self> {
        self.sigma_p = sigma_p;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            bail!(
                InvalidArgument,
                "R must be positive and finite, got {}",
                self.r
            );
        }
        if self.dim == 0 {
            bail!(InvalidArgument, "data dimension d must be >= 1");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            bail!(
                InvalidArgument,
                "epsilon must be positive, got {}",
                self.eps
            );
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!(
                InvalidArgument,
                "delta must lie in (0, 1), got {}",
                self.delta
            );
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            bail!(InvalidArgument, "tau must be nonnegative, got {}", self.tau);
        }
        if !(self.sigma_p >= 0.0 && self.sigma_p.is_finite()) {
            bail!(
                InvalidArgument,
                "sigma_P must be nonnegative, got {}",
                self.sigma_p
            );
        }
        Ok(())
    }
}

/// `3 R^{2/3} D^{−1/3} ε^{−2/3} exp(−Dε²/12)` for real `D ≥ 0`
/// (`+∞` at `D = 0`).
pub fn thm1_value(r: f64, features: f64, eps: f64) -> f64 {
    exp(thm1_log_value(r, features, eps))
}

fn thm1_log_value(r: f64, features: f64, eps: f64) -> f64 {
    if features <= 0.0 {
        return f64::INFINITY;
    }
    ln(3.0) + (2.0 * ln(r) - ln(features) - 2.0 * ln(eps)) / 3.0 - features * eps * eps / 12.0
}

/// Dimension-free upper bound on the probability of a uniform error `≥ ε`.
pub fn bound_thm1(q: &BoundQuery) -> f64 {
    thm1_value(q.r, q.features as f64, q.eps)
}

/// The two terms of the segment union bound and the segment count that
/// balances them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundDiagnostics {
    pub optimal_t: f64,
    /// `R²/(T²Dε²)`: Markov on the squared Lipschitz constant.
    pub term_variance: f64,
    /// `2T·exp(−Dε²/8)`: Hoeffding at the `T` segment centres.
    pub term_hoeffding: f64,
}

/// `(R²/(T²Dε²), 2T·exp(−Dε²/8))` at an arbitrary segment count `T`.
pub fn thm1_terms(r: f64, features: f64, eps: f64, t: f64) -> (f64, f64) {
    let x = features * eps * eps;
    (r * r / (t * t * x), 2.0 * t * exp(-x / 8.0))
}

pub fn thm1_diagnostics(q: &BoundQuery) -> BoundDiagnostics {
    let d = q.features as f64;
    let x = d * q.eps * q.eps;
    // d/dT [a/T² + bT] = 0  ⇒  T = (2a/b)^{1/3}
    let optimal_t = cbrt(q.r * q.r / x) * exp(x / 24.0);
    let (term_variance, term_hoeffding) = thm1_terms(q.r, d, q.eps, optimal_t);
    BoundDiagnostics {
        optimal_t,
        term_variance,
        term_hoeffding,
    }
}

/// `ε` at which the dimension-free bound promises failure probability
/// `≤ e^{−τ}`: `√(8 ln R + 12τ + 4 ln(27/4) + 4)/√D`.
///
/// The promise holds when `Dε² ≥ 4/e`; below that the closed form is not
/// conservative.
pub fn epsilon_at_confidence_thm1(r: f64, features: u64, tau: f64) -> Result<f64> {
    if !(r > 0.0) || features == 0 || !(tau >= 0.0) {
        bail!(InvalidArgument, "need R > 0, D >= 1, tau >= 0");
    }
    let radicand = 8.0 * ln(r) + 12.0 * tau + 4.0 * ln(27.0 / 4.0) + 4.0;
    if radicand < 0.0 {
        bail!(
            Domain,
            "8 ln R + 12 tau + 4 ln(27/4) + 4 = {radicand} is negative (R too small)"
        );
    }
    Ok(sqrt(radicand / features as f64))
}

/// The Rademacher-complexity competitor written as a threshold at
/// confidence `e^{−τ}`.
pub fn epsilon_at_confidence_sriperumbudur(
    r: f64,
    features: u64,
    dim: u32,
    sigma_p: f64,
    tau: f64,
) -> Result<f64> {
    if !(r > 0.0) || features == 0 || dim == 0 || !(tau >= 0.0) || !(sigma_p >= 0.0) {
        bail!(
            InvalidArgument,
            "need R > 0, D >= 1, d >= 1, sigma_P >= 0, tau >= 0"
        );
    }
    let d = dim as f64;
    let l = ln1p(2.0 * r);
    let num = sqrt(2048.0 * d * l)
        + sqrt(2048.0 * d * ln1p(sigma_p))
        + sqrt(512.0 * d / l)
        + sqrt(2.0 * tau);
    Ok(num / sqrt(features as f64))
}

/// `256 (σ_P R/ε)² exp(−Dε²/(4(d+2)))`.
pub fn bound_rahimi(q: &BoundQuery) -> f64 {
    covering_bound(q, 256.0, 4.0)
}

/// `66 (σ_P R/ε)² exp(−Dε²/(8(d+2)))`. Here `D` counts cosine terms, as
/// everywhere in this crate; the original counts features as `D/2`.
pub fn bound_sutherland(q: &BoundQuery) -> f64 {
    covering_bound(q, 66.0, 8.0)
}

fn covering_bound(q: &BoundQuery, prefactor: f64, rate: f64) -> f64 {
    let ratio = q.sigma_p * q.r / q.eps;
    let d = q.dim as f64;
    prefactor * ratio * ratio * exp(-(q.features as f64) * q.eps * q.eps / (rate * (d + 2.0)))
}

/// A bound that may overflow: its natural log and its (possibly infinite)
/// value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBound {
    pub log_value: f64,
    pub value: f64,
}

/// `((σ_P+1)(2R+1))^{1024d} exp(−Dε²/2 + 256d/ln(2R+1))`, in log space.
pub fn bound_sriperumbudur(q: &BoundQuery) -> Result<LogBound> {
    if !(q.r > 0.0) {
        bail!(Domain, "R must be positive, got {}", q.r);
    }
    let d = q.dim as f64;
    let l = ln1p(2.0 * q.r);
    let log_value = 1024.0 * d * (ln1p(q.sigma_p) + l) - q.features as f64 * q.eps * q.eps / 2.0
        + 256.0 * d / l;
    Ok(LogBound {
        log_value,
        value: exp(log_value),
    })
}

/// Constants of the two-point construction and the maximizing pair for a
/// given radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeCamConstants {
    /// `γ = −W(−e^{−2})`, the root in (0, 1) of `γ − ln γ = 2`.
    pub gamma: f64,
    /// `R* = √(−2 ln γ/(1 − γ))`.
    pub r_star: f64,
    pub delta1_norm: f64,
    pub delta2_norm: f64,
    /// `‖Δ₁‖²/‖Δ₂‖²`, equal to `γ`.
    pub rho: f64,
}

fn gamma_constant() -> f64 {
    // -e^{-2} is well inside the principal branch's domain.
    -lambert_w0(-exp(-2.0)).expect("lambert_w0 at -e^-2")
}

fn r_star_from(gamma: f64) -> f64 {
    sqrt(-2.0 * ln(gamma) / (1.0 - gamma))
}

/// The constants with the pair that is optimal for every `R ≥ R*`.
pub fn lecam_constants() -> LeCamConstants {
    let gamma = gamma_constant();
    let r_star = r_star_from(gamma);
    pair(gamma, r_star, r_star)
}

/// The constants with the pair optimal at radius `r`: `‖Δ₂‖ = min(R, R*)`,
/// `‖Δ₁‖ = √γ·‖Δ₂‖`.
pub fn lecam_constants_for(r: f64) -> Result<LeCamConstants> {
    if !(r > 0.0) {
        bail!(InvalidArgument, "R must be positive, got {r}");
    }
    let gamma = gamma_constant();
    let r_star = r_star_from(gamma);
    Ok(pair(gamma, r_star, r.min(r_star)))
}

fn pair(gamma: f64, r_star: f64, outer: f64) -> LeCamConstants {
    LeCamConstants {
        gamma,
        r_star,
        delta1_norm: sqrt(gamma) * outer,
        delta2_norm: outer,
        rho: gamma,
    }
}

/// `g(R) = e^{−γR²/2} − e^{−R²/2}` for `R < R*`, constant beyond.
pub fn g_of_r(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        bail!(InvalidArgument, "R must be positive, got {r}");
    }
    let gamma = gamma_constant();
    let rr = r.min(r_star_from(gamma));
    let x = rr * rr / 2.0;
    Ok(expm1(-gamma * x) - expm1(-x))
}

/// Minimax lower bound on the expected error at a single point:
/// `g(R)/8 · e^{−D/2}`.
pub fn lower_bound_expected(r: f64, features: u64) -> Result<f64> {
    Ok(g_of_r(r)? / 8.0 * exp(-(features as f64) / 2.0))
}

/// Minimax lower bound on `P[|θ̂ − k| > ε]`: `(g(R) − ε)/8 · e^{−D/2}`,
/// valid when `g(R) ≥ 3ε`.
pub fn lower_bound_probability(r: f64, features: u64, eps: f64) -> Result<f64> {
    let g = probability_precondition(r, eps)?;
    Ok((g - eps) / 8.0 * exp(-(features as f64) / 2.0))
}

/// The same quantity as the derivation actually produces it,
/// `(g(R) − ε)/48 · e^{−D/2}`; six times smaller than the stated form.
pub fn lower_bound_probability_proof_chain(r: f64, features: u64, eps: f64) -> Result<f64> {
    let g = probability_precondition(r, eps)?;
    Ok((g - eps) / 48.0 * exp(-(features as f64) / 2.0))
}

fn probability_precondition(r: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        bail!(InvalidArgument, "epsilon must be positive, got {eps}");
    }
    let g = g_of_r(r)?;
    if g < 3.0 * eps {
        bail!(
            Precondition,
            "requires g(R) >= 3 epsilon: g(R) = {g}, so epsilon must be <= {}",
            g / 3.0
        );
    }
    Ok(g)
}

/// `3^{1/6} Γ(1/6) / 2^{2/3}`.
pub fn expected_sup_constant() -> f64 {
    powf(3.0, 1.0 / 6.0) * gamma_fn(1.0 / 6.0).expect("gamma at 1/6") / powf(2.0, 2.0 / 3.0)
}

/// Bound on `E sup |s − k|` over the ball: `3^{1/6}Γ(1/6)R^{2/3}/(2^{2/3}√D)`.
pub fn expected_sup_bound(r: f64, features: u64) -> f64 {
    expected_sup_constant() * cbrt(r * r) / sqrt(features as f64)
}

/// `KL(N(0, ρσ²I_D) ‖ N(0, σ²I_D)) = (D/2)(ρ − ln ρ − 1)`.
pub fn kl_scaled_isotropic(rho: f64, features: u64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        bail!(
            InvalidArgument,
            "variance ratio must be positive, got {rho}"
        );
    }
    let u = rho - 1.0;
    Ok(features as f64 / 2.0 * (u - ln1p(u)).max(0.0))
}

const MAX_FEATURES: u64 = 1 << 60;

/// Smallest `D` with `bound_thm1(R, D, ε) ≤ δ`. The bound is strictly
/// decreasing in `D`, so exponential search plus bisection is exact.
pub fn invert_bound_for_d(r: f64, eps: f64, delta: f64) -> Result<u64> {
    if !(r > 0.0) || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
        bail!(InvalidArgument, "need R > 0, epsilon > 0, 0 < delta < 1");
    }
    let ok = |d: u64| thm1_value(r, d as f64, eps) <= delta;
    let mut hi = 1u64;
    while !ok(hi) {
        if hi >= MAX_FEATURES {
            return Err(crate::Error::Convergence {
                what: "feature count search",
                achieved: thm1_value(r, hi as f64, eps),
                target: delta,
            });
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: !ok(lo) (or lo == 0), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Kernel error that keeps the ridge regression prediction error below
/// `ε`: `λ²ε/((λ+1)m)`.
pub fn krr_kernel_tolerance(lambda: f64, m: f64, eps: f64) -> f64 {
    lambda * lambda * eps / ((lambda + 1.0) * m)
}

/// Features needed so that ridge predictions are within `ε` with
/// probability `1 − δ`.
pub fn krr_required_features(lambda: f64, m: f64, eps: f64, delta: f64, r: f64) -> Result<u64> {
    if !(lambda > 0.0) || !(m > 0.0) || !(eps > 0.0) {
        bail!(InvalidArgument, "need lambda > 0, m > 0, epsilon > 0");
    }
    invert_bound_for_d(r, krr_kernel_tolerance(lambda, m, eps), delta)
}

/// SVM decision-value error when every kernel entry is off by at most `ε`:
/// `√2 C₀ (n+√n)^{1/4} ε^{1/4} + C₀ (n+√n)^{1/2} ε^{1/2}`.
pub fn svm_error_propagation(c0: f64, n: u64, eps: f64) -> f64 {
    let m = n as f64 + sqrt(n as f64);
    core::f64::consts::SQRT_2 * c0 * sqrt(sqrt(m * eps)) + c0 * sqrt(m * eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBudget {
    /// Smallest `ε` with `bound_thm1(R, D, ε) ≤ δ`.
    pub epsilon: f64,
    /// `√(W(R²/δ³)/D)`: the asymptotic order with its constant set to 1.
    pub theta_form_unit_constant: f64,
}

/// Smallest `ε` with `bound_thm1(R, D, ε) ≤ δ`. The bound is strictly
/// decreasing in `ε`, so doubling and bisection converge to it.
pub fn invert_bound_for_epsilon(r: f64, features: u64, delta: f64) -> Result<f64> {
    if !(r > 0.0) || features == 0 || !(delta > 0.0 && delta < 1.0) {
        bail!(InvalidArgument, "need R > 0, D >= 1, 0 < delta < 1");
    }
    let d = features as f64;
    let ok = |e: f64| thm1_value(r, d, e) <= delta;
    let mut hi = 1.0 / sqrt(d);
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while ok(lo) {
        hi = lo;
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn svm_epsilon_budget(r: f64, features: u64, delta: f64) -> Result<EpsilonBudget> {
    let epsilon = invert_bound_for_epsilon(r, features, delta)?;
    let w = lambert_w0(r * r / (delta * delta * delta))?;
    Ok(EpsilonBudget {
        epsilon,
        theta_form_unit_constant: sqrt(w / features as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub name: &'static str,
    pub kind: BoundKind,
    pub value: f64,
    pub log_value: f64,
}

pub const THM1: &str = "thm1";
pub const RAHIMI: &str = "rahimi";
pub const SUTHERLAND: &str = "sutherland";
pub const SRIPERUMBUDUR: &str = "sriperumbudur";
pub const LOWER_EXPECTED: &str = "lower_expected";
pub const LOWER_PROB: &str = "lower_prob";

/// All four upper bounds, the expected-error lower bound, and the
/// probability lower bound when `g(R) ≥ 3ε`.
pub fn compare_bounds(q: &BoundQuery) -> Result<Vec<BoundRow>> {
    q.validate()?;
    let d = q.features as f64;
    let upper = |name, log_value: f64| BoundRow {
        name,
        kind: BoundKind::Upper,
        value: exp(log_value),
        log_value,
    };
    let mut rows = Vec::with_capacity(6);
    rows.push(upper(THM1, thm1_log_value(q.r, d, q.eps)));
    rows.push(upper(RAHIMI, ln(bound_rahimi(q))));
    rows.push(upper(SUTHERLAND, ln(bound_sutherland(q))));
    rows.push(upper(SRIPERUMBUDUR, bound_sriperumbudur(q)?.log_value));
    // Logs are formed directly so they stay finite when e^{−D/2} underflows.
    let lower = |name, value: f64, log_value: f64| BoundRow {
        name,
        kind: BoundKind::Lower,
        value,
        log_value,
    };
    let g = g_of_r(q.r)?;
    rows.push(lower(
        LOWER_EXPECTED,
        lower_bound_expected(q.r, q.features)?,
        ln(g / 8.0) - d / 2.0,
    ));
    if let Ok(v) = lower_bound_probability(q.r, q.features, q.eps) {
        rows.push(lower(LOWER_PROB, v, ln((g - q.eps) / 8.0) - d / 2.0));
    }
    Ok(rows)
}

/// Natural log of `1e-100`. Above this level the dimension-free bound is
/// below the Sriperumbudur bound for every `d ≥ 1`, `R ≥ 1`; the steeper
/// exponent of the latter only wins once both are under about `e^{−400}`.
pub const TIGHTNESS_FLOOR_LOG: f64 = -230.258_509_299_404_6;

/// True when the dimension-free bound is strictly below every competitor.
pub fn thm1_is_tightest(rows: &[BoundRow]) -> bool {
    let Some(ours) = rows.iter().find(|r| r.name == THM1) else {
        return false;
    };
    rows.iter()
        .filter(|r| r.kind == BoundKind::Upper && r.name != THM1)
        .all(|r| ours.log_value < r.log_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::E;

    fn q(r: f64, d: u64, dim: u32, eps: f64) -> BoundQuery {
        BoundQuery::new(r, d, dim, eps).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::new(0.0, 10, 1, 0.1).is_err());
        assert!(BoundQuery::new(1.0, 10, 0, 0.1).is_err());
        assert!(BoundQuery::new(1.0, 10, 1, 0.0).is_err());
        assert!(q(1.0, 10, 1, 0.1).with_delta(1.0).is_err());
        assert!(q(1.0, 10, 1, 0.1).with_tau(-1.0).is_err());
        assert_eq!(q(1.0, 10, 4, 0.1).sigma_p, 2.0);
    }

    #[test]
    fn thm1_anchor_values() {
        // R² = Dε² makes the prefactor exactly 3.
        let v = bound_thm1(&q(10.0, 10_000, 1, 0.1));
        assert!((v - 3.0 * exp(-25.0 / 3.0)).abs() < 1e-15);
        assert!((v - 7.21e-4).abs() < 1e-6);
        let v = bound_thm1(&q(1.0, 100, 1, 0.1));
        assert!((v - 3.0 * exp(-1.0 / 12.0)).abs() < 1e-14);
        assert!((v - 2.7601).abs() < 1e-4);
    }

    #[test]
    fn thm1_homogeneity_in_r() {
        for &(r, d, e) in &[(1.0, 100, 0.1), (0.3, 5000, 0.05), (2.0, 7, 1.3)] {
            let a = bound_thm1(&q(r, d, 1, e));
            let b = bound_thm1(&q(8.0 * r, d, 1, e));
            assert!(rel(b, 4.0 * a) < 1e-14);
        }
        assert_eq!(thm1_value(1.0, 0.0, 0.1), f64::INFINITY);
    }

    #[test]
    fn diagnostics_anchor() {
        let dg = thm1_diagnostics(&q(1.0, 100, 1, 0.1));
        assert!((dg.optimal_t - exp(1.0 / 24.0)).abs() < 1e-14);
        assert!((dg.optimal_t - 1.04255).abs() < 1e-4);
        let sum = dg.term_variance + dg.term_hoeffding;
        assert!(rel(sum, bound_thm1(&q(1.0, 100, 1, 0.1))) < 1e-12);
    }

    #[test]
    fn diagnostics_match_golden_section() {
        let phi = (sqrt(5.0) - 1.0) / 2.0;
        for &(r, d, e) in &[(1.0, 100u64, 0.1), (10.0, 10_000, 0.1), (3.0, 500, 0.2)] {
            let f = |t: f64| {
                let (a, b) = thm1_terms(r, d as f64, e, t);
                a + b
            };
            let (mut lo, mut hi) = (1e-6, 1e6);
            for _ in 0..400 {
                let x1 = hi - phi * (hi - lo);
                let x2 = lo + phi * (hi - lo);
                if f(x1) < f(x2) {
                    hi = x2;
                } else {
                    lo = x1;
                }
            }
            let t = 0.5 * (lo + hi);
            let dg = thm1_diagnostics(&q(r, d, 1, e));
            assert!(rel(t, dg.optimal_t) < 1e-3);
        }
    }

    #[test]
    fn epsilon_inversion_anchor_and_scaling() {
        let e = epsilon_at_confidence_thm1(1.0, 100, 0.0).unwrap();
        assert!((e - sqrt(4.0 * ln(6.75) + 4.0) / 10.0).abs() < 1e-15);
        assert!((e - 0.341148).abs() < 1e-5);
        let e4 = epsilon_at_confidence_thm1(1.0, 400, 0.0).unwrap();
        assert!(rel(e4, e / 2.0) < 1e-15);
        assert!(matches!(
            epsilon_at_confidence_thm1(1e-3, 100, 0.0),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn epsilon_inversion_is_conservative_when_not_tiny() {
        for &r in &[1.0, 2.0, 10.0, 100.0] {
            for &d in &[10u64, 100, 10_000] {
                for i in 0..=20 {
                    let tau = i as f64;
                    let e = epsilon_at_confidence_thm1(r, d, tau).unwrap();
                    if d as f64 * e * e >= 1.5 {
                        assert!(thm1_value(r, d as f64, e) <= exp(-tau) * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn competitor_anchor_values() {
        let base = q(1.0, 0, 2, 1.0);
        assert!((bound_rahimi(&base) - 512.0).abs() < 1e-12);
        assert!((bound_sutherland(&base) - 132.0).abs() < 1e-12);
        assert!((bound_rahimi(&q(1.0, 16, 2, 1.0)) - 512.0 / E).abs() < 1e-12);
        assert!((bound_sutherland(&q(1.0, 32, 2, 1.0)) - 132.0 / E).abs() < 1e-12);
        let big = q(4.0, 16, 2, 1.0);
        assert!(rel(bound_rahimi(&big), 16.0 * bound_rahimi(&q(1.0, 16, 2, 1.0))) < 1e-14);
        for &(r, e, dim) in &[(1.0, 1.0, 1u32), (3.0, 0.2, 5)] {
            let qq = q(r, 0, dim, e);
            assert!(rel(bound_sutherland(&qq) / bound_rahimi(&qq), 66.0 / 256.0) < 1e-14);
        }
    }

    #[test]
    fn sriperumbudur_log_space() {
        let l3 = ln(3.0);
        let eps = 0.1;
        let d = (2.0 * 256.0 / l3 / (eps * eps)).round() as u64;
        let qq = q(1.0, d, 1, eps).with_sigma_p(1.0).unwrap();
        let lb = bound_sriperumbudur(&qq).unwrap();
        let expected = 1024.0 * ln(6.0) - d as f64 * eps * eps / 2.0 + 256.0 / l3;
        assert!((lb.log_value - expected).abs() < 1e-9);
        assert!((lb.log_value - 1024.0 * ln(6.0)).abs() < 0.01);
        assert_eq!(lb.value, f64::INFINITY);
        let mut prev = f64::NEG_INFINITY;
        for dim in 1..10 {
            let v = bound_sriperumbudur(&q(2.0, 1000, dim, 0.5))
                .unwrap()
                .log_value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn lecam_constants_identities() {
        let c = lecam_constants();
        assert!((c.gamma - 0.158594).abs() < 1e-5);
        assert!((c.gamma - 0.158_594_339_563_039).abs() < 1e-14);
        assert!((c.r_star - 2.092_122_065_958_14).abs() < 1e-13);
        assert!((c.gamma - ln(c.gamma) - 2.0).abs() < 1e-12);
        assert!((c.r_star - 2.0922).abs() < 1e-3);
        assert!((c.r_star * c.r_star + 2.0 * ln(c.gamma) / (1.0 - c.gamma)).abs() < 1e-12);
        assert!((c.rho - ln(c.rho) - 1.0 - 1.0).abs() < 1e-10);
        assert!(
            rel(
                c.delta1_norm * c.delta1_norm / (c.delta2_norm * c.delta2_norm),
                c.gamma
            ) < 1e-14
        );
        let small = lecam_constants_for(1.0).unwrap();
        assert_eq!(small.delta2_norm, 1.0);
        assert_eq!(lecam_constants_for(5.0).unwrap().delta2_norm, c.r_star);
    }

    #[test]
    fn g_values() {
        let c = lecam_constants();
        assert!(g_of_r(1e-9).unwrap() < 1e-17);
        let g1 = g_of_r(1.0).unwrap();
        assert!((g1 - (exp(-c.gamma / 2.0) - exp(-0.5))).abs() < 1e-15);
        assert!((g1 - 0.317235).abs() < 1e-4);
        let ginf = g_of_r(10.0).unwrap();
        assert!((ginf - 0.594691).abs() < 1e-4);
        assert!((ginf - 0.594_661_412_850_029).abs() < 1e-14);
        assert_eq!(g_of_r(c.r_star).unwrap(), ginf);
        assert!((g_of_r(c.r_star * (1.0 - 1e-12)).unwrap() - ginf).abs() < 1e-10);
        assert!(g_of_r(0.0).is_err());
    }

    #[test]
    fn lower_bounds() {
        let c = lecam_constants();
        // Frozen from a 30-digit evaluation of γ = −W(−e⁻²).
        let v = lower_bound_expected(3.0, 2).unwrap();
        assert!((v - 0.027_345_463_530_686_1).abs() < 1e-14);
        assert!((v - 0.027347).abs() < 1e-5);
        assert!(lower_bound_expected(3.0, 4).unwrap() < v);
        assert!(lower_bound_expected(1.0, 2).unwrap() <= v);

        let g = g_of_r(c.r_star + 1.0).unwrap();
        let p = lower_bound_probability(c.r_star + 1.0, 2, g / 3.0).unwrap();
        assert!((p - 0.018232).abs() < 1e-5);
        assert!((p - 0.018_230_309_020_457_4).abs() < 1e-14);
        let tiny = lower_bound_probability(3.0, 2, 1e-12).unwrap();
        assert!((tiny - v).abs() < 1e-12);
        assert!(matches!(
            lower_bound_probability(3.0, 2, g / 3.0 * (1.0 + 1e-9)),
            Err(crate::Error::Precondition(_))
        ));
        let chain = lower_bound_probability_proof_chain(3.0, 2, 0.1).unwrap();
        assert!(rel(6.0 * chain, lower_bound_probability(3.0, 2, 0.1).unwrap()) < 1e-14);
    }

    #[test]
    fn expected_sup_constant_and_scaling() {
        assert!((expected_sup_constant() - 4.21114).abs() < 1e-4);
        assert!((expected_sup_bound(1.0, 100) - 0.421114).abs() < 1e-4);
        assert!(
            rel(
                expected_sup_bound(2.0, 400),
                expected_sup_bound(2.0, 100) / 2.0
            ) < 1e-14
        );
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_scaled_isotropic(1.0, 7).unwrap(), 0.0);
        let v = kl_scaled_isotropic(0.5, 10).unwrap();
        assert!((v - 5.0 * (0.5 + ln(2.0) - 1.0)).abs() < 1e-14);
        assert!((v - 0.965736).abs() < 1e-5);
        let g = lecam_constants().gamma;
        assert!((kl_scaled_isotropic(g, 6).unwrap() - 3.0).abs() < 1e-10);
        assert!(kl_scaled_isotropic(0.0, 1).is_err());
    }

    #[test]
    fn feature_inversion_is_minimal() {
        let d = invert_bound_for_d(10.0, 0.1, 7.3e-4).unwrap();
        assert!(d <= 10_000);
        assert!(thm1_value(10.0, d as f64, 0.1) <= 7.3e-4);
        assert!(thm1_value(10.0, (d - 1) as f64, 0.1) > 7.3e-4);
        assert_eq!(
            krr_required_features(1.0, 1.0, 0.2, 7.3e-4, 10.0).unwrap(),
            d
        );
    }

    #[test]
    fn feature_inversion_scales_like_inverse_square() {
        for &r in &[1.0, 5.0, 20.0] {
            for &delta in &[0.1, 1e-3] {
                let a = invert_bound_for_d(r, 0.02, delta).unwrap() as f64;
                let b = invert_bound_for_d(r, 0.01, delta).unwrap() as f64;
                let ratio = a / b;
                assert!(
                    (0.24..=0.26).contains(&ratio),
                    "R={r} delta={delta}: {ratio}"
                );
            }
        }
    }

    #[test]
    fn svm_propagation_values() {
        assert_eq!(svm_error_propagation(1.0, 10, 0.0), 0.0);
        let v = svm_error_propagation(1.0, 1, 1.0);
        assert!((v - (sqrt(2.0) * powf(2.0, 0.25) + sqrt(2.0))).abs() < 1e-14);
        assert!((v - 3.09601).abs() < 1e-5);
    }

    #[test]
    fn svm_budget_minimality_and_theta_form() {
        let b = svm_epsilon_budget(1.0, 100, 0.1).unwrap();
        assert!(thm1_value(1.0, 100.0, b.epsilon) <= 0.1);
        assert!(thm1_value(1.0, 100.0, 0.999 * b.epsilon) > 0.1);
        assert!((b.theta_form_unit_constant - 0.22912).abs() < 1e-4);
        let b4 = svm_epsilon_budget(1.0, 400, 0.1).unwrap();
        assert!((b4.epsilon / b.epsilon - 0.5).abs() < 0.05);
    }

    #[test]
    fn comparison_table_schema() {
        let rows = compare_bounds(&q(3.0, 1000, 2, 0.1)).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(
            rows.iter().filter(|r| r.kind == BoundKind::Upper).count(),
            4
        );
        assert!(thm1_is_tightest(&rows));
        let rows = compare_bounds(&q(3.0, 1000, 2, 0.5)).unwrap();
        assert_eq!(rows.len(), 5);
    }

    #[test]
    fn sriperumbudur_looser_wherever_thm1_is_representable() {
        let mut tail = 0;
        for dim in [1u32, 2, 3, 5, 10] {
            for r in [1.0, 1.5, 2.0, 3.0, 5.0, 7.5, 10.0] {
                for features in [1u64, 10, 100, 1_000, 10_000, 100_000, 1_000_000] {
                    for eps in [1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0] {
                        let q = q(r, features, dim, eps)
                            .with_sigma_p(f64::from(dim).sqrt())
                            .unwrap();
                        let ours = thm1_log_value(r, features as f64, eps);
                        let theirs = bound_sriperumbudur(&q).unwrap().log_value;
                        if ours >= TIGHTNESS_FLOOR_LOG {
                            assert!(theirs > ours, "d={dim} R={r} D={features} eps={eps}");
                        } else if theirs < ours {
                            tail += 1;
                        }
                    }
                }
            }
        }
        // The competitor's exponent is steeper, so it does win far in the
        // tail.
        assert!(tail > 0);
    }

    #[test]
    fn lower_logs_survive_underflow() {
        let rows = compare_bounds(&q(10.0, 10_000, 1, 0.1)).unwrap();
        let g = g_of_r(10.0).unwrap();
        for r in rows.iter().filter(|r| r.kind == BoundKind::Lower) {
            assert_eq!(r.value, 0.0);
            assert!(r.log_value.is_finite());
        }
        let e = rows.iter().find(|r| r.name == LOWER_EXPECTED).unwrap();
        assert!((e.log_value - (ln(g / 8.0) - 5000.0)).abs() < 1e-9);
        let small = compare_bounds(&q(10.0, 20, 1, 0.1)).unwrap();
        for r in small.iter().filter(|r| r.kind == BoundKind::Lower) {
            assert!((r.log_value - ln(r.value)).abs() < 1e-12);
        }
    }
}
