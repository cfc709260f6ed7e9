use alloc::vec;

use super::exec::run_indexed;
use super::stats::Moments;
use super::{block_count, block_len, Executor};
use crate::bounds::{g_of_r, kl_scaled_isotropic, lecam_constants_for};
use crate::error::bail;
use crate::math::{cos, exp, ln, sqrt};
use crate::rng::Stream;
use crate::special::{reg_lower_inc_gamma, reg_upper_inc_gamma};
use crate::Result;

/// `P_i = N(0, σᵢ² I_D)` for `i = 1, 2`, ordered so that `σ₁² ≤ σ₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointPair {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub features: u64,
    /// `KL(P₁ ‖ P₂)`.
    pub kl: f64,
    pub affinity: f64,
    pub k1: f64,
    pub k2: f64,
}

impl TwoPointPair {
    /// Swaps the variances if needed so that `σ₁² ≤ σ₂²`.
    pub fn new(sigma1_sq: f64, sigma2_sq: f64, features: u64) -> Result<Self> {
        let (s1, s2) = ordered(sigma1_sq, sigma2_sq, features)?;
        Ok(Self {
            sigma1_sq: s1,
            sigma2_sq: s2,
            features,
            kl: kl_scaled_isotropic(s1 / s2, features)?,
            affinity: affinity_closed(s1, s2, features)?,
            k1: exp(-s1 / 2.0),
            k2: exp(-s2 / 2.0),
        })
    }
}

fn ordered(s1: f64, s2: f64, features: u64) -> Result<(f64, f64)> {
    if !(s1 > 0.0 && s1.is_finite() && s2 > 0.0 && s2.is_finite()) {
        bail!(
            Domain,
            "variances must be positive and finite, got {s1} and {s2}"
        );
    }
    if features == 0 {
        bail!(InvalidArgument, "D must be >= 1");
    }
    Ok(if s1 <= s2 { (s1, s2) } else { (s2, s1) })
}

/// `(c/(2σ₂²), c/(2σ₁²))` where `c` is the squared radius at which the two
/// densities cross. Depends only on `ρ = σ₁²/σ₂² < 1`.
fn crossing(rho: f64, features: u64) -> (f64, f64) {
    let d = features as f64;
    let log_inv = -ln(rho);
    let outer = d * log_inv / (2.0 * (1.0 - rho));
    (rho * outer, outer)
}

/// `∫ min(p₁, p₂)` for two centred isotropic Gaussians, through the
/// chi-square distribution of `‖x‖²`.
pub fn affinity_closed(sigma1_sq: f64, sigma2_sq: f64, features: u64) -> Result<f64> {
    let (s1, s2) = ordered(sigma1_sq, sigma2_sq, features)?;
    if s1 == s2 {
        return Ok(1.0);
    }
    let half_d = features as f64 / 2.0;
    let (x2, x1) = crossing(s1 / s2, features);
    Ok(reg_lower_inc_gamma(half_d, x2)? + reg_upper_inc_gamma(half_d, x1)?)
}

/// A Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McValue {
    pub value: f64,
    pub stderr: f64,
}

impl McValue {
    fn from_moments(m: &Moments) -> Self {
        Self {
            value: m.mean,
            stderr: m.stderr(),
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        bail!(InvalidArgument, "samples must be >= 1");
    }
    Ok(())
}

/// `ln(p₁/p₂)` at a point with `‖x‖² = q`.
fn log_ratio(s1: f64, s2: f64, features: u64, q: f64) -> f64 {
    let rho = s1 / s2;
    -(features as f64) / 2.0 * ln(rho) - q / 2.0 * (1.0 / s1 - 1.0 / s2)
}

fn chi_square(stream: &mut Stream, features: u64) -> f64 {
    (0..features)
        .map(|_| {
            let z = stream.standard_normal();
            z * z
        })
        .sum()
}

/// `E_{P₂}[min(1, p₁/p₂)]`, sampled.
pub fn affinity_mc<E: Executor + ?Sized>(
    sigma1_sq: f64,
    sigma2_sq: f64,
    features: u64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<McValue> {
    let (s1, s2) = ordered(sigma1_sq, sigma2_sq, features)?;
    check_samples(samples)?;
    let blocks = run_indexed(exec, block_count(samples), |b| {
        let mut stream = Stream::new(seed, b as u64);
        let mut m = Moments::default();
        for _ in 0..block_len(samples, b) {
            let q = s2 * chi_square(&mut stream, features);
            let lr = log_ratio(s1, s2, features, q);
            m.push(if lr >= 0.0 { 1.0 } else { exp(lr) });
        }
        m
    });
    let mut total = Moments::default();
    blocks.iter().for_each(|m| total.merge(m));
    Ok(McValue::from_moments(&total))
}

/// Error sum `P₁(reject) + P₂(accept)` of the test that declares `P₂` when
/// `‖x‖² > threshold`. Draws from `P₁` use even streams and draws from `P₂`
/// odd ones, so every threshold sees the same samples.
pub fn threshold_test_error<E: Executor + ?Sized>(
    sigma1_sq: f64,
    sigma2_sq: f64,
    features: u64,
    threshold: f64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<McValue> {
    let (s1, s2) = ordered(sigma1_sq, sigma2_sq, features)?;
    check_samples(samples)?;
    if threshold.is_nan() {
        bail!(InvalidArgument, "threshold must not be NaN");
    }
    let blocks = run_indexed(exec, block_count(samples), |b| {
        let mut under_p1 = Stream::new(seed, 2 * b as u64);
        let mut under_p2 = Stream::new(seed, 2 * b as u64 + 1);
        let (mut m1, mut m2) = (Moments::default(), Moments::default());
        for _ in 0..block_len(samples, b) {
            let q1 = s1 * chi_square(&mut under_p1, features);
            let q2 = s2 * chi_square(&mut under_p2, features);
            m1.push(if q1 > threshold { 1.0 } else { 0.0 });
            m2.push(if q2 > threshold { 0.0 } else { 1.0 });
        }
        (m1, m2)
    });
    let (mut m1, mut m2) = (Moments::default(), Moments::default());
    for (a, b) in &blocks {
        m1.merge(a);
        m2.merge(b);
    }
    Ok(McValue {
        value: m1.mean + m2.mean,
        stderr: sqrt(m1.stderr() * m1.stderr() + m2.stderr() * m2.stderr()),
    })
}

/// Error sum of the likelihood-ratio test that declares `P₁` iff
/// `p₁ ≥ p₂`.
pub fn neyman_pearson_error<E: Executor + ?Sized>(
    sigma1_sq: f64,
    sigma2_sq: f64,
    features: u64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<McValue> {
    let (s1, s2) = ordered(sigma1_sq, sigma2_sq, features)?;
    let threshold = if s1 == s2 {
        // p₁ ≥ p₂ everywhere: the test never declares P₂.
        f64::INFINITY
    } else {
        let (_, x1) = crossing(s1 / s2, features);
        2.0 * s1 * x1
    };
    threshold_test_error(s1, s2, features, threshold, samples, seed, exec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeCamFloor {
    pub r: f64,
    pub features: u64,
    pub pair: TwoPointPair,
    /// `(g(R)/8)e^{−D/2}`.
    pub floor: f64,
    /// `|k₁ − k₂|·affinity/4`.
    pub intermediate: f64,
    /// `|k₁ − k₂|e^{−KL}/8`.
    pub kl_form: f64,
    /// `E|s(Δ₂) − k(Δ₂)|`, sampled.
    pub empirical: McValue,
    pub holds: bool,
}

/// Sampled expected error of the cosine-mean estimator at the outer point
/// of the two-point pair, next to the analytic floor.
pub fn lecam_floor_experiment<E: Executor + ?Sized>(
    r: f64,
    features: u64,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<LeCamFloor> {
    check_samples(trials)?;
    let c = lecam_constants_for(r)?;
    let pair = TwoPointPair::new(
        c.delta1_norm * c.delta1_norm,
        c.delta2_norm * c.delta2_norm,
        features,
    )?;
    let gap = (pair.k1 - pair.k2).abs();
    let floor = g_of_r(r)? / 8.0 * exp(-(features as f64) / 2.0);
    let norm = c.delta2_norm;
    let target = pair.k2;
    let d = features as usize;
    let blocks = run_indexed(exec, block_count(trials), |b| {
        let mut stream = Stream::new(seed, b as u64);
        let mut z = vec![0.0; d];
        let mut m = Moments::default();
        for _ in 0..block_len(trials, b) {
            stream.fill_standard_normal(&mut z);
            let s = z.iter().map(|&x| cos(norm * x)).sum::<f64>() / d as f64;
            m.push((s - target).abs());
        }
        m
    });
    let mut total = Moments::default();
    blocks.iter().for_each(|m| total.merge(m));
    let empirical = McValue::from_moments(&total);
    Ok(LeCamFloor {
        r,
        features,
        pair,
        floor,
        intermediate: gap * pair.affinity / 4.0,
        kl_form: gap * exp(-pair.kl) / 8.0,
        empirical,
        holds: floor <= empirical.value + 3.0 * empirical.stderr,
    })
}
