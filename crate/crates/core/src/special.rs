//! Special functions needed by the bounds and the affinity computations.

use crate::error::bail;
use crate::math::{exp, ln, ln1p, sin, sqrt, E, PI};
use crate::Result;

const HALLEY_MAX_ITER: usize = 64;
const INC_GAMMA_MAX_ITER: usize = 10_000;

/// Principal branch of the Lambert W function: the `w ≥ -1` solving
/// `w·eʷ = x`.
///
/// Halley iteration from a branch-point series (near `-1/e`), the identity
/// map (moderate `x`) or the two-term asymptotic expansion (large `x`).
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        bail!(Domain, "lambert_w0 requires x >= -1/e, got {x}");
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.25 {
        let p = sqrt(2.0 * (E * x + 1.0));
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        ln1p(x) * (1.0 - ln1p(ln1p(x)) / (2.0 + ln1p(x)))
    } else {
        let l1 = ln(x);
        let l2 = ln(l1);
        l1 - l2 + l2 / l1
    };

    for _ in 0..HALLEY_MAX_ITER {
        let ew = exp(w);
        let resid = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = resid / (ew * wp1 - (w + 2.0) * resid / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Gamma function for `x > 0` (Lanczos, g = 7; reflection below 1/2).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        bail!(Domain, "gamma_fn requires x > 0, got {x}");
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin(PI * x) * gamma_positive(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    sqrt(2.0 * PI) * crate::math::powf(t, z + 0.5) * exp(-t) * lanczos_sum(z)
}

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        bail!(Domain, "ln_gamma requires x > 0, got {x}");
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return ln(PI / sin(PI * x).abs()) - ln_gamma_positive(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * ln(2.0 * PI) + (z + 0.5) * ln(t) - t + ln(lanczos_sum(z))
}

/// Regularized lower incomplete gamma function `P(s, x)`.
///
/// Power series for `x < s + 1`, Lentz continued fraction for the upper
/// function otherwise.
pub fn reg_lower_inc_gamma(s: f64, x: f64) -> Result<f64> {
    inc_gamma_pair(s, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma function `Q(s, x) = 1 - P(s, x)`,
/// computed without cancellation in the far tail.
pub fn reg_upper_inc_gamma(s: f64, x: f64) -> Result<f64> {
    inc_gamma_pair(s, x).map(|(_, q)| q)
}

fn inc_gamma_pair(s: f64, x: f64) -> Result<(f64, f64)> {
    if !(s > 0.0) || !s.is_finite() {
        bail!(Domain, "incomplete gamma requires s > 0, got {s}");
    }
    if x.is_nan() || x < 0.0 {
        bail!(Domain, "incomplete gamma requires x >= 0, got {x}");
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + s * ln(x) - ln_gamma_positive(s);
    if x < s + 1.0 {
        let p = (exp(log_prefactor) * lower_series(s, x)?).min(1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = (exp(log_prefactor) * upper_fraction(s, x)?).min(1.0);
        Ok((1.0 - q, q))
    }
}

// Σ xⁿ / (s (s+1) ... (s+n))
fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut denom = s;
    let mut term = 1.0 / s;
    let mut sum = term;
    for _ in 0..INC_GAMMA_MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok(sum);
        }
    }
    Err(crate::Error::Convergence {
        what: "incomplete gamma series",
        achieved: term.abs() / sum.abs(),
        target: f64::EPSILON,
    })
}

// Modified Lentz for 1/(x+1-s- 1(1-s)/(x+3-s- 2(2-s)/(x+5-s- ...)))
fn upper_fraction(s: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(crate::Error::Convergence {
        what: "incomplete gamma continued fraction",
        achieved: f64::NAN,
        target: f64::EPSILON,
    })
}
