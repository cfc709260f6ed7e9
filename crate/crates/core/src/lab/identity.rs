use alloc::vec;

use super::exec::run_indexed;
use super::{block_count, block_len, Executor};
use crate::error::bail;
use crate::math::{cos, exp, powf, sqrt, CompensatedSum};
use crate::rng::Stream;
use crate::Result;

/// `E[cos(Σᵢ αᵢ)]^{1/D}` with `αᵢ ~ N(0, r²)`, which equals `e^{−r²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterIdentity {
    /// `mean^{1/D}`; `None` when the sampled mean is not positive.
    pub estimate: Option<f64>,
    /// `e^{−r²/2}`.
    pub target: f64,
    pub pre_root_mean: f64,
    /// `e^{−Dr²/2}`.
    pub pre_root_target: f64,
    pub pre_root_stderr: f64,
}

/// Largest `D·r²` accepted: beyond it `e^{−Dr²/2}` sinks into Monte Carlo
/// noise at feasible sample sizes.
pub const MAX_DR2: f64 = 8.0;

pub fn parameter_identity<E: Executor + ?Sized>(
    r: f64,
    features: usize,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<ParameterIdentity> {
    if !(r > 0.0 && r.is_finite()) || features == 0 || trials == 0 {
        bail!(InvalidArgument, "need r > 0, D >= 1, trials >= 1");
    }
    let dr2 = features as f64 * r * r;
    if dr2 > MAX_DR2 {
        bail!(
            Precondition,
            "D r^2 = {dr2} exceeds {MAX_DR2}: the target e^(-D r^2/2) = {} would be lost in sampling noise",
            exp(-dr2 / 2.0)
        );
    }
    let blocks = run_indexed(exec, block_count(trials), |b| {
        let mut stream = Stream::new(seed, b as u64);
        let mut alphas = vec![0.0; features];
        let mut sum = CompensatedSum::new();
        let mut sum_sq = CompensatedSum::new();
        for _ in 0..block_len(trials, b) {
            stream.fill_standard_normal(&mut alphas);
            let mut total = CompensatedSum::new();
            for a in &alphas {
                total.add(r * a);
            }
            let c = cos(total.value());
            sum.add(c);
            sum_sq.add(c * c);
        }
        (sum, sum_sq)
    });
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for (s, q) in &blocks {
        sum.merge(s);
        sum_sq.merge(q);
    }
    let n = trials as f64;
    let mean = sum.value() / n;
    let var = if trials > 1 {
        ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(ParameterIdentity {
        estimate: (mean > 0.0).then(|| powf(mean, 1.0 / features as f64)),
        target: exp(-r * r / 2.0),
        pre_root_mean: mean,
        pre_root_target: exp(-dr2 / 2.0),
        pre_root_stderr: sqrt(var / n),
    })
}
