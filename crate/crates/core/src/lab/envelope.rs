use alloc::vec;
use alloc::vec::Vec;

use super::exec::run_indexed;
use super::stats::{Moments, ProbabilityEstimate};
use super::Executor;
use crate::error::bail;
use crate::math::sincos;
use crate::rff::{certified_sup_error, certified_sup_exceeds, default_grid_points};
use crate::rng::Stream;
use crate::Result;

/// One trial of the failure-probability experiment.
///
/// `exceeded` is decided exactly on the certified supremum
/// (`grid max + pad`); `[sup_lower, sup_upper]` brackets that value but is
/// only as tight as the decision needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub sup_lower: f64,
    pub sup_upper: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProbabilityRun {
    pub estimate: ProbabilityEstimate,
    pub records: Vec<TrialRecord>,
}

fn check_common(r_max: f64, features: usize, trials: usize) -> Result<()> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        bail!(InvalidArgument, "R must be positive, got {r_max}");
    }
    if features == 0 {
        bail!(InvalidArgument, "D must be >= 1");
    }
    if trials == 0 {
        bail!(InvalidArgument, "trials must be >= 1");
    }
    Ok(())
}

/// Fraction of bases whose certified sup error over `[0, R]` reaches `ε`.
///
/// Trial `i` draws its `D` projections from stream `i` of `seed`.
pub fn estimate_error_probability<E: Executor + ?Sized>(
    r_max: f64,
    features: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<ErrorProbabilityRun> {
    check_common(r_max, features, trials)?;
    if !(eps > 0.0) {
        bail!(InvalidArgument, "epsilon must be positive, got {eps}");
    }
    let points = default_grid_points(r_max);
    let outcomes = run_indexed(exec, trials, |i| {
        let mut alphas = vec![0.0; features];
        Stream::new(seed, i as u64).fill_standard_normal(&mut alphas);
        certified_sup_exceeds(&alphas, r_max, points, eps).map(|d| TrialRecord {
            trial_index: i as u64,
            seed,
            sup_lower: d.lower,
            sup_upper: d.upper,
            exceeded: d.exceeded,
        })
    });
    let records = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|t| t.exceeded).count() as u64;
    Ok(ErrorProbabilityRun {
        estimate: ProbabilityEstimate::new(failures, trials as u64)?,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedSup {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub max: f64,
}

/// Mean and standard error of the certified sup error over `[0, R]`.
pub fn estimate_expected_sup<E: Executor + ?Sized>(
    r_max: f64,
    features: usize,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<ExpectedSup> {
    check_common(r_max, features, trials)?;
    let points = default_grid_points(r_max);
    let sups = run_indexed(exec, trials, |i| {
        let mut alphas = vec![0.0; features];
        Stream::new(seed, i as u64).fill_standard_normal(&mut alphas);
        certified_sup_error(&alphas, r_max, points).map(|s| s.sup_value)
    });
    let mut m = Moments::default();
    let mut max: f64 = 0.0;
    for s in sups {
        let s = s?;
        m.push(s);
        max = max.max(s);
    }
    Ok(ExpectedSup {
        mean: m.mean,
        stderr: m.stderr(),
        trials: m.n,
        max,
    })
}

/// Trials per work item in the Lipschitz experiment.
const LIPSCHITZ_BLOCK: usize = 512;
const RESYNC_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzVariance {
    /// `max_r Var[∂s(r)]` over the grid.
    pub max_variance: f64,
    pub argmax_r: f64,
    /// Batch-means standard error of the variance at the maximizing `r`.
    pub stderr_at_max: f64,
    /// `1/D`.
    pub cap: f64,
    pub r_grid: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Empirical variance of `∂s(r) = −D⁻¹ Σ αᵢ sin(αᵢ r)` on a uniform grid of
/// `r_grid` radii in `[0, R]`, maximized over the grid.
///
/// Trials are grouped in blocks of 512; block `b` uses stream `b` of `seed`.
/// The standard error comes from the spread of the per-block variances.
pub fn check_lipschitz_variance<E: Executor + ?Sized>(
    features: usize,
    r_max: f64,
    r_grid: usize,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<LipschitzVariance> {
    check_common(r_max, features, trials)?;
    if r_grid < 2 {
        bail!(InvalidArgument, "r_grid must be >= 2, got {r_grid}");
    }
    let step = r_max / (r_grid - 1) as f64;
    let blocks = trials.div_ceil(LIPSCHITZ_BLOCK);
    let per_block = run_indexed(exec, blocks, |b| {
        let n = LIPSCHITZ_BLOCK.min(trials - b * LIPSCHITZ_BLOCK);
        let mut stream = Stream::new(seed, b as u64);
        let mut alphas = vec![0.0; features];
        let mut cs = vec![0.0; features];
        let mut sn = vec![0.0; features];
        let mut rot = vec![(0.0, 0.0); features];
        let mut moments = vec![Moments::default(); r_grid];
        for _ in 0..n {
            stream.fill_standard_normal(&mut alphas);
            for (a, rc) in alphas.iter().zip(rot.iter_mut()) {
                let (s, c) = sincos(a * step);
                *rc = (c, s);
            }
            cs.fill(1.0);
            sn.fill(0.0);
            for (j, m) in moments.iter_mut().enumerate() {
                if j > 0 && j % RESYNC_EVERY == 0 {
                    let r = j as f64 * step;
                    for ((a, c), s) in alphas.iter().zip(cs.iter_mut()).zip(sn.iter_mut()) {
                        let (x, y) = sincos(a * r);
                        *s = x;
                        *c = y;
                    }
                } else if j > 0 {
                    for ((c, s), &(rc, rs)) in cs.iter_mut().zip(sn.iter_mut()).zip(&rot) {
                        let nc = *c * rc - *s * rs;
                        let ns = *s * rc + *c * rs;
                        *c = nc;
                        *s = ns;
                    }
                }
                let total: f64 = alphas.iter().zip(sn.iter()).map(|(a, s)| a * s).sum();
                m.push(-total / features as f64);
            }
        }
        moments
    });

    let mut total = vec![Moments::default(); r_grid];
    for block in &per_block {
        for (t, m) in total.iter_mut().zip(block) {
            t.merge(m);
        }
    }
    let variances: Vec<f64> = total.iter().map(Moments::variance).collect();
    let (arg, &max_variance) = variances
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("r_grid >= 2");
    let mut spread = Moments::default();
    for block in &per_block {
        if block[arg].n >= 2 {
            spread.push(block[arg].variance());
        }
    }
    let stderr_at_max = if spread.n >= 2 {
        spread.stderr()
    } else {
        f64::NAN
    };
    Ok(LipschitzVariance {
        max_variance,
        argmax_r: arg as f64 * step,
        stderr_at_max,
        cap: 1.0 / features as f64,
        r_grid: (0..r_grid).map(|j| j as f64 * step).collect(),
        variances,
    })
}
