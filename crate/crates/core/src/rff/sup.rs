//! Certified supremum of `|f(r)| = |s(r) − k(r)|` over `[0, R]`.
//!
//! The certificate is the textbook one: take the maximum of `|f|` over a
//! uniform grid and add `L·h/2`, where `h` is the grid step and `L` bounds
//! `|f′|` for this realization. `L = D⁻¹Σ|αᵢ| + e^{−1/2}` since
//! `|∂s| ≤ D⁻¹Σ|αᵢ|` and `max |k′| = e^{−1/2}` (at `r = 1`).
//!
//! Evaluating every grid node costs `O(D·N)`. Instead the grid maximum is
//! found by branch and bound. The derivatives `f … f⁗` are computed on a
//! coarse lattice (step about 1) by rotating `(cos αᵢr, sin αᵢr)` one coarse
//! step at a time. Every fine node then gets an upper bound from the quartic
//! Taylor model of a nearby lattice point plus the remainder
//! `|f⁽⁵⁾| ≤ D⁻¹Σ|αᵢ|⁵ + max|k⁽⁵⁾|`. Zones are refined in order of
//! decreasing bound with direct evaluations, each of which becomes a new
//! Taylor centre. The result is the exact grid maximum (up to the rounding
//! of a direct evaluation), not an approximation of it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{ceil, exp, floor, sincos};
use crate::Result;

const POINTS_PER_UNIT_RADIUS: usize = 4096;
/// Largest coarse step; each lattice point owns the fine nodes within half
/// a step of it.
const COARSE_STEP_MAX: f64 = 1.0;
/// Rotations drift by one rounding per step; restart from `sincos` this often.
const RESYNC_EVERY: usize = 32;
/// `max_r |d⁵/dr⁵ e^{−r²/2}| = |r⁵ − 10r³ + 15r|·e^{−r²/2}`, attained near
/// `r = 0.6167`, rounded up.
const KERNEL_D5_MAX: f64 = 5.783_06;
/// Absolute slack added to every Taylor bound, far above the rounding in
/// the coarse recurrence and the moment sums.
const BOUND_MARGIN: f64 = 1e-10;

/// Default grid size `4096·max(1, ⌈R⌉)`.
pub fn default_grid_points(r_max: f64) -> usize {
    let units = if r_max.is_finite() && r_max > 1.0 {
        ceil(r_max) as usize
    } else {
        1
    };
    POINTS_PER_UNIT_RADIUS * units
}

/// Per-realization bound on `|f′|`: `D⁻¹Σ|αᵢ| + e^{−1/2}`.
pub fn lipschitz_cap(alphas: &[f64]) -> f64 {
    alphas.iter().map(|a| a.abs()).sum::<f64>() / alphas.len() as f64 + exp(-0.5)
}

fn fifth_derivative_cap(alphas: &[f64]) -> f64 {
    let total: f64 = alphas
        .iter()
        .map(|a| {
            let m = a.abs();
            let m2 = m * m;
            m2 * m2 * m
        })
        .sum();
    total / alphas.len() as f64 + KERNEL_D5_MAX
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupErrorResult {
    /// `grid_max + certified_pad`; an upper bound on `sup_{[0,R]} |f|`.
    pub sup_value: f64,
    pub argmax_r: f64,
    pub grid_max: f64,
    pub grid_step: f64,
    pub grid_points: usize,
    pub lipschitz_cap: f64,
    pub certified_pad: f64,
}

/// Outcome of asking whether the certified supremum reaches `ε`.
///
/// `exceeded` is exact. `lower ≤ grid_max + pad ≤ upper` brackets the
/// certified value; the search stops as soon as the question is settled,
/// so the bracket is usually loose on the side that did not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupDecision {
    pub exceeded: bool,
    pub lower: f64,
    pub upper: f64,
}

/// Certified `sup_{r∈[0,R]} |D⁻¹Σcos(αᵢr) − e^{−r²/2}|` from a grid of
/// `grid_points` nodes.
pub fn certified_sup_error(
    alphas: &[f64],
    r_max: f64,
    grid_points: usize,
) -> Result<SupErrorResult> {
    let search = Search::new(alphas, r_max, grid_points)?;
    let found = search.run(None);
    let grid_max = found.best;
    Ok(SupErrorResult {
        sup_value: grid_max + search.pad,
        argmax_r: search.grid.node(found.best_index),
        grid_max,
        grid_step: search.grid.step,
        grid_points,
        lipschitz_cap: search.cap,
        certified_pad: search.pad,
    })
}

/// Decides `grid_max + pad ≥ eps` without locating the maximum exactly.
pub fn certified_sup_exceeds(
    alphas: &[f64],
    r_max: f64,
    grid_points: usize,
    eps: f64,
) -> Result<SupDecision> {
    if eps.is_nan() {
        bail!(InvalidArgument, "threshold must be a number");
    }
    let search = Search::new(alphas, r_max, grid_points)?;
    let found = search.run(Some(eps));
    Ok(SupDecision {
        exceeded: found.exceeded,
        lower: found.best + search.pad,
        upper: found.upper.max(found.best) + search.pad,
    })
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    r_max: f64,
    points: usize,
    step: f64,
}

impl Grid {
    #[inline]
    fn node(&self, j: usize) -> f64 {
        if j + 1 == self.points {
            self.r_max
        } else {
            j as f64 * self.step
        }
    }
}

/// Means over `i` of `cos αᵢr`, `αᵢ sin αᵢr`, `αᵢ² cos αᵢr`, `αᵢ³ sin αᵢr`,
/// `αᵢ⁴ cos αᵢr`.
type Moments = [f64; 5];

/// Taylor coefficients `f⁽ⁿ⁾(r)/n!`, `n = 0..=4`, at `r`.
#[derive(Debug, Clone, Copy)]
struct Jet {
    r: f64,
    c: [f64; 5],
}

impl Jet {
    fn new(r: f64, m: Moments) -> Self {
        // s⁽ⁿ⁾ cycles through cos, −sin, −cos, sin, cos; the kernel's
        // derivatives are (−1)ⁿ Heₙ(r) e^{−r²/2}.
        let k = exp(-0.5 * r * r);
        let r2 = r * r;
        let he = [1.0, r, r2 - 1.0, r * (r2 - 3.0), r2 * (r2 - 6.0) + 3.0];
        let s = [m[0], -m[1], -m[2], m[3], m[4]];
        let kd = [he[0] * k, -he[1] * k, he[2] * k, -he[3] * k, he[4] * k];
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let mut c = [0.0; 5];
        for n in 0..5 {
            c[n] = (s[n] - kd[n]) / fact[n];
        }
        Self { r, c }
    }

    #[inline]
    fn value(&self) -> f64 {
        self.c[0]
    }

    /// Bound on `|f|` over `[r − w, r + w]` from the absolute coefficients.
    fn bound_within(&self, w: f64, m5: f64) -> f64 {
        let c = &self.c;
        let p =
            c[0].abs() + w * (c[1].abs() + w * (c[2].abs() + w * (c[3].abs() + w * c[4].abs())));
        let w2 = w * w;
        p + m5 * w2 * w2 * w / 120.0 + BOUND_MARGIN
    }

    #[inline]
    fn bound_at(&self, r: f64, m5: f64) -> f64 {
        let t = r - self.r;
        let c = &self.c;
        let p = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
        let at = t.abs();
        let at2 = at * at;
        p.abs() + m5 * at2 * at2 * at / 120.0 + BOUND_MARGIN
    }
}

#[inline]
fn fold(v: [f64; 4], n: f64) -> f64 {
    ((v[0] + v[1]) + (v[2] + v[3])) / n
}

/// Moment sums with four interleaved accumulators per moment.
fn moments(alphas: &[f64], cs: &[f64], sn: &[f64]) -> Moments {
    let mut acc = [[0.0; 4]; 5];
    let n = alphas.len();
    let mut i = 0;
    while i + 4 <= n {
        for lane in 0..4 {
            let a = alphas[i + lane];
            let c = cs[i + lane];
            let s = sn[i + lane];
            let a2 = a * a;
            acc[0][lane] += c;
            acc[1][lane] += a * s;
            acc[2][lane] += a2 * c;
            acc[3][lane] += a2 * a * s;
            acc[4][lane] += a2 * a2 * c;
        }
        i += 4;
    }
    for (lane, idx) in (i..n).enumerate() {
        let a = alphas[idx];
        let a2 = a * a;
        acc[0][lane] += cs[idx];
        acc[1][lane] += a * sn[idx];
        acc[2][lane] += a2 * cs[idx];
        acc[3][lane] += a2 * a * sn[idx];
        acc[4][lane] += a2 * a2 * cs[idx];
    }
    let d = n as f64;
    [
        fold(acc[0], d),
        fold(acc[1], d),
        fold(acc[2], d),
        fold(acc[3], d),
        fold(acc[4], d),
    ]
}

fn direct_jet(alphas: &[f64], r: f64, cs: &mut [f64], sn: &mut [f64]) -> Jet {
    for ((&a, c), s) in alphas.iter().zip(cs.iter_mut()).zip(sn.iter_mut()) {
        let (x, y) = sincos(a * r);
        *s = x;
        *c = y;
    }
    Jet::new(r, moments(alphas, cs, sn))
}

struct Search<'a> {
    alphas: &'a [f64],
    grid: Grid,
    cap: f64,
    pad: f64,
    m5: f64,
    /// Fine nodes per coarse step.
    spacing: usize,
}

struct Found {
    best: f64,
    best_index: usize,
    exceeded: bool,
    /// Largest bound left unresolved (`−∞` when nothing was left open).
    upper: f64,
}

impl<'a> Search<'a> {
    fn new(alphas: &'a [f64], r_max: f64, points: usize) -> Result<Self> {
        if alphas.is_empty() {
            bail!(InvalidArgument, "need at least one alpha");
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            bail!(InvalidArgument, "alphas must be finite");
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            bail!(
                InvalidArgument,
                "R must be positive and finite, got {r_max}"
            );
        }
        if points < 2 {
            bail!(InvalidArgument, "grid_points must be >= 2, got {points}");
        }
        let step = r_max / (points - 1) as f64;
        let spacing = (floor(COARSE_STEP_MAX / step) as usize).clamp(1, points - 1);
        let cap = lipschitz_cap(alphas);
        Ok(Self {
            alphas,
            grid: Grid {
                r_max,
                points,
                step,
            },
            cap,
            pad: cap * step / 2.0,
            m5: fifth_derivative_cap(alphas),
            spacing,
        })
    }

    /// Jets at `r = k·spacing·h` for every lattice point `k`.
    fn coarse_jets(&self, cs: &mut [f64], sn: &mut [f64]) -> Vec<Jet> {
        let d = self.alphas.len();
        let big_step = self.spacing as f64 * self.grid.step;
        let count = (self.grid.points - 1).div_ceil(self.spacing) + 1;
        let mut rot_c = vec![0.0; d];
        let mut rot_s = vec![0.0; d];
        for ((&a, rc), rs) in self.alphas.iter().zip(&mut rot_c).zip(&mut rot_s) {
            let (s, c) = sincos(a * big_step);
            *rs = s;
            *rc = c;
        }
        cs.fill(1.0);
        sn.fill(0.0);
        let mut jets = Vec::with_capacity(count);
        for k in 0..count {
            let r = k as f64 * big_step;
            if k > 0 && k % RESYNC_EVERY == 0 {
                for ((&a, c), s) in self.alphas.iter().zip(cs.iter_mut()).zip(sn.iter_mut()) {
                    let (x, y) = sincos(a * r);
                    *s = x;
                    *c = y;
                }
            } else if k > 0 {
                for (((c, s), &rc), &rs) in cs.iter_mut().zip(sn.iter_mut()).zip(&rot_c).zip(&rot_s)
                {
                    let nc = *c * rc - *s * rs;
                    let ns = *s * rc + *c * rs;
                    *c = nc;
                    *s = ns;
                }
            }
            jets.push(Jet::new(r, moments(self.alphas, cs, sn)));
        }
        jets
    }

    /// Fine-index range owned by lattice point `k`, or `None` past the end.
    fn zone(&self, k: usize) -> Option<(usize, usize)> {
        let half_below = self.spacing / 2;
        let lo = (k * self.spacing).saturating_sub(half_below);
        let hi = k * self.spacing + (self.spacing - half_below) - 1;
        let last = self.grid.points - 1;
        if lo > last {
            None
        } else {
            Some((lo, hi.min(last)))
        }
    }

    /// With `stop = None` finds the exact grid maximum; with `Some(eps)`
    /// stops once `grid_max + pad ≥ eps` is decided.
    fn run(&self, stop: Option<f64>) -> Found {
        let d = self.alphas.len();
        let mut cs = vec![0.0; d];
        let mut sn = vec![0.0; d];
        let jets = self.coarse_jets(&mut cs, &mut sn);

        // Zone bound: the coefficient-wise bound when that already settles a
        // decision, else the largest single-centre node bound in the zone.
        let mut zones: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(jets.len());
        for (k, jet) in jets.iter().enumerate() {
            if let Some((lo, hi)) = self.zone(k) {
                let width = (jet.r - self.grid.node(lo)).max(self.grid.node(hi) - jet.r);
                let crude = jet.bound_within(width, self.m5);
                let bound = match stop {
                    Some(eps) if crude + self.pad < eps => crude,
                    _ => (lo..=hi)
                        .map(|j| jet.bound_at(self.grid.node(j), self.m5))
                        .fold(f64::NEG_INFINITY, f64::max),
                };
                zones.push((k, lo, hi, bound));
            }
        }
        zones.sort_by(|x, y| y.3.total_cmp(&x.3).then(x.0.cmp(&y.0)));

        let mut found = Found {
            best: 0.0,
            best_index: 0,
            exceeded: false,
            upper: f64::NEG_INFINITY,
        };
        for (pos, &(k, lo, hi, bound)) in zones.iter().enumerate() {
            let settled = match stop {
                None => bound <= found.best,
                Some(eps) => bound + self.pad < eps,
            };
            if settled {
                found.upper = found.upper.max(bound);
                break;
            }
            let zone_upper = self.refine(&jets, k, lo, hi, stop, &mut found, &mut cs, &mut sn);
            found.upper = found.upper.max(zone_upper);
            if found.exceeded {
                if let Some(&(_, _, _, next)) = zones.get(pos + 1) {
                    found.upper = found.upper.max(next);
                }
                break;
            }
        }
        found
    }

    /// Refines one zone; returns the largest bound left open in it.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        jets: &[Jet],
        k: usize,
        lo: usize,
        hi: usize,
        stop: Option<f64>,
        found: &mut Found,
        cs: &mut [f64],
        sn: &mut [f64],
    ) -> f64 {
        let len = hi - lo + 1;
        let mut ub = vec![f64::INFINITY; len];
        let mut open = vec![true; len];
        let first = k.saturating_sub(1);
        let last = (k + 1).min(jets.len() - 1);
        for jet in &jets[first..=last] {
            self.tighten(&mut ub, &open, lo, jet);
        }
        loop {
            let mut top = f64::NEG_INFINITY;
            let mut top_idx = usize::MAX;
            for (idx, (&u, &o)) in ub.iter().zip(&open).enumerate() {
                if o && u > top {
                    top = u;
                    top_idx = idx;
                }
            }
            if top_idx == usize::MAX {
                return f64::NEG_INFINITY;
            }
            let settled = match stop {
                None => top <= found.best,
                Some(eps) => top + self.pad < eps,
            };
            if settled {
                return top;
            }
            let j = lo + top_idx;
            let jet = direct_jet(self.alphas, self.grid.node(j), cs, sn);
            open[top_idx] = false;
            let value = jet.value().abs();
            if value > found.best {
                found.best = value;
                found.best_index = j;
            }
            if let Some(eps) = stop {
                if found.best + self.pad >= eps {
                    found.exceeded = true;
                    return ub
                        .iter()
                        .zip(&open)
                        .filter(|(_, &o)| o)
                        .fold(f64::NEG_INFINITY, |m, (&u, _)| m.max(u));
                }
            }
            self.tighten(&mut ub, &open, lo, &jet);
        }
    }

    fn tighten(&self, ub: &mut [f64], open: &[bool], lo: usize, jet: &Jet) {
        for (idx, (u, &o)) in ub.iter_mut().zip(open).enumerate() {
            if o {
                let b = jet.bound_at(self.grid.node(lo + idx), self.m5);
                if b < *u {
                    *u = b;
                }
            }
        }
    }
}
