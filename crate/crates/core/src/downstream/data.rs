use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{powf, sin, sqrt};
use crate::rng::Stream;
use crate::Result;

/// Training points with real targets or `±1` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<Vec<f64>>,
    targets: Vec<f64>,
    diameter: f64,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            bail!(InvalidArgument, "dataset needs at least one point");
        }
        if points.len() != targets.len() {
            bail!(
                InvalidArgument,
                "{} points but {} targets",
                points.len(),
                targets.len()
            );
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            bail!(InvalidArgument, "points must share a positive dimension");
        }
        if points
            .iter()
            .flatten()
            .chain(&targets)
            .any(|v| !v.is_finite())
        {
            bail!(InvalidArgument, "points and targets must be finite");
        }
        let mut diameter: f64 = 0.0;
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                diameter = diameter.max(distance(p, q));
            }
        }
        Ok(Self {
            dim,
            points,
            targets,
            diameter,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Largest pairwise distance between training points.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn has_binary_labels(&self) -> bool {
        self.targets.iter().all(|&y| y == 1.0 || y == -1.0)
    }

    /// Population standard deviation of the targets.
    pub fn target_std(&self) -> f64 {
        let n = self.targets.len() as f64;
        let mean = self.targets.iter().sum::<f64>() / n;
        sqrt(
            self.targets
                .iter()
                .map(|y| (y - mean) * (y - mean))
                .sum::<f64>()
                / n,
        )
    }
}

pub(crate) fn distance(p: &[f64], q: &[f64]) -> f64 {
    sqrt(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `count` points uniform in the ball of the given radius around the origin.
pub fn sample_ball(count: usize, dim: usize, radius: f64, stream: &mut Stream) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let mut v = vec![0.0; dim];
            stream.fill_standard_normal(&mut v);
            let norm = sqrt(v.iter().map(|x| x * x).sum());
            let scale = radius * powf(stream.uniform_open(), 1.0 / dim as f64) / norm;
            v.iter_mut().for_each(|x| *x *= scale);
            v
        })
        .collect()
}

/// Regression data in a ball of radius `radius`: targets are a sum of three
/// random sinusoids plus Gaussian noise of standard deviation `noise`.
pub fn smooth_regression(
    n: usize,
    dim: usize,
    radius: f64,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 || dim == 0 || !(radius > 0.0) || !(noise >= 0.0) {
        bail!(
            InvalidArgument,
            "need n >= 1, d >= 1, radius > 0, noise >= 0"
        );
    }
    let mut stream = Stream::new(seed, 0);
    let mut waves = vec![(vec![0.0; dim], 0.0, 0.0); 3];
    for (w, phase, amp) in waves.iter_mut() {
        stream.fill_standard_normal(w);
        *phase = 2.0 * core::f64::consts::PI * stream.uniform_open();
        *amp = 0.5 + stream.uniform_open();
    }
    let points = sample_ball(n, dim, radius, &mut stream);
    let targets = points
        .iter()
        .map(|x| {
            let clean: f64 = waves
                .iter()
                .map(|(w, phase, amp)| {
                    amp * sin(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase)
                })
                .sum();
            clean + noise * stream.standard_normal()
        })
        .collect();
    Dataset::new(points, targets)
}

/// Two isotropic Gaussian blobs centred at `±(separation/2)·e₁`, labels
/// alternating `+1, −1`.
pub fn gaussian_blobs(
    n: usize,
    dim: usize,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 || dim == 0 || !(separation >= 0.0) || !(spread > 0.0) {
        bail!(
            InvalidArgument,
            "need n >= 1, d >= 1, separation >= 0, spread > 0"
        );
    }
    let mut stream = Stream::new(seed, 0);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut x = vec![0.0; dim];
        stream.fill_standard_normal(&mut x);
        x.iter_mut().for_each(|v| *v *= spread);
        x[0] += y * separation / 2.0;
        points.push(x);
        labels.push(y);
    }
    Dataset::new(points, labels)
}
