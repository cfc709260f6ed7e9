use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::sqrt;
use crate::Result;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Symmetric matrix with entries `f(i, j)`, evaluated for `j ≤ i` only.
    pub fn symmetric(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += v;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if !(d > 0.0) {
                bail!(
                    Internal,
                    "matrix is not positive definite (pivot {j} = {d:e})"
                );
            }
            let djj = sqrt(d);
            l.data[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.data[i * n + j] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let s: f64 = x[..i]
                .iter()
                .enumerate()
                .map(|(k, xk)| self.l.get(i, k) * xk)
                .sum();
            x[i] = (x[i] - s) / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let s: f64 = x[i + 1..]
                .iter()
                .enumerate()
                .map(|(j, xk)| self.l.get(i + 1 + j, i) * xk)
                .sum();
            x[i] = (x[i] - s) / self.l.get(i, i);
        }
        x
    }
}

/// Solves `A x = b` for symmetric positive definite `A`, with one round of
/// iterative refinement. Returns `x` and the relative residual
/// `‖Ax − b‖/‖b‖`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let chol = Cholesky::new(a)?;
    let mut x = chol.solve(b);
    let r: Vec<f64> = b
        .iter()
        .zip(a.mul_vec(&x))
        .map(|(bi, ax)| bi - ax)
        .collect();
    let dx = chol.solve(&r);
    x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
    Ok((x.clone(), relative_residual(a, &x, b)))
}

pub fn relative_residual(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &mut dyn Iterator<Item = f64>| sqrt(v.map(|t| t * t).sum());
    let nb = norm(&mut b.iter().copied());
    let nr = norm(&mut a.mul_vec(x).into_iter().zip(b).map(|(ax, bi)| ax - bi));
    if nb == 0.0 {
        nr
    } else {
        nr / nb
    }
}
