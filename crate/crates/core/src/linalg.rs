//! Small dense symmetric linear algebra: Cholesky with jitter escalation and
//! Jacobi eigenvalues. Sizes here are at most a few thousand.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major square matrix; only symmetric matrices are constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    /// Fills entry `(i, j)` and its mirror from `f(i, j)` for `j <= i`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
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

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Lower-triangular Cholesky factor `A + jitter I = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
    pub jitter: f64,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix, jitter: f64) -> Result<Self> {
        let n = a.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j) + jitter;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Singular { jitter, condition: f64::INFINITY });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l, jitter })
    }

    /// Tries each jitter in turn and returns the first successful factor.
    pub fn factor_escalating(a: &SymMatrix, jitters: &[f64]) -> Result<Self> {
        let mut last = Error::Singular { jitter: 0.0, condition: f64::INFINITY };
        for &j in jitters {
            match Self::factor(a, j) {
                Ok(c) => return Ok(c),
                Err(e) => last = e,
            }
        }
        if let Error::Singular { jitter, .. } = last {
            return Err(Error::Singular { jitter, condition: diagonal_condition(a) });
        }
        Err(last)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Solves `L^T x = y`.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }

    /// `L z`, used to colour white noise.
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| (0..=i).map(|k| self.l[i * n + k] * z[k]).sum()).collect()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<f64>()
    }

    /// Ratio of largest to smallest squared pivot: a cheap condition estimate.
    pub fn condition_estimate(&self) -> f64 {
        let d: Vec<f64> = (0..self.n).map(|i| self.l[i * self.n + i] * self.l[i * self.n + i]).collect();
        let max = d.iter().copied().fold(0.0, f64::max);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }
}

fn diagonal_condition(a: &SymMatrix) -> f64 {
    let d: Vec<f64> = (0..a.n).map(|i| a.get(i, i).abs()).collect();
    let max = d.iter().copied().fold(0.0, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &SymMatrix) -> Vec<f64> {
    let n = a.n;
    let mut m = a.data.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert_like(n: usize) -> SymMatrix {
        SymMatrix::from_fn(n, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn cholesky_solves() {
        let a = hilbert_like(6);
        let c = Cholesky::factor(&a, 0.0).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0, 0.0, 1.0];
        let x = c.solve(&b);
        let ax = a.mul_vec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_needs_jitter() {
        let a = SymMatrix::from_fn(3, |_, _| 1.0);
        assert!(Cholesky::factor(&a, 0.0).is_err());
        let c = Cholesky::factor_escalating(&a, &[0.0, 1e-12, 1e-10, 1e-8]).unwrap();
        assert!(c.jitter > 0.0);
        let neg = SymMatrix::from_fn(2, |i, j| if i == j { -1.0 } else { 0.0 });
        match Cholesky::factor_escalating(&neg, &[0.0, 1e-8]) {
            Err(Error::Singular { jitter, .. }) => assert_eq!(jitter, 1e-8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // Tridiagonal (2, -1): eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 8;
        let a = SymMatrix::from_fn(n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let ev = symmetric_eigenvalues(&a);
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((e - exact).abs() < 1e-12, "{e} vs {exact}");
        }
        let c = Cholesky::factor(&a, 0.0).unwrap();
        let det: f64 = ev.iter().map(|e| e.ln()).sum();
        assert!((c.log_det() - det).abs() < 1e-10);
    }
}
