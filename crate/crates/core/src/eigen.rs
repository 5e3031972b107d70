//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Used for the 4x4 reduced density matrix and as the exact-diagonalization
//! oracle for small models. Each rotation first removes the phase of the
//! pivot element, then applies a real Jacobi rotation.

use num_complex::Complex64;

use crate::linalg::DenseHermitian;
use crate::{Error, Result};

pub const DEFAULT_MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order; `vectors` is row-major with eigenvector
/// `j` stored in column `j`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<Complex64>,
}

impl EigenDecomposition {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes `m`, stopping once the off-diagonal Frobenius norm drops
/// below `tol * max(1, ||m||_F)`.
pub fn hermitian_eigen(m: &DenseHermitian, tol: f64, max_sweeps: usize) -> Result<EigenDecomposition> {
    let n = m.n();
    let mut a = m.as_slice().to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let target = tol * scale;

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, n);
    while off > target {
        if sweeps == max_sweeps {
            return Err(Error::Eigensolver { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        off = off_diagonal_norm(&a, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = v[i * n + old_j];
        }
    }
    Ok(EigenDecomposition { n, values, vectors })
}

pub fn hermitian_eigenvalues(m: &DenseHermitian, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    hermitian_eigen(m, tol, max_sweeps).map(|e| e.values)
}

/// Zeroes `a[p][q]` with the unitary `G = diag(1, e^{-i phi}) R(theta)`
/// acting on rows/columns `p` and `q`, accumulating `v <- v G`.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // Skip elements already negligible against both diagonal entries.
    if r < 1e-300 || (app.abs() + r == app.abs() && aqq.abs() + r == aqq.abs()) {
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r; // e^{i phi}
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    // columns: A <- A G
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * s * conj_phase;
        a[k * n + q] = akp * s + akq * c * conj_phase;
    }
    // rows: A <- G^dagger A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * s * phase;
        a[q * n + k] = apk * s + aqk * c * phase;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * s * conj_phase;
        v[k * n + q] = vkp * s + vkq * c * conj_phase;
    }
}
