#![allow(dead_code)]

use nalgebra::DMatrix;
use polyprop::{Complex64, DenseHermitian, HermitianOperator, StateVector};

/// `exp(-i H t) psi` through nalgebra's Hermitian eigendecomposition.
pub fn exact_evolve(h: &DenseHermitian, psi: &StateVector, t: f64) -> StateVector {
    let n = h.n();
    let m = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    let eig = m.symmetric_eigen();
    let v = &eig.eigenvectors;
    let p = nalgebra::DVector::from_column_slice(psi.as_slice());
    let mut c = v.adjoint() * p;
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
    }
    StateVector::new((v * c).iter().copied().collect()).unwrap()
}

pub fn dense_of<H: HermitianOperator>(h: &H) -> DenseHermitian {
    DenseHermitian::from_operator(h).unwrap()
}

pub fn max_abs_eigenvalue(h: &DenseHermitian) -> f64 {
    let n = h.n();
    let m = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    m.symmetric_eigenvalues().iter().fold(0.0f64, |a, e| a.max(e.abs()))
}
