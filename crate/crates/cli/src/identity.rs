//! Numerical check of `L_k^{-1/2}(x^2) = (-1)^k / (2^{2k} k!) H_{2k}(x)`.

use polyprop::propagators::{hermite_scalar, laguerre_scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityRow {
    pub k: usize,
    pub x: f64,
    pub laguerre: f64,
    pub hermite: f64,
    pub rel_error: f64,
}

pub const IDENTITY_POINTS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn laguerre_hermite_identity(k_max: usize, xs: &[f64]) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for k in 0..=k_max {
        // (-1)^k / (4^k k!)
        let mut scale = 1.0;
        for i in 1..=k {
            scale /= -4.0 * i as f64;
        }
        for &x in xs {
            let laguerre = laguerre_scalar(k, -0.5, x * x);
            let hermite = scale * hermite_scalar(2 * k, x);
            let rel_error = (laguerre - hermite).abs() / hermite.abs().max(f64::MIN_POSITIVE);
            rows.push(IdentityRow { k, x, laguerre, hermite, rel_error });
        }
    }
    rows
}
