//! Scalar Hermite and Laguerre polynomials by the same three-term
//! recursions the operator steppers use.

/// Physicists' Hermite polynomial `H_k(x)`.
pub fn hermite_scalar(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_k^alpha(x)`.
pub fn laguerre_scalar(k: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, alpha + 1.0 - x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + alpha + 1.0 - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
