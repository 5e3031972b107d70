//! Upper bounds on the spectral scale `E0 >= 2 max |E|` for the Chebyshev
//! stepper.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, norm_sqr, DenseHermitian, HermitianOperator, StateVector};
use crate::{Error, Result};

const POWER_SAFETY: f64 = 1.1;
const POWER_MAX_ITER: usize = 5000;

/// `E0` from the best available source: the model's analytic bound, then
/// Gershgorin row sums of an explicit matrix, then power iteration.
pub fn estimate_spectral_bound<H: HermitianOperator + ?Sized>(h: &H) -> Result<f64> {
    if let Some(r) = h.spectral_radius_bound() {
        return Ok(2.0 * r);
    }
    if let Some(m) = h.dense() {
        return Ok(gershgorin_bound(m));
    }
    power_iteration_bound(h, POWER_MAX_ITER)
}

pub fn gershgorin_bound(m: &DenseHermitian) -> f64 {
    2.0 * m.gershgorin_radius()
}

/// Power iteration on `H^2`; returns `2 * 1.1 * sqrt(rho(H^2))`.
pub fn power_iteration_bound<H: HermitianOperator + ?Sized>(h: &H, max_iter: usize) -> Result<f64> {
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = StateVector::random(n, &mut rng).into_vec();
    let mut hv = vec![Complex64::new(0.0, 0.0); n];
    let mut h2v = vec![Complex64::new(0.0, 0.0); n];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        h.apply_into(&v, &mut hv);
        h.apply_into(&hv, &mut h2v);
        // Rayleigh quotient of H^2 on the unit vector v
        let rq = dot(&v, &h2v).re;
        let nrm = norm_sqr(&h2v).sqrt();
        if nrm == 0.0 {
            return Ok(0.0);
        }
        let converged = (rq - estimate).abs() <= 1e-10 * rq.abs();
        estimate = rq;
        if converged {
            return Ok(2.0 * POWER_SAFETY * estimate.max(0.0).sqrt());
        }
        let inv = 1.0 / nrm;
        v.iter_mut().zip(&h2v).for_each(|(a, b)| *a = b * inv);
    }
    Err(Error::Estimation(format!(
        "power iteration did not settle in {max_iter} iterations (last estimate {:.6e})",
        estimate.max(0.0).sqrt()
    )))
}
