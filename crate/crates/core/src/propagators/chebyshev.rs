//! Chebyshev expansion `exp(-i tau Ht) = sum_k a_k (-i)^k J_k(tau) T_k(Ht)`
//! with `tau = e0 dt / 2`, `Ht = 2H/e0`, `a_0 = 1`, `a_k = 2`.

use num_complex::Complex64;

use super::bessel::bessel_j_sequence;
use super::{run_single, Method, PropagatorConfig, Scratch, StepReport, MAX_K_MAX};
use crate::linalg::{HermitianOperator, StateVector};
use crate::{Error, Result};

/// One Chebyshev step. Uses `cfg.e0` when set, otherwise estimates it with
/// [`super::estimate_spectral_bound`].
pub fn chebyshev_step<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &StateVector,
    cfg: &PropagatorConfig,
) -> Result<(StateVector, StepReport)> {
    if cfg.method != Method::Chebyshev {
        let cfg = PropagatorConfig { method: Method::Chebyshev, ..cfg.clone() };
        return run_single(h, psi, &cfg, Method::Chebyshev);
    }
    run_single(h, psi, cfg, Method::Chebyshev)
}

/// Number of terms to keep: the first `k >= max(1, |tau|)` whose coefficient
/// magnitude `2 |J_k(tau)|` is below `tol`. Terms `0..k` are summed.
fn term_count(bessel: &[f64], tau: f64, tol: f64) -> Option<usize> {
    let start = (tau.abs().ceil() as usize).max(1);
    (start..bessel.len()).find(|&k| 2.0 * bessel[k].abs() < tol)
}

/// Largest `|tau'| <= |tau|` whose series fits in `k_max` terms.
fn admissible_tau(tau: f64, tol: f64, k_max: usize) -> f64 {
    let fits = |t: f64| {
        bessel_j_sequence(t, k_max)
            .ok()
            .and_then(|j| term_count(&j, t, tol))
            .is_some()
    };
    let (mut lo, mut hi) = (0.0, tau.abs());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub(crate) fn step_in_place<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &mut StateVector,
    cfg: &PropagatorConfig,
    e0: f64,
    s: &mut Scratch,
) -> Result<StepReport> {
    if cfg.dt == 0.0 {
        return Ok(StepReport { terms_used: 1, matvecs: 0, last_term_norm: 0.0, norm_drift: 0.0 });
    }
    let e0 = e0.max(f64::MIN_POSITIVE);
    let tau = 0.5 * e0 * cfg.dt;
    let bessel = bessel_j_sequence(tau, cfg.k_max)?;
    let Some(terms) = term_count(&bessel, tau, cfg.tol) else {
        let cap = ((2.0 * tau.abs()) as usize + 100).max(MAX_K_MAX);
        let required_k = bessel_j_sequence(tau, cap)
            .ok()
            .and_then(|j| term_count(&j, tau, cfg.tol));
        let suggested = 2.0 * admissible_tau(tau, cfg.tol, cfg.k_max) / e0;
        return Err(Error::Convergence {
            k_max: cfg.k_max,
            required_k,
            last_term_norm: 2.0 * bessel[cfg.k_max].abs(),
            suggested_dt: Some(suggested),
            hint: match required_k {
                Some(k) => format!("tau = {tau:.4} needs {k} terms; reduce dt to <= {suggested:.4e}"),
                None => format!("tau = {tau:.4} is too large; reduce dt to <= {suggested:.4e}"),
            },
        });
    };

    let coeff = |k: usize| -> Complex64 {
        let a = if k == 0 { 1.0 } else { 2.0 };
        // (-i)^k
        let phase = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        phase * (a * bessel[k])
    };
    let scale = 2.0 / e0;
    let Scratch { prev, cur, next, acc, .. } = s;
    let x = psi.as_slice();

    prev.copy_from_slice(x);
    let c0 = coeff(0);
    for (a, p) in acc.iter_mut().zip(prev.iter()) {
        *a = c0 * p;
    }
    let mut matvecs = 0;
    if terms > 1 {
        h.apply_into(prev, cur);
        matvecs += 1;
        cur.iter_mut().for_each(|z| *z *= scale);
        let c1 = coeff(1);
        for (a, v) in acc.iter_mut().zip(cur.iter()) {
            *a += c1 * v;
        }
    }
    for k in 2..terms {
        h.apply_into(cur, next);
        matvecs += 1;
        let ck = coeff(k);
        for ((n, p), a) in next.iter_mut().zip(prev.iter()).zip(acc.iter_mut()) {
            *n = 2.0 * scale * *n - p;
            *a += ck * *n;
        }
        std::mem::swap(prev, cur);
        std::mem::swap(cur, next);
    }
    psi.as_mut_slice().copy_from_slice(acc);
    Ok(StepReport {
        terms_used: terms,
        matvecs,
        last_term_norm: 2.0 * bessel[terms].abs(),
        norm_drift: 0.0,
    })
}
