//! Laguerre expansion from the generating function
//! `(1 - s)^{-a-1} exp(x s / (s - 1)) = sum_k L_k^a(x) s^k` with
//! `s = i dt / (l + i dt)` and `x = l H`:
//!
//! `psi(dt) = (l / (l + i dt))^{a+1} sum_k s^k phi_k`,
//! `phi_0 = psi`, `phi_1 = (a + 1 - l H) psi`,
//! `(k+1) phi_{k+1} = (2k + a + 1 - l H) phi_k - (k + a) phi_{k-1}`.
//!
//! The prefactor uses the principal branch; `l > 0` keeps its base in the
//! right half-plane.

use num_complex::Complex64;

use super::advisor::suggest_dt_laguerre;
use super::{
    rescale_pair, rms_energy, run_single, slice_norm, Method, PropagatorConfig, Scratch,
    StepReport, Truncation,
};
use crate::linalg::{HermitianOperator, StateVector};
use crate::{Error, Result};

pub fn laguerre_step<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &StateVector,
    cfg: &PropagatorConfig,
) -> Result<(StateVector, StepReport)> {
    let cfg = PropagatorConfig { method: Method::Laguerre, ..cfg.clone() };
    run_single(h, psi, &cfg, Method::Laguerre)
}

/// `|s| = |dt| / sqrt(lambda^2 + dt^2)`, the geometric ratio of the series.
pub fn laguerre_ratio(dt: f64, lambda: f64) -> f64 {
    dt.abs() / lambda.hypot(dt)
}

pub(crate) fn step_in_place<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &mut StateVector,
    cfg: &PropagatorConfig,
    sc: &mut Scratch,
) -> Result<StepReport> {
    if cfg.dt == 0.0 {
        return Ok(StepReport { terms_used: 1, matvecs: 0, last_term_norm: 0.0, norm_drift: 0.0 });
    }
    let lambda = cfg.lambda;
    let alpha = cfg.alpha;
    let denom = Complex64::new(lambda, cfg.dt);
    let ratio = Complex64::new(0.0, cfg.dt) / denom;
    let pref = (Complex64::new(lambda, 0.0) / denom).powf(alpha + 1.0);
    let ln_abs_ratio = ratio.norm().ln();
    let ratio_phase = ratio / ratio.norm();
    let pref_norm = pref.norm();

    let Scratch { prev, cur, next, hv, acc } = sc;
    let x = psi.as_slice();
    let mut trunc = Truncation::new(cfg.tol);

    prev.copy_from_slice(x);
    for (a, p) in acc.iter_mut().zip(prev.iter()) {
        *a = pref * p;
    }
    let mut last = pref_norm * slice_norm(prev);
    trunc.done(last);

    h.apply_into(prev, hv);
    let e_rms = rms_energy(hv);
    for ((c, p), v) in cur.iter_mut().zip(prev.iter()).zip(hv.iter()) {
        *c = (alpha + 1.0) * p - lambda * v;
    }
    let mut matvecs = 1;
    let mut ln_scale = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);

    for k in 1..cfg.k_max {
        phase *= ratio_phase;
        let ln_w = k as f64 * ln_abs_ratio + ln_scale;
        let w = pref * phase * ln_w.exp();
        for (a, c) in acc.iter_mut().zip(cur.iter()) {
            *a += w * c;
        }
        last = pref_norm * ln_w.exp() * slice_norm(cur);
        if trunc.done(last) {
            psi.as_mut_slice().copy_from_slice(acc);
            return Ok(StepReport {
                terms_used: k + 1,
                matvecs,
                last_term_norm: last,
                norm_drift: 0.0,
            });
        }
        if k + 1 == cfg.k_max {
            break;
        }
        h.apply_into(cur, next);
        matvecs += 1;
        let kf = k as f64;
        let diag = 2.0 * kf + alpha + 1.0;
        let inv = 1.0 / (kf + 1.0);
        for ((n, c), p) in next.iter_mut().zip(cur.iter()).zip(prev.iter()) {
            *n = (diag * c - lambda * *n - (kf + alpha) * p) * inv;
        }
        std::mem::swap(prev, cur);
        std::mem::swap(cur, next);
        ln_scale += rescale_pair(prev, cur);
    }

    let s_abs = laguerre_ratio(cfg.dt, lambda);
    // The advisor assumes lambda = 1; rescale energy and time for general lambda.
    let suggested = suggest_dt_laguerre(lambda * e_rms, cfg.k_max)
        .ok()
        .map(|t| lambda * t);
    Err(Error::Convergence {
        k_max: cfg.k_max,
        required_k: None,
        last_term_norm: last,
        suggested_dt: suggested,
        hint: match suggested {
            Some(dt) => format!(
                "Laguerre series not converged at |s| = {s_abs:.4}; for E_m = {e_rms:.4} the advisor bound is dt < {dt:.4e}"
            ),
            None => format!("Laguerre series not converged at |s| = {s_abs:.4}; reduce dt"),
        },
    })
}
