//! Hermite expansion from the generating function `exp(-s^2 + 2 s x)`:
//!
//! `psi(dt) = e^{-(dt/2l)^2} sum_k ((-i)^k / k!) (dt/2l)^k phi_k`,
//! `phi_0 = psi`, `phi_1 = 2l H psi`, `phi_{k+1} = 2l H phi_k - 2k phi_{k-1}`.

use num_complex::Complex64;

use super::advisor::suggest_dt_hermite;
use super::{
    rescale_pair, rms_energy, run_single, slice_norm, Method, PropagatorConfig, Scratch,
    StepReport, Truncation,
};
use crate::linalg::{HermitianOperator, StateVector};
use crate::{Error, Result};

pub fn hermite_step<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &StateVector,
    cfg: &PropagatorConfig,
) -> Result<(StateVector, StepReport)> {
    let cfg = PropagatorConfig { method: Method::Hermite, ..cfg.clone() };
    run_single(h, psi, &cfg, Method::Hermite)
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
    let s = cfg.dt / (2.0 * lambda);
    let ln_pref = -s * s;
    let ln_abs_s = s.abs().ln();
    // (-i sgn(s))^k
    let step_phase = Complex64::new(0.0, -s.signum());

    let Scratch { prev, cur, next, hv, acc } = sc;
    let x = psi.as_slice();
    let mut trunc = Truncation::new(cfg.tol);

    prev.copy_from_slice(x);
    let w0 = ln_pref.exp();
    for (a, p) in acc.iter_mut().zip(prev.iter()) {
        *a = w0 * p;
    }
    let mut last = w0 * slice_norm(prev);
    trunc.done(last);

    h.apply_into(prev, hv);
    let e_rms = rms_energy(hv);
    for (c, v) in cur.iter_mut().zip(hv.iter()) {
        *c = 2.0 * lambda * v;
    }
    let mut matvecs = 1;
    let mut ln_scale = 0.0;
    let mut ln_fact = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);

    for k in 1..cfg.k_max {
        ln_fact += (k as f64).ln();
        phase *= step_phase;
        let ln_w = ln_pref + k as f64 * ln_abs_s - ln_fact + ln_scale;
        let w = phase * ln_w.exp();
        for (a, c) in acc.iter_mut().zip(cur.iter()) {
            *a += w * c;
        }
        last = ln_w.exp() * slice_norm(cur);
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
        let two_k = 2.0 * k as f64;
        for (n, p) in next.iter_mut().zip(prev.iter()) {
            *n = 2.0 * lambda * *n - two_k * p;
        }
        std::mem::swap(prev, cur);
        std::mem::swap(cur, next);
        ln_scale += rescale_pair(prev, cur);
    }

    let suggested = suggest_dt_hermite(e_rms, cfg.k_max, lambda).ok();
    Err(Error::Convergence {
        k_max: cfg.k_max,
        required_k: None,
        last_term_norm: last,
        suggested_dt: suggested,
        hint: match suggested {
            Some(dt) => format!(
                "Hermite recursion not converged; for E_m = {e_rms:.4} the advisor bound is dt <= {dt:.4e}"
            ),
            None => "Hermite recursion not converged; reduce dt".into(),
        },
    })
}
