//! Polynomial-expansion steppers for `psi(t + dt) = exp(-i H dt) psi(t)`,
//! their coefficient machinery and time-step advisors, plus RK4 and
//! Adams-Bashforth-Moulton reference integrators.
//!
//! Series are truncated once two consecutive weighted terms fall below
//! `tol` (Chebyshev: once the Bessel coefficients do), and never beyond
//! `k_max`. A step that fails to converge returns [`Error::Convergence`]
//! carrying a suggested time step; `dt` is never changed silently.

mod advisor;
mod bessel;
mod chebyshev;
mod evolve;
mod hermite;
mod laguerre;
mod polynomials;
mod reference;
mod spectral;

pub use advisor::{suggest_dt_hermite, suggest_dt_laguerre};
pub use bessel::bessel_j_sequence;
pub use chebyshev::chebyshev_step;
pub use evolve::{evolve, Evolution, RunSummary};
pub use hermite::hermite_step;
pub use laguerre::laguerre_step;
pub use polynomials::{hermite_scalar, laguerre_scalar};
pub use reference::{abm4_step, rk4_step, AbmHistory};
pub use spectral::{estimate_spectral_bound, gershgorin_bound, power_iteration_bound};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::linalg::{norm_sqr, HermitianOperator, StateVector};
use crate::{Error, Result};

pub const DEFAULT_K_MAX: usize = 30;
pub const MAX_K_MAX: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Chebyshev,
    Hermite,
    Laguerre,
    Rk4,
    Abm4,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Chebyshev,
        Method::Hermite,
        Method::Laguerre,
        Method::Rk4,
        Method::Abm4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Chebyshev => "chebyshev",
            Method::Hermite => "hermite",
            Method::Laguerre => "laguerre",
            Method::Rk4 => "rk4",
            Method::Abm4 => "abm4",
        }
    }

    pub fn is_polynomial(self) -> bool {
        matches!(self, Method::Chebyshev | Method::Hermite | Method::Laguerre)
    }

    /// Default expansion scale: 1/2 for Hermite, 1 otherwise.
    pub fn default_lambda(self) -> f64 {
        match self {
            Method::Hermite => 0.5,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown method {s:?} (expected chebyshev, hermite, laguerre, rk4 or abm4)"
                ))
            })
    }
}

/// All knobs of a propagation step.
///
/// `lambda` is the argument scale of the Hermite and Laguerre expansions,
/// `alpha` the Laguerre type, and `e0` the Chebyshev spectral scale factor
/// (the spectrum of `H` must lie in `[-e0/2, e0/2]`). When `e0` is unset
/// it is estimated from the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    pub method: Method,
    pub dt: f64,
    pub tol: f64,
    pub k_max: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub e0: Option<f64>,
    /// Rescale to the input norm after each polynomial step. Off by default
    /// so that norm drift stays visible as a convergence diagnostic.
    pub renormalize: bool,
}

impl PropagatorConfig {
    pub fn new(method: Method, dt: f64) -> Self {
        Self {
            method,
            dt,
            tol: DEFAULT_TOL,
            k_max: DEFAULT_K_MAX,
            lambda: method.default_lambda(),
            alpha: -0.5,
            e0: None,
            renormalize: false,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_e0(mut self, e0: f64) -> Self {
        self.e0 = Some(e0);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    /// Checks parameter ranges. `dt` may be zero or negative (backward
    /// steps); callers that need a forward step check the sign themselves.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Usage(msg));
        if !self.dt.is_finite() {
            return bad(format!("dt must be finite, got {}", self.dt));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be > 0, got {}", self.tol));
        }
        if self.k_max == 0 || self.k_max > MAX_K_MAX {
            return bad(format!("k_max must be in 1..={MAX_K_MAX}, got {}", self.k_max));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be > 0, got {}", self.lambda));
        }
        if !(self.alpha > -1.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > -1, got {}", self.alpha));
        }
        if let Some(e0) = self.e0 {
            if !(e0 > 0.0 && e0.is_finite()) {
                return bad(format!("e0 must be > 0, got {e0}"));
            }
        }
        Ok(())
    }
}

/// Cost and accuracy diagnostics of one step.
///
/// For the polynomial methods `terms_used` counts the series terms summed
/// and `matvecs = terms_used - 1` (the zeroth term needs no product).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub terms_used: usize,
    pub matvecs: usize,
    /// Norm of the first term dropped (Chebyshev: its coefficient), or of
    /// the last term summed for the norm-based truncation.
    pub last_term_norm: f64,
    /// `||psi'|| - ||psi||` before any renormalization.
    pub norm_drift: f64,
}

/// Reusable buffers for the recursions.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    pub prev: Vec<Complex64>,
    pub cur: Vec<Complex64>,
    pub next: Vec<Complex64>,
    pub hv: Vec<Complex64>,
    pub acc: Vec<Complex64>,
}

impl Scratch {
    pub fn resize(&mut self, n: usize) {
        for v in [
            &mut self.prev,
            &mut self.cur,
            &mut self.next,
            &mut self.hv,
            &mut self.acc,
        ] {
            v.clear();
            v.resize(n, Complex64::new(0.0, 0.0));
        }
    }
}

/// Applies the configured method repeatedly, reusing scratch buffers and,
/// for `abm4`, the derivative history. Successive calls must pass the state
/// returned by the previous one.
pub struct Stepper<'a, H: HermitianOperator + ?Sized> {
    h: &'a H,
    cfg: PropagatorConfig,
    e0: Option<f64>,
    scratch: Scratch,
    history: Option<AbmHistory>,
}

impl<'a, H: HermitianOperator + ?Sized> Stepper<'a, H> {
    pub fn new(h: &'a H, cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        let e0 = match cfg.method {
            Method::Chebyshev => Some(match cfg.e0 {
                Some(e0) => e0,
                None => estimate_spectral_bound(h)?,
            }),
            _ => None,
        };
        let mut scratch = Scratch::default();
        scratch.resize(h.dim());
        Ok(Self {
            h,
            cfg,
            e0,
            scratch,
            history: None,
        })
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    /// The Chebyshev scale factor in use, if any.
    pub fn e0(&self) -> Option<f64> {
        self.e0
    }

    pub fn step(&mut self, psi: &mut StateVector) -> Result<StepReport> {
        if psi.dim() != self.h.dim() {
            return Err(Error::Usage(format!(
                "state dim {} does not match operator dim {}",
                psi.dim(),
                self.h.dim()
            )));
        }
        let before = psi.norm();
        let mut report = match self.cfg.method {
            Method::Chebyshev => {
                let e0 = self.e0.expect("chebyshev stepper resolves e0");
                chebyshev::step_in_place(self.h, psi, &self.cfg, e0, &mut self.scratch)?
            }
            Method::Hermite => hermite::step_in_place(self.h, psi, &self.cfg, &mut self.scratch)?,
            Method::Laguerre => {
                laguerre::step_in_place(self.h, psi, &self.cfg, &mut self.scratch)?
            }
            Method::Rk4 => reference::rk4_in_place(self.h, psi, self.cfg.dt, &mut self.scratch),
            Method::Abm4 => {
                let history = self.history.get_or_insert_with(AbmHistory::default);
                reference::abm4_in_place(self.h, history, psi, self.cfg.dt, &mut self.scratch)
            }
        };
        let after = psi.norm();
        report.norm_drift = after - before;
        if self.cfg.method.is_polynomial() {
            if self.cfg.renormalize && after > 0.0 {
                psi.scale(Complex64::new(before / after, 0.0));
            } else {
                let bound = 10.0 * self.cfg.tol;
                if report.norm_drift.abs() > bound {
                    return Err(Error::Unitarity {
                        drift: report.norm_drift.abs(),
                        bound,
                    });
                }
            }
        }
        Ok(report)
    }
}

/// Shared tail of the norm-truncated series (Hermite, Laguerre): tracks
/// whether two consecutive terms have fallen below `tol`.
#[derive(Debug)]
pub(crate) struct Truncation {
    tol: f64,
    below: usize,
}

impl Truncation {
    pub fn new(tol: f64) -> Self {
        Self { tol, below: 0 }
    }

    /// Records the norm of the latest term; true once the series may stop.
    pub fn done(&mut self, term_norm: f64) -> bool {
        if term_norm < self.tol {
            self.below += 1;
        } else {
            self.below = 0;
        }
        self.below >= 2
    }
}

pub(crate) fn slice_norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Rescales a pair of recursion vectors when they grow large; returns the
/// natural log of the factor removed.
pub(crate) fn rescale_pair(a: &mut [Complex64], b: &mut [Complex64]) -> f64 {
    let nb = slice_norm(b);
    if nb > 1e150 {
        let inv = 1.0 / nb;
        a.iter_mut().for_each(|z| *z *= inv);
        b.iter_mut().for_each(|z| *z *= inv);
        nb.ln()
    } else {
        0.0
    }
}

/// Root-mean-square energy `||H psi||`, the energy scale quoted in
/// convergence hints.
pub(crate) fn rms_energy(hpsi: &[Complex64]) -> f64 {
    slice_norm(hpsi)
}

fn run_single<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &StateVector,
    cfg: &PropagatorConfig,
    expected: Method,
) -> Result<(StateVector, StepReport)> {
    debug_assert_eq!(cfg.method, expected);
    let mut stepper = Stepper::new(h, cfg.clone())?;
    let mut out = psi.clone();
    let report = stepper.step(&mut out)?;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_follow_method() {
        let h = PropagatorConfig::new(Method::Hermite, 0.1);
        assert_eq!(h.lambda, 0.5);
        let l = PropagatorConfig::new(Method::Laguerre, 0.1);
        assert_eq!((l.lambda, l.alpha, l.k_max, l.tol), (1.0, -0.5, 30, 1e-6));
        assert!(!l.renormalize);
    }

    #[test]
    fn config_validation() {
        let base = PropagatorConfig::new(Method::Laguerre, 0.1);
        assert!(base.validate().is_ok());
        assert!(base.clone().with_alpha(-1.0).validate().is_err());
        assert!(base.clone().with_k_max(201).validate().is_err());
        assert!(base.clone().with_k_max(0).validate().is_err());
        assert!(base.clone().with_lambda(0.0).validate().is_err());
        assert!(base.clone().with_tol(0.0).validate().is_err());
        assert!(base.clone().with_e0(-1.0).validate().is_err());
        assert!(base.with_dt(f64::NAN).validate().is_err());
    }

    #[test]
    fn method_parsing() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("Laguerre".parse::<Method>().unwrap(), Method::Laguerre);
        assert!("taylor".parse::<Method>().is_err());
    }

    #[test]
    fn truncation_needs_two_small_terms() {
        let mut t = Truncation::new(1e-6);
        assert!(!t.done(1e-7));
        assert!(!t.done(1.0));
        assert!(!t.done(1e-7));
        assert!(t.done(1e-8));
    }
}
