//! Classical ODE integrators for `d psi/dt = -i H psi`: fourth-order
//! Runge-Kutta (4 matvecs per step) and Adams-Bashforth-Moulton PECE
//! (2 matvecs per step after an RK4 bootstrap).

use std::collections::VecDeque;

use num_complex::Complex64;

use super::{Scratch, StepReport};
use crate::linalg::{HermitianOperator, StateVector};
use crate::{Error, Result};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

fn derivative<H: HermitianOperator + ?Sized>(h: &H, x: &[Complex64], out: &mut [Complex64]) {
    h.apply_into(x, out);
    out.iter_mut().for_each(|z| *z *= MINUS_I);
}

pub fn rk4_step<H: HermitianOperator + ?Sized>(h: &H, psi: &StateVector, dt: f64) -> Result<StateVector> {
    check_dim(h, psi)?;
    let mut out = psi.clone();
    let mut sc = Scratch::default();
    sc.resize(psi.dim());
    rk4_in_place(h, &mut out, dt, &mut sc);
    Ok(out)
}

fn check_dim<H: HermitianOperator + ?Sized>(h: &H, psi: &StateVector) -> Result<()> {
    if h.dim() != psi.dim() {
        return Err(Error::Usage(format!(
            "state dim {} does not match operator dim {}",
            psi.dim(),
            h.dim()
        )));
    }
    Ok(())
}

pub(crate) fn rk4_in_place<H: HermitianOperator + ?Sized>(
    h: &H,
    psi: &mut StateVector,
    dt: f64,
    sc: &mut Scratch,
) -> StepReport {
    let Scratch { prev: k, cur: stage, acc, .. } = sc;
    let y = psi.as_mut_slice();
    acc.copy_from_slice(y);

    // k1
    derivative(h, y, k);
    for ((s, a), (&yi, &ki)) in stage.iter_mut().zip(acc.iter_mut()).zip(y.iter().zip(k.iter())) {
        *s = yi + 0.5 * dt * ki;
        *a += dt / 6.0 * ki;
    }
    // k2
    derivative(h, stage, k);
    for ((s, a), (&yi, &ki)) in stage.iter_mut().zip(acc.iter_mut()).zip(y.iter().zip(k.iter())) {
        *s = yi + 0.5 * dt * ki;
        *a += dt / 3.0 * ki;
    }
    // k3
    derivative(h, stage, k);
    for ((s, a), (&yi, &ki)) in stage.iter_mut().zip(acc.iter_mut()).zip(y.iter().zip(k.iter())) {
        *s = yi + dt * ki;
        *a += dt / 3.0 * ki;
    }
    // k4
    derivative(h, stage, k);
    for (a, &ki) in acc.iter_mut().zip(k.iter()) {
        *a += dt / 6.0 * ki;
    }
    y.copy_from_slice(acc);
    StepReport { terms_used: 1, matvecs: 4, last_term_norm: 0.0, norm_drift: 0.0 }
}

/// Derivatives `f_n, f_{n-1}, f_{n-2}, f_{n-3}` (most recent first) at the
/// last four accepted states.
#[derive(Debug, Clone, Default)]
pub struct AbmHistory {
    derivs: VecDeque<Vec<Complex64>>,
    dt: Option<f64>,
}

impl AbmHistory {
    pub fn len(&self) -> usize {
        self.derivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivs.is_empty()
    }

    pub fn is_ready(&self) -> bool {
        self.derivs.len() == 4
    }

    fn push(&mut self, f: Vec<Complex64>) {
        self.derivs.push_front(f);
        self.derivs.truncate(4);
    }
}

/// One Adams-Bashforth-Moulton step. While `history` holds fewer than four
/// derivatives the step is taken with RK4 instead, so a fresh history
/// bootstraps itself over the first three calls.
pub fn abm4_step<H: HermitianOperator + ?Sized>(
    h: &H,
    history: &mut AbmHistory,
    psi: &StateVector,
    dt: f64,
) -> Result<(StateVector, StepReport)> {
    check_dim(h, psi)?;
    if let Some(f) = history.derivs.front() {
        if f.len() != psi.dim() {
            return Err(Error::Usage("ABM history has the wrong dimension".into()));
        }
    }
    let mut out = psi.clone();
    let mut sc = Scratch::default();
    sc.resize(psi.dim());
    let rep = abm4_in_place(h, history, &mut out, dt, &mut sc);
    Ok((out, rep))
}

pub(crate) fn abm4_in_place<H: HermitianOperator + ?Sized>(
    h: &H,
    history: &mut AbmHistory,
    psi: &mut StateVector,
    dt: f64,
    sc: &mut Scratch,
) -> StepReport {
    if history.dt.is_some_and(|d| d != dt) {
        history.derivs.clear();
    }
    history.dt = Some(dt);
    let n = psi.dim();
    let mut matvecs = 0;
    if history.is_empty() {
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        derivative(h, psi.as_slice(), &mut f);
        history.push(f);
        matvecs += 1;
    }
    if !history.is_ready() {
        let rep = rk4_in_place(h, psi, dt, sc);
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        derivative(h, psi.as_slice(), &mut f);
        history.push(f);
        return StepReport { matvecs: matvecs + rep.matvecs + 1, ..rep };
    }

    let y = psi.as_mut_slice();
    let (f0, f1, f2, f3) = (&history.derivs[0], &history.derivs[1], &history.derivs[2], &history.derivs[3]);
    let c = dt / 24.0;
    let Scratch { cur: pred, next: fp, .. } = sc;
    for i in 0..n {
        pred[i] = y[i] + c * (55.0 * f0[i] - 59.0 * f1[i] + 37.0 * f2[i] - 9.0 * f3[i]);
    }
    derivative(h, pred, fp);
    for i in 0..n {
        y[i] += c * (9.0 * fp[i] + 19.0 * f0[i] - 5.0 * f1[i] + f2[i]);
    }
    let mut f = history.derivs.pop_back().expect("history holds four entries");
    derivative(h, y, &mut f);
    history.push(f);
    StepReport { terms_used: 1, matvecs: 2, last_term_norm: 0.0, norm_drift: 0.0 }
}
