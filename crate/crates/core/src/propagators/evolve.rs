use super::{PropagatorConfig, Stepper};
use crate::linalg::{HermitianOperator, StateVector};
use crate::series::TimeSeries;
use crate::{Error, Result};

/// Aggregate cost of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunSummary {
    pub steps: usize,
    pub matvecs: usize,
    pub terms_used: usize,
    pub max_terms_per_step: usize,
    /// Largest `| ||psi(t)|| - 1 |` seen after any step.
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: TimeSeries,
    pub summary: RunSummary,
    pub state: StateVector,
}

/// Applies the configured stepper `n_steps` times from `psi0`.
///
/// `observer` is called at `t = 0` and after every `record_every`-th step
/// (and after the final one); its values form one row of the returned
/// series under `columns`. Errors from a step are wrapped in
/// [`Error::Step`] with the 1-based step index.
pub fn evolve<H, F>(
    h: &H,
    psi0: &StateVector,
    cfg: &PropagatorConfig,
    n_steps: usize,
    record_every: usize,
    columns: &[&str],
    mut observer: F,
) -> Result<Evolution>
where
    H: HermitianOperator + ?Sized,
    F: FnMut(f64, &StateVector) -> Result<Vec<f64>>,
{
    if record_every == 0 {
        return Err(Error::Usage("record_every must be >= 1".into()));
    }
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::Usage(format!("initial state is not normalized (norm {n0})")));
    }
    let mut stepper = Stepper::new(h, cfg.clone())?;
    let mut series = TimeSeries::new(columns.iter().copied());
    let mut psi = psi0.clone();
    series.push(0.0, observer(0.0, &psi)?)?;

    let mut summary = RunSummary::default();
    for step in 1..=n_steps {
        let rep = stepper
            .step(&mut psi)
            .map_err(|e| Error::Step { step, source: Box::new(e) })?;
        summary.steps += 1;
        summary.matvecs += rep.matvecs;
        summary.terms_used += rep.terms_used;
        summary.max_terms_per_step = summary.max_terms_per_step.max(rep.terms_used);
        summary.max_norm_drift = summary.max_norm_drift.max((psi.norm() - 1.0).abs());
        if step % record_every == 0 || step == n_steps {
            let t = step as f64 * cfg.dt;
            series.push(t, observer(t, &psi)?)?;
        }
    }
    Ok(Evolution { series, summary, state: psi })
}
