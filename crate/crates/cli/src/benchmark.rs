//! Cost comparison of propagators on a common model and horizon.

use std::fmt::Write as _;
use std::time::Instant;

use polyprop::{evolve, Method, PropagatorConfig, RunSummary};

use crate::config::RunConfig;
use crate::experiment::{BuiltModel, RunError};

/// Tolerance and term cap of the reference run the legs are compared to.
pub const REFERENCE_TOL: f64 = 1e-13;
pub const REFERENCE_K_MAX: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchLeg {
    pub method: Method,
    pub dt: f64,
    /// Overrides the base configuration's tolerance.
    pub tol: Option<f64>,
}

impl BenchLeg {
    pub fn new(method: Method, dt: f64) -> Self {
        Self { method, dt, tol: None }
    }
}

impl std::str::FromStr for BenchLeg {
    type Err = RunError;

    /// `method:dt` or `method:dt:tol`.
    fn from_str(s: &str) -> Result<Self, RunError> {
        let bad = || RunError::Usage(format!("leg {s:?} is not of the form method:dt[:tol]"));
        let mut parts = s.split(':');
        let method = parts
            .next()
            .ok_or_else(bad)?
            .parse::<Method>()
            .map_err(|e| RunError::Usage(e.to_string()))?;
        let dt = parts.next().ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
        let tol = match parts.next() {
            Some(t) => Some(t.trim().parse::<f64>().map_err(|_| bad())?),
            None => None,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { method, dt, tol })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub dt: f64,
    pub tol: f64,
    pub steps: usize,
    pub matvecs: usize,
    pub wall_seconds: f64,
    pub max_norm_drift: f64,
    /// Largest deviation of the primary observable from the reference run,
    /// over the shared sampling grid.
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub horizon: f64,
    pub observable: String,
    /// Description of the reference run.
    pub reference: String,
    pub rows: Vec<BenchRow>,
}

impl Comparison {
    pub fn row(&self, method: Method) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "horizon {} | deviation of {} vs {}", self.horizon, self.observable, self.reference);
        let _ = writeln!(
            s,
            "{:<10} {:>10} {:>9} {:>8} {:>10} {:>10} {:>12} {:>12}",
            "method", "dt", "tol", "steps", "matvecs", "wall [s]", "max drift", "max dev"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<10} {:>10} {:>9.1e} {:>8} {:>10} {:>10.3} {:>12.3e} {:>12.3e}",
                r.method.name(),
                r.dt,
                r.tol,
                r.steps,
                r.matvecs,
                r.wall_seconds,
                r.max_norm_drift,
                r.max_deviation
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,dt,tol,steps,matvecs,wall_seconds,max_norm_drift,max_deviation\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.15e},{:.15e},{},{},{:.6e},{:.15e},{:.15e}",
                r.method.name(),
                r.dt,
                r.tol,
                r.steps,
                r.matvecs,
                r.wall_seconds,
                r.max_norm_drift,
                r.max_deviation
            );
        }
        s
    }
}

/// Whole number of steps of size `dt` in `span`, if there is one.
fn steps_in(span: f64, dt: f64) -> Option<usize> {
    let n = (span / dt).round();
    (n >= 1.0 && (n * dt - span).abs() <= 1e-9 * span.abs().max(1.0)).then_some(n as usize)
}

struct Leg {
    summary: RunSummary,
    wall: f64,
    samples: Vec<f64>,
    max_drift: f64,
}

fn run_leg(model: &BuiltModel, cfg: &PropagatorConfig, steps: usize, every: usize) -> Result<Leg, RunError> {
    let mut max_drift: f64 = 0.0;
    let start = Instant::now();
    let ev = evolve(&model.h, &model.psi0, cfg, steps, every, &["obs"], |_, psi| {
        max_drift = max_drift.max((psi.norm() - 1.0).abs());
        Ok(vec![model.primary(psi)?])
    })
    .map_err(RunError::Propagation)?;
    let wall = start.elapsed().as_secs_f64();
    let samples = ev.series.column("obs").expect("column recorded");
    Ok(Leg { summary: ev.summary, wall, samples, max_drift: max_drift.max(ev.summary.max_norm_drift) })
}

/// Propagates the model of `base` to `horizon` with each leg and with a
/// tight Chebyshev reference.
///
/// Observables are compared on the grid of the coarsest leg, so every leg's
/// `dt` must divide that spacing and the horizon must be a whole number of
/// steps for every leg.
pub fn benchmark_compare(base: &RunConfig, legs: &[BenchLeg], horizon: f64) -> Result<Comparison, RunError> {
    if legs.is_empty() {
        return Err(RunError::Usage("no benchmark legs given".into()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(RunError::Usage(format!("horizon must be positive, got {horizon}")));
    }
    let grid = legs.iter().map(|l| l.dt).fold(0.0, f64::max);
    let mut plans = Vec::new();
    for leg in legs {
        let steps = steps_in(horizon, leg.dt).ok_or_else(|| {
            RunError::Usage(format!(
                "{} with dt = {} does not reach horizon {horizon} in whole steps",
                leg.method, leg.dt
            ))
        })?;
        let every = steps_in(grid, leg.dt).ok_or_else(|| {
            RunError::Usage(format!("dt = {} does not divide the sampling grid {grid}", leg.dt))
        })?;
        let cfg = PropagatorConfig {
            method: leg.method,
            dt: leg.dt,
            tol: leg.tol.unwrap_or(base.propagator.tol),
            lambda: if leg.method == base.propagator.method {
                base.propagator.lambda
            } else {
                leg.method.default_lambda()
            },
            ..base.propagator.clone()
        };
        cfg.validate().map_err(|e| RunError::Usage(e.to_string()))?;
        plans.push((cfg, steps, every));
    }

    let model = BuiltModel::build(base)?;
    let grid_steps = steps_in(horizon, grid).expect("grid is one of the leg steps");
    let reference_cfg = PropagatorConfig::new(Method::Chebyshev, grid)
        .with_tol(REFERENCE_TOL)
        .with_k_max(REFERENCE_K_MAX);
    let reference = run_leg(&model, &reference_cfg, grid_steps, 1)?;

    let mut rows = Vec::new();
    for (cfg, steps, every) in plans {
        let leg = run_leg(&model, &cfg, steps, every)?;
        let max_deviation = leg
            .samples
            .iter()
            .zip(&reference.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rows.push(BenchRow {
            method: cfg.method,
            dt: cfg.dt,
            tol: cfg.tol,
            steps,
            matvecs: leg.summary.matvecs,
            wall_seconds: leg.wall,
            max_norm_drift: leg.max_drift,
            max_deviation,
        });
    }
    Ok(Comparison {
        horizon,
        observable: model.columns()[0].to_string(),
        reference: format!("chebyshev dt={grid} tol={REFERENCE_TOL:e}"),
        rows,
    })
}
