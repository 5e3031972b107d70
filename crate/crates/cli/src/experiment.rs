//! Builds a model from a [`RunConfig`], evolves it and writes the CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use polyprop::double_well::{
    bender_case, build_double_well_matrix, displaced_eigenstate_coeffs, position_observables,
    DoubleWellParams,
};
use polyprop::spin_bath::{
    build_hamiltonian, initial_state, reduced_density_matrix, s1z_expectation,
    von_neumann_entropy, SpinBathHamiltonian, SpinBathParams,
};
use polyprop::{
    evolve, expectation, Complex64, DenseHermitian, HermitianOperator, RunSummary, StateVector,
    TimeSeries,
};

use crate::config::{ConfigError, Experiment, ModelConfig, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("model setup failed: {0}")]
    Model(#[source] polyprop::Error),
    #[error("propagation failed: {0}")]
    Propagation(#[source] polyprop::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 when the series
    /// failed to converge, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Model(_) | RunError::Usage(_) => 2,
            RunError::Propagation(e) if e.is_convergence() => 3,
            _ => 1,
        }
    }
}

pub(crate) enum Operator {
    Spin(SpinBathHamiltonian),
    Dense(DenseHermitian),
}

impl HermitianOperator for Operator {
    fn dim(&self) -> usize {
        match self {
            Operator::Spin(h) => h.dim(),
            Operator::Dense(h) => h.dim(),
        }
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        match self {
            Operator::Spin(h) => h.apply_into(x, out),
            Operator::Dense(h) => h.apply_into(x, out),
        }
    }

    fn spectral_radius_bound(&self) -> Option<f64> {
        match self {
            Operator::Spin(h) => h.spectral_radius_bound(),
            Operator::Dense(h) => h.spectral_radius_bound(),
        }
    }

    fn dense(&self) -> Option<&DenseHermitian> {
        match self {
            Operator::Spin(_) => None,
            Operator::Dense(h) => Some(h),
        }
    }
}

/// A Hamiltonian, its initial state and how to observe it.
pub(crate) struct BuiltModel {
    pub h: Operator,
    pub psi0: StateVector,
    pub kind: Experiment,
    basis_omega: f64,
    shift: f64,
    pub metadata: Vec<String>,
}

impl BuiltModel {
    pub fn build(cfg: &RunConfig) -> Result<Self, RunError> {
        let mut metadata = Vec::new();
        let dw = |p: DoubleWellParams, shift: f64, metadata: &mut Vec<String>| {
            let h = build_double_well_matrix(&p).map_err(RunError::Model)?;
            let init = displaced_eigenstate_coeffs(&p).map_err(RunError::Model)?;
            metadata.push(format!("x0 = {:e}", p.x0()));
            metadata.push(format!("initial_leakage = {:e}", init.leakage));
            Ok::<_, RunError>((Operator::Dense(h), init.psi, p.basis_omega, shift))
        };
        let (h, psi0, basis_omega, shift) = match &cfg.model {
            ModelConfig::SpinBath { j, n, a_max } => {
                let p = SpinBathParams::sampled(*j, *n, *a_max, cfg.seed).map_err(RunError::Model)?;
                let couplings: Vec<String> = p.couplings.iter().map(|a| format!("{a:e}")).collect();
                metadata.push(format!("couplings = [{}]", couplings.join(", ")));
                let h = build_hamiltonian(&p).map_err(RunError::Model)?;
                let psi0 = initial_state(&p).map_err(RunError::Model)?;
                (Operator::Spin(h), psi0, 0.0, 0.0)
            }
            ModelConfig::DoubleWell { omega, lambda, n_basis, m, basis_omega } => {
                let p = DoubleWellParams::new(*omega, *lambda, *n_basis, *m)
                    .and_then(|p| p.with_basis_omega(basis_omega.unwrap_or(*omega)))
                    .map_err(RunError::Model)?;
                dw(p, 0.0, &mut metadata)?
            }
            ModelConfig::Bender { beta, n_basis, m } => {
                let b = bender_case(*beta).map_err(RunError::Model)?;
                let p = DoubleWellParams { n_basis: *n_basis, m: *m, ..b.params };
                p.validate().map_err(RunError::Model)?;
                metadata.push(format!("omega = {:e}, lambda = {:e}", p.omega, p.lambda));
                metadata.push(format!("q_shift = {:e}", b.shift));
                metadata.push(format!("dropped_constant = {:e}", b.dropped_constant));
                dw(p, b.shift, &mut metadata)?
            }
        };
        Ok(Self { h, psi0, kind: cfg.experiment(), basis_omega, shift, metadata })
    }

    pub fn columns(&self) -> [&'static str; 4] {
        match self.kind {
            Experiment::SpinBath => ["s1z", "entropy", "norm", "energy"],
            Experiment::DoubleWell => ["x_mean", "sigma", "norm", "energy"],
            Experiment::Bender => ["q_mean", "sigma", "norm", "energy"],
        }
    }

    /// The first recorded observable (`s1z`, `x_mean` or `q_mean`).
    pub fn primary(&self, psi: &StateVector) -> polyprop::Result<f64> {
        match self.kind {
            Experiment::SpinBath => s1z_expectation(psi),
            _ => Ok(position_observables(psi, self.basis_omega)?.0 + self.shift),
        }
    }

    pub fn observe(&self, psi: &StateVector) -> polyprop::Result<Vec<f64>> {
        let (a, b) = match self.kind {
            Experiment::SpinBath => {
                let rho = reduced_density_matrix(psi)?;
                (s1z_expectation(psi)?, von_neumann_entropy(&rho)?)
            }
            _ => {
                let (x, s) = position_observables(psi, self.basis_omega)?;
                (x + self.shift, s)
            }
        };
        Ok(vec![a, b, psi.norm(), expectation(&self.h, psi)?])
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub series: TimeSeries,
    pub summary: RunSummary,
    /// The `#` header lines written ahead of the CSV data, without the `#`.
    pub metadata: Vec<String>,
}

struct CsvSink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvSink {
    fn create(path: &Path) -> Result<Self, RunError> {
        let io = |source| RunError::Io { path: path.to_path_buf(), source };
        let file = File::create(path).map_err(io)?;
        Ok(Self { path: path.to_path_buf(), out: BufWriter::new(file) })
    }

    fn io(&self, source: std::io::Error) -> RunError {
        RunError::Io { path: self.path.clone(), source }
    }

    fn line(&mut self, text: &str) -> Result<(), RunError> {
        writeln!(self.out, "{text}").map_err(|e| self.io(e))
    }

    fn row(&mut self, t: f64, values: &[f64]) -> Result<(), RunError> {
        let mut line = format!("{t:.15e}");
        for v in values {
            line.push_str(&format!(",{v:.15e}"));
        }
        self.line(&line)
    }

    fn finish(mut self) -> Result<(), RunError> {
        self.out.flush().map_err(|e| self.io(e))
    }
}

/// Runs the configured experiment. When `cfg.output_path` is set the rows
/// are streamed to a CSV file as they are produced; if propagation fails
/// the rows so far are kept and a `# FAILED` line is appended.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    let model = BuiltModel::build(cfg)?;
    let columns = model.columns();

    let mut metadata = vec![
        format!("polyprop {VERSION}"),
        format!("experiment = {}", cfg.experiment().name()),
        format!("seed = {}", cfg.seed),
    ];
    metadata.extend(model.metadata.iter().cloned());
    metadata.push("config:".into());
    metadata.extend(cfg.to_toml().lines().filter(|l| !l.is_empty()).map(|l| format!("  {l}")));

    let mut sink = match &cfg.output_path {
        Some(path) => Some(CsvSink::create(path)?),
        None => None,
    };
    if let Some(s) = sink.as_mut() {
        for m in &metadata {
            s.line(&format!("# {m}"))?;
        }
        s.line(&format!("t,{}", columns.join(",")))?;
    }

    let mut write_error = None;
    let result = evolve(
        &model.h,
        &model.psi0,
        &cfg.propagator,
        cfg.n_steps,
        cfg.record_every,
        &columns,
        |t, psi| {
            let values = model.observe(psi)?;
            if let Some(s) = sink.as_mut() {
                if let Err(e) = s.row(t, &values) {
                    write_error = Some(e);
                    return Err(polyprop::Error::Usage("output write failed".into()));
                }
            }
            Ok(values)
        },
    );
    if let Some(e) = write_error {
        return Err(e);
    }
    match result {
        Ok(ev) => {
            if let Some(s) = sink {
                s.finish()?;
            }
            Ok(ExperimentOutput { series: ev.series, summary: ev.summary, metadata })
        }
        Err(e) => {
            if let Some(mut s) = sink {
                s.line(&format!("# FAILED: {e}"))?;
                s.finish()?;
            }
            Err(RunError::Propagation(e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn exit_codes() {
        let conv = polyprop::Error::Convergence {
            k_max: 30,
            required_k: None,
            last_term_norm: 1.0,
            suggested_dt: None,
            hint: String::new(),
        };
        assert_eq!(RunError::Propagation(conv).exit_code(), 3);
        assert_eq!(RunError::Usage("x".into()).exit_code(), 2);
        assert_eq!(RunError::Model(polyprop::Error::Usage("x".into())).exit_code(), 2);
    }

    #[test]
    fn columns_follow_the_experiment() {
        let cfg = parse_config(
            "[experiment]\nkind = \"bender\"\nn_steps = 3\n[propagator]\nmethod = \"laguerre\"\ndt = 0.01\n[model]\nbeta = 2.5\n",
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.series.columns(), &["q_mean", "sigma", "norm", "energy"]);
        assert_eq!(out.series.len(), 4);
        assert!(out.metadata.iter().any(|m| m.starts_with("dropped_constant")));
    }
}
