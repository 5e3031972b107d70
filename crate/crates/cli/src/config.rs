//! Run configuration files.
//!
//! A configuration is a TOML document with four sections:
//!
//! ```toml
//! [experiment]
//! kind = "spin_bath"      # spin_bath | double_well | bender
//! n_steps = 900
//! seed = 42
//!
//! [propagator]
//! method = "laguerre"     # chebyshev | hermite | laguerre | rk4 | abm4
//! dt = 0.036
//!
//! [model]
//! J = 16
//! N = 4
//!
//! [output]
//! path = "run.csv"
//! record_every = 1
//! ```
//!
//! Unknown sections and keys are rejected. Errors name the offending key and,
//! when it came from the file, its line.

use std::fmt;
use std::path::PathBuf;

use polyprop::double_well::{DoubleWellParams, BENDER_N_BASIS, MAX_BASIS};
use polyprop::propagators::{DEFAULT_K_MAX, DEFAULT_TOL, MAX_K_MAX};
use polyprop::spin_bath::{DEFAULT_A_MAX, MAX_BATH_SPINS};
use polyprop::{Method, PropagatorConfig};
use toml::{Table, Value};

pub const DEFAULT_N_STEPS: usize = 900;
pub const DEFAULT_DW_N_BASIS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self { key: None, line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "`{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SpinBath,
    DoubleWell,
    Bender,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpinBath => "spin_bath",
            Experiment::DoubleWell => "double_well",
            Experiment::Bender => "bender",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Experiment::SpinBath, Experiment::DoubleWell, Experiment::Bender]
            .into_iter()
            .find(|e| e.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    SpinBath { j: f64, n: usize, a_max: f64 },
    DoubleWell { omega: f64, lambda: f64, n_basis: usize, m: usize, basis_omega: Option<f64> },
    Bender { beta: f64, n_basis: usize, m: usize },
}

impl ModelConfig {
    pub fn experiment(&self) -> Experiment {
        match self {
            ModelConfig::SpinBath { .. } => Experiment::SpinBath,
            ModelConfig::DoubleWell { .. } => Experiment::DoubleWell,
            ModelConfig::Bender { .. } => Experiment::Bender,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub propagator: PropagatorConfig,
    pub n_steps: usize,
    pub seed: u64,
    pub record_every: usize,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn experiment(&self) -> Experiment {
        self.model.experiment()
    }

    /// The configuration as a TOML document that parses back to `self`.
    pub fn to_toml(&self) -> String {
        let mut experiment = Table::new();
        experiment.insert("kind".into(), self.experiment().name().into());
        experiment.insert("n_steps".into(), int(self.n_steps));
        experiment.insert("seed".into(), Value::Integer(self.seed as i64));

        let p = &self.propagator;
        let mut prop = Table::new();
        prop.insert("method".into(), p.method.name().into());
        prop.insert("dt".into(), p.dt.into());
        prop.insert("tol".into(), p.tol.into());
        prop.insert("k_max".into(), int(p.k_max));
        prop.insert("lambda".into(), p.lambda.into());
        prop.insert("alpha".into(), p.alpha.into());
        if let Some(e0) = p.e0 {
            prop.insert("e0".into(), e0.into());
        }
        prop.insert("renormalize".into(), p.renormalize.into());

        let mut model = Table::new();
        match &self.model {
            ModelConfig::SpinBath { j, n, a_max } => {
                model.insert("J".into(), (*j).into());
                model.insert("N".into(), int(*n));
                model.insert("a_max".into(), (*a_max).into());
            }
            ModelConfig::DoubleWell { omega, lambda, n_basis, m, basis_omega } => {
                model.insert("omega".into(), (*omega).into());
                model.insert("lambda".into(), (*lambda).into());
                model.insert("n_basis".into(), int(*n_basis));
                model.insert("m".into(), int(*m));
                if let Some(wb) = basis_omega {
                    model.insert("basis_omega".into(), (*wb).into());
                }
            }
            ModelConfig::Bender { beta, n_basis, m } => {
                model.insert("beta".into(), (*beta).into());
                model.insert("n_basis".into(), int(*n_basis));
                model.insert("m".into(), int(*m));
            }
        }

        let mut output = Table::new();
        if let Some(path) = &self.output_path {
            output.insert("path".into(), path.display().to_string().into());
        }
        output.insert("record_every".into(), int(self.record_every));

        let mut doc = Table::new();
        doc.insert("experiment".into(), experiment.into());
        doc.insert("propagator".into(), prop.into());
        doc.insert("model".into(), model.into());
        doc.insert("output".into(), output.into());
        toml::to_string(&doc).expect("plain tables serialize")
    }
}

fn int(v: usize) -> Value {
    Value::Integer(v as i64)
}

/// Parses a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &[])
}

/// Parses `text`, then applies `section.key=value` overrides.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut doc: Table = text.parse().map_err(|e: toml::de::Error| ConfigError {
        key: None,
        line: e.span().map(|s| line_at(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let mut overridden = Vec::new();
    for o in overrides {
        overridden.push(apply_override(&mut doc, o)?);
    }
    Builder { text, doc, overridden, missing: Vec::new() }.build()
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn apply_override(doc: &mut Table, arg: &str) -> Result<String, ConfigError> {
    let bad = || ConfigError::new(format!("override {arg:?} is not of the form section.key=value"));
    let (path, raw) = arg.split_once('=').ok_or_else(bad)?;
    let (section, key) = path.trim().split_once('.').ok_or_else(bad)?;
    let (section, key, raw) = (section.trim(), key.trim(), raw.trim());
    if section.is_empty() || key.is_empty() {
        return Err(bad());
    }
    // bare words are taken as strings so `--set propagator.method=rk4` works
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = doc.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
    let table = entry.as_table_mut().ok_or_else(|| ConfigError {
        key: Some(section.to_string()),
        line: None,
        message: "is not a section".into(),
    })?;
    table.insert(key.to_string(), value);
    Ok(format!("{section}.{key}"))
}

const SECTIONS: [&str; 4] = ["experiment", "propagator", "model", "output"];

struct Builder<'a> {
    text: &'a str,
    doc: Table,
    overridden: Vec<String>,
    missing: Vec<String>,
}

impl Builder<'_> {
    /// Line of `key` inside `[section]`, or of the section header when
    /// `key` is `None`.
    fn line_of(&self, section: &str, key: Option<&str>) -> Option<usize> {
        let mut current = "";
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
                current = name.trim();
                if key.is_none() && current == section {
                    return Some(i + 1);
                }
                continue;
            }
            if let (Some(key), true) = (key, current == section) {
                if let Some((k, _)) = line.split_once('=') {
                    if k.trim().trim_matches('"') == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let full = format!("{section}.{key}");
        let mut message = message.into();
        let line = if self.overridden.contains(&full) {
            message.push_str(" (from --set)");
            None
        } else {
            self.line_of(section, Some(key))
        };
        ConfigError { key: Some(full), line, message }
    }

    fn section(&mut self, name: &str) -> Result<Table, ConfigError> {
        match self.doc.remove(name) {
            None => Ok(Table::new()),
            Some(Value::Table(t)) => Ok(t),
            Some(_) => Err(ConfigError {
                key: Some(name.into()),
                line: self.line_of("", Some(name)),
                message: "must be a [section]".into(),
            }),
        }
    }

    fn build(mut self) -> Result<RunConfig, ConfigError> {
        if let Some(unknown) = self.doc.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
            let line = self.line_of(unknown, None).or_else(|| self.line_of("", Some(unknown)));
            return Err(ConfigError {
                key: Some(unknown.clone()),
                line,
                message: format!("unknown section (expected one of {})", SECTIONS.join(", ")),
            });
        }
        let mut exp = Section { name: "experiment", table: self.section("experiment")? };
        let mut prop = Section { name: "propagator", table: self.section("propagator")? };
        let mut model = Section { name: "model", table: self.section("model")? };
        let mut out = Section { name: "output", table: self.section("output")? };

        let kind = match exp.string(&mut self, "kind")? {
            None => None,
            Some(s) => Some(Experiment::parse(&s).ok_or_else(|| {
                self.err("experiment", "kind", format!("unknown experiment {s:?} (expected spin_bath, double_well or bender)"))
            })?),
        };
        let n_steps = exp.count(&self, "n_steps", 0)?.unwrap_or(DEFAULT_N_STEPS);
        let seed = exp.count(&self, "seed", 0)?.unwrap_or(0) as u64;

        let method = match prop.string(&mut self, "method")? {
            None => None,
            Some(s) => Some(
                s.parse::<Method>().map_err(|e| self.err("propagator", "method", e.to_string()))?,
            ),
        };
        let dt = prop.positive(&mut self, "dt", true)?;
        let tol = prop.positive(&mut self, "tol", false)?.unwrap_or(DEFAULT_TOL);
        let k_max = prop.count(&self, "k_max", 1)?.unwrap_or(DEFAULT_K_MAX);
        if k_max > MAX_K_MAX {
            return Err(self.err("propagator", "k_max", format!("must be at most {MAX_K_MAX}")));
        }
        let lambda = prop.positive(&mut self, "lambda", false)?;
        let alpha = prop.real(&mut self, "alpha", false)?.unwrap_or(-0.5);
        if alpha <= -1.0 {
            return Err(self.err("propagator", "alpha", "must be greater than -1"));
        }
        let e0 = prop.positive(&mut self, "e0", false)?;
        let renormalize = prop.boolean(&self, "renormalize")?.unwrap_or(false);

        let model_cfg = match kind {
            Some(Experiment::SpinBath) => {
                let j = model.real(&mut self, "J", true)?;
                let n = model.count(&self, "N", 0)?;
                if n.is_none() {
                    self.missing.push("model.N".into());
                }
                if n.is_some_and(|n| n > MAX_BATH_SPINS) {
                    return Err(self.err("model", "N", format!("must be at most {MAX_BATH_SPINS}")));
                }
                let a_max = model.positive(&mut self, "a_max", false)?.unwrap_or(DEFAULT_A_MAX);
                j.zip(n).map(|(j, n)| ModelConfig::SpinBath { j, n, a_max })
            }
            Some(Experiment::DoubleWell) => {
                let omega = model.positive(&mut self, "omega", true)?;
                let lambda = model.positive(&mut self, "lambda", true)?;
                let n_basis = model.count(&self, "n_basis", 2)?.unwrap_or(DEFAULT_DW_N_BASIS);
                let m = model.count(&self, "m", 0)?.unwrap_or(0);
                let basis_omega = model.positive(&mut self, "basis_omega", false)?;
                self.check_basis(n_basis, m)?;
                omega.zip(lambda).map(|(omega, lambda)| ModelConfig::DoubleWell {
                    omega,
                    lambda,
                    n_basis,
                    m,
                    basis_omega,
                })
            }
            Some(Experiment::Bender) => {
                let beta = model.positive(&mut self, "beta", true)?;
                let n_basis = model.count(&self, "n_basis", 2)?.unwrap_or(BENDER_N_BASIS);
                let m = model.count(&self, "m", 0)?.unwrap_or(0);
                self.check_basis(n_basis, m)?;
                beta.map(|beta| ModelConfig::Bender { beta, n_basis, m })
            }
            None => None,
        };

        let output_path = out.string(&mut self, "path")?.map(PathBuf::from);
        let record_every = out.count(&self, "record_every", 1)?.unwrap_or(1);

        if !self.missing.is_empty() {
            return Err(ConfigError::new(format!("missing required keys: {}", self.missing.join(", "))));
        }
        for s in [&exp, &prop, &model, &out] {
            if let Some(key) = s.table.keys().next() {
                return Err(self.err(s.name, key, "unknown key"));
            }
        }

        let method = method.expect("checked by missing list");
        let mut propagator = PropagatorConfig::new(method, dt.expect("checked by missing list"))
            .with_tol(tol)
            .with_k_max(k_max)
            .with_alpha(alpha);
        if let Some(l) = lambda {
            propagator = propagator.with_lambda(l);
        }
        if let Some(e0) = e0 {
            propagator = propagator.with_e0(e0);
        }
        propagator.renormalize = renormalize;
        propagator.validate().map_err(|e| ConfigError::new(e.to_string()))?;

        let model = model_cfg.expect("checked by missing list");
        if let ModelConfig::DoubleWell { omega, lambda, n_basis, m, basis_omega } = &model {
            let p = DoubleWellParams::new(*omega, *lambda, *n_basis, *m)
                .and_then(|p| p.with_basis_omega(basis_omega.unwrap_or(*omega)));
            p.map_err(|e| ConfigError::new(e.to_string()))?;
        }
        Ok(RunConfig { model, propagator, n_steps, seed, record_every, output_path })
    }

    fn check_basis(&self, n_basis: usize, m: usize) -> Result<(), ConfigError> {
        if n_basis > MAX_BASIS {
            return Err(self.err("model", "n_basis", format!("must be at most {MAX_BASIS}")));
        }
        if m >= n_basis {
            return Err(self.err("model", "m", format!("must be below n_basis = {n_basis}")));
        }
        Ok(())
    }
}

struct Section {
    name: &'static str,
    table: Table,
}

impl Section {
    fn take(&mut self, b: &mut Builder, key: &str, required: bool) -> Option<Value> {
        let v = self.table.remove(key);
        if v.is_none() && required {
            b.missing.push(format!("{}.{key}", self.name));
        }
        v
    }

    fn string(&mut self, b: &mut Builder, key: &str) -> Result<Option<String>, ConfigError> {
        let required = matches!((self.name, key), ("experiment", "kind") | ("propagator", "method"));
        match self.take(b, key, required) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(b.err(self.name, key, format!("expected a string, found {}", v.type_str()))),
        }
    }

    fn real(&mut self, b: &mut Builder, key: &str, required: bool) -> Result<Option<f64>, ConfigError> {
        match self.take(b, key, required) {
            None => Ok(None),
            Some(Value::Float(x)) if x.is_finite() => Ok(Some(x)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(v) => Err(b.err(self.name, key, format!("expected a finite number, found {}", describe(&v)))),
        }
    }

    fn positive(&mut self, b: &mut Builder, key: &str, required: bool) -> Result<Option<f64>, ConfigError> {
        match self.real(b, key, required)? {
            Some(x) if x <= 0.0 => Err(b.err(self.name, key, format!("must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    fn count(&mut self, b: &Builder, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= min as i64 => Ok(Some(i as usize)),
            Some(Value::Integer(i)) => Err(b.err(self.name, key, format!("must be at least {min}, got {i}"))),
            Some(v) => Err(b.err(self.name, key, format!("expected an integer, found {}", describe(&v)))),
        }
    }

    fn boolean(&mut self, b: &Builder, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Boolean(x)) => Ok(Some(x)),
            Some(v) => Err(b.err(self.name, key, format!("expected true or false, found {}", describe(&v)))),
        }
    }
}

fn describe(v: &Value) -> String {
    match v {
        Value::String(s) => format!("string {s:?}"),
        other => other.type_str().to_string(),
    }
}
