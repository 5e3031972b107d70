//! Quartic double well `H = p^2/2 - w^2 x^2/2 + lambda x^4` in a truncated
//! harmonic-oscillator basis.
//!
//! In the basis of the oscillator with frequency `w` this reads
//! `H = -w/2 [(a+)^2 + a^2] + lambda/(4 w^2) (a+ + a)^4`. A different basis
//! frequency `wb` can be chosen; the matrix is then
//! `-(wb/4)(a+ - a)^2 - (w^2/(4 wb))(a+ + a)^2 + lambda/(4 wb^2)(a+ + a)^4`.
//!
//! Matrix elements are those of the untruncated operators restricted to the
//! first `n_basis` states, so there are no edge artifacts in the last rows.

use num_complex::Complex64;

use crate::eigen::{hermitian_eigen, EigenDecomposition, DEFAULT_MAX_SWEEPS};
use crate::linalg::{DenseHermitian, StateVector};
use crate::quadrature::{hermite_functions, GaussHermite};
use crate::{Error, Result};

pub const MAX_BASIS: usize = 4096;
pub const MAX_ORACLE_DIM: usize = 512;
pub const LEAKAGE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWellParams {
    pub omega: f64,
    pub lambda: f64,
    pub n_basis: usize,
    /// Index of the displaced oscillator eigenstate used as initial state.
    pub m: usize,
    pub basis_omega: f64,
}

impl DoubleWellParams {
    pub fn new(omega: f64, lambda: f64, n_basis: usize, m: usize) -> Result<Self> {
        let p = Self { omega, lambda, n_basis, m, basis_omega: omega };
        p.validate()?;
        Ok(p)
    }

    pub fn with_basis_omega(mut self, basis_omega: f64) -> Result<Self> {
        self.basis_omega = basis_omega;
        self.validate()?;
        Ok(self)
    }

    /// Right-hand well minimum `w / sqrt(4 lambda)`.
    pub fn x0(&self) -> f64 {
        self.omega / (4.0 * self.lambda).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("omega", self.omega)?;
        positive("lambda", self.lambda)?;
        positive("basis_omega", self.basis_omega)?;
        if !(2..=MAX_BASIS).contains(&self.n_basis) {
            return Err(Error::Usage(format!("n_basis must be in 2..={MAX_BASIS}, got {}", self.n_basis)));
        }
        if self.m >= self.n_basis {
            return Err(Error::Usage(format!("m = {} must be below n_basis = {}", self.m, self.n_basis)));
        }
        Ok(())
    }
}

/// `(a+ + a)^2` is pentadiagonal-free tridiagonal in steps of two:
/// diagonal `2i + 1`, and `sqrt((i+1)(i+2))` at `(i, i+2)`.
fn x2_elem(i: usize, j: usize) -> f64 {
    if i == j {
        (2 * i + 1) as f64
    } else if j == i + 2 || i == j + 2 {
        let lo = i.min(j) as f64;
        ((lo + 1.0) * (lo + 2.0)).sqrt()
    } else {
        0.0
    }
}

fn x4_elem(i: usize, j: usize) -> f64 {
    let lo = i.saturating_sub(2);
    (lo..=i + 2).map(|k| x2_elem(i, k) * x2_elem(k, j)).sum()
}

pub fn build_double_well_matrix(params: &DoubleWellParams) -> Result<DenseHermitian> {
    params.validate()?;
    let n = params.n_basis;
    let (w, wb, lam) = (params.omega, params.basis_omega, params.lambda);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..(i + 5).min(n) {
            if (j - i) % 2 == 1 {
                continue;
            }
            let x2 = x2_elem(i, j);
            // (a+ - a)^2 flips the sign of the diagonal of (a+ + a)^2
            let p2 = if i == j { -x2 } else { x2 };
            let v = -0.25 * wb * p2 - w * w / (4.0 * wb) * x2 + lam / (4.0 * wb * wb) * x4_elem(i, j);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    DenseHermitian::from_real(n, &data)
}

/// An initial state together with the weight lost to truncation.
#[derive(Debug, Clone)]
pub struct InitialState {
    pub psi: StateVector,
    pub leakage: f64,
}

/// The `m`-th oscillator eigenstate (frequency `omega`) centered on the
/// right well at `x0`.
pub fn displaced_eigenstate_coeffs(params: &DoubleWellParams) -> Result<InitialState> {
    displaced_eigenstate_at(params, params.x0())
}

/// As [`displaced_eigenstate_coeffs`] but centered at an arbitrary `center`.
pub fn displaced_eigenstate_at(params: &DoubleWellParams, center: f64) -> Result<InitialState> {
    params.validate()?;
    if !center.is_finite() {
        return Err(Error::Usage(format!("center must be finite, got {center}")));
    }
    let raw = if params.m == 0 && params.basis_omega == params.omega {
        coherent_coeffs(center * (params.omega / 2.0).sqrt(), params.n_basis)
    } else {
        quadrature_coeffs(params, center)?
    };
    let kept: f64 = raw.iter().map(|c| c * c).sum();
    let leakage = (1.0 - kept).max(0.0);
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::Truncation { leakage, limit: LEAKAGE_LIMIT });
    }
    let s = kept.sqrt();
    let psi = StateVector::new(raw.iter().map(|c| Complex64::new(c / s, 0.0)).collect())?;
    Ok(InitialState { psi, leakage })
}

/// `c_n = e^{-a^2/2} a^n / sqrt(n!)`, accumulated in log space.
fn coherent_coeffs(alpha: f64, n: usize) -> Vec<f64> {
    if alpha == 0.0 {
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        return c;
    }
    let ln_a = alpha.abs().ln();
    let mut ln_fact = 0.0;
    (0..n)
        .map(|k| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let mag = (-0.5 * alpha * alpha + k as f64 * ln_a - 0.5 * ln_fact).exp();
            if alpha < 0.0 && k % 2 == 1 {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

/// Overlaps `int psi_n^{wb}(x) phi_m^{w}(x - center) dx` by Gauss–Hermite
/// quadrature. The integrand is a polynomial times a single Gaussian, so a
/// rule of order `>= (n + m)/2 + 1` is exact.
fn quadrature_coeffs(params: &DoubleWellParams, center: f64) -> Result<Vec<f64>> {
    let n = params.n_basis;
    let (w, wb) = (params.omega, params.basis_omega);
    let rule = GaussHermite::new(2 * n + 16)?;
    let c = 0.5 * (w + wb);
    let mu = w * center / (w + wb);
    let ln_pref = 0.25 * (w * wb).ln() - 0.5 * c.ln();
    let mut out = vec![0.0; n];
    for (&y, &lw) in rule.nodes.iter().zip(&rule.ln_modified_weights) {
        let x = mu + y / c.sqrt();
        let basis = hermite_functions(wb.sqrt() * x, n);
        let phi = hermite_functions(w.sqrt() * (x - center), params.m + 1)[params.m];
        if phi.mantissa == 0.0 {
            continue;
        }
        for (o, b) in out.iter_mut().zip(&basis) {
            if b.mantissa != 0.0 {
                let sign = (b.mantissa * phi.mantissa).signum();
                *o += sign * (ln_pref + lw + b.ln_abs() + phi.ln_abs()).exp();
            }
        }
    }
    Ok(out)
}

/// `x psi` for `x = (a + a+) / sqrt(2 wb)`; the result has one extra
/// component since `a+` raises the top basis state.
fn apply_position(psi: &[Complex64], basis_omega: f64) -> Vec<Complex64> {
    let n = psi.len();
    let s = (0.5 / basis_omega).sqrt();
    (0..=n)
        .map(|i| {
            let mut v = Complex64::new(0.0, 0.0);
            if i > 0 {
                v += (i as f64).sqrt() * psi[i - 1];
            }
            if i + 1 < n {
                v += ((i + 1) as f64).sqrt() * psi[i + 1];
            }
            v * s
        })
        .collect()
}

/// `(<x>, sigma)` of a normalized state in the oscillator basis of
/// frequency `basis_omega`. The variance is formed as `||(x - <x>) psi||^2`
/// so it cannot go negative.
pub fn position_observables(psi: &StateVector, basis_omega: f64) -> Result<(f64, f64)> {
    if !(basis_omega > 0.0) {
        return Err(Error::Usage(format!("basis_omega must be positive, got {basis_omega}")));
    }
    let amp = psi.as_slice();
    let xpsi = apply_position(amp, basis_omega);
    let mean: f64 = amp.iter().zip(&xpsi).map(|(p, x)| (p.conj() * x).re).sum();
    let var: f64 = xpsi
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = amp.get(i).copied().unwrap_or_default();
            (x - mean * p).norm_sqr()
        })
        .sum();
    Ok((mean, var.sqrt()))
}

/// The Bender double well `p^2/2 + 4 q^2 (q - beta)^2 / beta^2` written in
/// `x = q - beta/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenderCase {
    pub params: DoubleWellParams,
    /// `<q> = <x> + shift`.
    pub shift: f64,
    /// Constant `beta^2/4` from completing the square, left out of `H`.
    pub dropped_constant: f64,
}

pub const BENDER_N_BASIS: usize = 32;

/// `4 q^2 (q - b)^2 / b^2 = (4/b^2) x^4 - 2 x^2 + b^2/4`, so `lambda = 4/b^2`
/// and `w = 2`, which puts the right-hand minimum at `x0 = b/2`.
pub fn bender_case(beta: f64) -> Result<BenderCase> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Usage(format!("beta must be positive, got {beta}")));
    }
    let params = DoubleWellParams::new(2.0, 4.0 / (beta * beta), BENDER_N_BASIS, 0)?;
    Ok(BenderCase { params, shift: beta / 2.0, dropped_constant: beta * beta / 4.0 })
}

/// Exact propagation `V e^{-i L t} V+ psi0` from a full eigendecomposition.
#[derive(Debug, Clone)]
pub struct ExactDiagOracle {
    eig: EigenDecomposition,
}

impl ExactDiagOracle {
    pub fn new(h: &DenseHermitian) -> Result<Self> {
        if h.n() > MAX_ORACLE_DIM {
            return Err(Error::Usage(format!(
                "exact diagonalization is limited to n <= {MAX_ORACLE_DIM}, got {}",
                h.n()
            )));
        }
        Ok(Self { eig: hermitian_eigen(h, 1e-15, DEFAULT_MAX_SWEEPS)? })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        let n = self.eig.n;
        if psi0.dim() != n {
            return Err(Error::Usage(format!("state has dimension {}, oracle {n}", psi0.dim())));
        }
        let v = &self.eig.vectors;
        let p = psi0.as_slice();
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let proj: Complex64 = (0..n).map(|i| v[i * n + j].conj() * p[i]).sum();
            *c = proj * Complex64::from_polar(1.0, -self.eig.values[j] * t);
        }
        let out = (0..n).map(|i| (0..n).map(|j| v[i * n + j] * coeff[j]).sum()).collect();
        StateVector::new(out)
    }
}

pub fn exact_diag_oracle(h: &DenseHermitian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    ExactDiagOracle::new(h)?.evolve(psi0, t)
}
