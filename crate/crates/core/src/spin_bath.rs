//! Two central spins coupled to a bath of non-interacting spins:
//!
//! `H = 2J s1.s2 + sum_k A_k (s1 + s2).I_k`
//!
//! Basis index bits are laid out as `(s1 s2 I_1 ... I_N)` with `s1` the most
//! significant bit; bit value 1 is spin up. The Hamiltonian is applied
//! matrix-free: each Heisenberg pair contributes `+-c/4` on the diagonal and
//! a flip-flop amplitude `c/2` between states whose two bits differ.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::hermitian_eigenvalues;
use crate::linalg::{DenseHermitian, HermitianOperator, StateVector, PAR_THRESHOLD};
use crate::{Error, Result};

/// Largest supported bath (Hilbert space dimension `2^(N+2)`).
pub const MAX_BATH_SPINS: usize = 24;

/// Default upper end of the coupling distribution `A_k ~ U[0, a_max]`.
pub const DEFAULT_A_MAX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinBathParams {
    pub j: f64,
    pub couplings: Vec<f64>,
    pub seed: u64,
}

impl SpinBathParams {
    /// Bath of `n` spins with couplings drawn from `U[0, a_max]`.
    pub fn sampled(j: f64, n: usize, a_max: f64, seed: u64) -> Result<Self> {
        let params = Self { j, couplings: sample_couplings(n, a_max, seed)?, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn n_bath(&self) -> usize {
        self.couplings.len()
    }

    pub fn dim(&self) -> usize {
        1 << (self.n_bath() + 2)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j.is_finite() {
            return Err(Error::Usage(format!("J must be finite, got {}", self.j)));
        }
        if self.n_bath() > MAX_BATH_SPINS {
            return Err(Error::Usage(format!(
                "bath of {} spins exceeds the limit of {MAX_BATH_SPINS}",
                self.n_bath()
            )));
        }
        if let Some(a) = self.couplings.iter().find(|a| !a.is_finite()) {
            return Err(Error::Usage(format!("coupling {a} is not finite")));
        }
        Ok(())
    }
}

/// `n` i.i.d. couplings uniform in `[0, a_max]`, reproducible per seed.
pub fn sample_couplings(n: usize, a_max: f64, seed: u64) -> Result<Vec<f64>> {
    if !(a_max > 0.0 && a_max.is_finite()) {
        return Err(Error::Usage(format!("A_max must be > 0, got {a_max}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.random_range(0.0..=a_max)).collect())
}

/// One Heisenberg pair `c s_a.s_b` acting on bits `a` and `b`.
#[derive(Debug, Clone, Copy)]
struct Pair {
    mask: usize,
    quarter: f64,
    half: f64,
}

#[derive(Debug, Clone)]
pub struct SpinBathHamiltonian {
    params: SpinBathParams,
    pairs: Vec<Pair>,
    dim: usize,
}

pub fn build_hamiltonian(params: &SpinBathParams) -> Result<SpinBathHamiltonian> {
    params.validate()?;
    let n = params.n_bath();
    let s1 = 1usize << (n + 1);
    let s2 = 1usize << n;
    let mut pairs = vec![Pair { mask: s1 | s2, quarter: 0.5 * params.j, half: params.j }];
    for (k, &a) in params.couplings.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let bath = 1usize << (n - 1 - k);
        for spin in [s1, s2] {
            pairs.push(Pair { mask: spin | bath, quarter: 0.25 * a, half: 0.5 * a });
        }
    }
    Ok(SpinBathHamiltonian { params: params.clone(), pairs, dim: params.dim() })
}

impl SpinBathHamiltonian {
    pub fn params(&self) -> &SpinBathParams {
        &self.params
    }

    #[inline]
    fn row(&self, i: usize, x: &[Complex64]) -> Complex64 {
        let mut diag = 0.0;
        let mut off = Complex64::new(0.0, 0.0);
        for p in &self.pairs {
            let bits = i & p.mask;
            if bits == 0 || bits == p.mask {
                diag += p.quarter;
            } else {
                diag -= p.quarter;
                off += p.half * x[i ^ p.mask];
            }
        }
        diag * x[i] + off
    }
}

impl HermitianOperator for SpinBathHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        if self.dim >= PAR_THRESHOLD {
            out.par_chunks_mut(PAR_THRESHOLD).enumerate().for_each(|(c, chunk)| {
                let base = c * PAR_THRESHOLD;
                for (off, o) in chunk.iter_mut().enumerate() {
                    *o = self.row(base + off, x);
                }
            });
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.row(i, x);
            }
        }
    }

    /// `||2J s1.s2|| <= 3|J|/2` and `||A (s1 + s2).I|| <= 3|A|/2`.
    fn spectral_radius_bound(&self) -> Option<f64> {
        let bath: f64 = self.params.couplings.iter().map(|a| a.abs()).sum();
        Some(2.0 * self.params.j.abs() * 0.75 + 1.5 * bath)
    }
}

/// `|up down> (x) |env>` with complex Gaussian environment amplitudes,
/// normalized; the environment is reproducible per `params.seed`.
pub fn initial_state(params: &SpinBathParams) -> Result<StateVector> {
    params.validate()?;
    let env_dim = 1usize << params.n_bath();
    // decorrelate from the coupling stream, which uses the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    let env = if env_dim == 1 {
        StateVector::basis(1, 0)
    } else {
        StateVector::random(env_dim, &mut rng)
    };
    let mut amp = vec![Complex64::new(0.0, 0.0); params.dim()];
    // |s1 s2> = |up down> is the block with index bits 10
    let offset = 0b10 * env_dim;
    amp[offset..offset + env_dim].copy_from_slice(env.as_slice());
    StateVector::new(amp)
}

fn bath_dim(psi: &StateVector) -> Result<usize> {
    let d = psi.dim();
    if d < 4 || !d.is_power_of_two() {
        return Err(Error::Usage(format!("dimension {d} is not 4 * 2^N")));
    }
    Ok(d / 4)
}

/// `<s1^z>`: `+1/2` weight for indices with the `s1` bit set, `-1/2` else.
pub fn s1z_expectation(psi: &StateVector) -> Result<f64> {
    let env = bath_dim(psi)?;
    let half = 2 * env;
    let amp = psi.as_slice();
    let up: f64 = amp[half..].iter().map(|z| z.norm_sqr()).sum();
    let down: f64 = amp[..half].iter().map(|z| z.norm_sqr()).sum();
    Ok(0.5 * (up - down))
}

/// Reduced density matrix of the central pair in the basis
/// `{|uu>, |ud>, |du>, |dd>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    rho: [[Complex64; 4]; 4],
}

/// Basis labels `{|uu>, |ud>, |du>, |dd>}` map to block indices `3, 2, 1, 0`.
const BLOCK: [usize; 4] = [0b11, 0b10, 0b01, 0b00];

impl ReducedDensityMatrix {
    pub fn from_matrix(rho: [[Complex64; 4]; 4]) -> Self {
        Self { rho }
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.rho[a][b]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += (self.rho[a][b] * self.rho[b][a]).re;
            }
        }
        s
    }

    pub fn to_dense(&self) -> DenseHermitian {
        let data = self.rho.iter().flatten().copied().collect();
        DenseHermitian::new(4, data).expect("reduced density matrix is Hermitian")
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.to_dense(), 1e-15, 30)
    }
}

/// `rho[a][b] = sum_e psi[a, e] conj(psi[b, e])`.
pub fn reduced_density_matrix(psi: &StateVector) -> Result<ReducedDensityMatrix> {
    let env = bath_dim(psi)?;
    let amp = psi.as_slice();
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        let ra = &amp[BLOCK[a] * env..(BLOCK[a] + 1) * env];
        for b in a..4 {
            let rb = &amp[BLOCK[b] * env..(BLOCK[b] + 1) * env];
            let v: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            rho[a][b] = v;
            rho[b][a] = v.conj();
        }
    }
    Ok(ReducedDensityMatrix { rho })
}

/// `-Tr(rho ln rho)` of `rho / Tr(rho)`, so a state whose norm has drifted
/// slightly still reports zero entropy when pure. Eigenvalues in
/// `[-1e-8, 0)` are treated as rounding noise and clamped to zero.
pub fn von_neumann_entropy(rho: &ReducedDensityMatrix) -> Result<f64> {
    let trace = rho.trace();
    if !(trace > 0.0) {
        return Err(Error::InvalidDensityMatrix(format!("trace {trace:.3e}")));
    }
    let mut s = 0.0;
    for l in rho.eigenvalues()?.into_iter().map(|l| l / trace) {
        if l < -1e-8 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {l:.3e}")));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s.max(0.0))
}
