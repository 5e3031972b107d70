//! Polynomial-expansion propagators for the time-dependent Schrodinger
//! equation (hbar = 1).
//!
//! The evolution operator `exp(-iH dt)` is expanded in Chebyshev, Hermite or
//! Laguerre polynomials of the Hamiltonian and applied through three-term
//! recursions, so a step costs only matrix-vector products. Two model
//! systems are provided: a central spin pair coupled to a spin bath
//! ([`spin_bath`]) and a quartic double well in a truncated oscillator basis
//! ([`double_well`]). Classical RK4 and Adams-Bashforth-Moulton integrators
//! serve as references.

pub mod double_well;
pub mod eigen;
mod error;
pub mod linalg;
pub mod propagators;
pub mod quadrature;
pub mod series;
pub mod spin_bath;

pub use error::{Error, Result};
pub use linalg::{
    expectation, inner_product, norm, normalize, DenseHermitian, HermitianOperator, StateVector,
};
pub use num_complex::Complex64;
pub use propagators::{
    evolve, Evolution, Method, PropagatorConfig, RunSummary, StepReport, Stepper,
};
pub use series::{estimate_period, TimeSeries};
