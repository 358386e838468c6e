//! Error type shared by every module of the crate.

use std::io;
use thiserror::Error;

/// Crate-wide result alias.
pub type CoreResult<T> = Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid size must be a power of two >= 8, got {0}")]
    InvalidGridSize(usize),

    #[error("half_width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),

    #[error("non-finite density contribution at grid node ({i}, {j})")]
    NonFiniteDensity { i: usize, j: usize },

    #[error("angular momentum has spurious imaginary part {imag:.3e} (limit {limit:.3e}); field is corrupted")]
    ComplexAngularMomentum { imag: f64, limit: f64 },

    #[error("fields live on different grids: n={left_n}, half_width={left_w} vs n={right_n}, half_width={right_w}")]
    GridMismatch {
        left_n: usize,
        left_w: f64,
        right_n: usize,
        right_w: f64,
    },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("operation requires the {required} regime, but omega_rot = {omega} and gamma = {gamma}")]
    RegimeMismatch {
        required: &'static str,
        omega: f64,
        gamma: f64,
    },

    #[error("no minimizer exists for omega_rot = {omega} > gamma = {gamma}; the energy is unbounded below")]
    NonexistenceRegime { omega: f64, gamma: f64 },

    #[error("gradient flow diverged: step size collapsed to {tau:.3e} after {iterations} iterations")]
    FlowDiverged { iterations: usize, tau: f64 },

    #[error("shooting bracket [{lo}, {hi}] does not straddle the ground-state initial value")]
    ShootingBracket { lo: f64, hi: f64 },

    #[error("field has zero mass")]
    ZeroMass,

    #[error("non-finite field values produced during {context}")]
    NonFiniteField { context: &'static str },

    #[error("numerical abort: non-finite values at time step {step}")]
    NumericalAbort { step: usize },

    #[error("malformed field dump: {0}")]
    MalformedDump(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
