//! Numerical laboratory for a two-dimensional rotating Bose gas with a
//! logarithmic-cubic self-interaction and three-body loss.
//!
//! The crate provides three layers:
//!
//! * spectral fields on a periodic square ([`GridSpec`], [`ComplexField`])
//!   plus radial meshes ([`RadialField`]) and closed-form trial states;
//! * energy and identity evaluation ([`functionals`]) including dilation
//!   residuals, quadratic-form bounds, and an inequality test battery;
//! * dynamics and variational solvers: a Strang splitting with an exact
//!   dissipative substep ([`evolve`]) and normalized gradient flows for
//!   mass-constrained ground states in all rotation regimes ([`minimize`]).
//!
//! Everything is deterministic: fixed seeds, compensated reductions, and
//! sequential accumulation order, so repeated runs agree bit for bit.

pub mod cubic;
mod error;
pub mod evolve;
mod fft;
mod field;
pub mod functionals;
mod grid;
pub mod minimize;
mod params;
mod quad;
mod radial;
mod sum;
pub mod trials;

pub use cubic::{c4_constant, cached_cubic_ground_state, cubic_ground_state, CubicGroundState};
pub use error::{CoreError, CoreResult};
pub use evolve::{EvolveConfig, ExtinctionRecord, Trajectory};
pub use field::ComplexField;
pub use functionals::{InequalityCheck, ObservableRecord, PohozaevReport, WindowVerdict};
pub use grid::GridSpec;
pub use minimize::{
    extract_omega, ground_state, ground_state_magnetic, ground_state_radial, linear_bottom,
    orbit_distance, phase_orbit_check, seed_field, stability_probe, FlowConfig,
    GroundStateResult, LinearBottom, MinimizerState, OrbitNorm, PhaseOrbitReport, SeedKind,
    StabilityProbe,
};
pub use params::{Params, Regime};
pub use radial::RadialField;
pub use trials::{GaussianTrial, VortexTrial};
