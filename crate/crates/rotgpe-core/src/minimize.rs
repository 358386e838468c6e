//! Mass-constrained energy minimization: normalized gradient flows for the
//! ground states in every rotation regime, the linear bottom eigenvalue, the
//! Lagrange multiplier, phase-orbit distances, and the dynamical stability
//! probe.
//!
//! All solvers share one scheme: discrete imaginary time with a stabilized
//! semi-implicit step. The stiff half Laplacian is inverted exactly (spectral
//! on the square, tridiagonal on the radial mesh), everything diagonal in
//! space is explicit around the midrange shift `alpha`, and each step ends
//! with an exact renormalization back to the target mass. The step size is
//! fixed but halves whenever a step fails to decrease the constrained
//! energy; the flow stops only when the energy has stalled *and* the
//! stationarity residual is small, since a plateau alone does not certify a
//! critical point.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, CoreResult};
use crate::fft::Fft2;
use crate::field::ComplexField;
use crate::functionals;
use crate::grid::GridSpec;
use crate::params::{Params, Regime};
use crate::radial::RadialField;
use crate::sum::Kahan;

/// Initial data family for a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedKind {
    /// `exp(-b |x|^2)`, renormalized.
    Gaussian(f64),
    /// Winding-`m` trial profile at the run's trap rate, renormalized.
    Vortex(usize),
    /// Band-limited random field with the given RNG seed, renormalized.
    Random(u64),
}

/// Flow step, stopping tolerances, and seed selection.
#[derive(Debug, Clone, Copy)]
pub struct FlowConfig {
    pub tau: f64,
    /// Stop gate on the per-unit-time relative energy decrease.
    pub tol_energy: f64,
    /// Stop gate on the L2 stationarity residual.
    pub tol_residual: f64,
    pub max_iter: usize,
    pub seed: SeedKind,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            tau: 0.5,
            tol_energy: 1e-9,
            tol_residual: 1e-6,
            max_iter: 5000,
            seed: SeedKind::Gaussian(0.5),
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> CoreResult<()> {
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(CoreError::InvalidParam {
                name: "tau",
                value: self.tau,
                constraint: "finite and > 0",
            });
        }
        for (name, value) in [
            ("tol_energy", self.tol_energy),
            ("tol_residual", self.tol_residual),
        ] {
            if !(value > 0.0 && value < 1e-2) {
                return Err(CoreError::InvalidParam {
                    name,
                    value,
                    constraint: "in (0, 1e-2)",
                });
            }
        }
        if self.max_iter == 0 {
            return Err(CoreError::InvalidParam {
                name: "max_iter",
                value: 0.0,
                constraint: ">= 1",
            });
        }
        if let SeedKind::Gaussian(b) = self.seed {
            if !(b.is_finite() && b > 0.0) {
                return Err(CoreError::InvalidParam {
                    name: "seed",
                    value: b,
                    constraint: "gaussian width > 0",
                });
            }
        }
        Ok(())
    }
}

/// Converged (or best-effort) state of a flow, on whichever mesh it ran.
#[derive(Debug, Clone)]
pub enum MinimizerState {
    Grid(ComplexField),
    Radial(RadialField),
}

impl MinimizerState {
    pub fn as_grid(&self) -> Option<&ComplexField> {
        match self {
            MinimizerState::Grid(f) => Some(f),
            MinimizerState::Radial(_) => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialField> {
        match self {
            MinimizerState::Radial(f) => Some(f),
            MinimizerState::Grid(_) => None,
        }
    }
}

/// Outcome of one constrained minimization.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub state: MinimizerState,
    pub energy: f64,
    /// Lagrange multiplier extracted from the stationarity identity.
    pub omega: f64,
    /// L2 norm of the Euler-Lagrange defect at the reported `omega`; never
    /// clamped.
    pub residual: f64,
    /// Flow iterations consumed, rejected (backtracked) steps included.
    pub iterations: usize,
    /// False when `max_iter` ran out before both stop gates held.
    pub converged: bool,
}

impl GroundStateResult {
    /// Whether the attained energy is strictly negative, the certificate the
    /// critical-rotation existence argument turns on.
    pub fn negative_energy(&self) -> bool {
        self.energy < 0.0
    }
}

/// `(integral y^2 ln y, integral y^2)` with the vacuum convention `0 ln 0 = 0`.
fn log_moments(f: &ComplexField) -> CoreResult<(f64, f64)> {
    let logm = f.integrate(|_, _, v| {
        let y = v.norm_sqr();
        if y > 0.0 {
            y * y * y.ln()
        } else {
            0.0
        }
    })?;
    let l4 = f.integrate(|_, _, v| {
        let y = v.norm_sqr();
        y * y
    })?;
    Ok((logm, l4))
}

fn normalize_to_mass(f: &mut ComplexField, rho: f64) -> CoreResult<()> {
    let m = functionals::mass(f)?;
    if m <= 0.0 || !m.is_finite() {
        return Err(CoreError::ZeroMass);
    }
    let scale = (rho / m).sqrt();
    for v in f.values_mut() {
        *v *= scale;
    }
    Ok(())
}

/// Materialize the state a seed spec describes, normalized to the mass
/// constraint in `p`. Also the initial datum the evolution front ends use.
pub fn seed_field(grid: &GridSpec, p: &Params, kind: SeedKind) -> CoreResult<ComplexField> {
    let mut f = match kind {
        SeedKind::Gaussian(b) => ComplexField::from_fn(grid.clone(), |x1, x2| {
            Complex64::new((-b * (x1 * x1 + x2 * x2)).exp(), 0.0)
        }),
        SeedKind::Vortex(m) => {
            let trial = crate::trials::VortexTrial::new(m, p.rho, p.gamma)?;
            crate::trials::vortex_field(&trial, grid.clone())
        }
        SeedKind::Random(seed) => ComplexField::random_band_limited(grid.clone(), seed),
    };
    normalize_to_mass(&mut f, p.rho)?;
    Ok(f)
}

/// Which energy the square-grid flow descends.
enum GridModel {
    /// `E_Omega`: rotating-frame energy with the full trap.
    Rotating,
    /// Covariant form at critical rotation, assembled from the gauge field.
    Magnetic,
    /// Quadratic part only; drives the bottom-of-the-spectrum eigenpair.
    Linear,
}

struct GridFlow {
    p: Params,
    model: GridModel,
    rho: f64,
    fft: Fft2,
    /// Symbol of `-1/2 Laplacian`: `|kappa|^2 / 2` per spectral node.
    ksq: Vec<f64>,
    /// Static diagonal part of the Hamiltonian: the trap, or for the
    /// covariant model `|A|^2 / 2` built from `A = gamma (-x2, x1)`.
    static_b: Vec<f64>,
    /// Gauge field samples, covariant model only.
    gauge: Option<(Vec<f64>, Vec<f64>)>,
}

impl GridFlow {
    fn new(grid: &GridSpec, p: Params, model: GridModel, rho: f64) -> GridFlow {
        let n = grid.n();
        let mut ksq = Vec::with_capacity(n * n);
        for i in 0..n {
            let k1 = grid.wavenumber(i);
            for j in 0..n {
                let k2 = grid.wavenumber(j);
                ksq.push(0.5 * (k1 * k1 + k2 * k2));
            }
        }
        let mut static_b = Vec::with_capacity(n * n);
        let gauge = match model {
            GridModel::Magnetic => {
                let mut a1 = Vec::with_capacity(n * n);
                let mut a2 = Vec::with_capacity(n * n);
                for i in 0..n {
                    let x1 = grid.node(i);
                    for j in 0..n {
                        let x2 = grid.node(j);
                        a1.push(-p.gamma * x2);
                        a2.push(p.gamma * x1);
                    }
                }
                for idx in 0..n * n {
                    static_b.push(0.5 * (a1[idx] * a1[idx] + a2[idx] * a2[idx]));
                }
                Some((a1, a2))
            }
            GridModel::Rotating | GridModel::Linear => {
                for i in 0..n {
                    let x1 = grid.node(i);
                    for j in 0..n {
                        static_b.push(p.potential(x1, grid.node(j)));
                    }
                }
                None
            }
        };
        GridFlow {
            p,
            model,
            rho,
            fft: Fft2::new(n),
            ksq,
            static_b,
            gauge,
        }
    }

    fn nonlinear(&self) -> bool {
        !matches!(self.model, GridModel::Linear)
    }

    /// Energy and Rayleigh quotient `<f, H f> / rho` in one pass over the
    /// shared ingredients. The quotient is the tangential shift that makes
    /// the step the constrained gradient; without it the iteration's fixed
    /// point is biased away from stationarity by O(tau).
    fn metrics(&self, f: &ComplexField) -> CoreResult<(f64, f64)> {
        match self.model {
            GridModel::Rotating => {
                let kin = functionals::grad_norm_sq(f)?;
                let pot = f.integrate(|x1, x2, v| self.p.potential(x1, x2) * v.norm_sqr())?;
                let (logm, l4) = log_moments(f)?;
                let ang = if self.p.omega_rot != 0.0 {
                    functionals::angular_momentum(f)?
                } else {
                    0.0
                };
                let energy = 0.5 * kin + pot + 0.5 * logm - 0.25 * l4
                    - self.p.omega_rot * ang;
                let mu = (0.5 * kin + pot + logm - self.p.omega_rot * ang) / self.rho;
                Ok((energy, mu))
            }
            GridModel::Magnetic => {
                let mag = functionals::magnetic_grad_norm_sq(f, self.p.gamma)?;
                let bump = f.integrate(|x1, x2, v| {
                    self.p.v0 * (-self.p.gamma0 * (x1 * x1 + x2 * x2)).exp() * v.norm_sqr()
                })?;
                let (logm, l4) = log_moments(f)?;
                let energy = 0.5 * mag + bump + 0.5 * logm - 0.25 * l4;
                let mu = (0.5 * mag + bump + logm) / self.rho;
                Ok((energy, mu))
            }
            GridModel::Linear => {
                let kin = functionals::grad_norm_sq(f)?;
                let pot = f.integrate(|x1, x2, v| self.p.potential(x1, x2) * v.norm_sqr())?;
                let energy = 0.5 * kin + pot;
                Ok((energy, energy / self.rho))
            }
        }
    }

    /// Rotation or gauge coupling applied to `f`, with the sign it carries
    /// inside the Hamiltonian.
    fn coupling(&self, f: &ComplexField) -> Option<ComplexField> {
        match self.model {
            GridModel::Rotating if self.p.omega_rot != 0.0 => {
                let mut lz = f.apply_lz();
                for v in lz.values_mut() {
                    *v *= -self.p.omega_rot;
                }
                Some(lz)
            }
            GridModel::Magnetic => {
                let (a1, a2) = self.gauge.as_ref().expect("gauge field present");
                let (d1, d2) = f.gradient();
                let mut out = d1;
                for (idx, v) in out.values_mut().iter_mut().enumerate() {
                    *v = Complex64::new(0.0, 1.0)
                        * (a1[idx] * *v + a2[idx] * d2.values()[idx]);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// One preconditioned descent step at size `tau`, renormalized to the
    /// target mass: `f - tau (1 + tau (K + alpha))^{-1} (H f - mu f)` with
    /// `mu` the Rayleigh quotient at `f`. The shift by `mu` keeps the update
    /// inside the tangent of the mass sphere, so every fixed point of the
    /// map is an exact stationary state; `alpha` is the midrange of the
    /// diagonal `b = static + y ln y`, which caps the explicit factor's
    /// swing at the high-potential rim whatever `tau` is.
    fn step(&mut self, f: &ComplexField, tau: f64, mu: f64) -> CoreResult<ComplexField> {
        let coupling = self.coupling(f);
        let mut out = f.clone();
        let mut b = Vec::with_capacity(self.static_b.len());
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        for (idx, v) in f.values().iter().enumerate() {
            let y = v.norm_sqr();
            if !y.is_finite() {
                return Err(CoreError::NonFiniteField {
                    context: "gradient flow step",
                });
            }
            let mut bi = self.static_b[idx];
            if self.nonlinear() && y > 0.0 {
                bi += y * y.ln();
            }
            b_min = b_min.min(bi);
            b_max = b_max.max(bi);
            b.push(bi);
        }
        let alpha = 0.5 * (b_min + b_max);
        {
            let vals = out.values_mut();
            for (idx, v) in vals.iter_mut().enumerate() {
                let mut rhs = *v * (1.0 - tau * (b[idx] - alpha - mu));
                if let Some(c) = &coupling {
                    rhs -= tau * c.values()[idx];
                }
                *v = rhs;
            }
            self.fft.forward(vals);
            for (v, k) in vals.iter_mut().zip(&self.ksq) {
                *v /= 1.0 + tau * (k + alpha);
            }
            self.fft.inverse(vals);
        }
        normalize_to_mass(&mut out, self.rho)?;
        Ok(out)
    }

    /// Multiplier and Euler-Lagrange defect at `f`.
    ///
    /// The multiplier comes from the stationarity identity (`extract_omega`
    /// for the nonlinear models, the Rayleigh quotient for the linear one),
    /// and the defect norm is assembled independently from the Hamiltonian
    /// applied to `f`.
    fn residual(&mut self, f: &ComplexField) -> CoreResult<(f64, f64)> {
        let coupling = self.coupling(f);
        let mut hf = f.clone();
        {
            let vals = hf.values_mut();
            self.fft.forward(vals);
            for (v, k) in vals.iter_mut().zip(&self.ksq) {
                *v *= *k;
            }
            self.fft.inverse(vals);
        }
        for (idx, v) in hf.values_mut().iter_mut().enumerate() {
            let fv = f.values()[idx];
            let y = fv.norm_sqr();
            let mut bi = self.static_b[idx];
            if self.nonlinear() && y > 0.0 {
                bi += y * y.ln();
            }
            *v += bi * fv;
            if let Some(c) = &coupling {
                *v += c.values()[idx];
            }
        }
        let omega = if self.nonlinear() {
            extract_omega_model(f, &self.p, matches!(self.model, GridModel::Magnetic))?
        } else {
            f.inner(&hf)?.re / self.rho
        };
        // For the nonlinear models the defect is H f + omega f; the linear
        // eigenpair convention flips the sign of omega.
        let shift = if self.nonlinear() { omega } else { -omega };
        let mut acc = Kahan::new();
        for (idx, v) in hf.values().iter().enumerate() {
            acc.add((v + shift * f.values()[idx]).norm_sqr());
        }
        let area = f.grid().cell_area();
        Ok((omega, (acc.value() * area).sqrt()))
    }
}

fn run_grid_flow(
    grid: GridSpec,
    p: &Params,
    cfg: &FlowConfig,
    model: GridModel,
    rho: f64,
) -> CoreResult<GroundStateResult> {
    cfg.validate()?;
    let mut flow = GridFlow::new(&grid, *p, model, rho);
    let mut f = seed_field(&grid, p, cfg.seed)?;
    if rho != p.rho {
        normalize_to_mass(&mut f, rho)?;
    }
    let (mut energy, mut mu) = flow.metrics(&f)?;
    let tau0 = cfg.tau;
    let mut tau = cfg.tau;
    let mut iterations = 0;
    let mut converged = false;
    let mut omega = f64::NAN;
    let mut residual = f64::INFINITY;
    while iterations < cfg.max_iter {
        let candidate = flow.step(&f, tau, mu)?;
        let (e_new, mu_new) = flow.metrics(&candidate)?;
        iterations += 1;
        if e_new > energy + 1e-12 * energy.abs().max(1.0) {
            // Constrained energy went up: reject, halve, retry from f.
            tau *= 0.5;
            if tau < 1e-12 * tau0 {
                return Err(CoreError::FlowDiverged { iterations, tau });
            }
            continue;
        }
        let decrease = (energy - e_new) / tau;
        f = candidate;
        energy = e_new;
        mu = mu_new;
        let stalled = decrease <= cfg.tol_energy * energy.abs().max(1.0);
        if stalled || iterations % 25 == 0 {
            let (om, res) = flow.residual(&f)?;
            omega = om;
            residual = res;
            if stalled && res <= cfg.tol_residual {
                converged = true;
                break;
            }
        }
    }
    if !residual.is_finite() {
        let (om, res) = flow.residual(&f)?;
        omega = om;
        residual = res;
    }
    Ok(GroundStateResult {
        state: MinimizerState::Grid(f),
        energy,
        omega,
        residual,
        iterations,
        converged,
    })
}

/// Minimize the rotating-frame energy at mass `rho` in the subcritical
/// regime.
///
/// The supercritical regime is refused outright: the winding trial family
/// drives the energy to minus infinity there, so there is nothing to find.
/// Critical rotation belongs to [`ground_state_magnetic`].
pub fn ground_state(grid: GridSpec, p: &Params, cfg: &FlowConfig) -> CoreResult<GroundStateResult> {
    p.validate()?;
    match p.regime() {
        Regime::Subcritical => run_grid_flow(grid, p, cfg, GridModel::Rotating, p.rho),
        Regime::Critical => Err(CoreError::RegimeMismatch {
            required: "subcritical (omega_rot < gamma); use the covariant solver at critical rotation",
            omega: p.omega_rot,
            gamma: p.gamma,
        }),
        Regime::Supercritical => Err(CoreError::NonexistenceRegime {
            omega: p.omega_rot,
            gamma: p.gamma,
        }),
    }
}

/// Minimize the covariant energy at critical rotation, `omega_rot = gamma`,
/// without a bump.
///
/// The Hamiltonian is assembled in gauge form, `-1/2 Laplacian + i A . grad
/// + |A|^2 / 2`, as an independent route to the same minimum the rotating
/// form would reach; the two agreeing is a cross-check, not a given. Target
/// masses above the cubic ground-state mass get a warning, since the
/// compactness argument behind existence is only known up to that mass.
pub fn ground_state_magnetic(
    grid: GridSpec,
    p: &Params,
    cfg: &FlowConfig,
) -> CoreResult<GroundStateResult> {
    p.validate()?;
    if p.regime() != Regime::Critical {
        return Err(CoreError::RegimeMismatch {
            required: "critical (omega_rot = gamma)",
            omega: p.omega_rot,
            gamma: p.gamma,
        });
    }
    if p.v0 != 0.0 {
        return Err(CoreError::InvalidParam {
            name: "v0",
            value: p.v0,
            constraint: "0 for the covariant solver",
        });
    }
    let q_mass = crate::cubic::cached_cubic_ground_state().l2_squared;
    if p.rho > q_mass {
        eprintln!(
            "warning: target mass {} exceeds the cubic ground-state mass {q_mass:.5}; \
             existence of a minimizer is not guaranteed there",
            p.rho
        );
    }
    run_grid_flow(grid, p, cfg, GridModel::Magnetic, p.rho)
}

/// Bottom of the spectrum of the linear Hamiltonian `-1/2 Laplacian + V`.
#[derive(Debug, Clone)]
pub struct LinearBottom {
    pub omega_v0: f64,
    /// Unit-mass eigenfunction; real and positive up to roundoff.
    pub eigenfunction: ComplexField,
}

/// Compute the linear bottom eigenvalue and its eigenfunction by the same
/// normalized flow at unit mass, quadratic energy only.
pub fn linear_bottom(grid: GridSpec, p: &Params) -> CoreResult<LinearBottom> {
    p.validate()?;
    let cfg = FlowConfig {
        tau: 0.5,
        tol_energy: 1e-13,
        tol_residual: 1e-9,
        max_iter: 20_000,
        seed: SeedKind::Gaussian(0.5 * p.gamma),
    };
    let result = run_grid_flow(grid, p, &cfg, GridModel::Linear, 1.0)?;
    let eigenfunction = match result.state {
        MinimizerState::Grid(f) => f,
        MinimizerState::Radial(_) => unreachable!("the linear flow runs on the square grid"),
    };
    Ok(LinearBottom {
        omega_v0: result.omega,
        eigenfunction,
    })
}

fn extract_omega_model(phi: &ComplexField, p: &Params, covariant: bool) -> CoreResult<f64> {
    let m = functionals::mass(phi)?;
    if m <= 0.0 {
        return Err(CoreError::ZeroMass);
    }
    let log_moment = phi.integrate(|_, _, v| {
        let y = v.norm_sqr();
        if y > 0.0 {
            y * y * y.ln()
        } else {
            0.0
        }
    })?;
    if covariant {
        // Same multiplier through the gauge form: the quadratic part is the
        // covariant seminorm instead of kinetic + trap - rotation.
        let mag = functionals::magnetic_grad_norm_sq(phi, p.gamma)?;
        let bump = phi.integrate(|x1, x2, v| {
            p.v0 * (-p.gamma0 * (x1 * x1 + x2 * x2)).exp() * v.norm_sqr()
        })?;
        Ok((-0.5 * mag - bump - log_moment) / m)
    } else {
        let kin = functionals::grad_norm_sq(phi)?;
        let pot = phi.integrate(|x1, x2, v| p.potential(x1, x2) * v.norm_sqr())?;
        let ang = functionals::angular_momentum(phi)?;
        Ok((-0.5 * kin - pot - log_moment + p.omega_rot * ang) / m)
    }
}

/// Lagrange multiplier forced by the stationarity identity: the unique
/// `omega` making the Euler-Lagrange form orthogonal to `phi` itself.
pub fn extract_omega(phi: &ComplexField, p: &Params) -> CoreResult<f64> {
    extract_omega_model(phi, p, false)
}

/// Norm in which a phase-orbit distance is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitNorm {
    /// `||f||^2 = ||f||_{H^1}^2 + ||x f||^2`, the trap energy space.
    Sigma,
    /// `||f||^2 = ||f||_{L^2}^2 + ||grad_A f||^2` at the given trap rate.
    H1A { gamma: f64 },
}

/// Distance from `u` to the phase orbit `{e^{i sigma} phi}` in the requested
/// norm.
///
/// The optimal phase is the argument of the norm's inner product, in closed
/// form; the difference field is then formed at that phase and measured
/// directly, so a state on the orbit comes out at roundoff rather than at
/// the square root of a cancellation.
pub fn orbit_distance(u: &ComplexField, phi: &ComplexField, norm: OrbitNorm) -> CoreResult<f64> {
    u.check_same_grid(phi)?;
    let (u1, u2, p1, p2) = match norm {
        OrbitNorm::Sigma => {
            let (a, b) = u.gradient();
            let (c, d) = phi.gradient();
            (a, b, c, d)
        }
        OrbitNorm::H1A { gamma } => {
            let (a, b) = u.apply_grad_a(gamma);
            let (c, d) = phi.apply_grad_a(gamma);
            (a, b, c, d)
        }
    };
    let weighted = |f: &ComplexField, g: &ComplexField| -> CoreResult<Complex64> {
        // <x f, x g> for the Sigma norm; identically zero weight otherwise.
        let grid = f.grid();
        let n = grid.n();
        let mut re = Kahan::new();
        let mut im = Kahan::new();
        for i in 0..n {
            let x1 = grid.node(i);
            for j in 0..n {
                let x2 = grid.node(j);
                let w = x1 * x1 + x2 * x2;
                let prod = f.values()[i * n + j].conj() * g.values()[i * n + j] * w;
                re.add(prod.re);
                im.add(prod.im);
            }
        }
        Ok(Complex64::new(re.value(), im.value()) * grid.cell_area())
    };
    let mut inner = u.inner(phi)? + u1.inner(&p1)? + u2.inner(&p2)?;
    if norm == OrbitNorm::Sigma {
        inner += weighted(u, phi)?;
    }
    let sigma = -inner.arg();
    let phase = Complex64::from_polar(1.0, sigma);
    let diff_norm_sq = |a: &ComplexField, b: &ComplexField, with_weight: bool| -> f64 {
        let grid = a.grid();
        let n = grid.n();
        let mut acc = Kahan::new();
        for i in 0..n {
            let x1 = grid.node(i);
            for j in 0..n {
                let idx = i * n + j;
                let d = (a.values()[idx] - phase * b.values()[idx]).norm_sqr();
                let w = if with_weight {
                    let x2 = grid.node(j);
                    x1 * x1 + x2 * x2
                } else {
                    1.0
                };
                acc.add(d * w);
            }
        }
        acc.value() * grid.cell_area()
    };
    let mut total = diff_norm_sq(u, phi, false)
        + diff_norm_sq(&u1, &p1, false)
        + diff_norm_sq(&u2, &p2, false);
    if norm == OrbitNorm::Sigma {
        total += diff_norm_sq(u, phi, true);
    }
    Ok(total.max(0.0).sqrt())
}

/// Trace of the phase-orbit distance along a perturbed evolution.
#[derive(Debug, Clone)]
pub struct StabilityProbe {
    /// Supremum of the trace.
    pub sup_distance: f64,
    /// `(t, Sigma-distance to the computed ground orbit)` samples.
    pub trace: Vec<(f64, f64)>,
    /// Stationarity residual of the ground state the trace is measured
    /// against; the floor a `delta = 0` run sits at.
    pub ground_residual: f64,
}

/// RNG stream for the probe's perturbation direction, fixed so repeated
/// probes are reproducible.
const PROBE_SEED: u64 = 11;

/// Compute the ground state, kick it by `delta` in the Sigma norm, evolve
/// without loss, and log the phase-orbit distance.
///
/// Works in the rotating frame throughout: the ground state is stationary
/// there up to its multiplier phase, which the orbit distance quotients out.
pub fn stability_probe(
    grid: GridSpec,
    p: &Params,
    cfg: &FlowConfig,
    delta: f64,
    t_end: f64,
) -> CoreResult<StabilityProbe> {
    p.validate()?;
    if p.k3 != 0.0 {
        return Err(CoreError::InvalidParam {
            name: "k3",
            value: p.k3,
            constraint: "0 for the stability probe (the damped flow leaves every orbit)",
        });
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(CoreError::InvalidParam {
            name: "delta",
            value: delta,
            constraint: "finite and >= 0",
        });
    }
    let ground = match p.regime() {
        Regime::Subcritical => ground_state(grid.clone(), p, cfg)?,
        Regime::Critical => ground_state_magnetic(grid.clone(), p, cfg)?,
        Regime::Supercritical => {
            return Err(CoreError::NonexistenceRegime {
                omega: p.omega_rot,
                gamma: p.gamma,
            })
        }
    };
    let phi = match &ground.state {
        MinimizerState::Grid(f) => f.clone(),
        MinimizerState::Radial(_) => unreachable!("grid solvers produce grid states"),
    };
    let mut u0 = phi.clone();
    if delta > 0.0 {
        let g = ComplexField::random_band_limited(grid.clone(), PROBE_SEED);
        let g_sigma = (functionals::grad_norm_sq(&g)?
            + functionals::mass(&g)?
            + functionals::xmoment(&g)?)
        .sqrt();
        let scale = delta / g_sigma;
        for (v, gv) in u0.values_mut().iter_mut().zip(g.values()) {
            *v += scale * gv;
        }
    }
    let dt: f64 = 1e-3;
    let cadence = (0.1 / dt).round() as usize;
    let evolve_cfg = crate::evolve::EvolveConfig {
        dt,
        t_end,
        log_every: cadence.max(1),
        linear_mode: false,
    };
    let mut trace = Vec::new();
    crate::evolve::evolve_with_callback(&u0, p, &evolve_cfg, |step, state| {
        let d = orbit_distance(state, &phi, OrbitNorm::Sigma)?;
        trace.push((step as f64 * dt, d));
        Ok(())
    })?;
    let sup_distance = trace.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    Ok(StabilityProbe {
        sup_distance,
        trace,
        ground_residual: ground.residual,
    })
}

/// Modulus positivity and phase constancy of a claimed zero-rotation
/// minimizer.
#[derive(Debug, Clone, Copy)]
pub struct PhaseOrbitReport {
    /// `|phi| > 0` everywhere on the central half of the box, where a
    /// trapped state carries its mass.
    pub positive_modulus: bool,
    /// Largest angular deviation from the mean phase direction over the
    /// region `|phi| > 1e-8 max|phi|`, in radians.
    pub phase_spread: f64,
    pub max_modulus: f64,
}

impl PhaseOrbitReport {
    pub fn constant_phase(&self) -> bool {
        self.phase_spread <= 1e-4
    }

    pub fn passes(&self) -> bool {
        self.positive_modulus && self.constant_phase()
    }
}

/// Check the orbit structure a zero-rotation minimizer must have: a strictly
/// positive modulus and a globally constant phase. A winding state fails
/// both, which is the regression guard on the checker itself.
pub fn phase_orbit_check(phi: &ComplexField) -> PhaseOrbitReport {
    let grid = phi.grid();
    let n = grid.n();
    let max_sq = phi
        .values()
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0f64, f64::max);
    let core = 0.5 * grid.half_width();
    let mut positive_modulus = max_sq > 0.0;
    for i in 0..n {
        let x1 = grid.node(i);
        if x1.abs() > core {
            continue;
        }
        for j in 0..n {
            if grid.node(j).abs() > core {
                continue;
            }
            if phi.values()[i * n + j].norm_sqr() == 0.0 {
                positive_modulus = false;
            }
        }
    }
    let floor_sq = 1e-16 * max_sq;
    let mut direction = Complex64::new(0.0, 0.0);
    for v in phi.values() {
        if v.norm_sqr() > floor_sq {
            direction += v / v.norm();
        }
    }
    let mean = direction.arg();
    let rotate = Complex64::from_polar(1.0, -mean);
    let mut phase_spread = 0.0f64;
    for v in phi.values() {
        if v.norm_sqr() > floor_sq {
            phase_spread = phase_spread.max((v * rotate).arg().abs());
        }
    }
    PhaseOrbitReport {
        positive_modulus,
        phase_spread,
        max_modulus: max_sq.sqrt(),
    }
}

/// Radial mesh flow for the critical energy, any bump amplitude and mass.
struct RadialFlow {
    p: Params,
    rho: f64,
    /// Inner and outer edge coefficients of the conservative Laplacian at
    /// each node; its quadratic form is exactly the mesh's kinetic term, so
    /// the flow descends the same discrete energy it reports.
    lap_in: Vec<f64>,
    lap_out: Vec<f64>,
    static_b: Vec<f64>,
}

impl RadialFlow {
    fn new(sample: &RadialField, p: Params, rho: f64) -> RadialFlow {
        let m = sample.m();
        let h = sample.h();
        let mut lap_in = Vec::with_capacity(m);
        let mut lap_out = Vec::with_capacity(m);
        let mut static_b = Vec::with_capacity(m);
        for j in 0..m {
            let r = sample.node(j);
            // Edge radii j h and (j+1) h around the staggered node (j+1/2) h.
            lap_in.push(j as f64 * h / (r * h * h));
            lap_out.push((j as f64 + 1.0) * h / (r * h * h));
            static_b.push(0.5 * p.gamma * p.gamma * r * r + p.v0 * (-p.gamma0 * r * r).exp());
        }
        RadialFlow {
            p,
            rho,
            lap_in,
            lap_out,
            static_b,
        }
    }

    /// Energy and Rayleigh quotient, same tangential-shift role as on the
    /// square grid.
    fn metrics(&self, f: &RadialField) -> (f64, f64) {
        let kin = f.kinetic();
        let pot = f.integrate(|r, v| {
            (0.5 * self.p.gamma * self.p.gamma * r * r
                + self.p.v0 * (-self.p.gamma0 * r * r).exp())
                * v
                * v
        });
        let logm = f.integrate(|_, v| {
            let y = v * v;
            if y > 0.0 {
                y * y * y.ln()
            } else {
                0.0
            }
        });
        let l4 = f.integrate(|_, v| {
            let y = v * v;
            y * y
        });
        let energy = kin + pot + 0.5 * logm - 0.25 * l4;
        let mu = (kin + pot + logm) / self.rho;
        (energy, mu)
    }

    fn nonlinear_b(&self, f: &RadialField, j: usize) -> f64 {
        let y = f.values()[j] * f.values()[j];
        let log_term = if y > 0.0 { y * y.ln() } else { 0.0 };
        self.static_b[j] + log_term
    }

    fn normalize(&self, f: &mut RadialField) -> CoreResult<()> {
        let mass = f.mass();
        if mass <= 0.0 || !mass.is_finite() {
            return Err(CoreError::ZeroMass);
        }
        let scale = (self.rho / mass).sqrt();
        for v in f.values_mut() {
            *v *= scale;
        }
        Ok(())
    }

    /// One preconditioned descent step: explicit midrange-centered diagonal
    /// shifted by the Rayleigh quotient, implicit half Laplacian solved by
    /// the Thomas sweep, then renormalization.
    fn step(&self, f: &RadialField, tau: f64, mu: f64) -> CoreResult<RadialField> {
        let m = f.m();
        let mut b = Vec::with_capacity(m);
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        for j in 0..m {
            let bj = self.nonlinear_b(f, j);
            if !bj.is_finite() {
                return Err(CoreError::NonFiniteField {
                    context: "radial flow step",
                });
            }
            b_min = b_min.min(bj);
            b_max = b_max.max(bj);
            b.push(bj);
        }
        let alpha = 0.5 * (b_min + b_max);
        let mut rhs: Vec<f64> = (0..m)
            .map(|j| f.values()[j] * (1.0 - tau * (b[j] - alpha - mu)))
            .collect();
        // Tridiagonal rows: -tau/2 lap_in, 1 + tau alpha + tau/2 (in+out),
        // -tau/2 lap_out, with a homogeneous Dirichlet ghost past the rim.
        let mut diag: Vec<f64> = (0..m)
            .map(|j| 1.0 + tau * alpha + 0.5 * tau * (self.lap_in[j] + self.lap_out[j]))
            .collect();
        for j in 1..m {
            let w = -0.5 * tau * self.lap_in[j] / diag[j - 1];
            diag[j] -= w * (-0.5 * tau * self.lap_out[j - 1]);
            let prev = rhs[j - 1];
            rhs[j] -= w * prev;
        }
        let mut out = f.clone();
        {
            let vals = out.values_mut();
            vals[m - 1] = rhs[m - 1] / diag[m - 1];
            for j in (0..m - 1).rev() {
                vals[j] = (rhs[j] + 0.5 * tau * self.lap_out[j] * vals[j + 1]) / diag[j];
            }
        }
        self.normalize(&mut out)?;
        Ok(out)
    }

    fn residual(&self, f: &RadialField) -> (f64, f64) {
        let m = f.m();
        let kin = f.kinetic();
        let pot = f.integrate(|r, v| {
            (0.5 * self.p.gamma * self.p.gamma * r * r
                + self.p.v0 * (-self.p.gamma0 * r * r).exp())
                * v
                * v
        });
        let log_moment = f.integrate(|_, v| {
            let y = v * v;
            if y > 0.0 {
                y * y * y.ln()
            } else {
                0.0
            }
        });
        let omega = (-kin - pot - log_moment) / self.rho;
        let vals = f.values();
        let mut acc = Kahan::new();
        for j in 0..m {
            let inner = if j > 0 { vals[j - 1] } else { 0.0 };
            let outer = if j + 1 < m { vals[j + 1] } else { 0.0 };
            let lap = self.lap_out[j] * (outer - vals[j]) - self.lap_in[j] * (vals[j] - inner);
            let g = -0.5 * lap + self.nonlinear_b(f, j) * vals[j] + omega * vals[j];
            acc.add(f.node(j) * g * g);
        }
        let norm = (2.0 * std::f64::consts::PI * f.h() * acc.value()).sqrt();
        (omega, norm)
    }
}

/// Minimize the critical energy over radial profiles on `[0, r_max]` with
/// `m` staggered cells.
///
/// Radial states carry no angular momentum, so the covariant energy reduces
/// to `1/2 (|f'|^2 + gamma^2 r^2 |f|^2)` plus the bump and the logarithmic
/// term; any mass and bump amplitude are admissible here.
pub fn ground_state_radial(
    r_max: f64,
    m: usize,
    p: &Params,
    cfg: &FlowConfig,
) -> CoreResult<GroundStateResult> {
    p.validate()?;
    cfg.validate()?;
    let mut f = radial_seed(r_max, m, p, cfg.seed)?;
    let flow = RadialFlow::new(&f, *p, p.rho);
    flow.normalize(&mut f)?;
    let (mut energy, mut mu) = flow.metrics(&f);
    let tau0 = cfg.tau;
    let mut tau = cfg.tau;
    let mut iterations = 0;
    let mut converged = false;
    let mut omega = f64::NAN;
    let mut residual = f64::INFINITY;
    while iterations < cfg.max_iter {
        let candidate = flow.step(&f, tau, mu)?;
        let (e_new, mu_new) = flow.metrics(&candidate);
        iterations += 1;
        if e_new > energy + 1e-12 * energy.abs().max(1.0) {
            tau *= 0.5;
            if tau < 1e-12 * tau0 {
                return Err(CoreError::FlowDiverged { iterations, tau });
            }
            continue;
        }
        let decrease = (energy - e_new) / tau;
        f = candidate;
        energy = e_new;
        mu = mu_new;
        let stalled = decrease <= cfg.tol_energy * energy.abs().max(1.0);
        if stalled || iterations % 25 == 0 {
            let (om, res) = flow.residual(&f);
            omega = om;
            residual = res;
            if stalled && res <= cfg.tol_residual {
                converged = true;
                break;
            }
        }
    }
    if !residual.is_finite() {
        let (om, res) = flow.residual(&f);
        omega = om;
        residual = res;
    }
    Ok(GroundStateResult {
        state: MinimizerState::Radial(f),
        energy,
        omega,
        residual,
        iterations,
        converged,
    })
}

fn radial_seed(r_max: f64, m: usize, p: &Params, kind: SeedKind) -> CoreResult<RadialField> {
    match kind {
        SeedKind::Gaussian(b) => {
            if !(b.is_finite() && b > 0.0) {
                return Err(CoreError::InvalidParam {
                    name: "seed",
                    value: b,
                    constraint: "gaussian width > 0",
                });
            }
            RadialField::from_fn(r_max, m, |r| (-b * r * r).exp())
        }
        SeedKind::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut widths = [0.0; 4];
            let mut amps = [0.0; 4];
            for k in 0..4 {
                widths[k] = 0.2 + 1.3 * rng.gen::<f64>();
                amps[k] = 0.2 + 0.8 * rng.gen::<f64>();
            }
            RadialField::from_fn(r_max, m, |r| {
                (0..4).map(|k| amps[k] * (-widths[k] * r * r).exp()).sum()
            })
        }
        SeedKind::Vortex(_) => Err(CoreError::InvalidParam {
            name: "seed",
            value: p.rho,
            constraint: "gaussian or random for the radial solver (winding states are not radial)",
        }),
    }
}
