//! Closed-form trial states and the constants they pin down.
//!
//! Two families carry all of the analysis: scaled Gaussians
//! `lambda e^{-b|x|^2}` and vortex profiles
//! `C (x1 + i x2)^m e^{-gamma |x|^2 / 2}`. Every moment either has an exact
//! formula (collected here) or reduces to a 1D radial quadrature with the
//! angular phase integrated out analytically. The same module hosts the
//! Gaussian negativity thresholds and the gauge-shifted counterexample
//! showing that the covariant derivative of a modulus can exceed that of
//! the field.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{CoreError, CoreResult};
use crate::field::ComplexField;
use crate::grid::GridSpec;
use crate::params::Params;
use crate::quad::adaptive_simpson;

/// `ln(n!)` by direct summation; exact to ~1e-15 relative for n <= 150.
fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Scaled Gaussian `lambda e^{-b |x|^2}`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianTrial {
    lambda: f64,
    b: f64,
}

impl GaussianTrial {
    pub fn new(lambda: f64, b: f64) -> CoreResult<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(CoreError::InvalidParam {
                name: "lambda",
                value: lambda,
                constraint: "must be finite and > 0",
            });
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(CoreError::InvalidParam {
                name: "b",
                value: b,
                constraint: "must be finite and > 0",
            });
        }
        Ok(GaussianTrial { lambda, b })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Sample the trial on a grid.
    pub fn field(&self, grid: GridSpec) -> ComplexField {
        let (lambda, b) = (self.lambda, self.b);
        ComplexField::from_fn(grid, |x1, x2| {
            Complex64::new(lambda * (-b * (x1 * x1 + x2 * x2)).exp(), 0.0)
        })
    }
}

/// Exact moments of a [`GaussianTrial`].
#[derive(Debug, Clone, Copy)]
pub struct GaussianMoments {
    /// `||f||^2 = lambda^2 pi / 2b`.
    pub mass: f64,
    /// `||x f||^2 = lambda^2 pi / 4b^2`.
    pub xmoment: f64,
    /// `||grad f||^2 = lambda^2 pi`, independent of b.
    pub kinetic: f64,
    /// `||grad_A f||^2 = lambda^2 pi (1 + gamma^2 / 4b^2)`.
    pub magnetic_kinetic: f64,
    /// `||f||^4_{L^4} = lambda^4 pi / 4b`.
    pub l4: f64,
    /// `int |f|^4 ln(|f|^2 / sqrt(e)) = (pi lambda^4 / 4b)(ln lambda^2 - 1)`.
    pub log_moment: f64,
    /// `int V |f|^2 = lambda^2 (gamma^2 pi / 8b^2 + pi V0 / (gamma0 + 2b))`.
    pub gauss_potential: f64,
}

/// All seven closed-form Gaussian moments.
pub fn gaussian_moments(t: &GaussianTrial, p: &Params) -> GaussianMoments {
    let l2 = t.lambda * t.lambda;
    let l4 = l2 * l2;
    let b = t.b;
    GaussianMoments {
        mass: l2 * PI / (2.0 * b),
        xmoment: l2 * PI / (4.0 * b * b),
        kinetic: l2 * PI,
        magnetic_kinetic: l2 * PI * (1.0 + p.gamma * p.gamma / (4.0 * b * b)),
        l4: l4 * PI / (4.0 * b),
        log_moment: l4 * PI / (4.0 * b) * (l2.ln() - 1.0),
        gauss_potential: l2
            * (p.gamma * p.gamma * PI / (8.0 * b * b) + PI * p.v0 / (p.gamma0 + 2.0 * b)),
    }
}

/// Scaled energy density of the Gaussian family at amplitude `theta = lambda^2`:
/// the magnetic energy at critical rotation is `(pi theta / 8 b^2)` times
/// `G(theta) = 4b^2 + gamma^2 - b theta + b theta ln theta`.
pub fn gaussian_energy_factor(theta: f64, b: f64, gamma: f64) -> f64 {
    let log_part = if theta == 0.0 { 0.0 } else { b * theta * theta.ln() };
    4.0 * b * b + gamma * gamma - b * theta + log_part
}

/// The factor above along the negativity path `theta = 2b`:
/// `H(b) = 2b^2 + gamma^2 + 2b^2 ln(2b)`.
pub fn gaussian_witness_factor(b: f64, gamma: f64) -> f64 {
    2.0 * b * b + gamma * gamma + 2.0 * b * b * (2.0 * b).ln()
}

/// Magnetic Gaussian energy at fixed mass `rho` (the amplitude is eliminated
/// through `lambda^2 = 2 b rho / pi`):
/// `E(b) = rho (b + gamma^2/4b) - (b rho^2 / 2 pi)(1 - ln(2 b rho / pi))`.
pub fn gaussian_energy_at_mass(b: f64, rho: f64, gamma: f64) -> f64 {
    rho * (b + gamma * gamma / (4.0 * b))
        - (b * rho * rho / (2.0 * PI)) * (1.0 - (2.0 * b * rho / PI).ln())
}

/// Negativity thresholds of the Gaussian family.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdRecord {
    /// Minimizer of `H`: `b0 = e^{-3/2} / 2`.
    pub b0: f64,
    /// `H(b0) = gamma^2 - 1/(4 e^3)`; negative exactly when a
    /// negative-energy Gaussian exists.
    pub h_at_b0: f64,
    /// `1/(2 e^{3/2})`, the trap rate where `H(b0)` changes sign.
    pub gamma_critical: f64,
}

/// Evaluate the threshold constants at a trap rate.
pub fn threshold_functions(gamma: f64) -> CoreResult<ThresholdRecord> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CoreError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must be finite and > 0",
        });
    }
    // b0 and gamma_critical are the same number: e^{-3/2}/2 = 1/(2 e^{3/2}).
    // Using one float for both keeps H(gamma_critical) = 0 bit-exact.
    let b0 = 0.5 * (-1.5f64).exp();
    Ok(ThresholdRecord {
        b0,
        h_at_b0: gamma * gamma - b0 * b0,
        gamma_critical: b0,
    })
}

/// Vortex profile `C (x1 + i x2)^m e^{-gamma |x|^2 / 2}` normalized to mass
/// `rho`, so `C^2 = rho gamma^{m+1} / (pi m!)`.
#[derive(Debug, Clone, Copy)]
pub struct VortexTrial {
    m: usize,
    rho: f64,
    gamma: f64,
    ln_c_squared: f64,
}

impl VortexTrial {
    pub fn new(m: usize, rho: f64, gamma: f64) -> CoreResult<Self> {
        if m > 50 {
            return Err(CoreError::InvalidParam {
                name: "m",
                value: m as f64,
                constraint: "must be at most 50 for stable factorial evaluation",
            });
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(CoreError::InvalidParam {
                name: "rho",
                value: rho,
                constraint: "must be finite and > 0",
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(CoreError::InvalidParam {
                name: "gamma",
                value: gamma,
                constraint: "must be finite and > 0",
            });
        }
        let ln_c_squared =
            rho.ln() + (m as f64 + 1.0) * gamma.ln() - PI.ln() - ln_factorial(m);
        Ok(VortexTrial {
            m,
            rho,
            gamma,
            ln_c_squared,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `C^2`, the squared normalization constant.
    pub fn c_squared(&self) -> f64 {
        self.ln_c_squared.exp()
    }
}

/// Sample a vortex trial on a grid.
pub fn vortex_field(t: &VortexTrial, grid: GridSpec) -> ComplexField {
    let c = (0.5 * t.ln_c_squared).exp();
    let m = t.m as u32;
    let half_gamma = 0.5 * t.gamma;
    ComplexField::from_fn(grid, |x1, x2| {
        let winding = Complex64::new(x1, x2).powu(m);
        c * (-half_gamma * (x1 * x1 + x2 * x2)).exp() * winding
    })
}

/// Exact moments of a [`VortexTrial`]. The trap moment closes through
/// `int r^{2m+1} e^{-g r^2} dr = m! / 2 g^{m+1}`.
#[derive(Debug, Clone, Copy)]
pub struct VortexMoments {
    /// `||f||^2 = rho`.
    pub mass: f64,
    /// `||grad f||^2 = rho (m+1) gamma`.
    pub kinetic: f64,
    /// `int V |f|^2`; the bump term is
    /// `V0 rho (gamma / (gamma + gamma0))^{m+1}`.
    pub potential: f64,
    /// `L(f) = m rho`.
    pub ang_mom: f64,
    /// `||f||^6_{L^6} = rho^3 gamma^2 (3m)! / (pi^2 (m!)^3 3^{3m+1})`.
    pub l6: f64,
}

/// Closed-form vortex moments; the potential uses the trap of `p`, which may
/// differ from the decay rate baked into the trial.
pub fn vortex_moments(t: &VortexTrial, p: &Params) -> VortexMoments {
    let m = t.m as f64;
    let rho = t.rho;
    let g = t.gamma;
    let xmoment = rho * (m + 1.0) / g;
    let bump = p.v0 * rho * (g / (g + p.gamma0)).powi(t.m as i32 + 1);
    let ln_l6_ratio =
        ln_factorial(3 * t.m) - 3.0 * ln_factorial(t.m) - (3.0 * m + 1.0) * 3.0f64.ln();
    VortexMoments {
        mass: rho,
        kinetic: rho * (m + 1.0) * g,
        potential: 0.5 * p.gamma * p.gamma * xmoment + bump,
        ang_mom: m * rho,
        l6: rho.powi(3) * g * g / (PI * PI) * ln_l6_ratio.exp(),
    }
}

/// Logarithmic energy term `1/2 int |f_m|^4 ln(|f_m|^2 / sqrt(e))` by radial
/// quadrature, the angular phase having unit modulus. The density is
/// evaluated in log form so large windings neither overflow nor lose the
/// `0 ln 0` limit at the endpoints.
pub fn vortex_log_energy(t: &VortexTrial) -> f64 {
    let m = t.m;
    let lnc2 = t.ln_c_squared;
    let g = t.gamma;
    // density peaks at r = sqrt(m/g) and decays as a Gaussian past it
    let r_end = ((m as f64).sqrt() + 8.0) / g.sqrt();
    let integrand = |r: f64| {
        let ln_y = if m == 0 {
            lnc2 - g * r * r
        } else if r <= 0.0 {
            return 0.0;
        } else {
            lnc2 + 2.0 * (m as f64) * r.ln() - g * r * r
        };
        let y_sq = (2.0 * ln_y).exp();
        if y_sq == 0.0 {
            0.0
        } else {
            y_sq * (ln_y - 0.5) * r
        }
    };
    PI * adaptive_simpson(&integrand, 0.0, r_end, 1e-13)
}

/// One row of the vortex energy sweep.
#[derive(Debug, Clone, Copy)]
pub struct VortexEnergyPoint {
    pub m: usize,
    /// Exact part: `1/2 kinetic + potential - Omega ang_mom`.
    pub e_quadratic: f64,
    /// Logarithmic part by radial quadrature.
    pub e_log: f64,
    pub e_total: f64,
    pub ang_mom: f64,
    pub l6: f64,
}

/// Rotating-frame energy of the vortex family for `m = 0..=m_max` at the
/// parameters' mass and trap. Above the critical rotation speed the
/// successive differences approach `-rho (Omega - gamma)`, so the curve
/// eventually decreases without bound.
pub fn vortex_energy_curve(p: &Params, m_max: usize) -> CoreResult<Vec<VortexEnergyPoint>> {
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let t = VortexTrial::new(m, p.rho, p.gamma)?;
        let mom = vortex_moments(&t, p);
        let e_quadratic = 0.5 * mom.kinetic + mom.potential - p.omega_rot * mom.ang_mom;
        let e_log = vortex_log_energy(&t);
        out.push(VortexEnergyPoint {
            m,
            e_quadratic,
            e_log,
            e_total: e_quadratic + e_log,
            ang_mom: mom.ang_mom,
            l6: mom.l6,
        });
    }
    Ok(out)
}

/// The two sides of the modulus inequality probe.
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleRecord {
    /// `||grad_A z||^2`; equals `pi (1 + gamma^2/4)` for every shift.
    pub lhs: f64,
    /// `||grad_A |z|||^2 = ||grad |z|||^2 + gamma^2 ||x z||^2`; grows like
    /// `gamma^2 |y|^2 ||z||^2 / ...` with the shift.
    pub rhs: f64,
}

/// Evaluate both sides for `z(x) = e^{-i A(y) . x} phi(x + y)` with
/// `phi = e^{-|x|^2}` and `y = (y_shift, 0)`.
///
/// The gauge phase is chosen so that `grad_A z` is the translate of
/// `grad_A phi` (the gauge field is linear, so `A(x + y) = A(x) + A(y)`),
/// making the left side shift-invariant while the right side picks up the
/// full trap moment of the displaced bump. A shift-independent bound of the
/// right side by the left is therefore impossible.
pub fn modulus_magnetic_counterexample(
    gamma: f64,
    y_shift: f64,
) -> CoreResult<CounterexampleRecord> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CoreError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must be finite and > 0",
        });
    }
    if !y_shift.is_finite() {
        return Err(CoreError::InvalidParam {
            name: "y_shift",
            value: y_shift,
            constraint: "must be finite",
        });
    }
    let half_width = 12.0f64.max(y_shift.abs() + 6.0);
    let grid = GridSpec::new(half_width, 256)?;
    // A(y) = gamma (-y2, y1) = gamma (0, y_shift), so A(y) . x = gamma y_shift x2
    let z = ComplexField::from_fn(grid, |x1, x2| {
        let u1 = x1 + y_shift;
        let amp = (-(u1 * u1 + x2 * x2)).exp();
        Complex64::from_polar(amp, -gamma * y_shift * x2)
    });
    let lhs = crate::functionals::magnetic_grad_norm_sq(&z, gamma)?;
    let rhs = crate::functionals::grad_norm_sq(&z.modulus())?
        + gamma * gamma * crate::functionals::xmoment(&z)?;
    Ok(CounterexampleRecord { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals;

    fn rel_close(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * (1.0 + want.abs())
    }

    #[test]
    fn gaussian_moments_match_the_quoted_values() {
        let t = GaussianTrial::new(1.0, 0.5).unwrap();
        let p = Params {
            gamma: 0.2,
            ..Params::default()
        };
        let m = gaussian_moments(&t, &p);
        assert!(rel_close(m.mass, PI, 1e-15));
        assert!(rel_close(m.kinetic, PI, 1e-15));
        assert!(rel_close(m.xmoment, PI, 1e-15));
        assert!(rel_close(m.l4, PI / 2.0, 1e-15));
        assert!(rel_close(m.log_moment, -PI / 2.0, 1e-15));
        assert!(rel_close(m.magnetic_kinetic, 1.04 * PI, 1e-15));
    }

    #[test]
    fn gaussian_moments_agree_with_quadrature() {
        let t = GaussianTrial::new(1.3, 0.4).unwrap();
        let p = Params {
            gamma: 0.7,
            gamma0: 1.2,
            v0: 0.5,
            ..Params::default()
        };
        let grid = GridSpec::new(12.0, 256).unwrap();
        let f = t.field(grid);
        let m = gaussian_moments(&t, &p);
        assert!(rel_close(functionals::mass(&f).unwrap(), m.mass, 1e-10));
        assert!(rel_close(functionals::xmoment(&f).unwrap(), m.xmoment, 1e-10));
        assert!(rel_close(functionals::grad_norm_sq(&f).unwrap(), m.kinetic, 1e-10));
        assert!(rel_close(
            functionals::magnetic_grad_norm_sq(&f, p.gamma).unwrap(),
            m.magnetic_kinetic,
            1e-10
        ));
        let l4 = f
            .integrate(|_, _, v| {
                let y = v.norm_sqr();
                y * y
            })
            .unwrap();
        assert!(rel_close(l4, m.l4, 1e-10));
        let log_moment = f
            .integrate(|_, _, v| {
                let y = v.norm_sqr();
                if y == 0.0 {
                    0.0
                } else {
                    y * y * (y.ln() - 0.5)
                }
            })
            .unwrap();
        assert!(rel_close(log_moment, m.log_moment, 1e-10));
        let pot = f
            .integrate(|x1, x2, v| p.potential(x1, x2) * v.norm_sqr())
            .unwrap();
        assert!(rel_close(pot, m.gauss_potential, 1e-10));
    }

    #[test]
    fn tiny_amplitude_scales_every_moment_to_zero() {
        let t = GaussianTrial::new(1e-8, 0.5).unwrap();
        let m = gaussian_moments(&t, &Params::default());
        assert!(m.mass < 1e-15);
        assert!(m.kinetic < 1e-15);
        assert!(m.l4 < 1e-30);
        assert!(m.gauss_potential < 1e-15);
        assert!(GaussianTrial::new(0.0, 1.0).is_err());
        assert!(GaussianTrial::new(1.0, -1.0).is_err());
    }

    #[test]
    fn witness_factor_is_the_energy_factor_on_the_diagonal() {
        for &b in &[0.05, 0.1116, 0.3, 1.0] {
            let g = gaussian_energy_factor(2.0 * b, b, 0.1);
            let h = gaussian_witness_factor(b, 0.1);
            assert!((g - h).abs() < 1e-14 * (1.0 + h.abs()), "b = {b}");
        }
    }

    #[test]
    fn thresholds_pin_the_critical_trap_rate() {
        let rec = threshold_functions(0.1).unwrap();
        assert!(rel_close(rec.b0, 0.5 * (-1.5f64).exp(), 1e-15));
        assert!(rel_close(rec.gamma_critical, 0.111_565, 1e-5));
        // below threshold the witness factor is negative
        assert!(rec.h_at_b0 < 0.0);
        assert!(rel_close(rec.h_at_b0, 0.01 - 0.25 * (-3.0f64).exp(), 1e-12));
        // at the critical rate it vanishes bit-exactly
        let at_crit = threshold_functions(rec.gamma_critical).unwrap();
        assert_eq!(at_crit.h_at_b0, 0.0);
        // above, positive
        assert!(threshold_functions(0.2).unwrap().h_at_b0 > 0.0);
        assert!(threshold_functions(0.0).is_err());
    }

    #[test]
    fn witness_energy_at_its_own_mass_is_negative_below_threshold() {
        // the theta = 2 b0 witness carries mass pi; its energy is
        // (pi / 4 b0) H(b0)
        let gamma = 0.1;
        let rec = threshold_functions(gamma).unwrap();
        let direct = PI / (4.0 * rec.b0) * rec.h_at_b0;
        let via_mass = gaussian_energy_at_mass(rec.b0, PI, gamma);
        assert!(rel_close(via_mass, direct, 1e-12), "{via_mass} vs {direct}");
        assert!(direct < -0.017 && direct > -0.0175, "E = {direct}");
    }

    #[test]
    fn vortex_moments_agree_with_quadrature() {
        let t = VortexTrial::new(3, 2.5, 1.0).unwrap();
        let p = Params {
            gamma: 1.0,
            gamma0: 1.0,
            v0: 0.3,
            ..Params::default()
        };
        let grid = GridSpec::new(16.0, 256).unwrap();
        let f = vortex_field(&t, grid);
        let m = vortex_moments(&t, &p);
        assert!(rel_close(m.mass, 2.5, 1e-15));
        assert!(rel_close(functionals::mass(&f).unwrap(), m.mass, 1e-9));
        assert!(rel_close(functionals::grad_norm_sq(&f).unwrap(), m.kinetic, 1e-9));
        assert!(rel_close(
            functionals::angular_momentum(&f).unwrap(),
            m.ang_mom,
            1e-9
        ));
        let pot = f
            .integrate(|x1, x2, v| p.potential(x1, x2) * v.norm_sqr())
            .unwrap();
        assert!(rel_close(pot, m.potential, 1e-9));
        let l6 = f
            .integrate(|_, _, v| {
                let y = v.norm_sqr();
                y * y * y
            })
            .unwrap();
        assert!(rel_close(l6, m.l6, 1e-9), "quadrature {l6} vs closed {}", m.l6);
    }

    #[test]
    fn vortex_l6_closed_form_is_anchored_by_quadrature() {
        // m = 1, rho = 1, gamma = 1: the sixth-power norm is
        // (2/27) gamma^2 rho^3 / pi^2; quadrature on a wide grid arbitrates
        // the combinatorial factor.
        let t = VortexTrial::new(1, 1.0, 1.0).unwrap();
        let m = vortex_moments(&t, &Params::default());
        let expect = 2.0 / 27.0 / (PI * PI);
        assert!(rel_close(m.l6, expect, 1e-14), "closed {} vs {expect}", m.l6);
        let grid = GridSpec::new(14.0, 256).unwrap();
        let f = vortex_field(&t, grid);
        let quad = f
            .integrate(|_, _, v| {
                let y = v.norm_sqr();
                y * y * y
            })
            .unwrap();
        assert!(rel_close(quad, expect, 1e-9), "quadrature {quad} vs {expect}");
    }

    #[test]
    fn vortex_l6_decreases_monotonically_to_zero() {
        let p = Params::default();
        let first = vortex_moments(&VortexTrial::new(0, 1.5, 0.8).unwrap(), &p).l6;
        let mut last = f64::INFINITY;
        for m in 0..=50 {
            let t = VortexTrial::new(m, 1.5, 0.8).unwrap();
            let l6 = vortex_moments(&t, &p).l6;
            assert!(l6 < last, "m = {m}: {l6} !< {last}");
            last = l6;
        }
        // Stirling gives l6(m)/l6(0) ~ sqrt(3) / (2 pi m), about 1/181 at
        // m = 50; the decay is polynomial, not exponential.
        let asymptote = first * 3.0f64.sqrt() / (2.0 * PI * 50.0);
        assert!(last < asymptote, "l6(50) = {last}, asymptote {asymptote}");
        assert!(last > 0.9 * asymptote);
        assert!(VortexTrial::new(51, 1.0, 1.0).is_err());
    }

    #[test]
    fn sampled_vortex_energy_matches_the_curve_entry() {
        let p = Params {
            gamma: 1.0,
            gamma0: 1.0,
            v0: 0.2,
            omega_rot: 0.7,
            k3: 0.0,
            rho: 1.5,
        };
        let curve = vortex_energy_curve(&p, 2).unwrap();
        let point = curve[2];
        assert_eq!(point.m, 2);
        let t = VortexTrial::new(2, p.rho, p.gamma).unwrap();
        let grid = GridSpec::new(16.0, 256).unwrap();
        let f = vortex_field(&t, grid);
        let e = functionals::energy(&f, &p).unwrap();
        assert!(
            rel_close(e, point.e_total, 1e-8),
            "grid {e} vs curve {}",
            point.e_total
        );
        // m = 0 entry: no winding, so no rotation term
        assert_eq!(curve[0].ang_mom, 0.0);
        assert!(rel_close(
            curve[0].e_quadratic,
            p.rho * p.gamma + 0.5 * p.v0 * p.rho,
            1e-12
        ));
    }

    #[test]
    fn counterexample_sides_agree_at_zero_shift() {
        let gamma = 0.5;
        let rec = modulus_magnetic_counterexample(gamma, 0.0).unwrap();
        let expect = PI * (1.0 + gamma * gamma / 4.0);
        assert!(rel_close(rec.lhs, expect, 1e-8), "lhs = {}", rec.lhs);
        assert!(rel_close(rec.rhs, expect, 1e-8), "rhs = {}", rec.rhs);
    }

    #[test]
    fn counterexample_breaks_the_bound_at_large_shift() {
        let rec = modulus_magnetic_counterexample(1.0, 10.0).unwrap();
        // left side is shift-invariant ...
        assert!(rel_close(rec.lhs, 1.25 * PI, 1e-6), "lhs = {}", rec.lhs);
        // ... while the right side carries the displaced trap moment
        assert!(rel_close(rec.rhs, 51.25 * PI, 1e-8), "rhs = {}", rec.rhs);
        assert!(rec.rhs > 10.0 * rec.lhs);
        assert!(modulus_magnetic_counterexample(-1.0, 0.0).is_err());
    }
}
