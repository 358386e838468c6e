//! Radial ground state of the focusing cubic problem and the sharp quartic
//! interpolation constant derived from it.
//!
//! `Q` is the positive decaying solution of `-1/2 (Q'' + Q'/r) + Q = Q^3`
//! with `Q'(0) = 0`, found by bisection on the center value `Q(0)`: too
//! small and the trajectory turns back up, too large and it crosses zero.
//! The bisection always runs to machine width regardless of the requested
//! tolerance, because the stored tail amplifies any center error like
//! `e^{sqrt(2) r}`; at machine width the amplified error stays below the
//! true tail out to the stored radius.

use std::sync::LazyLock;

use crate::error::{CoreError, CoreResult};
use crate::radial::RadialField;

const BRACKET_LO: f64 = 1.2;
const BRACKET_HI: f64 = 3.0;
/// Stored profile extent: far enough that the truncated tail mass is ~1e-9,
/// near enough that the amplified center rounding stays below the tail.
const R_PROFILE: f64 = 8.0;
const M_PROFILE: usize = 16_384;
/// Shots are classified out to here; every center value at least one ulp off
/// the true one produces a sign event before this radius.
const R_CLASSIFY: f64 = 15.0;

#[derive(Debug, Clone)]
pub struct CubicGroundState {
    pub profile: RadialField,
    pub l2_squared: f64,
    pub peak: f64,
}

impl CubicGroundState {
    /// Sup-norm defect of the profile in the radially weighted equation
    /// `-1/2 (r Q'' + Q') + r (Q - Q^3) = 0` (the raw form divides by r and
    /// is singular at the first node), using sixth-order centered
    /// differences with an even extension across the origin. The stencil is
    /// strided: at the native spacing the second difference divides
    /// rounding noise of the O(1) values by h^2 ~ 2e-7, drowning the true
    /// residual; spacing 8h balances that noise against the O(H^6)
    /// truncation driven by the large origin derivatives. The last 24 nodes
    /// lack a full stencil and are skipped.
    pub fn residual_sup(&self) -> f64 {
        const C2: [f64; 7] = [
            1.0 / 90.0,
            -3.0 / 20.0,
            1.5,
            -49.0 / 18.0,
            1.5,
            -3.0 / 20.0,
            1.0 / 90.0,
        ];
        const C1: [f64; 7] = [
            -1.0 / 60.0,
            3.0 / 20.0,
            -0.75,
            0.0,
            0.75,
            -3.0 / 20.0,
            1.0 / 60.0,
        ];
        const STRIDE: isize = 8;
        let v = self.profile.values();
        let m = v.len();
        let h = self.profile.h();
        let hh = h * STRIDE as f64;
        let fetch = |j: isize| -> f64 {
            if j < 0 {
                v[(-1 - j) as usize]
            } else {
                v[j as usize]
            }
        };
        let mut worst = 0.0f64;
        for j in 0..m.saturating_sub(3 * STRIDE as usize) {
            let r = (j as f64 + 0.5) * h;
            let mut d2 = 0.0;
            let mut d1 = 0.0;
            for (k, (c2, c1)) in C2.iter().zip(C1.iter()).enumerate() {
                let q = fetch(j as isize + (k as isize - 3) * STRIDE);
                d2 += c2 * q;
                d1 += c1 * q;
            }
            d2 /= hh * hh;
            d1 /= hh;
            let q = v[j];
            worst = worst.max((-0.5 * (r * d2 + d1) + r * (q - q * q * q)).abs());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    /// Trajectory crossed zero: center value too large.
    Crossed,
    /// Trajectory turned back upward (or outlived the classification
    /// window): center value too small.
    TurnedUp,
}

/// The stepper hands off from a power series to RK4 here. Inside this
/// radius `h/r` is too large for the stepper to hold its order against the
/// `p/r` term; outside it the series would need ever more terms.
const R_SERIES: f64 = 0.125;
const SERIES_TERMS: usize = 10;

/// Even-power Taylor coefficients of the solution with center value `a`:
/// `Q(r) = sum c_k r^{2k}`. The recurrence comes from matching powers in
/// `Q'' + Q'/r = 2Q - 2Q^3`, whose left side maps `r^{2k+2}` to
/// `4(k+1)^2 r^{2k}`.
fn series_coeffs(a: f64) -> [f64; SERIES_TERMS] {
    let mut c = [0.0; SERIES_TERMS];
    c[0] = a;
    for k in 0..SERIES_TERMS - 1 {
        let mut cube = 0.0;
        for i in 0..=k {
            for j in 0..=(k - i) {
                cube += c[i] * c[j] * c[k - i - j];
            }
        }
        c[k + 1] = (2.0 * c[k] - 2.0 * cube) / (4.0 * ((k + 1) * (k + 1)) as f64);
    }
    c
}

fn series_eval(c: &[f64; SERIES_TERMS], r: f64) -> (f64, f64) {
    let r2 = r * r;
    let mut q = 0.0;
    for k in (0..SERIES_TERMS).rev() {
        q = q * r2 + c[k];
    }
    let mut dq = 0.0;
    for k in (1..SERIES_TERMS).rev() {
        dq = dq * r2 + (2 * k) as f64 * c[k];
    }
    (q, dq * r)
}

fn ode_rhs(r: f64, q: f64, p: f64) -> (f64, f64) {
    (p, 2.0 * q * (1.0 - q * q) - p / r)
}

fn rk4(r: f64, q: f64, p: f64, h: f64) -> (f64, f64) {
    let (k1q, k1p) = ode_rhs(r, q, p);
    let (k2q, k2p) = ode_rhs(r + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p);
    let (k3q, k3p) = ode_rhs(r + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p);
    let (k4q, k4p) = ode_rhs(r + h, q + h * k3q, p + h * k3p);
    (
        q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

/// Integrate one trajectory, optionally recording up to `m_record` node
/// values at `r_j = (j + 1/2) h`. The series covers the nodes inside
/// `R_SERIES` (no sign events happen there for bracketed center values);
/// RK4 continues node-to-node from the handoff.
fn shoot(a: f64, h: f64, mut record: Option<(&mut Vec<f64>, usize)>) -> Shot {
    let coeffs = series_coeffs(a);
    let j_switch = (R_SERIES / h) as usize;
    let mut r = (j_switch as f64 + 0.5) * h;
    let (mut q, mut p) = series_eval(&coeffs, r);
    if let Some((v, _)) = record.as_mut() {
        for j in 0..=j_switch {
            let (qj, _) = series_eval(&coeffs, (j as f64 + 0.5) * h);
            v.push(qj);
        }
    }
    while r < R_CLASSIFY {
        let (qn, pn) = rk4(r, q, p, h);
        q = qn;
        p = pn;
        r += h;
        if let Some((v, m_record)) = record.as_mut() {
            if v.len() < *m_record {
                v.push(q);
            }
        }
        if q <= 0.0 {
            return Shot::Crossed;
        }
        if p >= 0.0 {
            return Shot::TurnedUp;
        }
    }
    Shot::TurnedUp
}

fn solve(r_profile: f64, m: usize) -> CoreResult<CubicGroundState> {
    let h = r_profile / m as f64;
    let mut lo = BRACKET_LO;
    let mut hi = BRACKET_HI;
    if shoot(lo, h, None) != Shot::TurnedUp || shoot(hi, h, None) != Shot::Crossed {
        return Err(CoreError::ShootingBracket { lo, hi });
    }
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || hi <= mid {
            break;
        }
        match shoot(mid, h, None) {
            Shot::TurnedUp => lo = mid,
            Shot::Crossed => hi = mid,
        }
    }
    let a = 0.5 * (lo + hi);
    let mut nodes = Vec::with_capacity(m);
    shoot(a, h, Some((&mut nodes, m)));
    if nodes.len() < m {
        // a sign event inside the stored window means the bracket did not
        // actually isolate the decaying solution
        return Err(CoreError::ShootingBracket { lo, hi });
    }
    nodes.truncate(m);
    let profile = RadialField::from_values(r_profile, nodes)?;
    let l2_squared = profile.mass();
    Ok(CubicGroundState {
        profile,
        l2_squared,
        peak: a,
    })
}

/// Solve for the cubic ground state. `tol` is the acceptable discrete
/// residual; the solver always runs at machine precision, which beats every
/// admissible `tol` by a wide margin, so the parameter acts as a request
/// validator and a documentation of intent.
pub fn cubic_ground_state(tol: f64) -> CoreResult<CubicGroundState> {
    if !(tol > 1e-14 && tol < 1e-6) {
        return Err(CoreError::InvalidParam {
            name: "tol",
            value: tol,
            constraint: "strictly between 1e-14 and 1e-6",
        });
    }
    solve(R_PROFILE, M_PROFILE)
}

static CUBIC: LazyLock<CubicGroundState> =
    LazyLock::new(|| solve(R_PROFILE, M_PROFILE).expect("built-in bracket and mesh are valid"));

/// Shared immutable ground state (computed on first use).
pub fn cached_cubic_ground_state() -> &'static CubicGroundState {
    &CUBIC
}

/// Sharp constant of the quartic interpolation inequality, `1 / |Q|_2^2`.
pub fn c4_constant() -> f64 {
    1.0 / cached_cubic_ground_state().l2_squared
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tol_range_is_enforced() {
        assert!(cubic_ground_state(1e-14).is_err());
        assert!(cubic_ground_state(1e-6).is_err());
        assert!(cubic_ground_state(0.0).is_err());
        assert!(cubic_ground_state(1e-10).is_ok());
    }

    #[test]
    fn profile_is_positive_and_strictly_decreasing() {
        let q = cached_cubic_ground_state();
        let v = q.profile.values();
        assert!(v.iter().all(|&x| x > 0.0));
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn discrete_residual_is_tiny() {
        let q = cached_cubic_ground_state();
        let res = q.residual_sup();
        assert!(res < 1e-10, "residual sup = {res:e}");
    }

    #[test]
    fn mass_exceeds_pi_and_peak_is_in_range() {
        let q = cached_cubic_ground_state();
        assert!(q.l2_squared > PI, "|Q|^2 = {}", q.l2_squared);
        // regression pin from this solver (stable to the shown digits)
        assert!((q.l2_squared - 5.85044).abs() < 5e-4, "|Q|^2 = {}", q.l2_squared);
        assert!((q.peak - 2.2062).abs() < 5e-4, "peak = {}", q.peak);
    }

    #[test]
    fn stationarity_relations_hold() {
        // testing against the equation's own integral identities:
        // |grad Q|^2 = |Q|_4^4 = 2 |Q|_2^2
        let q = cached_cubic_ground_state();
        let l4 = q.profile.integrate(|_, v| v.powi(4));
        let grad_sq = 2.0 * q.profile.kinetic();
        let mass = q.l2_squared;
        assert!(
            (grad_sq - l4).abs() / l4 < 1e-5,
            "grad^2 = {grad_sq}, l4 = {l4}"
        );
        assert!(
            (l4 - 2.0 * mass).abs() / l4 < 1e-6,
            "l4 = {l4}, 2 mass = {}",
            2.0 * mass
        );
    }

    #[test]
    fn mass_is_stable_under_mesh_refinement() {
        // the domain extension stops at r = 10: past r ~ 12 the growing
        // mode amplifies one ulp of center error to the size of the tail
        // itself, so double precision cannot follow the profile there
        let base = cached_cubic_ground_state().l2_squared;
        let finer = solve(R_PROFILE, 2 * M_PROFILE).unwrap().l2_squared;
        let wider = solve(10.0, 20_480).unwrap().l2_squared;
        assert!((base - finer).abs() < 1e-6, "base {base} vs finer {finer}");
        assert!((base - wider).abs() < 1e-6, "base {base} vs wider {wider}");
    }

    #[test]
    fn c4_matches_cached_mass() {
        let c4 = c4_constant();
        assert!((c4 * cached_cubic_ground_state().l2_squared - 1.0).abs() < 1e-15);
    }
}
