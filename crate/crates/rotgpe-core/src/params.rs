//! Physical parameters and the rotation-speed regime taxonomy.

use crate::error::{CoreError, CoreResult};

/// Parameters of the rotating-trap model.
///
/// The potential is `V(x) = (gamma^2/2) |x|^2 + v0 e^{-gamma0 |x|^2}`, the
/// frame rotates at `omega_rot`, three-body loss has strength `k3 >= 0`, and
/// `rho` is the target mass for constrained minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub gamma: f64,
    pub gamma0: f64,
    pub v0: f64,
    pub omega_rot: f64,
    pub k3: f64,
    pub rho: f64,
}

/// Rotation speed relative to the trap frequency. The comparison is exact on
/// purpose: `Critical` activates code paths that are only meaningful at
/// `omega_rot == gamma`, so a caller who wants them must set the two fields
/// to the same float.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            gamma: 1.0,
            gamma0: 1.0,
            v0: 0.0,
            omega_rot: 0.0,
            k3: 0.0,
            rho: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> CoreResult<()> {
        let finite_checks: [(&'static str, f64); 6] = [
            ("gamma", self.gamma),
            ("gamma0", self.gamma0),
            ("v0", self.v0),
            ("omega_rot", self.omega_rot),
            ("k3", self.k3),
            ("rho", self.rho),
        ];
        for (name, value) in finite_checks {
            if !value.is_finite() {
                return Err(CoreError::InvalidParam {
                    name,
                    value,
                    constraint: "finite",
                });
            }
        }
        if self.gamma <= 0.0 {
            return Err(CoreError::InvalidParam {
                name: "gamma",
                value: self.gamma,
                constraint: "positive trap frequency",
            });
        }
        if self.gamma0 <= 0.0 {
            return Err(CoreError::InvalidParam {
                name: "gamma0",
                value: self.gamma0,
                constraint: "positive bump width",
            });
        }
        if self.v0 < 0.0 {
            return Err(CoreError::InvalidParam {
                name: "v0",
                value: self.v0,
                constraint: "nonnegative bump height",
            });
        }
        if self.omega_rot < 0.0 {
            return Err(CoreError::InvalidParam {
                name: "omega_rot",
                value: self.omega_rot,
                constraint: "nonnegative rotation speed",
            });
        }
        if self.k3 < 0.0 {
            return Err(CoreError::InvalidParam {
                name: "k3",
                value: self.k3,
                constraint: "nonnegative loss rate",
            });
        }
        if self.rho <= 0.0 {
            return Err(CoreError::InvalidParam {
                name: "rho",
                value: self.rho,
                constraint: "positive mass",
            });
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.omega_rot < self.gamma {
            Regime::Subcritical
        } else if self.omega_rot == self.gamma {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }

    /// Trap potential `V(x1, x2)`.
    pub fn potential(&self, x1: f64, x2: f64) -> f64 {
        let r2 = x1 * x1 + x2 * x2;
        0.5 * self.gamma * self.gamma * r2 + self.v0 * (-self.gamma0 * r2).exp()
    }

    /// Radial derivative contraction `x . grad V` (enters the dilation
    /// identity): `gamma^2 |x|^2 - 2 v0 gamma0 |x|^2 e^{-gamma0 |x|^2}`.
    pub fn potential_dilation(&self, x1: f64, x2: f64) -> f64 {
        let r2 = x1 * x1 + x2 * x2;
        self.gamma * self.gamma * r2 - 2.0 * self.v0 * self.gamma0 * r2 * (-self.gamma0 * r2).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_validate() {
        assert!(Params::default().validate().is_ok());
    }

    #[test]
    fn regime_classification_is_exact() {
        let mut p = Params {
            gamma: 0.3,
            omega_rot: 0.2,
            ..Params::default()
        };
        assert_eq!(p.regime(), Regime::Subcritical);
        p.omega_rot = 0.3;
        assert_eq!(p.regime(), Regime::Critical);
        p.omega_rot = 0.3 + 1e-16;
        // one ulp above gamma is already supercritical: the comparison is
        // intentionally not fuzzy
        assert_eq!(p.regime(), Regime::Supercritical);
    }

    #[test]
    fn validation_rejects_bad_fields() {
        for bad in [
            Params {
                gamma: 0.0,
                ..Params::default()
            },
            Params {
                gamma0: -1.0,
                ..Params::default()
            },
            Params {
                v0: -0.5,
                ..Params::default()
            },
            Params {
                omega_rot: -0.1,
                ..Params::default()
            },
            Params {
                k3: -1e-9,
                ..Params::default()
            },
            Params {
                rho: 0.0,
                ..Params::default()
            },
            Params {
                gamma: f64::NAN,
                ..Params::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?} should fail validation");
        }
    }

    #[test]
    fn potential_and_dilation_agree_at_origin_and_far_field() {
        let p = Params {
            gamma: 0.5,
            gamma0: 2.0,
            v0: 0.7,
            ..Params::default()
        };
        assert!((p.potential(0.0, 0.0) - 0.7).abs() < 1e-15);
        assert_eq!(p.potential_dilation(0.0, 0.0), 0.0);
        // far away the bump vanishes and V ~ harmonic, x.grad V ~ 2 V
        let (x1, x2) = (30.0, -40.0);
        let v = p.potential(x1, x2);
        let d = p.potential_dilation(x1, x2);
        assert!((d - 2.0 * v).abs() / v < 1e-12);
    }
}
