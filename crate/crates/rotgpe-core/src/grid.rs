//! Uniform periodic grid on the square [-half_width, half_width)^2.
//!
//! All quadrature and spectral layout conventions live here. The domain is a
//! truncation of the plane: fields are expected to decay well below round-off
//! at the boundary, so the rectangle rule is spectrally accurate and the
//! periodic transform introduces no visible aliasing.

use crate::error::{CoreError, CoreResult};

/// Grid geometry plus the per-axis spectral wavenumbers.
///
/// Invariants (enforced by [`GridSpec::new`]):
/// - `n >= 8` and a power of two,
/// - `dx * n == 2 * half_width` exactly,
/// - wavenumber index `j` maps to `(pi/half_width) * j` for `j < n/2` and
///   `(pi/half_width) * (j - n)` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    n: usize,
    dx: f64,
    wavenumbers: Vec<f64>,
    nodes: Vec<f64>,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> CoreResult<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(CoreError::InvalidHalfWidth(half_width));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(CoreError::InvalidGridSize(n));
        }
        let dx = 2.0 * half_width / n as f64;
        let base = std::f64::consts::PI / half_width;
        let wavenumbers = (0..n)
            .map(|j| {
                if j < n / 2 {
                    base * j as f64
                } else {
                    base * (j as f64 - n as f64)
                }
            })
            .collect();
        let nodes = (0..n).map(|i| -half_width + i as f64 * dx).collect();
        Ok(GridSpec {
            half_width,
            n,
            dx,
            wavenumbers,
            nodes,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Quadrature weight of one cell.
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Physical coordinate of node index `i` along either axis.
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Spectral wavenumber of index `j` along either axis.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.wavenumbers[j]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index of node (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// True when both geometry numbers agree bitwise; fields on grids that
    /// compare equal here are freely interoperable.
    pub fn same_geometry(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }

    pub(crate) fn mismatch_error(&self, other: &GridSpec) -> CoreError {
        CoreError::GridMismatch {
            left_n: self.n,
            left_w: self.half_width,
            right_n: other.n,
            right_w: other.half_width,
        }
    }
}
