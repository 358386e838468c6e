//! 1D quadrature and scalar optimization helpers.

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol`. Recursion splits until the Richardson estimate of the local error
/// is below the (proportionally divided) tolerance.
pub(crate) fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Maximize a unimodal-after-scanning function on `[a, b]`: dense scan to
/// bracket the best sample, then golden-section refinement. Returns
/// `(argmax, max)`.
pub(crate) fn scan_maximize(f: &impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> (f64, f64) {
    debug_assert!(samples >= 3);
    let step = (b - a) / (samples - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..samples {
        let v = f(a + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    golden_maximize(f, lo, hi)
}

fn golden_maximize(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let val = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((val - 2.0).abs() < 1e-11, "got {val}");
        let val = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-13);
        assert!((val - PI.sqrt() / 2.0).abs() < 1e-12, "got {val}");
    }

    #[test]
    fn simpson_handles_mild_endpoint_spikes() {
        // integrand with a sharp but smooth feature
        let val = adaptive_simpson(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10);
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((val - exact).abs() / exact < 1e-9, "got {val}, want {exact}");
    }

    #[test]
    fn scan_maximize_finds_interior_peak() {
        let (x, v) = scan_maximize(&|x: f64| -(x - 0.3).powi(2) + 2.0, -1.0, 1.0, 101);
        // near a quadratic max the comparisons flatten out at sqrt(eps), so
        // the argmax is only good to ~1e-8; the value is good to eps
        assert!((x - 0.3).abs() < 1e-6, "argmax = {x}");
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scan_maximize_handles_boundary_peak() {
        let (x, _) = scan_maximize(&|x: f64| x, 0.0, 1.0, 11);
        assert!((x - 1.0).abs() < 1e-9, "got {x}");
    }
}
