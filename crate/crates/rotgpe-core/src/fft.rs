//! Two-dimensional FFT on flat row-major buffers, with a process-wide plan
//! cache keyed by the transform length.
//!
//! Convention: `forward` is unnormalized, `inverse` divides by n^2, so
//! `inverse(forward(f)) == f` up to round-off and Parseval reads
//! `sum |f|^2 = (1/n^2) * sum |fhat|^2`.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

static PLANS: LazyLock<Mutex<HashMap<usize, PlanPair>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn plans_for(n: usize) -> PlanPair {
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Reusable 2-D transform workspace for one grid size.
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    transpose_buf: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let (forward, inverse) = plans_for(n);
        Fft2 {
            n,
            forward,
            inverse,
            transpose_buf: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.apply(buf, true);
    }

    /// Normalized inverse transform (divides by n^2), in place.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.apply(buf, false);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    fn apply(&mut self, buf: &mut [Complex64], fwd: bool) {
        assert_eq!(buf.len(), self.n * self.n, "buffer does not match plan size");
        let plan = if fwd { &self.forward } else { &self.inverse };
        // rows, transpose, rows again, transpose back
        run_rows(plan, buf, self.n);
        transpose(self.n, buf, &mut self.transpose_buf);
        run_rows(plan, &mut self.transpose_buf, self.n);
        transpose(self.n, &self.transpose_buf, buf);
    }
}

fn run_rows(plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64], n: usize) {
    let scratch_len = plan.get_inplace_scratch_len();
    buf.par_chunks_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| plan.process_with_scratch(row, scratch),
    );
}

fn transpose(n: usize, src: &[Complex64], dst: &mut [Complex64]) {
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        let imax = (ib + BLOCK).min(n);
        for jb in (0..n).step_by(BLOCK) {
            let jmax = (jb + BLOCK).min(n);
            for i in ib..imax {
                for j in jb..jmax {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}
