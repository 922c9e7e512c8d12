//! Separable n-dimensional complex FFT on N^n row-major arrays.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct NdFft {
    dim: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub fn new(dim: usize, len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    /// Unnormalized forward transform, sign convention exp(-2 pi i j k / N).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, self.forward.as_ref());
    }

    /// Unnormalized inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, self.inverse.as_ref());
    }

    fn apply(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.len;
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            let outer = data.len() / (n * stride);
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}
