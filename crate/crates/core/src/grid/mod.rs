//! Truncated periodic box [-L, L)^n with staggered nodes.
//!
//! Node j on an axis sits at x_j = -L + (j + 1/2) dx with dx = 2L/N, so the
//! origin is a cell corner and never a node. Flat arrays are row-major with
//! axis 0 slowest. Fourier coefficients are stored in FFT order: index m
//! on an axis carries frequency k/(2L) with k = m for m < N/2, m - N otherwise.

mod field;
pub mod io;
mod params;
mod weights;

use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::NdFft;

pub use field::Field;
pub use params::{Exponents, ProblemParams};
pub use weights::SingularWeightRule;

struct GridInner {
    dim: usize,
    npts: usize,
    half_len: f64,
    fft: NdFft,
    radii: Vec<f64>,
    kmag: Vec<f64>,
    weight_cache: Mutex<Vec<(u64, Arc<Vec<f64>>)>>,
}

/// Immutable, cheaply clonable grid handle.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.dim())
            .field("N", &self.points_per_axis())
            .field("L", &self.half_length())
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim()
                && self.points_per_axis() == other.points_per_axis()
                && self.half_length() == other.half_length())
    }
}

/// Builds a grid; see [`SpectralGrid::new`].
pub fn make_grid(n: usize, npts: usize, half_len: f64) -> Result<SpectralGrid> {
    SpectralGrid::new(n, npts, half_len)
}

impl SpectralGrid {
    pub fn new(n: usize, npts: usize, half_len: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension n = {n} must be 1, 2 or 3")));
        }
        if npts < 8 || !npts.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {npts} must be a power of two >= 8"
            )));
        }
        if !(half_len > 0.0 && half_len.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {half_len} must be positive")));
        }
        let total = npts.pow(n as u32);
        let dx = 2.0 * half_len / npts as f64;
        let axis_x: Vec<f64> = (0..npts).map(|j| -half_len + (j as f64 + 0.5) * dx).collect();
        let axis_k: Vec<f64> = (0..npts)
            .map(|m| 2.0 * std::f64::consts::PI * freq_index(m, npts) as f64 / (2.0 * half_len))
            .collect();
        let mut radii = Vec::with_capacity(total);
        let mut kmag = Vec::with_capacity(total);
        for flat in 0..total {
            let idx = unflatten(flat, n, npts);
            let (mut r2, mut k2) = (0.0, 0.0);
            for &i in &idx[..n] {
                r2 += axis_x[i] * axis_x[i];
                k2 += axis_k[i] * axis_k[i];
            }
            radii.push(r2.sqrt());
            kmag.push(k2.sqrt());
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                dim: n,
                npts,
                half_len,
                fft: NdFft::new(n, npts),
                radii,
                kmag,
                weight_cache: Mutex::new(Vec::new()),
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.inner.npts
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_len
    }

    /// Total number of nodes N^n.
    pub fn len(&self) -> usize {
        self.inner.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.inner.half_len / self.inner.npts as f64
    }

    /// Cell volume h = dx^n.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim() as i32)
    }

    /// Frequency cell volume (2L)^{-n}.
    pub fn dxi(&self) -> f64 {
        (2.0 * self.inner.half_len).powi(-(self.dim() as i32))
    }

    pub fn axis_coord(&self, j: usize) -> f64 {
        -self.inner.half_len + (j as f64 + 0.5) * self.dx()
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        unflatten(flat, self.dim(), self.inner.npts)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim()]
            .iter()
            .fold(0, |acc, &i| acc * self.inner.npts + i)
    }

    /// Coordinates of node `flat`; unused trailing components are zero.
    pub fn node(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for d in 0..self.dim() {
            x[d] = self.axis_coord(idx[d]);
        }
        x
    }

    /// Euclidean node radii |x| in flat order.
    pub fn radii(&self) -> &[f64] {
        &self.inner.radii
    }

    /// Sup-norm |x|_inf of node `flat`.
    pub fn sup_radius(&self, flat: usize) -> f64 {
        let x = self.node(flat);
        x[..self.dim()].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Index of the node mirrored through the origin.
    pub fn reflect(&self, flat: usize) -> usize {
        let mut idx = self.multi_index(flat);
        for i in idx.iter_mut().take(self.dim()) {
            *i = self.inner.npts - 1 - *i;
        }
        self.flat_index(&idx)
    }

    /// Signed integer wave vector of coefficient slot `flat`.
    pub fn wave_index(&self, flat: usize) -> [i64; 3] {
        let idx = self.multi_index(flat);
        let mut k = [0; 3];
        for d in 0..self.dim() {
            k[d] = freq_index(idx[d], self.inner.npts);
        }
        k
    }

    /// Frequency vector xi_k = k/(2L) of coefficient slot `flat`.
    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let k = self.wave_index(flat);
        let scale = 1.0 / (2.0 * self.inner.half_len);
        [k[0] as f64 * scale, k[1] as f64 * scale, k[2] as f64 * scale]
    }

    /// |2 pi xi| per coefficient slot, FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.kmag
    }

    /// True when every axis index of slot `flat` is the Nyquist index N/2.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        idx[..self.dim()].iter().any(|&i| i == self.inner.npts / 2)
    }

    /// c_k = h * DFT(u)_k, so that h sum u^2 = dxi sum |c|^2.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.inner.fft.forward(&mut buf);
        let h = self.cell_volume();
        for c in &mut buf {
            *c *= h;
        }
        buf
    }

    /// Inverse of [`forward`](Self::forward), keeping the real part.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inner.fft.inverse(&mut buf);
        let scale = self.dxi();
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Weight rule for |x|^{-a}; cached per exponent.
    pub fn singular_weight(&self, a: f64) -> Result<SingularWeightRule> {
        if !(a >= 0.0 && a < self.dim() as f64) {
            return Err(Error::InvalidArgument(format!(
                "weight exponent a = {a} must satisfy 0 <= a < n = {}",
                self.dim()
            )));
        }
        let key = a.to_bits();
        {
            let cache = self.inner.weight_cache.lock().expect("weight cache poisoned");
            if let Some((_, w)) = cache.iter().find(|(k, _)| *k == key) {
                return Ok(SingularWeightRule::new(a, w.clone()));
            }
        }
        let w = Arc::new(weights::cell_averages(self, a));
        let mut cache = self.inner.weight_cache.lock().expect("weight cache poisoned");
        if let Some((_, existing)) = cache.iter().find(|(k, _)| *k == key) {
            return Ok(SingularWeightRule::new(a, existing.clone()));
        }
        cache.push((key, w.clone()));
        Ok(SingularWeightRule::new(a, w))
    }
}

/// Builds the weight rule for |x|^{-a}; see [`SpectralGrid::singular_weight`].
pub fn singular_weight(grid: &SpectralGrid, a: f64) -> Result<SingularWeightRule> {
    grid.singular_weight(a)
}

fn freq_index(m: usize, npts: usize) -> i64 {
    if m < npts / 2 {
        m as i64
    } else {
        m as i64 - npts as i64
    }
}

fn unflatten(flat: usize, n: usize, npts: usize) -> [usize; 3] {
    let mut idx = [0; 3];
    let mut rem = flat;
    for d in (0..n).rev() {
        idx[d] = rem % npts;
        rem /= npts;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staggered_nodes_in_one_dimension() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let xs: Vec<f64> = (0..8).map(|j| g.node(j)[0]).collect();
        let expect = [-0.875, -0.625, -0.375, -0.125, 0.125, 0.375, 0.625, 0.875];
        for (x, e) in xs.iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
        let rmin = g.radii().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((rmin - 0.125).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_lattice() {
        let g = make_grid(2, 16, 10.0).unwrap();
        assert_eq!(g.len(), 256);
        let mut ks: Vec<i64> = (0..16).map(|m| g.wave_index(m)[1]).collect();
        ks.sort();
        assert_eq!(ks, (-8..8).collect::<Vec<_>>());
        assert!((g.frequency(1)[1] - 1.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(make_grid(4, 8, 1.0).is_err());
        assert!(make_grid(0, 8, 1.0).is_err());
        assert!(make_grid(1, 12, 1.0).is_err());
        assert!(make_grid(1, 4, 1.0).is_err());
        assert!(make_grid(1, 8, 0.0).is_err());
        assert!(make_grid(1, 8, -1.0).is_err());
    }

    #[test]
    fn reflection_is_an_involution_with_negated_coordinates() {
        let g = make_grid(3, 8, 2.0).unwrap();
        for flat in 0..g.len() {
            let r = g.reflect(flat);
            assert_eq!(g.reflect(r), flat);
            let (a, b) = (g.node(flat), g.node(r));
            for d in 0..3 {
                assert_eq!(a[d], -b[d]);
            }
        }
    }

    #[test]
    fn transform_round_trip() {
        let g = make_grid(2, 16, 3.0).unwrap();
        let u: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 113) as f64 - 50.0).collect();
        let back = g.inverse(&g.forward(&u));
        let err: f64 = u.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nrm: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err / nrm < 1e-13);
    }
}
