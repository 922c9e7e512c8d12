use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::SpectralGrid;
use crate::error::{Error, Result};

/// Real samples on a grid with lazily computed Fourier coefficients.
#[derive(Clone, Debug)]
pub struct Field {
    grid: SpectralGrid,
    values: Vec<f64>,
    coeffs: OnceLock<Arc<Vec<Complex64>>>,
}

impl Field {
    pub fn new(grid: &SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at node {bad}")));
        }
        Ok(Self::from_parts(grid, values))
    }

    pub(crate) fn from_parts(grid: &SpectralGrid, values: Vec<f64>) -> Self {
        Self {
            grid: grid.clone(),
            values,
            coeffs: OnceLock::new(),
        }
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()])
    }

    /// Samples `f` at every node; `f` receives an n-vector.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: &SpectralGrid, f: F) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.node(i)[..n])).collect();
        Self::from_parts(grid, values)
    }

    /// Real part of the field whose coefficients are `coeffs`.
    pub fn from_coeffs(grid: &SpectralGrid, coeffs: &[Complex64]) -> Self {
        Self::from_parts(grid, grid.inverse(coeffs))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Coefficients c_k = h DFT(u)_k, computed once.
    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs
            .get_or_init(|| Arc::new(self.grid.forward(&self.values)))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::from_parts(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// self + a * other.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(Self::from_parts(&self.grid, values))
    }

    /// L^2 inner product h sum u v.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.grid.cell_volume() * dot(&self.values, &other.values))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_volume() * dot(&self.values, &self.values)
    }

    /// dxi sum |c|^2, equal to `l2_norm_sq` by Parseval.
    pub fn spectral_l2_norm_sq(&self) -> f64 {
        self.grid.dxi() * self.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Band-limited evaluation at an arbitrary point by the Fourier series.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let x0 = g.axis_coord(0);
        let c = self.coeffs();
        let mut acc = 0.0;
        for (flat, ck) in c.iter().enumerate() {
            let xi = g.frequency(flat);
            let phase: f64 = (0..g.dim())
                .map(|d| 2.0 * std::f64::consts::PI * xi[d] * (x[d] - x0))
                .sum();
            acc += ck.re * phase.cos() - ck.im * phase.sin();
        }
        acc * g.dxi()
    }

    pub(crate) fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::IncompatibleGrid)
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn parseval_and_round_trip() {
        let g = make_grid(3, 8, 2.0).unwrap();
        let u = Field::from_fn(&g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() + 0.1 * x[2]);
        let a = u.l2_norm_sq();
        let b = u.spectral_l2_norm_sq();
        assert!(((a - b) / a).abs() < 1e-13);
        let back = Field::from_coeffs(&g, u.coeffs());
        let err = back.axpy(-1.0, &u).unwrap().l2_norm_sq().sqrt();
        assert!(err / a.sqrt() < 1e-13);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let u = Field::from_fn(&g, |x| (-x[0] * x[0]).exp());
        for j in [0, 5, 16, 31] {
            let x = g.node(j);
            assert!((u.interpolate(&x[..1]) - u.values()[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_length_and_nan() {
        let g = make_grid(1, 8, 1.0).unwrap();
        assert!(Field::new(&g, vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(Field::new(&g, v).is_err());
    }
}
