//! Caffarelli-Silvestre extension, mode by mode.
//!
//! Each Fourier coefficient is lifted along y with the profile
//! phi(|2 pi xi| y), where phi solves phi'' + ((1-alpha)/t) phi' = phi with
//! phi(0) = 1 and decays at infinity.
//!
//! The vertical discretization uses the variable z = y^alpha, in which the
//! weighted energy reads
//!
//! ```text
//! int y^{1-alpha} (w_y^2 + k^2 w^2) dy
//!     = int alpha w_z^2 dz + k^2 int (1/alpha) z^{2/alpha - 2} w^2 dz.
//! ```
//!
//! Samples on the graded y-mesh are read as a continuous piecewise quadratic
//! function of z over consecutive node pairs, so every `ExtensionField` is
//! an admissible competitor for the trace inequality.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fracops::seminorm_sq;
use crate::functionals::k_alpha;
use crate::grid::{Field, SpectralGrid};
use crate::quadrature::gauss_legendre;
use crate::special::{extension_profile, extension_profile_deficit};

/// Geometric grading ratio of the y-mesh.
pub const GRADING_RATIO: f64 = 1.05;

/// Below this value of min|2 pi xi| * Y the slowest mode has not decayed.
pub const SHORT_STRIP_THRESHOLD: f64 = 5.0;

/// Samples of the extension on the strip (0, Y], stored per Fourier mode.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    grid: SpectralGrid,
    alpha: f64,
    y: Vec<f64>,
    /// Row-major `[mode][level]`, levels 0..=M. Level 0 holds the trace
    /// coefficient, level i > 0 the deviation w(y_i) - w(0), so that thin
    /// elements near y = 0 keep their slope information.
    coeffs: Vec<Complex64>,
    short_strip: bool,
}

/// Graded mesh y_i = Y (r^i - 1)/(r^M - 1), i = 0..=M.
pub fn graded_mesh(height: f64, m: usize) -> Vec<f64> {
    let denom = GRADING_RATIO.powi(m as i32) - 1.0;
    (0..=m)
        .map(|i| height * (GRADING_RATIO.powi(i as i32) - 1.0) / denom)
        .collect()
}

/// Strip height with min|2 pi xi| Y = 8, enough for every nonzero mode to decay.
pub fn recommended_height(grid: &SpectralGrid) -> f64 {
    8.0 * 2.0 * grid.half_length() / (2.0 * std::f64::consts::PI)
}

fn validate(height: f64, m: usize) -> Result<()> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::InvalidArgument(format!("strip height Y = {height} must be positive")));
    }
    if m < 16 || m % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "y-point count M = {m} must be even and at least 16"
        )));
    }
    Ok(())
}

/// alpha-harmonic extension of u to the strip (0, Y] with M graded y-points.
pub fn extend(u: &Field, alpha: f64, height: f64, m: usize) -> Result<ExtensionField> {
    let mut w = ExtensionField::zeros(u.grid(), alpha, height, m)?;
    let levels = m + 1;
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    for (mode, (c, &k)) in u.coeffs().iter().zip(u.grid().wavenumbers()).enumerate() {
        let deficit = cache.entry(k.to_bits()).or_insert_with(|| {
            w.y.iter().map(|&y| extension_profile_deficit(alpha, k * y)).collect()
        });
        let row = &mut w.coeffs[mode * levels..(mode + 1) * levels];
        row[0] = *c;
        for (dst, d) in row.iter_mut().zip(deficit.iter()).skip(1) {
            *dst = -c * *d;
        }
    }
    Ok(w)
}

impl ExtensionField {
    pub fn zeros(grid: &SpectralGrid, alpha: f64, height: f64, m: usize) -> Result<Self> {
        validate(height, m)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in (0, 2)")));
        }
        let kmin = grid
            .wavenumbers()
            .iter()
            .cloned()
            .filter(|&k| k > 0.0)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            grid: grid.clone(),
            alpha,
            y: graded_mesh(height, m),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len() * (m + 1)],
            short_strip: kmin * height < SHORT_STRIP_THRESHOLD,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y
    }

    pub fn height(&self) -> f64 {
        *self.y.last().expect("mesh is non-empty")
    }

    pub fn k_alpha(&self) -> f64 {
        k_alpha(self.alpha)
    }

    /// Set when the slowest nonzero mode has not decayed across the strip.
    pub fn short_strip(&self) -> bool {
        self.short_strip
    }

    fn levels(&self) -> usize {
        self.y.len()
    }

    /// Coefficient of slot `mode` at every y-level.
    pub fn mode_profile(&self, mode: usize) -> Vec<Complex64> {
        let l = self.levels();
        let row = &self.coeffs[mode * l..(mode + 1) * l];
        row.iter()
            .enumerate()
            .map(|(i, d)| if i == 0 { *d } else { row[0] + d })
            .collect()
    }

    /// Physical slice w(., y_level).
    pub fn slice(&self, level: usize) -> Field {
        let l = self.levels();
        let c: Vec<Complex64> = (0..self.grid.len())
            .map(|m| {
                let base = self.coeffs[m * l];
                if level == 0 { base } else { base + self.coeffs[m * l + level] }
            })
            .collect();
        Field::from_coeffs(&self.grid, &c)
    }

    /// Boundary values w(., 0).
    pub fn trace(&self) -> Field {
        self.slice(0)
    }

    /// Trace recovered by linear extrapolation in z = y^alpha from the two
    /// smallest positive y-nodes.
    pub fn extrapolated_trace(&self) -> Field {
        let (z1, z2) = (self.y[1].powf(self.alpha), self.y[2].powf(self.alpha));
        let (w1, w2) = (self.slice(1), self.slice(2));
        let t = z1 / (z2 - z1);
        w1.axpy(-t, &w2.axpy(-1.0, &w1).expect("same grid"))
            .expect("same grid")
    }

    /// Adds f(x, y) sampled at every node and y-level.
    pub fn add_fn<F: Fn(&[f64], f64) -> f64>(&mut self, f: F) {
        let l = self.levels();
        let base = Field::from_fn(&self.grid, |x| f(x, 0.0));
        for (level, &y) in self.y.clone().iter().enumerate() {
            let slab = Field::from_fn(&self.grid, |x| f(x, y));
            for (mode, c) in slab.coeffs().iter().enumerate() {
                let shift = if level == 0 { 0.0.into() } else { base.coeffs()[mode] };
                self.coeffs[mode * l + level] += c - shift;
            }
        }
    }

    /// k_alpha times the weighted Dirichlet energy of the strip function.
    pub fn energy(&self) -> f64 {
        let elems = ElementForms::new(&self.y, self.alpha);
        let l = self.levels();
        let total: f64 = self
            .grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(mode, &k)| elems.mode_energy(&self.coeffs[mode * l..(mode + 1) * l], k))
            .sum();
        self.k_alpha() * self.grid.dxi() * total
    }

    /// CSV rows (xi magnitude, y, phi) for each distinct nonzero |xi| on the grid.
    pub fn write_profiles_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut mags: Vec<f64> = self.grid.wavenumbers().to_vec();
        mags.sort_by(f64::total_cmp);
        mags.dedup();
        writeln!(out, "xi_magnitude,y,phi")?;
        let two_pi = 2.0 * std::f64::consts::PI;
        for k in mags {
            for &y in &self.y {
                writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e}",
                    k / two_pi,
                    y,
                    extension_profile(self.alpha, k * y)
                )?;
            }
        }
        Ok(())
    }
}

/// Extension energy; see [`ExtensionField::energy`].
pub fn extension_energy(w: &ExtensionField) -> f64 {
    w.energy()
}

/// extension_energy(w) - seminorm_sq(trace(w)); non-negative by the trace inequality.
pub fn trace_defect(w: &ExtensionField, u: &Field) -> Result<f64> {
    if u.grid() != w.grid() {
        return Err(Error::IncompatibleGrid);
    }
    Ok(w.energy() - seminorm_sq(&w.trace(), w.alpha))
}

/// Element matrices of the piecewise-quadratic-in-z discretization.
struct ElementForms {
    alpha: f64,
    /// Per element: stiffness for int w_z^2 dz and mass for int z^beta w^2 dz.
    stiff: Vec<[[f64; 3]; 3]>,
    mass: Vec<[[f64; 3]; 3]>,
}

impl ElementForms {
    fn new(y: &[f64], alpha: f64) -> Self {
        let z: Vec<f64> = y.iter().map(|v| v.powf(alpha)).collect();
        let beta = 2.0 / alpha - 2.0;
        let (gx, gw) = gauss_legendre(12);
        let mut stiff = Vec::new();
        let mut mass = Vec::new();
        for e in (0..z.len() - 1).step_by(2) {
            let nodes = [z[e], z[e + 1], z[e + 2]];
            let basis = lagrange_monomials(&nodes);
            let mut k = [[0.0; 3]; 3];
            let mut m = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let di = derivative(&basis[i]);
                    let dj = derivative(&basis[j]);
                    let prod = poly_mul(&di, &dj);
                    k[i][j] = poly_integral(&prod, nodes[0], nodes[2]);
                    if nodes[0] == 0.0 {
                        // exact moments int_0^c z^{beta + p} dz
                        let prod = poly_mul(&basis[i], &basis[j]);
                        m[i][j] = prod
                            .iter()
                            .enumerate()
                            .map(|(p, a)| {
                                let e = beta + p as f64 + 1.0;
                                a * nodes[2].powf(e) / e
                            })
                            .sum();
                    } else {
                        let (a, b) = (nodes[0], nodes[2]);
                        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                        m[i][j] = gx
                            .iter()
                            .zip(&gw)
                            .map(|(x, w)| {
                                let t = mid + half * x;
                                w * t.powf(beta) * poly_eval(&basis[i], t) * poly_eval(&basis[j], t)
                            })
                            .sum::<f64>()
                            * half;
                    }
                }
            }
            stiff.push(k);
            mass.push(m);
        }
        Self { alpha, stiff, mass }
    }

    /// Energy of one mode stored as (trace, deviations).
    fn mode_energy(&self, row: &[Complex64], k: f64) -> f64 {
        let k2 = k * k;
        let base = row[0];
        let dev = |i: usize| if i == 0 { Complex64::new(0.0, 0.0) } else { row[i] };
        let mut acc = 0.0;
        for (e, (ks, ms)) in self.stiff.iter().zip(&self.mass).enumerate() {
            let d = [dev(2 * e), dev(2 * e + 1), dev(2 * e + 2)];
            let w = [base + d[0], base + d[1], base + d[2]];
            for i in 0..3 {
                for j in 0..3 {
                    // stiffness annihilates constants, so deviations suffice
                    acc += self.alpha * ks[i][j] * (d[i] * d[j].conj()).re;
                    acc += k2 / self.alpha * ms[i][j] * (w[i] * w[j].conj()).re;
                }
            }
        }
        acc
    }
}

/// Monomial coefficients (ascending) of the three quadratic Lagrange polynomials.
fn lagrange_monomials(z: &[f64; 3]) -> [Vec<f64>; 3] {
    let mut out: [Vec<f64>; 3] = Default::default();
    for i in 0..3 {
        let (a, b) = match i {
            0 => (z[1], z[2]),
            1 => (z[0], z[2]),
            _ => (z[0], z[1]),
        };
        let d = (z[i] - a) * (z[i] - b);
        out[i] = vec![a * b / d, -(a + b) / d, 1.0 / d];
    }
    out
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_integral(p: &[f64], a: f64, b: f64) -> f64 {
    // Gauss-Legendre with 3 points is exact up to degree 5 and avoids the
    // cancellation of monomial antiderivatives on short, distant elements.
    let (gx, gw) = gauss_legendre(3);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    gx.iter()
        .zip(&gw)
        .map(|(x, w)| w * poly_eval(p, mid + half * x))
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn mesh_is_graded_and_anchored() {
        let y = graded_mesh(10.0, 64);
        assert_eq!(y[0], 0.0);
        assert!((y[64] - 10.0).abs() < 1e-12);
        for i in 1..63 {
            let ratio = (y[i + 1] - y[i]) / (y[i] - y[i - 1]);
            assert!((ratio - GRADING_RATIO).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_strip() {
        let g = make_grid(1, 16, 1.0).unwrap();
        let u = Field::zeros(&g);
        assert!(extend(&u, 0.5, 0.0, 32).is_err());
        assert!(extend(&u, 0.5, 1.0, 15).is_err());
        assert!(extend(&u, 0.5, 1.0, 17).is_err());
        assert!(extend(&u, 0.5, 1.0, 16).is_ok());
    }

    #[test]
    fn zero_in_zero_out() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let w = extend(&Field::zeros(&g), 1.0, 10.0, 32).unwrap();
        assert_eq!(w.energy(), 0.0);
        assert_eq!(trace_defect(&w, &Field::zeros(&g)).unwrap(), 0.0);
    }

    #[test]
    fn short_strip_is_flagged() {
        let g = make_grid(1, 32, 10.0).unwrap();
        let u = Field::zeros(&g);
        assert!(extend(&u, 1.0, 1.0, 32).unwrap().short_strip());
        assert!(!extend(&u, 1.0, recommended_height(&g), 32).unwrap().short_strip());
    }

    #[test]
    fn single_mode_isometry() {
        let g = make_grid(1, 64, 3.0).unwrap();
        for alpha in [0.4, 1.0, 1.7] {
            let u = Field::from_fn(&g, |x| (2.0 * std::f64::consts::PI * 3.0 * x[0] / 6.0).cos());
            let w = extend(&u, alpha, recommended_height(&g), 256).unwrap();
            let s = seminorm_sq(&u, alpha);
            assert!(((w.energy() - s) / s).abs() < 1e-6, "alpha={alpha} {} {s}", w.energy());
        }
    }
}
