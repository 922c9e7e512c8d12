//! Fourier-multiplier operators, the conformal scaling group, translations
//! and discrete Schwarz rearrangement.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Field;

/// Minimum fraction of sum u^2 that a resampled field must keep.
pub const REPRESENTABLE_MASS: f64 = 0.9999;

/// Applies the multiplier m(|2 pi xi|) in coefficient space.
pub fn apply_multiplier<F: Fn(f64) -> f64>(u: &Field, m: F) -> Field {
    let g = u.grid();
    let out: Vec<Complex64> = u
        .coeffs()
        .iter()
        .zip(g.wavenumbers())
        .map(|(c, &k)| c * m(k))
        .collect();
    Field::from_coeffs(g, &out)
}

/// (-Delta)^p u with multiplier |2 pi xi|^{2p}; the zero mode is annihilated.
pub fn frac_laplacian(u: &Field, p: f64) -> Result<Field> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("power p = {p} must be positive")));
    }
    Ok(apply_multiplier(u, |k| if k == 0.0 { 0.0 } else { k.powf(2.0 * p) }))
}

/// Squared H^{alpha/2} seminorm, sum |2 pi xi|^alpha |c|^2 dxi.
pub fn seminorm_sq(u: &Field, alpha: f64) -> f64 {
    let g = u.grid();
    let acc: f64 = u
        .coeffs()
        .iter()
        .zip(g.wavenumbers())
        .filter(|(_, &k)| k > 0.0)
        .map(|(c, &k)| k.powf(alpha) * c.norm_sqr())
        .sum();
    acc * g.dxi()
}

/// Conformal rescaling T_r u(x) = r^{(n-alpha)/2} u(r x) by spectral interpolation.
///
/// Points r x that leave the box are set to zero. For r < 1 the mass of u
/// outside the sup-ball of radius rL would be lost, which is rejected.
pub fn rescale(u: &Field, r: f64, alpha: f64) -> Result<Field> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale r = {r} must be positive")));
    }
    if r == 1.0 {
        return Ok(u.clone());
    }
    let g = u.grid();
    let n = g.dim();
    let npts = g.points_per_axis();
    let l = g.half_length();
    if r < 1.0 {
        let total: f64 = u.values().iter().map(|v| v * v).sum();
        let kept: f64 = u
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| g.sup_radius(*i) <= r * l)
            .map(|(_, v)| v * v)
            .sum();
        if total > 0.0 && kept < REPRESENTABLE_MASS * total {
            return Err(Error::SupportOverflow { representable: kept / total });
        }
    }
    // Per-axis evaluation matrix E[j, m] = exp(2 pi i xi_m (r x_j - x_0)) / (2L).
    let x0 = g.axis_coord(0);
    let mut mat = vec![Complex64::new(0.0, 0.0); npts * npts];
    let mut inside = vec![true; npts];
    for j in 0..npts {
        let y = r * g.axis_coord(j);
        inside[j] = y.abs() <= l;
        for m in 0..npts {
            let k = if m < npts / 2 { m as f64 } else { m as f64 - npts as f64 };
            let phase = 2.0 * PI * k / (2.0 * l) * (y - x0);
            mat[j * npts + m] = Complex64::from_polar(1.0 / (2.0 * l), phase);
        }
    }
    let mut data = u.coeffs().to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); npts];
    for axis in 0..n {
        let stride = npts.pow((n - 1 - axis) as u32);
        let outer = data.len() / (npts * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * npts * stride + inner;
                for (j, out) in line.iter_mut().enumerate() {
                    let row = &mat[j * npts..(j + 1) * npts];
                    *out = row
                        .iter()
                        .enumerate()
                        .map(|(m, e)| e * data[base + m * stride])
                        .sum();
                }
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
    let factor = r.powf(0.5 * (n as f64 - alpha));
    let values = data
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let idx = g.multi_index(flat);
            if idx[..n].iter().all(|&j| inside[j]) {
                factor * v.re
            } else {
                0.0
            }
        })
        .collect();
    Field::new(g, values)
}

fn phase_shift(u: &Field, shift: &[f64]) -> Result<Field> {
    let g = u.grid();
    if shift.len() != g.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has {} components, grid dimension is {}",
            shift.len(),
            g.dim()
        )));
    }
    let out: Vec<Complex64> = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let xi = g.frequency(flat);
            let phase: f64 = (0..g.dim()).map(|d| -2.0 * PI * xi[d] * shift[d]).sum();
            c * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(Field::from_coeffs(g, &out))
}

/// Fraction of sum u^2 whose shifted position x + shift stays inside the box.
pub fn translation_retained_mass(u: &Field, shift: &[f64]) -> f64 {
    let g = u.grid();
    let l = g.half_length();
    let total: f64 = u.values().iter().map(|v| v * v).sum();
    if total == 0.0 {
        return 1.0;
    }
    let kept: f64 = u
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let x = g.node(*i);
            (0..g.dim()).all(|d| {
                let y = x[d] + shift[d];
                (-l..l).contains(&y)
            })
        })
        .map(|(_, v)| v * v)
        .sum();
    kept / total
}

/// u(x - shift) with whole-space semantics: mass may not wrap around the torus.
pub fn translate(u: &Field, shift: &[f64]) -> Result<Field> {
    let out = phase_shift(u, shift)?;
    let kept = translation_retained_mass(u, shift);
    if kept < REPRESENTABLE_MASS {
        return Err(Error::SupportOverflow { representable: kept });
    }
    Ok(out)
}

/// Exact cyclic shift by whole cells: result(x) = u(x - steps * dx).
pub fn shift_cells(u: &Field, steps: &[i64]) -> Result<Field> {
    let g = u.grid();
    let n = g.dim();
    if steps.len() != n {
        return Err(Error::InvalidArgument(format!(
            "shift has {} components, grid dimension is {n}",
            steps.len()
        )));
    }
    let npts = g.points_per_axis() as i64;
    let mut out = vec![0.0; g.len()];
    for (flat, v) in u.values().iter().enumerate() {
        let mut idx = g.multi_index(flat);
        for d in 0..n {
            idx[d] = (idx[d] as i64 + steps[d]).rem_euclid(npts) as usize;
        }
        out[g.flat_index(&idx)] = *v;
    }
    Ok(Field::from_parts(g, out))
}

/// u(x - shift) on the torus; no support check.
pub fn translate_periodic(u: &Field, shift: &[f64]) -> Result<Field> {
    phase_shift(u, shift)
}

/// Radially non-increasing rearrangement of |u| on the same nodes.
///
/// Nodes are ordered by radius with ties broken by flat (lexicographic)
/// index; sorted |values| are assigned in decreasing order along it.
pub fn schwarz_rearrange(u: &Field) -> Field {
    let g = u.grid();
    let radii = g.radii();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]).then(a.cmp(&b)));
    let mut mags: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0; g.len()];
    for (node, v) in order.into_iter().zip(mags) {
        out[node] = v;
    }
    Field::from_parts(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn cosine_mode_eigenvalue() {
        let g = make_grid(1, 64, 1.0).unwrap();
        let u = Field::from_fn(&g, |x| (2.0 * PI * x[0] / 2.0).cos());
        let v = frac_laplacian(&u, 0.5).unwrap();
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((b - PI * a).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let u = Field::from_fn(&g, |_| 3.5);
        assert!(seminorm_sq(&u, 1.3).abs() < 1e-20);
        assert!(frac_laplacian(&u, 0.7).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rescale_identity_and_overflow() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let u = Field::from_fn(&g, |x| (-(x[0] * x[0])).exp());
        let same = rescale(&u, 1.0, 0.5).unwrap();
        assert_eq!(same.values(), u.values());
        let edge = Field::from_fn(&g, |x| (-(x[0] - 8.0).powi(2)).exp());
        assert!(matches!(rescale(&edge, 0.25, 0.5), Err(Error::SupportOverflow { .. })));
    }

    #[test]
    fn rescale_matches_analytic_gaussian() {
        let g = make_grid(1, 256, 12.0).unwrap();
        let alpha = 0.5;
        let u = Field::from_fn(&g, |x| (-(x[0] * x[0])).exp());
        for r in [0.7, 1.6] {
            let v = rescale(&u, r, alpha).unwrap();
            let f = r.powf(0.5 * (1.0 - alpha));
            for (i, val) in v.values().iter().enumerate() {
                let x = g.node(i)[0];
                let exact = if (r * x).abs() <= 12.0 { f * (-(r * x).powi(2)).exp() } else { 0.0 };
                assert!((val - exact).abs() < 1e-12, "r={r} x={x}");
            }
        }
    }

    #[test]
    fn translation_round_trip_and_overflow() {
        let g = make_grid(2, 32, 8.0).unwrap();
        let u = Field::from_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let s = [0.37, -1.1];
        let v = translate(&translate(&u, &s).unwrap(), &[-0.37, 1.1]).unwrap();
        let err = v.axpy(-1.0, &u).unwrap().l2_norm_sq().sqrt();
        assert!(err / u.l2_norm_sq().sqrt() < 1e-12);
        assert!(translate(&u, &[7.5, 0.0]).is_err());
        assert!(translate_periodic(&u, &[7.5, 0.0]).is_ok());
    }

    #[test]
    fn cell_shift_agrees_with_spectral_shift() {
        let g = make_grid(2, 32, 4.0).unwrap();
        let u = Field::from_fn(&g, |x| (-(x[0] * x[0] + 0.5 * x[1] * x[1])).exp());
        let a = shift_cells(&u, &[3, -5]).unwrap();
        let b = translate_periodic(&u, &[3.0 * g.dx(), -5.0 * g.dx()]).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rearrangement_of_off_center_indicator() {
        let g = make_grid(2, 16, 4.0).unwrap();
        let u = Field::from_fn(&g, |x| {
            if (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2) < 1.0 { 1.0 } else { 0.0 }
        });
        let v = schwarz_rearrange(&u);
        let sum_u: f64 = u.values().iter().sum();
        let sum_v: f64 = v.values().iter().sum();
        assert_eq!(sum_u, sum_v);
        let ones = sum_u as usize;
        let mut by_radius: Vec<(f64, f64)> =
            g.radii().iter().cloned().zip(v.values().iter().cloned()).collect();
        by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(by_radius[..ones].iter().all(|p| p.1 == 1.0));
        assert!(by_radius[ones..].iter().all(|p| p.1 == 0.0));
    }
}
