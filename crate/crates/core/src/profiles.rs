//! Named, reproducible initial fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, SpectralGrid};

/// Bubble r^{(n-alpha)/2} (1 + |r (x - center)|^2)^{-(n-alpha)/2}.
pub fn bubble(grid: &SpectralGrid, alpha: f64, r: f64, center: Option<&[f64]>) -> Field {
    let n = grid.dim();
    let e = 0.5 * (n as f64 - alpha);
    let c = center.map(|c| c.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (r * (a - b)).powi(2)).sum();
        r.powf(e) * (1.0 + r2).powf(-e)
    })
}

/// exp(-|x|^2 / width^2).
pub fn gaussian(grid: &SpectralGrid, width: f64) -> Field {
    Field::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / (width * width)).exp())
}

/// Seeded band-limited noise on 1 <= |k|_inf <= kmax, zero mean, unit max,
/// optionally multiplied by exp(-|x|^2 / (2 envelope^2)).
pub fn random_smooth(
    grid: &SpectralGrid,
    seed: u64,
    kmax: usize,
    envelope: Option<f64>,
) -> Result<Field> {
    if kmax == 0 || kmax >= grid.points_per_axis() / 2 {
        return Err(Error::InvalidArgument(format!(
            "band limit kmax = {kmax} must lie in [1, N/2)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let km = kmax as i64;
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            let k = grid.wave_index(flat);
            let sup = k[..grid.dim()].iter().map(|v| v.abs()).max().unwrap_or(0);
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if sup >= 1 && sup <= km {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let raw = Field::from_coeffs(grid, &coeffs);
    let shaped = match envelope {
        Some(s) => {
            let n = grid.dim();
            let vals = raw
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = grid.node(i);
                    let r2: f64 = x[..n].iter().map(|c| c * c).sum();
                    v * (-r2 / (2.0 * s * s)).exp()
                })
                .collect();
            Field::new(grid, vals)?
        }
        None => raw,
    };
    let m = shaped.max_abs();
    if m == 0.0 {
        return Err(Error::DegenerateInit("random field vanished".into()));
    }
    Ok(shaped.scaled(1.0 / m))
}

/// Profile selector shared by the command line and reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Bubble,
    Gaussian,
    RandomSmooth,
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bubble" => Ok(Self::Bubble),
            "gaussian" => Ok(Self::Gaussian),
            "random-smooth" => Ok(Self::RandomSmooth),
            other => Err(Error::InvalidArgument(format!(
                "unknown profile `{other}` (expected bubble, gaussian or random-smooth)"
            ))),
        }
    }
}

/// Builds a named profile with default shape parameters.
pub fn named(kind: ProfileKind, grid: &SpectralGrid, alpha: f64, seed: u64) -> Result<Field> {
    match kind {
        ProfileKind::Bubble => Ok(bubble(grid, alpha, 1.0, None)),
        ProfileKind::Gaussian => Ok(gaussian(grid, 1.0)),
        ProfileKind::RandomSmooth => {
            let kmax = (grid.points_per_axis() / 16).clamp(1, 16);
            random_smooth(grid, seed, kmax, Some(0.25 * grid.half_length()))
        }
    }
}
