//! Local concentration of the energy densities around the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::apply_multiplier;
use crate::functionals::Problem;
use crate::grid::{Field, ProblemParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub delta: f64,
    /// Sobolev mass in the ball B_delta.
    pub theta: f64,
    /// Hardy-Sobolev mass in B_delta.
    pub zeta: f64,
    /// Twisted energy density in B_delta.
    pub mu: f64,
    /// (r, Q(r)) with Q(r) the Hardy-Sobolev mass in B_r.
    pub levy: Vec<(f64, f64)>,
    /// Radius enclosing half the Hardy-Sobolev mass, if there is any mass.
    pub median_radius: Option<f64>,
}

/// theta, zeta, mu on B_delta and the Levy table over `radii` (sorted on output).
pub fn concentration(
    u: &Field,
    params: &ProblemParams,
    delta: f64,
    radii: &[f64],
) -> Result<ConcentrationReport> {
    let g = u.grid();
    if !(delta > 0.0 && delta <= g.half_length()) {
        return Err(Error::InvalidArgument(format!(
            "ball radius {delta} must lie in (0, L = {}]",
            g.half_length()
        )));
    }
    let problem = Problem::new(g, params)?;
    let exps = problem.exponents();
    let alpha = params.alpha;
    let h = g.cell_volume();
    let half = apply_multiplier(u, |k| if k == 0.0 { 0.0 } else { k.powf(0.5 * alpha) });
    let wh = problem.hardy_weights().weights();
    let ws = problem.hs_weights().weights();

    let hs_density: Vec<f64> = u
        .values()
        .iter()
        .zip(ws)
        .map(|(v, w)| h * w * v.abs().powf(exps.two_star_s))
        .collect();
    let (mut theta, mut zeta, mut mu) = (0.0, 0.0, 0.0);
    for (i, &r) in g.radii().iter().enumerate() {
        if r < delta {
            let v = u.values()[i];
            theta += h * v.abs().powf(exps.two_star);
            zeta += hs_density[i];
            mu += h * (half.values()[i].powi(2) - params.gamma * wh[i] * v * v);
        }
    }

    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| g.radii()[a].total_cmp(&g.radii()[b]).then(a.cmp(&b)));
    let mut cum = Vec::with_capacity(order.len());
    let mut acc = 0.0;
    for &i in &order {
        acc += hs_density[i];
        cum.push((g.radii()[i], acc));
    }
    let total = acc;

    let mut sorted = radii.to_vec();
    sorted.retain(|r| r.is_finite());
    sorted.sort_by(f64::total_cmp);
    let levy = sorted
        .iter()
        .map(|&r| {
            let k = cum.partition_point(|&(rad, _)| rad < r);
            (r, if k == 0 { 0.0 } else { cum[k - 1].1 })
        })
        .collect();

    let median_radius = if total > 0.0 {
        let k = cum.partition_point(|&(_, m)| m < 0.5 * total);
        Some(cum[k.min(cum.len() - 1)].0)
    } else {
        None
    };

    Ok(ConcentrationReport {
        delta,
        theta,
        zeta,
        mu,
        levy,
        median_radius,
    })
}
