//! Quotient of a bubble translated away from the Hardy singularity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{shift_cells, translate_periodic, REPRESENTABLE_MASS};
use crate::functionals::Problem;
use crate::grid::{Field, ProblemParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub delta: f64,
    pub quotient: f64,
    /// Fraction of the Sobolev mass that stays in the box under the shift.
    pub retained: f64,
}

/// Fraction of sum |u|^p over nodes whose image x + shift lies in the box.
pub fn retained_power_mass(u: &Field, shift: &[f64], p: f64) -> f64 {
    let g = u.grid();
    let l = g.half_length();
    let (mut kept, mut total) = (0.0, 0.0);
    for (i, v) in u.values().iter().enumerate() {
        let d = v.abs().powf(p);
        total += d;
        let x = g.node(i);
        if (0..g.dim()).all(|k| (-l..l).contains(&(x[k] + shift[k]))) {
            kept += d;
        }
    }
    if total > 0.0 { kept / total } else { 1.0 }
}

/// I_delta = Q(u(. - delta e_1)) for each delta.
///
/// Whole-cell shifts are exact permutations; others go through the phase
/// shift. A shift is representable when 99.99% of sum |u|^{2*} stays in the
/// box; the bubble need not be square integrable, so the Sobolev density is
/// the mass that counts.
pub fn translate_scan(bubble: &Field, params: &ProblemParams, deltas: &[f64]) -> Result<Vec<ScanRow>> {
    if params.s != 0.0 {
        return Err(Error::InvalidParams {
            hypothesis: "s = 0",
            detail: format!("translate_scan needs s = 0, got s = {}", params.s),
        });
    }
    let problem = Problem::new(bubble.grid(), params)?;
    let g = bubble.grid();
    let p = problem.exponents().two_star;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("shift {delta} is not finite")));
        }
        let mut shift = vec![0.0; g.dim()];
        shift[0] = delta;
        let retained = retained_power_mass(bubble, &shift, p);
        if retained < REPRESENTABLE_MASS {
            return Err(Error::SupportOverflow { representable: retained });
        }
        let cells = delta / g.dx();
        let moved = if (cells - cells.round()).abs() < 1e-9 {
            let mut steps = vec![0i64; g.dim()];
            steps[0] = cells.round() as i64;
            shift_cells(bubble, &steps)?
        } else {
            translate_periodic(bubble, &shift)?
        };
        rows.push(ScanRow {
            delta,
            quotient: problem.quotient(&moved)?.quotient,
            retained,
        });
    }
    Ok(rows)
}

/// Shifts 0, step, 2 step, ... while the bubble stays representable.
pub fn representable_shifts(bubble: &Field, params: &ProblemParams, step: f64) -> Vec<f64> {
    let g = bubble.grid();
    let p = params.exponents().two_star;
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let delta = k as f64 * step;
        let mut shift = vec![0.0; g.dim()];
        shift[0] = delta;
        if delta > 2.0 * g.half_length() || retained_power_mass(bubble, &shift, p) < REPRESENTABLE_MASS {
            break;
        }
        out.push(delta);
        k += 1;
    }
    out
}

/// Smallest index from which the sequence is non-increasing (or
/// non-decreasing when `increasing`).
pub fn monotone_from(values: &[f64], increasing: bool) -> usize {
    let mut start = values.len().saturating_sub(1);
    while start > 0 {
        let (a, b) = (values[start - 1], values[start]);
        let ok = if increasing { b >= a } else { b <= a };
        if !ok {
            break;
        }
        start -= 1;
    }
    start
}
