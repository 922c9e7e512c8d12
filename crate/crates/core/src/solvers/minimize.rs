//! Projected Sobolev-gradient descent on the Rayleigh quotient.

use serde::{Deserialize, Serialize};

use super::gauge::{Gauge, GaugeProjector};
use crate::error::{Error, Result};
use crate::fracops::{schwarz_rearrange, shift_cells};
use crate::functionals::{Problem, QuotientReport};
use crate::grid::{Field, ProblemParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizerConfig {
    pub step: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Rearrangement cadence in iterations; 0 disables. Only used for gamma >= 0.
    pub symmetrize_every: usize,
    pub renormalize: bool,
    /// Rearrange the final iterate (gamma >= 0 only).
    pub final_symmetrize: bool,
    /// Cadence of the whole-cell translation search; 0 disables.
    pub translate_every: usize,
    pub gauge: Gauge,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            step: 0.2,
            max_iters: 2000,
            tol: 1e-10,
            symmetrize_every: 10,
            renormalize: true,
            final_symmetrize: true,
            translate_every: 5,
            gauge: Gauge::default(),
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.tol > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument(format!(
                "minimizer needs step > 0, tol > 0, max_iters >= 1 (got {}, {}, {})",
                self.step, self.tol, self.max_iters
            )));
        }
        if let Gauge::Shell { inner } = self.gauge {
            if !(inner > 0.0 && inner < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "shell gauge inner fraction {inner} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizerStatus {
    Converged,
    MaxIters,
    /// Mass escapes toward the box boundary; no minimizer is being approached.
    Drift,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iter: usize,
    pub quotient: f64,
    pub residual: f64,
    pub boundary_mass: f64,
}

#[derive(Clone, Debug)]
pub struct MinimizeOutput {
    /// Signed so that the largest |u| is attained by a positive value.
    pub field: Field,
    pub report: QuotientReport,
    pub history: Vec<HistoryEntry>,
    pub status: MinimizerStatus,
    pub boundary_mass: f64,
}

/// Fraction of the Hardy-Sobolev mass in |x|_inf > L/2.
pub fn boundary_mass_fraction(problem: &Problem, u: &Field) -> f64 {
    let g = problem.grid();
    let q = problem.exponents().two_star_s;
    let w = problem.hs_weights().weights();
    let half = 0.5 * g.half_length();
    let (mut outer, mut total) = (0.0, 0.0);
    for (i, v) in u.values().iter().enumerate() {
        let d = w[i] * v.abs().powf(q);
        total += d;
        if g.sup_radius(i) > half {
            outer += d;
        }
    }
    if total > 0.0 { outer / total } else { 0.0 }
}

fn normalize(problem: &Problem, u: &Field) -> Field {
    let hs = problem.hs_term(u);
    u.scaled(hs.powf(-1.0 / problem.exponents().two_star_s))
}

/// Best whole-cell translation of `u`: probe one cell along each axis, then
/// double the step along the improving lattice direction.
fn translation_search(
    problem: &Problem,
    gauge: &GaugeProjector,
    u: &Field,
    current: f64,
    renormalize: bool,
) -> Option<(Field, QuotientReport)> {
    let g = problem.grid();
    let n = g.dim();
    let eval = |steps: &[i64]| -> Option<(Field, QuotientReport)> {
        let v = gauge.enforce(&shift_cells(u, steps).ok()?);
        let v = if renormalize { normalize(problem, &v) } else { v };
        let r = problem.quotient(&v).ok()?;
        Some((v, r))
    };
    let mut dir = vec![0i64; n];
    for d in 0..n {
        let mut best = current;
        for sign in [1i64, -1] {
            let mut steps = vec![0i64; n];
            steps[d] = sign;
            if let Some((_, r)) = eval(&steps) {
                if r.quotient < best {
                    best = r.quotient;
                    dir[d] = sign;
                }
            }
        }
    }
    if dir.iter().all(|&s| s == 0) {
        return None;
    }
    let max_len = (g.points_per_axis() / 2) as i64;
    let mut best: Option<(Field, QuotientReport)> = None;
    let mut len = 1i64;
    while len <= max_len {
        let steps: Vec<i64> = dir.iter().map(|s| s * len).collect();
        match eval(&steps) {
            Some((v, r)) if r.quotient < best.as_ref().map_or(current, |b| b.1.quotient) => {
                best = Some((v, r));
            }
            _ => break,
        }
        len *= 2;
    }
    best
}

/// Minimizes the Rayleigh quotient from `init`.
///
/// Returns the best iterate even when the iteration budget runs out. In the
/// regime s = 0, gamma < 0 the status is never `Converged`.
pub fn minimize_quotient(
    init: &Field,
    params: &ProblemParams,
    cfg: &MinimizerConfig,
) -> Result<MinimizeOutput> {
    cfg.validate()?;
    let problem = Problem::new(init.grid(), params)?;
    let gauge = GaugeProjector::new(&problem, cfg.gauge);
    let no_minimizer = params.s == 0.0 && params.gamma < 0.0;
    let symmetrize = params.gamma >= 0.0;

    let mut u = gauge.enforce(init);
    if problem.hs_term(&u) <= 1e-300 || problem.twisted_norm_sq(&u) <= 0.0 {
        return Err(Error::DegenerateInit(
            "initial field has no Hardy-Sobolev mass or no norm after gauge fixing".into(),
        ));
    }
    if cfg.renormalize {
        u = normalize(&problem, &u);
    }
    let mut rep = problem.quotient(&u)?;
    let mut history = vec![HistoryEntry {
        iter: 0,
        quotient: rep.quotient,
        residual: f64::NAN,
        boundary_mass: boundary_mass_fraction(&problem, &u),
    }];
    let mut tau = cfg.step;
    let mut quiet = 0;
    let mut converged = false;

    for iter in 1..=cfg.max_iters {
        let (_, d) = problem.quotient_derivative(&u)?;
        let g = gauge.project(&problem.precondition(&d));
        let slope = d.dot(&g)?;
        let scale = problem.metric_norm_sq(&u).sqrt();
        let residual = slope.max(0.0).sqrt() / scale;
        if !(slope > 0.0) {
            converged = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..40 {
            let trial = u.axpy(-tau, &g)?;
            let trial = if cfg.renormalize { normalize(&problem, &trial) } else { trial };
            if let Ok(r) = problem.quotient(&trial) {
                if r.quotient <= rep.quotient - 1e-4 * tau * slope {
                    accepted = Some((trial, r));
                    break;
                }
            }
            tau *= 0.5;
        }
        let Some((mut next, mut next_rep)) = accepted else {
            converged = true;
            break;
        };
        tau = (tau * 1.5).min(1e3 * cfg.step);
        if symmetrize && cfg.symmetrize_every > 0 && iter % cfg.symmetrize_every == 0 {
            let sym = gauge.enforce(&schwarz_rearrange(&next));
            let sym = if cfg.renormalize { normalize(&problem, &sym) } else { sym };
            if let Ok(r) = problem.quotient(&sym) {
                if r.quotient <= next_rep.quotient {
                    next = sym;
                    next_rep = r;
                }
            }
        }
        if cfg.translate_every > 0 && iter % cfg.translate_every == 0 {
            if let Some((v, r)) =
                translation_search(&problem, &gauge, &next, next_rep.quotient, cfg.renormalize)
            {
                next = v;
                next_rep = r;
            }
        }
        let decrease = (rep.quotient - next_rep.quotient) / rep.quotient.abs();
        u = next;
        rep = next_rep;
        history.push(HistoryEntry {
            iter,
            quotient: rep.quotient,
            residual,
            boundary_mass: boundary_mass_fraction(&problem, &u),
        });
        quiet = if decrease < cfg.tol { quiet + 1 } else { 0 };
        if quiet >= 3 {
            converged = true;
            break;
        }
    }

    if symmetrize && cfg.final_symmetrize {
        let sym = gauge.enforce(&schwarz_rearrange(&u));
        let sym = if cfg.renormalize { normalize(&problem, &sym) } else { sym };
        if let Ok(r) = problem.quotient(&sym) {
            if r.quotient <= rep.quotient * (1.0 + 1e-6) {
                u = sym;
                rep = r;
                history.push(HistoryEntry {
                    iter: history.len(),
                    quotient: rep.quotient,
                    residual: f64::NAN,
                    boundary_mass: boundary_mass_fraction(&problem, &u),
                });
            }
        }
    }

    // the quotient is even and the gauge is linear, so the sign is free
    let peak = u.values().iter().fold(0.0_f64, |m, &v| if v.abs() > m.abs() { v } else { m });
    if peak < 0.0 {
        u = u.map(|v| -v);
    }

    let boundary_mass = boundary_mass_fraction(&problem, &u);
    let status = if no_minimizer {
        if boundary_mass > 0.5 { MinimizerStatus::Drift } else { MinimizerStatus::MaxIters }
    } else if converged {
        MinimizerStatus::Converged
    } else {
        MinimizerStatus::MaxIters
    };
    Ok(MinimizeOutput {
        field: u,
        report: rep,
        history,
        status,
        boundary_mass,
    })
}
