//! Numerical mountain pass for Psi = 1/2 |u|^2_gamma - (1/2*) int |u|^2* - (1/2*(s)) int |u|^2*(s) |x|^-s.
//!
//! The path is kept as the segment from 0 through the current maximizer out
//! to a point of negative energy. Each step deforms the maximizer along the
//! projected Sobolev gradient and relays the path through it; because
//! t -> Psi(t v) has a single interior maximum, the path maximum is then
//! located exactly on the ray.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::concentration::concentration;
use super::gauge::{Gauge, GaugeProjector};
use super::minimize::{minimize_quotient, MinimizerConfig};
use crate::error::{Error, Result};
use crate::functionals::{c_star, Problem};
use crate::grid::{Field, ProblemParams};
use crate::profiles::random_smooth;

/// Grid estimates of S(gamma, 0) and S(gamma, s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConstants {
    pub s0: f64,
    pub ss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MountainPassConfig {
    pub step: f64,
    pub max_iters: usize,
    /// Stop when |P M^{-1} Psi'(u)|_M / |u|_M falls below this.
    pub tol: f64,
    pub path_points: usize,
    pub gauge: Gauge,
    /// Random directions sampled on the ring.
    pub scan_directions: usize,
    pub scan_seed: u64,
    /// Ball radius for the concentration diagnostics; None means L/4.
    pub delta: Option<f64>,
    /// Threshold constants; None estimates them on the same grid and gauge.
    pub constants: Option<ThresholdConstants>,
}

impl Default for MountainPassConfig {
    fn default() -> Self {
        Self {
            step: 0.2,
            max_iters: 3000,
            tol: 1e-6,
            path_points: 17,
            gauge: Gauge::shell(),
            scan_directions: 4,
            scan_seed: 7,
            delta: None,
            constants: None,
        }
    }
}

impl MountainPassConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.tol > 0.0) || self.max_iters == 0 || self.path_points < 3 {
            return Err(Error::InvalidArgument(format!(
                "mountain pass needs step > 0, tol > 0, max_iters >= 1, path_points >= 3 \
                 (got {}, {}, {}, {})",
                self.step, self.tol, self.max_iters, self.path_points
            )));
        }
        Ok(())
    }
}

/// Numerically checked conditions on the geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassGeometry {
    /// Psi(t0 seed) < 0.
    pub t0: f64,
    pub endpoint_energy: f64,
    /// Radius of the ring in the twisted norm; Psi >= rho on it.
    pub ring_radius: f64,
    pub rho: f64,
    /// Smallest sampled energy on the ring (seed and random directions).
    pub ring_sampled_min: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassHistoryEntry {
    pub iter: usize,
    pub energy: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct MountainPassReport {
    pub path: Vec<Field>,
    pub maximizer: Field,
    pub c_est: f64,
    pub c_star: f64,
    pub constants: ThresholdConstants,
    /// |P M^{-1} Psi'(u)|_M at the maximizer.
    pub ps_residual: f64,
    pub maximizer_norm: f64,
    /// |<Psi'(u), u>|.
    pub nehari_pairing: f64,
    pub theta: f64,
    pub zeta: f64,
    pub mu: f64,
    /// Share of the Hardy-Sobolev mass on the positive part of the maximizer.
    pub positive_mass_fraction: f64,
    pub geometry: PassGeometry,
    pub history: Vec<PassHistoryEntry>,
    pub converged: bool,
}

fn check_hypotheses(params: &ProblemParams) -> Result<()> {
    if !(params.s > 0.0) {
        return Err(Error::InvalidParams {
            hypothesis: "0 < s < α",
            detail: format!("mountain pass needs s > 0, got s = {}", params.s),
        });
    }
    if params.gamma < 0.0 {
        return Err(Error::InvalidParams {
            hypothesis: "0 ≤ γ < γ_H",
            detail: format!("mountain pass needs gamma >= 0, got gamma = {}", params.gamma),
        });
    }
    Ok(())
}

fn unit(problem: &Problem, v: &Field) -> Option<Field> {
    let n = problem.metric_norm_sq(v);
    (n > 0.0 && n.is_finite()).then(|| v.scaled(1.0 / n.sqrt()))
}

fn positive_mass_fraction(problem: &Problem, u: &Field) -> f64 {
    let q = problem.exponents().two_star_s;
    let w = problem.hs_weights().weights();
    let (mut pos, mut total) = (0.0, 0.0);
    for (v, w) in u.values().iter().zip(w) {
        let d = w * v.abs().powf(q);
        total += d;
        if *v > 0.0 {
            pos += d;
        }
    }
    if total > 0.0 { pos / total } else { 0.0 }
}

/// Estimates S(gamma, 0) and S(gamma, s) by quotient minimization from `seed`.
pub fn estimate_constants(
    seed: &Field,
    params: &ProblemParams,
    gauge: Gauge,
) -> Result<ThresholdConstants> {
    let cfg = MinimizerConfig {
        gauge,
        ..MinimizerConfig::default()
    };
    let ss = minimize_quotient(seed, params, &cfg)?.report.quotient;
    let s0 = minimize_quotient(seed, &params.with_s(0.0)?, &cfg)?.report.quotient;
    Ok(ThresholdConstants { s0, ss })
}

/// Lower bound Psi >= f(A) with A the twisted norm squared, valid while the
/// constants are the discrete infima; returns (argmax a*, f(a*)).
fn ring_bound(problem: &Problem, k: &ThresholdConstants) -> (f64, f64) {
    let e = problem.exponents();
    let (p, q) = (e.two_star, e.two_star_s);
    let f = |a: f64| 0.5 * a - (a / k.s0).powf(0.5 * p) / p - (a / k.ss).powf(0.5 * q) / q;
    // f'(a) = 1/2 - (a/S0)^{p/2-1}/(2 S0) - (a/Ss)^{q/2-1}/(2 Ss), decreasing in a.
    let df = |a: f64| {
        0.5 - 0.5 * (a / k.s0).powf(0.5 * p - 1.0) / k.s0 - 0.5 * (a / k.ss).powf(0.5 * q - 1.0) / k.ss
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while df(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if df(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, f(a))
}

fn geometry(
    problem: &Problem,
    gauge: &GaugeProjector,
    v: &Field,
    k: &ThresholdConstants,
    cfg: &MountainPassConfig,
) -> Result<PassGeometry> {
    let psi = |u: &Field| problem.energy(u).map(|e| e.energy);
    let mut t0 = 1.0;
    let mut end = psi(v)?;
    let mut doublings = 0;
    while end >= 0.0 {
        t0 *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::DegenerateInit("no point of negative energy along the seed".into()));
        }
        end = psi(&v.scaled(t0))?;
    }

    let (a_ring, rho) = ring_bound(problem, k);
    let g = problem.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.scan_seed);
    let mut dirs = vec![v.clone()];
    for _ in 0..cfg.scan_directions {
        let kmax = 1 + g.points_per_axis() / 16;
        let w = random_smooth(g, rng.random(), kmax, Some(0.25 * g.half_length()))?;
        dirs.push(gauge.enforce(&w));
    }
    let mut sampled = f64::INFINITY;
    for d in &dirs {
        let a = problem.twisted_norm_sq(d);
        if a > 0.0 {
            sampled = sampled.min(psi(&d.scaled((a_ring / a).sqrt()))?);
        }
    }
    let endpoint_norm = problem.twisted_norm_sq(&v.scaled(t0));
    if !(rho > 0.0) || sampled < rho * (1.0 - 1e-9) || endpoint_norm <= a_ring {
        return Err(Error::PathCollapse {
            max_energy: sampled,
            rho,
        });
    }
    Ok(PassGeometry {
        t0,
        endpoint_energy: end,
        ring_radius: a_ring.sqrt(),
        rho,
        ring_sampled_min: sampled,
    })
}

/// Runs the mountain pass from `seed`.
pub fn mountain_pass(
    seed: &Field,
    params: &ProblemParams,
    cfg: &MountainPassConfig,
) -> Result<MountainPassReport> {
    params.validate()?;
    check_hypotheses(params)?;
    cfg.validate()?;
    if seed.is_zero() {
        return Err(Error::DegenerateInit("seed is identically zero".into()));
    }
    let problem = Problem::new(seed.grid(), params)?;
    let gauge = GaugeProjector::new(&problem, cfg.gauge);
    let v0 = gauge.enforce(seed);
    if problem.twisted_norm_sq(&v0) <= 0.0 {
        return Err(Error::DegenerateInit("seed vanishes after gauge fixing".into()));
    }
    let constants = match cfg.constants {
        Some(c) => c,
        None => estimate_constants(seed, params, cfg.gauge)?,
    };
    let geom = geometry(&problem, &gauge, &v0, &constants, cfg)?;
    let threshold = c_star(params, constants.s0, constants.ss)?;

    let peak = |v: &Field| -> Result<(f64, f64)> {
        let ray = problem.ray(v);
        let t = ray.argmax().ok_or_else(|| {
            Error::DegenerateInit("direction with non-positive twisted norm".into())
        })?;
        Ok((t, ray.energy(t)))
    };

    let mut v = unit(&problem, &v0).expect("non-zero after gauge fixing");
    let (mut t, mut level) = peak(&v)?;
    let mut history = Vec::new();
    let mut tau = cfg.step;
    let mut residual;
    let mut iter = 0;
    loop {
        let u = v.scaled(t);
        let d = problem.derivative(&u)?;
        let g = gauge.project(&problem.precondition(&d));
        let slope_u = d.dot(&g)?;
        residual = slope_u.max(0.0).sqrt() / t;
        history.push(PassHistoryEntry {
            iter,
            energy: level,
            residual,
        });
        if residual < cfg.tol || iter >= cfg.max_iters {
            break;
        }
        iter += 1;
        // dJ(v) = t Psi'(t v); the step is taken along its gradient.
        let dir = g.scaled(t);
        let slope = t * t * slope_u;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = gauge.enforce(&v.axpy(-tau, &dir)?);
            if let Some(trial) = unit(&problem, &trial) {
                if let Ok((tt, e)) = peak(&trial) {
                    if e <= level - 1e-4 * tau * slope {
                        accepted = Some((trial, tt, e));
                        break;
                    }
                }
            }
            tau *= 0.5;
        }
        let Some((nv, nt, ne)) = accepted else { break };
        v = nv;
        t = nt;
        level = ne;
        tau = (tau * 1.5).min(1e3 * cfg.step);
    }

    let mut u = v.scaled(t);
    if positive_mass_fraction(&problem, &u) < 0.5 {
        u = u.scaled(-1.0);
    }
    let norm = problem.metric_norm_sq(&u).sqrt();
    let ps_residual = residual * norm;
    if level < geom.rho {
        return Err(Error::PathCollapse {
            max_energy: level,
            rho: geom.rho,
        });
    }
    let nehari_pairing = problem.pairing(&u, &u)?.abs();

    let mut t_end = 2.0;
    while problem.energy(&u.scaled(t_end))?.energy >= 0.0 && t_end < 1e6 {
        t_end *= 2.0;
    }
    let p = cfg.path_points;
    let path = (0..p)
        .map(|i| u.scaled(t_end * i as f64 / (p - 1) as f64))
        .collect();

    let g = u.grid();
    let delta = cfg.delta.unwrap_or(0.25 * g.half_length());
    let conc = concentration(&u, params, delta, &[])?;
    let converged = residual < cfg.tol && level < threshold;
    Ok(MountainPassReport {
        path,
        positive_mass_fraction: positive_mass_fraction(&problem, &u),
        maximizer: u,
        c_est: level,
        c_star: threshold,
        constants,
        ps_residual,
        maximizer_norm: norm,
        nehari_pairing,
        theta: conc.theta,
        zeta: conc.zeta,
        mu: conc.mu,
        geometry: geom,
        history,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::profiles::gaussian;

    #[test]
    fn rejects_s_zero_and_negative_gamma() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let u = gaussian(&g, 1.0);
        let cfg = MountainPassConfig::default();
        let p = ProblemParams::new(1, 0.5, 0.0, 0.0).unwrap();
        assert!(matches!(
            mountain_pass(&u, &p, &cfg),
            Err(Error::InvalidParams { hypothesis: "0 < s < α", .. })
        ));
        let p = ProblemParams::new(1, 0.5, 0.2, -0.01).unwrap();
        assert!(mountain_pass(&u, &p, &cfg).is_err());
        let p = ProblemParams::new(1, 0.5, 0.2, 0.0).unwrap();
        assert!(matches!(
            mountain_pass(&Field::zeros(&g), &p, &cfg),
            Err(Error::DegenerateInit(_))
        ));
    }

    #[test]
    fn small_run_lands_on_nehari_set() {
        let g = make_grid(1, 128, 10.0).unwrap();
        let p = ProblemParams::new(1, 0.5, 0.25, 0.0).unwrap();
        let cfg = MountainPassConfig {
            max_iters: 300,
            ..Default::default()
        };
        let r = mountain_pass(&gaussian(&g, 2.0), &p, &cfg).unwrap();
        assert!(r.c_est > r.geometry.rho && r.geometry.rho > 0.0);
        assert!(r.nehari_pairing < 1e-8 * r.maximizer_norm.powi(2));
        assert!(r.history.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert_eq!(r.path.len(), cfg.path_points);
    }
}
