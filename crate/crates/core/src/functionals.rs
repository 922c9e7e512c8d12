//! Hardy, Hardy-Sobolev and Sobolev terms, the Rayleigh quotient, the
//! energy functional and its Sobolev-metric gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{apply_multiplier, seminorm_sq};
use crate::grid::{Exponents, Field, ProblemParams, SingularWeightRule, SpectralGrid};
use crate::special::gamma;

/// Sharp fractional Hardy constant 2^alpha Gamma^2((n+alpha)/4) / Gamma^2((n-alpha)/4).
pub fn gamma_h(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    if alpha >= n {
        return 0.0;
    }
    let ratio = gamma((n + alpha) / 4.0) / gamma((n - alpha) / 4.0);
    2f64.powf(alpha) * ratio * ratio
}

/// Extension normalization Gamma(alpha/2) / (2^{1-alpha} Gamma(1 - alpha/2)).
pub fn k_alpha(alpha: f64) -> f64 {
    gamma(0.5 * alpha) / (2f64.powf(1.0 - alpha) * gamma(1.0 - 0.5 * alpha))
}

/// Energy threshold min{(alpha/2n) S0^{n/alpha}, ((alpha-s)/(2(n-s))) Ss^{(n-s)/(alpha-s)}}.
pub fn c_star(params: &ProblemParams, s0: f64, ss: f64) -> Result<f64> {
    if !(s0 > 0.0 && ss > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "constants must be positive, got S0 = {s0}, Ss = {ss}"
        )));
    }
    let n = params.n as f64;
    let (a, s) = (params.alpha, params.s);
    let first = a / (2.0 * n) * s0.powf(n / a);
    let second = (a - s) / (2.0 * (n - s)) * ss.powf((n - s) / (a - s));
    Ok(first.min(second))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub spectral: f64,
    pub hardy: f64,
    pub hs_term: f64,
    pub sob_term: f64,
    pub quotient: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub half_norm: f64,
    pub sob_piece: f64,
    pub hs_piece: f64,
    pub energy: f64,
    pub nehari_residual: f64,
}

/// Coefficients of Psi(t v) = A t^2/2 - B t^p/p - C t^q/q.
#[derive(Clone, Copy, Debug)]
pub struct RayCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

impl RayCoefficients {
    pub fn energy(&self, t: f64) -> f64 {
        0.5 * self.a * t * t - self.b * t.powf(self.p) / self.p - self.c * t.powf(self.q) / self.q
    }

    /// Unique positive critical point of t -> Psi(t v), when A > 0.
    pub fn argmax(&self) -> Option<f64> {
        if !(self.a > 0.0) || !(self.b + self.c > 0.0) {
            return None;
        }
        // A = B t^{p-2} + C t^{q-2}, right side increasing in t.
        let rhs = |t: f64| self.b * t.powf(self.p - 2.0) + self.c * t.powf(self.q - 2.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        while rhs(hi) < self.a {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rhs(mid) < self.a {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// A grid and parameter set with their weight rules resolved once.
#[derive(Clone, Debug)]
pub struct Problem {
    grid: SpectralGrid,
    params: ProblemParams,
    exps: Exponents,
    w_hardy: SingularWeightRule,
    w_s: SingularWeightRule,
}

impl Problem {
    pub fn new(grid: &SpectralGrid, params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        if params.n != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "problem dimension {} differs from grid dimension {}",
                params.n,
                grid.dim()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            exps: params.exponents(),
            w_hardy: grid.singular_weight(params.alpha)?,
            w_s: grid.singular_weight(params.s)?,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn exponents(&self) -> &Exponents {
        &self.exps
    }

    pub fn hardy_weights(&self) -> &SingularWeightRule {
        &self.w_hardy
    }

    pub fn hs_weights(&self) -> &SingularWeightRule {
        &self.w_s
    }

    /// Regularization of the Sobolev metric, (pi/L)^alpha.
    pub fn metric_shift(&self) -> f64 {
        (std::f64::consts::PI / self.grid.half_length()).powf(self.params.alpha)
    }

    fn check(&self, u: &Field) -> Result<()> {
        if u.grid() == &self.grid {
            Ok(())
        } else {
            Err(Error::IncompatibleGrid)
        }
    }

    pub fn spectral(&self, u: &Field) -> f64 {
        seminorm_sq(u, self.params.alpha)
    }

    pub fn hardy_term(&self, u: &Field) -> f64 {
        self.w_hardy.integrate_pow(&self.grid, u.values(), 2.0)
    }

    pub fn hs_term(&self, u: &Field) -> f64 {
        self.w_s.integrate_pow(&self.grid, u.values(), self.exps.two_star_s)
    }

    pub fn sob_term(&self, u: &Field) -> f64 {
        let p = self.exps.two_star;
        self.grid.cell_volume() * u.values().iter().map(|v| v.abs().powf(p)).sum::<f64>()
    }

    pub fn twisted_norm_sq(&self, u: &Field) -> f64 {
        self.spectral(u) - self.params.gamma * self.hardy_term(u)
    }

    pub fn quotient(&self, u: &Field) -> Result<QuotientReport> {
        self.check(u)?;
        let spectral = self.spectral(u);
        let hardy = self.hardy_term(u);
        let hs_term = self.hs_term(u);
        let sob_term = self.sob_term(u);
        if hs_term <= 1e-300 {
            return Err(Error::ZeroDenominator(hs_term));
        }
        let quotient =
            (spectral - self.params.gamma * hardy) / hs_term.powf(2.0 / self.exps.two_star_s);
        Ok(QuotientReport {
            spectral,
            hardy,
            hs_term,
            sob_term,
            quotient,
        })
    }

    pub fn ray(&self, v: &Field) -> RayCoefficients {
        RayCoefficients {
            a: self.twisted_norm_sq(v),
            b: self.sob_term(v),
            c: self.hs_term(v),
            p: self.exps.two_star,
            q: self.exps.two_star_s,
        }
    }

    pub fn energy(&self, u: &Field) -> Result<EnergyReport> {
        self.check(u)?;
        let norm = self.twisted_norm_sq(u);
        let sob = self.sob_term(u);
        let hs = self.hs_term(u);
        let half_norm = 0.5 * norm;
        let sob_piece = sob / self.exps.two_star;
        let hs_piece = hs / self.exps.two_star_s;
        let energy = half_norm - sob_piece - hs_piece;
        let pairing = norm - sob - hs;
        let nehari_residual = (energy
            - 0.5 * pairing
            - self.exps.alpha_over_2n * sob
            - self.exps.as_over_2ns * hs)
            .abs();
        Ok(EnergyReport {
            half_norm,
            sob_piece,
            hs_piece,
            energy,
            nehari_residual,
        })
    }

    /// (-Delta)^{alpha/2} u - gamma |x|^{-alpha} u, pointwise.
    pub fn linear_part(&self, u: &Field) -> Vec<f64> {
        let alpha = self.params.alpha;
        let lu = apply_multiplier(u, |k| if k == 0.0 { 0.0 } else { k.powf(alpha) });
        lu.values()
            .iter()
            .zip(u.values())
            .zip(self.w_hardy.weights())
            .map(|((l, v), w)| l - self.params.gamma * w * v)
            .collect()
    }

    /// L^2 representative D of Psi'(u): <Psi'(u), phi> = h sum D phi.
    pub fn derivative(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        let p = self.exps.two_star;
        let q = self.exps.two_star_s;
        let lin = self.linear_part(u);
        let values = lin
            .iter()
            .zip(u.values())
            .zip(self.w_s.weights())
            .map(|((l, &v), ws)| {
                let a = v.abs();
                l - v.signum() * a.powf(p - 1.0) - ws * v.signum() * a.powf(q - 1.0)
            })
            .collect();
        Field::new(&self.grid, values)
    }

    /// <Psi'(u), phi>.
    pub fn pairing(&self, u: &Field, phi: &Field) -> Result<f64> {
        self.derivative(u)?.dot(phi)
    }

    /// M^{-1} v with M = eps + |2 pi xi|^alpha.
    pub fn precondition(&self, v: &Field) -> Field {
        let eps = self.metric_shift();
        let alpha = self.params.alpha;
        apply_multiplier(v, |k| 1.0 / (eps + k.powf(alpha)))
    }

    /// <M u, u>, the squared Sobolev-metric norm.
    pub fn metric_norm_sq(&self, u: &Field) -> f64 {
        let eps = self.metric_shift();
        let alpha = self.params.alpha;
        let acc: f64 = u
            .coeffs()
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(c, &k)| (eps + k.powf(alpha)) * c.norm_sqr())
            .sum();
        acc * self.grid.dxi()
    }

    /// Sobolev-metric gradient M^{-1} D.
    pub fn sobolev_gradient(&self, u: &Field) -> Result<Field> {
        Ok(self.precondition(&self.derivative(u)?))
    }

    /// Quotient report and the L^2 representative of dQ.
    pub fn quotient_derivative(&self, u: &Field) -> Result<(QuotientReport, Field)> {
        let rep = self.quotient(u)?;
        let q = self.exps.two_star_s;
        let num = rep.spectral - self.params.gamma * rep.hardy;
        let lin = self.linear_part(u);
        let scale = 2.0 / rep.hs_term.powf(2.0 / q);
        let ratio = num / rep.hs_term;
        let values = lin
            .iter()
            .zip(u.values())
            .zip(self.w_s.weights())
            .map(|((l, &v), ws)| scale * (l - ratio * ws * v.signum() * v.abs().powf(q - 1.0)))
            .collect();
        Ok((rep, Field::new(&self.grid, values)?))
    }
}

pub fn twisted_norm_sq(u: &Field, params: &ProblemParams) -> Result<f64> {
    Ok(Problem::new(u.grid(), params)?.twisted_norm_sq(u))
}

pub fn quotient_evaluate(u: &Field, params: &ProblemParams) -> Result<QuotientReport> {
    Problem::new(u.grid(), params)?.quotient(u)
}

pub fn energy_evaluate(u: &Field, params: &ProblemParams) -> Result<EnergyReport> {
    Problem::new(u.grid(), params)?.energy(u)
}

/// Sobolev-metric gradient of the energy; see [`Problem::sobolev_gradient`].
pub fn energy_gradient(u: &Field, params: &ProblemParams) -> Result<Field> {
    Problem::new(u.grid(), params)?.sobolev_gradient(u)
}
