use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::gamma_h;

/// Problem quadruple (n, alpha, s, gamma).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: usize,
    pub alpha: f64,
    pub s: f64,
    pub gamma: f64,
}

/// Critical exponents derived from (n, alpha, s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub two_star: f64,
    pub two_star_s: f64,
    pub alpha_over_2n: f64,
    pub as_over_2ns: f64,
}

impl ProblemParams {
    pub fn new(n: usize, alpha: f64, s: f64, gamma: f64) -> Result<Self> {
        let p = Self { n, alpha, s, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |hypothesis: &'static str, detail: String| {
            Err(Error::InvalidParams { hypothesis, detail })
        };
        if !(1..=3).contains(&self.n) {
            return fail("n ∈ {1, 2, 3}", format!("n = {}", self.n));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return fail("0 < α < 2", format!("α = {}", self.alpha));
        }
        if !(self.s >= 0.0 && self.s < self.alpha) {
            return fail("0 ≤ s < α", format!("s = {}, α = {}", self.s, self.alpha));
        }
        if self.alpha >= self.n as f64 {
            return fail("α < n", format!("α = {}, n = {}", self.alpha, self.n));
        }
        let gh = gamma_h(self.n, self.alpha);
        if !(self.gamma.is_finite() && self.gamma < gh) {
            return fail("γ < γ_H", format!("γ = {}, γ_H = {gh}", self.gamma));
        }
        Ok(())
    }

    pub fn exponents(&self) -> Exponents {
        let n = self.n as f64;
        let a = self.alpha;
        let s = self.s;
        Exponents {
            two_star: 2.0 * n / (n - a),
            two_star_s: 2.0 * (n - s) / (n - a),
            alpha_over_2n: a / (2.0 * n),
            as_over_2ns: (a - s) / (2.0 * (n - s)),
        }
    }

    pub fn gamma_h(&self) -> f64 {
        gamma_h(self.n, self.alpha)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.n, self.alpha, self.s, gamma)
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.n, self.alpha, s, self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_identities() {
        let p = ProblemParams::new(3, 1.2, 0.4, 0.0).unwrap();
        let e = p.exponents();
        assert!((0.5 - 1.0 / e.two_star - e.alpha_over_2n).abs() < 1e-15);
        assert!((0.5 - 1.0 / e.two_star_s - e.as_over_2ns).abs() < 1e-15);
        assert!(e.two_star_s < e.two_star && e.two_star_s > 2.0);
    }

    #[test]
    fn hypotheses_are_named() {
        let err = ProblemParams::new(1, 0.5, 0.5, 0.0).unwrap_err().to_string();
        assert!(err.contains("0 ≤ s < α"), "{err}");
        let err = ProblemParams::new(1, 1.5, 0.0, 0.0).unwrap_err().to_string();
        assert!(err.contains("α < n"));
        let gh = gamma_h(1, 0.5);
        assert!(ProblemParams::new(1, 0.5, 0.0, gh).is_err());
        assert!(ProblemParams::new(1, 0.5, 0.0, 0.99 * gh).is_ok());
        assert!(ProblemParams::new(1, 0.5, 0.0, -5.0).is_ok());
    }
}
