//! Zero-mode constraint for variational iterations.
//!
//! Every multiplier annihilates constants, so a quotient or energy on the
//! torus is blind to adding one; descent then runs off along the constant
//! direction. Iterates are therefore kept on the hyperplane <u, omega> = 0.

use serde::{Deserialize, Serialize};

use crate::functionals::Problem;
use crate::grid::Field;

/// Which linear functional is pinned to zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gauge {
    /// Global mean zero. Translation covariant.
    Mean,
    /// Zero average over the outer shell |x|_inf > inner * L, the far-field
    /// stand-in for decay at infinity. With inner = 7/8 the cut falls on a
    /// cell face for every N >= 16, so the shell is the same set under refinement.
    Shell { inner: f64 },
}

impl Default for Gauge {
    fn default() -> Self {
        Gauge::Mean
    }
}

impl Gauge {
    /// Shell gauge with the cell-aligned default cut 7/8.
    pub fn shell() -> Self {
        Gauge::Shell { inner: 0.875 }
    }
}

pub(crate) struct GaugeProjector {
    omega: Field,
    m_inv_omega: Field,
    omega_mass: f64,
    curvature: f64,
}

impl GaugeProjector {
    pub fn new(problem: &Problem, gauge: Gauge) -> Self {
        let g = problem.grid();
        let omega = match gauge {
            Gauge::Mean => Field::from_fn(g, |_| 1.0),
            Gauge::Shell { inner } => {
                let cut = inner * g.half_length();
                let vals = (0..g.len())
                    .map(|i| if g.sup_radius(i) > cut { 1.0 } else { 0.0 })
                    .collect();
                Field::new(g, vals).expect("indicator is finite")
            }
        };
        let m_inv_omega = problem.precondition(&omega);
        let omega_mass = omega.l2_norm_sq();
        let curvature = m_inv_omega.dot(&omega).expect("same grid");
        Self {
            omega,
            m_inv_omega,
            omega_mass,
            curvature,
        }
    }

    /// <u, omega> / <1, omega>: the constant to subtract.
    pub fn offset(&self, u: &Field) -> f64 {
        u.dot(&self.omega).expect("same grid") / self.omega_mass
    }

    /// Constant shift onto the constraint hyperplane.
    pub fn enforce(&self, u: &Field) -> Field {
        let c = self.offset(u);
        u.map(|v| v - c)
    }

    /// Sobolev-metric orthogonal projection of a direction onto the
    /// hyperplane: g - beta M^{-1} omega.
    pub fn project(&self, g: &Field) -> Field {
        let beta = g.dot(&self.omega).expect("same grid") / self.curvature;
        g.axpy(-beta, &self.m_inv_omega).expect("same grid")
    }
}
