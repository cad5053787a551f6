//! Smooth radial cutoffs χ_A(r) = χ(r/A) with χ = 1 on [0,1] and χ = 0 on [2,∞).
//!
//! The transition is the degree-9 smoothstep, which is C⁴ and has closed-form
//! derivatives. Only the value and the first two derivatives are ever used.

use serde::{Deserialize, Serialize};

/// Degree-9 smoothstep S on [0,1] with S(0)=0, S(1)=1 and vanishing derivatives up to order 4 at both ends.
fn smoothstep(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    t.powi(5) * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))))
}

fn smoothstep_d1(tau: f64) -> f64 {
    if !(0.0..=1.0).contains(&tau) {
        return 0.0;
    }
    630.0 * (tau * (1.0 - tau)).powi(4)
}

fn smoothstep_d2(tau: f64) -> f64 {
    if !(0.0..=1.0).contains(&tau) {
        return 0.0;
    }
    2520.0 * (tau * (1.0 - tau)).powi(3) * (1.0 - 2.0 * tau)
}

/// Base profile χ(x).
pub fn chi(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(x - 1.0)
    }
}

/// First derivative χ′(x).
pub fn chi_d1(x: f64) -> f64 {
    -smoothstep_d1(x - 1.0)
}

/// Second derivative χ″(x).
pub fn chi_d2(x: f64) -> f64 {
    -smoothstep_d2(x - 1.0)
}

/// A cutoff at scale `a`: χ_A(r) = χ(r/A).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    /// Scale A > 0 below which the cutoff equals one.
    pub scale: f64,
}

impl CutoffSpec {
    /// Cutoff with scale `scale`.
    pub fn new(scale: f64) -> Self {
        assert!(scale > 0.0, "cutoff scale must be positive");
        Self { scale }
    }

    /// χ_A(r).
    pub fn value(&self, r: f64) -> f64 {
        chi(r / self.scale)
    }

    /// ∂_r χ_A(r).
    pub fn d1(&self, r: f64) -> f64 {
        chi_d1(r / self.scale) / self.scale
    }

    /// ∂_rr χ_A(r).
    pub fn d2(&self, r: f64) -> f64 {
        chi_d2(r / self.scale) / (self.scale * self.scale)
    }

    /// r ∂_r χ_A(r), the combination entering Λ_A.
    pub fn r_d1(&self, r: f64) -> f64 {
        let x = r / self.scale;
        x * chi_d1(x)
    }
}
