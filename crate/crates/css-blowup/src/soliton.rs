//! The Jackiw–Pi vortex `Q`, the generalized null mode `ρ`, the linearized
//! operators around `Q`, orthogonality profiles and truncated kernel relations.

use crate::cutoff::{chi, chi_d1, CutoffSpec};
use crate::error::{CssError, Result};
use crate::field::ComplexField;
use crate::gauge::{l_op, l_op_adjoint};
use crate::grid::RadialGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// `Q(r) = √8 (m+1) r^m / (1 + r^{2m+2})`.
pub fn vortex_value(m: i32, r: f64) -> f64 {
    let mp = (m + 1) as f64;
    8f64.sqrt() * mp * r.powi(m) / (1.0 + r.powi(2 * m + 2))
}

/// `ΛQ = (r∂_r + 1) Q = (m+1) Q (1 − r^{2m+2}) / (1 + r^{2m+2})`.
pub fn vortex_scaling_value(m: i32, r: f64) -> f64 {
    let p = r.powi(2 * m + 2);
    (m + 1) as f64 * vortex_value(m, r) * (1.0 - p) / (1.0 + p)
}

/// A sampled, possibly modulated, vortex.
#[derive(Clone, Debug)]
pub struct SolitonProfile {
    /// Equivariance index.
    pub m: i32,
    /// Samples of `Q_{λ,γ}`.
    pub field: ComplexField,
    /// Scale `λ`.
    pub lambda: f64,
    /// Phase `γ`.
    pub gamma: f64,
}

/// The vortex with `λ = 1`, `γ = 0` on `grid`.
pub fn vortex(m: i32, grid: &Arc<RadialGrid>) -> SolitonProfile {
    let field = ComplexField::from_real_fn(grid.clone(), m, |r| vortex_value(m, r));
    SolitonProfile { m, field, lambda: 1.0, gamma: 0.0 }
}

/// `Q_{λ,γ}(r) = λ^{−1} e^{iγ} Q(r/λ)` evaluated in closed form on the profile's grid.
pub fn rescale(profile: &SolitonProfile, lambda: f64, gamma: f64) -> SolitonProfile {
    let m = profile.m;
    let lam = profile.lambda * lambda;
    let gam = profile.gamma + gamma;
    let phase = Complex64::from_polar(1.0 / lam, gam);
    let field = ComplexField::from_fn(profile.field.grid().clone(), m, |r| phase * vortex_value(m, r / lam));
    SolitonProfile { m, field, lambda: lam, gamma: gam }
}

/// Tabulated generalized null mode `ρ` with `ℒ_Q ρ = Q` and `L_Q ρ = rQ/(2(m+1))`.
#[derive(Clone, Debug)]
pub struct RhoTable {
    m: i32,
    grid: RadialGrid,
    values: Vec<f64>,
    memory: Vec<f64>,
}

/// Null mode sampled on a working grid.
#[derive(Clone, Debug)]
pub struct NullModeRho {
    /// Real samples of `ρ`.
    pub field: ComplexField,
    /// Equivariance index.
    pub m: i32,
}

impl RhoTable {
    /// Number of table nodes.
    pub const NODES: usize = 16384;
    /// Table range.
    pub const R_MIN: f64 = 1e-8;
    /// Table range.
    pub const R_MAX: f64 = 1e10;

    /// March `ρ̃ = ρ/Q` outward in `s = ln r` with classical RK4.
    ///
    /// The memory integral `I(r) = ∫₀^r Q² ρ̃ r' dr'` is carried as a second
    /// unknown, so the Volterra equation `∂_r ρ̃ + I/r = r/(2(m+1))` becomes
    /// the linear system `ρ̃′ = r²/(2(m+1)) − I`, `I′ = Q² ρ̃ r²`.
    pub fn new(m: i32) -> Result<Self> {
        if m < 0 {
            return Err(CssError::InvalidParameter("null mode requires m ≥ 0".into()));
        }
        let grid = RadialGrid::log(Self::NODES, Self::R_MIN, Self::R_MAX)?;
        let h = grid.step();
        let mp = (m + 1) as f64;
        let rhs = |s: f64, y: [f64; 2]| -> [f64; 2] {
            let r = s.exp();
            let q = vortex_value(m, r);
            [r * r / (2.0 * mp) - y[1], q * q * y[0] * r * r]
        };
        let r0 = Self::R_MIN;
        let rt0 = r0 * r0 / (4.0 * mp);
        let q0 = vortex_value(m, r0);
        let mut y = [rt0, q0 * q0 * rt0 * r0 * r0 / (2.0 * m as f64 + 4.0)];
        let mut values = Vec::with_capacity(Self::NODES);
        let mut memory = Vec::with_capacity(Self::NODES);
        values.push(q0 * y[0]);
        memory.push(y[1]);
        let mut s = r0.ln();
        for j in 1..Self::NODES {
            let k1 = rhs(s, y);
            let k2 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            s = grid.radii()[0].ln() + j as f64 * h;
            let r = grid.radii()[j];
            if !y[0].is_finite() || y[0].abs() > 10.0 * r * r + 10.0 {
                return Err(CssError::Divergence(format!("null mode left its envelope at r = {r:e}")));
            }
            values.push(vortex_value(m, r) * y[0]);
            memory.push(y[1]);
        }
        Ok(Self { m, grid, values, memory })
    }

    /// Equivariance index.
    pub fn m(&self) -> i32 {
        self.m
    }

    /// `ρ(r)`; outside the table the leading asymptotics `r²Q/(4(m+1))` are used.
    pub fn eval(&self, r: f64) -> f64 {
        if !(Self::R_MIN..=Self::R_MAX).contains(&r) {
            return r * r * vortex_value(self.m, r) / (4.0 * (self.m + 1) as f64);
        }
        self.grid.interpolate(&self.values, r, (self.m + 2) as f64)
    }

    /// `(ρ(r), Λρ(r))`, using `Λρ = ΛQ ρ/Q + Q (r²/(2(m+1)) − I)` with the tabulated memory integral `I`.
    pub fn eval_with_scaling(&self, r: f64) -> (f64, f64) {
        let mp = (self.m + 1) as f64;
        let q = vortex_value(self.m, r);
        let lq = vortex_scaling_value(self.m, r);
        if !(Self::R_MIN..=Self::R_MAX).contains(&r) {
            let rho = r * r * q / (4.0 * mp);
            return (rho, r * r * (2.0 * q + lq) / (4.0 * mp));
        }
        let rho = self.grid.interpolate(&self.values, r, (self.m + 2) as f64);
        let memory = self.grid.interpolate(&self.memory, r, (2 * self.m + 4) as f64);
        (rho, lq * rho / q + q * (r * r / (2.0 * mp) - memory))
    }

    /// `ρ` sampled on `grid`.
    pub fn on_grid(&self, grid: &Arc<RadialGrid>) -> NullModeRho {
        let field = ComplexField::from_real_fn(grid.clone(), self.m, |r| self.eval(r));
        NullModeRho { field, m: self.m }
    }
}

/// Solve for `ρ` and sample it on `grid`.
pub fn solve_rho(m: i32, grid: &Arc<RadialGrid>) -> Result<NullModeRho> {
    Ok(RhoTable::new(m)?.on_grid(grid))
}

/// Linearized operators around a profile `w`: `L_w`, `L_w*` and `ℒ_w = L_w* L_w`.
#[derive(Clone, Debug)]
pub struct LinOps {
    w: ComplexField,
}

impl LinOps {
    /// Bundle around `w`.
    pub fn new(w: ComplexField) -> Self {
        Self { w }
    }

    /// `L_w f`.
    pub fn l(&self, f: &ComplexField) -> ComplexField {
        l_op(&self.w, f)
    }

    /// `L_w* g`.
    pub fn l_adj(&self, g: &ComplexField) -> ComplexField {
        l_op_adjoint(&self.w, g)
    }

    /// `ℒ_w f = L_w*(L_w f)`.
    pub fn big_l(&self, f: &ComplexField) -> ComplexField {
        self.l_adj(&self.l(f))
    }
}

/// Linearized operators around `Q` on `grid`.
pub fn lin_ops(m: i32, grid: &Arc<RadialGrid>) -> LinOps {
    LinOps::new(vortex(m, grid).field)
}

/// Fixed bump supported in `[1/2, 4]`: `B(y) = (1 − χ(2y)) χ(y/2)`.
pub fn base_bump(y: f64) -> f64 {
    (1.0 - chi(2.0 * y)) * chi(0.5 * y)
}

/// `B′(y)`.
pub fn base_bump_d1(y: f64) -> f64 {
    -2.0 * chi_d1(2.0 * y) * chi(0.5 * y) + 0.5 * (1.0 - chi(2.0 * y)) * chi_d1(0.5 * y)
}

/// Orthogonality profiles for `m = 0`:
/// `𝒵₁ = s₁ B (ΛQ − c₁ ρ)` (real) and `𝒵₂ = i s₂ B (Q − c₂ y²Q/4)`.
///
/// The coefficients `c_k` enforce `(ρ, 𝒵₁)_r = 0` and `(y²Q/4, Im 𝒵₂)_r = 0`;
/// the scales `s_k` normalize `(ΛQ, 𝒵₁)_r = (iQ, 𝒵₂)_r = 1`.
#[derive(Clone, Debug)]
pub struct OrthoProfiles {
    rho: Arc<RhoTable>,
    /// `(s₁, c₁)`.
    pub z1: [f64; 2],
    /// `(s₂, c₂)`.
    pub z2: [f64; 2],
    /// `(ΛQ, 𝒵₁)_r (iQ, 𝒵₂)_r` after normalization (equal to one).
    pub transversality_det: f64,
    /// The same determinant computed with `L²`-normalized profiles.
    pub raw_det: f64,
    /// `max(|(ρ, 𝒵₁)_r|, |(−iy²Q/4, 𝒵₂)_r|)`.
    pub gauge_residual: f64,
}

impl OrthoProfiles {
    /// `𝒵₁(y)` (real).
    pub fn z1_value(&self, y: f64) -> f64 {
        let b = base_bump(y);
        if b == 0.0 {
            return 0.0;
        }
        self.z1[0] * b * (vortex_scaling_value(0, y) - self.z1[1] * self.rho.eval(y))
    }

    /// `Im 𝒵₂(y)`.
    pub fn z2_imag_value(&self, y: f64) -> f64 {
        let b = base_bump(y);
        if b == 0.0 {
            return 0.0;
        }
        self.z2[0] * b * vortex_value(0, y) * (1.0 - self.z2[1] * 0.25 * y * y)
    }

    /// `Λ𝒵₁(y)` with `Λ = y∂_y + 1`.
    pub fn z1_scaling(&self, y: f64) -> f64 {
        let (b, db) = (base_bump(y), base_bump_d1(y));
        if b == 0.0 && db == 0.0 {
            return 0.0;
        }
        let (rho, lrho) = self.rho.eval_with_scaling(y);
        let f = vortex_scaling_value(0, y) - self.z1[1] * rho;
        let lf = vortex_scaling_scaling_value(y) - self.z1[1] * lrho;
        self.z1[0] * (y * db * f + b * lf)
    }

    /// `Im Λ𝒵₂(y)`.
    pub fn z2_imag_scaling(&self, y: f64) -> f64 {
        let (b, db) = (base_bump(y), base_bump_d1(y));
        if b == 0.0 && db == 0.0 {
            return 0.0;
        }
        let q = vortex_value(0, y);
        let lq = vortex_scaling_value(0, y);
        let f = q * (1.0 - self.z2[1] * 0.25 * y * y);
        let lf = lq - self.z2[1] * 0.25 * y * y * (lq + 2.0 * q);
        self.z2[0] * (y * db * f + b * lf)
    }

    /// `(𝒵₁, 𝒵₂)` sampled on `grid`.
    pub fn fields(&self, grid: &Arc<RadialGrid>) -> (ComplexField, ComplexField) {
        let z1 = ComplexField::from_real_fn(grid.clone(), 0, |y| self.z1_value(y));
        let z2 = ComplexField::from_fn(grid.clone(), 0, |y| Complex64::new(0.0, self.z2_imag_value(y)));
        (z1, z2)
    }

    /// `(Λ𝒵₁, Λ𝒵₂)` sampled on `grid`.
    pub fn scaling_fields(&self, grid: &Arc<RadialGrid>) -> (ComplexField, ComplexField) {
        let z1 = ComplexField::from_real_fn(grid.clone(), 0, |y| self.z1_scaling(y));
        let z2 = ComplexField::from_fn(grid.clone(), 0, |y| Complex64::new(0.0, self.z2_imag_scaling(y)));
        (z1, z2)
    }
}

/// `Λ(ΛQ)` for `m = 0`, from `∂_y ΛQ = √8 (2y³ − 6y)/(1 + y²)³`.
fn vortex_scaling_scaling_value(y: f64) -> f64 {
    let d = 8f64.sqrt() * (2.0 * y * y * y - 6.0 * y) / (1.0 + y * y).powi(3);
    y * d + vortex_scaling_value(0, y)
}

/// Build `𝒵₁, 𝒵₂` for `m = 0`; `grid` must resolve `[1/2, 4]`.
pub fn build_ortho_profiles(grid: &Arc<RadialGrid>, rho: Arc<RhoTable>) -> Result<OrthoProfiles> {
    if rho.m() != 0 {
        return Err(CssError::InvalidParameter("orthogonality profiles are built for m = 0".into()));
    }
    let real = |f: &dyn Fn(f64) -> f64| ComplexField::from_real_fn(grid.clone(), 0, f);
    let q = real(&|y| vortex_value(0, y));
    let lq = real(&|y| vortex_scaling_value(0, y));
    let rho_f = real(&|y| rho.eval(y));
    let y2q = real(&|y| 0.25 * y * y * vortex_value(0, y));
    let bump = |f: &ComplexField| f.map(|y, v| v * base_bump(y));
    // Gram–Schmidt of BΛQ against ρ and of BQ against y²Q/4.
    let c1 = rho_f.real_inner(&bump(&lq)) / rho_f.real_inner(&bump(&rho_f));
    let c2 = y2q.real_inner(&bump(&q)) / y2q.real_inner(&bump(&y2q));
    let mut out = OrthoProfiles {
        rho,
        z1: [1.0, c1],
        z2: [1.0, c2],
        transversality_det: 0.0,
        raw_det: 0.0,
        gauge_residual: 0.0,
    };
    let (f1, f2) = out.fields(grid);
    let iq = q.times_i();
    let t1 = lq.real_inner(&f1);
    let t2 = iq.real_inner(&f2);
    out.raw_det = t1 * t2 / (f1.l2() * f2.l2());
    if out.raw_det.abs() < 1e-3 {
        return Err(CssError::IllConditioned(out.raw_det));
    }
    out.z1[0] = 1.0 / t1;
    out.z2[0] = 1.0 / t2;
    let (f1, f2) = out.fields(grid);
    out.transversality_det = lq.real_inner(&f1) * iq.real_inner(&f2);
    out.gauge_residual = rho_f.real_inner(&f1).abs().max(y2q.times_i().real_inner(&f2).abs());
    Ok(out)
}

/// Truncated kernel relations at one cutoff radius.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TruncatedRelations {
    /// Cutoff radius `R`.
    pub radius: f64,
    /// `(½rQ, χ_R ½rQ)_r − 4π log R`.
    pub log_divergence_offset: f64,
    /// Matrix `[[(ΛQ, −r²Qχ_R/4), (iQ, −r²Qχ_R/4)], [(ΛQ, −iρχ_R), (iQ, −iρχ_R)]]`.
    pub matrix: [[f64; 2]; 2],
    /// Diagonal entries divided by `4π log R`.
    pub diagonal_ratio: [f64; 2],
}

/// Truncated relations for `m = 0` at radius `radius`; `grid` must extend beyond `2·radius`.
pub fn truncated_relations_report(grid: &Arc<RadialGrid>, rho: &NullModeRho, radius: f64) -> TruncatedRelations {
    let cut = CutoffSpec::new(radius);
    let q = vortex(0, grid).field;
    let lq = ComplexField::from_real_fn(grid.clone(), 0, |y| vortex_scaling_value(0, y));
    let iq = q.times_i();
    let half_rq = q.map(|r, v| v * (0.5 * r));
    let cut_half_rq = half_rq.map(|r, v| v * cut.value(r));
    let offset = half_rq.real_inner(&cut_half_rq) - 4.0 * PI * radius.ln();
    let a = q.map(|r, v| v * (-0.25 * r * r * cut.value(r)));
    let b = rho.field.map(|r, v| v * Complex64::new(0.0, -cut.value(r)));
    let matrix = [
        [lq.real_inner(&a), iq.real_inner(&a)],
        [lq.real_inner(&b), iq.real_inner(&b)],
    ];
    let l = 4.0 * PI * radius.ln();
    TruncatedRelations {
        radius,
        log_divergence_offset: offset,
        matrix,
        diagonal_ratio: [matrix[0][0] / l, matrix[1][1] / l],
    }
}

/// `‖L_Q ε⊥‖_{L²} / ‖ε⊥‖_{𝓗̇¹₀}` where `ε⊥` removes the `𝒵_k` components of `ε`;
/// `None` when `ε⊥` vanishes.
pub fn coercivity_ratio(eps: &ComplexField, ortho: &OrthoProfiles, ops: &LinOps) -> Option<f64> {
    let (z1, z2) = ortho.fields(eps.grid());
    let mut e = eps.clone();
    for z in [&z1, &z2] {
        let c = e.real_inner(z) / z.real_inner(z);
        e = e.axpby(Complex64::new(1.0, 0.0), z, Complex64::new(-c, 0.0));
    }
    let denom = e.norms().h1_log;
    if denom <= 1e-300 {
        return None;
    }
    Some(ops.l(&e).l2() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vortex_values() {
        assert!((vortex_value(0, 0.0) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((vortex_value(0, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        let g = Arc::new(RadialGrid::reference());
        let p = vortex(0, &g);
        let same = rescale(&p, 1.0, 0.0);
        assert_eq!(same.field.values(), p.field.values());
    }

    #[test]
    fn null_mode_relations() {
        let g = Arc::new(RadialGrid::log(4096, 1e-4, 1e4).unwrap());
        let rho = solve_rho(0, &g).unwrap();
        let ops = lin_ops(0, &g);
        let q = vortex(0, &g).field;
        let target = q.map(|r, v| v * (0.5 * r));
        let res = ops.l(&rho.field).sub(&target).l2() / target.l2();
        assert!(res < 1e-6, "L_Q rho residual {res}");
        let res2 = ops.big_l(&rho.field).sub(&q).l2() / q.l2();
        assert!(res2 < 1e-5, "calL_Q rho residual {res2}");
    }

    #[test]
    fn ortho_profiles_are_transversal() {
        let g = Arc::new(RadialGrid::reference());
        let o = build_ortho_profiles(&g, Arc::new(RhoTable::new(0).unwrap())).unwrap();
        assert!(o.gauge_residual < 1e-10, "{}", o.gauge_residual);
        assert!((o.transversality_det - 1.0).abs() < 1e-12);
        assert!(o.raw_det.abs() >= 1e-3);
    }

    #[test]
    fn ortho_scaling_matches_finite_differences() {
        let g = Arc::new(RadialGrid::log(4096, 1e-3, 1e3).unwrap());
        let o = build_ortho_profiles(&g, Arc::new(RhoTable::new(0).unwrap())).unwrap();
        let (z1, z2) = o.fields(&g);
        let (l1, l2) = o.scaling_fields(&g);
        assert!(z1.scaling_gen().sub(&l1).l2() < 1e-6 * l1.l2());
        assert!(z2.scaling_gen().sub(&l2).l2() < 1e-6 * l2.l2());
    }

    #[test]
    fn coercivity_on_projected_scaling_mode() {
        let g = Arc::new(RadialGrid::log(2048, 1e-4, 1e6).unwrap());
        let o = build_ortho_profiles(&g, Arc::new(RhoTable::new(0).unwrap())).unwrap();
        let ops = lin_ops(0, &g);
        let lq = ComplexField::from_real_fn(g.clone(), 0, |y| vortex_scaling_value(0, y));
        let ratio = coercivity_ratio(&lq, &o, &ops).unwrap();
        assert!(ratio > 0.05 && ratio < 20.0, "{ratio}");
        assert!(coercivity_ratio(&ComplexField::zeros(g.clone(), 0), &o, &ops).is_none());
    }
}
