//! Gauge potentials, the cubic–quintic nonlinearity and its multilinear pieces,
//! energies, the Bogomol'nyi operator and the linearized operators `L_u`, `L_u*`.

use crate::field::ComplexField;
use crate::grid::Measure;
use serde::{Deserialize, Serialize};

/// Which temporal gauge potential to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtVariant {
    /// `A_t = −∫_r^∞ (m + A_θ)|u|² dr'/r'`.
    Standard,
    /// `Å_t = +∫₀^r (m + A_θ)|u|² dr'/r'`, used for the radiation equation.
    PhaseRotated,
}

/// Energy quadrature route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyForm {
    /// `½|∂_r u|² + ½((m+A_θ)/r)²|u|² − ¼|u|⁴`.
    Coulomb,
    /// `½|D_u u|²`.
    SelfDual,
}

/// Samples of `A_θ[u]` and `A_t[u]`.
#[derive(Clone, Debug)]
pub struct GaugePotentials {
    /// `A_θ[u](r)`.
    pub a_theta: Vec<f64>,
    /// `A_t[u](r)` in the chosen variant.
    pub a_t: Vec<f64>,
    /// Equivariance index.
    pub m: i32,
    /// `|(m + A_θ)|u|²|(r_max)·r_max` style diagnostic of the truncated tail integral.
    pub boundary_mass: f64,
}

/// The five pieces of the nonlinearity and their sum.
#[derive(Clone, Debug)]
pub struct NonlinearityBreakdown {
    /// `−|u|² u`.
    pub n30: ComplexField,
    /// `(2/r²) A_θ[u] u`.
    pub n31: ComplexField,
    /// `−(∫_r^∞ |u|² dr'/r') u` or its phase-rotated counterpart.
    pub n32: ComplexField,
    /// `(1/r²) A_θ[u]² u`.
    pub n51: ComplexField,
    /// `−(∫_r^∞ A_θ[u] |u|² dr'/r') u` or its phase-rotated counterpart.
    pub n52: ComplexField,
    /// `n30 + m(n31 + n32) + n51 + n52`.
    pub total: ComplexField,
}

/// Values of the three multilinear forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilinearForms {
    /// `−¼ ∫ Re(ψ̄₁ψ₂) Re(ψ̄₃ψ₄)`.
    pub m40: f64,
    /// `∫ r^{−2} A_θ[ψ₁,ψ₂] Re(ψ̄₃ψ₄)`.
    pub m41: f64,
    /// `½ ∫ r^{−2} A_θ[ψ₁,ψ₂] A_θ[ψ₃,ψ₄] Re(ψ̄₅ψ₆)`.
    pub m6: f64,
}

fn re_product(u1: &ComplexField, u2: &ComplexField) -> Vec<f64> {
    u1.values().iter().zip(u2.values()).map(|(a, b)| (a.conj() * b).re).collect()
}

fn pair_power(u1: &ComplexField, u2: &ComplexField) -> f64 {
    u1.origin_power() + u2.origin_power()
}

/// `A_θ[u₁,u₂](r) = −½ ∫₀^r Re(ū₁u₂) r' dr'`.
pub fn a_theta_bilinear(u1: &ComplexField, u2: &ComplexField) -> Vec<f64> {
    let g = u1.grid();
    let prod = re_product(u1, u2);
    g.prefix(&prod, Measure::RdR, pair_power(u1, u2)).into_iter().map(|v| -0.5 * v).collect()
}

/// `A_θ[u] = A_θ[u,u]`.
pub fn a_theta(u: &ComplexField) -> Vec<f64> {
    a_theta_bilinear(u, u)
}

fn log_integral(
    u: &ComplexField,
    integrand: &[f64],
    power: f64,
    variant: AtVariant,
) -> Vec<f64> {
    let g = u.grid();
    match variant {
        AtVariant::Standard => g.suffix(integrand, Measure::DrOverR).into_iter().map(|v| -v).collect(),
        AtVariant::PhaseRotated => g.prefix(integrand, Measure::DrOverR, power),
    }
}

/// Gauge potentials of `u` with index `u.m()`.
pub fn potentials(u: &ComplexField, variant: AtVariant) -> GaugePotentials {
    let m = u.m();
    let a_theta = a_theta(u);
    let integrand: Vec<f64> =
        a_theta.iter().zip(u.values()).map(|(a, v)| (m as f64 + a) * v.norm_sqr()).collect();
    let power = if m == 0 { 2.0 } else { 2.0 * u.origin_power() };
    let a_t = log_integral(u, &integrand, power, variant);
    let boundary_mass = u.grid().boundary_mass(integrand.last().map_or(0.0, |v| v.abs()));
    GaugePotentials { a_theta, a_t, m, boundary_mass }
}

/// `A_t[u]` in the chosen variant.
pub fn a_t(u: &ComplexField, variant: AtVariant) -> Vec<f64> {
    potentials(u, variant).a_t
}

/// `θ_z = −∫₀^∞ (m + A_θ[z])|z|² dr/r`, the constant separating the two `A_t` variants.
pub fn theta_z(z: &ComplexField) -> f64 {
    let m = z.m() as f64;
    let a = a_theta(z);
    let integrand: Vec<f64> = a.iter().zip(z.values()).map(|(a, v)| (m + a) * v.norm_sqr()).collect();
    let power = if z.m() == 0 { 2.0 } else { 2.0 * z.origin_power() };
    -z.grid().integral(&integrand, Measure::DrOverR, power)
}

/// Real potential `V_u = −|u|² + (2m/r²)A_θ + A_θ²/r² + A_t`.
pub fn potential(u: &ComplexField, variant: AtVariant) -> Vec<f64> {
    let pot = potentials(u, variant);
    let m = u.m() as f64;
    u.radii()
        .iter()
        .zip(u.values())
        .zip(pot.a_theta.iter().zip(&pot.a_t))
        .map(|((r, v), (a, at))| -v.norm_sqr() + (2.0 * m * a + a * a) / (r * r) + at)
        .collect()
}

/// `𝒩₃,₀(u₁,u₂,u₃) = −Re(ū₁u₂) u₃`.
pub fn n30(u1: &ComplexField, u2: &ComplexField, u3: &ComplexField) -> ComplexField {
    u3.mul_real(&re_product(u1, u2).into_iter().map(|v| -v).collect::<Vec<_>>())
}

/// `𝒩₃,₁(u₁,u₂,u₃) = (2/r²) A_θ[u₁,u₂] u₃`.
pub fn n31(u1: &ComplexField, u2: &ComplexField, u3: &ComplexField) -> ComplexField {
    let a = a_theta_bilinear(u1, u2);
    let w: Vec<f64> = a.iter().zip(u3.radii()).map(|(a, r)| 2.0 * a / (r * r)).collect();
    u3.mul_real(&w)
}

/// `𝒩₃,₂(u₁,u₂,u₃) = −(∫_r^∞ Re(ū₁u₂) dr'/r') u₃` (standard) or `+(∫₀^r …) u₃` (phase-rotated).
pub fn n32(u1: &ComplexField, u2: &ComplexField, u3: &ComplexField, variant: AtVariant) -> ComplexField {
    let prod = re_product(u1, u2);
    let w = log_integral(u1, &prod, pair_power(u1, u2), variant);
    u3.mul_real(&w)
}

/// `𝒩₅,₁(u₁..u₅) = r^{−2} A_θ[u₁,u₂] A_θ[u₃,u₄] u₅`.
pub fn n51(
    u1: &ComplexField,
    u2: &ComplexField,
    u3: &ComplexField,
    u4: &ComplexField,
    u5: &ComplexField,
) -> ComplexField {
    let a12 = a_theta_bilinear(u1, u2);
    let a34 = a_theta_bilinear(u3, u4);
    let w: Vec<f64> = a12.iter().zip(&a34).zip(u5.radii()).map(|((a, b), r)| a * b / (r * r)).collect();
    u5.mul_real(&w)
}

/// `𝒩₅,₂(u₁..u₅) = −(∫_r^∞ A_θ[u₁,u₂] Re(ū₃u₄) dr'/r') u₅` (standard) or `+(∫₀^r …) u₅`.
pub fn n52(
    u1: &ComplexField,
    u2: &ComplexField,
    u3: &ComplexField,
    u4: &ComplexField,
    u5: &ComplexField,
    variant: AtVariant,
) -> ComplexField {
    let a12 = a_theta_bilinear(u1, u2);
    let r34 = re_product(u3, u4);
    let integrand: Vec<f64> = a12.iter().zip(&r34).map(|(a, b)| a * b).collect();
    let power = pair_power(u1, u2) + pair_power(u3, u4) + 2.0;
    let w = log_integral(u1, &integrand, power, variant);
    u5.mul_real(&w)
}

/// Full nonlinearity of `u` with its decomposition.
pub fn nonlinearity(u: &ComplexField, variant: AtVariant) -> NonlinearityBreakdown {
    let m = u.m() as f64;
    let n30 = n30(u, u, u);
    let n31 = n31(u, u, u);
    let n32 = n32(u, u, u, variant);
    let n51 = n51(u, u, u, u, u);
    let n52 = n52(u, u, u, u, u, variant);
    let values = (0..u.values().len())
        .map(|j| {
            n30.values()[j] + (n31.values()[j] + n32.values()[j]) * m + n51.values()[j] + n52.values()[j]
        })
        .collect();
    let total = u.with_values(values);
    NonlinearityBreakdown { n30, n31, n32, n51, n52, total }
}

/// `V_u u`, the nonlinearity assembled through the potential.
pub fn nonlinearity_via_potential(u: &ComplexField, variant: AtVariant) -> ComplexField {
    u.mul_real(&potential(u, variant))
}

/// The multilinear forms on six fields (only the first four enter `m40`, `m41`).
pub fn multilinear_forms(psi: [&ComplexField; 6]) -> MultilinearForms {
    let g = psi[0].grid();
    let r12 = re_product(psi[0], psi[1]);
    let r34 = re_product(psi[2], psi[3]);
    let r56 = re_product(psi[4], psi[5]);
    let a12 = a_theta_bilinear(psi[0], psi[1]);
    let a34 = a_theta_bilinear(psi[2], psi[3]);
    let p12 = pair_power(psi[0], psi[1]);
    let p34 = pair_power(psi[2], psi[3]);
    let p56 = pair_power(psi[4], psi[5]);
    let radii = g.radii();
    let f40: Vec<f64> = r12.iter().zip(&r34).map(|(a, b)| -0.25 * a * b).collect();
    let f41: Vec<f64> = (0..radii.len()).map(|j| a12[j] * r34[j] / (radii[j] * radii[j])).collect();
    let f6: Vec<f64> = (0..radii.len()).map(|j| 0.5 * a12[j] * a34[j] * r56[j] / (radii[j] * radii[j])).collect();
    MultilinearForms {
        m40: g.integrate(&f40, p12 + p34),
        m41: g.integrate(&f41, p12 + p34),
        m6: g.integrate(&f6, p12 + p34 + p56 + 2.0),
    }
}

/// `M[u] = ∫|u|²`.
pub fn mass(u: &ComplexField) -> f64 {
    u.l2_sq()
}

/// Bogomol'nyi operator `D_u u = ∂_r u − (m + A_θ[u]) u / r`.
pub fn bogomolnyi(u: &ComplexField) -> ComplexField {
    covariant_derivative(u, u)
}

/// `D_u w = ∂_r w − (m + A_θ[u]) w / r` with `m = w.m()`.
pub fn covariant_derivative(u: &ComplexField, w: &ComplexField) -> ComplexField {
    let a = a_theta(u);
    let m = w.m() as f64;
    let d = w.d_r();
    let values = (0..w.values().len())
        .map(|j| d.values()[j] - w.values()[j] * ((m + a[j]) / w.radii()[j]))
        .collect();
    w.with_values(values)
}

/// Energy of `u` in the requested quadrature form.
pub fn energy(u: &ComplexField, form: EnergyForm) -> f64 {
    let g = u.grid();
    let p = 2.0 * u.origin_power();
    match form {
        EnergyForm::SelfDual => {
            let d = bogomolnyi(u);
            0.5 * g.integrate(&d.abs2(), (p - 2.0).max(0.0))
        }
        EnergyForm::Coulomb => {
            let a = a_theta(u);
            let m = u.m() as f64;
            let d = u.d_r();
            let dens: Vec<f64> = (0..u.values().len())
                .map(|j| {
                    let r = u.radii()[j];
                    let v2 = u.values()[j].norm_sqr();
                    0.5 * d.values()[j].norm_sqr() + 0.5 * ((m + a[j]) / r).powi(2) * v2 - 0.25 * v2 * v2
                })
                .collect();
            g.integrate(&dens, (p - 2.0).max(0.0))
        }
    }
}

/// `L_u w = ∂_r w − (m + A_θ[u]) w / r + (u/r) ∫₀^r Re(ū w) r' dr'`.
pub fn l_op(u: &ComplexField, w: &ComplexField) -> ComplexField {
    let dw = covariant_derivative(u, w);
    let prod = re_product(u, w);
    let mem = u.grid().prefix(&prod, Measure::RdR, pair_power(u, w));
    let values = (0..w.values().len())
        .map(|j| dw.values()[j] + u.values()[j] * (mem[j] / u.radii()[j]))
        .collect();
    w.with_values(values)
}

/// `L_u* v = −∂_r v − (1 + m + A_θ[u]) v / r + u ∫_r^∞ Re(ū v) dr'`.
pub fn l_op_adjoint(u: &ComplexField, v: &ComplexField) -> ComplexField {
    let a = a_theta(u);
    let m = u.m() as f64;
    let dv = v.d_r();
    let prod = re_product(u, v);
    let tail = u.grid().suffix(&prod, Measure::Dr);
    let values = (0..v.values().len())
        .map(|j| {
            let r = v.radii()[j];
            -dv.values()[j] - v.values()[j] * ((1.0 + m + a[j]) / r) + u.values()[j] * tail[j]
        })
        .collect();
    ComplexField::new(v.grid().clone(), values, u.m())
}

/// `∇E[u] = −Δ^{(m)} u + 𝒩(u)` (standard gauge).
pub fn grad_energy(u: &ComplexField) -> ComplexField {
    let lap = u.laplacian();
    let n = nonlinearity_via_potential(u, AtVariant::Standard);
    n.sub(&lap)
}

/// `∇E[u]` assembled as `L_u* D_u u`.
pub fn grad_energy_self_dual(u: &ComplexField) -> ComplexField {
    l_op_adjoint(u, &bogomolnyi(u))
}

/// Virial rates `(4∫Im(ū r∂_r u), 4E[u])`.
pub fn virial_rates(u: &ComplexField) -> (f64, f64) {
    let rd = u.grid().r_d_r(u.values());
    let dens: Vec<f64> = u.values().iter().zip(&rd).map(|(a, b)| (a.conj() * b).im).collect();
    let first = 4.0 * u.grid().integrate(&dens, 2.0 * u.origin_power());
    (first, 4.0 * energy(u, EnergyForm::SelfDual))
}

/// `∫ r² |u|²`.
pub fn second_moment(u: &ComplexField) -> f64 {
    let dens: Vec<f64> = u.values().iter().zip(u.radii()).map(|(v, r)| v.norm_sqr() * r * r).collect();
    u.grid().integrate(&dens, 2.0 * u.origin_power() + 2.0)
}
