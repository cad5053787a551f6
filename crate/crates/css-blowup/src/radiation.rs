//! The approximate radiation `z(t, r)` with `z(0) = q r^ν χ(r)` for the
//! phase-rotated equation with index `𝔪 = −2`, its expansion profiles, the
//! residual `Ψ_z`, the phase `γ_z`, the transform `u*` and the pseudoconformal map.

use crate::cutoff::{chi, chi_d1, chi_d2};
use crate::error::{CssError, Result};
use crate::field::ComplexField;
use crate::gauge::{self, AtVariant};
use crate::grid::RadialGrid;
use crate::quadrature::{composite, gauss_legendre};
use crate::specfun::{bessel_j2, rpow, series_coeffs, SelfSimilarProfile, SeriesKind, MAX_SERIES_ORDER};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Equivariance index of the radiation.
pub const FRAK_M: i32 = -2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Parameters of the radiation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiationSpec {
    /// Amplitude `q`.
    pub q: Complex64,
    /// Exponent `ν`, `Re ν > 0`.
    pub nu: Complex64,
    /// Expansion order `N = ⌊(Re ν + 1)/2⌋`.
    pub order: usize,
}

impl RadiationSpec {
    /// Validate `Re ν > 0` and derive the expansion order.
    pub fn new(q: Complex64, nu: Complex64) -> Result<Self> {
        if !(nu.re > 0.0) {
            return Err(CssError::InvalidParameter(format!("radiation needs Re ν > 0, got {nu}")));
        }
        let order = ((nu.re + 1.0) / 2.0).floor() as usize;
        Ok(Self { q, nu, order })
    }

    /// `z*(r) = q r^ν χ(r)`.
    pub fn initial_profile(&self, r: f64) -> Complex64 {
        if r <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.q * rpow(r, self.nu) * chi(r)
    }
}

/// `z` at one time with its Bogomol'nyi derivative and phase.
#[derive(Clone, Debug)]
pub struct RadiationField {
    /// Time `t ≠ 0`.
    pub t: f64,
    /// `z(t, ·)` (index `𝔪 = −2`).
    pub z: ComplexField,
    /// `z₁ = D_z z`.
    pub z1: ComplexField,
    /// `γ_z(t)`.
    pub gamma_z: f64,
}

/// Size of the residual `Ψ_z` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Time.
    pub t: f64,
    /// `‖Ψ_z‖_{L²}`.
    pub psi_z_l2: f64,
    /// `‖r^{−s}|Ψ_z|_{−1}‖_{L²}` for `s = 0` and `s = δ_z`.
    pub psi_z_weighted: [f64; 2],
    /// Weight exponent `δ_z`.
    pub delta_z: f64,
}

/// The expansion profiles `g_n`, `h_n` (`n = 0..=N`) and `P_lin,n` (`n = 0..N`).
#[derive(Clone, Debug)]
pub struct ExpansionProfiles {
    /// `g_0 = 0, g_1, …, g_N`.
    pub g: Vec<ComplexField>,
    /// `h_n = q c_n r^{ν−2n} χ + g_n`.
    pub h: Vec<ComplexField>,
    /// `P_lin,n = q c_n [Δ, χ] r^{ν−2n}`.
    pub p_lin: Vec<ComplexField>,
}

/// `[Δ, χ] f = χ″ f + χ′ (2 f′ + f/r)` from closed-form `f`, `f′`.
fn commutator(r: f64, f: Complex64, df: Complex64) -> Complex64 {
    chi_d2(r) * f + chi_d1(r) * (2.0 * df + f / r)
}

/// Ordered tuples of `k` nonnegative integers summing to `n`.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Cubic part `𝒩̊₃ = 𝒩₃,₀ + 𝔪(𝒩₃,₁ + 𝒩̊₃,₂)` on three arguments.
fn cubic(a: &ComplexField, b: &ComplexField, c: &ComplexField) -> ComplexField {
    let m = Complex64::new(FRAK_M as f64, 0.0);
    let lin = gauge::n31(a, b, c).add(&gauge::n32(a, b, c, AtVariant::PhaseRotated));
    gauge::n30(a, b, c).axpby(Complex64::new(1.0, 0.0), &lin, m)
}

/// Quintic part `𝒩₅,₁ + 𝒩̊₅,₂` on five arguments.
fn quintic(u: [&ComplexField; 5]) -> ComplexField {
    gauge::n51(u[0], u[1], u[2], u[3], u[4]).add(&gauge::n52(u[0], u[1], u[2], u[3], u[4], AtVariant::PhaseRotated))
}

/// Build `g_n`, `h_n`, `P_lin,n` on `grid` by the recursion
/// `g_{n+1} = (i/(n+1)) (Δ g_n + P_lin,n − Σ_{k∈{3,5}} Σ_{n₁+…+n_k=n} 𝒩̊_k(h_{n₁},…,h_{n_k}))`.
pub fn expansion_profiles(spec: &RadiationSpec, grid: &Arc<RadialGrid>) -> Result<ExpansionProfiles> {
    let big_n = spec.order;
    let coeffs = series_coeffs(SeriesKind::F1, spec.nu, FRAK_M, MAX_SERIES_ORDER.min(big_n + 1))?.coeffs;
    let power_term = |n: usize| {
        let k = spec.nu - 2.0 * n as f64;
        let qc = spec.q * coeffs[n];
        (qc, k)
    };
    let p_lin: Vec<ComplexField> = (0..big_n)
        .map(|n| {
            let (qc, k) = power_term(n);
            ComplexField::from_fn(grid.clone(), FRAK_M, |r| {
                let f = rpow(r, k);
                qc * commutator(r, f, k * f / r)
            })
        })
        .collect();
    let mut g = vec![ComplexField::zeros(grid.clone(), FRAK_M)];
    let mut h = Vec::new();
    let leading = |n: usize| {
        let (qc, k) = power_term(n);
        ComplexField::from_fn(grid.clone(), FRAK_M, move |r| qc * rpow(r, k) * chi(r))
    };
    h.push(leading(0));
    for n in 0..big_n {
        let mut rhs = g[n].laplacian().add(&p_lin[n]);
        for tuple in compositions(n, 3) {
            rhs = rhs.sub(&cubic(&h[tuple[0]], &h[tuple[1]], &h[tuple[2]]));
        }
        for tuple in compositions(n, 5) {
            rhs = rhs.sub(&quintic([&h[tuple[0]], &h[tuple[1]], &h[tuple[2]], &h[tuple[3]], &h[tuple[4]]]));
        }
        let next = rhs.scale(I / (n as f64 + 1.0));
        h.push(leading(n + 1).add(&next));
        g.push(next);
    }
    Ok(ExpansionProfiles { g, h, p_lin })
}

/// One time direction of the construction, valid for `T > 0`.
#[derive(Clone, Debug)]
struct Branch {
    spec: RadiationSpec,
    profile: SelfSimilarProfile,
    expansion: ExpansionProfiles,
}

impl Branch {
    fn new(spec: RadiationSpec, grid: &Arc<RadialGrid>) -> Result<Self> {
        Ok(Self { spec, profile: SelfSimilarProfile::new(spec.nu, FRAK_M)?, expansion: expansion_profiles(&spec, grid)? })
    }

    /// `q T^{ν/2} [F, F′, F″](r/√T)` and the derived linear pieces at `r`.
    fn linear_at(&self, tt: f64, r: f64) -> Result<[Complex64; 3]> {
        if r >= 2.0 {
            return Ok([Complex64::new(0.0, 0.0); 3]);
        }
        let s = tt.sqrt();
        let [f, df, d2f] = self.profile.eval(r / s)?;
        let amp = self.spec.q * rpow(tt, self.spec.nu / 2.0);
        Ok([amp * f, amp * df / s, amp * d2f / tt])
    }

    fn z_lin_hat(&self, tt: f64, grid: &Arc<RadialGrid>) -> Result<ComplexField> {
        let values = grid
            .radii()
            .iter()
            .map(|&r| Ok(self.linear_at(tt, r)?[0] * chi(r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexField::new(grid.clone(), values, FRAK_M))
    }

    /// `Σ_{n≥1} T^n g_n` and `Σ n T^{n−1} g_n`.
    fn correction_sums(&self, tt: f64) -> (ComplexField, ComplexField) {
        let g = &self.expansion.g;
        let mut sum = g[0].clone();
        let mut dsum = g[0].clone();
        for (n, gn) in g.iter().enumerate().skip(1) {
            sum = sum.axpby(Complex64::new(1.0, 0.0), gn, Complex64::new(tt.powi(n as i32), 0.0));
            dsum = dsum.axpby(Complex64::new(1.0, 0.0), gn, Complex64::new(n as f64 * tt.powi(n as i32 - 1), 0.0));
        }
        (sum, dsum)
    }

    fn z(&self, tt: f64, grid: &Arc<RadialGrid>) -> Result<ComplexField> {
        let lin = self.z_lin_hat(tt, grid)?;
        if self.spec.order == 0 {
            return Ok(lin);
        }
        let (sum, _) = self.correction_sums(tt);
        let s = tt.sqrt();
        let values = (0..grid.len())
            .map(|j| lin.values()[j] + sum.values()[j] * (1.0 - chi(grid.radii()[j] / s)))
            .collect();
        Ok(lin.with_values(values))
    }

    fn dt_z(&self, tt: f64, grid: &Arc<RadialGrid>) -> Result<ComplexField> {
        let s = tt.sqrt();
        let half_nu = self.spec.nu / 2.0;
        let amp = self.spec.q * rpow(tt, half_nu - 1.0);
        let (sum, dsum) = self.correction_sums(tt);
        let values = grid
            .radii()
            .iter()
            .enumerate()
            .map(|(j, &r)| {
                let mut v = Complex64::new(0.0, 0.0);
                if r < 2.0 {
                    let y = r / s;
                    let [f, df, _] = self.profile.eval(y)?;
                    v += amp * (half_nu * f - 0.5 * y * df) * chi(r);
                }
                if self.spec.order > 0 {
                    let y = r / s;
                    let ext = 1.0 - chi(y);
                    let dt_ext = chi_d1(y) * y / (2.0 * tt);
                    v += ext * dsum.values()[j] + dt_ext * sum.values()[j];
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexField::new(grid.clone(), values, FRAK_M))
    }

    /// `Ψ = i∂_T z + Δz − 𝒩̊(z)` with the linear part in closed form.
    fn psi(&self, tt: f64, grid: &Arc<RadialGrid>) -> Result<ComplexField> {
        let z = self.z(tt, grid)?;
        let s = tt.sqrt();
        let mut values = grid
            .radii()
            .iter()
            .map(|&r| {
                let [f, df, _] = self.linear_at(tt, r)?;
                Ok(commutator(r, f, df))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.spec.order > 0 {
            let (sum, dsum) = self.correction_sums(tt);
            let dsum_r = sum.d_r();
            let lap = sum.laplacian();
            for (j, v) in values.iter_mut().enumerate() {
                let r = grid.radii()[j];
                let y = r / s;
                let ext = 1.0 - chi(y);
                let d1 = -chi_d1(y) / s;
                let d2 = -chi_d2(y) / tt;
                let dt_ext = chi_d1(y) * y / (2.0 * tt);
                let g = sum.values()[j];
                *v += I * (ext * dsum.values()[j] + dt_ext * g)
                    + ext * lap.values()[j]
                    + d2 * g
                    + d1 * (2.0 * dsum_r.values()[j] + g / r);
            }
        }
        let nl = gauge::nonlinearity(&z, AtVariant::PhaseRotated).total;
        Ok(z.with_values(values).sub(&nl))
    }
}

/// The radiation on a fixed grid, both time directions.
///
/// For `t > 0` the construction uses `(q, ν)` directly; for `t < 0` it is
/// `z(t) = conj(Z(|t|))` with `Z` built from `(q̄, ν̄)`.
#[derive(Clone, Debug)]
pub struct Radiation {
    spec: RadiationSpec,
    grid: Arc<RadialGrid>,
    forward: Branch,
    backward: Branch,
    theta_at_zero: f64,
}

const GAMMA_LEVELS: usize = 40;
const GAMMA_NODES: usize = 8;

impl Radiation {
    /// Build both branches on `grid`.
    pub fn new(spec: RadiationSpec, grid: Arc<RadialGrid>) -> Result<Self> {
        let forward = Branch::new(spec, &grid)?;
        let back_spec = RadiationSpec { q: spec.q.conj(), nu: spec.nu.conj(), order: spec.order };
        let backward = Branch::new(back_spec, &grid)?;
        let zstar = ComplexField::from_fn(grid.clone(), FRAK_M, |r| spec.initial_profile(r));
        let theta_at_zero = gauge::theta_z(&zstar);
        Ok(Self { spec, grid, forward, backward, theta_at_zero })
    }

    /// Parameters.
    pub fn spec(&self) -> &RadiationSpec {
        &self.spec
    }

    /// Working grid.
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Fitted connection `(α, κ)` of the forward branch.
    pub fn connection(&self) -> &crate::specfun::Connection {
        &self.forward.profile.connection
    }

    /// Expansion profiles of the branch serving time `t`.
    pub fn expansion(&self, t: f64) -> &ExpansionProfiles {
        &self.branch(t).expansion
    }

    fn branch(&self, t: f64) -> &Branch {
        if t > 0.0 {
            &self.forward
        } else {
            &self.backward
        }
    }

    fn orient(&self, t: f64, f: ComplexField) -> ComplexField {
        if t > 0.0 {
            f
        } else {
            f.map(|_, v| v.conj())
        }
    }

    fn check_time(t: f64) -> Result<()> {
        if t == 0.0 || !t.is_finite() {
            return Err(CssError::InvalidParameter(format!("radiation needs t ≠ 0, got {t}")));
        }
        Ok(())
    }

    /// `z*(r) = q r^ν χ(r)` on the grid.
    pub fn initial_data(&self) -> ComplexField {
        ComplexField::from_fn(self.grid.clone(), FRAK_M, |r| self.spec.initial_profile(r))
    }

    /// `ẑ_lin(t, ·)`.
    pub fn z_lin_hat(&self, t: f64) -> Result<ComplexField> {
        Self::check_time(t)?;
        Ok(self.orient(t, self.branch(t).z_lin_hat(t.abs(), &self.grid)?))
    }

    /// `z(t, ·) = ẑ_lin + χ_{r ≳ |t|^{1/2}} Σ t^n g_n` (phase-rotated variable).
    pub fn z(&self, t: f64) -> Result<ComplexField> {
        Self::check_time(t)?;
        Ok(self.orient(t, self.branch(t).z(t.abs(), &self.grid)?))
    }

    /// `∂_t z(t, ·)` in closed form.
    pub fn dt_z(&self, t: f64) -> Result<ComplexField> {
        Self::check_time(t)?;
        let d = self.branch(t).dt_z(t.abs(), &self.grid)?;
        Ok(if t > 0.0 { d } else { d.map(|_, v| -v.conj()) })
    }

    /// `∂_t z` by the fourth-order central difference with step `h < |t|/2`.
    pub fn dt_z_fd(&self, t: f64, h: f64) -> Result<ComplexField> {
        let zp = self.z(t + h)?;
        let zm = self.z(t - h)?;
        let zpp = self.z(t + 2.0 * h)?;
        let zmm = self.z(t - 2.0 * h)?;
        let values = (0..self.grid.len())
            .map(|j| {
                (8.0 * (zp.values()[j] - zm.values()[j]) - (zpp.values()[j] - zmm.values()[j])) / (12.0 * h)
            })
            .collect();
        Ok(zp.with_values(values))
    }

    /// `Ψ_z = i∂_t z + Δ^{(𝔪)} z − 𝒩̊(z)`.
    pub fn psi(&self, t: f64) -> Result<ComplexField> {
        Self::check_time(t)?;
        Ok(self.orient(t, self.branch(t).psi(t.abs(), &self.grid)?))
    }

    /// `Ψ_z` assembled from the finite-difference time derivative.
    pub fn psi_fd(&self, t: f64, h: f64) -> Result<ComplexField> {
        let z = self.z(t)?;
        let dt = self.dt_z_fd(t, h)?;
        let nl = gauge::nonlinearity(&z, AtVariant::PhaseRotated).total;
        Ok(dt.times_i().add(&z.laplacian()).sub(&nl))
    }

    /// Residual norms at `t`.
    pub fn residual_report(&self, t: f64, delta_z: f64) -> Result<ResidualReport> {
        let psi = self.psi(t)?;
        let l2 = psi.l2();
        let dr = psi.d_r();
        let weighted = |s: f64| {
            let dens: Vec<f64> = (0..psi.values().len())
                .map(|j| {
                    let r = psi.radii()[j];
                    (dr.values()[j].norm().max(psi.values()[j].norm() / r) * r.powf(-s)).powi(2)
                })
                .collect();
            self.grid.integrate(&dens, 0.0).max(0.0).sqrt()
        };
        Ok(ResidualReport { t, psi_z_l2: l2, psi_z_weighted: [weighted(0.0), weighted(delta_z)], delta_z })
    }

    /// `θ_z(t) = −∫₀^∞ (𝔪 + A_θ[z])|z|² dr/r`.
    pub fn theta_z(&self, t: f64) -> Result<f64> {
        Ok(gauge::theta_z(&self.z(t)?))
    }

    /// `γ_z(t) = −∫₀^t θ_z(t′) dt′` by Gauss–Legendre on the dyadic ladder `[t 2^{−k−1}, t 2^{−k}]`.
    pub fn gamma_z(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let (x, w) = gauss_legendre(GAMMA_NODES);
        let mut integral = 0.0;
        for k in 0..GAMMA_LEVELS {
            let hi = t * 0.5f64.powi(k as i32);
            let lo = 0.5 * hi;
            for (xi, wi) in x.iter().zip(&w) {
                let tk = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xi;
                integral += 0.5 * (hi - lo) * wi * self.theta_z(tk)?;
            }
        }
        integral += self.theta_at_zero * t * 0.5f64.powi(GAMMA_LEVELS as i32);
        Ok(-integral)
    }

    /// `z(t)` with `z₁ = D_z z` and `γ_z(t)`.
    pub fn field(&self, t: f64) -> Result<RadiationField> {
        let z = self.z(t)?;
        let z1 = gauge::bogomolnyi(&z);
        Ok(RadiationField { t, z, z1, gamma_z: self.gamma_z(t)? })
    }
}

/// `ẑ_lin(t, ·)` on `grid`.
pub fn z_lin_hat(spec: &RadiationSpec, t: f64, grid: &Arc<RadialGrid>) -> Result<ComplexField> {
    Radiation::new(*spec, grid.clone())?.z_lin_hat(t)
}

/// `z(t, ·)` with `z₁` and `γ_z`.
pub fn z_full(spec: &RadiationSpec, t: f64, grid: &Arc<RadialGrid>) -> Result<RadiationField> {
    Radiation::new(*spec, grid.clone())?.field(t)
}

/// Residual norms of `Ψ_z` at `t` (with `δ_z = 0.01`).
pub fn psi_z(spec: &RadiationSpec, t: f64, grid: &Arc<RadialGrid>) -> Result<ResidualReport> {
    Radiation::new(*spec, grid.clone())?.residual_report(t, 0.01)
}

const HANKEL_ORDER: usize = 10;

/// `T f(ρ) = −(i/2) ∫₀^{R} J₂(ρr/2) f(r) r dr` by composite Gauss–Legendre with panels resolving the oscillation.
pub fn hankel_map(f: impl Fn(f64) -> Complex64, support: f64, rho: f64) -> Complex64 {
    let panels = ((support * rho.abs() / 4.0).ceil() as usize).max(16);
    let (x, w) = composite(0.0, support, panels, HANKEL_ORDER);
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, wr) in x.iter().zip(&w) {
        acc += f(*r) * (bessel_j2(0.5 * rho * r) * r * wr);
    }
    -0.5 * I * acc
}

/// `u*(ρ) = −(i/2) ∫₀^∞ J₂(ρr/2) z*(r) r dr` sampled at the radii of `grid` (read as `ρ`).
pub fn u_star(spec: &RadiationSpec, grid: &Arc<RadialGrid>) -> ComplexField {
    ComplexField::from_fn(grid.clone(), FRAK_M, |rho| hankel_map(|r| spec.initial_profile(r), 2.0, rho))
}

/// Apply the transform twice: first to `z*` (support `[0, 2]`), then to the
/// result over `ρ ∈ [0, rho_max]`, evaluated at `radii`.
pub fn double_transform(spec: &RadiationSpec, rho_max: f64, radii: &[f64]) -> Vec<Complex64> {
    let panels = (rho_max / 0.5).ceil() as usize;
    let (x, w) = composite(0.0, rho_max, panels, HANKEL_ORDER);
    let u: Vec<Complex64> = x.iter().map(|&rho| hankel_map(|r| spec.initial_profile(r), 2.0, rho)).collect();
    radii
        .iter()
        .map(|&r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((rho, wr), uv) in x.iter().zip(&w).zip(&u) {
                acc += uv * (bessel_j2(0.5 * rho * r) * rho * wr);
            }
            -0.5 * I * acc
        })
        .collect()
}

/// Pseudoconformal transform: `[𝒞u](t′, r) = |t′|^{−1} e^{ir²/(4t′)} u(r/|t′|)` with `t′ = −1/t`.
pub fn pseudoconformal(u: &ComplexField, t: f64) -> Result<(ComplexField, f64)> {
    if t == 0.0 || !t.is_finite() {
        return Err(CssError::InvalidParameter("pseudoconformal transform needs t ≠ 0".into()));
    }
    let tp = -1.0 / t;
    let g = u.grid();
    let values = g
        .radii()
        .iter()
        .map(|&r| {
            let phase = Complex64::from_polar(1.0 / tp.abs(), r * r / (4.0 * tp));
            phase * g.interpolate(u.values(), r / tp.abs(), u.origin_power())
        })
        .collect();
    Ok((ComplexField::new(g.clone(), values, u.m()), tp))
}
