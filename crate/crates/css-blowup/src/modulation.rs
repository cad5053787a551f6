//! Blow-up rates, the formal modulation ODE, the decomposition
//! `u = e^{iγ_z}[(Q + ε)_{λ,γ} + z]`, refined parameters `b, η, ζ`, the
//! interaction term `R_{Q,z♭}`, the energy functional `ℰ` and the prescribed
//! initial data.

use crate::cutoff::CutoffSpec;
use crate::error::{CssError, Result};
use crate::field::ComplexField;
use crate::gauge::{self, AtVariant, EnergyForm};
use crate::grid::{Measure, RadialGrid};
use crate::ode::{self, Tolerances};
use crate::radiation::{Radiation, RadiationSpec};
use crate::soliton::{lin_ops, vortex_scaling_value, vortex_value, OrthoProfiles, RhoTable};
use crate::specfun::{cpow, gamma_complex};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `‖Q‖²_{L²} = 8π` for `m = 0`.
pub const VORTEX_MASS: f64 = 8.0 * PI;

/// Modulation parameters at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModState {
    /// Time `t < 0`.
    pub t: f64,
    /// Scale `λ > 0`.
    pub lambda: f64,
    /// Phase `γ`.
    pub gamma: f64,
    /// `b`.
    pub b: f64,
    /// `η`.
    pub eta: f64,
}

impl ModState {
    /// Complex scale `λ e^{iγ}`.
    pub fn scale(&self) -> Complex64 {
        Complex64::from_polar(self.lambda, self.gamma)
    }

    /// `b + iη`.
    pub fn b_complex(&self) -> Complex64 {
        Complex64::new(self.b, self.eta)
    }

    /// Self-similar truncation radius `B₀ = |t|^{1/2}/λ`.
    pub fn b0(&self) -> f64 {
        self.t.abs().sqrt() / self.lambda
    }
}

/// Leading-order complex scale and `b + iη` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupRates {
    /// `λ e^{iγ}`.
    pub scale: Complex64,
    /// `b + iη`.
    pub b: Complex64,
}

/// `|log|t||` for `t ∈ (−1, 0)`.
pub fn log_time(t: f64) -> Result<f64> {
    if !(t < 0.0 && t > -1.0) {
        return Err(CssError::InvalidParameter(format!("blow-up rates need −1 < t < 0, got {t}")));
    }
    Ok(-(-t).ln())
}

/// `p = ½ Γ(ν/2 + 2)`.
pub fn connection_constant(nu: Complex64) -> Result<Complex64> {
    Ok(0.5 * gamma_complex(nu / 2.0 + 2.0)?)
}

/// Closed-form rates
/// `λe^{iγ} = −(√2/4) Γ(ν/2)/(Re ν + 1) · q (4it)^{ν/2+1} / |log|t||` and
/// `b + iη = ½(ν/2 + 1) |Γ(ν/2)/(Re ν + 1)|² |q|² |4t|^{Re ν + 1} / |log|t||²`.
pub fn closed_form(q: Complex64, nu: Complex64, t: f64) -> Result<BlowupRates> {
    if q == c(0.0) || !(nu.re > 0.0) {
        return Err(CssError::InvalidParameter(format!("closed form needs q ≠ 0 and Re ν > 0 (q={q}, ν={nu})")));
    }
    let l = log_time(t)?;
    let g = gamma_complex(nu / 2.0)? / (nu.re + 1.0);
    let scale = -(2f64.sqrt() / 4.0) * g * q * cpow(Complex64::new(0.0, 4.0 * t), nu / 2.0 + 1.0) / l;
    let b = 0.5 * (nu / 2.0 + 1.0) * g.norm_sqr() * q.norm_sqr() * (4.0 * t.abs()).powf(nu.re + 1.0) / (l * l);
    Ok(BlowupRates { scale, b })
}

/// Closed-form rates as a [`ModState`].
pub fn closed_form_state(q: Complex64, nu: Complex64, t: f64) -> Result<ModState> {
    let r = closed_form(q, nu, t)?;
    Ok(ModState { t, lambda: r.scale.norm(), gamma: r.scale.arg(), b: r.b.re, eta: r.b.im })
}

/// `∂_t (λe^{iγ}) = (λe^{iγ}/t)(ν/2 + 1 + 1/|log|t||)` of the closed form.
pub fn closed_form_scale_derivative(q: Complex64, nu: Complex64, t: f64) -> Result<Complex64> {
    let r = closed_form(q, nu, t)?;
    let l = log_time(t)?;
    Ok(r.scale / t * (nu / 2.0 + 1.0 + 1.0 / l))
}

/// `|𝐛 + conj(𝛌) ∂_t 𝛌| / |𝐛|` for the closed form.
pub fn rate_consistency(q: Complex64, nu: Complex64, t: f64) -> Result<f64> {
    let r = closed_form(q, nu, t)?;
    let d = closed_form_scale_derivative(q, nu, t)?;
    Ok((r.b + r.scale.conj() * d).norm() / r.b.norm())
}

/// The forcing `Λ = λ³ e^{−iγ} 8√8π p q (4it)^{(ν−2)/2} / (4π log B₀)`.
fn forcing(q: Complex64, nu: Complex64, p: Complex64, t: f64, lambda: f64, gamma: f64, log_b0: f64) -> Complex64 {
    let amp = 8.0 * 8f64.sqrt() * PI * lambda.powi(3);
    amp * Complex64::from_polar(1.0, -gamma) * p * q * cpow(Complex64::new(0.0, 4.0 * t), (nu - 2.0) / 2.0)
        / (4.0 * PI * log_b0)
}

/// Integrate the modulation system
/// `λ_s/λ + b = 0, γ_s + η = 0, b_s + b² + η² + Re Λ = 0, η_s + Im Λ = 0`
/// in `t` (`ds = dt/λ²`) from `start` to `t_end`.
pub fn mod_ode_integrate(
    q: Complex64,
    nu: Complex64,
    start: ModState,
    t_end: f64,
    tol: Tolerances,
) -> Result<Vec<ModState>> {
    if !(start.lambda > 0.0) {
        return Err(CssError::StepFailure { t: start.t, reason: "λ ≤ 0".into() });
    }
    if !(t_end < 0.0) {
        return Err(CssError::InvalidParameter("modulation ODE is integrated at negative times".into()));
    }
    let p = connection_constant(nu)?;
    let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let lambda = y[0].exp();
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(CssError::StepFailure { t, reason: "λ ≤ 0".into() });
        }
        let log_b0 = (t.abs().sqrt() / lambda).ln();
        if !(log_b0 > 1.0) {
            return Err(CssError::StepFailure { t, reason: format!("log B₀ = {log_b0} ≤ 1") });
        }
        let (gamma, b, eta) = (y[1], y[2], y[3]);
        let f = forcing(q, nu, p, t, lambda, gamma, log_b0);
        let inv = 1.0 / (lambda * lambda);
        Ok(vec![-b * inv, -eta * inv, -(b * b + eta * eta + f.re) * inv, -f.im * inv])
    };
    let y0 = [start.lambda.ln(), start.gamma, start.b, start.eta];
    let tol = Tolerances { initial_step: tol.initial_step.min((t_end - start.t).abs() * 1e-4), ..tol };
    let traj = ode::integrate(rhs, start.t, &y0, t_end, tol)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| ModState { t, lambda: y[0].exp(), gamma: y[1], b: y[2], eta: y[3] })
        .collect())
}

/// Tolerances suited to the modulation system (relative control, negligible absolute floor).
pub fn modulation_tolerances() -> Tolerances {
    Tolerances { abs: 1e-300, rel: 1e-10, initial_step: 1e-8, min_step: 1e-300, max_steps: 2_000_000 }
}

/// Settings of the Newton decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    /// Convergence threshold on `max_k |(ε, 𝒵_k)_r|` in units of `‖Q‖²`.
    pub newton_tol: f64,
    /// Iteration cap.
    pub max_iterations: usize,
    /// Tube radius in units of `‖Q‖_{L²}`.
    pub tube: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { newton_tol: 1e-10, max_iterations: 50, tube: 0.3 }
    }
}

/// Fitted modulation parameters and remainder.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    /// Scale `λ`.
    pub lambda: f64,
    /// Phase `γ ∈ (−π, π]`.
    pub gamma: f64,
    /// Remainder `ε` on the renormalized grid `y = r/λ`.
    pub eps: ComplexField,
    /// `((ε, 𝒵₁)_r, (ε, 𝒵₂)_r)`.
    pub ortho_resid: [f64; 2],
    /// `‖ε‖_{L²}`.
    pub eps_l2: f64,
    /// `‖ε‖_{Ḣ¹}`.
    pub eps_h1: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_phase(g: f64) -> f64 {
    let w = g.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// The unmodulated part `e^{−iγ_z} u − z` on the physical grid.
pub(crate) fn soliton_part(u: &ComplexField, z: Option<&ComplexField>, gamma_z: f64) -> ComplexField {
    let rot = Complex64::from_polar(1.0, -gamma_z);
    let values = (0..u.values().len())
        .map(|j| rot * u.values()[j] - z.map_or(c(0.0), |z| z.values()[j]))
        .collect();
    ComplexField::new(u.grid().clone(), values, 0)
}

/// Decompose `u = e^{iγ_z}[(Q + ε)_{λ,γ} + z]` with `(ε, 𝒵₁)_r = (ε, 𝒵₂)_r = 0`
/// by Newton iteration on `(log λ, γ)` starting from `guess = (λ, γ)`.
pub fn decompose(
    u: &ComplexField,
    z: Option<&ComplexField>,
    gamma_z: f64,
    ortho: &OrthoProfiles,
    guess: (f64, f64),
    opts: DecomposeOptions,
) -> Result<DecompositionResult> {
    let w = soliton_part(u, z, gamma_z);
    let g = u.grid();
    let radii = g.radii();
    let tube_bound = opts.tube * VORTEX_MASS.sqrt();
    let distance = |lambda: f64, gamma: f64| {
        let ph = Complex64::from_polar(1.0 / lambda, gamma);
        let d: Vec<f64> =
            (0..radii.len()).map(|j| (w.values()[j] - ph * vortex_value(0, radii[j] / lambda)).norm_sqr()).collect();
        g.integrate(&d, 0.0).max(0.0).sqrt()
    };
    let (mut lambda, mut gamma) = guess;
    if !(lambda > 0.0) {
        return Err(CssError::InvalidParameter(format!("decomposition guess needs λ > 0, got {lambda}")));
    }
    let d0 = distance(lambda, gamma);
    if !(d0 < tube_bound) {
        return Err(CssError::TubeViolation { distance: d0, bound: tube_bound });
    }
    let threshold = opts.newton_tol * VORTEX_MASS;
    // (F, [∫ w̄ 𝒵_k(r/λ), ∫ w̄ Λ𝒵_k(r/λ)]) at (λ, γ).
    let evaluate = |lambda: f64, gamma: f64| {
        let ph = Complex64::from_polar(1.0 / lambda, gamma);
        let mut diff = [vec![c(0.0); radii.len()], vec![c(0.0); radii.len()]];
        let mut plain = [vec![c(0.0); radii.len()], vec![c(0.0); radii.len()]];
        let mut scaled = [vec![c(0.0); radii.len()], vec![c(0.0); radii.len()]];
        for (j, &r) in radii.iter().enumerate() {
            let y = r / lambda;
            if !(0.5..=4.0).contains(&y) {
                continue;
            }
            let wbar = w.values()[j].conj();
            let dbar = (w.values()[j] - ph * vortex_value(0, y)).conj();
            let profiles = [c(ortho.z1_value(y)), Complex64::new(0.0, ortho.z2_imag_value(y))];
            let scalings = [c(ortho.z1_scaling(y)), Complex64::new(0.0, ortho.z2_imag_scaling(y))];
            for k in 0..2 {
                diff[k][j] = dbar * profiles[k];
                plain[k][j] = wbar * profiles[k];
                scaled[k][j] = wbar * scalings[k];
            }
        }
        let e = Complex64::from_polar(1.0, gamma);
        let mut f = [0.0; 2];
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            f[k] = (e * g.integrate(&diff[k], 0.0)).re / lambda;
            jac[k][0] = -(e * g.integrate(&scaled[k], 0.0)).re / lambda;
            jac[k][1] = -(e * g.integrate(&plain[k], 0.0)).im / lambda;
        }
        (f, jac)
    };
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations <= opts.max_iterations {
        let (f, jac) = evaluate(lambda, gamma);
        residual = f[0].abs().max(f[1].abs());
        if residual <= threshold {
            break;
        }
        if iterations == opts.max_iterations {
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det.abs() > 1e-300) {
            return Err(CssError::IllConditioned(det));
        }
        let dl = (jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
        let dg = (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;
        lambda *= (-dl.clamp(-0.5, 0.5)).exp();
        gamma -= dg.clamp(-1.0, 1.0);
        iterations += 1;
    }
    if residual > threshold {
        return Err(CssError::NonConvergence { what: "modulation decomposition", iterations, residual });
    }
    let d = distance(lambda, gamma);
    if !(d < tube_bound) {
        return Err(CssError::TubeViolation { distance: d, bound: tube_bound });
    }
    let gamma = wrap_phase(gamma);
    let ygrid = Arc::new(g.scaled(1.0 / lambda));
    let back = Complex64::from_polar(lambda, -gamma);
    let eps_values = (0..radii.len()).map(|j| back * w.values()[j] - vortex_value(0, ygrid.radii()[j])).collect();
    let eps = ComplexField::new(ygrid.clone(), eps_values, 0);
    let (z1, z2) = ortho.fields(&ygrid);
    let norms = eps.norms();
    Ok(DecompositionResult {
        lambda,
        gamma,
        ortho_resid: [eps.real_inner(&z1), eps.real_inner(&z2)],
        eps_l2: norms.l2,
        eps_h1: norms.h1_dot,
        eps,
        iterations,
    })
}

/// Rebuild `e^{iγ_z}[(Q + ε)_{λ,γ} + z]` on the physical grid from a decomposition.
///
/// The physical grid is the renormalized grid scaled by `λ`, so no interpolation is involved.
pub fn reconstruct(dec: &DecompositionResult, z: Option<&ComplexField>, gamma_z: f64) -> ComplexField {
    let ygrid = dec.eps.grid();
    let grid = Arc::new(ygrid.scaled(dec.lambda));
    let ph = Complex64::from_polar(1.0 / dec.lambda, dec.gamma);
    let rot = Complex64::from_polar(1.0, gamma_z);
    let values = (0..grid.len())
        .map(|j| {
            let s = ph * (vortex_value(0, ygrid.radii()[j]) + dec.eps.values()[j]);
            rot * (s + z.map_or(c(0.0), |z| z.values()[j]))
        })
        .collect();
    ComplexField::new(grid, values, 0)
}

/// Exponents `(s_lo, s_hi)` of the averaging window `[B₀/L^{s_lo}, B₀/L^{s_hi}]`, `L = |log|t||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingWindow {
    /// Exponent of the lower end (default 1/5).
    pub lower: f64,
    /// Exponent of the upper end (default 1/10).
    pub upper: f64,
    /// Midpoint nodes in `log B`.
    pub nodes: usize,
}

impl Default for AveragingWindow {
    fn default() -> Self {
        Self { lower: 0.2, upper: 0.1, nodes: 16 }
    }
}

impl AveragingWindow {
    /// Validate `0 < upper < lower < 1/4`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.upper && self.upper < self.lower && self.lower < 0.25 && self.nodes > 0) {
            return Err(CssError::InvalidParameter(format!(
                "averaging exponents must satisfy 0 < upper < lower < 1/4 (got {} and {})",
                self.upper, self.lower
            )));
        }
        Ok(())
    }

    /// Midpoint nodes `B_i` and the normalized weight `∫ dB/B` of the window.
    pub fn nodes_for(&self, b0: f64, log_time: f64) -> (Vec<f64>, f64) {
        let lo = b0.ln() - self.lower * log_time.ln();
        let hi = b0.ln() - self.upper * log_time.ln();
        let step = (hi - lo) / self.nodes as f64;
        ((0..self.nodes).map(|i| (lo + (i as f64 + 0.5) * step).exp()).collect(), hi - lo)
    }
}

/// Refined modulation quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedParams {
    /// `b`.
    pub b: f64,
    /// `η`.
    pub eta: f64,
    /// `ζ`.
    pub zeta: Complex64,
    /// `[B_{−s_lo}, B_{−s_hi}]`.
    pub b_range: [f64; 2],
    /// `∫ dB/B` over the window.
    pub averaging_weight: f64,
    /// Averaged projected remainder `∫ χ_B |(L_Q ε)^⊥|²`.
    pub p_surrogate: f64,
    /// `B₀`.
    pub b0: f64,
}

/// `b`, `η`, `ζ` and the projected-remainder surrogate from a decomposition at time `t`.
pub fn refined_params(
    dec: &DecompositionResult,
    t: f64,
    window: AveragingWindow,
    rho: &RhoTable,
) -> Result<RefinedParams> {
    window.validate()?;
    let l = log_time(t)?;
    if !(l > 1.0) {
        return Err(CssError::InvalidParameter("refined parameters need |log|t|| > 1".into()));
    }
    let b0 = t.abs().sqrt() / dec.lambda;
    if !(b0 > 4.0) {
        return Err(CssError::InvalidParameter(format!("refined parameters need B₀ > 4, got {b0}")));
    }
    let eps = &dec.eps;
    let grid = eps.grid();
    let radii = grid.radii();
    let n = radii.len();
    let (nodes, weight) = window.nodes_for(b0, l);
    let cuts: Vec<CutoffSpec> = nodes.iter().map(|&b| CutoffSpec::new(b)).collect();
    let k = nodes.len() as f64;
    let mut chi_avg = vec![0.0; n];
    let mut rd1_avg = vec![0.0; n];
    for (j, &y) in radii.iter().enumerate() {
        for cut in &cuts {
            chi_avg[j] += cut.value(y) / k;
            rd1_avg[j] += cut.r_d1(y) / k;
        }
    }
    let q: Vec<f64> = radii.iter().map(|&y| vortex_value(0, y)).collect();
    let lq: Vec<f64> = radii.iter().map(|&y| vortex_scaling_value(0, y)).collect();
    let leps = eps.scaling_gen();
    let mk = |f: &dyn Fn(usize) -> Complex64| ComplexField::new(grid.clone(), (0..n).map(f).collect(), 0);
    let i_lambda_q = mk(&|j| I * (chi_avg[j] * lq[j] + 0.5 * rd1_avg[j] * q[j]));
    let i_lambda_eps = mk(&|j| I * (leps.values()[j] * chi_avg[j] + eps.values()[j] * (0.5 * rd1_avg[j])));
    let chi_q = mk(&|j| c(chi_avg[j] * q[j]));
    let chi_eps = mk(&|j| eps.values()[j] * chi_avg[j]);
    let denom = 4.0 * PI * b0.ln();
    let b = (eps.real_inner(&i_lambda_q) + 0.5 * eps.real_inner(&i_lambda_eps)) / denom;
    let eta = (eps.real_inner(&chi_q) + 0.5 * eps.real_inner(&chi_eps)) / denom;
    let cut0 = CutoffSpec::new(b0);
    let y2q = mk(&|j| c(0.25 * radii[j] * radii[j] * q[j] * cut0.value(radii[j])));
    let irho = mk(&|j| Complex64::new(0.0, rho.eval(radii[j]) * cut0.value(radii[j])));
    let scale = Complex64::from_polar(dec.lambda, dec.gamma);
    let zeta = scale * (1.0 + (eps.real_inner(&y2q) + I * eps.real_inner(&irho)) / denom);
    let lqe = lin_ops(0, grid).l(eps);
    let mut p_sum = 0.0;
    for &bb in &nodes {
        let half = CutoffSpec::new(0.5 * bb);
        let cut = CutoffSpec::new(bb);
        let phi = mk(&|j| c(half.value(radii[j]) * 0.5 * radii[j] * q[j]));
        let iphi = phi.times_i();
        let norm = phi.l2_sq();
        let c1 = lqe.real_inner(&phi) / norm;
        let c2 = lqe.real_inner(&iphi) / norm;
        let perp = lqe.axpby(c(1.0), &phi, c(-c1)).axpby(c(1.0), &iphi, c(-c2));
        let dens: Vec<f64> = (0..n).map(|j| cut.value(radii[j]) * perp.values()[j].norm_sqr()).collect();
        p_sum += grid.integrate(&dens, 0.0);
    }
    Ok(RefinedParams {
        b,
        eta,
        zeta,
        b_range: [b0 / l.powf(window.lower), b0 / l.powf(window.upper)],
        averaging_weight: weight,
        p_surrogate: p_sum / k,
        b0,
    })
}

/// The interaction term `R_{Q,z♭}` and its pairings.
#[derive(Clone, Debug)]
pub struct InteractionReport {
    /// `R_{Q,z♭}` on the renormalized grid.
    pub field: ComplexField,
    /// `(R, ΛQ)_r`.
    pub ip_lambda_q: f64,
    /// `(R, iQ)_r`.
    pub ip_iq: f64,
    /// Leading-order predictions `8√8π λ³ (Re, −Im)(e^{−iγ} p q (4it)^{(ν−2)/2})`.
    pub predicted: [f64; 2],
    /// `‖R‖_{L²}`.
    pub r_l2: f64,
}

/// Assemble `R_{Q,z♭}` from `z`, `z₁ = D_z z` (both on one physical grid) at time
/// `t` and modulation `(λ, γ)`. The renormalized grid is the physical grid scaled by `1/λ`.
pub fn interaction_rqz(
    spec: &RadiationSpec,
    z: &ComplexField,
    z1: &ComplexField,
    t: f64,
    lambda: f64,
    gamma: f64,
) -> Result<InteractionReport> {
    let ygrid = Arc::new(z.grid().scaled(1.0 / lambda));
    let radii = ygrid.radii();
    let n = radii.len();
    let rot = Complex64::from_polar(1.0, -gamma);
    let zb = ComplexField::new(ygrid.clone(), z.values().iter().map(|v| rot * lambda * v).collect(), 0);
    let z1b: Vec<Complex64> = z1.values().iter().map(|v| rot * lambda * lambda * v).collect();
    let q = ComplexField::from_real_fn(ygrid.clone(), 0, |y| vortex_value(0, y));
    let aq = gauge::a_theta(&q);
    let aqz = gauge::a_theta_bilinear(&q, &zb);
    let az = gauge::a_theta(&zb);
    let qz1: Vec<f64> = (0..n).map(|j| q.values()[j].re * z1b[j].re).collect();
    let tail = ygrid.suffix(&qz1, Measure::Dr);
    let zz1: Vec<f64> = (0..n).map(|j| (zb.values()[j].conj() * z1b[j]).re).collect();
    let head = ygrid.prefix(&zz1, Measure::Dr, 3.0);
    let inner = ComplexField::new(
        ygrid.clone(),
        (0..n)
            .map(|j| {
                let y = radii[j];
                -((2.0 * aqz[j] + az[j]) * q.values()[j] + (2.0 + aq[j] + 2.0 * aqz[j]) * zb.values()[j]) / y
            })
            .collect(),
        0,
    );
    let adj = gauge::l_op_adjoint(&q.add(&zb), &inner);
    let values = (0..n)
        .map(|j| {
            let y = radii[j];
            -(2.0 + aq[j]) * z1b[j] / y + tail[j] * q.values()[j] - 2.0 * aqz[j] * z1b[j] / y
                + tail[j] * zb.values()[j]
                - head[j] * q.values()[j]
                + adj.values()[j]
        })
        .collect();
    let field = ComplexField::new(ygrid.clone(), values, 0);
    let lq = ComplexField::from_real_fn(ygrid.clone(), 0, |y| vortex_scaling_value(0, y));
    let p = connection_constant(spec.nu)?;
    let lead = 8.0 * 8f64.sqrt() * PI * lambda.powi(3)
        * (rot * p * spec.q * cpow(Complex64::new(0.0, 4.0 * t), (spec.nu - 2.0) / 2.0));
    Ok(InteractionReport {
        ip_lambda_q: field.real_inner(&lq),
        ip_iq: field.real_inner(&q.times_i()),
        predicted: [lead.re, -lead.im],
        r_l2: field.l2(),
        field,
    })
}

/// `R_{Q,z♭}` along the closed-form trajectory at time `t`, on a log physical grid
/// with `nodes` points spanning `r ∈ [10⁻³ λ, 4]`.
pub fn interaction_on_closed_form(spec: &RadiationSpec, t: f64, nodes: usize) -> Result<(ModState, InteractionReport)> {
    let state = closed_form_state(spec.q, spec.nu, t)?;
    let grid = Arc::new(RadialGrid::log(nodes, 1e-3 * state.lambda, 4.0)?);
    let rad = Radiation::new(*spec, grid)?;
    let z = rad.z(t)?;
    let z1 = gauge::bogomolnyi(&z);
    let report = interaction_rqz(spec, &z, &z1, t, state.lambda, state.gamma)?;
    Ok((state, report))
}

/// Pieces of the energy functional `ℰ = E[u] − E[Q♯ + z] − (∇Ẽ[z], ε♯)_r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `ℰ`.
    pub cal_e: f64,
    /// `E[u]`.
    pub energy_u: f64,
    /// `E[Q♯ + z]`.
    pub energy_soliton_radiation: f64,
    /// `(∇Ẽ[z], ε♯)_r`.
    pub pairing: f64,
    /// `‖L_Q ε‖² / (2λ²)`.
    pub linearized: f64,
}

/// Evaluate `ℰ` for `u` on its physical grid, given the radiation `z`
/// (index `−2`), `γ_z` and a decomposition of `u` on the same grid.
pub fn energy_functional(
    u: &ComplexField,
    z: Option<&ComplexField>,
    gamma_z: f64,
    dec: &DecompositionResult,
) -> EnergyReport {
    let g = u.grid();
    let ph = Complex64::from_polar(1.0 / dec.lambda, dec.gamma);
    let q_sharp = ComplexField::from_fn(g.clone(), 0, |r| ph * vortex_value(0, r / dec.lambda));
    let z0 = z.map_or_else(|| ComplexField::zeros(g.clone(), 0), |z| ComplexField::new(g.clone(), z.values().to_vec(), 0));
    let qz = q_sharp.add(&z0);
    let u0 = ComplexField::new(g.clone(), u.values().to_vec(), 0);
    let eps_sharp = soliton_part(u, z, gamma_z).sub(&q_sharp);
    let pairing = match z {
        Some(z) => {
            let grad = gauge::nonlinearity(z, AtVariant::PhaseRotated).total.sub(&z.laplacian());
            let prod: Vec<f64> = (0..grad.values().len()).map(|j| (grad.values()[j].conj() * eps_sharp.values()[j]).re).collect();
            g.integrate(&prod, 0.0)
        }
        None => 0.0,
    };
    let energy_u = gauge::energy(&u0, EnergyForm::SelfDual);
    let energy_qz = gauge::energy(&qz, EnergyForm::SelfDual);
    let linearized = lin_ops(0, dec.eps.grid()).l(&dec.eps).l2_sq() / (2.0 * dec.lambda * dec.lambda);
    EnergyReport { cal_e: energy_u - energy_qz - pairing, energy_u, energy_soliton_radiation: energy_qz, pairing, linearized }
}

/// `ε_{q,ν}(τ) = b(−iy²Q/4)χ_{B₀} + η ρ χ_{B₀} − (1 − χ_{B₀}) Q` on `ygrid`, with the
/// closed-form state at `τ` and `B₀ = |τ|^{1/2}/λ`.
pub fn prescribed_eps(
    q: Complex64,
    nu: Complex64,
    tau: f64,
    ygrid: &Arc<RadialGrid>,
    rho: &RhoTable,
) -> Result<(ComplexField, ModState)> {
    let state = closed_form_state(q, nu, tau)?;
    let b0 = state.b0();
    if !(b0 > 10.0) {
        return Err(CssError::InvalidParameter(format!("prescribed data needs B₀ > 10, got {b0}")));
    }
    let cut = CutoffSpec::new(b0);
    let eps = ComplexField::from_fn(ygrid.clone(), 0, |y| {
        let qv = vortex_value(0, y);
        let x = cut.value(y);
        Complex64::new(state.eta * rho.eval(y) * x - (1.0 - x) * qv, -state.b * 0.25 * y * y * qv * x)
    });
    Ok((eps, state))
}

/// Prescribed initial data on the radiation's grid.
#[derive(Clone, Debug)]
pub struct PrescribedData {
    /// `u^{(τ)}(τ) = e^{iγ_z}[(Q + ε)_{λ,γ} + z]` on the physical grid.
    pub u: ComplexField,
    /// `ε_{q,ν}(τ)` on the renormalized grid.
    pub eps: ComplexField,
    /// Closed-form state at `τ`.
    pub state: ModState,
    /// `z(τ)` (index `−2`).
    pub z: ComplexField,
    /// `γ_z(τ)`.
    pub gamma_z: f64,
}

/// Build `u^{(τ)}(τ)` on the grid of `rad`.
pub fn initial_data(rad: &Radiation, tau: f64, rho: &RhoTable) -> Result<PrescribedData> {
    let spec = rad.spec();
    let state = closed_form_state(spec.q, spec.nu, tau)?;
    let ygrid = Arc::new(rad.grid().scaled(1.0 / state.lambda));
    let (eps, state) = prescribed_eps(spec.q, spec.nu, tau, &ygrid, rho)?;
    let z = rad.z(tau)?;
    let gamma_z = rad.gamma_z(tau)?;
    let ph = Complex64::from_polar(1.0 / state.lambda, state.gamma);
    let rot = Complex64::from_polar(1.0, gamma_z);
    let values = (0..ygrid.len())
        .map(|j| rot * (ph * (vortex_value(0, ygrid.radii()[j]) + eps.values()[j]) + z.values()[j]))
        .collect();
    let u = ComplexField::new(rad.grid().clone(), values, 0);
    Ok(PrescribedData { u, eps, state, z, gamma_z })
}

/// The quantities of the prescribed-data estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrescribedDiagnostics {
    /// `τ`.
    pub tau: f64,
    /// `B₀`.
    pub b0: f64,
    /// `(ε, iΛ_{B₀}Q)_r / (4π log B₀ · b)`.
    pub virial_ratio: f64,
    /// `(ε, χ_{B₀}Q)_r / (4π log B₀ · η)` (NaN when `η = 0`).
    pub mass_ratio: f64,
    /// `‖L_Q ε‖² / (4π log B₀ · |𝐛|²)`.
    pub linearized_ratio: f64,
    /// `‖ε‖² / b`.
    pub eps_l2_sq_over_b: f64,
    /// `((ε, 𝒵₁)_r, (ε, 𝒵₂)_r)`.
    pub ortho_resid: [f64; 2],
}

/// Evaluate the prescribed-data estimates at `τ` on `ygrid`.
pub fn prescribed_diagnostics(
    q: Complex64,
    nu: Complex64,
    tau: f64,
    ygrid: &Arc<RadialGrid>,
    rho: &RhoTable,
    ortho: &OrthoProfiles,
) -> Result<PrescribedDiagnostics> {
    let (eps, state) = prescribed_eps(q, nu, tau, ygrid, rho)?;
    let b0 = state.b0();
    let l = 4.0 * PI * b0.ln();
    let cut = CutoffSpec::new(b0);
    let q_field = ComplexField::from_real_fn(ygrid.clone(), 0, |y| vortex_value(0, y));
    let i_lambda_q = ComplexField::new(ygrid.clone(), ygrid.scaling_gen_trunc(q_field.values(), &cut), 0).times_i();
    let chi_q = q_field.map(|y, v| v * cut.value(y));
    let lq = lin_ops(0, ygrid).l(&eps).l2_sq();
    let (z1, z2) = ortho.fields(ygrid);
    Ok(PrescribedDiagnostics {
        tau,
        b0,
        virial_ratio: eps.real_inner(&i_lambda_q) / (l * state.b),
        mass_ratio: if state.eta == 0.0 { f64::NAN } else { eps.real_inner(&chi_q) / (l * state.eta) },
        linearized_ratio: lq / (l * state.b_complex().norm_sqr()),
        eps_l2_sq_over_b: eps.l2_sq() / state.b,
        ortho_resid: [eps.real_inner(&z1), eps.real_inner(&z2)],
    })
}
