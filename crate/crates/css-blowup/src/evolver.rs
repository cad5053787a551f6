//! Strang-split Crank–Nicolson time stepping for the equivariant CSS equation,
//! conservation diagnostics and the blow-up tracking experiment.

use crate::cutoff::chi;
use crate::error::{CssError, Result};
use crate::field::ComplexField;
use crate::gauge::{self, AtVariant, EnergyForm};
use crate::grid::{RadialGrid, Spacing};
use crate::modulation::{
    closed_form_state, decompose, soliton_part, energy_functional, initial_data, refined_params, AveragingWindow, DecomposeOptions,
};
use crate::radiation::{Radiation, RadiationSpec};
use crate::soliton::{build_ortho_profiles, vortex_value, RhoTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Time-stepping configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolverConfig {
    /// Largest step.
    pub dt_max: f64,
    /// Step factor `c` in `dt = min(dt_max, c λ²)`.
    pub c_cfl: f64,
    /// Gauge of the temporal potential (standard for the CSS equation, phase-rotated for the radiation equation).
    pub variant: AtVariant,
    /// Fraction of the domain (at the outer end) occupied by the sponge.
    pub sponge_width: f64,
    /// Damping rate of the sponge (0 disables it).
    pub sponge_rate: f64,
    /// Steps between diagnostics rows.
    pub monitor_stride: usize,
    /// Abort when `|M(t) − M₀|/M₀` exceeds this budget.
    pub mass_budget: f64,
    /// Abort after this many steps of a single [`evolve`] call.
    pub max_steps: Option<usize>,
}

impl Default for EvolverConfig {
    fn default() -> Self {
        Self {
            dt_max: 1e-4,
            c_cfl: 0.1,
            variant: AtVariant::Standard,
            sponge_width: 0.1,
            sponge_rate: 0.0,
            monitor_stride: 100,
            mass_budget: 1e-3,
            max_steps: None,
        }
    }
}

impl EvolverConfig {
    /// Step for a soliton of scale `lambda_est`.
    pub fn dt_for(&self, lambda_est: f64) -> f64 {
        self.dt_max.min(self.c_cfl * lambda_est * lambda_est)
    }

    /// Reject nonpositive steps and out-of-range sponge widths.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0 && self.c_cfl > 0.0) {
            return Err(CssError::InvalidParameter("dt_max and c_cfl must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.sponge_width) || self.sponge_rate < 0.0 {
            return Err(CssError::InvalidParameter("sponge width must lie in [0, 1) and its rate be nonnegative".into()));
        }
        if self.monitor_stride == 0 {
            return Err(CssError::InvalidParameter("monitor stride must be positive".into()));
        }
        Ok(())
    }
}

/// Monitored quantities at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    /// Time.
    pub t: f64,
    /// `M[u]`.
    pub mass: f64,
    /// `E[u]`.
    pub energy: f64,
    /// `∫ r²|u|²`.
    pub second_moment: f64,
    /// `4 ∫ Im(ū r∂_r u)`.
    pub virial_rate: f64,
}

impl DiagnosticsRow {
    /// Diagnostics of `u` at `t`.
    pub fn of(t: f64, u: &ComplexField) -> Self {
        let (virial_rate, _) = gauge::virial_rates(u);
        Self {
            t,
            mass: gauge::mass(u),
            energy: gauge::energy(u, EnergyForm::SelfDual),
            second_moment: gauge::second_moment(u),
            virial_rate,
        }
    }
}

/// A running simulation.
#[derive(Clone, Debug)]
pub struct SimulationState {
    /// Current time.
    pub t: f64,
    /// Current field.
    pub u: ComplexField,
    /// `M[u]` at the start.
    pub mass0: f64,
    /// `E[u]` at the start.
    pub energy0: f64,
    /// Diagnostics rows (the first is the initial state).
    pub rows: Vec<DiagnosticsRow>,
    /// Steps taken.
    pub steps: usize,
}

impl SimulationState {
    /// Start at time `t` with field `u`.
    pub fn new(t: f64, u: ComplexField) -> Self {
        let row = DiagnosticsRow::of(t, &u);
        Self { t, mass0: row.mass, energy0: row.energy, rows: vec![row], u, steps: 0 }
    }
}

/// Tridiagonal matrix stored by bands (`lower[0]` and `upper[n−1]` unused).
#[derive(Clone, Debug, Default)]
struct Tridiagonal {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    fn zeros(n: usize) -> Self {
        Self { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * u[j];
                if j > 0 {
                    s += self.lower[j] * u[j - 1];
                }
                if j + 1 < n {
                    s += self.upper[j] * u[j + 1];
                }
                s
            })
            .collect()
    }
}

/// Linear propagator of `i∂_t u + Δ^{(m)} u = 0` in the generalized form
/// `i M W ∂_t u = −K u` with `K` symmetric, `M` tridiagonal and `W` a positive diagonal weight.
///
/// On log grids `K = T − m²M` with `T` the three-point second difference in `x = log r`
/// and `M = I + (h²/12) T`, a fourth-order compact discretization in which `M`
/// commutes with `T`, so the Crank–Nicolson step conserves `Σ W_j |u_j|²` exactly.
/// On uniform grids the stencil is the second-order flux form with `M = I`.
/// Boundary rows: homogeneous Dirichlet at `r_max`; at the inner end zero flux
/// for `m = 0` (node 0 then carries the volume of the disk inside it) and a zero
/// ghost value otherwise.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Arc<RadialGrid>,
    m: i32,
    variant: AtVariant,
    weight: Vec<f64>,
    mass_matrix: Tridiagonal,
    stiffness: Tridiagonal,
    sponge: Vec<f64>,
    sponge_rate: f64,
}

impl Stepper {
    /// Build the linear operator on `grid` for index `m`.
    pub fn new(grid: Arc<RadialGrid>, m: i32, config: &EvolverConfig) -> Result<Self> {
        config.validate()?;
        let r = grid.radii();
        let n = r.len();
        let h = grid.step();
        let m2 = (m * m) as f64;
        let neumann = m == 0;
        let mut weight: Vec<f64>;
        let mut mass_matrix = Tridiagonal::zeros(n);
        let mut stiffness = Tridiagonal::zeros(n);
        match grid.spacing() {
            Spacing::Log => {
                let mut second = Tridiagonal::zeros(n);
                let k = 1.0 / (h * h);
                for j in 0..n {
                    second.diag[j] = if j == 0 && neumann { -k } else { -2.0 * k };
                    second.lower[j] = if j > 0 { k } else { 0.0 };
                    second.upper[j] = if j + 1 < n { k } else { 0.0 };
                }
                for j in 0..n {
                    let c = h * h / 12.0;
                    mass_matrix.diag[j] = 1.0 + c * second.diag[j];
                    mass_matrix.lower[j] = c * second.lower[j];
                    mass_matrix.upper[j] = c * second.upper[j];
                    stiffness.diag[j] = second.diag[j] - m2 * mass_matrix.diag[j];
                    stiffness.lower[j] = second.lower[j] - m2 * mass_matrix.lower[j];
                    stiffness.upper[j] = second.upper[j] - m2 * mass_matrix.upper[j];
                }
                weight = r.iter().map(|x| x * x).collect();
                if neumann {
                    weight[0] *= 0.5 + 0.5 / h;
                }
            }
            Spacing::Uniform => {
                let face = |j: usize| (r[0] + (j as f64 - 0.5) * h).max(0.0) / (h * h);
                for (j, &rj) in r.iter().enumerate() {
                    let inner = if j == 0 && neumann { 0.0 } else { face(j) };
                    mass_matrix.diag[j] = 1.0;
                    stiffness.diag[j] = -(inner + face(j + 1)) - m2 / rj;
                    stiffness.lower[j] = if j > 0 { face(j) } else { 0.0 };
                    stiffness.upper[j] = if j + 1 < n { face(j + 1) } else { 0.0 };
                }
                weight = r.to_vec();
                if neumann {
                    weight[0] = 0.5 * (r[0] + 0.5 * h).powi(2) / h;
                }
            }
        }
        let r_max = grid.r_max();
        let start = (1.0 - config.sponge_width) * r_max;
        let sponge = r
            .iter()
            .map(|&x| {
                if config.sponge_width == 0.0 || x <= start {
                    0.0
                } else {
                    let s = (x - start) / (r_max - start);
                    s * s
                }
            })
            .collect();
        Ok(Self {
            grid,
            m,
            variant: config.variant,
            weight,
            mass_matrix,
            stiffness,
            sponge,
            sponge_rate: config.sponge_rate,
        })
    }

    /// Working grid.
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Discrete mass `Σ W_j |u_j|²` conserved exactly by the linear substep.
    pub fn discrete_mass(&self, u: &[Complex64]) -> f64 {
        u.iter().zip(&self.weight).map(|(v, w)| w * v.norm_sqr()).sum()
    }

    /// `u ← e^{−i τ V_u} u` with the frozen real potential.
    pub fn phase_step(&self, u: &mut ComplexField, tau: f64) {
        if tau == 0.0 {
            return;
        }
        let v = gauge::potential(u, self.variant);
        for (x, p) in u.values_mut().iter_mut().zip(&v) {
            *x *= Complex64::from_polar(1.0, -tau * p);
        }
    }

    /// Crank–Nicolson step `(MW − iθK) u⁺ = (MW + iθK) u`, `θ = dt/2`.
    pub fn linear_step(&self, u: &mut ComplexField, dt: f64) -> Result<()> {
        let n = self.weight.len();
        let theta = Complex64::new(0.0, 0.5 * dt);
        let wu: Vec<Complex64> = u.values().iter().zip(&self.weight).map(|(v, w)| v * w).collect();
        let mw = self.mass_matrix.apply(&wu);
        let ku = self.stiffness.apply(u.values());
        let rhs: Vec<Complex64> = mw.iter().zip(&ku).map(|(a, b)| a + theta * b).collect();
        let mm = &self.mass_matrix;
        let kk = &self.stiffness;
        let zero = Complex64::new(0.0, 0.0);
        let mut c_prime = vec![zero; n];
        let mut d_prime = vec![zero; n];
        for j in 0..n {
            let a = if j > 0 { mm.lower[j] * self.weight[j - 1] - theta * kk.lower[j] } else { zero };
            let b = mm.diag[j] * self.weight[j] - theta * kk.diag[j];
            let c = if j + 1 < n { mm.upper[j] * self.weight[j + 1] - theta * kk.upper[j] } else { zero };
            let (cp, dp) = if j > 0 { (c_prime[j - 1], d_prime[j - 1]) } else { (zero, zero) };
            let pivot = b - a * cp;
            if !(pivot.norm() > 1e-300) {
                return Err(CssError::SolverBreakdown(pivot.norm()));
            }
            c_prime[j] = c / pivot;
            d_prime[j] = (rhs[j] - a * dp) / pivot;
        }
        let out = u.values_mut();
        out[n - 1] = d_prime[n - 1];
        for j in (0..n - 1).rev() {
            out[j] = d_prime[j] - c_prime[j] * out[j + 1];
        }
        Ok(())
    }

    fn damp(&self, u: &mut ComplexField, dt: f64) {
        if self.sponge_rate == 0.0 {
            return;
        }
        for (x, s) in u.values_mut().iter_mut().zip(&self.sponge) {
            *x *= 1.0 - (self.sponge_rate * dt.abs() * s).min(1.0);
        }
    }

    /// One Strang step: half phase, linear step, half phase (re-evaluated potential).
    pub fn step(&self, u: &mut ComplexField, dt: f64) -> Result<()> {
        self.phase_step(u, 0.5 * dt);
        self.linear_step(u, dt)?;
        self.phase_step(u, 0.5 * dt);
        self.damp(u, dt);
        Ok(())
    }

    /// Equation index.
    pub fn m(&self) -> i32 {
        self.m
    }
}

/// One Strang step of `u` with index `u.m()`.
pub fn step(u: &ComplexField, dt: f64, config: &EvolverConfig) -> Result<ComplexField> {
    let stepper = Stepper::new(u.grid().clone(), u.m(), config)?;
    let mut out = u.clone();
    stepper.step(&mut out, dt)?;
    Ok(out)
}

/// March `state` to `t_end` with steps `dt = min(dt_max, c λ_est²)` (negative for backward time),
/// recording diagnostics every `monitor_stride` steps and at the end.
///
/// The trailing half phase rotation of one Strang step and the leading one of the
/// next act with the same potential (a phase rotation leaves `|u|` unchanged), so
/// they are applied as a single rotation; the field is synchronized at every
/// diagnostics row.
pub fn evolve(
    state: &mut SimulationState,
    stepper: &Stepper,
    t_end: f64,
    config: &EvolverConfig,
    lambda_est: impl Fn(f64) -> f64,
) -> Result<()> {
    let dir = if t_end >= state.t { 1.0 } else { -1.0 };
    let budget = config.max_steps.unwrap_or(usize::MAX);
    let mut taken = 0usize;
    let mut owed = 0.0;
    while (t_end - state.t) * dir > 1e-15 * t_end.abs().max(1.0) {
        if taken == budget {
            stepper.phase_step(&mut state.u, owed);
            return Err(CssError::Divergence(format!("step budget {budget} exhausted at t = {}", state.t)));
        }
        taken += 1;
        let dt = config.dt_for(lambda_est(state.t)).min((t_end - state.t).abs());
        let last = (t_end - state.t).abs() <= dt;
        let signed = dir * dt;
        stepper.phase_step(&mut state.u, owed + 0.5 * signed);
        stepper.linear_step(&mut state.u, signed)?;
        stepper.damp(&mut state.u, signed);
        owed = 0.5 * signed;
        state.t = if last { t_end } else { state.t + signed };
        state.steps += 1;
        if state.steps % config.monitor_stride == 0 || last {
            stepper.phase_step(&mut state.u, owed);
            owed = 0.0;
            let row = DiagnosticsRow::of(state.t, &state.u);
            let drift = (row.mass - state.mass0).abs() / state.mass0;
            state.rows.push(row);
            if drift > config.mass_budget {
                return Err(CssError::Divergence(format!("mass drift {drift:e} exceeds budget at t = {}", state.t)));
            }
        }
    }
    stepper.phase_step(&mut state.u, owed);
    Ok(())
}

/// Conservation summary of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// Elapsed time.
    pub duration: f64,
    /// `max_t |M(t) − M₀| / M₀` divided by the duration.
    pub mass_drift_per_time: f64,
    /// `max_t |E(t) − E₀| / |E₀|` divided by the duration.
    pub energy_drift_per_time: f64,
    /// `max |Δ_t ∫r²|u|² − 4∫Im(ū r∂_r u)| / max |4∫Im(ū r∂_r u)|` over interior rows
    /// (centered differences of the monitored moment, rates averaged over the pair).
    pub virial_mismatch: f64,
}

/// Drift and virial diagnostics of the recorded rows.
pub fn conservation_report(state: &SimulationState) -> ConservationReport {
    let rows = &state.rows;
    let duration = (rows.last().map_or(state.t, |r| r.t) - rows[0].t).abs();
    let scale = duration.max(f64::MIN_POSITIVE);
    let mass = rows.iter().map(|r| (r.mass - state.mass0).abs() / state.mass0).fold(0.0, f64::max);
    let energy = rows.iter().map(|r| (r.energy - state.energy0).abs() / state.energy0.abs()).fold(0.0, f64::max);
    let peak = rows.iter().map(|r| r.virial_rate.abs()).fold(0.0, f64::max);
    let mut virial = 0.0f64;
    for w in rows.windows(3) {
        let fd = (w[2].second_moment - w[0].second_moment) / (w[2].t - w[0].t);
        virial = virial.max((fd - w[1].virial_rate).abs());
    }
    ConservationReport {
        duration,
        mass_drift_per_time: mass / scale,
        energy_drift_per_time: energy / scale,
        virial_mismatch: if peak > 0.0 { virial / peak } else { virial },
    }
}

/// One monitored row of the blow-up experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    /// Time.
    pub t: f64,
    /// Fitted `λ`.
    pub lambda: f64,
    /// Fitted `γ`.
    pub gamma: f64,
    /// Refined `b`.
    pub b: f64,
    /// Refined `η`.
    pub eta: f64,
    /// `B₀ = |t|^{1/2}/λ`.
    pub b0: f64,
    /// `Re ζ`.
    pub zeta_re: f64,
    /// `Im ζ`.
    pub zeta_im: f64,
    /// `ℰ`.
    pub e_cal: f64,
    /// Projected remainder surrogate.
    pub p: f64,
    /// `M[u]`.
    pub mass: f64,
    /// `E[u]`.
    pub energy: f64,
    /// `‖ε‖_{L²}`.
    pub eps_l2: f64,
    /// `‖ε‖_{Ḣ¹}`.
    pub eps_h1: f64,
    /// `λ/λ_{q,ν}`.
    pub lambda_ratio: f64,
    /// `b/b_{q,ν}`.
    pub b_ratio: f64,
    /// `b_{q,ν}^{1/2} |log b_{q,ν}|`.
    pub eps_band: f64,
}

/// Result of [`blowup_experiment`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowupTrajectory {
    /// Monitored rows in time order.
    pub rows: Vec<BlowupRow>,
    /// Reason the run stopped before the end of the window, if it did.
    pub stopped: Option<String>,
    /// Time steps taken.
    pub steps: usize,
}

/// Settings of [`blowup_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupSettings {
    /// Start time `τ < 0`.
    pub tau: f64,
    /// Length of the forward window.
    pub window: f64,
    /// Number of monitor intervals.
    pub monitors: usize,
    /// Grid nodes.
    pub nodes: usize,
    /// Inner radius.
    pub r_min: f64,
    /// Outer radius.
    pub r_max: f64,
}

impl Default for BlowupSettings {
    fn default() -> Self {
        Self { tau: -0.1, window: 0.075, monitors: 15, nodes: 4096, r_min: 1e-7, r_max: 100.0 }
    }
}

/// Evolve the prescribed data from `τ` over `[τ, τ + window]`, decomposing at monitor times.
pub fn blowup_experiment(spec: RadiationSpec, settings: BlowupSettings, config: &EvolverConfig) -> Result<BlowupTrajectory> {
    if !(settings.tau < 0.0 && settings.window > 0.0 && settings.window <= 0.75 * settings.tau.abs()) {
        return Err(CssError::InvalidParameter("need τ < 0 and 0 < window ≤ 3|τ|/4".into()));
    }
    if settings.monitors == 0 {
        return Err(CssError::InvalidParameter("need at least one monitor interval".into()));
    }
    let grid = Arc::new(RadialGrid::log(settings.nodes, settings.r_min, settings.r_max)?);
    let rho = Arc::new(RhoTable::new(0)?);
    let ortho_grid = Arc::new(RadialGrid::log(4096, 1e-3, 1e3)?);
    let ortho = build_ortho_profiles(&ortho_grid, rho.clone())?;
    let rad = Radiation::new(spec, grid.clone())?;
    let data = initial_data(&rad, settings.tau, &rho)?;
    let first = data.state;
    let cells = core_cells(&grid, first.lambda);
    if cells < 20.0 {
        return Err(CssError::InvalidParameter(format!("soliton core resolved by {cells:.1} < 20 cells")));
    }
    let stepper = Stepper::new(grid.clone(), 0, config)?;
    let mut state = SimulationState::new(settings.tau, data.u);
    let mut rows = Vec::new();
    let mut guess = (first.lambda, first.gamma);
    let mut last_lambda = first.lambda;
    let mut stopped = None;
    for k in 0..=settings.monitors {
        let t = settings.tau + settings.window * k as f64 / settings.monitors as f64;
        if k > 0 {
            let floor = last_lambda;
            let run = evolve(&mut state, &stepper, t, config, |s| {
                let cf = closed_form_state(spec.q, spec.nu, s).map(|c| c.lambda).unwrap_or(floor);
                cf.min(floor)
            });
            if let Err(e) = run {
                stopped = Some(e.to_string());
                break;
            }
        }
        match monitor_row(&rad, &ortho, &rho, &state, guess, k > 0) {
            Ok(row) => {
                guess = (row.lambda, row.gamma);
                last_lambda = row.lambda;
                rows.push(row);
            }
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        }
    }
    Ok(BlowupTrajectory { rows, stopped, steps: state.steps })
}

/// Nodes in the core `[λ/2, 2λ]`.
fn core_cells(grid: &RadialGrid, lambda: f64) -> f64 {
    match grid.spacing() {
        Spacing::Log => {
            if lambda < 2.0 * grid.r_min() || 2.0 * lambda > grid.r_max() {
                0.0
            } else {
                4f64.ln() / grid.step()
            }
        }
        Spacing::Uniform => lambda / grid.step(),
    }
}

fn monitor_row(
    rad: &Radiation,
    ortho: &crate::soliton::OrthoProfiles,
    rho: &RhoTable,
    state: &SimulationState,
    guess: (f64, f64),
    realign: bool,
) -> Result<BlowupRow> {
    let t = state.t;
    let spec = rad.spec();
    let z = rad.z(t)?;
    let gamma_z = rad.gamma_z(t)?;
    let guess = if realign { (guess.0, aligned_phase(&state.u, &z, gamma_z, guess.0)) } else { guess };
    let dec = decompose(&state.u, Some(&z), gamma_z, ortho, guess, DecomposeOptions::default())?;
    let refined = refined_params(&dec, t, AveragingWindow::default(), rho)?;
    let energy = energy_functional(&state.u, Some(&z), gamma_z, &dec);
    let cf = closed_form_state(spec.q, spec.nu, t)?;
    let diag = DiagnosticsRow::of(t, &state.u);
    Ok(BlowupRow {
        t,
        lambda: dec.lambda,
        gamma: dec.gamma,
        b: refined.b,
        eta: refined.eta,
        b0: refined.b0,
        zeta_re: refined.zeta.re,
        zeta_im: refined.zeta.im,
        e_cal: energy.cal_e,
        p: refined.p_surrogate,
        mass: diag.mass,
        energy: diag.energy,
        eps_l2: dec.eps_l2,
        eps_h1: dec.eps_h1,
        lambda_ratio: dec.lambda / cf.lambda,
        b_ratio: refined.b / cf.b,
        eps_band: cf.b.sqrt() * cf.b.ln().abs(),
    })
}

/// Phase `γ` maximizing `Re(e^{iγ} ∫ w̄ Q_λ)` for `w = e^{−iγ_z}u − z`, used to seed the fit.
fn aligned_phase(u: &ComplexField, z: &ComplexField, gamma_z: f64, lambda: f64) -> f64 {
    let w = soliton_part(u, Some(z), gamma_z);
    let dens: Vec<Complex64> = w.values().iter().zip(w.radii()).map(|(v, r)| v * vortex_value(0, r / lambda)).collect();
    w.grid().integrate(&dens, 0.0).arg()
}

/// A smooth, compactly supported test bump `amplitude · χ(r/width)`-tapered Gaussian.
pub fn test_bump(grid: &Arc<RadialGrid>, amplitude: Complex64, width: f64) -> ComplexField {
    ComplexField::from_fn(grid.clone(), 0, |r| amplitude * (-(r / width).powi(2)).exp() * chi(r / (8.0 * width)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_step_preserves_modulus() {
        let g = Arc::new(RadialGrid::reference());
        let u = test_bump(&g, Complex64::new(1.0, 0.5), 1.0);
        let s = Stepper::new(g.clone(), 0, &EvolverConfig::default()).unwrap();
        let mut v = u.clone();
        s.phase_step(&mut v, 0.3);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn linear_step_preserves_discrete_mass() {
        for m in [0, 1, -2] {
            let g = Arc::new(RadialGrid::log(512, 1e-3, 20.0).unwrap());
            let u = ComplexField::from_fn(g.clone(), m, |r| Complex64::new(r.powi(m.abs()) * (-r * r).exp(), 0.0));
            let s = Stepper::new(g.clone(), m, &EvolverConfig::default()).unwrap();
            let m0 = s.discrete_mass(u.values());
            let mut v = u.clone();
            for _ in 0..10 {
                s.linear_step(&mut v, 1e-2).unwrap();
            }
            assert!((s.discrete_mass(v.values()) - m0).abs() <= 1e-12 * m0);
        }
    }
}
