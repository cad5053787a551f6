//! Adaptive Dormand–Prince 5(4) integration of real ODE systems.

use crate::error::{CssError, Result};

/// Step-size control for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute error tolerance per component.
    pub abs: f64,
    /// Relative error tolerance per component.
    pub rel: f64,
    /// Initial step (signed by the direction of integration internally).
    pub initial_step: f64,
    /// Smallest allowed step magnitude.
    pub min_step: f64,
    /// Maximum number of accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10, initial_step: 1e-6, min_step: 1e-300, max_steps: 1_000_000 }
    }
}

/// Accepted points of an integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Times of accepted steps, starting with the initial time.
    pub times: Vec<f64>,
    /// States at `times`.
    pub states: Vec<Vec<f64>>,
    /// Number of rejected steps.
    pub rejected: usize,
}

impl Trajectory {
    /// Final state.
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    y.iter()
        .enumerate()
        .map(|(i, &yi)| yi + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
        .collect()
}

/// Integrate `y′ = f(t, y)` from `t0` to `t1` (either direction).
///
/// The right-hand side may reject a state by returning an error, which aborts
/// the integration.
pub fn integrate(
    mut f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    tol: Tolerances,
) -> Result<Trajectory> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut traj = Trajectory { times: vec![t0], states: vec![y0.to_vec()], rejected: 0 };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = tol.initial_step.abs().min(span);
    let mut k1 = f(t, &y)?;
    for _ in 0..tol.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * span {
            return Ok(traj);
        }
        h = h.min(remaining);
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * hs, &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(t + hs, &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hs, &y_new)?;
        let mut err = 0.0f64;
        for i in 0..y.len() {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            t = if (t1 - (t + hs)).abs() <= 1e-14 * span { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            traj.times.push(t);
            traj.states.push(y.clone());
        } else {
            traj.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < tol.min_step {
            return Err(CssError::StepFailure { t, reason: format!("step size underflow ({h:e})") });
        }
    }
    Err(CssError::NonConvergence { what: "adaptive Runge–Kutta", iterations: tol.max_steps, residual: (t1 - t).abs() })
}
