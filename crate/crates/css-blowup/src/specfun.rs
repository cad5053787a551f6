//! Special functions for the self-similar linear radiation problem.
//!
//! Complex Γ, Kummer's `M(a, c, z)`, the self-similar operator
//! `𝒜 = ∂_YY + Y⁻¹∂_Y − 𝔪²/Y² − (i/2)Y∂_Y + iν/2`, its fundamental systems
//! `f₁ ~ Y^ν`, `f₂ ~ e^{iY²/4} Y^{−(ν+2)}`, `e₁ ~ Y^{|𝔪|}`, the connection
//! `f₁ + α f₂ = κ e₁`, and the Bessel function `J₂`.

use crate::error::{CssError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Principal power `z^w = exp(w (ln|z| + i Arg z))`, `Arg ∈ (−π, π]`; `0^w = 0` for `Re w > 0`.
pub fn cpow(z: Complex64, w: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if w.re > 0.0 { c(0.0) } else if w == c(0.0) { c(1.0) } else { c(f64::INFINITY) };
    }
    (w * z.ln()).exp()
}

/// `y^w` for real `y > 0`.
pub fn rpow(y: f64, w: Complex64) -> Complex64 {
    (w * y.ln()).exp()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = c(LANCZOS[0]);
    for (k, &coef) in LANCZOS.iter().enumerate().skip(1) {
        x += coef / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Complex Γ function (Lanczos approximation with reflection for `Re z < 1/2`).
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(CssError::GammaPole(format!("{z}")));
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// `1/Γ(z)`, zero at the poles.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        c(0.0)
    } else if z.re < 0.5 {
        (PI * z).sin() * ln_gamma_right(1.0 - z).exp() / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default)]
struct Compensated {
    sum: Complex64,
    err: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        let (s_re, e_re) = two_sum(self.sum.re, x.re);
        let (s_im, e_im) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(s_re, s_im);
        self.err += Complex64::new(e_re, e_im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.err
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, e)
}

const KUMMER_SERIES_RADIUS: f64 = 10.0;
const KUMMER_RAY_STEP: f64 = 2.5e-3;

fn kummer_series(a: Complex64, cc: Complex64, z: Complex64) -> Result<Complex64> {
    let mut acc = Compensated::default();
    let mut term = c(1.0);
    acc.add(term);
    for n in 0..2000 {
        let nf = n as f64;
        term *= (a + nf) / ((cc + nf) * (nf + 1.0)) * z;
        acc.add(term);
        if term == c(0.0) || (nf > z.norm() && term.norm() <= 1e-17 * acc.value().norm()) {
            return Ok(acc.value());
        }
    }
    Err(CssError::NonConvergence { what: "Kummer series", iterations: 2000, residual: term.norm() })
}

/// Kummer's confluent hypergeometric function `M(a, c, z)`.
///
/// Power series with compensated summation for `|z| ≤ 10`; beyond, Kummer's
/// equation `z w'' + (c − z) w' − a w = 0` is integrated along the ray from
/// `10 z/|z|` with RK4.
pub fn kummer_m(a: Complex64, cc: Complex64, z: Complex64) -> Result<Complex64> {
    Ok(kummer_m_with_derivative(a, cc, z)?.0)
}

/// `(M(a, c, z), ∂_z M(a, c, z))`.
pub fn kummer_m_with_derivative(a: Complex64, cc: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if is_nonpositive_integer(cc) {
        return Err(CssError::InvalidParameter(format!("Kummer M with c = {cc}")));
    }
    let series = |z: Complex64| -> Result<(Complex64, Complex64)> {
        Ok((kummer_series(a, cc, z)?, a / cc * kummer_series(a + 1.0, cc + 1.0, z)?))
    };
    let r = z.norm();
    if r <= KUMMER_SERIES_RADIUS {
        return series(z);
    }
    let z0 = z * (KUMMER_SERIES_RADIUS / r);
    let (w0, dw0) = series(z0)?;
    let delta = z - z0;
    let steps = (delta.norm() / KUMMER_RAY_STEP).ceil() as usize;
    let h = 1.0 / steps as f64;
    // d/ds (w, w') = Δ (w', w''),  w'' = (a w − (c − z) w') / z.
    let rhs = |s: f64, w: Complex64, dw: Complex64| {
        let zz = z0 + delta * s;
        (delta * dw, delta * (a * w - (cc - zz) * dw) / zz)
    };
    let (mut w, mut dw) = (w0, dw0);
    for k in 0..steps {
        let s = k as f64 * h;
        let (k1w, k1d) = rhs(s, w, dw);
        let (k2w, k2d) = rhs(s + 0.5 * h, w + 0.5 * h * k1w, dw + 0.5 * h * k1d);
        let (k3w, k3d) = rhs(s + 0.5 * h, w + 0.5 * h * k2w, dw + 0.5 * h * k2d);
        let (k4w, k4d) = rhs(s + h, w + h * k3w, dw + h * k3d);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        dw += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    if !(w.is_finite() && dw.is_finite()) {
        return Err(CssError::NonConvergence { what: "Kummer ray integration", iterations: steps, residual: f64::NAN });
    }
    Ok((w, dw))
}

/// The self-similar operator `𝒜_{𝔪,ν}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SelfSimilarOde {
    /// Spectral exponent `ν`.
    pub nu: Complex64,
    /// Equivariance index `𝔪 ≠ 0`.
    pub frak_m: i32,
}

impl SelfSimilarOde {
    /// Validate `Re ν > −|𝔪| − 2` and `𝔪 ≠ 0`.
    pub fn new(nu: Complex64, frak_m: i32) -> Result<Self> {
        if frak_m == 0 {
            return Err(CssError::InvalidParameter("self-similar operator needs 𝔪 ≠ 0".into()));
        }
        if nu.re <= -(frak_m.abs() as f64) - 2.0 {
            return Err(CssError::InvalidParameter(format!("Re ν = {} too small", nu.re)));
        }
        Ok(Self { nu, frak_m })
    }

    fn m2(&self) -> f64 {
        (self.frak_m as f64).powi(2)
    }

    /// `𝒜V` at `y` from `(V, V′, V″)`.
    pub fn apply(&self, y: f64, v: Complex64, dv: Complex64, d2v: Complex64) -> Complex64 {
        d2v + dv / y - self.m2() * v / (y * y) - 0.5 * I * y * dv + 0.5 * I * self.nu * v
    }

    /// `V″` solving `𝒜V = 0`.
    pub fn second_derivative(&self, y: f64, v: Complex64, dv: Complex64) -> Complex64 {
        -dv / y + self.m2() * v / (y * y) + 0.5 * I * y * dv - 0.5 * I * self.nu * v
    }

    /// `W″` for the envelope `W = e^{−iY²/4} V` of a solution `V`.
    pub fn envelope_second_derivative(&self, y: f64, w: Complex64, dw: Complex64) -> Complex64 {
        -(1.0 / y + 0.5 * I * y) * dw - (I * (1.0 + 0.5 * self.nu) - self.m2() / (y * y)) * w
    }
}

/// Branch of the fundamental system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// `f₁ = Y^ν Σ c_n Y^{−2n}`.
    F1,
    /// `f₂ = e^{iY²/4} Y^{−(ν+2)} Σ c_n Y^{−2n}`.
    F2,
    /// `e₁ = Y^{|𝔪|} Σ c_n Y^{2n}` (convergent).
    E1,
}

/// Truncated series for one branch of `𝒜V = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    /// Branch.
    pub kind: SeriesKind,
    /// Operator parameters.
    pub ode: SelfSimilarOde,
    /// Coefficients `c_0 = 1, c_1, …, c_{K−1}`.
    pub coeffs: Vec<Complex64>,
}

/// Maximal truncation order accepted by [`series_coeffs`].
pub const MAX_SERIES_ORDER: usize = 12;

/// Coefficients of the `K`-term series of `kind` for `𝒜_{𝔪,ν}`.
///
/// With `𝒜Y^k = (k² − 𝔪²)Y^{k−2} + (i/2)(ν − k)Y^k`, matching powers gives
/// `c_n = i((ν − 2n + 2)² − 𝔪²) c_{n−1}/n` for `f₁`,
/// `c_n = −i((ν + 2n)² − 𝔪²) c_{n−1}/n` for the envelope of `f₂`, and
/// `c_n = i(a + n − 1) c_{n−1} / (4n(|𝔪| + n))`, `a = (|𝔪| − ν)/2`, for `e₁`.
pub fn series_coeffs(kind: SeriesKind, nu: Complex64, frak_m: i32, order: usize) -> Result<AsymptoticSeries> {
    if order == 0 || order > MAX_SERIES_ORDER {
        return Err(CssError::InvalidParameter(format!("series order {order} outside 1..={MAX_SERIES_ORDER}")));
    }
    let ode = SelfSimilarOde::new(nu, frak_m)?;
    let m2 = ode.m2();
    let am = frak_m.abs() as f64;
    let a = (am - nu) / 2.0;
    let mut coeffs = vec![c(1.0)];
    for n in 1..order {
        let nf = n as f64;
        let prev = coeffs[n - 1];
        let next = match kind {
            SeriesKind::F1 => I * ((nu - 2.0 * nf + 2.0).powi(2) - m2) * prev / nf,
            SeriesKind::F2 => -I * ((nu + 2.0 * nf).powi(2) - m2) * prev / nf,
            SeriesKind::E1 => I * (a + nf - 1.0) * prev / (4.0 * nf * (am + nf)),
        };
        coeffs.push(next);
    }
    Ok(AsymptoticSeries { kind, ode, coeffs })
}

impl AsymptoticSeries {
    fn exponent(&self, n: usize) -> Complex64 {
        let nf = n as f64;
        match self.kind {
            SeriesKind::F1 => self.ode.nu - 2.0 * nf,
            SeriesKind::F2 => -(self.ode.nu + 2.0) - 2.0 * nf,
            SeriesKind::E1 => c(self.ode.frak_m.abs() as f64 + 2.0 * nf),
        }
    }

    /// The power sum `Σ c_n Y^{k_n}` and its first two derivatives (the envelope for `f₂`).
    pub fn envelope(&self, y: f64) -> [Complex64; 3] {
        let mut out = [c(0.0); 3];
        for (n, &cn) in self.coeffs.iter().enumerate() {
            let k = self.exponent(n);
            let p = cn * rpow(y, k);
            out[0] += p;
            out[1] += p * k / y;
            out[2] += p * k * (k - 1.0) / (y * y);
        }
        out
    }

    /// `(V, V′, V″)` of the truncated branch at `y > 0`.
    pub fn eval(&self, y: f64) -> [Complex64; 3] {
        let [w, dw, d2w] = self.envelope(y);
        match self.kind {
            SeriesKind::F2 => {
                let e = Complex64::from_polar(1.0, 0.25 * y * y);
                let de = 0.5 * I * y;
                let d2e = 0.5 * I - 0.25 * y * y;
                [e * w, e * (dw + de * w), e * (d2w + 2.0 * de * dw + d2e * w)]
            }
            _ => [w, dw, d2w],
        }
    }

    /// `𝒜V` of the truncated branch.
    pub fn residual(&self, y: f64) -> Complex64 {
        let [v, dv, d2v] = self.eval(y);
        self.ode.apply(y, v, dv, d2v)
    }
}

/// Lower end of the regime of the large-`Y` series.
pub const ASYMPTOTIC_MIN_Y: f64 = 4.0;

fn asymptotic_value(kind: SeriesKind, nu: Complex64, frak_m: i32, y: f64) -> Result<Complex64> {
    if y < ASYMPTOTIC_MIN_Y {
        return Err(CssError::InvalidParameter(format!("Y = {y} below the asymptotic regime Y ≥ {ASYMPTOTIC_MIN_Y}")));
    }
    Ok(series_coeffs(kind, nu, frak_m, MAX_SERIES_ORDER)?.eval(y)[0])
}

/// `f₁(Y)` from its truncated asymptotic series (`Y ≥ 4`).
pub fn eval_f1(nu: Complex64, frak_m: i32, y: f64) -> Result<Complex64> {
    asymptotic_value(SeriesKind::F1, nu, frak_m, y)
}

/// `f₂(Y)` from its truncated asymptotic series (`Y ≥ 4`).
pub fn eval_f2(nu: Complex64, frak_m: i32, y: f64) -> Result<Complex64> {
    asymptotic_value(SeriesKind::F2, nu, frak_m, y)
}

/// `(e₁(Y), e₁′(Y))` with `e₁ = Y^{|𝔪|} M((|𝔪| − ν)/2, |𝔪| + 1, iY²/4)`.
pub fn eval_e1_with_derivative(nu: Complex64, frak_m: i32, y: f64) -> Result<(Complex64, Complex64)> {
    SelfSimilarOde::new(nu, frak_m)?;
    let am = frak_m.abs() as f64;
    let a = (am - nu) / 2.0;
    let (m, dm) = kummer_m_with_derivative(a, c(am + 1.0), I * 0.25 * y * y)?;
    let p = y.powf(am);
    let dp = if am == 0.0 { 0.0 } else { am * y.powf(am - 1.0) };
    Ok((p * m, dp * m + p * dm * (0.5 * I * y)))
}

/// `e₁(Y)`.
pub fn eval_e1(nu: Complex64, frak_m: i32, y: f64) -> Result<Complex64> {
    Ok(eval_e1_with_derivative(nu, frak_m, y)?.0)
}

/// Result of matching `f₁ + α f₂ = κ e₁`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Connection {
    /// Operator parameters.
    pub ode: SelfSimilarOde,
    /// Fitted `α`.
    pub alpha: Complex64,
    /// Fitted `κ`.
    pub kappa: Complex64,
    /// `p = Γ((ν + |𝔪|)/2 + 1) / Γ(|𝔪| + 1)`.
    pub p: Complex64,
    /// `(4i)^{(ν − |𝔪|)/2} p`.
    pub kappa_closed: Complex64,
    /// `Γ(|𝔪| + 1) κ (i/4)^{a − |𝔪| − 1} / Γ(a)` from the large-argument asymptotics of `M`.
    pub alpha_closed: Complex64,
    /// `‖f₁ + α f₂ − κ e₁‖ / ‖f₁‖` over the window samples.
    pub window_residual: f64,
}

/// Far point where the asymptotic series seed the inward continuation.
pub const MATCH_SEED_Y: f64 = 24.0;
/// Matching window.
pub const MATCH_WINDOW: (f64, f64) = (4.0, 8.0);
const MATCH_STEP: f64 = 1e-3;
const MATCH_SAMPLE_EVERY: usize = 100;

type Rhs<'a> = dyn Fn(f64, Complex64, Complex64) -> Complex64 + 'a;

/// Classical RK4 for `V″ = g(Y, V, V′)` from `y0` with step `h` over `steps` steps;
/// `visit` sees `(k, Y_k, V_k, V′_k)` for `k = 0..=steps`.
fn march(
    g: &Rhs<'_>,
    y0: f64,
    h: f64,
    steps: usize,
    mut v: Complex64,
    mut dv: Complex64,
    mut visit: impl FnMut(usize, f64, Complex64, Complex64),
) {
    visit(0, y0, v, dv);
    for k in 0..steps {
        let y = y0 + k as f64 * h;
        let k1v = dv;
        let k1d = g(y, v, dv);
        let k2v = dv + 0.5 * h * k1d;
        let k2d = g(y + 0.5 * h, v + 0.5 * h * k1v, k2v);
        let k3v = dv + 0.5 * h * k2d;
        let k3d = g(y + 0.5 * h, v + 0.5 * h * k2v, k3v);
        let k4v = dv + h * k3d;
        let k4d = g(y + h, v + h * k3v, k4v);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        dv += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        visit(k + 1, y0 + (k + 1) as f64 * h, v, dv);
    }
}

/// Determine `α` and `κ` in `f₁ + α f₂ = κ e₁` by complex least squares on `[4, 8]`.
///
/// `f₁` and the envelope of `f₂` are seeded from their series at `Y = 24` and
/// continued inward by RK4; `e₁` comes from Kummer's function.
pub fn connection(nu: Complex64, frak_m: i32) -> Result<Connection> {
    let ode = SelfSimilarOde::new(nu, frak_m)?;
    let am = frak_m.abs() as f64;
    let a = (am - nu) / 2.0;
    let p = gamma_complex((nu + am) / 2.0 + 1.0)? / gamma_complex(c(am + 1.0))?;
    let kappa_closed = cpow(4.0 * I, (nu - am) / 2.0) * p;
    let alpha_closed = gamma_complex(c(am + 1.0))? * kappa_closed * cpow(0.25 * I, a - am - 1.0) * recip_gamma(a);

    let steps = ((MATCH_SEED_Y - MATCH_WINDOW.0) / MATCH_STEP).round() as usize;
    let window_from = ((MATCH_SEED_Y - MATCH_WINDOW.1) / MATCH_STEP).round() as usize;
    let take = |k: usize| k >= window_from && (k - window_from) % MATCH_SAMPLE_EVERY == 0;

    let f1s = series_coeffs(SeriesKind::F1, nu, frak_m, MAX_SERIES_ORDER)?;
    let [v, dv, _] = f1s.eval(MATCH_SEED_Y);
    let mut f1 = Vec::new();
    let mut ys = Vec::new();
    march(&|y, v, dv| ode.second_derivative(y, v, dv), MATCH_SEED_Y, -MATCH_STEP, steps, v, dv, |k, y, v, _| {
        if take(k) {
            f1.push(v);
            ys.push(y);
        }
    });
    let f2s = series_coeffs(SeriesKind::F2, nu, frak_m, MAX_SERIES_ORDER)?;
    let [w, dw, _] = f2s.envelope(MATCH_SEED_Y);
    let mut f2 = Vec::new();
    march(&|y, w, dw| ode.envelope_second_derivative(y, w, dw), MATCH_SEED_Y, -MATCH_STEP, steps, w, dw, |k, y, w, _| {
        if take(k) {
            f2.push(Complex64::from_polar(1.0, 0.25 * y * y) * w);
        }
    });
    let e1 = ys.iter().map(|&y| eval_e1(nu, frak_m, y)).collect::<Result<Vec<_>>>()?;

    // Normal equations for min Σ |f₁ + α f₂ − κ e₁|² in (α, κ).
    let (mut g11, mut g12, mut g22) = (0.0, c(0.0), 0.0);
    let (mut b1, mut b2) = (c(0.0), c(0.0));
    for k in 0..ys.len() {
        let (u, v) = (f2[k], -e1[k]);
        g11 += u.norm_sqr();
        g12 += u.conj() * v;
        g22 += v.norm_sqr();
        b1 -= u.conj() * f1[k];
        b2 -= v.conj() * f1[k];
    }
    let det = g11 * g22 - g12.norm_sqr();
    let alpha = (g22 * b1 - g12 * b2) / det;
    let kappa = (g11 * b2 - g12.conj() * b1) / det;
    let (mut res, mut norm) = (0.0, 0.0);
    for k in 0..ys.len() {
        res += (f1[k] + alpha * f2[k] - kappa * e1[k]).norm_sqr();
        norm += f1[k].norm_sqr();
    }
    let window_residual = (res / norm).sqrt();
    if !(window_residual <= 1e-4) {
        return Err(CssError::IllConditioned(window_residual));
    }
    Ok(Connection { ode, alpha, kappa, p, kappa_closed, alpha_closed, window_residual })
}

/// Evaluator of the regular self-similar profile `F = f₁ + α f₂ = κ e₁`.
///
/// Kummer's function for `Y ≤ 6`, a cached RK4 table with cubic Hermite
/// interpolation on `(6, 24]`, and the asymptotic series beyond.
#[derive(Clone, Debug)]
pub struct SelfSimilarProfile {
    /// Connection data.
    pub connection: Connection,
    f1: AsymptoticSeries,
    f2: AsymptoticSeries,
    table: Vec<(Complex64, Complex64)>,
}

const PROFILE_KUMMER_MAX: f64 = 6.0;
const PROFILE_TABLE_STEP: f64 = 1e-3;

impl SelfSimilarProfile {
    /// Build the evaluator for `(ν, 𝔪)`.
    pub fn new(nu: Complex64, frak_m: i32) -> Result<Self> {
        let connection = connection(nu, frak_m)?;
        let ode = connection.ode;
        let (e, de) = eval_e1_with_derivative(nu, frak_m, PROFILE_KUMMER_MAX)?;
        let steps = ((MATCH_SEED_Y - PROFILE_KUMMER_MAX) / PROFILE_TABLE_STEP).round() as usize;
        let mut table = Vec::with_capacity(steps + 1);
        march(
            &|y, v, dv| ode.second_derivative(y, v, dv),
            PROFILE_KUMMER_MAX,
            PROFILE_TABLE_STEP,
            steps,
            connection.kappa * e,
            connection.kappa * de,
            |_, _, v, dv| table.push((v, dv)),
        );
        Ok(Self {
            connection,
            f1: series_coeffs(SeriesKind::F1, nu, frak_m, MAX_SERIES_ORDER)?,
            f2: series_coeffs(SeriesKind::F2, nu, frak_m, MAX_SERIES_ORDER)?,
            table,
        })
    }

    /// `ν`.
    pub fn nu(&self) -> Complex64 {
        self.connection.ode.nu
    }

    /// `(F, F′, F″)` at `y ≥ 0`.
    pub fn eval(&self, y: f64) -> Result<[Complex64; 3]> {
        let ode = self.connection.ode;
        let (v, dv) = if y <= PROFILE_KUMMER_MAX {
            if y == 0.0 {
                let am = ode.frak_m.abs();
                let second = if am == 2 { 2.0 * self.connection.kappa } else { c(0.0) };
                let value = if am == 0 { self.connection.kappa } else { c(0.0) };
                return Ok([value, c(0.0), second]);
            }
            let (e, de) = eval_e1_with_derivative(ode.nu, ode.frak_m, y)?;
            (self.connection.kappa * e, self.connection.kappa * de)
        } else if y <= MATCH_SEED_Y {
            self.hermite(y)
        } else {
            let a = self.f1.eval(y);
            let b = self.f2.eval(y);
            let al = self.connection.alpha;
            return Ok([a[0] + al * b[0], a[1] + al * b[1], a[2] + al * b[2]]);
        };
        Ok([v, dv, ode.second_derivative(y, v, dv)])
    }

    fn hermite(&self, y: f64) -> (Complex64, Complex64) {
        let ode = self.connection.ode;
        let u = (y - PROFILE_KUMMER_MAX) / PROFILE_TABLE_STEP;
        let k = (u.floor() as usize).min(self.table.len() - 2);
        let t = u - k as f64;
        let h = PROFILE_TABLE_STEP;
        let y0 = PROFILE_KUMMER_MAX + k as f64 * h;
        let (p0, m0) = self.table[k];
        let (p1, m1) = self.table[k + 1];
        let (t2, t3) = (t * t, t * t * t);
        let v = p0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (h * (t3 - 2.0 * t2 + t))
            + p1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (h * (t3 - t2));
        // The derivative is interpolated with its own Hermite data (V′, V″).
        let a0 = ode.second_derivative(y0, p0, m0);
        let a1 = ode.second_derivative(y0 + h, p1, m1);
        let dv = m0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + a0 * (h * (t3 - 2.0 * t2 + t))
            + m1 * (-2.0 * t3 + 3.0 * t2)
            + a1 * (h * (t3 - t2));
        (v, dv)
    }
}

/// Bessel function `J₂(x)`.
///
/// Miller's backward recurrence normalized by `J₀ + 2 Σ J_{2k} = 1` for
/// `|x| ≤ 25`, Hankel's asymptotic expansion beyond.
pub fn bessel_j2(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    if x > 25.0 {
        bessel_j2_hankel(x)
    } else {
        bessel_j2_miller(x)
    }
}

fn bessel_j2_miller(x: f64) -> f64 {
    let start = 2 * ((x + 30.0 + (40.0 * x).sqrt()) as usize / 2 + 1);
    let (mut jp, mut j) = (0.0, 1e-300);
    let (mut j2, mut norm) = (0.0, 0.0);
    for n in (1..=start).rev() {
        let jm = 2.0 * n as f64 / x * j - jp;
        jp = j;
        j = jm;
        // `j` now holds the unnormalized J_{n−1}.
        let idx = n - 1;
        if idx == 2 {
            j2 = j;
        }
        if idx == 0 {
            norm += j;
        } else if idx % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            j2 *= 1e-250;
            norm *= 1e-250;
        }
    }
    j2 / norm
}

fn bessel_j2_hankel(x: f64) -> f64 {
    let mu = 16.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        }
        if term.abs() > last || term == 0.0 {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let omega = x - 1.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}
