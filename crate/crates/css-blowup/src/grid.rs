//! Radial grids, quadrature, prefix/suffix integral operators and finite differences.
//!
//! A grid is uniform in a native coordinate `x`: `x = ln r` for log grids and
//! `x = r` for uniform grids. Integrals are Euler–Maclaurin corrected trapezoid
//! sums in `x`, and derivatives use five-point stencils in `x` with one-sided
//! closures at both ends. Below the first node, integrands are continued by the
//! power law `f(r) ≈ f(r₀)(r/r₀)^p` supplied by the caller (for an
//! m-equivariant field, `p = |m|`).

use crate::cutoff::CutoffSpec;
use crate::error::{CssError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Scalar sample types that grid operators act on.
pub trait Sample:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
}
impl Sample for f64 {}
impl Sample for Complex64 {}

/// Node placement of a radial grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    /// `r_j = (j+1) r_max / N`.
    Uniform,
    /// `ln r_j` equally spaced on `[ln r_min, ln r_max]`.
    Log,
}

/// Radial measure of a one-dimensional integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `r dr`
    RdR,
    /// `dr / r`
    DrOverR,
    /// `dr`
    Dr,
}

impl Measure {
    fn index(self) -> usize {
        match self {
            Measure::RdR => 0,
            Measure::DrOverR => 1,
            Measure::Dr => 2,
        }
    }

    /// Power added to the origin exponent of the integrand by the measure (in `r`, counting `dr`).
    fn origin_shift(self) -> f64 {
        match self {
            Measure::RdR => 2.0,
            Measure::DrOverR => 0.0,
            Measure::Dr => 1.0,
        }
    }
}

/// Number of nodes the one-sided closures require.
pub const MIN_NODES: usize = 8;

/// An immutable radial grid with its quadrature machinery.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    spacing: Spacing,
    x0: f64,
    h: f64,
    radii: Vec<f64>,
    /// `measure_factor[k][j]`: Jacobian turning `f dμ` into `F dx` for measure `k`.
    measure_factor: [Vec<f64>; 3],
    /// Coefficients `e_j` of the full-range Euler–Maclaurin functional `∫_{x₀}^{x_{N−1}} F dx ≈ Σ e_j F_j`.
    em: Vec<f64>,
    /// `w_j` such that `2π Σ w_j f_j r_j ≈ ∫_{r₀}^{r_max} f`.
    weights: Vec<f64>,
}

/// Five-point first-derivative stencil (times `h`), fourth order.
fn d1_row(j: usize, n: usize) -> (usize, [f64; 5]) {
    const C: f64 = 1.0 / 12.0;
    if j == 0 {
        (0, [-25.0 * C, 48.0 * C, -36.0 * C, 16.0 * C, -3.0 * C])
    } else if j == 1 {
        (0, [-3.0 * C, -10.0 * C, 18.0 * C, -6.0 * C, 1.0 * C])
    } else if j == n - 2 {
        (n - 5, [-C, 6.0 * C, -18.0 * C, 10.0 * C, 3.0 * C])
    } else if j == n - 1 {
        (n - 5, [3.0 * C, -16.0 * C, 36.0 * C, -48.0 * C, 25.0 * C])
    } else {
        (j - 2, [1.0 * C, -8.0 * C, 0.0, 8.0 * C, -C])
    }
}

/// Third-derivative stencil (times `h³`), second order.
fn d3_row(j: usize, n: usize) -> (usize, [f64; 5]) {
    if j == 0 {
        (0, [-2.5, 9.0, -12.0, 7.0, -1.5])
    } else if j == 1 {
        (0, [-1.5, 5.0, -6.0, 3.0, -0.5])
    } else if j == n - 2 {
        (n - 5, [0.5, -3.0, 6.0, -5.0, 1.5])
    } else if j == n - 1 {
        (n - 5, [1.5, -7.0, 12.0, -9.0, 2.5])
    } else {
        (j - 2, [-0.5, 1.0, 0.0, -1.0, 0.5])
    }
}

/// Second-derivative stencil (times `h²`), fourth order.
fn d2_row(j: usize, n: usize) -> (usize, [f64; 6]) {
    const C: f64 = 1.0 / 12.0;
    if j == 0 {
        (0, [45.0 * C, -154.0 * C, 214.0 * C, -156.0 * C, 61.0 * C, -10.0 * C])
    } else if j == 1 {
        (0, [10.0 * C, -15.0 * C, -4.0 * C, 14.0 * C, -6.0 * C, 1.0 * C])
    } else if j == n - 2 {
        (n - 6, [1.0 * C, -6.0 * C, 14.0 * C, -4.0 * C, -15.0 * C, 10.0 * C])
    } else if j == n - 1 {
        (n - 6, [-10.0 * C, 61.0 * C, -156.0 * C, 214.0 * C, -154.0 * C, 45.0 * C])
    } else {
        (j - 2, [-C, 16.0 * C, -30.0 * C, 16.0 * C, -C, 0.0])
    }
}

/// First-derivative rows used for differentiation: the two origin rows use
/// short second-order stencils, which amplify rounding far less than the long
/// one-sided closures while fields there are nearly constant in `x`.
fn d1_deriv_row(j: usize, n: usize) -> (usize, [f64; 5]) {
    match j {
        0 => (0, [-1.5, 2.0, -0.5, 0.0, 0.0]),
        1 => (0, [-0.5, 0.0, 0.5, 0.0, 0.0]),
        _ => d1_row(j, n),
    }
}

/// Second-derivative rows used for differentiation (short closures at the origin end).
fn d2_deriv_row(j: usize, n: usize) -> (usize, [f64; 6]) {
    match j {
        0 => (0, [2.0, -5.0, 4.0, -1.0, 0.0, 0.0]),
        1 => (0, [1.0, -2.0, 1.0, 0.0, 0.0, 0.0]),
        _ => d2_row(j, n),
    }
}

fn apply_row<T: Sample, const K: usize>(f: &[T], start: usize, coeffs: &[f64; K]) -> T {
    let mut acc = T::default();
    for (k, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            acc = acc + f[start + k] * *c;
        }
    }
    acc
}

impl RadialGrid {
    fn from_coordinate(spacing: Spacing, x0: f64, h: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(CssError::InvalidGrid(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if !(h > 0.0) || !x0.is_finite() {
            return Err(CssError::InvalidGrid("nonpositive spacing".into()));
        }
        let radii: Vec<f64> = (0..n)
            .map(|j| {
                let x = x0 + j as f64 * h;
                match spacing {
                    Spacing::Log => x.exp(),
                    Spacing::Uniform => x,
                }
            })
            .collect();
        if radii[0] <= 0.0 {
            return Err(CssError::InvalidGrid("radii must be positive".into()));
        }
        let factor = |measure: Measure| -> Vec<f64> {
            radii
                .iter()
                .map(|&r| match (spacing, measure) {
                    (Spacing::Log, Measure::RdR) => r * r,
                    (Spacing::Log, Measure::DrOverR) => 1.0,
                    (Spacing::Log, Measure::Dr) => r,
                    (Spacing::Uniform, Measure::RdR) => r,
                    (Spacing::Uniform, Measure::DrOverR) => 1.0 / r,
                    (Spacing::Uniform, Measure::Dr) => 1.0,
                })
                .collect()
        };
        let measure_factor = [factor(Measure::RdR), factor(Measure::DrOverR), factor(Measure::Dr)];

        // Full-range functional e_j: trapezoid plus end corrections.
        let mut em = vec![h; n];
        em[0] = 0.5 * h;
        em[n - 1] = 0.5 * h;
        for (end, sign) in [(n - 1, 1.0), (0usize, -1.0)] {
            let (s1, c1) = d1_row(end, n);
            for (k, c) in c1.iter().enumerate() {
                em[s1 + k] -= sign * h / 12.0 * c;
            }
            let (s3, c3) = d3_row(end, n);
            for (k, c) in c3.iter().enumerate() {
                em[s3 + k] += sign * h / 720.0 * c;
            }
        }
        let weights = em
            .iter()
            .zip(&measure_factor[0])
            .zip(&radii)
            .map(|((e, mu), r)| e * mu / r)
            .collect();
        Ok(Self { spacing, x0, h, radii, measure_factor, em, weights })
    }

    /// Log-uniform grid with `n` nodes on `[r_min, r_max]`.
    pub fn log(n: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(CssError::InvalidGrid(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
        }
        let x0 = r_min.ln();
        let h = (r_max.ln() - x0) / (n as f64 - 1.0);
        let mut g = Self::from_coordinate(Spacing::Log, x0, h, n)?;
        let last = g.radii.len() - 1;
        g.radii[last] = r_max;
        Ok(g)
    }

    /// Uniform grid `r_j = (j+1) r_max / n`.
    pub fn uniform(n: usize, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(CssError::InvalidGrid("r_max must be positive".into()));
        }
        let h = r_max / n as f64;
        Self::from_coordinate(Spacing::Uniform, h, h, n)
    }

    /// Default grid for a given `r_max`: log, `N = 4096`, `r_min = 1e−6 r_max`.
    pub fn default_log(r_max: f64) -> Result<Self> {
        Self::log(4096, 1e-6 * r_max, r_max)
    }

    /// Reference resolution: log, `N = 4096`, `r ∈ [1e−4, 100]`.
    pub fn reference() -> Self {
        Self::default_log(100.0).expect("reference grid parameters are valid")
    }

    /// The grid with every radius multiplied by `factor`.
    ///
    /// On a log grid this shifts the coordinate, so nodal values of `f(r)` on
    /// the scaled grid are nodal values of `f(factor · r)` on the original.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scaling factor must be positive");
        match self.spacing {
            Spacing::Log => Self::from_coordinate(Spacing::Log, self.x0 + factor.ln(), self.h, self.len())
                .expect("scaled grid is valid"),
            Spacing::Uniform => {
                Self::from_coordinate(Spacing::Uniform, self.x0 * factor, self.h * factor, self.len())
                    .expect("scaled grid is valid")
            }
        }
    }

    /// Node placement.
    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    /// Always false: grids have at least [`MIN_NODES`] nodes.
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Node radii.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Largest radius.
    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("nonempty grid")
    }

    /// Smallest radius.
    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    /// Spacing in the native coordinate.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// Quadrature weights `w_j` with `2π Σ w_j f_j r_j ≈ ∫_{r₀}^{r_max} f`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `dr/dx` at node `j`.
    pub fn jacobian(&self, j: usize) -> f64 {
        match self.spacing {
            Spacing::Log => self.radii[j],
            Spacing::Uniform => 1.0,
        }
    }

    fn origin_tail<T: Sample>(&self, first: T, measure: Measure, power: f64) -> T {
        let beta = power + measure.origin_shift();
        if beta <= 0.0 {
            return T::default();
        }
        let scale = match self.spacing {
            Spacing::Log => 1.0,
            Spacing::Uniform => self.radii[0],
        };
        first * (scale / beta)
    }

    /// `∫_{r₀}^{r_max} f dμ` plus the power-law origin tail with exponent `power`.
    pub fn integral<T: Sample>(&self, f: &[T], measure: Measure, power: f64) -> T {
        assert_eq!(f.len(), self.len());
        let mu = &self.measure_factor[measure.index()];
        let mut acc = T::default();
        for j in 0..f.len() {
            acc = acc + f[j] * (self.em[j] * mu[j]);
        }
        acc + self.origin_tail(f[0] * mu[0], measure, power)
    }

    /// `∫ f = 2π ∫₀^{r_max} f r dr` with origin exponent `power`.
    pub fn integrate<T: Sample>(&self, f: &[T], power: f64) -> T {
        self.integral(f, Measure::RdR, power) * (2.0 * PI)
    }

    /// Prefix integrals `r_j ↦ ∫₀^{r_j} f dμ` including the origin tail.
    pub fn prefix<T: Sample>(&self, f: &[T], measure: Measure, power: f64) -> Vec<T> {
        let n = self.len();
        assert_eq!(f.len(), n);
        let mu = &self.measure_factor[measure.index()];
        let big: Vec<T> = f.iter().zip(mu).map(|(v, m)| *v * *m).collect();
        let tail = self.origin_tail(big[0], measure, power);
        let (s, c) = d1_row(0, n);
        let d1_first = apply_row(&big, s, &c);
        let (s, c) = d3_row(0, n);
        let d3_first = apply_row(&big, s, &c);
        let h = self.h;
        let mut out = Vec::with_capacity(n);
        out.push(tail);
        let mut trap = T::default();
        for j in 1..n {
            trap = trap + (big[j - 1] + big[j]) * (0.5 * h);
            let (s, c) = d1_row(j, n);
            let d1 = apply_row(&big, s, &c);
            let (s, c) = d3_row(j, n);
            let d3 = apply_row(&big, s, &c);
            out.push(tail + trap - (d1 - d1_first) * (h / 12.0) + (d3 - d3_first) * (h / 720.0));
        }
        out
    }

    /// Suffix integrals `r_j ↦ ∫_{r_j}^{r_max} f dμ` (zero beyond `r_max`).
    ///
    /// Algebraically this is the total minus the prefix, with the same end
    /// corrections; it is accumulated from the outer end so that small tails
    /// are not lost to cancellation against a large total.
    pub fn suffix<T: Sample>(&self, f: &[T], measure: Measure) -> Vec<T> {
        let n = self.len();
        assert_eq!(f.len(), n);
        let mu = &self.measure_factor[measure.index()];
        let big: Vec<T> = f.iter().zip(mu).map(|(v, m)| *v * *m).collect();
        let (s, c) = d1_row(n - 1, n);
        let d1_last = apply_row(&big, s, &c);
        let (s, c) = d3_row(n - 1, n);
        let d3_last = apply_row(&big, s, &c);
        let h = self.h;
        let mut out = vec![T::default(); n];
        let mut trap = T::default();
        for j in (0..n - 1).rev() {
            trap = trap + (big[j] + big[j + 1]) * (0.5 * h);
            let (s, c) = d1_row(j, n);
            let d1 = apply_row(&big, s, &c);
            let (s, c) = d3_row(j, n);
            let d3 = apply_row(&big, s, &c);
            out[j] = trap - (d1_last - d1) * (h / 12.0) + (d3_last - d3) * (h / 720.0);
        }
        out
    }

    /// Boundary-mass diagnostic `|f(r_max)| r_max` for a suffix integrand in `dr/r`.
    pub fn boundary_mass(&self, f_at_rmax_abs: f64) -> f64 {
        f_at_rmax_abs * self.r_max()
    }

    /// Derivative with respect to the native coordinate.
    pub fn d_x<T: Sample>(&self, f: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(f.len(), n);
        let inv = 1.0 / self.h;
        (0..n)
            .map(|j| {
                let (s, c) = d1_deriv_row(j, n);
                apply_row(f, s, &c) * inv
            })
            .collect()
    }

    /// Second derivative with respect to the native coordinate.
    pub fn d_xx<T: Sample>(&self, f: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(f.len(), n);
        let inv = 1.0 / (self.h * self.h);
        (0..n)
            .map(|j| {
                let (s, c) = d2_deriv_row(j, n);
                apply_row(f, s, &c) * inv
            })
            .collect()
    }

    /// `∂_r f`.
    pub fn d_r<T: Sample>(&self, f: &[T]) -> Vec<T> {
        let mut d = self.d_x(f);
        if self.spacing == Spacing::Log {
            for (v, r) in d.iter_mut().zip(&self.radii) {
                *v = *v * (1.0 / r);
            }
        }
        d
    }

    /// `r ∂_r f`.
    pub fn r_d_r<T: Sample>(&self, f: &[T]) -> Vec<T> {
        match self.spacing {
            Spacing::Log => self.d_x(f),
            Spacing::Uniform => self.d_x(f).into_iter().zip(&self.radii).map(|(v, r)| v * *r).collect(),
        }
    }

    /// `Δ^{(m)} f = ∂_rr f + ∂_r f / r − m² f / r²`.
    pub fn laplacian<T: Sample>(&self, f: &[T], m: i32) -> Vec<T> {
        let m2 = (m * m) as f64;
        let dxx = self.d_xx(f);
        match self.spacing {
            Spacing::Log => dxx
                .into_iter()
                .zip(f)
                .zip(&self.radii)
                .map(|((d, v), r)| (d - *v * m2) * (1.0 / (r * r)))
                .collect(),
            Spacing::Uniform => {
                let dx = self.d_x(f);
                (0..f.len())
                    .map(|j| {
                        let r = self.radii[j];
                        dxx[j] + dx[j] * (1.0 / r) - f[j] * (m2 / (r * r))
                    })
                    .collect()
            }
        }
    }

    /// `∂_±^{(m)} f = ∂_r f ∓ m f / r`.
    pub fn d_pm<T: Sample>(&self, f: &[T], m: i32, sign: i32) -> Vec<T> {
        let d = self.d_r(f);
        let s = if sign >= 0 { -(m as f64) } else { m as f64 };
        d.into_iter().zip(f).zip(&self.radii).map(|((dv, v), r)| dv + *v * (s / r)).collect()
    }

    /// Scaling generator `Λ f = r ∂_r f + f`.
    pub fn scaling_gen<T: Sample>(&self, f: &[T]) -> Vec<T> {
        self.r_d_r(f).into_iter().zip(f).map(|(d, v)| d + *v).collect()
    }

    /// Truncated scaling generator `Λ_A f = χ_A Λ f + ½ r χ_A′ f`.
    pub fn scaling_gen_trunc<T: Sample>(&self, f: &[T], cutoff: &CutoffSpec) -> Vec<T> {
        let lf = self.scaling_gen(f);
        (0..f.len())
            .map(|j| {
                let r = self.radii[j];
                lf[j] * cutoff.value(r) + f[j] * (0.5 * cutoff.r_d1(r))
            })
            .collect()
    }

    /// Native coordinate of radius `r`.
    pub fn coordinate(&self, r: f64) -> f64 {
        match self.spacing {
            Spacing::Log => r.ln(),
            Spacing::Uniform => r,
        }
    }

    /// Four-point Lagrange interpolation in the native coordinate.
    ///
    /// Below `r₀` the samples are continued by `f₀ (r/r₀)^power`; beyond `r_max` the result is zero.
    pub fn interpolate<T: Sample>(&self, f: &[T], r: f64, power: f64) -> T {
        let n = self.len();
        let r0 = self.radii[0];
        if r < r0 {
            return f[0] * (r / r0).powf(power);
        }
        if r > self.r_max() * (1.0 + 1e-12) {
            return T::default();
        }
        let u = (self.coordinate(r) - self.x0) / self.h;
        let k = (u.floor() as isize).clamp(1, n as isize - 3) as usize;
        let t = u - k as f64;
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        f[k - 1] * w[0] + f[k] * w[1] + f[k + 1] * w[2] + f[k + 2] * w[3]
    }

    /// Samples of `f` (given on `self`) at the nodes of `target`.
    pub fn resample<T: Sample>(&self, f: &[T], target: &RadialGrid, power: f64) -> Vec<T> {
        target.radii.iter().map(|&r| self.interpolate(f, r, power)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2(r: f64) -> f64 {
        8.0 / (1.0 + r * r).powi(2)
    }

    #[test]
    fn constant_integrates_to_disc_area() {
        let g = RadialGrid::log(4096, 1e-4, 100.0).unwrap();
        let ones = vec![1.0; g.len()];
        let exact = PI * (100.0f64.powi(2) - 1e-8);
        let got = g.integral(&ones, Measure::RdR, -10.0) * 2.0 * PI;
        assert!(((got - exact) / exact).abs() < 1e-12, "{got} vs {exact}");
        let u = RadialGrid::uniform(1000, 3.0).unwrap();
        let ones = vec![1.0; u.len()];
        let exact = PI * (9.0 - u.r_min().powi(2));
        let got = u.integral(&ones, Measure::RdR, -10.0) * 2.0 * PI;
        assert!(((got - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn gaussian_and_vortex_mass() {
        let g = RadialGrid::reference();
        let f: Vec<f64> = g.radii().iter().map(|r| (-r * r).exp()).collect();
        assert!((g.integrate(&f, 0.0) - PI).abs() < 1e-8);
        let f: Vec<f64> = g.radii().iter().map(|&r| q2(r)).collect();
        let total = g.integral(&f, Measure::RdR, 0.0);
        assert!((total - (4.0 - 4.0 / (1.0 + 1e4))).abs() < 1e-10);
    }

    #[test]
    fn prefix_of_constant_two_is_r_squared() {
        for g in [RadialGrid::reference(), RadialGrid::uniform(500, 10.0).unwrap()] {
            let two = vec![2.0; g.len()];
            let p = g.prefix(&two, Measure::RdR, 0.0);
            for (v, r) in p.iter().zip(g.radii()) {
                assert!((v - r * r).abs() <= 1e-10 * r * r);
            }
        }
    }

    #[test]
    fn suffix_closed_forms() {
        let g = RadialGrid::reference();
        let f: Vec<f64> = g.radii().iter().map(|&r| q2(r)).collect();
        let s = g.suffix(&f, Measure::DrOverR);
        let j = g.radii().iter().position(|&r| r >= 1.0).unwrap();
        let r = g.radii()[j];
        // ∫_r^∞ 8/(r(1+r²)²) dr = 4/(1+r²) − 4 ln(r²/(1+r²)) − 4 ... closed form below.
        let anti = |r: f64| -> f64 {
            let x = r * r;
            4.0 * (x / (1.0 + x)).ln() + 4.0 / (1.0 + x)
        };
        let exact = -anti(r) + anti(100.0);
        assert!((s[j] - exact).abs() < 1e-10, "{} vs {}", s[j], exact);
        let at_one = -anti(1.0);
        assert!((at_one - (4.0 * 2f64.ln() - 2.0)).abs() < 1e-14);
        let inv: Vec<f64> = g.radii().iter().map(|r| 1.0 / (r * r)).collect();
        let s = g.suffix(&inv, Measure::DrOverR);
        for (k, r) in g.radii().iter().enumerate().step_by(97) {
            let exact = 0.5 / (r * r) - 0.5 / 1e4;
            assert!((s[k] - exact).abs() <= 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_examples() {
        let g = RadialGrid::reference();
        let f: Vec<f64> = g.radii().iter().map(|r| r * r).collect();
        let lam = g.scaling_gen(&f);
        let lap = g.laplacian(&f, 0);
        for j in 0..g.len() {
            let r = g.radii()[j];
            // The two origin rows use second-order closures.
            let tol = if j < 2 { 1e-4 } else { 1e-9 };
            assert!((lam[j] - 3.0 * r * r).abs() < tol * r * r);
            assert!((lap[j] - 4.0).abs() < 1e3 * tol);
        }
    }

    #[test]
    fn interpolation_is_accurate() {
        let g = RadialGrid::reference();
        let f: Vec<f64> = g.radii().iter().map(|r| (-r).exp()).collect();
        for r in [1e-3, 0.37, 2.5, 17.0] {
            assert!((g.interpolate(&f, r, 0.0) - (-r).exp()).abs() < 1e-10);
        }
    }
}
