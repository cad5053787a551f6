//! Complex radial profiles with an equivariance index, norms and CSV I/O.

use crate::error::{CssError, Result};
use crate::grid::{Measure, RadialGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Complex samples of an m-equivariant radial profile on a shared grid.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    m: i32,
}

/// Norm record of a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// ‖f‖_{L²}
    pub l2: f64,
    /// ‖f‖_{Ḣ¹_m} = (‖∂_r f‖² + m²‖f/r‖²)^{1/2}
    pub h1_dot: f64,
    /// (‖f‖² + ‖f‖²_{Ḣ¹_m} + ‖r f‖²)^{1/2}
    pub h11: f64,
    /// ‖∂_r f‖ + ‖⟨log₋ r⟩^{−1} r^{−1} f‖
    pub h1_log: f64,
    /// ‖ |f|_{−1} ‖ with |f|_{−1} = max(|∂_r f|, |f|/r)
    pub weighted_minus1: f64,
    /// ‖ r f ‖
    pub r_weighted: f64,
}

impl ComplexField {
    /// Field from samples; panics if the length does not match the grid.
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>, m: i32) -> Self {
        assert_eq!(grid.len(), values.len(), "field length must match grid");
        Self { grid, values, m }
    }

    /// Zero field.
    pub fn zeros(grid: Arc<RadialGrid>, m: i32) -> Self {
        let n = grid.len();
        Self::new(grid, vec![Complex64::default(); n], m)
    }

    /// Field sampled from a closure of the radius.
    pub fn from_fn(grid: Arc<RadialGrid>, m: i32, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.radii().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, m)
    }

    /// Real field sampled from a closure.
    pub fn from_real_fn(grid: Arc<RadialGrid>, m: i32, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, m, |r| Complex64::new(f(r), 0.0))
    }

    /// Real field from samples.
    pub fn from_real(grid: Arc<RadialGrid>, values: &[f64], m: i32) -> Self {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), m)
    }

    /// The grid.
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// The samples.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable samples.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Consume into samples.
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Equivariance index.
    pub fn m(&self) -> i32 {
        self.m
    }

    /// Node radii.
    pub fn radii(&self) -> &[f64] {
        self.grid.radii()
    }

    /// Origin exponent `|m|` used by prefix integrals.
    pub fn origin_power(&self) -> f64 {
        self.m.unsigned_abs() as f64
    }

    /// Same grid and index with new samples.
    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self::new(self.grid.clone(), values, self.m)
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.radii().iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        self.with_values(values)
    }

    /// `a·self + b·other` (same grid).
    pub fn axpby(&self, a: Complex64, other: &ComplexField, b: Complex64) -> Self {
        assert!(Arc::ptr_eq(&self.grid, &other.grid) || self.grid.len() == other.grid.len());
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        self.with_values(values)
    }

    /// `self + other`.
    pub fn add(&self, other: &ComplexField) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    /// `self − other`.
    pub fn sub(&self, other: &ComplexField) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// `c · self`.
    pub fn scale(&self, c: Complex64) -> Self {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    /// `i · self`.
    pub fn times_i(&self) -> Self {
        self.scale(Complex64::new(0.0, 1.0))
    }

    /// Pointwise product with a real profile.
    pub fn mul_real(&self, w: &[f64]) -> Self {
        self.with_values(self.values.iter().zip(w).map(|(v, x)| v * x).collect())
    }

    /// Pointwise modulus squared.
    pub fn abs2(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Supremum of the modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    /// `∫ f = 2π ∫ f r dr`.
    pub fn integrate(&self) -> Complex64 {
        self.grid.integrate(&self.values, self.origin_power())
    }

    /// `r ↦ ∫₀^r f r' dr'`.
    pub fn cumulative_primitive(&self) -> ComplexField {
        let p = self.grid.prefix(&self.values, Measure::RdR, self.origin_power());
        self.with_values(p)
    }

    /// `r ↦ ∫_r^{r_max} f dr'/r'`, failing if `|f(r_max)| r_max` exceeds `tolerance`.
    pub fn tail_logweight(&self, tolerance: f64) -> Result<ComplexField> {
        let mass = self.grid.boundary_mass(self.values.last().map_or(0.0, |v| v.norm()));
        if mass > tolerance {
            return Err(CssError::BoundaryMass { mass, tolerance });
        }
        Ok(self.with_values(self.grid.suffix(&self.values, Measure::DrOverR)))
    }

    /// `∂_r f`.
    pub fn d_r(&self) -> ComplexField {
        self.with_values(self.grid.d_r(&self.values))
    }

    /// `Δ^{(m)} f` using the field's own index.
    pub fn laplacian(&self) -> ComplexField {
        self.with_values(self.grid.laplacian(&self.values, self.m))
    }

    /// `Λ f = r∂_r f + f`.
    pub fn scaling_gen(&self) -> ComplexField {
        self.with_values(self.grid.scaling_gen(&self.values))
    }

    /// Real inner product `(f, g)_r = ∫ Re(f̄ g)`.
    pub fn real_inner(&self, other: &ComplexField) -> f64 {
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a.conj() * b).re).collect();
        self.grid.integrate(&prod, self.origin_power() + other.origin_power())
    }

    /// `‖f‖²_{L²}`.
    pub fn l2_sq(&self) -> f64 {
        self.grid.integrate(&self.abs2(), 2.0 * self.origin_power())
    }

    /// `‖f‖_{L²}`.
    pub fn l2(&self) -> f64 {
        self.l2_sq().max(0.0).sqrt()
    }

    /// All norms of [`Norms`].
    pub fn norms(&self) -> Norms {
        let g = &self.grid;
        let radii = g.radii();
        let dr = g.d_r(&self.values);
        let m2 = (self.m * self.m) as f64;
        let p = 2.0 * self.origin_power();
        let dr2: Vec<f64> = dr.iter().map(|v| v.norm_sqr()).collect();
        let over_r2: Vec<f64> = self.values.iter().zip(radii).map(|(v, r)| v.norm_sqr() / (r * r)).collect();
        let l2_sq = self.l2_sq();
        let dr_sq = g.integrate(&dr2, (p - 2.0).max(0.0));
        let over_r_sq = g.integrate(&over_r2, (p - 2.0).max(0.0));
        let h1_dot_sq = dr_sq + m2 * over_r_sq;
        let r2: Vec<f64> = self.values.iter().zip(radii).map(|(v, r)| v.norm_sqr() * r * r).collect();
        let r_sq = g.integrate(&r2, p + 2.0);
        let log_w: Vec<f64> = self
            .values
            .iter()
            .zip(radii)
            .map(|(v, &r)| {
                let lm = (-r.ln()).max(0.0);
                v.norm_sqr() / (r * r * (1.0 + lm * lm))
            })
            .collect();
        let log_sq = g.integrate(&log_w, (p - 2.0).max(0.0));
        let minus1: Vec<f64> = dr
            .iter()
            .zip(&self.values)
            .zip(radii)
            .map(|((d, v), r)| d.norm().max(v.norm() / r).powi(2))
            .collect();
        let minus1_sq = g.integrate(&minus1, (p - 2.0).max(0.0));
        Norms {
            l2: l2_sq.max(0.0).sqrt(),
            h1_dot: h1_dot_sq.max(0.0).sqrt(),
            h11: (l2_sq + h1_dot_sq + r_sq).max(0.0).sqrt(),
            h1_log: dr_sq.max(0.0).sqrt() + log_sq.max(0.0).sqrt(),
            weighted_minus1: minus1_sq.max(0.0).sqrt(),
            r_weighted: r_sq.max(0.0).sqrt(),
        }
    }

    /// `f_{λ,γ}(r) = λ^{−1} e^{iγ} f(r/λ)`, sampled on `target` by interpolation.
    pub fn rescaled_onto(&self, lambda: f64, gamma: f64, target: &Arc<RadialGrid>) -> ComplexField {
        let phase = Complex64::from_polar(1.0 / lambda, gamma);
        let values = target
            .radii()
            .iter()
            .map(|&r| self.grid.interpolate(&self.values, r / lambda, self.origin_power()) * phase)
            .collect();
        ComplexField::new(target.clone(), values, self.m)
    }

    /// Samples interpolated onto another grid.
    pub fn resample(&self, target: &Arc<RadialGrid>) -> ComplexField {
        let values = self.grid.resample(&self.values, target, self.origin_power());
        ComplexField::new(target.clone(), values, self.m)
    }

    /// Write as CSV: a `# m=.. n=.. r_max=..` line, a `r,re,im` header, then one row per node.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = writer;
        writeln!(w, "# m={} n={} r_max={}", self.m, self.grid.len(), fmt_float(self.grid.r_max()))?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["r", "re", "im"])?;
        for (r, v) in self.radii().iter().zip(&self.values) {
            csv.write_record([fmt_float(*r), fmt_float(v.re), fmt_float(v.im)])?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Read samples written by [`ComplexField::write_csv`] onto an existing grid of the same size.
    pub fn read_csv<R: BufRead>(reader: R, grid: Arc<RadialGrid>) -> Result<ComplexField> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| CssError::Config("empty field file".into()))??;
        let m = header
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix("m="))
            .ok_or_else(|| CssError::Config("missing m= in field header".into()))?
            .parse::<i32>()
            .map_err(|e| CssError::Config(format!("bad m: {e}")))?;
        let rest: String = lines.collect::<std::io::Result<Vec<_>>>()?.join("\n");
        let mut rdr = csv::Reader::from_reader(rest.as_bytes());
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| CssError::Config("short row".into()))?
                    .parse::<f64>()
                    .map_err(|e| CssError::Config(format!("bad float: {e}")))
            };
            values.push(Complex64::new(parse(1)?, parse(2)?));
        }
        if values.len() != grid.len() {
            return Err(CssError::Config(format!("field has {} rows, grid has {}", values.len(), grid.len())));
        }
        Ok(ComplexField::new(grid, values, m))
    }
}

/// Round-trip float formatting used by every CSV writer.
pub fn fmt_float(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn vortex_field(g: &Arc<RadialGrid>) -> ComplexField {
        ComplexField::from_real_fn(g.clone(), 0, |r| 8f64.sqrt() / (1.0 + r * r))
    }

    #[test]
    fn mass_and_inner_products() {
        let g = Arc::new(RadialGrid::reference());
        let q = vortex_field(&g);
        assert!((q.l2_sq() / (8.0 * PI) - 1.0).abs() < 2e-4);
        assert!((q.real_inner(&q) - q.l2_sq()).abs() < 1e-12);
        assert!(q.real_inner(&q.times_i()).abs() < 1e-14);
        let lq = q.scaling_gen();
        // (Q, ΛQ) = π[r²Q²] at r_max = π·100²·8/(1+100²)² ≈ 8π·1e-4.
        let boundary = PI * 1e4 * 8.0 / (1.0f64 + 1e4).powi(2);
        assert!((q.real_inner(&lq) - boundary).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let g = Arc::new(RadialGrid::log(64, 1e-3, 10.0).unwrap());
        let f = ComplexField::from_fn(g.clone(), 2, |r| Complex64::new(r, -r * r));
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# m=2 n=64 r_max=1e1"));
        let back = ComplexField::read_csv(std::io::Cursor::new(buf), g).unwrap();
        assert_eq!(back.m(), 2);
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn zero_has_zero_norms() {
        let g = Arc::new(RadialGrid::reference());
        let n = ComplexField::zeros(g, 1).norms();
        assert_eq!(n.l2, 0.0);
        assert_eq!(n.h11, 0.0);
        assert_eq!(n.h1_log, 0.0);
    }
}
