//! Experiment drivers behind the `css-blowup` binary: run configuration,
//! subcommands, JSON summaries and CSV tables.

use crate::error::{CssError, Result};
use crate::evolver::{self, BlowupSettings, EvolverConfig, SimulationState, Stepper};
use crate::field::{fmt_float, ComplexField};
use crate::gauge::{self, EnergyForm};
use crate::grid::{RadialGrid, Spacing};
use crate::modulation::{
    self, closed_form_state, decompose, energy_functional, initial_data, mod_ode_integrate, modulation_tolerances,
    prescribed_diagnostics, rate_consistency, refined_params, AveragingWindow, DecomposeOptions, VORTEX_MASS,
};
use crate::radiation::{pseudoconformal, Radiation, RadiationSpec};
use crate::soliton::{build_ortho_profiles, lin_ops, solve_rho, vortex, RhoTable};
use crate::specfun::{self, gamma_complex};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Version of the JSON and CSV layouts.
pub const SCHEMA: u32 = 1;

/// Radial mesh family selected by `grid.kind`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Log-uniform nodes on `[10⁻⁶ r_max, r_max]`.
    Log,
    /// Uniform nodes `r_j = (j+1) r_max/n`.
    Uniform,
}

/// Validated `key=value` run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// `grid.n`
    pub grid_n: usize,
    /// `grid.r_max`
    pub grid_r_max: f64,
    /// `grid.kind`
    pub grid_kind: GridKind,
    /// `spec.q_re`, `spec.q_im`
    pub q: Complex64,
    /// `spec.nu_re`, `spec.nu_im`
    pub nu: Complex64,
    /// `time.tau`
    pub tau: f64,
    /// `time.window`
    pub window: f64,
    /// `solver.dt_max`
    pub dt_max: f64,
    /// `solver.c_cfl`
    pub c_cfl: f64,
    /// `out.dir`
    pub out_dir: PathBuf,
}

/// Recognized keys with their defaults and meaning.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("grid.n", "4096", "number of radial nodes"),
    ("grid.r_max", "100", "outer radius"),
    ("grid.kind", "log", "log | uniform"),
    ("spec.q_re", "1", "radiation amplitude, real part"),
    ("spec.q_im", "0", "radiation amplitude, imaginary part"),
    ("spec.nu_re", "2", "radiation exponent, real part (> 0)"),
    ("spec.nu_im", "0", "radiation exponent, imaginary part"),
    ("time.tau", "-0.1", "start time (< 0)"),
    ("time.window", "0.075", "forward window length (<= 3|tau|/4)"),
    ("solver.dt_max", "1e-4", "largest time step"),
    ("solver.c_cfl", "0.1", "step factor c in dt = min(dt_max, c lambda^2)"),
    ("out.dir", "out", "output directory"),
];

impl Default for RunConfig {
    fn default() -> Self {
        let mut cfg = Self {
            grid_n: 0,
            grid_r_max: 0.0,
            grid_kind: GridKind::Log,
            q: Complex64::new(0.0, 0.0),
            nu: Complex64::new(0.0, 0.0),
            tau: 0.0,
            window: 0.0,
            dt_max: 0.0,
            c_cfl: 0.0,
            out_dir: PathBuf::new(),
        };
        for (key, value, _) in KEYS {
            cfg.set(key, value).expect("defaults are valid");
        }
        cfg
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| CssError::Config(format!("{key}: not a number: {value:?}")))?;
    if !x.is_finite() {
        return Err(CssError::Config(format!("{key}: must be finite")));
    }
    Ok(x)
}

impl RunConfig {
    /// Parse `key=value` lines (`#` starts a comment) on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CssError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            if seen.insert(key.to_string(), ()).is_some() {
                return Err(CssError::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
            cfg.set(key, value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and parse a configuration file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CssError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Set one key (unknown keys are rejected).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grid.n" => {
                self.grid_n = value.parse().map_err(|_| CssError::Config(format!("grid.n: not an integer: {value:?}")))?
            }
            "grid.r_max" => self.grid_r_max = parse_f64(key, value)?,
            "grid.kind" => {
                self.grid_kind = match value {
                    "log" => GridKind::Log,
                    "uniform" => GridKind::Uniform,
                    _ => return Err(CssError::Config(format!("grid.kind: expected log or uniform, got {value:?}"))),
                }
            }
            "spec.q_re" => self.q.re = parse_f64(key, value)?,
            "spec.q_im" => self.q.im = parse_f64(key, value)?,
            "spec.nu_re" => self.nu.re = parse_f64(key, value)?,
            "spec.nu_im" => self.nu.im = parse_f64(key, value)?,
            "time.tau" => self.tau = parse_f64(key, value)?,
            "time.window" => self.window = parse_f64(key, value)?,
            "solver.dt_max" => self.dt_max = parse_f64(key, value)?,
            "solver.c_cfl" => self.c_cfl = parse_f64(key, value)?,
            "out.dir" => {
                if value.is_empty() {
                    return Err(CssError::Config("out.dir: empty".into()));
                }
                self.out_dir = PathBuf::from(value)
            }
            _ => return Err(CssError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Check ranges.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(CssError::Config(msg.to_string()));
        if self.grid_n < crate::grid::MIN_NODES {
            return fail("grid.n is too small");
        }
        if !(self.grid_r_max > 0.0) {
            return fail("grid.r_max must be positive");
        }
        if self.q == Complex64::new(0.0, 0.0) {
            return fail("spec.q must be nonzero");
        }
        if !(self.nu.re > 0.0) {
            return fail("spec.nu_re must be positive");
        }
        if !(self.tau < 0.0 && self.tau > -1.0) {
            return fail("time.tau must lie in (-1, 0)");
        }
        if !(self.window > 0.0 && self.window <= 0.75 * self.tau.abs()) {
            return fail("time.window must lie in (0, 3|tau|/4]");
        }
        if !(self.dt_max > 0.0 && self.c_cfl > 0.0) {
            return fail("solver.dt_max and solver.c_cfl must be positive");
        }
        Ok(())
    }

    /// Working grid: log on `[10⁻⁶ r_max, r_max]` or uniform.
    pub fn grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(match self.grid_kind {
            GridKind::Log => RadialGrid::log(self.grid_n, 1e-6 * self.grid_r_max, self.grid_r_max)?,
            GridKind::Uniform => RadialGrid::uniform(self.grid_n, self.grid_r_max)?,
        }))
    }

    /// Grid for runs carrying a concentrated soliton: log on `[10⁻⁹ r_max, r_max]`.
    pub fn blowup_grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::log(self.grid_n, 1e-9 * self.grid_r_max, self.grid_r_max)?))
    }

    /// Radiation parameters.
    pub fn spec(&self) -> Result<RadiationSpec> {
        RadiationSpec::new(self.q, self.nu)
    }

    /// Time-stepping configuration.
    pub fn evolver(&self) -> EvolverConfig {
        EvolverConfig { dt_max: self.dt_max, c_cfl: self.c_cfl, ..Default::default() }
    }

    /// Text for `--help`.
    pub fn help_text() -> String {
        let mut s = String::from("Configuration keys (key=value, one per line, '#' comments):\n");
        for (k, d, doc) in KEYS {
            s.push_str(&format!("  {k:<14} default {d:<7} {doc}\n"));
        }
        s
    }
}

/// Subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Vortex identities.
    SolitonCheck,
    /// Connection coefficient of the self-similar ODE.
    SpecfunCheck,
    /// Radiation profile and its approach to the initial profile.
    RadiationBuild,
    /// Modulation ODE against the closed-form rates.
    ModOde,
    /// Decomposition of the prescribed data.
    Decompose,
    /// Conservation run.
    Evolve,
    /// Blow-up tracking experiment.
    BlowupVerify,
    /// Pseudoconformal transform.
    Transform,
}

impl Command {
    /// All subcommands in a fixed order.
    pub const ALL: [Command; 8] = [
        Command::SolitonCheck,
        Command::SpecfunCheck,
        Command::RadiationBuild,
        Command::ModOde,
        Command::Decompose,
        Command::Evolve,
        Command::BlowupVerify,
        Command::Transform,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Command::SolitonCheck => "soliton-check",
            Command::SpecfunCheck => "specfun-check",
            Command::RadiationBuild => "radiation-build",
            Command::ModOde => "mod-ode",
            Command::Decompose => "decompose",
            Command::Evolve => "evolve",
            Command::BlowupVerify => "blowup-verify",
            Command::Transform => "transform",
        }
    }

    /// Look up by command-line name.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Options that are not part of the run configuration.
#[derive(Clone, Debug, Default)]
pub struct CommandOptions {
    /// Field CSV to use instead of the built-in data (`decompose`, `evolve`, `transform`).
    pub input: Option<PathBuf>,
    /// Override of `ν` (`specfun-check`).
    pub nu: Option<Complex64>,
    /// Length of the conservation run (`evolve`), default 1.
    pub duration: Option<f64>,
}

/// One pass/fail item of a summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Quantity name.
    pub name: String,
    /// Measured value.
    pub value: f64,
    /// Inclusive lower bound, if any.
    pub min: Option<f64>,
    /// Inclusive upper bound, if any.
    pub max: Option<f64>,
    /// Whether the value lies within the bounds.
    pub pass: bool,
}

impl Check {
    /// `value ≤ max`.
    pub fn at_most(name: &str, value: f64, max: f64) -> Self {
        Self::within(name, value, None, Some(max))
    }

    /// `min ≤ value ≤ max`.
    pub fn between(name: &str, value: f64, min: f64, max: f64) -> Self {
        Self::within(name, value, Some(min), Some(max))
    }

    /// `value ≥ min`.
    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Self::within(name, value, Some(min), None)
    }

    /// A boolean condition.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, min: Some(1.0), max: None, pass: ok }
    }

    fn within(name: &str, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        let pass = value.is_finite() && min.map_or(true, |m| value >= m) && max.map_or(true, |m| value <= m);
        Self { name: name.into(), value, min, max, pass }
    }
}

/// JSON summary of one subcommand run.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    /// Layout version.
    pub schema: u32,
    /// Subcommand name.
    pub command: String,
    /// Effective configuration.
    pub config: RunConfig,
    /// Checks covered by the subcommand.
    pub checks: Vec<Check>,
    /// Reported quantities.
    pub data: BTreeMap<String, Value>,
    /// Whether every check passed.
    pub pass: bool,
}

/// A CSV table produced by a subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File name inside the output directory.
    pub file: String,
    /// Full file contents.
    pub contents: String,
}

/// Summary plus tables.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    /// JSON summary.
    pub summary: Summary,
    /// CSV tables.
    pub tables: Vec<Table>,
}

impl CommandOutput {
    /// Pretty-printed JSON of the summary (with a trailing newline).
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)? + "\n")
    }

    /// Names of failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.summary.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

struct Builder {
    command: Command,
    config: RunConfig,
    checks: Vec<Check>,
    data: BTreeMap<String, Value>,
    tables: Vec<Table>,
}

impl Builder {
    fn new(command: Command, config: &RunConfig) -> Self {
        Self { command, config: config.clone(), checks: Vec::new(), data: BTreeMap::new(), tables: Vec::new() }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|x| fmt_float(*x)))?;
        }
        let bytes = w.into_inner().map_err(|e| CssError::Io(e.into_error()))?;
        self.tables.push(Table {
            file: format!("{}_{name}.csv", self.command.name()),
            contents: String::from_utf8(bytes).expect("csv output is utf-8"),
        });
        Ok(())
    }

    fn field_table(&mut self, name: &str, field: &ComplexField) -> Result<()> {
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        self.tables.push(Table {
            file: format!("{}_{name}.csv", self.command.name()),
            contents: String::from_utf8(buf).expect("csv output is utf-8"),
        });
        Ok(())
    }

    fn finish(self) -> CommandOutput {
        let pass = self.checks.iter().all(|c| c.pass);
        CommandOutput {
            summary: Summary {
                schema: SCHEMA,
                command: self.command.name().to_string(),
                config: self.config,
                checks: self.checks,
                data: self.data,
                pass,
            },
            tables: self.tables,
        }
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn read_input(path: &Path, grid: Arc<RadialGrid>) -> Result<ComplexField> {
    let file = fs::File::open(path).map_err(|e| CssError::Config(format!("{}: {e}", path.display())))?;
    ComplexField::read_csv(std::io::BufReader::new(file), grid)
}

/// Run one subcommand.
pub fn run(command: Command, config: &RunConfig, options: &CommandOptions) -> Result<CommandOutput> {
    config.validate()?;
    let mut b = Builder::new(command, config);
    match command {
        Command::SolitonCheck => soliton_check(&mut b)?,
        Command::SpecfunCheck => specfun_check(&mut b, options.nu.unwrap_or(config.nu))?,
        Command::RadiationBuild => radiation_build(&mut b)?,
        Command::ModOde => mod_ode(&mut b)?,
        Command::Decompose => decompose_cmd(&mut b, options)?,
        Command::Evolve => evolve_cmd(&mut b, options)?,
        Command::BlowupVerify => blowup_verify(&mut b)?,
        Command::Transform => transform(&mut b, options)?,
    }
    Ok(b.finish())
}

/// Write the summary (`<command>.json`) and tables into `dir`, each file atomically.
pub fn write_output(output: &CommandOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![(format!("{}.json", output.summary.command), output.summary_json()?)];
    files.extend(output.tables.iter().map(|t| (t.file.clone(), t.contents.clone())));
    let mut written = Vec::new();
    for (name, contents) in files {
        let target = dir.join(&name);
        let tmp = dir.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)?;
        written.push(target);
    }
    Ok(written)
}

fn soliton_check(b: &mut Builder) -> Result<()> {
    // The r^-2 tail of Q needs a wide domain for the charge and the ρ relations;
    // the inner radius controls the one-sided derivative at the first node.
    let r_max = b.config.grid_r_max.max(1e4);
    let grid = Arc::new(RadialGrid::log(b.config.grid_n, 1e-4, r_max)?);
    let q = vortex(0, &grid).field;
    let mass = gauge::mass(&q);
    let energy = gauge::energy(&q, EnergyForm::SelfDual);
    let dq = gauge::bogomolnyi(&q);
    let rho = solve_rho(0, &grid)?;
    let ops = lin_ops(0, &grid);
    let half_rq = q.map(|r, v| v * (0.5 * r));
    let l_rho = ops.l(&rho.field).sub(&half_rq).l2() / half_rq.l2();
    let big_l_rho = ops.big_l(&rho.field).sub(&q).l2() / q.l2();
    let dq_max = dq.max_abs() / q.max_abs();
    b.put("grid", json!({"kind": "log", "n": grid.len(), "r_min": grid.r_min(), "r_max": grid.r_max()}));
    b.put("M_Q", mass);
    b.check(Check::at_most("E_Q", energy.abs(), 1e-8 * mass));
    b.check(Check::between("M_Q_over_8pi", mass / VORTEX_MASS, 1.0 - 1e-6, 1.0 + 1e-6));
    b.check(Check::at_most("DQ_Q_max_rel", dq_max, 1e-8));
    b.check(Check::at_most("LQ_rho_resid", l_rho, 1e-6));
    b.check(Check::at_most("calLQ_rho_resid", big_l_rho, 1e-5));
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .step_by(8)
        .map(|j| vec![grid.radii()[j], q.values()[j].re, rho.field.values()[j].re, dq.values()[j].norm()])
        .collect();
    b.table("profiles", &["r", "Q", "rho", "abs_DQ_Q"], &rows)
}

fn specfun_check(b: &mut Builder, nu: Complex64) -> Result<()> {
    let conn = specfun::connection(nu, -2)?;
    let half_gamma = 0.5 * gamma_complex(nu / 2.0 + 2.0)?;
    let kappa_rel = (conn.kappa - conn.kappa_closed).norm() / conn.kappa_closed.norm();
    b.put("nu", complex_json(nu));
    b.put("p", complex_json(conn.p));
    b.put("alpha", complex_json(conn.alpha));
    b.put("alpha_closed", complex_json(conn.alpha_closed));
    b.put("kappa", complex_json(conn.kappa));
    b.put("kappa_closed", complex_json(conn.kappa_closed));
    b.check(Check::at_most("window_residual", conn.window_residual, 1e-6));
    b.check(Check::at_most("kappa_rel_err", kappa_rel, 1e-6));
    b.check(Check::at_most("p_vs_half_gamma", (conn.p - half_gamma).norm() / half_gamma.norm(), 1e-12));
    let mut rows = Vec::new();
    for k in 0..=48 {
        let y = 4.0 + 0.25 * k as f64;
        let f1 = specfun::eval_f1(nu, -2, y)?;
        let e1 = specfun::eval_e1(nu, -2, y)?;
        rows.push(vec![y, f1.re, f1.im, e1.re, e1.im]);
    }
    b.table("profiles", &["Y", "f1_re", "f1_im", "e1_re", "e1_im"], &rows)
}

fn radiation_build(b: &mut Builder) -> Result<()> {
    let spec = b.config.spec()?;
    let grid = b.config.grid()?;
    let rad = Radiation::new(spec, grid.clone())?;
    let tau = b.config.tau;
    let z = rad.z(tau)?;
    let zstar = ComplexField::from_fn(grid.clone(), -2, |r| spec.initial_profile(r));
    let zstar_h11 = zstar.norms().h11;
    let residual = rad.residual_report(tau, 1e-5)?;
    b.put("gamma_z_tau", rad.gamma_z(tau)?);
    b.put("z_l2_tau", z.l2());
    b.put("psi_z_l2_tau", residual.psi_z_l2);
    b.put("z_star_h11", zstar_h11);
    let mut ladder = Vec::new();
    for t in [-1e-2, -1e-3, -1e-4] {
        let d = rad.z(t)?.sub(&zstar).norms().h11;
        ladder.push(vec![t, d, d / zstar_h11]);
    }
    let decreasing = ladder.windows(2).all(|w| w[1][1] < w[0][1]);
    b.put("h11_distance_ladder", ladder.iter().map(|r| json!({"t": r[0], "distance": r[1]})).collect::<Vec<_>>());
    b.check(Check::holds("h11_distance_decreasing", decreasing));
    b.check(Check::at_most("h11_distance_final_rel", ladder[2][2], 0.05));
    b.table("ladder", &["t", "h11_distance", "relative"], &ladder)?;
    b.field_table("z_tau", &z)
}

fn mod_ode(b: &mut Builder) -> Result<()> {
    let (q, nu) = (b.config.q, b.config.nu);
    let tau = b.config.tau;
    let t_end = tau + b.config.window;
    let start = closed_form_state(q, nu, tau)?;
    b.put("rate_consistency_tau", rate_consistency(q, nu, tau)?);
    match mod_ode_integrate(q, nu, start, t_end, modulation_tolerances()) {
        Ok(traj) => {
            let last = *traj.last().expect("trajectory is nonempty");
            let mut min_ratio = f64::INFINITY;
            for s in &traj {
                min_ratio = min_ratio.min(s.lambda / closed_form_state(q, nu, s.t)?.lambda);
            }
            b.put("lambda_ratio_min", min_ratio);
            b.put("t_end", last.t);
            let cf = closed_form_state(q, nu, last.t)?;
            let phase = modulation::wrap_phase(last.gamma - cf.gamma).abs();
            b.check(Check::between("lambda_ratio_end", last.lambda / cf.lambda, 0.95, 1.05));
            b.check(Check::at_most("phase_offset_end", phase, 0.05));
            let stride = (traj.len() / 400).max(1);
            let mut rows = Vec::new();
            for (k, s) in traj.iter().enumerate() {
                if k % stride == 0 || k + 1 == traj.len() {
                    let c = closed_form_state(q, nu, s.t)?;
                    rows.push(vec![s.t, s.lambda, s.gamma, s.b, s.eta, c.lambda, c.gamma, c.b, c.eta]);
                }
            }
            b.table(
                "trajectory",
                &["t", "lambda", "gamma", "b", "eta", "lambda_cf", "gamma_cf", "b_cf", "eta_cf"],
                &rows,
            )?;
        }
        Err(e) => {
            b.put("failure", e.to_string());
            b.check(Check::holds("integration_completed", false));
        }
    }
    Ok(())
}

fn decompose_cmd(b: &mut Builder, options: &CommandOptions) -> Result<()> {
    let spec = b.config.spec()?;
    let tau = b.config.tau;
    let grid = b.config.blowup_grid()?;
    let rho = Arc::new(RhoTable::new(0)?);
    let ortho_grid = Arc::new(RadialGrid::log(4096, 1e-3, 1e3)?);
    let ortho = build_ortho_profiles(&ortho_grid, rho.clone())?;
    let rad = Radiation::new(spec, grid.clone())?;
    let data = initial_data(&rad, tau, &rho)?;
    let u = match &options.input {
        Some(path) => read_input(path, grid.clone())?,
        None => data.u.clone(),
    };
    let guess = (data.state.lambda, data.state.gamma);
    let dec = decompose(&u, Some(&data.z), data.gamma_z, &ortho, guess, DecomposeOptions::default())?;
    let refined = refined_params(&dec, tau, AveragingWindow::default(), &rho)?;
    let energy = energy_functional(&u, Some(&data.z), data.gamma_z, &dec);
    b.put("lambda", dec.lambda);
    b.put("gamma", dec.gamma);
    b.put("iterations", dec.iterations);
    b.put("eps_l2", dec.eps_l2);
    b.put("eps_h1", dec.eps_h1);
    b.put("refined", json!({
        "b": refined.b, "eta": refined.eta, "zeta": complex_json(refined.zeta), "B0": refined.b0,
        "B_range": refined.b_range, "averaging_weight": refined.averaging_weight, "P": refined.p_surrogate,
    }));
    b.put("energy", json!({
        "E_cal": energy.cal_e, "E_u": energy.energy_u, "E_soliton_radiation": energy.energy_soliton_radiation,
        "pairing": energy.pairing, "linearized": energy.linearized,
    }));
    let ortho_norm = dec.ortho_resid[0].abs().max(dec.ortho_resid[1].abs());
    b.check(Check::at_most("ortho_resid", ortho_norm, 1e-9 * dec.eps_l2.max(1.0)));
    if options.input.is_none() {
        b.check(Check::at_most("lambda_rel_err", (dec.lambda / data.state.lambda - 1.0).abs(), 1e-8));
        let ygrid = Arc::new(RadialGrid::log(2 * b.config.grid_n, 1e-4, 100.0 * data.state.b0())?);
        let diag = prescribed_diagnostics(spec.q, spec.nu, tau, &ygrid, &rho, &ortho)?;
        let band = 5.0 / diag.b0.ln();
        b.put("prescribed", diag);
        b.check(Check::between("virial_ratio", diag.virial_ratio, 1.0 - band, 1.0 + band));
        b.check(Check::between("linearized_ratio", diag.linearized_ratio, 1.0 - band, 1.0 + band));
    }
    let eps_grid = dec.eps.grid().clone();
    let rows: Vec<Vec<f64>> = (0..eps_grid.len())
        .step_by(8)
        .map(|j| vec![eps_grid.radii()[j], dec.eps.values()[j].re, dec.eps.values()[j].im])
        .collect();
    b.table("eps", &["y", "re", "im"], &rows)
}

fn evolve_cmd(b: &mut Builder, options: &CommandOptions) -> Result<()> {
    let grid = b.config.grid()?;
    let u0 = match &options.input {
        Some(path) => read_input(path, grid.clone())?,
        None => ComplexField::from_fn(grid.clone(), 0, |r| 1.5 * (-r * r).exp() * Complex64::new(1.0, 0.3 * r * r)),
    };
    let duration = options.duration.unwrap_or(1.0);
    if !(duration > 0.0) {
        return Err(CssError::Config("duration must be positive".into()));
    }
    let config = EvolverConfig { monitor_stride: 20, ..b.config.evolver() };
    let stepper = Stepper::new(grid.clone(), u0.m(), &config)?;
    let mut state = SimulationState::new(0.0, u0);
    evolver::evolve(&mut state, &stepper, duration, &config, |_| 1.0)?;
    let report = evolver::conservation_report(&state);
    b.put("duration", duration);
    b.put("steps", state.steps);
    b.put("evolver", config);
    b.check(Check::at_most("mass_drift_per_time", report.mass_drift_per_time, 1e-8));
    b.check(Check::at_most("energy_drift_per_time", report.energy_drift_per_time, 1e-6));
    b.check(Check::at_most("virial_mismatch", report.virial_mismatch, 5e-3));
    let rows: Vec<Vec<f64>> =
        state.rows.iter().map(|r| vec![r.t, r.mass, r.energy, r.second_moment, r.virial_rate]).collect();
    b.table("diagnostics", &["t", "mass", "energy", "second_moment", "virial_rate"], &rows)?;
    b.field_table("final", &state.u)
}

fn blowup_verify(b: &mut Builder) -> Result<()> {
    let spec = b.config.spec()?;
    let settings = BlowupSettings {
        tau: b.config.tau,
        window: b.config.window,
        nodes: b.config.grid_n,
        r_min: 1e-9 * b.config.grid_r_max,
        r_max: b.config.grid_r_max,
        ..Default::default()
    };
    let config = EvolverConfig { monitor_stride: 1000, ..b.config.evolver() };
    let traj = evolver::blowup_experiment(spec, settings, &config)?;
    b.put("settings", settings);
    b.put("evolver", config);
    b.put("steps", traj.steps);
    b.put("stopped", &traj.stopped);
    b.put("monitor_rows", traj.rows.len());
    let lo = traj.rows.iter().map(|r| r.lambda_ratio).fold(f64::INFINITY, f64::min);
    let hi = traj.rows.iter().map(|r| r.lambda_ratio).fold(f64::NEG_INFINITY, f64::max);
    let eps_excess = traj.rows.iter().map(|r| r.eps_l2 / r.eps_band).fold(0.0, f64::max);
    b.check(Check::holds("window_completed", traj.stopped.is_none() && traj.rows.len() == settings.monitors + 1));
    b.check(Check::at_least("lambda_ratio_min", lo, 0.5));
    b.check(Check::at_most("lambda_ratio_max", hi, 1.5));
    b.check(Check::at_most("eps_over_band_max", eps_excess, 1.0));
    let rows: Vec<Vec<f64>> = traj
        .rows
        .iter()
        .map(|r| {
            vec![
                r.t, r.lambda, r.gamma, r.b, r.eta, r.b0, r.zeta_re, r.zeta_im, r.e_cal, r.p, r.mass, r.energy,
                r.eps_l2, r.eps_h1, r.lambda_ratio, r.b_ratio, r.eps_band,
            ]
        })
        .collect();
    b.table(
        "trajectory",
        &[
            "t", "lambda", "gamma", "b", "eta", "B0", "zeta_re", "zeta_im", "E_cal", "P", "mass", "energy", "eps_l2",
            "eps_h1", "lambda_ratio", "b_ratio", "eps_band",
        ],
        &rows,
    )
}

fn transform(b: &mut Builder, options: &CommandOptions) -> Result<()> {
    let tau = b.config.tau;
    let (u, grid) = match &options.input {
        Some(path) => {
            let grid = b.config.grid()?;
            (read_input(path, grid.clone())?, grid)
        }
        None => {
            let grid = b.config.grid()?;
            let u = ComplexField::from_fn(grid.clone(), 0, |r| Complex64::new(1.0, 0.5 * r) * (-r * r).exp());
            (u, grid)
        }
    };
    let (v, t_prime) = pseudoconformal(&u, tau)?;
    let (back, t_back) = pseudoconformal(&v, t_prime)?;
    let mass_rel = (gauge::mass(&v) / gauge::mass(&u) - 1.0).abs();
    let involution = back.sub(&u).l2() / u.l2();
    b.put("t", tau);
    b.put("t_prime", t_prime);
    b.put("t_back", t_back);
    b.put("grid", json!({"kind": match grid.spacing() { Spacing::Log => "log", Spacing::Uniform => "uniform" }, "n": grid.len()}));
    b.check(Check::at_most("mass_rel_change", mass_rel, 1e-6));
    b.check(Check::at_most("involution_rel_err", involution, 1e-6));
    b.field_table("transformed", &v)
}
