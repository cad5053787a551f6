//! C interface to `css-blowup`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions and
//! released by the matching `*_free`. Every fallible function returns a
//! [`CssStatus`]; on failure a human-readable message is stored per thread and can
//! be copied out with [`css_last_error_message`]. Panics never cross the boundary:
//! they are caught and reported as [`CssStatus::Panic`].
//!
//! Complex arrays are passed as separate real and imaginary `double` arrays.

#![allow(clippy::missing_safety_doc)]

use css_blowup::cli::{self, Command, CommandOptions, RunConfig};
use css_blowup::evolver::{EvolverConfig, Stepper};
use css_blowup::gauge::{self, AtVariant, EnergyForm};
use css_blowup::modulation;
use css_blowup::soliton;
use css_blowup::{ComplexField, CssError, RadialGrid};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CssStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A numerical argument was outside its admissible range.
    InvalidArgument = 3,
    /// A configuration key or value was rejected.
    Config = 4,
    /// A solver failed (non-convergence, step failure, tube violation, ...).
    Numerical = 5,
    /// Reading or writing files failed.
    Io = 6,
    /// The caller's buffer is too small; the required size was reported.
    BufferTooSmall = 7,
    /// A command ran to completion but at least one of its checks failed.
    ChecksFailed = 8,
    /// An internal panic was caught.
    Panic = 9,
}

/// Opaque radial grid.
pub struct CssGrid(Arc<RadialGrid>);

/// Opaque complex field on a grid.
pub struct CssField(ComplexField);

/// Opaque split-step evolver bound to a grid and equivariance index.
pub struct CssStepper(Stepper);

/// Opaque run configuration for the experiment commands.
pub struct CssConfig(RunConfig);

/// Modulation parameters `(t, λ, γ, b, η)` of the closed-form blow-up law.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CssModState {
    /// Time.
    pub t: f64,
    /// Scale `λ > 0`.
    pub lambda: f64,
    /// Phase `γ`.
    pub gamma: f64,
    /// Real part of `b + iη`.
    pub b: f64,
    /// Imaginary part of `b + iη`.
    pub eta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
}

fn status_of(err: &CssError) -> CssStatus {
    match err {
        CssError::Config(_) => CssStatus::Config,
        CssError::InvalidGrid(_) | CssError::InvalidParameter(_) => CssStatus::InvalidArgument,
        CssError::Io(_) | CssError::Csv(_) | CssError::Json(_) => CssStatus::Io,
        _ => CssStatus::Numerical,
    }
}

/// Run `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (CssStatus, String)>) -> CssStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            CssStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            CssStatus::Panic
        }
    }
}

type Fallible<T> = Result<T, (CssStatus, String)>;

fn lift<T>(r: css_blowup::Result<T>) -> Fallible<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(ptr: *const T, name: &str) -> Fallible<&'a T> {
    ptr.as_ref().ok_or_else(|| (CssStatus::NullPointer, format!("{name} is null")))
}

unsafe fn deref_mut<'a, T>(ptr: *mut T, name: &str) -> Fallible<&'a mut T> {
    ptr.as_mut().ok_or_else(|| (CssStatus::NullPointer, format!("{name} is null")))
}

unsafe fn string<'a>(ptr: *const c_char, name: &str) -> Fallible<&'a str> {
    if ptr.is_null() {
        return Err((CssStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| (CssStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Fallible<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err((CssStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a>(ptr: *mut f64, len: usize, name: &str) -> Fallible<&'a mut [f64]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err((CssStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Fallible<()> {
    if out.is_null() {
        return Err((CssStatus::NullPointer, "output handle pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copy `text` plus a terminating NUL into `buf` (capacity `cap` bytes) and report
/// the required capacity in `needed` when it is non-null.
unsafe fn copy_out(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Fallible<()> {
    let required = text.len() + 1;
    if !needed.is_null() {
        *needed = required;
    }
    if buf.is_null() || cap < required {
        return Err((CssStatus::BufferTooSmall, format!("buffer of {cap} bytes, {required} needed")));
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

/// Static description of a status code (never null, NUL-terminated).
#[no_mangle]
pub extern "C" fn css_status_name(status: CssStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CssStatus::Ok => b"ok\0",
        CssStatus::NullPointer => b"null pointer\0",
        CssStatus::InvalidUtf8 => b"invalid UTF-8\0",
        CssStatus::InvalidArgument => b"invalid argument\0",
        CssStatus::Config => b"configuration error\0",
        CssStatus::Numerical => b"numerical failure\0",
        CssStatus::Io => b"i/o error\0",
        CssStatus::BufferTooSmall => b"buffer too small\0",
        CssStatus::ChecksFailed => b"checks failed\0",
        CssStatus::Panic => b"internal panic\0",
    };
    s.as_ptr() as *const c_char
}

/// Copy the message of the last failed call on this thread into `buf`.
///
/// Returns the message length in bytes (excluding the NUL). At most `cap − 1`
/// bytes are copied; the copy is always NUL-terminated when `cap > 0`.
#[no_mangle]
pub unsafe extern "C" fn css_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let mut n = msg.len().min(cap - 1);
            while !msg.is_char_boundary(n) {
                n -= 1;
            }
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Logarithmic grid with `n` nodes on `[r_min, r_max]`.
#[no_mangle]
pub unsafe extern "C" fn css_grid_new_log(n: usize, r_min: f64, r_max: f64, out: *mut *mut CssGrid) -> CssStatus {
    guard(|| put(out, CssGrid(Arc::new(lift(RadialGrid::log(n, r_min, r_max))?))))
}

/// Uniform cell-centred grid with `n` nodes on `(0, r_max]`.
#[no_mangle]
pub unsafe extern "C" fn css_grid_new_uniform(n: usize, r_max: f64, out: *mut *mut CssGrid) -> CssStatus {
    guard(|| put(out, CssGrid(Arc::new(lift(RadialGrid::uniform(n, r_max))?))))
}

/// Number of nodes (0 for a null handle).
#[no_mangle]
pub unsafe extern "C" fn css_grid_len(grid: *const CssGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copy the node radii into `out` (capacity `cap`).
#[no_mangle]
pub unsafe extern "C" fn css_grid_radii(grid: *const CssGrid, out: *mut f64, cap: usize) -> CssStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        let dst = slice_mut(out, cap, "out")?;
        if cap < g.len() {
            return Err((CssStatus::BufferTooSmall, format!("capacity {cap}, {} nodes", g.len())));
        }
        dst[..g.len()].copy_from_slice(g.radii());
        Ok(())
    })
}

/// Release a grid. Fields and steppers built on it keep their own reference.
#[no_mangle]
pub unsafe extern "C" fn css_grid_free(grid: *mut CssGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Field with index `m` from `len = css_grid_len(grid)` real and imaginary parts.
#[no_mangle]
pub unsafe extern "C" fn css_field_new(
    grid: *const CssGrid,
    m: i32,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CssField,
) -> CssStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        if len != g.len() {
            return Err((CssStatus::InvalidArgument, format!("{len} values for a grid of {} nodes", g.len())));
        }
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        put(out, CssField(ComplexField::new(g.clone(), values, m)))
    })
}

/// The Jackiw–Pi vortex `Q` (index 0) sampled on `grid`.
#[no_mangle]
pub unsafe extern "C" fn css_field_vortex(grid: *const CssGrid, out: *mut *mut CssField) -> CssStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        put(out, CssField(soliton::vortex(0, g).field))
    })
}

/// Number of samples (0 for a null handle).
#[no_mangle]
pub unsafe extern "C" fn css_field_len(field: *const CssField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copy the samples into `re` and `im` (capacity `cap` each).
#[no_mangle]
pub unsafe extern "C" fn css_field_values(field: *const CssField, re: *mut f64, im: *mut f64, cap: usize) -> CssStatus {
    guard(|| {
        let values = deref(field, "field")?.0.values();
        let re = slice_mut(re, cap, "re")?;
        let im = slice_mut(im, cap, "im")?;
        if cap < values.len() {
            return Err((CssStatus::BufferTooSmall, format!("capacity {cap}, {} samples", values.len())));
        }
        for (j, v) in values.iter().enumerate() {
            re[j] = v.re;
            im[j] = v.im;
        }
        Ok(())
    })
}

/// Mass `∫|u|² 2πr dr` of a field.
#[no_mangle]
pub unsafe extern "C" fn css_field_mass(field: *const CssField, out: *mut f64) -> CssStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        *deref_mut(out, "out")? = gauge::mass(f);
        Ok(())
    })
}

/// Energy of a field in its self-dual form.
#[no_mangle]
pub unsafe extern "C" fn css_field_energy(field: *const CssField, out: *mut f64) -> CssStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        *deref_mut(out, "out")? = gauge::energy(f, EnergyForm::SelfDual);
        Ok(())
    })
}

/// Release a field.
#[no_mangle]
pub unsafe extern "C" fn css_field_free(field: *mut CssField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Evolver for index `m` on `grid`. A nonzero `phase_rotated` selects the temporal
/// potential of the phase-rotated radiation equation.
#[no_mangle]
pub unsafe extern "C" fn css_stepper_new(
    grid: *const CssGrid,
    m: i32,
    phase_rotated: i32,
    out: *mut *mut CssStepper,
) -> CssStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        let variant = if phase_rotated != 0 { AtVariant::PhaseRotated } else { AtVariant::Standard };
        let config = EvolverConfig { variant, ..EvolverConfig::default() };
        put(out, CssStepper(lift(Stepper::new(g.clone(), m, &config))?))
    })
}

/// Advance `field` in place by `steps` Strang steps of size `dt`.
#[no_mangle]
pub unsafe extern "C" fn css_stepper_advance(
    stepper: *const CssStepper,
    field: *mut CssField,
    dt: f64,
    steps: usize,
) -> CssStatus {
    guard(|| {
        let s = &deref(stepper, "stepper")?.0;
        let f = &mut deref_mut(field, "field")?.0;
        if !Arc::ptr_eq(s.grid(), f.grid()) && s.grid().radii() != f.grid().radii() {
            return Err((CssStatus::InvalidArgument, "field and stepper live on different grids".into()));
        }
        if f.m() != s.m() {
            return Err((CssStatus::InvalidArgument, format!("field index {} differs from stepper index {}", f.m(), s.m())));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err((CssStatus::InvalidArgument, format!("step {dt} must be finite and nonzero")));
        }
        for _ in 0..steps {
            lift(s.step(f, dt))?;
        }
        Ok(())
    })
}

/// Release a stepper.
#[no_mangle]
pub unsafe extern "C" fn css_stepper_free(stepper: *mut CssStepper) {
    if !stepper.is_null() {
        drop(Box::from_raw(stepper));
    }
}

/// Configuration with every key at its default.
#[no_mangle]
pub unsafe extern "C" fn css_config_new(out: *mut *mut CssConfig) -> CssStatus {
    guard(|| put(out, CssConfig(RunConfig::default())))
}

/// Parse a `key = value` configuration text (`#` starts a comment).
#[no_mangle]
pub unsafe extern "C" fn css_config_parse(text: *const c_char, out: *mut *mut CssConfig) -> CssStatus {
    guard(|| {
        let text = string(text, "text")?;
        put(out, CssConfig(lift(RunConfig::parse(text))?))
    })
}

/// Set one key; the whole configuration is revalidated.
#[no_mangle]
pub unsafe extern "C" fn css_config_set(config: *mut CssConfig, key: *const c_char, value: *const c_char) -> CssStatus {
    guard(|| {
        let cfg = &mut deref_mut(config, "config")?.0;
        let key = string(key, "key")?;
        let value = string(value, "value")?;
        let mut next = cfg.clone();
        lift(next.set(key, value))?;
        lift(next.validate())?;
        *cfg = next;
        Ok(())
    })
}

/// Release a configuration.
#[no_mangle]
pub unsafe extern "C" fn css_config_free(config: *mut CssConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run an experiment command (`"soliton-check"`, `"mod-ode"`, ...) with default options.
///
/// The JSON summary is copied into `json` (capacity `cap`); `needed` receives the
/// required capacity. When `out_dir` is non-null the summary and tables are also
/// written there. Returns [`CssStatus::ChecksFailed`] when the command completed
/// but a check failed; the summary is still delivered. A short buffer takes
/// precedence and yields [`CssStatus::BufferTooSmall`].
#[no_mangle]
pub unsafe extern "C" fn css_run(
    config: *const CssConfig,
    command: *const c_char,
    out_dir: *const c_char,
    json: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> CssStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let name = string(command, "command")?;
        let command =
            Command::from_name(name).ok_or_else(|| (CssStatus::InvalidArgument, format!("unknown command {name:?}")))?;
        let output = lift(cli::run(command, cfg, &CommandOptions::default()))?;
        if !out_dir.is_null() {
            lift(cli::write_output(&output, Path::new(string(out_dir, "out_dir")?)))?;
        }
        copy_out(&lift(output.summary_json())?, json, cap, needed)?;
        if !output.summary.pass {
            return Err((CssStatus::ChecksFailed, format!("failed checks: {}", output.failures().join(", "))));
        }
        Ok(())
    })
}

/// Closed-form modulation parameters for amplitude `q`, exponent `ν` at time `t ∈ (−1, 0)`.
#[no_mangle]
pub unsafe extern "C" fn css_closed_form(
    q_re: f64,
    q_im: f64,
    nu_re: f64,
    nu_im: f64,
    t: f64,
    out: *mut CssModState,
) -> CssStatus {
    guard(|| {
        let s = lift(modulation::closed_form_state(Complex64::new(q_re, q_im), Complex64::new(nu_re, nu_im), t))?;
        *deref_mut(out, "out")? = CssModState { t: s.t, lambda: s.lambda, gamma: s.gamma, b: s.b, eta: s.eta };
        Ok(())
    })
}
