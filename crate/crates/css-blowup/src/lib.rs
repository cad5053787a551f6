//! Numerical toolkit for the radial self-dual Chern–Simons–Schrödinger equation.
//!
//! The crate covers radial grids and quadrature ([`grid`], [`field`]), the
//! nonlocal gauge nonlinearity ([`gauge`]), the Jackiw–Pi vortex and its
//! linearization ([`soliton`]), special functions of the self-similar
//! radiation problem ([`specfun`]), the radiation construction ([`radiation`]),
//! modulation diagnostics ([`modulation`]), a split-step evolver ([`evolver`])
//! and the experiment drivers behind the `css-blowup` binary ([`cli`]).

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cutoff;
pub mod cli;
pub mod error;
pub mod evolver;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod modulation;
pub mod ode;
pub mod quadrature;
pub mod radiation;
pub mod soliton;
pub mod specfun;

pub use error::{CssError, Result};
pub use field::ComplexField;
pub use grid::RadialGrid;
