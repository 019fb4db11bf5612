//! Exponential integration of stiff isobaric chemical kinetics.
//!
//! - [`kinetics`]: mechanisms, thermodynamics, source terms and Jacobians.
//! - [`phi`]: `phi`-function products by adaptive Krylov projection.
//! - [`integrator`]: the adaptive exponential integrator.
//! - [`diagnostics`]: Jacobian spectra and per-step cost.
//! - [`io`]: mechanism and run-config formats, CSV output.
//! - [`harness`]: run, sweep and spectrum drivers used by the CLI.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod harness;
pub mod integrator;
pub mod io;
pub mod kinetics;
pub mod phi;
