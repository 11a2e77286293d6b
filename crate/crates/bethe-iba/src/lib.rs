//! Purely-real solutions of the quantum KdV Bethe ansatz equations.
//!
//! This crate solves the counting-function form of the Bethe ansatz
//! equations for excited states indexed by integer partitions, via a
//! contractive fixed-point iteration around an explicit WKB linearization,
//! and cross-checks the resulting Bethe roots against Schrödinger spectra
//! of the corresponding anharmonic-oscillator potentials with apparent
//! singularities.
//!
//! Module map:
//! - [`special`]: the α-dependent kernel pair (K_α, F_α), their norms, and
//!   the incomplete trigonometric moment Φ used by every analytic tail.
//! - [`partitions`]: integer partitions, hole sets, and their dictionary.
//! - [`wkb`]: turning points, the action S, its scaled form τ, and the
//!   closed-form linearized counting function l̄.
//! - [`iba`]: the nonlinear solver — exact ceiling-function convolutions,
//!   the fixed-point map, root extraction, and residual verification.
//! - [`odeim`]: the ODE side — monster potentials from Hermite Wronskians,
//!   eigenvalues by shooting, and the quantitative spectral comparison.
//! - [`cli`]: the `bethe-iba` command-line front end.

pub mod cli;
pub mod error;
pub mod iba;
pub mod numerics;
pub mod odeim;
pub mod partitions;
pub mod special;
pub mod wkb;

pub use error::{Error, Result};
