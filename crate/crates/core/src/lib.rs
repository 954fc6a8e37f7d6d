//! Backward sensing through reconfigurable intelligent surfaces (RIS).
//!
//! The crate models how a set of phase-configurable reflecting panels
//! aggregates fields radiated from a region of interest (RoI) into scalar
//! receiver measurements, assembles the resulting linear sensing operators,
//! inverts them (least squares for phased data, reweighted Wirtinger flow
//! for magnitude-only data) and analyses their rank and conditioning.
//!
//! Module map:
//!
//! * [`geometry`]: directions, panel layouts, RoI grids.
//! * [`forward_model`]: per-element spherical-wave aggregation, phase books, noise.
//! * [`operator`]: far-field factored sensing operators (single, dedicated, shared).
//! * [`reconstruction`]: least squares, RWF, DoA peak picking.
//! * [`spectral`]: rank bounds, Vandermonde singular values, Marchenko–Pastur tools.
//! * [`metrics`]: relative error and SSIM.
//! * [`harness`]: scenario files, experiment runs, sweeps and artifact output.
//! * [`cli`]: command implementations behind the `risense` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod forward_model;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod operator;
pub mod reconstruction;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Crate version recorded in run artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wavelength in meters for a carrier frequency in Hz.
pub fn wavelength_for(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}
