//! Exact Fock-space simulation of polarization-encoded photonic qutrits.
//!
//! States are sparse maps from occupation vectors to complex amplitudes.
//! Optical elements act by substituting creation operators, detectors
//! project and renormalize, and the [`circuits`] module assembles the
//! heralding constructions on top of those primitives. [`cglmp`] evaluates
//! the CGLMP inequality for qutrit pairs measured with linear optics.

pub mod cglmp;
pub mod circuits;
pub mod detection;
pub mod elements;
mod error;
pub mod fock;
pub mod matrix;
pub mod simplex;

pub use error::{Error, Result};
pub use fock::{Occupation, Polarization, PureState};

pub use num_complex::Complex64;
