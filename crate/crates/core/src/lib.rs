//! Phase-amplitude coupling (PAC) detection with modulatory component analysis.
//!
//! The crate is organised bottom-up:
//!
//! - [`signal`]: sampled series, the FFT analytic signal, instantaneous
//!   amplitude, phase and frequency.
//! - [`filters`]: constant-bandwidth Gabor kernels, proportional-bandwidth
//!   Morlet kernels, zero-phase FFT convolution and the MCA triplet filter.
//! - [`synthesis`]: 1/f noise by spectral synthesis and the pure-PAC
//!   benchmark generator.
//! - [`spectral`]: Welch PSD and magnitude-squared coherence.
//! - [`measures`]: PLV, MCA-PAC and the four reference estimators
//!   (EPS, MVL, CV, KLD).
//! - [`comodulogram`]: full (m, n) matrices, normalisation, peak finding and
//!   localisation error, with a shared filter-bank cache.
//! - [`io`] and [`cli`]: file formats and the `pac-lab` command line.
//!
//! ```
//! use pac_lab::synthesis::{synth_pac, SynthesisSpec};
//! use pac_lab::measures::{mca_pac, MeasureConfig};
//!
//! let spec = SynthesisSpec::new(8.0, 45.0).with_duration(6.0);
//! let parts = synth_pac(&spec).unwrap();
//! let value = mca_pac(&parts.composite, 8.0, 45.0, &MeasureConfig::default()).unwrap();
//! assert!(value > 0.9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comodulogram;
pub mod error;
mod fft;
pub mod filters;
pub mod io;
pub mod measures;
pub mod signal;
pub mod spectral;
pub mod synthesis;

pub use error::{Error, Result};
pub use signal::{ComplexSeries, Signal};
