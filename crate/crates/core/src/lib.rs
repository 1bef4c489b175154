//! Photon-statistics workbench for single-photon emitters.
//!
//! The crate covers the whole chain from a rate-equation emitter model to the
//! quantities one reports about a single-photon source:
//!
//! * [`emitter`]: two- and three-level rate models, steady states, closed-form g²(τ)
//! * [`sim`]: event-driven photon emission and a detector chain producing time tags
//! * [`correlator`]: Hanbury Brown–Twiss coincidence histograms and g² normalization
//! * [`estimators`]: antibunching, k_T(P), saturation and level-scheme fits
//! * [`spectrum`]: zero-phonon-line fitting and ZPL intensity fraction
//! * [`io`]: the time-tag, histogram and spectrum file formats
//! * [`pipeline`]: simulate → correlate → fit sweeps used by the CLI and tests

// NaN-rejecting range checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlator;
pub mod emitter;
pub mod error;
pub mod estimators;
pub mod io;
pub mod lm;
pub mod pipeline;
pub mod sim;
pub mod spectrum;

pub use error::{Error, Result};

/// Picoseconds per second.
pub const PS_PER_S: f64 = 1e12;
