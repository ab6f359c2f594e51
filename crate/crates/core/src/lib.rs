//! Amplitude envelope estimation for one-dimensional signals.
//!
//! The main estimator rectifies the signal, replaces every sample of each
//! non-overlapping bunch of `N` samples with the bunch maximum, and removes
//! the resulting staircase with a zero-phase Butterworth low-pass. The
//! envelope keeps the input's sample rate and is not attenuated the way a
//! rectify-and-smooth follower or a sliding RMS is.
//!
//! ```
//! use envelope_core::{three_step_envelope, EnvelopeParams, Signal};
//!
//! let fs = 44100.0;
//! let x: Vec<f64> = (0..4410)
//!     .map(|i| 0.8 * (2.0 * std::f64::consts::PI * 2000.0 * i as f64 / fs).sin())
//!     .collect();
//! let s = Signal::new(x, fs).unwrap();
//! let env = three_step_envelope(&s, &EnvelopeParams::new(35, 120.0, 4)).unwrap();
//! let mid = env.envelope.samples()[2205];
//! assert!((mid - 0.8).abs() < 0.04);
//! ```

pub mod audio_io;
pub mod bench;
pub mod design;
pub mod envelope;
mod error;
pub mod filtering;
pub mod metrics;
pub mod signal;
pub mod synth;

pub use design::{butterworth_lowpass, frequency_response, FilterDesign, FilterSpec, Section};
pub use envelope::{
    envelope_follower, envelope_hilbert, envelope_rms, three_step_envelope, three_step_trace, EnvelopeParams,
    EnvelopeResult, Method, MethodConfig, Preset, ThreeStepTrace,
};
pub use error::{Error, Result};
pub use filtering::{
    chunked_envelope_stream, filter_causal, filtfilt_zero_phase, filtfilt_zero_phase_with, EnvelopeStream,
    FilterState, PassOrder, ZeroPhaseOptions,
};
pub use metrics::{compare_methods, ComparisonReport, MethodRow, Reference};
pub use signal::{bunch_max, rectify, BunchSpec, Signal};
pub use synth::{generate, SyntheticKind, SyntheticSpec};
