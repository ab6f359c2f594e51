//! Running a [`FilterDesign`] over a [`Signal`]: causal single pass with
//! explicit state, zero-phase forward-backward, and the bunch-aligned
//! streaming envelope.

use crate::design::{FilterDesign, Section};
use crate::error::{Error, Result};
use crate::signal::{bunch_max, rectify, BunchSpec, Signal};

/// Delay line of a section cascade in transposed direct form II,
/// two values per section.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    delays: Vec<f64>,
}

impl FilterState {
    /// All-zero state sized for `design`.
    pub fn new(design: &FilterDesign) -> Self {
        FilterState {
            delays: vec![0.0; 2 * design.sections().len()],
        }
    }

    pub fn from_delays(delays: Vec<f64>) -> Self {
        FilterState { delays }
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    /// State the cascade settles into after an infinitely long constant
    /// input of value `level`.
    pub fn steady(design: &FilterDesign, level: f64) -> Self {
        let mut delays = Vec::with_capacity(2 * design.sections().len());
        let mut input = level;
        for s in design.sections() {
            // fixed point of y = b0 u + z1, z1 = b1 u - a1 y + z2, z2 = b2 u - a2 y
            let output = s.dc_gain() * input;
            delays.push(output - s.b0 * input);
            delays.push(s.b2 * input - s.a2 * output);
            input = output;
        }
        FilterState { delays }
    }

    fn check(&self, design: &FilterDesign) -> Result<()> {
        let expected = 2 * design.sections().len();
        if self.delays.len() != expected {
            return Err(Error::StateDimensionMismatch {
                expected,
                actual: self.delays.len(),
            });
        }
        Ok(())
    }
}

fn run_section(s: &Section, z: &mut [f64], data: &mut [f64]) {
    let (mut z1, mut z2) = (z[0], z[1]);
    for x in data.iter_mut() {
        let u = *x;
        let y = s.b0 * u + z1;
        z1 = s.b1 * u - s.a1 * y + z2;
        z2 = s.b2 * u - s.a2 * y;
        *x = y;
    }
    z[0] = z1;
    z[1] = z2;
}

fn run_cascade(design: &FilterDesign, state: &mut FilterState, data: &mut [f64]) {
    for (s, z) in design.sections().iter().zip(state.delays.chunks_mut(2)) {
        run_section(s, z, data);
    }
}

/// Causal filtering; the returned state continues the recurrence on the next chunk.
pub fn filter_causal(
    design: &FilterDesign,
    s: &Signal,
    state: FilterState,
) -> Result<(Signal, FilterState)> {
    state.check(design)?;
    let mut state = state;
    let mut data = s.samples().to_vec();
    run_cascade(design, &mut state, &mut data);
    Ok((Signal::from_parts(data, s.sample_rate()), state))
}

/// Pass ordering of the zero-phase filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PassOrder {
    /// Forward pass, then backward pass.
    ForwardBackward,
    /// Mean of forward-then-backward and backward-then-forward. Edge
    /// transients become mirror images of each other, so filtering a
    /// reversed signal gives exactly the reversed output.
    #[default]
    Symmetric,
}

/// Tuning of [`filtfilt_zero_phase_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ZeroPhaseOptions {
    /// Odd-reflection pad per side; `None` uses [`default_pad_len`].
    pub pad_len: Option<usize>,
    pub order: PassOrder,
}

/// `3 * (2 * order + 1)` samples.
pub fn default_pad_len(design: &FilterDesign) -> usize {
    3 * (2 * design.order() + 1)
}

/// Zero-phase filtering with the default pad and pass ordering.
pub fn filtfilt_zero_phase(design: &FilterDesign, s: &Signal) -> Result<Signal> {
    filtfilt_zero_phase_with(design, s, ZeroPhaseOptions::default())
}

pub fn filtfilt_zero_phase_with(
    design: &FilterDesign,
    s: &Signal,
    opts: ZeroPhaseOptions,
) -> Result<Signal> {
    let pad = opts.pad_len.unwrap_or_else(|| default_pad_len(design));
    let x = s.samples();
    if x.len() <= pad || x.is_empty() {
        return Err(Error::SignalTooShort { len: x.len(), pad });
    }
    let padded = odd_extend(x, pad);
    let mut out = match opts.order {
        PassOrder::ForwardBackward => forward_backward(design, padded),
        PassOrder::Symmetric => {
            let mut reversed = padded.clone();
            reversed.reverse();
            let fb = forward_backward(design, padded);
            let mut bf = forward_backward(design, reversed);
            bf.reverse();
            fb.iter().zip(&bf).map(|(a, b)| 0.5 * (a + b)).collect()
        }
    };
    out.truncate(pad + x.len());
    out.drain(..pad);
    Ok(Signal::from_parts(out, s.sample_rate()))
}

/// Extends both ends by `2 x[end] - x[end -/+ k]`, `k = 1..=pad`.
fn odd_extend(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n + 2 * pad);
    out.extend((1..=pad).rev().map(|k| 2.0 * x[0] - x[k]));
    out.extend_from_slice(x);
    out.extend((1..=pad).map(|k| 2.0 * x[n - 1] - x[n - 1 - k]));
    out
}

fn forward_backward(design: &FilterDesign, mut data: Vec<f64>) -> Vec<f64> {
    let mut state = FilterState::steady(design, data[0]);
    run_cascade(design, &mut state, &mut data);
    data.reverse();
    let mut state = FilterState::steady(design, data[0]);
    run_cascade(design, &mut state, &mut data);
    data.reverse();
    data
}

/// Offline causal three-step pipeline: rectify, bunch-max, single-pass filter.
pub fn causal_envelope(design: &FilterDesign, spec: BunchSpec, s: &Signal) -> Result<Signal> {
    let staircase = bunch_max(&rectify(s), spec)?;
    let (out, _) = filter_causal(design, &staircase, FilterState::new(design))?;
    Ok(out)
}

/// Incremental causal envelope over bunch-aligned chunks.
///
/// Output carries the filter's group delay; it is not zero-phase.
#[derive(Debug, Clone)]
pub struct EnvelopeStream<'a> {
    design: &'a FilterDesign,
    spec: BunchSpec,
    state: FilterState,
    sample_rate: Option<f64>,
}

impl<'a> EnvelopeStream<'a> {
    pub fn new(design: &'a FilterDesign, spec: BunchSpec) -> Self {
        EnvelopeStream {
            design,
            spec,
            state: FilterState::new(design),
            sample_rate: None,
        }
    }

    pub fn push(&mut self, chunk: &Signal) -> Result<Signal> {
        let n = self.spec.bunch_size();
        if chunk.is_empty() || !chunk.len().is_multiple_of(n) {
            return Err(Error::ChunkNotBunchAligned {
                len: chunk.len(),
                bunch: n,
            });
        }
        match self.sample_rate {
            Some(rate) if rate != chunk.sample_rate() => {
                return Err(Error::InconsistentSampleRate {
                    expected: rate,
                    actual: chunk.sample_rate(),
                })
            }
            _ => self.sample_rate = Some(chunk.sample_rate()),
        }
        let staircase = bunch_max(&rectify(chunk), self.spec)?;
        let mut data = staircase.into_samples();
        run_cascade(self.design, &mut self.state, &mut data);
        Ok(Signal::from_parts(data, chunk.sample_rate()))
    }

    pub fn state(&self) -> &FilterState {
        &self.state
    }
}

/// Runs [`EnvelopeStream`] over `chunks`, one output chunk per input chunk.
pub fn chunked_envelope_stream<'s>(
    design: &FilterDesign,
    spec: BunchSpec,
    chunks: impl IntoIterator<Item = &'s Signal>,
) -> Result<Vec<Signal>> {
    let mut stream = EnvelopeStream::new(design, spec);
    chunks.into_iter().map(|c| stream.push(c)).collect()
}
