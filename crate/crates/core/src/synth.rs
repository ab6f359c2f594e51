//! Test signals with analytically known envelopes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// `(1 + d sin(2 pi fm t)) sin(2 pi fc t) / (1 + d)`.
    AmTone,
    /// The AM modulator applied to the mean of several unit carriers.
    MultiCarrierAm,
    /// AM on a linear chirp from the first to the last carrier frequency.
    ChirpAm,
    /// Uniform white noise in `[-1, 1]` gated by half-wave bursts at the
    /// modulator rate: `(1 - d) + d max(0, sin(2 pi fm t))`.
    NoiseBurst,
}

impl SyntheticKind {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::AmTone => "am_tone",
            SyntheticKind::MultiCarrierAm => "multi_carrier_am",
            SyntheticKind::ChirpAm => "chirp_am",
            SyntheticKind::NoiseBurst => "noise_burst",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            SyntheticKind::AmTone,
            SyntheticKind::MultiCarrierAm,
            SyntheticKind::ChirpAm,
            SyntheticKind::NoiseBurst,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown signal kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    /// One carrier for `am_tone`; all carriers for `multi_carrier_am`;
    /// start and end frequency for `chirp_am`. Ignored by `noise_burst`.
    pub carriers_hz: Vec<f64>,
    pub modulator_hz: f64,
    pub depth: f64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn am_tone(carrier_hz: f64, modulator_hz: f64, depth: f64, duration_s: f64, sample_rate_hz: f64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::AmTone,
            carriers_hz: vec![carrier_hz],
            modulator_hz,
            depth,
            duration_s,
            sample_rate_hz,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSynthSpec(msg));
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return bad(format!("sample rate must be positive, got {}", self.sample_rate_hz));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) || self.is_empty() {
            return bad(format!("duration must be positive, got {} s", self.duration_s));
        }
        if !(0.0..=1.0).contains(&self.depth) {
            return bad(format!("depth must lie in [0, 1], got {}", self.depth));
        }
        if !(self.modulator_hz.is_finite() && self.modulator_hz >= 0.0) {
            return bad(format!("modulator must be non-negative, got {} Hz", self.modulator_hz));
        }
        let nyquist = self.sample_rate_hz / 2.0;
        let needed = match self.kind {
            SyntheticKind::AmTone => Some(1),
            SyntheticKind::ChirpAm => Some(2),
            SyntheticKind::MultiCarrierAm => None,
            SyntheticKind::NoiseBurst => return Ok(()),
        };
        match needed {
            Some(n) if self.carriers_hz.len() != n => {
                return bad(format!("{} needs {n} carrier frequencies, got {}", self.kind, self.carriers_hz.len()))
            }
            None if self.carriers_hz.is_empty() => return bad(format!("{} needs at least one carrier", self.kind)),
            _ => {}
        }
        for &c in &self.carriers_hz {
            if !(c.is_finite() && c > 0.0 && c < nyquist) {
                return bad(format!("carrier {c} Hz must lie in (0, {nyquist}) Hz"));
            }
            if self.modulator_hz >= c {
                return bad(format!("modulator {} Hz must be below carrier {c} Hz", self.modulator_hz));
            }
        }
        Ok(())
    }
}

/// Returns `(signal, true envelope)`, both of the same length and rate.
pub fn generate(spec: &SyntheticSpec) -> Result<(Signal, Signal)> {
    spec.validate()?;
    let fs = spec.sample_rate_hz;
    let n = spec.len();
    let (d, fm) = (spec.depth, spec.modulator_hz);
    let am = |t: f64| (1.0 + d * (2.0 * PI * fm * t).sin()) / (1.0 + d);

    let mut signal = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    match spec.kind {
        SyntheticKind::AmTone => {
            let fc = spec.carriers_hz[0];
            for i in 0..n {
                let t = i as f64 / fs;
                let m = am(t);
                signal.push(m * (2.0 * PI * fc * t).sin());
                truth.push(m);
            }
        }
        SyntheticKind::MultiCarrierAm => {
            let k = spec.carriers_hz.len() as f64;
            for i in 0..n {
                let t = i as f64 / fs;
                let m = am(t);
                let carrier: f64 = spec.carriers_hz.iter().map(|f| (2.0 * PI * f * t).sin()).sum();
                signal.push(m * carrier / k);
                truth.push(m);
            }
        }
        SyntheticKind::ChirpAm => {
            let (f0, f1) = (spec.carriers_hz[0], spec.carriers_hz[1]);
            let rate = (f1 - f0) / spec.duration_s;
            for i in 0..n {
                let t = i as f64 / fs;
                let m = am(t);
                signal.push(m * (2.0 * PI * (f0 * t + 0.5 * rate * t * t)).sin());
                truth.push(m);
            }
        }
        SyntheticKind::NoiseBurst => {
            let mut rng = rand::rngs::StdRng::seed_from_u64(spec.seed);
            for i in 0..n {
                let t = i as f64 / fs;
                let m = (1.0 - d) + d * (2.0 * PI * fm * t).sin().max(0.0);
                signal.push(m * rng.gen_range(-1.0..=1.0));
                truth.push(m);
            }
        }
    }
    Ok((Signal::from_parts(signal, fs), Signal::from_parts(truth, fs)))
}
