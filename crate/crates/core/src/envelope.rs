//! The four envelope estimators.
//!
//! [`three_step_envelope`] rectifies, replaces each non-overlapping bunch by
//! its maximum and smooths the staircase with a zero-phase Butterworth
//! low-pass. The baselines are the rectify-and-smooth follower, a centered
//! sliding RMS and the analytic-signal magnitude.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::design::{butterworth_lowpass, FilterDesign, FilterSpec, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::filtering::filtfilt_zero_phase;
use crate::signal::{bunch_max, rectify, BunchSpec, Signal};

/// Tuning knobs of the three-step method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    pub bunch_size: usize,
    pub cutoff_hz: f64,
    pub filter_order: usize,
}

impl Default for EnvelopeParams {
    /// 50 samples, 150 Hz, 4th order.
    fn default() -> Self {
        EnvelopeParams {
            bunch_size: 50,
            cutoff_hz: 150.0,
            filter_order: DEFAULT_ORDER,
        }
    }
}

impl EnvelopeParams {
    pub fn new(bunch_size: usize, cutoff_hz: f64, filter_order: usize) -> Self {
        EnvelopeParams {
            bunch_size,
            cutoff_hz,
            filter_order,
        }
    }

    pub fn bunch(&self) -> Result<BunchSpec> {
        BunchSpec::new(self.bunch_size)
    }

    pub fn design(&self, sample_rate_hz: f64) -> Result<FilterDesign> {
        butterworth_lowpass(&FilterSpec::new(
            self.filter_order,
            self.cutoff_hz,
            sample_rate_hz,
        )?)
    }
}

/// Parameter rows tuned for recordings at 44.1 kHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Canary,
    Whale,
    Speech,
    Piano,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Canary, Preset::Whale, Preset::Speech, Preset::Piano];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Canary => "canary",
            Preset::Whale => "whale",
            Preset::Speech => "speech",
            Preset::Piano => "piano",
        }
    }

    /// `(bunch size in samples, cutoff in Hz)`.
    pub fn values(self) -> (usize, f64) {
        match self {
            Preset::Canary => (35, 300.0),
            Preset::Whale => (50, 300.0),
            Preset::Speech => (50, 100.0),
            Preset::Piano => (200, 100.0),
        }
    }

    pub fn params(self) -> EnvelopeParams {
        let (bunch_size, cutoff_hz) = self.values();
        EnvelopeParams::new(bunch_size, cutoff_hz, DEFAULT_ORDER)
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ThreeStep,
    Follower,
    Rms,
    Hilbert,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ThreeStep => "three_step",
            Method::Follower => "follower",
            Method::Rms => "rms",
            Method::Hilbert => "hilbert",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "three_step" => Ok(Method::ThreeStep),
            "follower" => Ok(Method::Follower),
            "rms" => Ok(Method::Rms),
            "hilbert" => Ok(Method::Hilbert),
            _ => Err(format!("unknown method '{s}'")),
        }
    }
}

/// A method together with the parameters it runs with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodConfig {
    ThreeStep(EnvelopeParams),
    Follower { cutoff_hz: f64, order: usize },
    Rms { window_samples: usize },
    Hilbert,
}

impl MethodConfig {
    pub fn method(&self) -> Method {
        match self {
            MethodConfig::ThreeStep(_) => Method::ThreeStep,
            MethodConfig::Follower { .. } => Method::Follower,
            MethodConfig::Rms { .. } => Method::Rms,
            MethodConfig::Hilbert => Method::Hilbert,
        }
    }

    /// Compact, comma-free description such as `N=35;fc=120Hz;order=4`.
    pub fn summary(&self) -> String {
        match self {
            MethodConfig::ThreeStep(p) => format!(
                "N={};fc={}Hz;order={}",
                p.bunch_size, p.cutoff_hz, p.filter_order
            ),
            MethodConfig::Follower { cutoff_hz, order } => {
                format!("fc={cutoff_hz}Hz;order={order}")
            }
            MethodConfig::Rms { window_samples } => format!("window={window_samples}"),
            MethodConfig::Hilbert => "-".to_string(),
        }
    }

    pub fn run(&self, s: &Signal) -> Result<EnvelopeResult> {
        match *self {
            MethodConfig::ThreeStep(p) => three_step_envelope(s, &p),
            MethodConfig::Follower { cutoff_hz, order } => envelope_follower(s, cutoff_hz, order),
            MethodConfig::Rms { window_samples } => envelope_rms(s, window_samples),
            MethodConfig::Hilbert => envelope_hilbert(s),
        }
    }
}

/// An envelope at the input's sample rate, tagged with how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub envelope: Signal,
    pub config: MethodConfig,
}

impl EnvelopeResult {
    pub fn method(&self) -> Method {
        self.config.method()
    }
}

/// Intermediate signals of the three-step method, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStepTrace {
    pub rectified: Signal,
    pub staircase: Signal,
    pub envelope: Signal,
}

pub fn three_step_trace(s: &Signal, p: &EnvelopeParams) -> Result<ThreeStepTrace> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let design = p.design(s.sample_rate())?;
    let rectified = rectify(s);
    let staircase = bunch_max(&rectified, p.bunch()?)?;
    let envelope = filtfilt_zero_phase(&design, &staircase)?;
    Ok(ThreeStepTrace {
        rectified,
        staircase,
        envelope,
    })
}

/// Rectify, bunch-max, zero-phase low-pass.
pub fn three_step_envelope(s: &Signal, p: &EnvelopeParams) -> Result<EnvelopeResult> {
    let trace = three_step_trace(s, p)?;
    Ok(EnvelopeResult {
        envelope: trace.envelope,
        config: MethodConfig::ThreeStep(*p),
    })
}

/// Rectify, then zero-phase low-pass.
pub fn envelope_follower(s: &Signal, cutoff_hz: f64, order: usize) -> Result<EnvelopeResult> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let design = butterworth_lowpass(&FilterSpec::new(order, cutoff_hz, s.sample_rate())?)?;
    let envelope = filtfilt_zero_phase(&design, &rectify(s))?;
    Ok(EnvelopeResult {
        envelope,
        config: MethodConfig::Follower { cutoff_hz, order },
    })
}

/// Centered sliding RMS. The window spans `i - w/2 .. i - w/2 + w` and is
/// truncated at the signal edges.
pub fn envelope_rms(s: &Signal, window_samples: usize) -> Result<EnvelopeResult> {
    if window_samples < 1 {
        return Err(Error::InvalidWindow);
    }
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let x = s.samples();
    let n = x.len();
    // compensated prefix sums keep long signals accurate
    let mut prefix = Vec::with_capacity(n + 1);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    prefix.push(0.0);
    for v in x {
        let term = v * v - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        prefix.push(sum);
    }
    let back = window_samples / 2;
    let out = (0..n)
        .map(|i| {
            let start = i as isize - back as isize;
            let lo = start.max(0) as usize;
            let hi = ((start + window_samples as isize) as usize).min(n);
            let mean = (prefix[hi] - prefix[lo]).max(0.0) / (hi - lo) as f64;
            mean.sqrt()
        })
        .collect();
    Ok(EnvelopeResult {
        envelope: Signal::from_parts(out, s.sample_rate()),
        config: MethodConfig::Rms { window_samples },
    })
}

/// Analytic signal via FFT: negative-frequency bins zeroed, strictly
/// positive bins doubled, DC and Nyquist kept.
pub fn analytic_signal(s: &Signal) -> Result<Vec<Complex64>> {
    let n = s.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = s.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    // bins 1..=(n-1)/2 are strictly positive; for even n, n/2 is Nyquist
    let last_positive = (n - 1) / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            continue;
        } else if k <= last_positive {
            *c *= 2.0;
        } else {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Ok(buf)
}

/// Magnitude of the analytic signal. Error grows near both ends since no
/// window is applied.
pub fn envelope_hilbert(s: &Signal) -> Result<EnvelopeResult> {
    let analytic = analytic_signal(s)?;
    let out = analytic.iter().map(|c| c.norm()).collect();
    Ok(EnvelopeResult {
        envelope: Signal::from_parts(out, s.sample_rate()),
        config: MethodConfig::Hilbert,
    })
}
