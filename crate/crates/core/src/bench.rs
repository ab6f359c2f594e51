//! Wall-clock timing of the full three-step pipeline.

use std::time::Duration;

use crate::envelope::{three_step_envelope, EnvelopeParams};
use crate::error::Result;
use crate::metrics::{time_median, TIMED_RUNS};
use crate::synth::{generate, SyntheticSpec};

/// Budget for 1.5 s of 44.1 kHz audio.
pub const DEFAULT_BUDGET: Duration = Duration::from_millis(500);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub samples: usize,
    pub params: EnvelopeParams,
    /// Median of [`TIMED_RUNS`] runs after one warmup.
    pub median: Duration,
}

impl BenchResult {
    pub fn passes(&self, budget: Duration) -> bool {
        self.median < budget
    }
}

/// Times the three-step envelope of a 2 kHz AM tone of `duration_s` seconds.
pub fn bench_three_step(duration_s: f64, sample_rate_hz: f64, params: &EnvelopeParams) -> Result<BenchResult> {
    let (signal, _) = generate(&SyntheticSpec::am_tone(2000.0, 5.0, 0.5, duration_s, sample_rate_hz))?;
    let (_, median) = time_median(TIMED_RUNS, || three_step_envelope(&signal, params))?;
    Ok(BenchResult {
        samples: signal.len(),
        params: *params,
        median,
    })
}
