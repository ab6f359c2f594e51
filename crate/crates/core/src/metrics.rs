//! Tracking metrics and the method comparison report.

use std::fmt;
use std::time::{Duration, Instant};

use crate::envelope::{three_step_envelope, EnvelopeParams, Method, MethodConfig};
use crate::error::{Error, Result};
use crate::signal::Signal;

/// Runs timed per method: one warmup, then the median of this many.
pub const TIMED_RUNS: usize = 5;

/// Index range of the central 80% of `len` samples.
pub fn central_window(len: usize) -> std::ops::Range<usize> {
    let margin = len / 10;
    margin..len - margin
}

/// `rms(estimate - truth) / rms(truth)` over the central 80%.
pub fn relative_rmse(estimate: &[f64], truth: &[f64]) -> f64 {
    let w = central_window(truth.len());
    let (mut err, mut norm) = (0.0, 0.0);
    for (e, t) in estimate[w.clone()].iter().zip(&truth[w]) {
        err += (e - t) * (e - t);
        norm += t * t;
    }
    if err == 0.0 {
        0.0
    } else {
        (err / norm).sqrt()
    }
}

/// Peak of the estimate over peak of the truth, central 80%.
pub fn peak_ratio(estimate: &[f64], truth: &[f64]) -> f64 {
    let w = central_window(truth.len());
    let peak = |x: &[f64]| x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    peak(&estimate[w.clone()]) / peak(&truth[w])
}

/// Mean of the estimate over mean of the truth, central 80%.
pub fn mean_ratio(estimate: &[f64], truth: &[f64]) -> f64 {
    let w = central_window(truth.len());
    estimate[w.clone()].iter().sum::<f64>() / truth[w].iter().sum::<f64>()
}

/// What the metrics are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// A known envelope; metrics are errors.
    GroundTruth,
    /// The three-step envelope of the same input; metrics are relative
    /// deviations, not accuracy.
    ThreeStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub config: MethodConfig,
    pub rmse_rel: f64,
    pub peak_ratio: f64,
    pub mean_ratio: f64,
    pub runtime_ms: f64,
}

impl MethodRow {
    pub fn method(&self) -> Method {
        self.config.method()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub reference: Reference,
    pub rows: Vec<MethodRow>,
}

impl ComparisonReport {
    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method() == method)
    }

    pub const CSV_HEADER: &'static str = "method,param_summary,rmse_rel,peak_ratio,mean_ratio,runtime_ms";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.method(),
                r.config.summary(),
                r.rmse_rel,
                r.peak_ratio,
                r.mean_ratio,
                r.runtime_ms
            ));
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (label, note) = match self.reference {
            Reference::GroundTruth => ("rmse_rel", "reference = ground truth"),
            Reference::ThreeStep => ("dev_rel", "reference = three_step (relative, not accuracy)"),
        };
        writeln!(f, "{note}")?;
        writeln!(
            f,
            "{:<11} {:<24} {:>10} {:>10} {:>10} {:>11}",
            "method", "params", label, "peak", "mean", "runtime_ms"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<11} {:<24} {:>10.4} {:>10.4} {:>10.4} {:>11.3}",
                r.method().tag(),
                r.config.summary(),
                r.rmse_rel,
                r.peak_ratio,
                r.mean_ratio,
                r.runtime_ms
            )?;
        }
        Ok(())
    }
}

/// Median wall time of `runs` calls after one warmup call.
pub fn time_median<T>(runs: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, Duration)> {
    let mut last = f()?;
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        last = f()?;
        times.push(start.elapsed());
    }
    times.sort();
    let median = if times.is_empty() { Duration::ZERO } else { times[times.len() / 2] };
    Ok((last, median))
}

/// Runs every configured method on `s` and scores it against `truth`, or
/// against the three-step envelope with default-equivalent parameters when
/// no truth is given.
pub fn compare_methods(s: &Signal, truth: Option<&Signal>, configs: &[MethodConfig]) -> Result<ComparisonReport> {
    if configs.is_empty() {
        return Err(Error::NoMethods);
    }
    let (reference, kind) = match truth {
        Some(t) => {
            if t.len() != s.len() {
                return Err(Error::LengthMismatch {
                    expected: s.len(),
                    actual: t.len(),
                });
            }
            (t.clone(), Reference::GroundTruth)
        }
        None => {
            let params = configs
                .iter()
                .find_map(|c| match c {
                    MethodConfig::ThreeStep(p) => Some(*p),
                    _ => None,
                })
                .unwrap_or_default();
            (three_step_envelope(s, &params)?.envelope, Reference::ThreeStep)
        }
    };
    let truth = reference.samples();
    let rows = configs
        .iter()
        .map(|config| {
            let (result, elapsed) = time_median(TIMED_RUNS, || config.run(s))?;
            let est = result.envelope.samples();
            Ok(MethodRow {
                config: *config,
                rmse_rel: relative_rmse(est, truth),
                peak_ratio: peak_ratio(est, truth),
                mean_ratio: mean_ratio(est, truth),
                runtime_ms: elapsed.as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { reference: kind, rows })
}

/// Method set used for the side-by-side comparison plot: follower at 150 Hz,
/// RMS over 50 samples and the three-step method with 35-sample bunches
/// and a 120 Hz cutoff.
pub fn comparison_defaults(with_hilbert: bool) -> Vec<MethodConfig> {
    let mut v = vec![
        MethodConfig::ThreeStep(EnvelopeParams::new(35, 120.0, 4)),
        MethodConfig::Follower {
            cutoff_hz: 150.0,
            order: 4,
        },
        MethodConfig::Rms { window_samples: 50 },
    ];
    if with_hilbert {
        v.push(MethodConfig::Hilbert);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SyntheticSpec};

    #[test]
    fn metric_arithmetic() {
        let truth = vec![1.0; 10];
        let est = vec![2.0; 10];
        assert_eq!(central_window(10), 1..9);
        assert!((relative_rmse(&est, &truth) - 1.0).abs() < 1e-15);
        assert_eq!(peak_ratio(&est, &truth), 2.0);
        assert_eq!(mean_ratio(&est, &truth), 2.0);
        assert_eq!(relative_rmse(&truth, &truth), 0.0);
    }

    #[test]
    fn figure_two_ratios_on_am_tone() {
        let (s, truth) = generate(&SyntheticSpec::am_tone(2000.0, 5.0, 0.5, 2.0, 44100.0)).unwrap();
        let report = compare_methods(&s, Some(&truth), &comparison_defaults(false)).unwrap();
        assert_eq!(report.reference, Reference::GroundTruth);
        let p = |m| report.row(m).unwrap().peak_ratio;
        assert!((0.95..=1.05).contains(&p(Method::ThreeStep)), "{}", p(Method::ThreeStep));
        assert!((0.65..=0.75).contains(&p(Method::Rms)), "{}", p(Method::Rms));
        assert!((0.58..=0.70).contains(&p(Method::Follower)), "{}", p(Method::Follower));
    }

    #[test]
    fn self_comparison_is_exact() {
        let (s, _) = generate(&SyntheticSpec::am_tone(2000.0, 5.0, 0.5, 0.5, 44100.0)).unwrap();
        let cfg = [MethodConfig::ThreeStep(EnvelopeParams::new(35, 120.0, 4))];
        let own = cfg[0].run(&s).unwrap().envelope;
        let report = compare_methods(&s, Some(&own), &cfg).unwrap();
        assert_eq!(report.rows[0].rmse_rel, 0.0);
        let relative = compare_methods(&s, None, &cfg).unwrap();
        assert_eq!(relative.reference, Reference::ThreeStep);
        assert_eq!(relative.rows[0].rmse_rel, 0.0);
        assert!(relative.to_string().contains("reference = three_step"));
    }

    #[test]
    fn errors() {
        let (s, truth) = generate(&SyntheticSpec::am_tone(2000.0, 5.0, 0.5, 0.2, 44100.0)).unwrap();
        assert!(matches!(compare_methods(&s, Some(&truth), &[]), Err(Error::NoMethods)));
        let short = Signal::new(vec![0.0; 10], 44100.0).unwrap();
        assert!(matches!(
            compare_methods(&s, Some(&short), &comparison_defaults(false)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn deterministic_apart_from_runtime() {
        let (s, truth) = generate(&SyntheticSpec::am_tone(3000.0, 7.0, 0.3, 0.5, 44100.0)).unwrap();
        let strip = |r: ComparisonReport| {
            r.rows.into_iter().map(|x| (x.rmse_rel, x.peak_ratio, x.mean_ratio)).collect::<Vec<_>>()
        };
        let a = strip(compare_methods(&s, Some(&truth), &comparison_defaults(true)).unwrap());
        let b = strip(compare_methods(&s, Some(&truth), &comparison_defaults(true)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let (s, truth) = generate(&SyntheticSpec::am_tone(2000.0, 5.0, 0.5, 0.2, 44100.0)).unwrap();
        let report = compare_methods(&s, Some(&truth), &comparison_defaults(true)).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], ComparisonReport::CSV_HEADER);
        assert_eq!(lines.len(), 5);
        for (line, row) in lines[1..].iter().zip(&report.rows) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 6);
            assert_eq!(f[0], row.method().tag());
            assert_eq!(f[2].parse::<f64>().unwrap(), row.rmse_rel);
            assert!(f[5].parse::<f64>().unwrap() >= 0.0);
        }
    }
}
