//! Cross-module properties of the envelope estimators.

use std::f64::consts::PI;

use envelope_core::design::{butterworth_lowpass, frequency_response, FilterSpec};
use envelope_core::metrics::{comparison_defaults, relative_rmse};
use envelope_core::{
    compare_methods, envelope_follower, envelope_hilbert, envelope_rms, filtfilt_zero_phase, generate,
    three_step_envelope, EnvelopeParams, Method, MethodConfig, Signal, SyntheticKind, SyntheticSpec,
};
use rand::{Rng, SeedableRng};

const FS: f64 = 44100.0;

fn tone(freq: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (2.0 * PI * freq * i as f64 / FS).sin()).collect()
}

fn central(n: usize) -> std::ops::Range<usize> {
    n / 10..n - n / 10
}

/// Lag in `-max_lag..=max_lag` maximizing `sum x[i] y[i + lag]` over the central 80%.
fn best_lag(x: &[f64], y: &[f64], max_lag: isize) -> isize {
    let w = central(x.len());
    (-max_lag..=max_lag)
        .max_by(|&a, &b| {
            let corr = |lag: isize| -> f64 {
                w.clone()
                    .map(|i| x[i] * y[(i as isize + lag) as usize])
                    .sum()
            };
            corr(a).total_cmp(&corr(b))
        })
        .unwrap()
}

#[test]
fn filtfilt_has_zero_lag_across_passband() {
    for fc in [120.0, 300.0, 1000.0] {
        let d = butterworth_lowpass(&FilterSpec::new(4, fc, FS).unwrap()).unwrap();
        for frac in [0.1, 0.5, 1.0] {
            let f = frac * fc;
            let x = tone(f, 44100);
            let y = filtfilt_zero_phase(&d, &Signal::new(x.clone(), FS).unwrap()).unwrap();
            let quarter_period = (FS / f / 4.0) as isize;
            let lag = best_lag(&x, y.samples(), quarter_period.min(200));
            assert_eq!(lag, 0, "fc={fc} f={f}");
        }
    }
}

#[test]
fn filtfilt_amplitude_is_squared_magnitude() {
    let fc = 300.0;
    let d = butterworth_lowpass(&FilterSpec::new(4, fc, FS).unwrap()).unwrap();
    for f in [60.0, 150.0, 240.0] {
        let x = tone(f, 88200);
        let y = filtfilt_zero_phase(&d, &Signal::new(x.clone(), FS).unwrap()).unwrap();
        let w = central(x.len());
        // least-squares gain of y onto x
        let gain: f64 = w.clone().map(|i| x[i] * y.samples()[i]).sum::<f64>()
            / w.clone().map(|i| x[i] * x[i]).sum::<f64>();
        let h = frequency_response(&d, &[f], FS).unwrap()[0].norm_sqr();
        assert!((gain / h - 1.0).abs() < 0.01, "f={f} gain={gain} |H|^2={h}");
    }
}

#[test]
fn three_step_undershoot_is_bounded() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for kind in [SyntheticKind::AmTone, SyntheticKind::NoiseBurst, SyntheticKind::ChirpAm] {
        let spec = SyntheticSpec {
            kind,
            carriers_hz: match kind {
                SyntheticKind::ChirpAm => vec![1500.0, 6000.0],
                _ => vec![rng.gen_range(1500.0..6000.0)],
            },
            modulator_hz: 8.0,
            depth: 1.0,
            duration_s: 1.0,
            sample_rate_hz: FS,
            seed: 5,
        };
        let (s, _) = generate(&spec).unwrap();
        let e = three_step_envelope(&s, &EnvelopeParams::new(35, 300.0, 4)).unwrap().envelope;
        let max = e.samples().iter().copied().fold(f64::MIN, f64::max);
        let min = e.samples().iter().copied().fold(f64::MAX, f64::min);
        assert!(min >= -0.02 * max, "{kind}: min {min} max {max}");
    }
}

#[test]
fn hilbert_narrowband_tracks_broadband_does_not() {
    let narrow = SyntheticSpec::am_tone(2000.0, 5.0, 0.5, 2.0, FS);
    let (s, truth) = generate(&narrow).unwrap();
    let e = envelope_hilbert(&s).unwrap().envelope;
    let err = relative_rmse(e.samples(), truth.samples());
    assert!(err < 0.02, "narrowband {err}");

    let broad = SyntheticSpec {
        kind: SyntheticKind::MultiCarrierAm,
        carriers_hz: vec![1000.0, 1000.0 * 2f64.sqrt(), 1000.0 * PI],
        ..narrow
    };
    let (s, truth) = generate(&broad).unwrap();
    let e = envelope_hilbert(&s).unwrap().envelope;
    let err = relative_rmse(e.samples(), truth.samples());
    assert!(err > 0.10, "broadband {err}");
}

#[test]
fn three_step_beats_rms_on_random_am() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let bunch = 35;
    let configs = comparison_defaults(false);
    let mut wins = 0;
    let trials = 1000;
    for _ in 0..trials {
        // carrier period below the 35-sample bunch duration (~0.79 ms)
        let carrier = rng.gen_range(1500.0..8000.0);
        assert!(FS / carrier < bunch as f64);
        let spec = SyntheticSpec::am_tone(
            carrier,
            rng.gen_range(1.0..10.0),
            rng.gen_range(0.0..1.0),
            0.5,
            FS,
        );
        let (s, truth) = generate(&spec).unwrap();
        let three = configs[0].run(&s).unwrap().envelope;
        let rms = configs[2].run(&s).unwrap().envelope;
        let fol = configs[1].run(&s).unwrap().envelope;
        let e3 = relative_rmse(three.samples(), truth.samples());
        let er = relative_rmse(rms.samples(), truth.samples());
        if e3 < er {
            wins += 1;
        }
        let mean = |x: &Signal| x.samples()[central(x.len())].iter().sum::<f64>();
        assert!(mean(&three) > mean(&rms) && mean(&rms) > mean(&fol));
    }
    assert!(wins as f64 >= 0.95 * trials as f64, "{wins}/{trials}");
}

#[test]
fn report_ordering_on_steady_tones() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    for _ in 0..20 {
        let spec = SyntheticSpec::am_tone(rng.gen_range(1500.0..8000.0), 1.0, 0.0, 1.0, FS);
        let (s, truth) = generate(&spec).unwrap();
        let r = compare_methods(&s, Some(&truth), &comparison_defaults(false)).unwrap();
        let m = |k| r.row(k).unwrap().mean_ratio;
        assert!(m(Method::ThreeStep) > m(Method::Rms));
        assert!(m(Method::Rms) > m(Method::Follower));
        assert!((m(Method::ThreeStep) - 1.0).abs() < 0.05);
        assert!((m(Method::Rms) / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.05);
        assert!((m(Method::Follower) / (2.0 / PI) - 1.0).abs() < 0.05);
    }
}

#[test]
fn steady_sine_baselines_match_analytic_levels() {
    let a = 0.9;
    let x: Vec<f64> = tone(3000.0, 44100).iter().map(|v| a * v).collect();
    let s = Signal::new(x, FS).unwrap();
    let w = central(s.len());
    let rms = envelope_rms(&s, 441).unwrap().envelope;
    for v in &rms.samples()[w.clone()] {
        assert!((v / (a / 2f64.sqrt()) - 1.0).abs() < 0.02);
    }
    let fol = envelope_follower(&s, 150.0, 4).unwrap().envelope;
    let mean = fol.samples()[w.clone()].iter().sum::<f64>() / w.len() as f64;
    assert!((mean / (2.0 * a / PI) - 1.0).abs() < 0.03);
    let hil = envelope_hilbert(&s).unwrap().envelope;
    let n = s.len();
    for v in &hil.samples()[n / 20..n - n / 20] {
        assert!((v / a - 1.0).abs() < 0.01);
    }
}

#[test]
fn canary_preset_runs_on_a_tenth_of_a_second() {
    let spec = SyntheticSpec {
        kind: SyntheticKind::NoiseBurst,
        carriers_hz: vec![],
        modulator_hz: 20.0,
        depth: 0.7,
        duration_s: 0.1,
        sample_rate_hz: FS,
        seed: 1,
    };
    let (s, _) = generate(&spec).unwrap();
    let p = envelope_core::Preset::Canary.params();
    let r = three_step_envelope(&s, &p).unwrap();
    assert_eq!(r.envelope.len(), 4410);
    assert_eq!(r.config, MethodConfig::ThreeStep(p));
}
