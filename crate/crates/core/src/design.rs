//! Butterworth low-pass design as a cascade of second-order sections.
//!
//! The analog prototype is prewarped so that the digital -3 dB point lands
//! exactly on the requested cutoff, then mapped through the bilinear
//! transform. All zeros sit at z = -1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 4;

/// Order, cutoff and sample rate of a low-pass design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    order: usize,
    cutoff_hz: f64,
    sample_rate_hz: f64,
}

impl FilterSpec {
    pub fn new(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidFilterSpec(format!("order must be >= 1, got {order}")));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        if !(cutoff_hz.is_finite() && cutoff_hz > 0.0) {
            return Err(Error::InvalidFilterSpec(format!(
                "cutoff must be positive, got {cutoff_hz} Hz"
            )));
        }
        let nyquist_hz = sample_rate_hz / 2.0;
        if cutoff_hz >= nyquist_hz {
            return Err(Error::CutoffAboveNyquist {
                cutoff_hz,
                nyquist_hz,
            });
        }
        Ok(FilterSpec {
            order,
            cutoff_hz,
            sample_rate_hz,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }
}

/// One biquad, `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
///
/// First-order sections have `b2 == a2 == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Section {
    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b0 + z_inv * self.b1 + z2 * self.b2;
        let den = 1.0 + z_inv * self.a1 + z2 * self.a2;
        num / den
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    pub fn is_first_order(&self) -> bool {
        self.a2 == 0.0 && self.b2 == 0.0
    }

    /// Roots of `z^2 + a1 z + a2` (one root for a first-order section).
    pub fn poles(&self) -> Vec<Complex64> {
        if self.is_first_order() {
            return vec![Complex64::new(-self.a1, 0.0)];
        }
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        vec![(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }
}

/// A designed low-pass filter: an ordered cascade of sections.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterDesign {
    spec: FilterSpec,
    sections: Vec<Section>,
}

impl FilterDesign {
    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.spec.order
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.sections.iter().flat_map(Section::poles).collect()
    }

    pub fn dc_gain(&self) -> f64 {
        self.sections.iter().map(Section::dc_gain).product()
    }

    /// Expands the cascade into a single `(b, a)` transfer function with `a[0] = 1`.
    pub fn to_transfer_function(&self) -> (Vec<f64>, Vec<f64>) {
        let mut b = vec![1.0];
        let mut a = vec![1.0];
        for s in &self.sections {
            let (sb, sa) = if s.is_first_order() {
                (vec![s.b0, s.b1], vec![1.0, s.a1])
            } else {
                (vec![s.b0, s.b1, s.b2], vec![1.0, s.a1, s.a2])
            };
            b = poly_mul(&b, &sb);
            a = poly_mul(&a, &sa);
        }
        (b, a)
    }

    /// Plain-text coefficient listing: one `b0 b1 b2 a1 a2` line per section,
    /// 17 significant digits.
    pub fn coefficient_listing(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let line = [s.b0, s.b1, s.b2, s.a1, s.a2]
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Designs a digital Butterworth low-pass filter.
pub fn butterworth_lowpass(spec: &FilterSpec) -> Result<FilterDesign> {
    let spec = FilterSpec::new(spec.order, spec.cutoff_hz, spec.sample_rate_hz)?;
    let n = spec.order;
    let fs2 = 2.0 * spec.sample_rate_hz;
    let warped = fs2 * (PI * spec.cutoff_hz / spec.sample_rate_hz).tan();

    // (section, distance of its poles from the unit circle, |1 - z|^2 or |1 - z|, numerator DC sum)
    let mut parts: Vec<(Section, f64, f64, f64)> = Vec::with_capacity(n.div_ceil(2));
    for k in 0..n.div_ceil(2) {
        let theta = PI / 2.0 + PI * (2 * k + 1) as f64 / (2 * n) as f64;
        let s_pole = Complex64::from_polar(warped, theta);
        let z = (fs2 + s_pole) / (fs2 - s_pole);
        // 1 - z computed without cancellation
        let one_minus_z = -2.0 * s_pole / (fs2 - s_pole);
        if 2 * k + 1 == n {
            let section = Section {
                b0: 1.0,
                b1: 1.0,
                b2: 0.0,
                a1: -z.re,
                a2: 0.0,
            };
            parts.push((section, 1.0 - z.re.abs(), one_minus_z.re, 2.0));
        } else {
            let section = Section {
                b0: 1.0,
                b1: 2.0,
                b2: 1.0,
                a1: -2.0 * z.re,
                a2: z.norm_sqr(),
            };
            parts.push((section, 1.0 - z.norm(), one_minus_z.norm_sqr(), 4.0));
        }
    }

    parts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let gain: f64 = parts.iter().map(|p| p.2 / p.3).product();
    let mut sections: Vec<Section> = parts.into_iter().map(|p| p.0).collect();
    let first = &mut sections[0];
    first.b0 *= gain;
    first.b1 *= gain;
    first.b2 *= gain;

    Ok(FilterDesign { spec, sections })
}

/// Complex response of the cascade at each frequency in `freqs_hz`.
pub fn frequency_response(
    design: &FilterDesign,
    freqs_hz: &[f64],
    sample_rate_hz: f64,
) -> Result<Vec<Complex64>> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::InvalidSampleRate(sample_rate_hz));
    }
    let nyquist = sample_rate_hz / 2.0;
    freqs_hz
        .iter()
        .map(|&f| {
            if !(0.0..=nyquist).contains(&f) {
                return Err(Error::FrequencyOutOfBand(f));
            }
            let z_inv = Complex64::from_polar(1.0, -2.0 * PI * f / sample_rate_hz);
            Ok(design
                .sections
                .iter()
                .map(|s| s.response(z_inv))
                .product())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn design(order: usize, fc: f64, fs: f64) -> FilterDesign {
        butterworth_lowpass(&FilterSpec::new(order, fc, fs).unwrap()).unwrap()
    }

    fn mag(d: &FilterDesign, f: f64) -> f64 {
        frequency_response(d, &[f], d.spec().sample_rate_hz()).unwrap()[0].norm()
    }

    #[test]
    fn first_order_at_quarter_rate_is_two_tap_average() {
        // s = -1 prototype, prewarped at fs/4: digital pole at 0, H(z) = (1 + z^-1) / 2
        let d = design(1, 1000.0, 4000.0);
        assert_eq!(d.sections().len(), 1);
        let s = d.sections()[0];
        assert!((s.b0 - 0.5).abs() < 1e-15);
        assert!((s.b1 - 0.5).abs() < 1e-15);
        assert!(s.a1.abs() < 1e-15);
        assert_eq!((s.b2, s.a2), (0.0, 0.0));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            FilterSpec::new(4, 22050.0, 44100.0),
            Err(Error::CutoffAboveNyquist { .. })
        ));
        assert!(matches!(
            FilterSpec::new(4, 30000.0, 44100.0),
            Err(Error::CutoffAboveNyquist { .. })
        ));
        assert!(matches!(
            FilterSpec::new(4, 0.0, 44100.0),
            Err(Error::InvalidFilterSpec(_))
        ));
        assert!(matches!(
            FilterSpec::new(4, -5.0, 44100.0),
            Err(Error::InvalidFilterSpec(_))
        ));
        assert!(matches!(
            FilterSpec::new(0, 100.0, 44100.0),
            Err(Error::InvalidFilterSpec(_))
        ));
    }

    #[test]
    fn canary_row_cutoff_gain() {
        let d = design(4, 300.0, 44100.0);
        assert!((mag(&d, 300.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        assert!((mag(&d, 0.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dc_response_is_one() {
        let d = design(4, 120.0, 44100.0);
        let h = frequency_response(&d, &[0.0], 44100.0).unwrap()[0];
        assert!((h.re - 1.0).abs() < 1e-9 && h.im.abs() < 1e-9);
    }

    #[test]
    fn twice_cutoff_follows_butterworth_law() {
        let d = design(4, 300.0, 44100.0);
        let expected = 1.0 / (1.0f64 + 2f64.powi(8)).sqrt();
        assert!((mag(&d, 600.0) - expected).abs() < 5e-3);
    }

    #[test]
    fn out_of_band_frequency() {
        let d = design(2, 100.0, 1000.0);
        assert!(matches!(
            frequency_response(&d, &[600.0], 1000.0),
            Err(Error::FrequencyOutOfBand(_))
        ));
        assert!(frequency_response(&d, &[-1.0], 1000.0).is_err());
        assert!(frequency_response(&d, &[500.0], 1000.0).is_ok());
    }

    #[test]
    fn odd_order_has_one_first_order_section() {
        let d = design(5, 1000.0, 44100.0);
        assert_eq!(d.sections().len(), 3);
        assert_eq!(d.sections().iter().filter(|s| s.is_first_order()).count(), 1);
        assert_eq!(d.poles().len(), 5);
    }

    #[test]
    fn coefficient_listing_round_trips() {
        let d = design(4, 150.0, 44100.0);
        let listing = d.coefficient_listing();
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(lines.len(), 2);
        for (line, s) in lines.iter().zip(d.sections()) {
            let v: Vec<f64> = line.split(' ').map(|t| t.parse().unwrap()).collect();
            assert_eq!(v, vec![s.b0, s.b1, s.b2, s.a1, s.a2]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn designs_are_stable_flat_and_hit_cutoff(order in 1usize..=8, ratio in 0.001f64..0.45) {
            let fs = 44100.0;
            let d = design(order, ratio * fs, fs);
            for p in d.poles() {
                prop_assert!(p.norm() < 1.0 - 1e-12);
            }
            prop_assert!((d.dc_gain() - 1.0).abs() < 1e-9);
            let hc = mag(&d, ratio * fs);
            prop_assert!((hc * hc - 0.5).abs() < 2e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn magnitude_is_monotone(order in 1usize..=8, ratio in 0.001f64..0.45) {
            let fs = 44100.0;
            let d = design(order, ratio * fs, fs);
            let grid: Vec<f64> = (0..512).map(|i| fs / 2.0 * i as f64 / 511.0).collect();
            let h = frequency_response(&d, &grid, fs).unwrap();
            for w in h.windows(2) {
                prop_assert!(w[1].norm() <= w[0].norm() + 1e-9);
            }
        }

        #[test]
        fn cascade_matches_expanded_polynomial(order in 1usize..=4, ratio in 0.001f64..0.45) {
            let fs = 44100.0;
            let d = design(order, ratio * fs, fs);
            let (b, a) = d.to_transfer_function();
            for i in 0..64 {
                let f = fs / 2.0 * i as f64 / 63.0;
                let z_inv = Complex64::from_polar(1.0, -2.0 * PI * f / fs);
                let eval = |c: &[f64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * z_inv + x);
                let direct = eval(&b) / eval(&a);
                let cascade = frequency_response(&d, &[f], fs).unwrap()[0];
                prop_assert!((direct - cascade).norm() < 1e-6);
            }
        }
    }
}
