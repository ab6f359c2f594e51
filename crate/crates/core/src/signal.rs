//! Uniformly sampled signals and the two pre-filter stages of the
//! three-step envelope: rectification and the bunch-max staircase.

use crate::error::{Error, Result};

/// A finite, uniformly sampled, real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Signal {
    /// Builds a signal, rejecting non-finite samples and non-positive rates.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    /// Caller guarantees the invariants (used for outputs of operations
    /// on already-validated signals).
    pub(crate) fn from_parts(samples: Vec<f64>, sample_rate: f64) -> Self {
        debug_assert!(sample_rate > 0.0);
        Signal {
            samples,
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate / 2.0
    }

    /// Multiplies every sample by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Signal> {
        Signal::new(self.samples.iter().map(|x| x * gain).collect(), self.sample_rate)
    }

    pub fn reversed(&self) -> Signal {
        let mut samples = self.samples.clone();
        samples.reverse();
        Signal::from_parts(samples, self.sample_rate)
    }

    /// Concatenates signals that share a sample rate.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Signal>) -> Result<Signal> {
        let mut rate = None;
        let mut samples = Vec::new();
        for part in parts {
            match rate {
                None => rate = Some(part.sample_rate),
                Some(r) if r != part.sample_rate => {
                    return Err(Error::InconsistentSampleRate {
                        expected: r,
                        actual: part.sample_rate,
                    })
                }
                _ => {}
            }
            samples.extend_from_slice(&part.samples);
        }
        let rate = rate.ok_or(Error::EmptyInput)?;
        Ok(Signal::from_parts(samples, rate))
    }
}

/// Number of samples per non-overlapping bunch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BunchSpec {
    bunch_size: usize,
}

impl BunchSpec {
    pub fn new(bunch_size: usize) -> Result<Self> {
        if bunch_size == 0 {
            return Err(Error::InvalidBunchSize);
        }
        Ok(BunchSpec { bunch_size })
    }

    pub fn bunch_size(self) -> usize {
        self.bunch_size
    }

    /// Number of bunches covering `len` samples; the last one may be partial.
    pub fn bunch_count(self, len: usize) -> usize {
        len.div_ceil(self.bunch_size)
    }
}

/// The maximum of one bunch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunchPeak {
    /// First sample index of the bunch.
    pub start: usize,
    /// Number of samples in the bunch (less than the bunch size only for the last one).
    pub len: usize,
    /// Index of the first sample attaining the maximum.
    pub index: usize,
    pub value: f64,
}

/// Elementwise absolute value.
pub fn rectify(s: &Signal) -> Signal {
    Signal::from_parts(s.samples.iter().map(|x| x.abs()).collect(), s.sample_rate)
}

/// Per-bunch maxima, in order. Ties report the first occurrence.
pub fn bunch_peaks(s: &Signal, spec: BunchSpec) -> Result<Vec<BunchPeak>> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let peaks = s
        .samples
        .chunks(spec.bunch_size)
        .enumerate()
        .map(|(i, bunch)| {
            let start = i * spec.bunch_size;
            let (offset, value) = bunch.iter().copied().enumerate().fold(
                (0, bunch[0]),
                |(bi, bv), (j, v)| if v > bv { (j, v) } else { (bi, bv) },
            );
            BunchPeak {
                start,
                len: bunch.len(),
                index: start + offset,
                value,
            }
        })
        .collect();
    Ok(peaks)
}

/// Replaces every sample of each non-overlapping bunch by the bunch maximum.
///
/// Output has the input's length and sample rate. A trailing partial bunch
/// uses the maximum over its own samples.
pub fn bunch_max(s: &Signal, spec: BunchSpec) -> Result<Signal> {
    let mut out = Vec::with_capacity(s.len());
    for peak in bunch_peaks(s, spec)? {
        out.extend(std::iter::repeat_n(peak.value, peak.len));
    }
    Ok(Signal::from_parts(out, s.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 1000.0).unwrap()
    }

    fn naive_bunch_max(x: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let mut start = 0;
        while start < x.len() {
            let end = (start + n).min(x.len());
            let mut m = x[start];
            for &v in &x[start..end] {
                if v > m {
                    m = v;
                }
            }
            for o in &mut out[start..end] {
                *o = m;
            }
            start += n;
        }
        out
    }

    #[test]
    fn rejects_invalid_signals() {
        assert!(matches!(
            Signal::new(vec![0.0, f64::NAN], 10.0),
            Err(Error::NonFinite(1))
        ));
        assert!(Signal::new(vec![f64::INFINITY], 10.0).is_err());
        assert!(Signal::new(vec![0.0], 0.0).is_err());
        assert!(Signal::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    fn rectify_examples() {
        assert_eq!(rectify(&sig(&[0.5, -0.5, 0.0])).samples(), &[0.5, 0.5, 0.0]);
        let z = rectify(&sig(&[0.0; 1000]));
        assert_eq!(z.len(), 1000);
        assert!(z.samples().iter().all(|&x| x == 0.0));
        assert_eq!(z.sample_rate(), 1000.0);
    }

    #[test]
    fn rectify_matches_loop_on_gaussian() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let x: Vec<f64> = (0..4096).map(|_| rng.sample(StandardNormal)).collect();
        let r = rectify(&sig(&x));
        let mut expected = Vec::new();
        for v in &x {
            expected.push(if *v < 0.0 { -v } else { *v });
        }
        assert_eq!(r.samples(), expected.as_slice());
    }

    #[test]
    fn bunch_max_examples() {
        let n3 = BunchSpec::new(3).unwrap();
        let out = bunch_max(&sig(&[1.0, 2.0, 3.0, 0.5, 0.25, 0.1]), n3).unwrap();
        assert_eq!(out.samples(), &[3.0, 3.0, 3.0, 0.5, 0.5, 0.5]);

        let c = sig(&[0.3; 17]);
        for n in 1..20 {
            assert_eq!(bunch_max(&c, BunchSpec::new(n).unwrap()).unwrap(), c);
        }

        let x = [0.1, 0.9, 0.2, 0.4, 0.3, 0.8, 0.05];
        let out = bunch_max(&sig(&x), n3).unwrap();
        assert_eq!(out.samples(), naive_bunch_max(&x, 3).as_slice());
        assert_eq!(out.samples()[6], 0.05);
    }

    #[test]
    fn bunch_max_errors() {
        assert!(matches!(BunchSpec::new(0), Err(Error::InvalidBunchSize)));
        let empty = Signal::new(vec![], 10.0).unwrap();
        assert!(matches!(
            bunch_max(&empty, BunchSpec::new(2).unwrap()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn peak_ties_report_first_index() {
        let p = bunch_peaks(&sig(&[1.0, 2.0, 2.0, 0.0, 5.0]), BunchSpec::new(3).unwrap()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].index, p[0].value, p[0].len), (1, 2.0, 3));
        assert_eq!((p[1].start, p[1].index, p[1].len), (3, 4, 2));
    }

    #[test]
    fn bunch_count_rounds_up() {
        let n = BunchSpec::new(3).unwrap();
        assert_eq!(n.bunch_count(6), 2);
        assert_eq!(n.bunch_count(7), 3);
    }

    proptest! {
        #[test]
        fn bunch_max_matches_naive(
            x in prop::collection::vec(-10.0f64..10.0, 1..256),
            n in 1usize..=32,
        ) {
            let out = bunch_max(&sig(&x), BunchSpec::new(n).unwrap()).unwrap();
            let expected = naive_bunch_max(&x, n);
            prop_assert_eq!(out.samples(), expected.as_slice());
        }

        #[test]
        fn staircase_dominates_rectified(x in prop::collection::vec(-1.0f64..1.0, 1..300), n in 1usize..40) {
            let r = rectify(&sig(&x));
            let st = bunch_max(&r, BunchSpec::new(n).unwrap()).unwrap();
            for (a, b) in st.samples().iter().zip(r.samples()) {
                prop_assert!(a >= b);
            }
        }

        #[test]
        fn idempotent_on_whole_bunches(n in 1usize..16, k in 1usize..16, seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let x: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let spec = BunchSpec::new(n).unwrap();
            let once = bunch_max(&sig(&x), spec).unwrap();
            let twice = bunch_max(&once, spec).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn positively_homogeneous(x in prop::collection::vec(-1.0f64..1.0, 1..200), n in 1usize..20, a in 0.01f64..100.0) {
            let s = sig(&x);
            let spec = BunchSpec::new(n).unwrap();
            let scaled_first = bunch_max(&rectify(&s.scaled(a).unwrap()), spec).unwrap();
            let scaled_after = bunch_max(&rectify(&s), spec).unwrap().scaled(a).unwrap();
            // max commutes with multiplication by a positive constant exactly
            prop_assert_eq!(scaled_first, scaled_after);
        }

        #[test]
        fn shift_by_whole_bunches(x in prop::collection::vec(0.0f64..1.0, 1..120), n in 1usize..10, m in 0usize..5) {
            let spec = BunchSpec::new(n).unwrap();
            let mut shifted = vec![0.0; m * n];
            shifted.extend_from_slice(&x);
            let a = bunch_max(&sig(&x), spec).unwrap();
            let b = bunch_max(&sig(&shifted), spec).unwrap();
            prop_assert_eq!(&b.samples()[m * n..], a.samples());
        }
    }
}
