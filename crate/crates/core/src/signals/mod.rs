//! Sampled 1-D signals: generators, noise, splines and spectral filtering.

mod lowpass;
mod spline;

use std::f64::consts::{LN_2, TAU};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use lowpass::lowpass;
pub use spline::{natural_spline, random_spline_signal, ControlPoints, SplineCoefficients};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Whether a uniform grid includes the right endpoint of its interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Inclusive,
    /// Periodic grid `lo + k (hi - lo) / n`, `k < n`, suited to the DFT.
    Exclusive,
}

/// `n` uniform points on `interval`.
pub fn linspace(n: usize, interval: Interval, endpoint: Endpoint) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    let step = match endpoint {
        Endpoint::Inclusive => interval.len() / (n - 1) as f64,
        Endpoint::Exclusive => interval.len() / n as f64,
    };
    let mut xs: Vec<f64> = (0..n).map(|i| interval.lo + i as f64 * step).collect();
    if endpoint == Endpoint::Inclusive {
        xs[n - 1] = interval.hi;
    }
    Ok(xs)
}

/// Sorted sample coordinates with one value per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    xs: Vec<f64>,
    ys: Vec<f64>,
    interval: Interval,
}

impl SampledSignal {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, interval: Interval) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidSignal(format!(
                "{} coordinates but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidSignal("a signal needs at least 2 samples".into()));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSignal("coordinates must be strictly increasing".into()));
        }
        if !xs.iter().all(|&x| interval.contains(x)) {
            return Err(Error::InvalidSignal(format!(
                "coordinates leave [{}, {}]",
                interval.lo, interval.hi
            )));
        }
        if !ys.iter().all(|y| y.is_finite()) {
            return Err(Error::NonFinite("signal values".into()));
        }
        Ok(Self { xs, ys, interval })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Same coordinates, new values.
    pub fn with_ys(&self, ys: Vec<f64>) -> Result<Self> {
        Self::new(self.xs.clone(), ys, self.interval)
    }

    /// True when the largest deviation from the mean spacing is below
    /// `1e-9 · (hi - lo)`.
    pub fn is_uniform(&self) -> bool {
        let n = self.xs.len();
        let mean = (self.xs[n - 1] - self.xs[0]) / (n - 1) as f64;
        let tol = 1e-9 * self.interval.len();
        self.xs.windows(2).all(|w| ((w[1] - w[0]) - mean).abs() < tol)
    }

    /// Every `stride`-th sample starting at `offset`.
    pub fn subsample(&self, offset: usize, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidArgument("stride must be >= 1".into()));
        }
        let pick = |v: &[f64]| v.iter().skip(offset).step_by(stride).copied().collect();
        Self::new(pick(&self.xs), pick(&self.ys), self.interval)
    }

    /// CSV with header `x,y`; values use 17 significant digits.
    pub fn to_csv(&self) -> String {
        xy_csv(&self.xs, &self.ys)
    }

    pub fn from_csv(text: &str, interval: Interval) -> Result<Self> {
        let (xs, ys) = parse_xy_csv(text)?;
        Self::new(xs, ys, interval)
    }
}

/// Formats a float with 17 significant digits, which round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn xy_csv(xs: &[f64], ys: &[f64]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*y));
    }
    out
}

/// Parses an `x,y` CSV document. Rejects wrong headers, ragged rows and
/// non-finite numbers.
pub fn parse_xy_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("x,y") => {}
        other => {
            return Err(Error::Format(format!("expected header `x,y`, found {other:?}")));
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(x), Some(y), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Format(format!("row {}: expected two fields", i + 1)));
        };
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {}: bad number {s:?}", i + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Format(format!("row {}: non-finite number", i + 1)))
            }
        };
        xs.push(parse(x)?);
        ys.push(parse(y)?);
    }
    Ok((xs, ys))
}

/// Samples `f` on `n` uniform points of `interval`.
pub fn linspace_signal(
    f: impl Fn(f64) -> f64,
    n: usize,
    interval: Interval,
    endpoint: Endpoint,
) -> Result<SampledSignal> {
    let xs = linspace(n, interval, endpoint)?;
    let ys = xs.iter().map(|&x| f(x)).collect();
    SampledSignal::new(xs, ys, interval)
}

/// `sin(freq · x)` on `n` endpoint-inclusive points. `freq` is a raw angular
/// factor: `freq = 512` means `sin(512 x)` in radians.
pub fn sample_sine(freq: f64, n: usize, interval: Interval) -> Result<SampledSignal> {
    linspace_signal(|x| (freq * x).sin(), n, interval, Endpoint::Inclusive)
}

/// Exponential chirp parameters: instantaneous frequency `f0 · e^(alpha x)`
/// cycles per unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsineParams {
    pub f0: f64,
    pub alpha: f64,
}

impl Default for PsineParams {
    fn default() -> Self {
        Self {
            f0: 5.0,
            alpha: 6.0 * LN_2,
        }
    }
}

impl PsineParams {
    pub fn validate(&self) -> Result<()> {
        if self.f0 > 0.0 && self.alpha > 0.0 && self.f0.is_finite() && self.alpha.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "psine needs f0 > 0 and alpha > 0, got {self:?}"
            )))
        }
    }

    /// Phase in radians, `2π f0 (e^(alpha x) - 1) / alpha`.
    pub fn phase(&self, x: f64) -> f64 {
        TAU * self.f0 * (self.alpha * x).exp_m1() / self.alpha
    }

    pub fn value(&self, x: f64) -> f64 {
        self.phase(x).sin()
    }

    /// Cycles per unit at `x`.
    pub fn instantaneous_frequency(&self, x: f64) -> f64 {
        self.f0 * (self.alpha * x).exp()
    }
}

pub fn psine(
    params: PsineParams,
    n: usize,
    interval: Interval,
    endpoint: Endpoint,
) -> Result<SampledSignal> {
    params.validate()?;
    linspace_signal(|x| params.value(x), n, interval, endpoint)
}

/// Adds i.i.d. `U[-sigma, sigma]` noise to every value.
pub fn add_uniform_noise(signal: &SampledSignal, sigma: f64, seed: u64) -> Result<SampledSignal> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(signal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Uniform::new_inclusive(-sigma, sigma).expect("sigma is positive and finite");
    let ys = signal.ys.iter().map(|y| y + noise.sample(&mut rng)).collect();
    signal.with_ys(ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_signal_identity_and_constant() {
        let s = linspace_signal(|x| x, 3, Interval::UNIT, Endpoint::Inclusive).unwrap();
        assert_eq!(s.xs(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.ys(), &[0.0, 0.5, 1.0]);
        let c = linspace_signal(|_| 2.0, 5, Interval::UNIT, Endpoint::Inclusive).unwrap();
        assert!(c.ys().iter().all(|&y| y == 2.0));
        let e = linspace(4, Interval::UNIT, Endpoint::Exclusive).unwrap();
        assert_eq!(e, vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn sine_cross_check_against_linspace_signal() {
        let half = Interval::new(0.0, 0.5).unwrap();
        let a = sample_sine(512.0, 100, half).unwrap();
        let b = linspace_signal(|x| (512.0 * x).sin(), 100, half, Endpoint::Inclusive).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert_eq!(a.xs()[99], 0.5);
    }

    #[test]
    fn sine_edge_cases() {
        let zero = sample_sine(0.0, 10, Interval::UNIT).unwrap();
        assert!(zero.ys().iter().all(|&y| y == 0.0));
        let period = sample_sine(TAU, 1001, Interval::UNIT).unwrap();
        assert!(period.ys()[0].abs() < 1e-12);
        assert!(period.ys()[1000].abs() < 1e-12);
        assert!(sample_sine(1.0, 1, Interval::UNIT).is_err());
    }

    #[test]
    fn signal_validation() {
        let i = Interval::UNIT;
        assert!(SampledSignal::new(vec![0.0], vec![0.0], i).is_err());
        assert!(SampledSignal::new(vec![0.0, 0.0], vec![0.0, 1.0], i).is_err());
        assert!(SampledSignal::new(vec![0.0, 2.0], vec![0.0, 1.0], i).is_err());
        assert!(SampledSignal::new(vec![0.0, 1.0], vec![0.0], i).is_err());
        assert!(SampledSignal::new(vec![0.0, 1.0], vec![0.0, f64::NAN], i).is_err());
        let nonuniform = SampledSignal::new(vec![0.0, 0.1, 1.0], vec![0.0; 3], i).unwrap();
        assert!(!nonuniform.is_uniform());
    }

    #[test]
    fn psine_basics() {
        let p = PsineParams::default();
        assert_eq!(p.value(0.0), 0.0);
        assert!((p.instantaneous_frequency(1.0) - 320.0).abs() < 1e-9);
        let q = PsineParams { f0: 0.3, alpha: 2.0 };
        assert_eq!(q.value(0.0), 0.0);
        assert!(PsineParams { f0: 0.0, alpha: 1.0 }.validate().is_err());
        assert!(PsineParams { f0: 1.0, alpha: -1.0 }.validate().is_err());
    }

    #[test]
    fn psine_phase_derivative_is_instantaneous_frequency() {
        let p = PsineParams::default();
        for &x in &[0.0, 0.3, 0.77, 1.0] {
            let h = 1e-6;
            let dphase = (p.phase(x + h) - p.phase(x - h)) / (2.0 * h);
            let expected = TAU * p.instantaneous_frequency(x);
            assert!((dphase - expected).abs() / expected < 1e-7);
        }
    }

    #[test]
    fn noise_zero_sigma_and_determinism() {
        let s = sample_sine(3.0, 50, Interval::UNIT).unwrap();
        assert_eq!(add_uniform_noise(&s, 0.0, 1).unwrap(), s);
        let a = add_uniform_noise(&s, 0.5, 9).unwrap();
        let b = add_uniform_noise(&s, 0.5, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.xs(), s.xs());
        assert!(add_uniform_noise(&s, -1.0, 0).is_err());
    }

    #[test]
    fn noise_moments() {
        let s = linspace_signal(|_| 0.0, 10_000, Interval::UNIT, Endpoint::Inclusive).unwrap();
        let noisy = add_uniform_noise(&s, 20.0, 3).unwrap();
        let n = noisy.len() as f64;
        let mean = noisy.ys().iter().sum::<f64>() / n;
        let var = noisy.ys().iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.6, "mean {mean}");
        let expected = 400.0 / 3.0;
        assert!((var - expected).abs() < 0.1 * expected, "var {var}");
        assert!(noisy.ys().iter().all(|y| y.abs() <= 20.0));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample_sine(512.0, 37, Interval::UNIT).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with("x,y\n"));
        let back = SampledSignal::from_csv(&text, Interval::UNIT).unwrap();
        assert_eq!(back, s);
        assert!(parse_xy_csv("a,b\n1,2\n").is_err());
        assert!(parse_xy_csv("x,y\n1,2,3\n").is_err());
        assert!(parse_xy_csv("x,y\n1,inf\n").is_err());
    }
}
