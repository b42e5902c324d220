use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::SampledSignal;
use crate::{Error, Result};

/// Ideal DFT low-pass filter.
///
/// Bin `k` of an `n`-point transform carries `min(k, n - k)` cycles per grid
/// period. Every bin whose frequency exceeds `cutoff` is zeroed; the inverse
/// transform's imaginary residue is discarded. No windowing is applied, so
/// non-periodic signals ring at the edges.
pub fn lowpass(signal: &SampledSignal, cutoff: f64) -> Result<SampledSignal> {
    if !(cutoff >= 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff must be >= 0, got {cutoff}")));
    }
    if !signal.is_uniform() {
        return Err(Error::InvalidSignal("low-pass filtering needs uniform spacing".into()));
    }
    let n = signal.len();
    let mut buf: Vec<Complex<f64>> = signal.ys().iter().map(|&y| Complex::new(y, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, bin) in buf.iter_mut().enumerate() {
        if k.min(n - k) as f64 > cutoff {
            *bin = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    signal.with_ys(buf.iter().map(|c| c.re * scale).collect())
}
