use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{linspace, Endpoint, Interval, SampledSignal};
use crate::{Error, Result};

/// Knots of an interpolating spline.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPoints {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Piecewise cubic: on `[knots[i], knots[i+1]]` the value is
/// `a + b t + c t² + d t³` with `t = x - knots[i]` and `[a, b, c, d] = segments[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoefficients {
    knots: Vec<f64>,
    segments: Vec<[f64; 4]>,
}

/// Natural cubic spline (zero second derivative at both ends) through the
/// given control points.
pub fn natural_spline(points: &ControlPoints) -> Result<SplineCoefficients> {
    let ControlPoints { xs, ys } = points;
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::InvalidArgument("control xs and ys differ in length".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("a spline needs at least 2 control points".into()));
    }
    if !xs.windows(2).all(|w| w[0] < w[1]) || !xs.iter().chain(ys).all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(
            "control xs must be finite and strictly increasing".into(),
        ));
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    // Thomas algorithm for the interior second derivatives m[1..n-1].
    let mut m = vec![0.0; n];
    let interior = n - 2;
    if interior > 0 {
        let mut diag = vec![0.0; interior];
        let mut rhs = vec![0.0; interior];
        for k in 0..interior {
            let i = k + 1;
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            rhs[k] = 6.0 * (slope[i] - slope[i - 1]);
        }
        for k in 1..interior {
            let w = h[k] / diag[k - 1];
            diag[k] -= w * h[k];
            rhs[k] -= w * rhs[k - 1];
        }
        m[interior] = rhs[interior - 1] / diag[interior - 1];
        for k in (0..interior - 1).rev() {
            m[k + 1] = (rhs[k] - h[k + 1] * m[k + 2]) / diag[k];
        }
    }

    let segments = (0..n - 1)
        .map(|i| {
            [
                ys[i],
                slope[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0,
                m[i] / 2.0,
                (m[i + 1] - m[i]) / (6.0 * h[i]),
            ]
        })
        .collect();
    Ok(SplineCoefficients {
        knots: xs.clone(),
        segments,
    })
}

/// Natural spline through `n_ctrl` uniform knots with i.i.d. `N(0, 1)` values.
pub fn random_spline_signal(
    n_ctrl: usize,
    seed: u64,
    interval: Interval,
) -> Result<(SplineCoefficients, ControlPoints)> {
    if n_ctrl < 4 {
        return Err(Error::InvalidArgument(format!(
            "random splines need at least 4 control points, got {n_ctrl}"
        )));
    }
    let xs = linspace(n_ctrl, interval, Endpoint::Inclusive)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ys = (0..n_ctrl).map(|_| StandardNormal.sample(&mut rng)).collect();
    let points = ControlPoints { xs, ys };
    Ok((natural_spline(&points)?, points))
}

impl SplineCoefficients {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn segments(&self) -> &[[f64; 4]] {
        &self.segments
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.knots[0],
            hi: self.knots[self.knots.len() - 1],
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.interval().contains(x) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside spline interval [{}, {}]",
                self.knots[0],
                self.knots[self.knots.len() - 1]
            )));
        }
        let seg = self
            .knots
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(self.segments.len() - 1);
        let [a, b, c, d] = self.segments[seg];
        let t = x - self.knots[seg];
        Ok(a + t * (b + t * (c + t * d)))
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Samples the spline on `n` uniform points of its own interval.
    pub fn sample(&self, n: usize, endpoint: Endpoint) -> Result<SampledSignal> {
        let interval = self.interval();
        let xs = linspace(n, interval, endpoint)?;
        let ys = self.eval_many(&xs)?;
        SampledSignal::new(xs, ys, interval)
    }
}
