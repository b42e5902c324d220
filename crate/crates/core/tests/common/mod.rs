//! Independent reference implementations used by the integration tests.
//! None of these call into the library's numerical code paths.

#![allow(dead_code)]

use std::f64::consts::TAU;

use fibnet::fibnet::FibNet;
use fibnet::nn::DenseNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Strictly increasing uniform draws from `[lo, hi)`.
pub fn sorted_uniform(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v = uniform_vec(rng, n, lo, hi);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    assert_eq!(v.len(), n, "duplicate draw");
    v
}

/// Direct `O(n^2)` DFT low-pass: keeps bins with `min(k, n - k) <= cutoff`.
pub fn dft_lowpass(ys: &[f64], cutoff: f64) -> Vec<f64> {
    let n = ys.len();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for k in 0..n {
        for (j, &y) in ys.iter().enumerate() {
            let angle = -TAU * ((k * j) % n) as f64 / n as f64;
            re[k] += y * angle.cos();
            im[k] += y * angle.sin();
        }
    }
    (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for k in 0..n {
                if (k.min(n - k) as f64) <= cutoff {
                    let angle = TAU * ((k * j) % n) as f64 / n as f64;
                    acc += re[k] * angle.cos() - im[k] * angle.sin();
                }
            }
            acc / n as f64
        })
        .collect()
}

pub fn direct_mse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    for i in 0..a.len() {
        sum += (a[i] - b[i]) * (a[i] - b[i]);
    }
    sum / a.len() as f64
}

/// Median by full sort.
pub fn sorted_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Naive forward pass. Returns the outputs and the sign pattern of every
/// hidden pre-activation (true where strictly positive).
pub fn naive_forward(net: &DenseNetwork, rows: &[Vec<f64>]) -> (Vec<f64>, Vec<bool>) {
    let layers = net.layers();
    let mut pattern = Vec::new();
    let outputs = rows
        .iter()
        .map(|row| {
            let mut act = row.clone();
            for (k, layer) in layers.iter().enumerate() {
                let (fan_out, fan_in) = layer.weights.dim();
                let mut next = vec![0.0; fan_out];
                for o in 0..fan_out {
                    let mut z = layer.bias[o];
                    for i in 0..fan_in {
                        z += layer.weights[[o, i]] * act[i];
                    }
                    if k + 1 < layers.len() {
                        pattern.push(z > 0.0);
                        z = z.max(0.0);
                    }
                    next[o] = z;
                }
                act = next;
            }
            act[0]
        })
        .collect();
    (outputs, pattern)
}

/// FibNet forward composed by hand from per-block naive forwards: block `i`
/// reads `[x, out_{i-1}, out_{i-2}]`, truncated for the first two blocks.
pub fn naive_fibnet_forward(net: &FibNet, xs: &[f64]) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut outs: Vec<Vec<f64>> = Vec::new();
    let mut pattern = Vec::new();
    for (i, block) in net.blocks().iter().enumerate() {
        let rows: Vec<Vec<f64>> = (0..xs.len())
            .map(|r| {
                let mut row = vec![xs[r]];
                for back in 1..=i.min(2) {
                    row.push(outs[i - back][r]);
                }
                row
            })
            .collect();
        let (out, p) = naive_forward(block, &rows);
        pattern.extend(p);
        outs.push(out);
    }
    (outs, pattern)
}

/// Natural cubic spline second derivatives from the full `n x n` system,
/// solved by Gaussian elimination with partial pivoting.
pub fn dense_spline_second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    a[0][0] = 1.0;
    a[n - 1][n - 1] = 1.0;
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        a[i][i - 1] = h0;
        a[i][i] = 2.0 * (h0 + h1);
        a[i][i + 1] = h1;
        a[i][n] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Power-form coefficients `[a, b, c, d]` of each segment, in `t = x - x_i`,
/// derived from the second-derivative form of the spline.
pub fn spline_oracle_coefficients(xs: &[f64], ys: &[f64]) -> Vec<[f64; 4]> {
    let m = dense_spline_second_derivatives(xs, ys);
    (0..xs.len() - 1)
        .map(|i| {
            let h = xs[i + 1] - xs[i];
            // S(x) = m_i (x1 - x)^3 / 6h + m_{i+1} (x - x0)^3 / 6h
            //      + (y_i / h - m_i h / 6)(x1 - x) + (y_{i+1} / h - m_{i+1} h / 6)(x - x0)
            let c1 = ys[i] / h - m[i] * h / 6.0;
            let c2 = ys[i + 1] / h - m[i + 1] * h / 6.0;
            let s0 = m[i] * h * h / 6.0 + c1 * h;
            let ds0 = -m[i] * h / 2.0 - c1 + c2;
            [s0, ds0, m[i] / 2.0, (m[i + 1] - m[i]) / (6.0 * h)]
        })
        .collect()
}

/// Evaluates power-form segments by linear knot search and explicit powers.
pub fn eval_power_form(knots: &[f64], segments: &[[f64; 4]], x: f64) -> f64 {
    let mut seg = 0;
    while seg + 1 < segments.len() && x >= knots[seg + 1] {
        seg += 1;
    }
    let t = x - knots[seg];
    let [a, b, c, d] = segments[seg];
    a + b * t + c * t * t + d * t * t * t
}

/// Numbers of sign changes of `f` on a dense uniform grid of `[0, 1]`.
pub fn sign_changes(f: impl Fn(f64) -> f64, n: usize) -> usize {
    let mut count = 0;
    let mut prev = f(0.0);
    for i in 1..=n {
        let y = f(i as f64 / n as f64);
        if y != 0.0 {
            if prev != 0.0 && (y > 0.0) != (prev > 0.0) {
                count += 1;
            }
            prev = y;
        }
    }
    count
}
