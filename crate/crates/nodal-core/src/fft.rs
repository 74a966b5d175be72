//! Thin wrapper around `rustfft` with cached plans and the normalization
//! convention used throughout the crate: the forward transform carries the
//! `1/N^d` factor, so coefficients are Fourier coefficients of the sampled
//! field and the inverse transform is plain synthesis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

static PLANS: Lazy<Mutex<PlanCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// In-place forward DFT along a contiguous buffer of length `n`,
/// normalized by `1/n`.
fn forward_1d(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, false).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

fn inverse_1d(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, true).process(buf);
}

/// Forward transform of real samples; `dim` is 1 or 2 with row-major layout
/// `idx = i*n + j` in 2D.
pub fn forward(values: &[f64], dim: usize, n: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    match dim {
        1 => forward_1d(&mut buf),
        2 => {
            for row in buf.chunks_exact_mut(n) {
                forward_1d(row);
            }
            transpose(&mut buf, n);
            for row in buf.chunks_exact_mut(n) {
                forward_1d(row);
            }
            transpose(&mut buf, n);
        }
        _ => unreachable!("grid dimensions are validated on construction"),
    }
    buf
}

/// Inverse transform; returns complex samples (callers take real parts).
pub fn inverse(coeffs: &[Complex64], dim: usize, n: usize) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    match dim {
        1 => inverse_1d(&mut buf),
        2 => {
            for row in buf.chunks_exact_mut(n) {
                inverse_1d(row);
            }
            transpose(&mut buf, n);
            for row in buf.chunks_exact_mut(n) {
                inverse_1d(row);
            }
            transpose(&mut buf, n);
        }
        _ => unreachable!(),
    }
    buf
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
