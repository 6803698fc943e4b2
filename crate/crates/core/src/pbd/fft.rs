use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{OutageVector, PbdPmf};
use crate::error::{Error, Result};

/// Operands up to this length are convolved directly; longer ones by FFT.
pub const DIRECT_CONVOLUTION_CUTOFF: usize = 64;

/// Masses in `(-NEGATIVE_MASS_TOLERANCE, 0)` are round-off and clamped to 0.
const NEGATIVE_MASS_TOLERANCE: f64 = 1e-12;

/// Full PMF of `S_N` as the product of the generating functions
/// `q_n + p_n z`, multiplied pairwise along a balanced binary tree.
pub fn pmf_fft(p: &OutageVector) -> Result<PbdPmf> {
    let mut planner = FftPlanner::new();
    let mut mass = tree_product(p.probs(), &mut planner);

    for (i, m) in mass.iter_mut().enumerate() {
        if *m < 0.0 {
            if *m <= -NEGATIVE_MASS_TOLERANCE {
                return Err(Error::Internal(format!(
                    "FFT convolution produced mass {m:e} at index {i}"
                )));
            }
            *m = 0.0;
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= total);
    PbdPmf::new(mass)
}

fn tree_product(probs: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    match probs {
        [] => vec![1.0],
        [p] => vec![1.0 - p, *p],
        _ => {
            let (left, right) = probs.split_at(probs.len() / 2);
            let a = tree_product(left, planner);
            let b = tree_product(right, planner);
            convolve_with(&a, &b, planner)
        }
    }
}

/// Linear convolution of two real sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    convolve_with(a, b, &mut FftPlanner::new())
}

fn convolve_with(a: &[f64], b: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().max(b.len()) <= DIRECT_CONVOLUTION_CUTOFF {
        return convolve_direct(a, b);
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let pad = |x: &[f64]| {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(size, Complex64::new(0.0, 0.0));
        buf
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..out_len].iter().map(|c| c.re * scale).collect()
}

fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
