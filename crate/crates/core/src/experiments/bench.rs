//! Wall-clock scaling of the exact methods.
//!
//! Each measurement repeats one call until at least `MIN_SAMPLE` has elapsed
//! and records the per-call time; the reported figure is the median over
//! repetitions. Growth exponents are least-squares slopes in log-log space.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pbd::{pmf_fft, tail_cfe, tail_recursive, OutageVector};

const MIN_SAMPLE: Duration = Duration::from_millis(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BenchMethod {
    /// Recursive tail at `L = 1` (linear work).
    RecursiveFirst,
    /// Recursive tail at `L = ⌊N/2⌋` (quadratic work).
    RecursiveHalf,
    /// DFT closed form at `L = ⌊N/2⌋`.
    Cfe,
    /// Full PMF through the FFT convolution tree.
    FftPmf,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 4] = [
        BenchMethod::RecursiveFirst,
        BenchMethod::RecursiveHalf,
        BenchMethod::Cfe,
        BenchMethod::FftPmf,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BenchMethod::RecursiveFirst => "recursive_L1",
            BenchMethod::RecursiveHalf => "recursive_Lhalf",
            BenchMethod::Cfe => "cfe",
            BenchMethod::FftPmf => "fft_pmf",
        }
    }

    fn run(self, p: &OutageVector) {
        let n = p.len();
        match self {
            BenchMethod::RecursiveFirst => {
                black_box(tail_recursive(p, 1).unwrap());
            }
            BenchMethod::RecursiveHalf => {
                black_box(tail_recursive(p, n / 2).unwrap());
            }
            BenchMethod::Cfe => {
                black_box(tail_cfe(p, n / 2).unwrap());
            }
            BenchMethod::FftPmf => {
                black_box(pmf_fft(p).unwrap());
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: BenchMethod,
    pub n_gateways: usize,
    pub median_seconds: f64,
}

/// `[2^8, 2^9, ..., n_max]` (powers of two up to `n_max`).
pub fn doubling_sizes(n_min: usize, n_max: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut n = n_min.max(1);
    while n <= n_max {
        sizes.push(n);
        n *= 2;
    }
    sizes
}

fn time_per_call(method: BenchMethod, p: &OutageVector) -> f64 {
    let start = Instant::now();
    let mut calls = 0u32;
    loop {
        method.run(p);
        calls += 1;
        let elapsed = start.elapsed();
        if elapsed >= MIN_SAMPLE {
            return elapsed.as_secs_f64() / calls as f64;
        }
    }
}

/// Median per-call time for every method and size.
pub fn run_benchmark(
    methods: &[BenchMethod],
    sizes: &[usize],
    repetitions: usize,
    seed: u64,
) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &n in sizes {
        let p = OutageVector::new((0..n).map(|_| rng.gen::<f64>()).collect())
            .expect("uniform draws lie in [0, 1)");
        for &method in methods {
            let mut samples: Vec<f64> = (0..repetitions.max(1))
                .map(|_| time_per_call(method, &p))
                .collect();
            samples.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                method,
                n_gateways: n,
                median_seconds: samples[samples.len() / 2],
            });
        }
    }
    rows
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Fitted growth exponent per method.
pub fn fitted_slopes(rows: &[BenchRow]) -> Vec<(BenchMethod, f64)> {
    BenchMethod::ALL
        .iter()
        .filter_map(|&m| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.method == m)
                .map(|r| (r.n_gateways as f64, r.median_seconds))
                .collect();
            (pts.len() >= 2).then(|| (m, loglog_slope(&pts)))
        })
        .collect()
}
