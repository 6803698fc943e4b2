//! Exact Poisson binomial computations.
//!
//! `S_N = X_1 + ... + X_N` with independent `X_n ~ Bernoulli(p_n)`. The upper
//! tail `P(S_N >= L)` is available through four independent algorithms that
//! must agree to round-off:
//!
//! | function           | cost                 |
//! |--------------------|----------------------|
//! | [`tail_direct`]    | `O(2^N N)`           |
//! | [`tail_cfe`]       | `Θ(N^2)`             |
//! | [`tail_recursive`] | `Θ(L(N - L + 1))`    |
//! | [`pmf_fft`]        | `O(N (log N)^2)`     |

mod cfe;
mod direct;
mod fft;
mod recursive;

pub use cfe::{tail_cfe, tail_cfe_with_residue};
pub use direct::{tail_direct, DIRECT_MAX_GATEWAYS};
pub use fft::{convolve, pmf_fft, DIRECT_CONVOLUTION_CUTOFF};
pub use recursive::{recursive_update_count, tail_recursive};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-gateway outage probabilities `p = [p_1, ..., p_N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OutageVector(Vec<f64>);

impl OutageVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NoGateways);
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        Ok(OutageVector(probs))
    }

    /// `n` gateways sharing the same outage probability.
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Vector of `self` followed by `extra`.
    pub fn concat(&self, extra: &OutageVector) -> OutageVector {
        let mut probs = self.0.clone();
        probs.extend_from_slice(&extra.0);
        OutageVector(probs)
    }

    /// First `n` entries. Panics if `n` is zero or exceeds the length.
    pub fn prefix(&self, n: usize) -> OutageVector {
        assert!(n >= 1 && n <= self.len(), "prefix length {n} out of range");
        OutageVector(self.0[..n].to_vec())
    }

    pub fn moments(&self) -> PbdMoments {
        moments(self)
    }

    pub fn check_threshold(&self, threshold: usize) -> Result<()> {
        if threshold > self.len() + 1 {
            return Err(Error::ThresholdOutOfRange {
                threshold,
                n_gateways: self.len(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for OutageVector {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        OutageVector::new(probs)
    }
}

impl From<OutageVector> for Vec<f64> {
    fn from(v: OutageVector) -> Self {
        v.0
    }
}

/// Mean, variance and third central moment of `S_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PbdMoments {
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    pub third_central: f64,
}

pub fn moments(p: &OutageVector) -> PbdMoments {
    let (mut mean, mut variance, mut third_central) = (0.0, 0.0, 0.0);
    for &pn in p.probs() {
        let v = pn * (1.0 - pn);
        mean += pn;
        variance += v;
        third_central += v * (1.0 - 2.0 * pn);
    }
    PbdMoments {
        mean,
        variance,
        std_dev: variance.sqrt(),
        third_central,
    }
}

/// A validated upper-tail query `P(S_N >= threshold)`, `0 <= threshold <= N + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailQuery {
    threshold: usize,
    n_gateways: usize,
}

impl TailQuery {
    pub fn new(threshold: usize, n_gateways: usize) -> Result<Self> {
        if n_gateways == 0 {
            return Err(Error::NoGateways);
        }
        if threshold > n_gateways + 1 {
            return Err(Error::ThresholdOutOfRange {
                threshold,
                n_gateways,
            });
        }
        Ok(TailQuery {
            threshold,
            n_gateways,
        })
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn n_gateways(&self) -> usize {
        self.n_gateways
    }
}

/// Probability mass function of `S_N`, indexed `0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PbdPmf(Vec<f64>);

/// Normalization tolerance for [`PbdPmf::new`].
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;

impl PbdPmf {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.len() < 2 {
            return Err(Error::NoGateways);
        }
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| m.is_nan() || **m < 0.0) {
            return Err(Error::Internal(format!("negative mass {m} at index {i}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::Internal(format!("masses sum to {total}, not 1")));
        }
        Ok(PbdPmf(mass))
    }

    pub fn mass(&self) -> &[f64] {
        &self.0
    }

    pub fn n_gateways(&self) -> usize {
        self.0.len() - 1
    }

    pub fn moments(&self) -> PbdMoments {
        let mean: f64 = self.0.iter().enumerate().map(|(m, w)| m as f64 * w).sum();
        let (mut variance, mut third_central) = (0.0, 0.0);
        for (m, w) in self.0.iter().enumerate() {
            let d = m as f64 - mean;
            variance += d * d * w;
            third_central += d * d * d * w;
        }
        PbdMoments {
            mean,
            variance,
            std_dev: variance.sqrt(),
            third_central,
        }
    }
}

/// Suffix sum `sum_{m >= threshold} mass[m]`.
pub fn tail_from_pmf(pmf: &PbdPmf, threshold: usize) -> Result<f64> {
    let n = pmf.n_gateways();
    if threshold > n + 1 {
        return Err(Error::ThresholdOutOfRange {
            threshold,
            n_gateways: n,
        });
    }
    if threshold == 0 {
        return Ok(1.0);
    }
    let tail: f64 = pmf.mass()[threshold..].iter().sum();
    Ok(tail.min(1.0))
}
