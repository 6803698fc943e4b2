//! Ground truth independent of the analytic code paths: literal enumeration
//! of every outage pattern, and Monte Carlo simulation of link states.
//!
//! The simulator uses ChaCha8 seeded from a `u64`. Partition `i` of a
//! partitioned run draws from stream `i` of the same seed, so an estimate is a
//! deterministic function of `(seed, n_trials, partitions)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sgd::SgdScenario;

/// Largest `N` accepted by [`enumerate_sop`].
pub const ENUMERATE_MAX_GATEWAYS: usize = 20;

/// SOP by visiting all `2^N` outage patterns.
pub fn enumerate_sop(scenario: &SgdScenario) -> Result<f64> {
    let n = scenario.n_gateways();
    if n > ENUMERATE_MAX_GATEWAYS {
        return Err(Error::SizeLimit {
            method: "enumerate",
            n,
            limit: ENUMERATE_MAX_GATEWAYS,
        });
    }
    let caps = scenario.gateway_capacities();
    let probs = scenario.outage_probs().probs();
    let demand = scenario.total_demand();

    let mut sop = 0.0;
    for pattern in 0u32..(1 << n) {
        // bit i set: gateway i in outage
        let mut available = 0.0;
        let mut prob = 1.0;
        for i in 0..n {
            if pattern & (1 << i) != 0 {
                prob *= probs[i];
            } else {
                prob *= 1.0 - probs[i];
                available += caps[i];
            }
        }
        if available < demand {
            sop += prob;
        }
    }
    Ok(sop)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n_trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n_trials: u64, seed: u64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::InvalidScenario("n_trials must be at least 1".into()));
        }
        Ok(McConfig { n_trials, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_error: f64,
    pub n_trials: u64,
}

impl McEstimate {
    fn from_counts(outages: u64, n_trials: u64) -> Self {
        let p_hat = outages as f64 / n_trials as f64;
        McEstimate {
            p_hat,
            std_error: (p_hat * (1.0 - p_hat) / n_trials as f64).sqrt(),
            n_trials,
        }
    }
}

pub fn simulate_sop(scenario: &SgdScenario, cfg: McConfig) -> McEstimate {
    simulate_sop_partitioned(scenario, cfg, 1)
}

/// Splits the trials over `partitions` independent streams, run in parallel.
pub fn simulate_sop_partitioned(scenario: &SgdScenario, cfg: McConfig, partitions: u64) -> McEstimate {
    let partitions = partitions.clamp(1, cfg.n_trials);
    let base = cfg.n_trials / partitions;
    let extra = cfg.n_trials % partitions;
    let outages: u64 = (0..partitions)
        .into_par_iter()
        .map(|i| {
            let trials = base + u64::from(i < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            count_outages(scenario, trials, &mut rng)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    McEstimate::from_counts(outages, cfg.n_trials)
}

fn count_outages(scenario: &SgdScenario, trials: u64, rng: &mut ChaCha8Rng) -> u64 {
    let caps = scenario.gateway_capacities();
    let probs = scenario.outage_probs().probs();
    let demand = scenario.total_demand();
    let mut outages = 0;
    for _ in 0..trials {
        let mut available = 0.0;
        for (&cap, &p) in caps.iter().zip(probs) {
            let u: f64 = rng.gen();
            if u >= p {
                available += cap;
            }
        }
        if available < demand {
            outages += 1;
        }
    }
    outages
}
