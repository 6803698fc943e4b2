use super::OutageVector;
use crate::error::{Error, Result};

/// Largest `N` accepted by [`tail_direct`]; `2^25` subsets is seconds of work.
pub const DIRECT_MAX_GATEWAYS: usize = 25;

/// Tail by summing the probability of every outage pattern with at least
/// `threshold` failed gateways.
pub fn tail_direct(p: &OutageVector, threshold: usize) -> Result<f64> {
    let n = p.len();
    p.check_threshold(threshold)?;
    if n > DIRECT_MAX_GATEWAYS {
        return Err(Error::SizeLimit {
            method: "direct",
            n,
            limit: DIRECT_MAX_GATEWAYS,
        });
    }
    if threshold == 0 {
        return Ok(1.0);
    }
    let probs = p.probs();
    let mut tail = 0.0;
    for pattern in 0u32..(1u32 << n) {
        if (pattern.count_ones() as usize) < threshold {
            continue;
        }
        let mut prob = 1.0;
        for (i, &pi) in probs.iter().enumerate() {
            prob *= if pattern >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        tail += prob;
    }
    Ok(tail.clamp(0.0, 1.0))
}
