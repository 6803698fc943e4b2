use super::OutageVector;
use crate::error::Result;

/// Tail by the two-term recursion
/// `T(L, N) = (1 - p_N) T(L, N-1) + p_N T(L-1, N-1)`, `T(0, N) = 1`,
/// `T(N+1, N) = 0`, evaluated in place over a window of length `L + 1`.
///
/// `alpha[j]` holds `P(S_i >= j)` for the gateways seen so far. Only the
/// entries that can still reach `alpha[L]` are updated, giving exactly
/// `L (N - L + 1)` updates.
pub fn tail_recursive(p: &OutageVector, threshold: usize) -> Result<f64> {
    Ok(run(p, threshold)?.0)
}

/// Number of inner-loop updates [`tail_recursive`] performs for this query.
pub fn recursive_update_count(p: &OutageVector, threshold: usize) -> Result<u64> {
    Ok(run(p, threshold)?.1)
}

fn run(p: &OutageVector, threshold: usize) -> Result<(f64, u64)> {
    p.check_threshold(threshold)?;
    let n = p.len() as isize;
    let l = threshold as isize;
    let slack = n - l;
    let mut alpha = vec![0.0; threshold + 1];
    alpha[0] = 1.0;
    let mut low: isize = 1;
    let mut updates = 0u64;

    for (i, &pi) in (1..=n).zip(p.probs()) {
        let mut high = i;
        if i > slack + 1 {
            low = i - slack;
        }
        if i > l {
            high = l;
        }
        let qi = 1.0 - pi;
        let mut j = high;
        while j >= low {
            let j_idx = j as usize;
            // alpha is 0-based: alpha[j] here is alpha_{j+1} in 1-based form.
            alpha[j_idx] = qi * alpha[j_idx] + pi * alpha[j_idx - 1];
            updates += 1;
            j -= 1;
        }
    }
    Ok((alpha[threshold], updates))
}
