use std::f64::consts::TAU;

use num_complex::Complex64;

use super::OutageVector;
use crate::error::Result;

/// Largest imaginary residue tolerated in the DFT closed form.
const IMAG_RESIDUE_TOLERANCE: f64 = 1e-9;

/// Products smaller than this in both components are flushed to zero.
const NEGLIGIBLE_PRODUCT: f64 = 1e-200;

/// Tail from the DFT closed form
///
/// ```text
/// P(S_N >= L) = 1 - (L + sum_{n=1}^{N} (1 - c^{-nL}) / (1 - c^{-n})
///                          * prod_m (1 + (c^n - 1) p_m)) / (N + 1)
/// ```
///
/// with `c = exp(2πj / (N + 1))`. The real part is returned, clamped to
/// `[0, 1]`.
pub fn tail_cfe(p: &OutageVector, threshold: usize) -> Result<f64> {
    let (value, residue) = tail_cfe_with_residue(p, threshold)?;
    debug_assert!(
        residue.abs() <= IMAG_RESIDUE_TOLERANCE,
        "CFE imaginary residue {residue:e} exceeds {IMAG_RESIDUE_TOLERANCE:e}"
    );
    Ok(value)
}

/// Like [`tail_cfe`], also returning the discarded imaginary part of the
/// unclamped result.
pub fn tail_cfe_with_residue(p: &OutageVector, threshold: usize) -> Result<(f64, f64)> {
    p.check_threshold(threshold)?;
    let n = p.len();
    if threshold == 0 {
        return Ok((1.0, 0.0));
    }
    let period = n + 1;
    // c^k for integer k, reduced mod N + 1 so the angle stays exact.
    let root = |k: usize| Complex64::cis(TAU * (k % period) as f64 / period as f64);

    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let ck = root(k);
        let ratio = (1.0 - root(period - k * threshold % period)) / (1.0 - root(period - k));
        let step = ck - 1.0;
        let product = p.probs().iter().fold(Complex64::new(1.0, 0.0), |acc, &pm| {
            let next = acc * (1.0 + step * pm);
            // Keep long products out of subnormal range; they are negligible
            // next to the O(1) terms of the sum.
            if next.re.abs() < NEGLIGIBLE_PRODUCT && next.im.abs() < NEGLIGIBLE_PRODUCT {
                Complex64::new(0.0, 0.0)
            } else {
                next
            }
        });
        sum += ratio * product;
    }
    let total = (Complex64::new(threshold as f64, 0.0) + sum) / period as f64;
    let tail = Complex64::new(1.0, 0.0) - total;
    Ok((tail.re.clamp(0.0, 1.0), tail.im))
}
