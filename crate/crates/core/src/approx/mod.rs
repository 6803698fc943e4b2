//! Approximations and bounds for the Poisson binomial upper tail.
//!
//! | method | estimate of `P(S_N >= L)`                                   |
//! |--------|-------------------------------------------------------------|
//! | BA     | `Bin(N, p̄)` tail, `p̄ = μ / N`                               |
//! | PA     | `Pois(μ)` tail                                              |
//! | NA     | `Q(ζ)`, `ζ = (L - μ - 0.5) / σ`                             |
//! | RNA    | `1 - G(ζ)` clamped to `[0, 1]`, skew-corrected normal       |
//! | CB     | `(μ/L)^L e^{L-μ}`, an upper bound for `L > ⌊μ⌋`             |
//!
//! [`tv_distance_and_bounds`] reports how far the binomial and Poisson laws
//! are from `S_N` in total variation, next to the Ehm and Le Cam bounds.

mod discrete;
mod normal;

pub use discrete::{binomial_pmf, binomial_upper_tail, poisson_mass, poisson_upper_tail};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_sf};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::pbd::{pmf_fft, OutageVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ApproxMethod {
    /// Binomial with the average outage probability.
    Ba,
    /// Poisson with the same mean.
    Pa,
    /// Normal with continuity correction.
    Na,
    /// Normal with a third-moment correction.
    Rna,
    /// Chernoff upper bound.
    Cb,
}

impl ApproxMethod {
    pub const ALL: [ApproxMethod; 5] = [
        ApproxMethod::Ba,
        ApproxMethod::Pa,
        ApproxMethod::Na,
        ApproxMethod::Rna,
        ApproxMethod::Cb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ApproxMethod::Ba => "BA",
            ApproxMethod::Pa => "PA",
            ApproxMethod::Na => "NA",
            ApproxMethod::Rna => "RNA",
            ApproxMethod::Cb => "CB",
        }
    }

    pub fn evaluate(self, p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
        match self {
            ApproxMethod::Ba => approx_binomial(p, threshold),
            ApproxMethod::Pa => approx_poisson(p, threshold),
            ApproxMethod::Na => approx_normal(p, threshold),
            ApproxMethod::Rna => approx_refined_normal(p, threshold),
            ApproxMethod::Cb => chernoff_bound(p, threshold),
        }
    }
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ApproxMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ApproxMethod::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown approximation method '{s}' (BA, PA, NA, RNA, CB)"))
    }
}

/// One approximate tail value. `value` is NaN when `applicable` is false.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxResult {
    pub value: f64,
    pub method: ApproxMethod,
    pub applicable: bool,
}

impl ApproxResult {
    fn new(method: ApproxMethod, value: f64) -> Self {
        ApproxResult {
            value: value.clamp(0.0, 1.0),
            method,
            applicable: true,
        }
    }

    fn inapplicable(method: ApproxMethod) -> Self {
        ApproxResult {
            value: f64::NAN,
            method,
            applicable: false,
        }
    }
}

pub fn approx_binomial(p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
    p.check_threshold(threshold)?;
    let n = p.len();
    let p_bar = p.moments().mean / n as f64;
    Ok(ApproxResult::new(
        ApproxMethod::Ba,
        binomial_upper_tail(n, p_bar.clamp(0.0, 1.0), threshold),
    ))
}

pub fn approx_poisson(p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
    p.check_threshold(threshold)?;
    Ok(ApproxResult::new(
        ApproxMethod::Pa,
        poisson_upper_tail(p.moments().mean, threshold),
    ))
}

fn continuity_corrected_z(threshold: usize, mean: f64, std_dev: f64) -> f64 {
    (threshold as f64 - mean - 0.5) / std_dev
}

pub fn approx_normal(p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
    p.check_threshold(threshold)?;
    let m = p.moments();
    let value = if m.std_dev == 0.0 {
        if threshold as f64 <= m.mean + 0.5 {
            1.0
        } else {
            0.0
        }
    } else {
        std_normal_sf(continuity_corrected_z(threshold, m.mean, m.std_dev))
    };
    Ok(ApproxResult::new(ApproxMethod::Na, value))
}

/// `1 - G(ζ)` with `G(x) = Φ(x) + ν (1 - x²) φ(x) / (6σ³)`, clamped to
/// `[0, 1]`. Inapplicable when `σ = 0`.
pub fn approx_refined_normal(p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
    p.check_threshold(threshold)?;
    let m = p.moments();
    if m.std_dev == 0.0 {
        return Ok(ApproxResult::inapplicable(ApproxMethod::Rna));
    }
    let z = continuity_corrected_z(threshold, m.mean, m.std_dev);
    let skew = m.third_central / (6.0 * m.std_dev.powi(3)) * (1.0 - z * z) * std_normal_pdf(z);
    Ok(ApproxResult::new(ApproxMethod::Rna, std_normal_sf(z) - skew))
}

/// Thresholds where the Chernoff bound is defined: `⌊μ⌋ + 1 ..= N`.
pub fn chernoff_range(p: &OutageVector) -> std::ops::RangeInclusive<usize> {
    (p.moments().mean.floor() as usize + 1)..=p.len()
}

/// `(μ/L)^L e^{L-μ}`; inapplicable when `μ = 0` or `L` is outside
/// [`chernoff_range`].
pub fn chernoff_bound(p: &OutageVector, threshold: usize) -> Result<ApproxResult> {
    p.check_threshold(threshold)?;
    let mu = p.moments().mean;
    if mu <= 0.0 || !chernoff_range(p).contains(&threshold) {
        return Ok(ApproxResult::inapplicable(ApproxMethod::Cb));
    }
    let l = threshold as f64;
    let value = (l * (mu / l).ln() + l - mu).exp();
    Ok(ApproxResult::new(ApproxMethod::Cb, value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TvBoundKind {
    Ehm,
    LeCam,
}

/// Exact total-variation distance between `S_N` and a reference law, with
/// the matching analytic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvDiagnostics {
    pub tv_distance: f64,
    pub bound: f64,
    pub bound_kind: TvBoundKind,
}

/// Binomial (Ehm) and Poisson (Le Cam) diagnostics. The binomial entry is
/// `None` when `p̄` is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvReport {
    pub binomial: Option<TvDiagnostics>,
    pub poisson: TvDiagnostics,
}

/// Cumulative Poisson mass at which the PMF is truncated for TV.
const POISSON_TRUNCATION: f64 = 1.0 - 1e-15;

pub fn tv_distance_and_bounds(p: &OutageVector) -> Result<TvReport> {
    let pmf = pmf_fft(p)?;
    let mass = pmf.mass();
    let n = p.len();
    let m = p.moments();
    let mu = m.mean;

    let p_bar = mu / n as f64;
    let binomial = (p_bar > 0.0 && p_bar < 1.0).then(|| {
        let q_bar = 1.0 - p_bar;
        let l1: f64 = binomial_pmf(n, p_bar)
            .iter()
            .zip(mass)
            .map(|(a, b)| (a - b).abs())
            .sum();
        let delta = 1.0 - m.variance / (n as f64 * p_bar * q_bar);
        let nf = n as f64;
        let bound = nf / (nf + 1.0)
            * (1.0 - p_bar.powi(n as i32 + 1) - q_bar.powi(n as i32 + 1))
            * delta;
        TvDiagnostics {
            tv_distance: 0.5 * l1,
            bound: bound.max(0.0),
            bound_kind: TvBoundKind::Ehm,
        }
    });

    let mut l1 = 0.0;
    let mut cumulative = 0.0;
    let mut k = 0usize;
    loop {
        let pois = poisson_mass(mu, k);
        let pbd = mass.get(k).copied().unwrap_or(0.0);
        l1 += (pbd - pois).abs();
        cumulative += pois;
        // Past the mode the masses only shrink; rounding may keep the
        // cumulative sum just short of the truncation level.
        let past_mode = k >= n && k as f64 > mu;
        if past_mode && (cumulative >= POISSON_TRUNCATION || pois < 1e-18) {
            break;
        }
        k += 1;
    }
    l1 += (1.0 - cumulative).max(0.0);
    let lecam: f64 = p.probs().iter().map(|x| x * x).sum();
    let poisson = TvDiagnostics {
        tv_distance: 0.5 * l1,
        bound: lecam,
        bound_kind: TvBoundKind::LeCam,
    };
    Ok(TvReport { binomial, poisson })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbd::tail_direct;

    fn pv(v: &[f64]) -> OutageVector {
        OutageVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn method_labels_round_trip() {
        for m in ApproxMethod::ALL {
            assert_eq!(m.label().parse::<ApproxMethod>().unwrap(), m);
        }
        assert!("XX".parse::<ApproxMethod>().is_err());
    }

    #[test]
    fn binomial_examples() {
        assert!((approx_binomial(&pv(&[0.5; 3]), 2).unwrap().value - 0.5).abs() < 1e-15);
        assert!((approx_binomial(&pv(&[0.02, 0.02]), 1).unwrap().value - 0.0396).abs() < 1e-15);
        assert_eq!(approx_binomial(&pv(&[0.0; 3]), 1).unwrap().value, 0.0);
    }

    #[test]
    fn binomial_exact_on_equal_entries() {
        let p = pv(&[0.13; 9]);
        for l in 0..=10 {
            let exact = tail_direct(&p, l).unwrap();
            assert!((approx_binomial(&p, l).unwrap().value - exact).abs() <= 1e-10);
        }
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(approx_poisson(&pv(&[0.0; 4]), 1).unwrap().value, 0.0);
        let v = approx_poisson(&pv(&[0.01, 0.02]), 1).unwrap().value;
        assert!((v - 0.029554466451491823).abs() < 1e-15);
        assert_eq!(approx_poisson(&pv(&[0.3, 0.6]), 0).unwrap().value, 1.0);
    }

    #[test]
    fn normal_examples() {
        // mu = 0.5, sigma = 0.5, L = 1 gives zeta = 0.
        let v = approx_normal(&pv(&[0.5]), 1).unwrap().value;
        assert_eq!(v, 0.5);

        let v = approx_normal(&pv(&[0.5; 100]), 51).unwrap().value;
        assert!((v - 0.460_172_162_722_971).abs() < 1e-12);

        assert_eq!(approx_normal(&pv(&[1.0, 1.0]), 3).unwrap().value, 0.0);
        assert_eq!(approx_normal(&pv(&[1.0, 1.0]), 2).unwrap().value, 1.0);
    }

    #[test]
    fn refined_normal_reduces_without_skew() {
        let p = pv(&[0.5; 12]);
        for l in 0..=13 {
            assert_eq!(
                approx_refined_normal(&p, l).unwrap().value,
                approx_normal(&p, l).unwrap().value
            );
        }
    }

    #[test]
    fn refined_normal_correction_term() {
        // Single gateway with p = (2 - sqrt 2) / 4 puts L = 1 at zeta = 1,
        // where the skew term vanishes although nu != 0.
        let p = pv(&[(2.0 - 2f64.sqrt()) / 4.0]);
        assert!(p.moments().third_central > 0.05);
        let r = approx_refined_normal(&p, 1).unwrap().value;
        assert!((r - std_normal_sf(1.0)).abs() < 1e-15);
        let p = pv(&[0.1, 0.2, 0.3, 0.4, 0.05]);
        let m = p.moments();
        let l = 2usize;
        let z = (l as f64 - m.mean - 0.5) / m.std_dev;
        let corr = m.third_central / (6.0 * m.std_dev.powi(3)) * (1.0 - z * z) * std_normal_pdf(z);
        let r = approx_refined_normal(&p, l).unwrap().value;
        assert!((r - (std_normal_sf(z) - corr)).abs() < 1e-15);
    }

    #[test]
    fn refined_normal_reference_value() {
        // mpmath evaluation of 1 - G(zeta) for p = [0.1, 0.2, 0.3, 0.4], L = 2;
        // the exact tail there is 0.2572.
        let p = pv(&[0.1, 0.2, 0.3, 0.4]);
        let r = approx_refined_normal(&p, 2).unwrap().value;
        assert!((r - 0.2567341657312909).abs() < 1e-12);
        assert!((tail_direct(&p, 2).unwrap() - 0.2572).abs() < 1e-15);
    }

    #[test]
    fn refined_normal_inapplicable_at_zero_variance() {
        let r = approx_refined_normal(&pv(&[1.0, 0.0]), 1).unwrap();
        assert!(!r.applicable);
        assert!(r.value.is_nan());
    }

    #[test]
    fn refined_normal_is_clamped() {
        let p = pv(&[0.001, 0.002, 0.9999]);
        for l in 0..=4 {
            let v = approx_refined_normal(&p, l).unwrap().value;
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn chernoff_examples() {
        let p = pv(&[0.01, 0.02]);
        let b1 = chernoff_bound(&p, 1).unwrap();
        assert!((b1.value - 0.07913833378062458).abs() < 1e-15);
        assert!(b1.value >= tail_direct(&p, 1).unwrap());
        let b2 = chernoff_bound(&p, 2).unwrap();
        assert!((b2.value - 0.001613402209877988).abs() < 1e-15);
        assert!(b2.value >= 0.0002);

        let p = pv(&[0.9, 0.9, 0.9]);
        assert!(!chernoff_bound(&p, 2).unwrap().applicable);
        assert!(chernoff_bound(&p, 3).unwrap().applicable);
        assert!(!chernoff_bound(&pv(&[0.0, 0.0]), 1).unwrap().applicable);
    }

    #[test]
    fn tv_equal_entries_vanish() {
        let r = tv_distance_and_bounds(&pv(&[0.2; 6])).unwrap();
        let ehm = r.binomial.unwrap();
        assert!(ehm.tv_distance < 1e-15);
        assert!(ehm.bound < 1e-15);
    }

    #[test]
    fn tv_zero_vector() {
        let r = tv_distance_and_bounds(&pv(&[0.0, 0.0])).unwrap();
        assert!(r.binomial.is_none());
        assert_eq!(r.poisson.tv_distance, 0.0);
        assert_eq!(r.poisson.bound, 0.0);
    }

    #[test]
    fn tv_two_gateways_reference() {
        // mpmath: half l1 between [0.72, 0.26, 0.02] and Pois(0.3), including
        // the Poisson mass above 2; and against Bin(2, 0.15).
        let r = tv_distance_and_bounds(&pv(&[0.1, 0.2])).unwrap();
        assert!((r.poisson.bound - 0.05).abs() < 1e-16);
        assert!((r.poisson.tv_distance - 0.03775453379548464).abs() < 1e-14);
        let ehm = r.binomial.unwrap();
        assert!((ehm.tv_distance - 0.005).abs() < 1e-15);
        assert!((ehm.bound - 0.005).abs() < 1e-15);
        assert!(ehm.tv_distance <= ehm.bound + 1e-12);
    }
}
