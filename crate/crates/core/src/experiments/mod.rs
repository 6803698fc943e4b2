//! Random-configuration studies: approximation error metrics, SOP sweeps over
//! `(N, ⌈r⌉)` and improvement-factor sweeps over `(K, ⌈r⌉)`.
//!
//! Each configuration is one vector of outage probabilities drawn for the
//! largest system in the study; smaller systems use its prefixes. Adding
//! gateways then never raises the SOP of an individual configuration, not just
//! of the average. All studies are deterministic in their inputs; per-config
//! work runs in parallel and is reduced in configuration order.

pub mod bench;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{chernoff_range, ApproxMethod};
use crate::error::{Error, Result};
use crate::pbd::{tail_recursive, OutageVector};
use crate::sgd::improvement_from_tails;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomConfigSpec {
    pub n_configs: usize,
    pub n_gateways: usize,
    pub prob_low: f64,
    pub prob_high: f64,
    pub seed: u64,
}

impl RandomConfigSpec {
    /// 1000 configurations with outage probabilities uniform on `(0, 0.02)`.
    pub fn small_probability_regime(n_gateways: usize, seed: u64) -> Self {
        RandomConfigSpec {
            n_configs: 1000,
            n_gateways,
            prob_low: 0.0,
            prob_high: 0.02,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_configs == 0 {
            return Err(Error::InvalidScenario("n_configs must be at least 1".into()));
        }
        if self.n_gateways == 0 {
            return Err(Error::NoGateways);
        }
        if !(0.0 <= self.prob_low && self.prob_low < self.prob_high && self.prob_high <= 1.0) {
            return Err(Error::InvalidScenario(format!(
                "probability range ({}, {}) must satisfy 0 <= low < high <= 1",
                self.prob_low, self.prob_high
            )));
        }
        Ok(())
    }

    fn with_gateways(&self, n_gateways: usize) -> Self {
        RandomConfigSpec { n_gateways, ..*self }
    }
}

/// `n_configs` vectors with entries i.i.d. uniform on the open interval
/// `(prob_low, prob_high)`.
pub fn gen_random_configs(spec: &RandomConfigSpec) -> Result<Vec<OutageVector>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.n_configs)
        .map(|_| {
            let probs = (0..spec.n_gateways)
                .map(|_| loop {
                    let u = rng.gen_range(spec.prob_low..spec.prob_high);
                    if u > spec.prob_low {
                        break u;
                    }
                })
                .collect();
            OutageVector::new(probs)
        })
        .collect()
}

/// maxAE, RMSE and MAE of an approximation over its evaluation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub method: ApproxMethod,
    pub max_ae: f64,
    pub rmse: f64,
    pub mean_ae: f64,
    pub eval_set_size: usize,
}

/// Error metrics for `method` against the exact recursive tail. The
/// evaluation set is `0..=N`, or `⌊μ⌋+1..=N` for the Chernoff bound.
pub fn error_metrics(p: &OutageVector, method: ApproxMethod) -> Result<ErrorReport> {
    let eval_set: Vec<usize> = match method {
        ApproxMethod::Cb => chernoff_range(p).collect(),
        _ => (0..=p.len()).collect(),
    };
    if eval_set.is_empty() {
        return Err(Error::EmptyEvaluationSet);
    }
    let approx = eval_set
        .iter()
        .map(|&l| method.evaluate(p, l).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let (max_ae, rmse, mean_ae) = error_metrics_against(p, &eval_set, &approx)?;
    Ok(ErrorReport {
        method,
        max_ae,
        rmse,
        mean_ae,
        eval_set_size: eval_set.len(),
    })
}

/// `(maxAE, RMSE, MAE)` of `approx[i]` against the exact tail at
/// `eval_set[i]`.
pub fn error_metrics_against(
    p: &OutageVector,
    eval_set: &[usize],
    approx: &[f64],
) -> Result<(f64, f64, f64)> {
    if eval_set.is_empty() || eval_set.len() != approx.len() {
        return Err(Error::EmptyEvaluationSet);
    }
    let mut max_ae = 0.0f64;
    let mut sum_sq = 0.0;
    let mut sum_abs = 0.0;
    for (&l, &a) in eval_set.iter().zip(approx) {
        let err = (tail_recursive(p, l)? - a).abs();
        max_ae = max_ae.max(err);
        sum_sq += err * err;
        sum_abs += err;
    }
    let size = eval_set.len() as f64;
    let mean_ae = sum_abs / size;
    // Rounding can push RMSE an ulp outside [MAE, maxAE].
    let rmse = (sum_sq / size).sqrt().clamp(mean_ae, max_ae);
    Ok((max_ae, rmse, mean_ae))
}

/// Error metrics averaged over configurations, for one `(N, method)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragedError {
    pub n_gateways: usize,
    /// Arithmetic means of the per-configuration metrics; `eval_set_size` is
    /// the total number of `(configuration, L)` evaluations.
    pub report: ErrorReport,
    pub n_configs: usize,
}

/// Per-N, per-method averages of the error metrics over random
/// configurations (`spec.n_gateways` is replaced by each entry of
/// `n_range`).
pub fn averaged_error_study(
    spec: &RandomConfigSpec,
    n_range: &[usize],
) -> Result<Vec<AveragedError>> {
    let n_max = check_grid(n_range, "N")?;
    let configs = gen_random_configs(&spec.with_gateways(n_max))?;
    let mut out = Vec::new();
    for &n in n_range {
        let per_config: Vec<Vec<Option<ErrorReport>>> = configs
            .par_iter()
            .map(|full| {
                let p = full.prefix(n);
                ApproxMethod::ALL
                    .iter()
                    .map(|&m| match error_metrics(&p, m) {
                        Ok(r) => Ok(Some(r)),
                        Err(Error::EmptyEvaluationSet) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (mi, &method) in ApproxMethod::ALL.iter().enumerate() {
            let (mut max_ae, mut rmse, mut mean_ae) = (0.0, 0.0, 0.0);
            let (mut used, mut evals) = (0usize, 0usize);
            for r in per_config.iter().filter_map(|row| row[mi]) {
                max_ae += r.max_ae;
                rmse += r.rmse;
                mean_ae += r.mean_ae;
                used += 1;
                evals += r.eval_set_size;
            }
            if used == 0 {
                continue;
            }
            let k = used as f64;
            out.push(AveragedError {
                n_gateways: n,
                report: ErrorReport {
                    method,
                    max_ae: max_ae / k,
                    rmse: rmse / k,
                    mean_ae: mean_ae / k,
                    eval_set_size: evals,
                },
                n_configs: used,
            });
        }
    }
    Ok(out)
}

/// One averaged cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_gateways: usize,
    pub ceil_r: usize,
    /// Extra gateways `K` (0 for SOP sweeps).
    pub extra_gateways: usize,
    pub value: f64,
    /// Configurations contributing to `value`.
    pub n_configs: usize,
    /// Configurations excluded because the extended SOP was zero.
    pub censored: usize,
}

fn check_grid(values: &[usize], name: &str) -> Result<usize> {
    match values.iter().max() {
        Some(&m) if !values.contains(&0) || name == "K" => Ok(m),
        _ => Err(Error::InvalidScenario(format!(
            "{name} grid must be non-empty with positive entries"
        ))),
    }
}

/// Average SOP for every `(N, ⌈r⌉)` with `⌈r⌉ <= N`.
pub fn sop_sweep(
    spec: &RandomConfigSpec,
    ceil_r_range: &[usize],
    n_range: &[usize],
) -> Result<Vec<SweepRow>> {
    let n_max = check_grid(n_range, "N")?;
    check_grid(ceil_r_range, "ceil(r)")?;
    let configs = gen_random_configs(&spec.with_gateways(n_max))?;
    let cells: Vec<(usize, usize)> = n_range
        .iter()
        .flat_map(|&n| {
            ceil_r_range
                .iter()
                .filter(move |&&c| c <= n)
                .map(move |&c| (n, c))
        })
        .collect();

    let per_config: Vec<Vec<f64>> = configs
        .par_iter()
        .map(|full| {
            cells
                .iter()
                .map(|&(n, c)| tail_recursive(&full.prefix(n), n - c + 1))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(cells
        .iter()
        .enumerate()
        .map(|(ci, &(n, c))| SweepRow {
            n_gateways: n,
            ceil_r: c,
            extra_gateways: 0,
            value: per_config.iter().map(|row| row[ci]).sum::<f64>() / configs.len() as f64,
            n_configs: configs.len(),
            censored: 0,
        })
        .collect())
}

/// Average generalized improvement factor of `base_n + K` over `base_n`
/// gateways for every `(K, ⌈r⌉)` with `⌈r⌉ <= base_n`. Configurations whose
/// extended SOP is zero are censored.
pub fn improvement_sweep(
    spec: &RandomConfigSpec,
    base_n: usize,
    k_range: &[usize],
    ceil_r_range: &[usize],
) -> Result<Vec<SweepRow>> {
    if base_n == 0 {
        return Err(Error::NoGateways);
    }
    let k_max = check_grid(k_range, "K")?;
    check_grid(ceil_r_range, "ceil(r)")?;
    let configs = gen_random_configs(&spec.with_gateways(base_n + k_max))?;
    let cells: Vec<(usize, usize)> = k_range
        .iter()
        .flat_map(|&k| {
            ceil_r_range
                .iter()
                .filter(|&&c| c <= base_n)
                .map(move |&c| (k, c))
        })
        .collect();

    let per_config: Vec<Vec<Option<f64>>> = configs
        .par_iter()
        .map(|full| {
            let base = full.prefix(base_n);
            cells
                .iter()
                .map(|&(k, c)| match improvement_from_tails(&base, &full.prefix(base_n + k), c) {
                    Ok(r) => Ok(Some(r.factor)),
                    Err(Error::ZeroDenominator) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(cells
        .iter()
        .enumerate()
        .map(|(ci, &(k, c))| {
            let kept: Vec<f64> = per_config.iter().filter_map(|row| row[ci]).collect();
            SweepRow {
                n_gateways: base_n,
                ceil_r: c,
                extra_gateways: k,
                value: if kept.is_empty() {
                    f64::NAN
                } else {
                    kept.iter().sum::<f64>() / kept.len() as f64
                },
                n_configs: kept.len(),
                censored: configs.len() - kept.len(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_sop;
    use crate::pbd::tail_direct;
    use crate::sgd::{classical_improvement_factor, SgdScenario};

    fn spec(n_configs: usize, n_gateways: usize, seed: u64) -> RandomConfigSpec {
        RandomConfigSpec {
            n_configs,
            n_gateways,
            prob_low: 0.0,
            prob_high: 0.02,
            seed,
        }
    }

    #[test]
    fn configs_are_deterministic_and_in_range() {
        let s = spec(2, 3, 42);
        let a = gen_random_configs(&s).unwrap();
        assert_eq!(a, gen_random_configs(&s).unwrap());
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|v| v.len() == 3));
        assert!(a
            .iter()
            .flat_map(|v| v.probs())
            .all(|&x| x > 0.0 && x < 0.02));
    }

    #[test]
    fn narrow_range_gives_near_constant_vectors() {
        let s = RandomConfigSpec {
            prob_low: 0.3,
            prob_high: 0.3 + 1e-12,
            ..spec(5, 4, 1)
        };
        for v in gen_random_configs(&s).unwrap() {
            assert!(v.probs().iter().all(|&x| (x - 0.3).abs() < 1e-11));
        }
    }

    #[test]
    fn sample_mean_matches_uniform() {
        let configs = gen_random_configs(&spec(1000, 6, 5)).unwrap();
        let all: Vec<f64> = configs.iter().flat_map(|v| v.probs().to_vec()).collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let se = 0.02 / 12f64.sqrt() / (all.len() as f64).sqrt();
        assert!((mean - 0.01).abs() <= 3.0 * se, "mean {mean}");
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(gen_random_configs(&spec(0, 3, 1)).is_err());
        assert!(gen_random_configs(&RandomConfigSpec { prob_low: 0.5, prob_high: 0.5, ..spec(1, 3, 1) }).is_err());
        assert!(gen_random_configs(&RandomConfigSpec { prob_high: 1.5, ..spec(1, 3, 1) }).is_err());
    }

    #[test]
    fn self_comparison_is_zero() {
        let p = OutageVector::new(vec![0.1, 0.4, 0.25]).unwrap();
        let set: Vec<usize> = (0..=3).collect();
        let exact: Vec<f64> = set.iter().map(|&l| tail_recursive(&p, l).unwrap()).collect();
        assert_eq!(error_metrics_against(&p, &set, &exact).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn binomial_metrics_vanish_on_equal_entries() {
        let p = OutageVector::uniform(7, 0.015).unwrap();
        let r = error_metrics(&p, ApproxMethod::Ba).unwrap();
        assert!(r.max_ae <= 1e-10 && r.rmse <= 1e-10 && r.mean_ae <= 1e-10);
        assert_eq!(r.eval_set_size, 8);
    }

    #[test]
    fn poisson_metrics_two_gateways() {
        let p = OutageVector::new(vec![0.1, 0.2]).unwrap();
        let exact = [1.0, 0.28, 0.02];
        for (l, e) in exact.iter().enumerate() {
            let s = SgdScenario::equal_capacity(1.0, (2 - l) as f64 + 0.5, p.clone());
            if let Ok(s) = s {
                assert!((enumerate_sop(&s).unwrap() - e).abs() < 1e-15);
            }
            assert!((tail_direct(&p, l).unwrap() - e).abs() < 1e-15);
        }
        let pa = [1.0, -(-0.3f64).exp_m1(), 1.0 - (-0.3f64).exp() * 1.3];
        let errs: Vec<f64> = exact.iter().zip(pa).map(|(e, a)| (e - a).abs()).collect();
        let r = error_metrics(&p, ApproxMethod::Pa).unwrap();
        let max = errs.iter().cloned().fold(0.0, f64::max);
        let mean = errs.iter().sum::<f64>() / 3.0;
        let rms = (errs.iter().map(|e| e * e).sum::<f64>() / 3.0).sqrt();
        assert!((r.max_ae - max).abs() < 1e-15);
        assert!((r.mean_ae - mean).abs() < 1e-15);
        assert!((r.rmse - rms).abs() < 1e-15);
    }

    #[test]
    fn chernoff_metrics_use_restricted_set() {
        let p = OutageVector::new(vec![0.9, 0.8, 0.7, 0.1]).unwrap();
        let r = error_metrics(&p, ApproxMethod::Cb).unwrap();
        assert_eq!(r.eval_set_size, 2); // mu = 2.5 -> L in {3, 4}
        let p = OutageVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(error_metrics(&p, ApproxMethod::Cb), Err(Error::EmptyEvaluationSet));
    }

    #[test]
    fn single_config_study_equals_single_metrics() {
        let s = spec(1, 6, 77);
        let p = gen_random_configs(&s).unwrap().remove(0);
        let study = averaged_error_study(&s, &[6]).unwrap();
        assert_eq!(study.len(), 5);
        for row in study {
            let direct = error_metrics(&p, row.report.method).unwrap();
            assert_eq!(row.report, direct);
        }
    }

    #[test]
    fn sop_sweep_shadowed_by_enumeration() {
        let s = spec(20, 0, 8);
        let rows = sop_sweep(&s, &[1, 2, 3, 4, 5, 6], &[3, 4, 5, 6]).unwrap();
        let configs = gen_random_configs(&s.with_gateways(6)).unwrap();
        for row in &rows {
            assert!(row.ceil_r <= row.n_gateways);
            let mut total = 0.0;
            for full in &configs {
                let p = full.prefix(row.n_gateways);
                // Demand strictly between (ceil_r - 1) and ceil_r capacities.
                let sc = SgdScenario::equal_capacity(1.0, row.ceil_r as f64 - 0.5, p).unwrap();
                total += enumerate_sop(&sc).unwrap();
            }
            assert!((row.value - total / configs.len() as f64).abs() < 1e-12);
        }
        let top = rows.iter().find(|r| r.n_gateways == 3 && r.ceil_r == 3).unwrap();
        let at_least_one: f64 = configs
            .iter()
            .map(|c| 1.0 - c.probs()[..3].iter().map(|p| 1.0 - p).product::<f64>())
            .sum::<f64>()
            / 20.0;
        assert!((top.value - at_least_one).abs() < 1e-15);
    }

    #[test]
    fn improvement_sweep_reduces_to_classical_factor() {
        let s = spec(10, 0, 3);
        let rows = improvement_sweep(&s, 1, &[0, 1, 2, 3], &[1]).unwrap();
        let configs = gen_random_configs(&s.with_gateways(4)).unwrap();
        for row in rows {
            let k = row.extra_gateways;
            if k == 0 {
                assert_eq!(row.value, 1.0);
                continue;
            }
            let mean_i = configs
                .iter()
                .map(|c| classical_improvement_factor(&c.prefix(1 + k)).unwrap())
                .sum::<f64>()
                / 10.0;
            assert!((row.value - mean_i).abs() <= 1e-12 * mean_i);
        }
    }

    #[test]
    fn empty_grids_rejected() {
        let s = spec(3, 0, 1);
        assert!(sop_sweep(&s, &[], &[3]).is_err());
        assert!(sop_sweep(&s, &[1], &[0, 3]).is_err());
        assert!(improvement_sweep(&s, 0, &[1], &[1]).is_err());
    }
}
