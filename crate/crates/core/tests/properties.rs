use proptest::prelude::*;

use sgd_outage::approx::{
    approx_binomial, approx_normal, approx_poisson, approx_refined_normal, chernoff_bound,
    chernoff_range, tv_distance_and_bounds, ApproxMethod,
};
use sgd_outage::experiments::{error_metrics, improvement_sweep, sop_sweep, RandomConfigSpec};
use sgd_outage::oracle::{enumerate_sop, simulate_sop_partitioned, McConfig};
use sgd_outage::pbd::{
    pmf_fft, tail_cfe, tail_direct, tail_from_pmf, tail_recursive, OutageVector,
};
use sgd_outage::sgd::{sop_equal_capacity, sop_general, threshold_from_demand, SgdScenario};

fn outage_vector(max_n: usize) -> impl Strategy<Value = OutageVector> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_n).prop_map(|v| OutageVector::new(v).unwrap())
}

fn small_outage_vector(max_n: usize) -> impl Strategy<Value = OutageVector> {
    prop::collection::vec(0.0f64..0.05, 1..=max_n).prop_map(|v| OutageVector::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_methods_agree(p in outage_vector(16)) {
        let pmf = pmf_fft(&p).unwrap();
        for l in 0..=p.len() + 1 {
            let direct = tail_direct(&p, l).unwrap();
            prop_assert!((direct - tail_cfe(&p, l).unwrap()).abs() <= 1e-9);
            prop_assert!((direct - tail_recursive(&p, l).unwrap()).abs() <= 1e-12);
            prop_assert!((direct - tail_from_pmf(&pmf, l).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn recursion_identity(p in outage_vector(24), frac in 0.0f64..1.0) {
        prop_assume!(p.len() >= 2);
        let n = p.len();
        let l = 1 + (frac * n as f64) as usize % n;
        let head = p.prefix(n - 1);
        let last = p.probs()[n - 1];
        let rhs = (1.0 - last) * tail_recursive(&head, l).unwrap()
            + last * tail_recursive(&head, l - 1).unwrap();
        prop_assert!((tail_recursive(&p, l).unwrap() - rhs).abs() <= 1e-12);
    }

    #[test]
    fn permutation_invariance(p in outage_vector(20), seed in any::<u64>()) {
        let mut shuffled = p.probs().to_vec();
        // Fisher-Yates with a tiny LCG; only the permutation matters here.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let q = OutageVector::new(shuffled).unwrap();
        for l in 0..=p.len() + 1 {
            prop_assert!((tail_recursive(&p, l).unwrap() - tail_recursive(&q, l).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn tail_non_increasing_in_threshold(p in outage_vector(40)) {
        let tails: Vec<f64> = (0..=p.len() + 1).map(|l| tail_recursive(&p, l).unwrap()).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(tails.iter().all(|t| (0.0..=1.0).contains(t)));
    }

    #[test]
    fn equal_entries_are_binomial(n in 1usize..40, prob in 0.0f64..=1.0) {
        let p = OutageVector::uniform(n, prob).unwrap();
        let mut coeff = 1.0f64;
        let mut ccdf = vec![0.0; n + 2];
        let mut masses = Vec::with_capacity(n + 1);
        for m in 0..=n {
            if m > 0 {
                coeff = coeff * (n - m + 1) as f64 / m as f64;
            }
            masses.push(coeff * prob.powi(m as i32) * (1.0 - prob).powi((n - m) as i32));
        }
        for l in (0..=n).rev() {
            ccdf[l] = ccdf[l + 1] + masses[l];
        }
        for (l, expected) in ccdf.iter().enumerate() {
            prop_assert!((tail_recursive(&p, l).unwrap() - expected).abs() <= 1e-10);
            prop_assert!((approx_binomial(&p, l).unwrap().value - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn pmf_moments_match_closed_forms(p in outage_vector(200)) {
        let from_pmf = pmf_fft(&p).unwrap().moments();
        let closed = p.moments();
        prop_assert!((from_pmf.mean - closed.mean).abs() <= 1e-9);
        prop_assert!((from_pmf.variance - closed.variance).abs() <= 1e-9);
        prop_assert!((from_pmf.third_central - closed.third_central).abs() <= 1e-9);
    }

    #[test]
    fn chernoff_dominates_exact(p in outage_vector(25)) {
        prop_assume!(p.moments().mean > 0.0);
        for l in chernoff_range(&p) {
            let b = chernoff_bound(&p, l).unwrap();
            prop_assert!(b.applicable);
            prop_assert!(tail_recursive(&p, l).unwrap() <= b.value + 1e-12);
        }
    }

    #[test]
    fn tail_differences_bounded_by_tv(p in outage_vector(20)) {
        let tv = tv_distance_and_bounds(&p).unwrap();
        for l in 0..=p.len() + 1 {
            let exact = tail_recursive(&p, l).unwrap();
            if let Some(b) = tv.binomial {
                prop_assert!((exact - approx_binomial(&p, l).unwrap().value).abs() <= b.tv_distance + 1e-12);
            }
            prop_assert!((exact - approx_poisson(&p, l).unwrap().value).abs() <= tv.poisson.tv_distance + 1e-12);
        }
        if let Some(b) = tv.binomial {
            prop_assert!(b.tv_distance <= b.bound + 1e-12);
        }
        prop_assert!(tv.poisson.tv_distance <= tv.poisson.bound + 1e-12);
    }

    #[test]
    fn approximations_stay_in_unit_interval(p in outage_vector(30)) {
        for l in 0..=p.len() + 1 {
            for m in ApproxMethod::ALL {
                let r = m.evaluate(&p, l).unwrap();
                if r.applicable {
                    prop_assert!((0.0..=1.0).contains(&r.value), "{m} L={l} {}", r.value);
                }
            }
        }
    }

    #[test]
    fn refined_normal_without_skew_is_normal(n in 1usize..60) {
        let p = OutageVector::uniform(n, 0.5).unwrap();
        for l in 0..=n + 1 {
            prop_assert_eq!(
                approx_refined_normal(&p, l).unwrap().value,
                approx_normal(&p, l).unwrap().value
            );
        }
    }

    #[test]
    fn metric_ordering(p in small_outage_vector(12)) {
        for m in ApproxMethod::ALL {
            if let Ok(r) = error_metrics(&p, m) {
                prop_assert!(r.max_ae >= r.rmse && r.rmse >= r.mean_ae && r.mean_ae >= 0.0);
            }
        }
    }

    #[test]
    fn sop_monotone_in_ceil_r(p in outage_vector(12)) {
        let n = p.len();
        let sops: Vec<f64> = (1..=n)
            .map(|c| {
                let s = SgdScenario::equal_capacity(1.0, c as f64 - 0.5, p.clone()).unwrap();
                sop_equal_capacity(&s).unwrap().sop
            })
            .collect();
        prop_assert!(sops.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn extra_gateways_never_hurt(p in outage_vector(10), extra in outage_vector(4), frac in 0.0f64..1.0) {
        let n = p.len();
        let ceil_r = 1 + (frac * n as f64) as usize % n;
        let base = SgdScenario::equal_capacity(1.0, ceil_r as f64 - 0.5, p.clone()).unwrap();
        let ext = SgdScenario::equal_capacity(1.0, ceil_r as f64 - 0.5, p.concat(&extra)).unwrap();
        prop_assert!(sop_equal_capacity(&ext).unwrap().sop <= sop_equal_capacity(&base).unwrap().sop + 1e-12);
    }

    #[test]
    fn general_and_oracle_agree_with_equal_capacity(p in outage_vector(12), demand in 0.01f64..1.0) {
        let cap = 3.5;
        let total = demand * cap * p.len() as f64;
        let s = SgdScenario::equal_capacity(cap, total, p.clone()).unwrap();
        let eq = sop_equal_capacity(&s).unwrap();
        prop_assert!((sop_general(&s).unwrap().sop - eq.sop).abs() <= 1e-12);
        prop_assert_eq!(eq.sop + eq.availability, 1.0);
        let ratio = threshold_from_demand(p.len(), cap, total).unwrap();
        let via_direct = tail_direct(&p, ratio.threshold).unwrap();
        prop_assert!((enumerate_sop(&s).unwrap() - via_direct).abs() <= 1e-12);
    }

    #[test]
    fn general_matches_enumeration_for_unequal_capacities(
        p in outage_vector(10),
        caps_seed in prop::collection::vec(0.5f64..20.0, 10),
        demand in 0.01f64..1.0,
    ) {
        let caps = caps_seed[..p.len()].to_vec();
        let total = demand * caps.iter().sum::<f64>();
        let s = SgdScenario::with_total_demand(caps, total, p).unwrap();
        prop_assert!((sop_general(&s).unwrap().sop - enumerate_sop(&s).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic(p in outage_vector(8), seed in any::<u64>(), parts in 1u64..5) {
        let total = 0.5 * p.len() as f64;
        let s = SgdScenario::equal_capacity(1.0, total, p).unwrap();
        let cfg = McConfig::new(2_000, seed).unwrap();
        prop_assert_eq!(simulate_sop_partitioned(&s, cfg, parts), simulate_sop_partitioned(&s, cfg, parts));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sop_sweep_rows_are_monotone(seed in any::<u64>(), high in 0.01f64..0.5) {
        let spec = RandomConfigSpec { n_configs: 20, n_gateways: 8, prob_low: 0.0, prob_high: high, seed };
        let n_range: Vec<usize> = (2..=8).collect();
        let c_range: Vec<usize> = (1..=8).collect();
        let rows = sop_sweep(&spec, &c_range, &n_range).unwrap();
        let get = |n: usize, c: usize| rows.iter().find(|r| r.n_gateways == n && r.ceil_r == c).map(|r| r.value);
        for &n in &n_range {
            for c in 1..n {
                prop_assert!(get(n, c + 1).unwrap() >= get(n, c).unwrap() - 1e-12);
            }
        }
        for c in 1..=7 {
            for n in c.max(2)..8 {
                prop_assert!(get(n + 1, c).unwrap() <= get(n, c).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn improvement_sweep_grows_with_extra_gateways(seed in any::<u64>()) {
        let spec = RandomConfigSpec { n_configs: 20, n_gateways: 5, prob_low: 0.0, prob_high: 0.3, seed };
        let k_range: Vec<usize> = (0..=4).collect();
        let rows = improvement_sweep(&spec, 5, &k_range, &[1, 2, 3, 4, 5]).unwrap();
        for r in &rows {
            if r.extra_gateways == 0 {
                prop_assert!((r.value - 1.0).abs() <= 1e-12);
            }
            if r.censored == 0 {
                prop_assert!(r.value >= 1.0 - 1e-12);
            }
        }
        for c in 1..=5 {
            let row: Vec<_> = rows.iter().filter(|r| r.ceil_r == c).collect();
            for w in row.windows(2) {
                if w[0].censored == 0 && w[1].censored == 0 {
                    prop_assert!(w[1].value >= w[0].value * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn averaged_improvement_decreases_along_ceil_r_in_small_probability_regime() {
    let spec = RandomConfigSpec::small_probability_regime(5, 2024);
    let rows = improvement_sweep(&spec, 5, &[1, 2, 3, 4], &[1, 2, 3, 4, 5]).unwrap();
    for k in 1..=4 {
        let row: Vec<f64> = rows.iter().filter(|r| r.extra_gateways == k).map(|r| r.value).collect();
        assert!(row.windows(2).all(|w| w[1] < w[0]), "K={k}: {row:?}");
    }
}
