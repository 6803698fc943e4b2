//! Gateway capacities and traffic demand mapped onto outage-tail queries.
//!
//! With load sharing, all users are served iff the capacity of the gateways
//! not in outage covers the total demand. Only the total demand matters.
//! With equal capacities `C` and `N` gateways, the system is in outage iff at
//! least `L = N - ⌈r⌉ + 1` gateways fail, `r = demand / C`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pbd::{
    pmf_fft, tail_cfe, tail_direct, tail_from_pmf, tail_recursive, OutageVector, TailQuery,
};

/// Largest `N` accepted by [`sop_general`].
pub const GENERAL_MAX_GATEWAYS: usize = 25;

/// Relative slack applied to `r` before taking the ceiling.
pub const CEIL_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgdScenario {
    gateway_capacities: Vec<f64>,
    user_demands: Vec<f64>,
    outage_probs: OutageVector,
}

impl SgdScenario {
    pub fn new(
        gateway_capacities: Vec<f64>,
        user_demands: Vec<f64>,
        outage_probs: OutageVector,
    ) -> Result<Self> {
        if gateway_capacities.len() != outage_probs.len() {
            return Err(Error::InvalidScenario(format!(
                "{} capacities for {} outage probabilities",
                gateway_capacities.len(),
                outage_probs.len()
            )));
        }
        if let Some(c) = gateway_capacities
            .iter()
            .find(|c| !(c.is_finite() && **c > 0.0))
        {
            return Err(Error::InvalidScenario(format!(
                "gateway capacity {c} must be positive"
            )));
        }
        if let Some(d) = user_demands.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidScenario(format!(
                "user demand {d} must be non-negative"
            )));
        }
        let scenario = SgdScenario {
            gateway_capacities,
            user_demands,
            outage_probs,
        };
        let demand = scenario.total_demand();
        if demand.is_nan() || demand <= 0.0 {
            return Err(Error::InvalidScenario(
                "total demand must be positive".into(),
            ));
        }
        let capacity = scenario.total_capacity();
        if demand > capacity {
            return Err(Error::InfeasibleDemand { demand, capacity });
        }
        Ok(scenario)
    }

    /// Scenario with a single aggregate demand.
    pub fn with_total_demand(
        gateway_capacities: Vec<f64>,
        total_demand: f64,
        outage_probs: OutageVector,
    ) -> Result<Self> {
        Self::new(gateway_capacities, vec![total_demand], outage_probs)
    }

    /// `N` gateways of capacity `capacity` each.
    pub fn equal_capacity(capacity: f64, total_demand: f64, outage_probs: OutageVector) -> Result<Self> {
        let n = outage_probs.len();
        Self::with_total_demand(vec![capacity; n], total_demand, outage_probs)
    }

    pub fn n_gateways(&self) -> usize {
        self.gateway_capacities.len()
    }

    pub fn gateway_capacities(&self) -> &[f64] {
        &self.gateway_capacities
    }

    pub fn user_demands(&self) -> &[f64] {
        &self.user_demands
    }

    pub fn outage_probs(&self) -> &OutageVector {
        &self.outage_probs
    }

    pub fn total_demand(&self) -> f64 {
        self.user_demands.iter().sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.gateway_capacities.iter().sum()
    }

    /// The common capacity, if every gateway has the same one.
    pub fn common_capacity(&self) -> Option<f64> {
        let first = self.gateway_capacities[0];
        self.gateway_capacities
            .iter()
            .all(|&c| c == first)
            .then_some(first)
    }

    /// Demand ratio and threshold; requires equal capacities.
    pub fn demand_ratio(&self) -> Result<DemandRatio> {
        let capacity = self.common_capacity().ok_or_else(|| {
            Error::InvalidScenario("gateway capacities differ; use the general method".into())
        })?;
        threshold_from_demand(self.n_gateways(), capacity, self.total_demand())
    }
}

/// `r = demand / capacity`, `⌈r⌉`, and `L = N - ⌈r⌉ + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandRatio {
    pub r: f64,
    pub ceil_r: usize,
    pub threshold: usize,
}

/// `⌈r⌉` with `r` first snapped to a nearby integer within a relative
/// `CEIL_RELATIVE_TOLERANCE`.
pub fn tolerant_ceil(r: f64) -> usize {
    let nearest = r.round();
    if (r - nearest).abs() <= CEIL_RELATIVE_TOLERANCE * r.abs().max(1.0) {
        nearest as usize
    } else {
        r.ceil() as usize
    }
}

pub fn threshold_from_demand(
    n_gateways: usize,
    gw_capacity: f64,
    total_demand: f64,
) -> Result<DemandRatio> {
    if n_gateways == 0 {
        return Err(Error::NoGateways);
    }
    if !(gw_capacity.is_finite() && gw_capacity > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "gateway capacity {gw_capacity} must be positive"
        )));
    }
    if !(total_demand.is_finite() && total_demand > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "total demand {total_demand} must be positive"
        )));
    }
    let r = total_demand / gw_capacity;
    let ceil_r = tolerant_ceil(r).max(1);
    if ceil_r > n_gateways {
        return Err(Error::InfeasibleDemand {
            demand: total_demand,
            capacity: gw_capacity * n_gateways as f64,
        });
    }
    Ok(DemandRatio {
        r,
        ceil_r,
        threshold: n_gateways - ceil_r + 1,
    })
}

/// Exact algorithm used to produce a [`TailResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExactMethod {
    Direct,
    Cfe,
    Recursive,
    Fft,
    General,
}

impl ExactMethod {
    pub const ALL: [ExactMethod; 5] = [
        ExactMethod::Direct,
        ExactMethod::Cfe,
        ExactMethod::Recursive,
        ExactMethod::Fft,
        ExactMethod::General,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ExactMethod::Direct => "direct",
            ExactMethod::Cfe => "cfe",
            ExactMethod::Recursive => "recursive",
            ExactMethod::Fft => "fft",
            ExactMethod::General => "general",
        }
    }

    /// Tail `P(S_N >= threshold)`. Not defined for [`ExactMethod::General`],
    /// which works on scenarios rather than thresholds.
    pub fn tail(self, p: &OutageVector, threshold: usize) -> Result<f64> {
        match self {
            ExactMethod::Direct => tail_direct(p, threshold),
            ExactMethod::Cfe => tail_cfe(p, threshold),
            ExactMethod::Recursive => tail_recursive(p, threshold),
            ExactMethod::Fft => tail_from_pmf(&pmf_fft(p)?, threshold),
            ExactMethod::General => Err(Error::InvalidScenario(
                "the general method needs a scenario, not a threshold".into(),
            )),
        }
    }
}

impl fmt::Display for ExactMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ExactMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ExactMethod::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown method '{s}' (direct, cfe, recursive, fft, general)")
            })
    }
}

/// One system outage probability and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailResult {
    pub sop: f64,
    pub availability: f64,
    pub method: ExactMethod,
    /// `None` for the general (unequal-capacity) method.
    pub query: Option<TailQuery>,
}

impl TailResult {
    fn new(sop: f64, method: ExactMethod, query: Option<TailQuery>) -> Self {
        TailResult {
            sop,
            availability: 1.0 - sop,
            method,
            query,
        }
    }
}

/// Equal-capacity SOP via the recursive tail.
pub fn sop_equal_capacity(scenario: &SgdScenario) -> Result<TailResult> {
    sop_equal_capacity_with(scenario, ExactMethod::Recursive)
}

/// Equal-capacity SOP with a chosen exact method; [`ExactMethod::General`]
/// falls through to [`sop_general`].
pub fn sop_equal_capacity_with(scenario: &SgdScenario, method: ExactMethod) -> Result<TailResult> {
    if method == ExactMethod::General {
        return sop_general(scenario);
    }
    let ratio = scenario.demand_ratio()?;
    let query = TailQuery::new(ratio.threshold, scenario.n_gateways())?;
    let sop = method.tail(scenario.outage_probs(), ratio.threshold)?;
    Ok(TailResult::new(sop, method, Some(query)))
}

/// SOP for arbitrary capacities: total probability of the outage patterns
/// whose surviving capacity is strictly below the demand.
///
/// Demand exactly equal to the surviving capacity is not an outage; callers
/// sitting on that edge should perturb the demand.
pub fn sop_general(scenario: &SgdScenario) -> Result<TailResult> {
    let n = scenario.n_gateways();
    if n > GENERAL_MAX_GATEWAYS {
        return Err(Error::SizeLimit {
            method: "general",
            n,
            limit: GENERAL_MAX_GATEWAYS,
        });
    }
    let sop = outage_mass(
        scenario.gateway_capacities(),
        scenario.outage_probs().probs(),
        0.0,
        scenario.total_demand(),
    );
    Ok(TailResult::new(sop.clamp(0.0, 1.0), ExactMethod::General, None))
}

/// Probability that the gateways in `caps` leave `surviving` (capacity already
/// secured) below `demand`, by branching on the first gateway.
fn outage_mass(caps: &[f64], probs: &[f64], surviving: f64, demand: f64) -> f64 {
    match (caps.split_first(), probs.split_first()) {
        (Some((&cap, caps)), Some((&p, probs))) => {
            let down = if p > 0.0 {
                p * outage_mass(caps, probs, surviving, demand)
            } else {
                0.0
            };
            let up = if p < 1.0 {
                (1.0 - p) * outage_mass(caps, probs, surviving + cap, demand)
            } else {
                0.0
            };
            down + up
        }
        _ => {
            if surviving < demand {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Comparison of an `N`-gateway system with the same system plus `K` extra
/// gateways at the same `⌈r⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementReport {
    pub base_sop: f64,
    pub extended_sop: f64,
    /// `base_sop / extended_sop`.
    pub factor: f64,
    pub extra_gateways: usize,
    pub base_threshold: usize,
    pub extended_threshold: usize,
}

/// Generalized SOP-improvement factor `P(S_N >= L) / P(S_{N+K} >= L + K)`.
pub fn improvement_factor(base: &SgdScenario, extra_probs: &[f64]) -> Result<ImprovementReport> {
    let ratio = base.demand_ratio()?;
    let extra = extra_probs.to_vec();
    let k = extra.len();
    let probs = if k == 0 {
        base.outage_probs().clone()
    } else {
        base.outage_probs().concat(&OutageVector::new(extra)?)
    };
    improvement_from_tails(base.outage_probs(), &probs, ratio.ceil_r)
}

/// Improvement factor for `base` against `extended`, whose first entries are
/// `base`, at a given `⌈r⌉`.
pub fn improvement_from_tails(
    base: &OutageVector,
    extended: &OutageVector,
    ceil_r: usize,
) -> Result<ImprovementReport> {
    let n = base.len();
    if ceil_r == 0 || ceil_r > n {
        return Err(Error::InvalidScenario(format!(
            "ceil(r) = {ceil_r} outside 1..={n}"
        )));
    }
    let k = extended.len() - n;
    let base_threshold = n - ceil_r + 1;
    let extended_threshold = base_threshold + k;
    let base_sop = tail_recursive(base, base_threshold)?;
    let extended_sop = tail_recursive(extended, extended_threshold)?;
    if extended_sop <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(ImprovementReport {
        base_sop,
        extended_sop,
        factor: base_sop / extended_sop,
        extra_gateways: k,
        base_threshold,
        extended_threshold,
    })
}

/// Single-gateway versus `N`-gateway factor at `⌈r⌉ = 1`:
/// `p_1 / (p_1 ... p_N) = 1 / (p_2 ... p_N)`.
pub fn classical_improvement_factor(p: &OutageVector) -> Result<f64> {
    let rest: f64 = p.probs()[1..].iter().product();
    if p.probs()[0] == 0.0 || rest == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(1.0 / rest)
}
