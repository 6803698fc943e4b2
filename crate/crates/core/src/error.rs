use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability outside `[0, 1]` or not finite.
    InvalidProbability { index: usize, value: f64 },
    /// Empty outage vector.
    NoGateways,
    /// Threshold outside `0..=N+1`.
    ThresholdOutOfRange { threshold: usize, n_gateways: usize },
    /// Exponential-cost method asked to run past its guard.
    SizeLimit { method: &'static str, n: usize, limit: usize },
    /// Demand exceeds aggregate gateway capacity.
    InfeasibleDemand { demand: f64, capacity: f64 },
    /// Malformed scenario or experiment parameters.
    InvalidScenario(String),
    /// Improvement factor with a zero extended SOP.
    ZeroDenominator,
    /// Chernoff evaluation set is empty.
    EmptyEvaluationSet,
    /// Numerical result violated an invariant beyond round-off.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability { index, value } => {
                write!(f, "outage probability #{index} = {value} is not in [0, 1]")
            }
            Error::NoGateways => write!(f, "at least one gateway is required"),
            Error::ThresholdOutOfRange { threshold, n_gateways } => write!(
                f,
                "threshold L = {threshold} outside 0..={} for N = {n_gateways}",
                n_gateways + 1
            ),
            Error::SizeLimit { method, n, limit } => {
                write!(f, "{method}: N = {n} exceeds the limit of {limit} gateways")
            }
            Error::InfeasibleDemand { demand, capacity } => write!(
                f,
                "total demand {demand} exceeds aggregate gateway capacity {capacity}"
            ),
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            Error::ZeroDenominator => {
                write!(f, "extended-system SOP is zero; improvement factor undefined")
            }
            Error::EmptyEvaluationSet => {
                write!(f, "Chernoff evaluation set {{floor(mu)+1..N}} is empty")
            }
            Error::Internal(msg) => write!(f, "internal consistency failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
