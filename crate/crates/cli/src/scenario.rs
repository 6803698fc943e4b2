use std::fs;
use std::path::Path;

use serde::Deserialize;
use sgd_outage::experiments::RandomConfigSpec;
use sgd_outage::sgd::SgdScenario;
use sgd_outage::OutageVector;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub gateways: Vec<GatewayEntry>,
    pub users: Option<Vec<UserEntry>>,
    pub total_demand: Option<f64>,
    #[serde(default)]
    pub extra_gateways: Vec<ExtraGatewayEntry>,
    pub experiment: Option<ExperimentBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayEntry {
    pub capacity: f64,
    pub outage_prob: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub demand: f64,
}

/// Capacity defaults to the common capacity of the base gateways.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraGatewayEntry {
    pub capacity: Option<f64>,
    pub outage_prob: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub n_configs: Option<usize>,
    pub prob_range: Option<[f64; 2]>,
    pub seed: Option<u64>,
    pub n_values: Option<Vec<usize>>,
    pub ceil_r_values: Option<Vec<usize>>,
    pub k_values: Option<Vec<usize>>,
    pub base_n: Option<usize>,
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub spec: RandomConfigSpec,
    pub n_values: Vec<usize>,
    pub ceil_r_values: Vec<usize>,
    pub k_values: Vec<usize>,
    pub base_n: usize,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))
    }

    fn demands(&self) -> Result<Vec<f64>, CliError> {
        match (&self.users, self.total_demand) {
            (Some(users), None) => Ok(users.iter().map(|u| u.demand).collect()),
            (None, Some(total)) => Ok(vec![total]),
            (Some(_), Some(_)) => Err(CliError::Input(
                "give either `users` or `total_demand`, not both".into(),
            )),
            (None, None) => Err(CliError::Input(
                "missing demand: give `users` or `total_demand`".into(),
            )),
        }
    }

    pub fn scenario(&self) -> Result<SgdScenario, CliError> {
        if self.gateways.is_empty() {
            return Err(CliError::Input("scenario has no `gateways`".into()));
        }
        let caps = self.gateways.iter().map(|g| g.capacity).collect();
        let probs = OutageVector::new(self.gateways.iter().map(|g| g.outage_prob).collect())?;
        Ok(SgdScenario::new(caps, self.demands()?, probs)?)
    }

    /// The base scenario with `extra_gateways` appended, if there are any.
    pub fn extended_scenario(&self, base: &SgdScenario) -> Result<Option<SgdScenario>, CliError> {
        if self.extra_gateways.is_empty() {
            return Ok(None);
        }
        let mut caps = base.gateway_capacities().to_vec();
        let mut probs = base.outage_probs().probs().to_vec();
        for extra in &self.extra_gateways {
            let cap = match (extra.capacity, base.common_capacity()) {
                (Some(c), _) | (None, Some(c)) => c,
                (None, None) => {
                    return Err(CliError::Input(
                        "extra gateway needs a `capacity` when base capacities differ".into(),
                    ))
                }
            };
            caps.push(cap);
            probs.push(extra.outage_prob);
        }
        Ok(Some(SgdScenario::new(
            caps,
            base.user_demands().to_vec(),
            OutageVector::new(probs)?,
        )?))
    }

    /// Experiment parameters with defaults filled in; `seed` overrides the file.
    pub fn experiment(&self, seed: Option<u64>) -> Result<Experiment, CliError> {
        let block = self.experiment.as_ref();
        let get = |f: fn(&ExperimentBlock) -> Option<Vec<usize>>, default: Vec<usize>| {
            block.and_then(f).unwrap_or(default)
        };
        let n_values = get(|b| b.n_values.clone(), (4..=10).collect());
        let n_max = n_values.iter().copied().max().unwrap_or(0);
        let ceil_r_values = get(|b| b.ceil_r_values.clone(), (1..=n_max.max(1)).collect());
        let k_values = get(|b| b.k_values.clone(), (1..=4).collect());
        let base_n = block.and_then(|b| b.base_n).unwrap_or(5);
        let [prob_low, prob_high] = block.and_then(|b| b.prob_range).unwrap_or([0.0, 0.02]);
        let spec = RandomConfigSpec {
            n_configs: block.and_then(|b| b.n_configs).unwrap_or(1000),
            n_gateways: n_max.max(base_n),
            prob_low,
            prob_high,
            seed: seed
                .or_else(|| block.and_then(|b| b.seed))
                .unwrap_or(DEFAULT_SEED),
        };
        spec.validate()?;
        if n_values.is_empty() || n_values.contains(&0) {
            return Err(CliError::Grid("n_values must be non-empty and positive".into()));
        }
        if ceil_r_values.is_empty() || ceil_r_values.contains(&0) {
            return Err(CliError::Grid("ceil_r_values must be non-empty and positive".into()));
        }
        if k_values.is_empty() {
            return Err(CliError::Grid("k_values must be non-empty".into()));
        }
        if base_n == 0 {
            return Err(CliError::Grid("base_n must be positive".into()));
        }
        Ok(Experiment {
            spec,
            n_values,
            ceil_r_values,
            k_values,
            base_n,
        })
    }
}
