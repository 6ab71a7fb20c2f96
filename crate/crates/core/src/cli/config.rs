use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ew_policy::default_eta;
use crate::harness::{EvaluatorKind, Experiment, PolicySpec, ScenarioKind};
use crate::model::{ActionSpace, CostModel, Polynomial, RequestBounds};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_DISCOUNT: f64 = 0.99;
pub const DEFAULT_BETA: f64 = 0.1;
pub const DEFAULT_TAU: f64 = 0.005;
pub const DEFAULT_BOUND_DELTA: f64 = 0.05;
pub const DEFAULT_CONVERGENCE_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_CONVERGENCE_WINDOW: usize = 100;

/// A value given once for every server or listed per server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerServer<T> {
    All(T),
    Each(Vec<T>),
}

impl<T: Clone> PerServer<T> {
    fn expand(&self, n: usize, key: &str) -> Result<Vec<T>> {
        match self {
            PerServer::All(v) => Ok(vec![v.clone(); n]),
            PerServer::Each(vs) if vs.len() == n => Ok(vs.clone()),
            PerServer::Each(vs) => Err(Error::Config(format!(
                "{key}: expected {n} entries, got {}",
                vs.len()
            ))),
        }
    }
}

/// A coefficient list shared by every server, or one list per server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    Each(Vec<Vec<f64>>),
    All(Vec<f64>),
}

/// Transfer costs: one list for every link, or an `N x N` matrix of lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransferCoefficients {
    Matrix(Vec<Vec<Vec<f64>>>),
    All(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub servers: usize,
    pub min_reservation: PerServer<i64>,
    pub max_reservation: PerServer<i64>,
    /// Defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_min: Option<PerServer<i64>>,
    /// Defaults to the server capacity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_max: Option<PerServer<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsConfig {
    pub reservation: Coefficients,
    pub violation: Coefficients,
    pub transfer: TransferCoefficients,
}

/// Policy entry as written in a config; omitted parameters take defaults
/// during [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    EwFull {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
    EwDiscounted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        discount: Option<f64>,
    },
    EwExplore {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        budget: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        placeholder_redraw: Option<bool>,
    },
    RlBandit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_init: Option<f64>,
    },
}

impl PolicyConfig {
    fn resolve(&self, space_size: usize, horizon: usize) -> PolicySpec {
        let eta = |e: Option<f64>| e.unwrap_or_else(|| default_eta(space_size, horizon));
        match *self {
            PolicyConfig::EwFull { eta: e } => PolicySpec::EwFull { eta: eta(e) },
            PolicyConfig::EwDiscounted { eta: e, discount } => PolicySpec::EwDiscounted {
                eta: eta(e),
                discount: discount.unwrap_or(DEFAULT_DISCOUNT),
            },
            PolicyConfig::EwExplore {
                eta: e,
                budget,
                placeholder_redraw,
            } => PolicySpec::EwExplore {
                eta: eta(e),
                budget,
                placeholder_redraw: placeholder_redraw.unwrap_or(false),
            },
            PolicyConfig::RlBandit { beta, tau, q_init } => PolicySpec::RlBandit {
                beta: beta.unwrap_or(DEFAULT_BETA),
                tau: tau.unwrap_or(DEFAULT_TAU),
                q_init: q_init.unwrap_or(0.0),
            },
        }
    }
}

impl From<&PolicySpec> for PolicyConfig {
    fn from(spec: &PolicySpec) -> Self {
        match *spec {
            PolicySpec::EwFull { eta } => PolicyConfig::EwFull { eta: Some(eta) },
            PolicySpec::EwDiscounted { eta, discount } => PolicyConfig::EwDiscounted {
                eta: Some(eta),
                discount: Some(discount),
            },
            PolicySpec::EwExplore {
                eta,
                budget,
                placeholder_redraw,
            } => PolicyConfig::EwExplore {
                eta: Some(eta),
                budget,
                placeholder_redraw: Some(placeholder_redraw),
            },
            PolicySpec::RlBandit { beta, tau, q_init } => PolicyConfig::RlBandit {
                beta: Some(beta),
                tau: Some(tau),
                q_init: Some(q_init),
            },
        }
    }
}

/// Experiment description read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub evaluator: EvaluatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_window: Option<usize>,
    pub network: NetworkConfig,
    pub costs: CostsConfig,
    pub scenario: ScenarioKind,
    pub policies: Vec<PolicyConfig>,
}

/// A validated config with every default filled in.
#[derive(Debug)]
pub struct ResolvedConfig {
    pub config: ExperimentConfig,
    pub experiment: Experiment,
    pub policies: Vec<PolicySpec>,
    pub bound_delta: f64,
    pub convergence_threshold: f64,
    pub convergence_window: usize,
}

fn key_error(key: impl std::fmt::Display, err: Error) -> Error {
    let reason = match err {
        Error::InvalidParameter { reason, .. } => reason,
        Error::Config(msg) => msg,
        other => other.to_string(),
    };
    Error::Config(format!("{key}: {reason}"))
}

fn polynomials(coeffs: Vec<Vec<f64>>, key: &str) -> Result<Vec<Polynomial>> {
    coeffs
        .into_iter()
        .enumerate()
        .map(|(n, c)| Polynomial::new(c).map_err(|e| key_error(format!("{key}[{n}]"), e)))
        .collect()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::from_table(value)
    }

    /// Accepts either a config or a run manifest, whose `[config]` table holds
    /// the resolved config.
    pub fn from_table(mut table: toml::Table) -> Result<Self> {
        if table.contains_key("artifact_version") {
            match table.remove("config") {
                Some(toml::Value::Table(config)) => table = config,
                _ => return Err(Error::Config("manifest has no [config] table".into())),
            }
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Runtime(format!("serializing config: {e}")))
    }

    /// Validates every key and fills in defaults. Errors name the offending
    /// key.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds: at least one seed is required".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("policies: at least one policy is required".into()));
        }
        let bound_delta = self.bound_delta.unwrap_or(DEFAULT_BOUND_DELTA);
        if !(bound_delta > 0.0 && bound_delta < 1.0) {
            return Err(Error::Config(format!(
                "bound_delta: must lie in (0, 1), got {bound_delta}"
            )));
        }
        let convergence_threshold = self
            .convergence_threshold
            .unwrap_or(DEFAULT_CONVERGENCE_THRESHOLD);
        if !(convergence_threshold > 0.0 && convergence_threshold.is_finite()) {
            return Err(Error::Config(
                "convergence_threshold: must be positive and finite".into(),
            ));
        }
        let convergence_window = self.convergence_window.unwrap_or(DEFAULT_CONVERGENCE_WINDOW);
        if convergence_window == 0 {
            return Err(Error::Config("convergence_window: must be at least 1".into()));
        }

        let net = &self.network;
        let n = net.servers;
        if n == 0 {
            return Err(Error::Config("network.servers: must be at least 1".into()));
        }
        let min_res = net.min_reservation.expand(n, "network.min_reservation")?;
        let max_res = net.max_reservation.expand(n, "network.max_reservation")?;
        let space = ActionSpace::new(min_res.clone(), max_res.clone())
            .map_err(|e| key_error("network.min_reservation", e))?;
        let req_min = match &net.request_min {
            Some(v) => v.expand(n, "network.request_min")?,
            None => vec![1; n],
        };
        let req_max = match &net.request_max {
            Some(v) => v.expand(n, "network.request_max")?,
            None => max_res.clone(),
        };
        let bounds = RequestBounds::new(req_min.clone(), Some(req_max.clone()))
            .map_err(|e| key_error("network.request_max", e))?;

        let per_server = |c: &Coefficients, key: &str| -> Result<Vec<Vec<f64>>> {
            match c {
                Coefficients::All(c) => Ok(vec![c.clone(); n]),
                Coefficients::Each(cs) if cs.len() == n => Ok(cs.clone()),
                Coefficients::Each(cs) => Err(Error::Config(format!(
                    "{key}: expected {n} coefficient lists, got {}",
                    cs.len()
                ))),
            }
        };
        let reservation = polynomials(per_server(&self.costs.reservation, "costs.reservation")?, "costs.reservation")?;
        let violation = polynomials(per_server(&self.costs.violation, "costs.violation")?, "costs.violation")?;
        let transfer_lists = match &self.costs.transfer {
            TransferCoefficients::All(c) => (0..n)
                .map(|i| (0..n).map(|j| if i == j { vec![] } else { c.clone() }).collect())
                .collect(),
            TransferCoefficients::Matrix(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Config(format!(
                        "costs.transfer: expected a {n} x {n} matrix of coefficient lists"
                    )));
                }
                rows.clone()
            }
        };
        let transfer = transfer_lists
            .into_iter()
            .enumerate()
            .map(|(i, row)| polynomials(row, &format!("costs.transfer[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let model =
            CostModel::new(reservation, violation, transfer).map_err(|e| key_error("costs", e))?;

        let experiment = Experiment::new(space, bounds, model, self.scenario.clone(), self.horizon)
            .map_err(|e| key_error("scenario", e))?;
        let size = experiment.space_size();
        let mut policies = Vec::with_capacity(self.policies.len());
        for (i, p) in self.policies.iter().enumerate() {
            let spec = p.resolve(size, self.horizon);
            if let Err(e) = spec.build(size, experiment.theta()) {
                let name = match &e {
                    Error::InvalidParameter { name, .. } => *name,
                    _ => "kind",
                };
                return Err(key_error(format!("policies[{i}].{name}"), e));
            }
            policies.push(spec);
        }
        let mut labels: Vec<String> = policies.iter().map(PolicySpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!(
                "policies: duplicate policy `{}` would overwrite its output files",
                w[0]
            )));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("seeds: duplicate seed".into()));
        }

        let (res_c, vio_c, trf_c) = experiment.model.coefficients();
        let config = ExperimentConfig {
            schema_version: self.schema_version,
            horizon: self.horizon,
            seeds: self.seeds.clone(),
            output_dir: self.output_dir.clone(),
            evaluator: self.evaluator,
            bound_delta: Some(bound_delta),
            convergence_threshold: Some(convergence_threshold),
            convergence_window: Some(convergence_window),
            network: NetworkConfig {
                servers: n,
                min_reservation: PerServer::Each(min_res),
                max_reservation: PerServer::Each(max_res),
                request_min: Some(PerServer::Each(req_min)),
                request_max: Some(PerServer::Each(req_max)),
            },
            costs: CostsConfig {
                reservation: Coefficients::Each(res_c),
                violation: Coefficients::Each(vio_c),
                transfer: TransferCoefficients::Matrix(trf_c),
            },
            scenario: self.scenario.clone(),
            policies: policies.iter().map(PolicyConfig::from).collect(),
        };
        Ok(ResolvedConfig {
            config,
            experiment,
            policies,
            bound_delta,
            convergence_threshold,
            convergence_window,
        })
    }
}
