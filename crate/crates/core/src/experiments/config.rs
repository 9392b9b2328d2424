use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::damage::{DamageKind, DamageModel};
use crate::dynamics::ModelParams;
use crate::error::{check_unit, Error, Result};
use crate::graph::Family;

pub const DESK_N: usize = 500;
pub const DESK_REALIZATIONS: usize = 200;
pub const FULL_N: usize = 1000;
pub const FULL_REALIZATIONS: usize = 1000;

/// Accepts either a scalar or a list in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(v: Vec<T>) -> Self {
        OneOrMany::Many(v)
    }
}

/// `points` evenly spaced values covering [0, 1].
pub fn linear_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// `points` log-spaced values in (0.001, 1], ending at 1.
pub fn log_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / points as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphGrid {
    pub family: OneOrMany<Family>,
    pub mean_degree: OneOrMany<f64>,
    pub n: usize,
    pub fixed_graph: bool,
}

impl Default for GraphGrid {
    fn default() -> Self {
        Self {
            family: OneOrMany::One(Family::ErdosRenyi),
            mean_degree: OneOrMany::One(10.0),
            n: DESK_N,
            fixed_graph: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsGrid {
    pub tau: f64,
    pub aware_infection_factor: f64,
    pub nu: f64,
    pub mu0: f64,
    pub gamma: f64,
    pub rho0: f64,
    pub theta: OneOrMany<f64>,
}

impl Default for ParamsGrid {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            tau: p.tau,
            aware_infection_factor: p.aware_infection_factor,
            nu: p.nu,
            mu0: p.mu0,
            gamma: p.gamma,
            rho0: p.rho0,
            theta: OneOrMany::One(p.theta),
        }
    }
}

impl ParamsGrid {
    pub fn at_theta(&self, theta: f64) -> ModelParams {
        ModelParams {
            tau: self.tau,
            aware_infection_factor: self.aware_infection_factor,
            nu: self.nu,
            mu0: self.mu0,
            gamma: self.gamma,
            theta,
            rho0: self.rho0,
        }
    }
}

/// Damage laws to sweep. Missing grids fall back to 41 evenly spaced `d`
/// values and 40 log-spaced `epsilon` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DamageGrid {
    pub kind: OneOrMany<DamageKind>,
    pub d: Option<OneOrMany<f64>>,
    pub d0: f64,
    pub epsilon: Option<OneOrMany<f64>>,
    /// Sweep constant damage alongside the epsilon sweep and report the
    /// maximum for each curve.
    pub reference: bool,
}

impl Default for DamageGrid {
    fn default() -> Self {
        Self {
            kind: OneOrMany::One(DamageKind::Constant),
            d: None,
            d0: 0.1,
            epsilon: None,
            reference: true,
        }
    }
}

impl DamageGrid {
    pub fn d_values(&self) -> Vec<f64> {
        self.d.as_ref().map_or_else(|| linear_grid(41), OneOrMany::to_vec)
    }

    pub fn epsilon_values(&self) -> Vec<f64> {
        self.epsilon.as_ref().map_or_else(|| log_grid(40), OneOrMany::to_vec)
    }

    /// The model of `kind` at sweep coordinate `x` (`d` for constant,
    /// `epsilon` otherwise).
    pub fn model(&self, kind: DamageKind, x: f64) -> DamageModel {
        match kind {
            DamageKind::Constant => DamageModel::Constant { d: x },
            DamageKind::Logistic => DamageModel::LogisticClock { d0: self.d0, epsilon: x },
            DamageKind::Mutating => DamageModel::MutatingStrain { d0: self.d0, epsilon: x },
        }
    }
}

/// A declarative experiment: the cross product of the graph, threshold and
/// damage grids, each point run as an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub realizations: usize,
    pub base_seed: u64,
    pub max_steps: u64,
    pub output: Option<PathBuf>,
    pub graph: GraphGrid,
    pub params: ParamsGrid,
    pub damage: DamageGrid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            realizations: DESK_REALIZATIONS,
            base_seed: 0,
            max_steps: crate::engine::DEFAULT_MAX_STEPS,
            output: None,
            graph: GraphGrid::default(),
            params: ParamsGrid::default(),
            damage: DamageGrid::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|message| Error::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Full-size runs: n = 1000 nodes and 1000 realizations per point.
    pub fn full_scale(&mut self) {
        self.graph.n = FULL_N;
        self.realizations = FULL_REALIZATIONS;
    }

    pub fn families(&self) -> Vec<Family> {
        self.graph.family.to_vec()
    }

    pub fn mean_degrees(&self) -> Vec<f64> {
        self.graph.mean_degree.to_vec()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.params.theta.to_vec()
    }

    pub fn kinds(&self) -> Vec<DamageKind> {
        self.damage.kind.to_vec()
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::Invalid("realizations must be at least 1".into()));
        }
        if self.families().is_empty() || self.mean_degrees().is_empty() || self.thetas().is_empty() {
            return Err(Error::Invalid("graph family, mean degree and theta grids must be nonempty".into()));
        }
        for &theta in &self.thetas() {
            check_unit("theta", theta)?;
        }
        self.params.at_theta(0.0).validate()?;
        check_unit("d0", self.damage.d0)?;
        for &d in &self.damage.d_values() {
            check_unit("d", d)?;
        }
        for &eps in &self.damage.epsilon_values() {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::Param {
                    name: "epsilon",
                    value: eps,
                    range: "(0, inf)",
                });
            }
        }
        for family in self.families() {
            for k in self.mean_degrees() {
                crate::graph::GraphSpec::new(family, self.graph.n, k, 0).validate()?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let d = linear_grid(41);
        assert_eq!(d.len(), 41);
        assert_eq!((d[0], d[40]), (0.0, 1.0));
        assert!((d[1] - 0.025).abs() < 1e-15);
        let e = log_grid(40);
        assert_eq!(e.len(), 40);
        assert!(e[0] > 0.001 && e[0] < 0.0012);
        assert_eq!(e[39], 1.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn parses_scalars_and_lists() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            name = "fig3"
            realizations = 10
            [graph]
            family = ["er", "ba"]
            mean_degree = [6, 10, 14]
            [params]
            theta = [0.2, 0.4, 0.6]
            tau = 0.0055
            [damage]
            kind = "constant"
            d = [0.0, 0.5, 1.0]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.families(), vec![Family::ErdosRenyi, Family::BarabasiAlbert]);
        assert_eq!(cfg.mean_degrees(), vec![6.0, 10.0, 14.0]);
        assert_eq!(cfg.thetas(), vec![0.2, 0.4, 0.6]);
        assert_eq!(cfg.damage.d_values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.graph.n, DESK_N);
        assert_eq!(cfg.params.gamma, 0.03);
        cfg.validate().unwrap();

        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        let cfg = ExperimentConfig::from_toml("[params]\ntau = 2.0").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Param { name: "tau", .. })));
        let cfg = ExperimentConfig::from_toml("[graph]\nfamily = \"ba\"\nmean_degree = 5").unwrap();
        assert!(cfg.validate().is_err());
    }
}
