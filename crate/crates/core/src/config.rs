//! JSON problem configuration: criteria, method settings, privacy and the
//! experiment grid. Two configurations ship with the crate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::electre3::DistillationParams;
use crate::error::Error;
use crate::evaluation::ExperimentGrid;
use crate::model::{validate_criteria, CriterionSpec, Mechanism, Method};
use crate::pipeline::RankingParams;
use crate::privacy::PrivacyParams;

pub const SYNTHETIC_JSON: &str = include_str!("../configs/synthetic.json");
pub const BEER_JSON: &str = include_str!("../configs/beer.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub distillation: DistillationParams,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            methods: all_methods(),
            distillation: DistillationParams::default(),
        }
    }
}

fn all_methods() -> Vec<Method> {
    vec![Method::Electre3, Method::Promethee2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivacyConfig {
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default)]
    pub mechanism: Mechanism,
    #[serde(default = "yes")]
    pub clamp_output: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PrivacyConfig {
    fn default() -> Self {
        PrivacyConfig {
            epsilon: 1.0,
            mechanism: Mechanism::None,
            clamp_output: true,
            seed: 0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_alternatives: usize,
    pub epsilons: Vec<f64>,
    pub ks: Vec<usize>,
    #[serde(default = "fifty")]
    pub iterations: usize,
    #[serde(default = "dp_idp")]
    pub mechanisms: Vec<Mechanism>,
    #[serde(default)]
    pub base_seed: u64,
}

fn fifty() -> usize {
    50
}

fn dp_idp() -> Vec<Mechanism> {
    vec![Mechanism::Dp, Mechanism::Idp]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub criteria: Vec<CriterionSpec>,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default)]
    pub privacy: PrivacyConfig,
    pub experiment: Option<ExperimentConfig>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, Error> {
        let config: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn synthetic() -> Config {
        Config::from_json(SYNTHETIC_JSON).expect("bundled synthetic config is valid")
    }

    pub fn beer() -> Config {
        Config::from_json(BEER_JSON).expect("bundled beer config is valid")
    }

    /// A bundled config by name (`synthetic`, `beer`) or a path to a JSON file.
    pub fn resolve(name_or_path: &str) -> Result<Config, Error> {
        match name_or_path {
            "synthetic" => Ok(Config::synthetic()),
            "beer" => Ok(Config::beer()),
            path => Config::load(Path::new(path)),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let violations = validate_criteria(&self.criteria);
        if !violations.is_empty() {
            return Err(Error::Config(
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            ));
        }
        if self.method.methods.is_empty() {
            return Err(Error::Config("method.methods must list at least one method".into()));
        }
        if !self.method.distillation.is_valid() {
            return Err(Error::Config(
                "distillation: s(lambda) must be nonnegative on [0, 1]".into(),
            ));
        }
        if !(self.privacy.epsilon > 0.0 && self.privacy.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "privacy.epsilon must be positive, got {}",
                self.privacy.epsilon
            )));
        }
        if let Some(grid) = self.grid() {
            grid.validate()?;
        }
        Ok(())
    }

    pub fn ranking(&self) -> RankingParams {
        RankingParams {
            distillation: self.method.distillation,
        }
    }

    pub fn privacy_params(&self) -> PrivacyParams {
        PrivacyParams {
            epsilon: self.privacy.epsilon,
            mechanism: self.privacy.mechanism,
            clamp_output: self.privacy.clamp_output,
            seed: self.privacy.seed,
        }
    }

    pub fn grid(&self) -> Option<ExperimentGrid> {
        self.experiment.as_ref().map(|e| ExperimentGrid {
            epsilons: e.epsilons.clone(),
            ks: e.ks.clone(),
            iterations: e.iterations,
            mechanisms: e.mechanisms.clone(),
            methods: self.method.methods.clone(),
            base_seed: e.base_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_load() {
        let s = Config::synthetic();
        assert_eq!(s.criteria.len(), 6);
        assert_eq!(s.experiment.as_ref().unwrap().n_alternatives, 12);
        let w: f64 = s.criteria.iter().map(|c| c.weight).sum();
        assert!((w - 1.0).abs() < 1e-12);
        let b = Config::beer();
        assert_eq!(b.criteria.len(), 4);
        assert_eq!(b.experiment.as_ref().unwrap().n_alternatives, 20);
        assert!(b
            .criteria
            .iter()
            .all(|c| c.step == Some(0.5) && c.q == 0.5 && c.p == 1.0 && c.v == Some(4.0)));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SYNTHETIC_JSON.replacen("\"q\": 3", "\"q\": 30", 1);
        assert!(matches!(Config::from_json(&bad), Err(Error::Config(_))));
        assert!(matches!(Config::from_json("{\"criteria\": []}"), Err(Error::Config(_))));
        let unknown = SYNTHETIC_JSON.replacen("\"level\"", "\"cubic\"", 1);
        assert!(matches!(Config::from_json(&unknown), Err(Error::Config(_))));
    }
}
