//! Experiment configuration: a flat TOML file (one level of sections, scalar
//! values) or a JSON document with the identical schema.

use serde::{Deserialize, Serialize};

use crate::dist::{DataSpec, Halfspace, MarginalKind, NoiseModel};
use crate::partition::ClassifierConfig;
use crate::regression::{rounds_for_delta, RegressionConfig};
use crate::rng::{self, DetRng};
use crate::rounding::RoundingConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Robustness radius r in (0, 1).
    pub r: f64,
    /// Accuracy parameter eps in (0, 1).
    pub eps: f64,
    /// Confidence parameter delta in (0, 1); attempt and round budgets are
    /// ceil(log2(1/delta)).
    pub delta: f64,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub regression: RegressionSection,
    #[serde(default)]
    pub rounding: RoundingSection,
    #[serde(default)]
    pub partition: PartitionSection,
    #[serde(default)]
    pub phi: PhiSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub marginal: MarginalKind,
    pub d: usize,
    /// Planted halfspace offset tau.
    pub tau: f64,
    /// Planted direction; omitted means a random unit vector derived from
    /// the master seed.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    pub noise: NoiseKind,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    RandomFlip,
    MarginAdversarial,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            marginal: MarginalKind::StandardGaussian,
            d: 8,
            tau: 0.0,
            direction: None,
            noise: NoiseKind::RandomFlip,
            rho: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionSection {
    pub k: usize,
    /// Samples drawn per boosting round (selection set).
    pub n_s: usize,
    /// At most this many samples are encoded into the LP.
    pub lp_samples: usize,
    /// Perturbations in the LP's noise-sensitivity constraint.
    pub lp_perturbations: usize,
    /// Rounds; omitted means ceil(log2(1/delta)).
    #[serde(default)]
    pub boost_rounds: Option<usize>,
    /// Constraint-1 cap; omitted means 100 r + eps.
    #[serde(default)]
    pub ns_cap: Option<f64>,
    /// Constraint-2 cap; omitted means eps.
    #[serde(default)]
    pub psi_cap: Option<f64>,
}

impl Default for RegressionSection {
    fn default() -> Self {
        RegressionSection {
            k: 3,
            n_s: 4000,
            lp_samples: 400,
            lp_perturbations: 4,
            boost_rounds: None,
            ns_cap: None,
            psi_cap: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundingSection {
    /// Threshold batch size; omitted means min(ceil(100/eps^2), 400).
    #[serde(default)]
    pub n_thresholds: Option<usize>,
    /// Evaluation-set size for per-threshold statistics.
    pub n_eval: usize,
    #[serde(default)]
    pub attempts: Option<usize>,
    /// Cap slack constant C.
    pub c_slack: f64,
}

impl Default for RoundingSection {
    fn default() -> Self {
        RoundingSection {
            n_thresholds: None,
            n_eval: 1500,
            attempts: None,
            c_slack: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    /// Indicator-mean sample size; omitted means min(10 d^3, 20000).
    #[serde(default)]
    pub n_mean: Option<usize>,
    pub n_test: usize,
    /// Validation tolerance constant C'.
    pub c_prime: f64,
    #[serde(default)]
    pub attempts: Option<usize>,
}

impl Default for PartitionSection {
    fn default() -> Self {
        PartitionSection {
            n_mean: None,
            n_test: 2500,
            c_prime: 4.0,
            attempts: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSection {
    /// Size of the shared evaluation perturbation set.
    pub m: usize,
}

impl Default for PhiSection {
    fn default() -> Self {
        PhiSection { m: 4096 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub n_points: usize,
    pub attack_restarts: usize,
    /// Bisection steps per attack probe.
    pub attack_steps: usize,
    /// Estimator-accuracy margin subtracted from the verifier's 0.1
    /// threshold.
    pub verify_margin: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            n_points: 1500,
            attack_restarts: 8,
            attack_steps: 30,
            verify_margin: 0.02,
        }
    }
}

impl ExperimentConfig {
    /// Reasonable defaults at the given seed; callers override fields.
    pub fn with_seed(master_seed: u64) -> Self {
        ExperimentConfig {
            master_seed,
            r: 0.05,
            eps: 0.1,
            delta: 0.25,
            data: DataSection::default(),
            regression: RegressionSection::default(),
            rounding: RoundingSection::default(),
            partition: PartitionSection::default(),
            phi: PhiSection::default(),
            eval: EvalSection::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r", self.r), ("eps", self.eps), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if !(0.0..0.5).contains(&self.data.rho) {
            return Err(Error::Config(format!(
                "rho = {} must lie in [0, 0.5)",
                self.data.rho
            )));
        }
        if self.data.d < 1 {
            return Err(Error::Config("d must be >= 1".into()));
        }
        if let Some(dir) = &self.data.direction {
            if dir.len() != self.data.d {
                return Err(Error::Config(format!(
                    "direction length {} != d = {}",
                    dir.len(),
                    self.data.d
                )));
            }
        }
        if !(0.0..0.1).contains(&self.eval.verify_margin) {
            return Err(Error::Config(
                "verify_margin must lie in [0, 0.1)".into(),
            ));
        }
        Ok(())
    }

    /// Parse TOML (default) or JSON (leading '{').
    pub fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let cfg: ExperimentConfig = if trimmed.starts_with('{') {
            serde_json::from_str(trimmed).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Planted direction: configured vector (normalized check) or a random
    /// unit vector derived from the master seed.
    fn planted_direction(&self) -> Result<Vec<f64>> {
        match &self.data.direction {
            Some(v) => Ok(v.clone()),
            None => {
                let mut rng =
                    DetRng::new(rng::substream(self.master_seed, "planted-direction"));
                Ok(rng.unit_vector(self.data.d))
            }
        }
    }

    /// Data spec for a named purpose ("train-data", "eval-data", ...): the
    /// purpose picks an independent seed substream so evaluation draws never
    /// overlap training draws.
    pub fn data_spec(&self, purpose: &str) -> Result<DataSpec> {
        let noise = match self.data.noise {
            NoiseKind::RandomFlip => NoiseModel::RandomFlip(self.data.rho),
            NoiseKind::MarginAdversarial => NoiseModel::MarginAdversarial(self.data.rho),
        };
        let spec = DataSpec {
            marginal: self.data.marginal,
            dimension: self.data.d,
            halfspace: Halfspace::new(self.planted_direction()?, self.data.tau)?,
            noise,
            seed: rng::substream(self.master_seed, purpose),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn regression_config(&self) -> RegressionConfig {
        RegressionConfig {
            degree: self.regression.k,
            radius: self.r,
            eps: self.eps,
            ns_cap: self.regression.ns_cap,
            psi_cap: self.regression.psi_cap,
            n_samples: self.regression.n_s,
            lp_sample_cap: self.regression.lp_samples,
            perturbations: self.regression.lp_perturbations,
            boost_rounds: self
                .regression
                .boost_rounds
                .unwrap_or_else(|| rounds_for_delta(self.delta)),
            seed: rng::substream(self.master_seed, "regression"),
        }
    }

    pub fn classifier_config(&self, seed_label: &str) -> ClassifierConfig {
        let seed = rng::substream(self.master_seed, seed_label);
        ClassifierConfig {
            rounding: RoundingConfig {
                radius: self.r,
                eps: self.eps,
                delta: self.delta,
                n_thresholds: self.rounding.n_thresholds,
                n_eval: self.rounding.n_eval,
                attempts: self.rounding.attempts,
                c_slack: self.rounding.c_slack,
                seed,
            },
            n_mean: self.partition.n_mean,
            n_test: self.partition.n_test,
            c_prime: self.partition.c_prime,
            attempts: self.partition.attempts,
            phi_m: self.phi.m,
            seed,
        }
    }
}
