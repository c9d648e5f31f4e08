//! Experiment configuration: a single JSON document describing one run.
//!
//! ```json
//! {
//!   "objective": {"name": "norm_power", "params": {"p": 4, "dim": 5}},
//!   "algorithm": {"kind": "cr", "m": "auto", "mu_tol": 1e-9, "max_iter": 10000},
//!   "x0": {"random_sphere": {"radius": 1.0, "seed": 7}},
//!   "output_dir": "out",
//!   "seed": 42
//! }
//! ```
//!
//! `x0` may also be an explicit vector (`[0.001, 1, 1]`) or `"canonical"`
//! (the unit vector `(1,..,1)/√d`). All randomness derives from the single
//! config seed through per-purpose ChaCha streams; the optional seeds under
//! `x0.random_sphere` and the inexact algorithm override the derived ones.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::objectives::{self, Objective};
use crate::optimizer::{CrConfig, GdConfig, InexactConfig};
use crate::rng::{SeedStream, STREAM_X0};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObjectiveSpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(untagged)]
pub enum NumberOrAuto {
    Number(f64),
    Auto(AutoKeyword),
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

impl NumberOrAuto {
    fn resolved(self) -> Option<f64> {
        match self {
            NumberOrAuto::Number(v) => Some(v),
            NumberOrAuto::Auto(_) => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Cr {
        #[serde(default)]
        m: Option<NumberOrAuto>,
        #[serde(default)]
        mu_tol: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
        #[serde(default)]
        record_x: Option<bool>,
    },
    InexactCr {
        #[serde(default)]
        m: Option<NumberOrAuto>,
        #[serde(default)]
        mu_tol: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
        #[serde(default)]
        record_x: Option<bool>,
        c1: f64,
        c2: f64,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        retry_shrink: Option<f64>,
    },
    Gd {
        step_size: NumberOrAuto,
        #[serde(default)]
        grad_tol: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum X0Spec {
    Keyword(String),
    Vector(Vec<f64>),
    Named { random_sphere: RandomSphere },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RandomSphere {
    pub radius: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    pub algorithm: AlgorithmSpec,
    pub x0: X0Spec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// A fully validated, resolved experiment ready to run.
pub struct ResolvedExperiment {
    pub objective: Objective,
    pub algorithm: ResolvedAlgorithm,
    pub x0: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

pub enum ResolvedAlgorithm {
    Cr(CrConfig),
    InexactCr(InexactConfig),
    Gd(GdConfig),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Validates the config and resolves the objective, the start point, and
    /// algorithm parameters. `"auto"` step size resolves to the reciprocal of
    /// the objective's gradient-Lipschitz bound on the start's level set.
    pub fn resolve(&self) -> Result<ResolvedExperiment, String> {
        let objective = objectives::from_name(&self.objective.name, &self.objective.params)
            .map_err(|e| format!("objective: {e}"))?;
        let x0 = self.resolve_x0(objective.dim())?;
        if x0.len() != objective.dim() {
            return Err(format!(
                "x0 has dimension {}, objective needs {}",
                x0.len(),
                objective.dim()
            ));
        }
        let objective =
            objective.calibrated_for(&x0).map_err(|e| format!("calibration: {e}"))?;

        let algorithm = match &self.algorithm {
            AlgorithmSpec::Cr { m, mu_tol, max_iter, record_x } => {
                ResolvedAlgorithm::Cr(CrConfig {
                    m: m.and_then(NumberOrAuto::resolved),
                    mu_tol: mu_tol.unwrap_or(1e-9),
                    max_iter: max_iter.unwrap_or(10_000),
                    record_x: record_x.unwrap_or(true),
                })
            }
            AlgorithmSpec::InexactCr { m, mu_tol, max_iter, record_x, c1, c2, seed, retry_shrink } => {
                ResolvedAlgorithm::InexactCr(InexactConfig {
                    base: CrConfig {
                        m: m.and_then(NumberOrAuto::resolved),
                        mu_tol: mu_tol.unwrap_or(1e-9),
                        max_iter: max_iter.unwrap_or(10_000),
                        record_x: record_x.unwrap_or(true),
                    },
                    c1: *c1,
                    c2: *c2,
                    seed: seed.unwrap_or(self.seed),
                    retry_shrink: retry_shrink.unwrap_or(0.5),
                })
            }
            AlgorithmSpec::Gd { step_size, grad_tol, max_iter } => {
                let step = match step_size.resolved() {
                    Some(v) => v,
                    None => {
                        let lg = objective.gradient_lipschitz();
                        if lg <= 0.0 {
                            return Err("auto step_size needs a positive gradient-Lipschitz bound".into());
                        }
                        1.0 / lg
                    }
                };
                ResolvedAlgorithm::Gd(GdConfig {
                    step_size: step,
                    grad_tol: grad_tol.unwrap_or(1e-9),
                    max_iter: max_iter.unwrap_or(10_000),
                })
            }
        };

        Ok(ResolvedExperiment {
            objective,
            algorithm,
            x0,
            output_dir: self.output_dir.clone(),
            seed: self.seed,
        })
    }

    fn resolve_x0(&self, dim: usize) -> Result<Vec<f64>, String> {
        match &self.x0 {
            X0Spec::Vector(v) => {
                if v.iter().all(|x| x.is_finite()) {
                    Ok(v.clone())
                } else {
                    Err("x0 vector must be finite".into())
                }
            }
            X0Spec::Keyword(word) if word == "canonical" => {
                let scale = 1.0 / (dim as f64).sqrt();
                Ok(vec![scale; dim])
            }
            X0Spec::Keyword(other) => Err(format!("unknown x0 initializer '{other}'")),
            X0Spec::Named { random_sphere } => {
                if !(random_sphere.radius > 0.0 && random_sphere.radius.is_finite()) {
                    return Err(format!("random_sphere radius must be positive, got {}", random_sphere.radius));
                }
                let seed = random_sphere.seed.unwrap_or(self.seed);
                let mut rng = SeedStream::new(seed, STREAM_X0);
                Ok(rng.sphere_point(dim, random_sphere.radius))
            }
        }
    }
}
