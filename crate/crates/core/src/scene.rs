//! Scene files: a domain, a point set and the settings of every pipeline,
//! as JSON with exact rationals written as `"p/q"` strings.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainSpec, OmegaDomain};
use crate::dynamics::{ClosureOptions, Schedule, DEFAULT_STEP_CAP};
use crate::error::{Error, Result};
use crate::experiments::XMinPolicy;
use crate::geometry::Point;
use crate::perturb::PerturbConfig;
use crate::scalar::{Mode, Scalar, DEFAULT_TOLERANCE};
use crate::series::{SeriesJson, TropicalSeries};

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSettings {
    pub epsilon: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_prime: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_second: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Scalar>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_passes: Option<usize>,
}

impl PerturbSettings {
    pub fn to_config(&self) -> PerturbConfig {
        let base = PerturbConfig::new(self.epsilon.clone());
        PerturbConfig {
            epsilon_prime: self.epsilon_prime.clone(),
            epsilon_second: self.epsilon_second.clone(),
            delta: self.delta.clone(),
            seed: self.seed,
            retry_limit: self.retry_limit.unwrap_or(base.retry_limit),
            t_grid: self.t_grid.unwrap_or(base.t_grid),
            grid_per_axis: self.grid_per_axis.unwrap_or(base.grid_per_axis),
            extra_passes: self.extra_passes.unwrap_or(base.extra_passes),
            ..base
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fixed `x_min`; absent means a KS scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
}

impl ExperimentSettings {
    pub fn policy(&self) -> XMinPolicy {
        self.x_min.map_or(XMinPolicy::KsScan, XMinPolicy::Fixed)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub labels: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub points: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Starting series; `0_Ω` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSettings>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputSettings,
}

/// A validated scene with its domain built.
#[derive(Clone, Debug)]
pub struct Scene {
    pub config: SceneConfig,
    pub domain: Arc<OmegaDomain>,
}

impl SceneConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Checks mode consistency and builds the domain.
    pub fn build(self) -> Result<Scene> {
        let mode = self.domain.mode();
        if let Some(m) = self.mode {
            if m != mode {
                return Err(Error::ModeMismatch {
                    expected: mode,
                    found: m,
                });
            }
        }
        let domain = self.domain.build()?;
        for p in &self.points {
            if p.len() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    found: p.len(),
                });
            }
            for x in p {
                if x.mode() != mode {
                    return Err(match mode {
                        Mode::Exact => Error::Parse(format!(
                            "point coordinate {x} must be an exact rational string such as \"1/5\" on a polytope domain"
                        )),
                        Mode::Approximate => Error::ModeMismatch {
                            expected: mode,
                            found: x.mode(),
                        },
                    });
                }
            }
        }
        Ok(Scene { config: self, domain })
    }
}

impl Scene {
    pub fn points(&self) -> &[Point] {
        &self.config.points
    }

    pub fn closure_options(&self) -> ClosureOptions {
        ClosureOptions {
            schedule: self.config.schedule.unwrap_or(Schedule::RoundRobin),
            tolerance: self.config.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            step_cap: self.config.step_cap.unwrap_or(DEFAULT_STEP_CAP),
        }
    }

    pub fn initial_series(&self) -> Result<TropicalSeries> {
        match &self.config.initial {
            None => Ok(TropicalSeries::zero(self.domain.clone())),
            Some(j) => {
                let f = TropicalSeries::from_json(j, Some(self.domain.clone()))?;
                if f.has_defaults() {
                    Ok(f)
                } else {
                    f.complete()
                }
            }
        }
    }
}
