//! JSON run configuration for the command-line front end.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::lagrangian::BuiltinModel;
use crate::solver::{random_start, SolveOptions};
use crate::space::ProblemParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPoint {
    /// `v ≡ 0`.
    Zero,
    /// Seeded random cosine series (see [`random_start`]).
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub armijo: f64,
    pub backtrack: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub initial: InitialPoint,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self {
            max_iters: d.max_iters,
            grad_tol: d.grad_tol,
            armijo: d.armijo,
            backtrack: d.backtrack,
            initial_step: d.initial_step,
            min_step: d.min_step,
            initial: InitialPoint::Zero,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub interval: (f64, f64),
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    /// The model's own exponent, when it has one, defaults to `p`.
    pub model: BuiltinModel,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parse and validate a configuration document.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: serde_json::Value = serde_json::from_str(text).map_err(config_error)?;
        // Let the model inherit the problem exponent.
        if let (Some(p), Some(model)) = (doc.get("p").cloned(), doc.get_mut("model")) {
            let takes_p = matches!(
                model.get("name").and_then(|v| v.as_str()),
                Some("pnorm_potential" | "pnorm_linear")
            );
            if let Some(obj) = model.as_object_mut() {
                if takes_p && !obj.contains_key("p") {
                    obj.insert("p".into(), p);
                }
            }
        }
        let cfg: Self = match serde_json::from_value(doc) {
            Ok(cfg) => cfg,
            // Re-parse the text to recover the line and column of the error.
            Err(e) => {
                return Err(config_error(
                    serde_json::from_str::<Self>(text).err().unwrap_or(e),
                ))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.n < 4 {
            return Err(Error::InvalidParams(format!(
                "field `n`: need n >= 4, got {}",
                self.n
            )));
        }
        self.grid()?;
        let model_p = match &self.model {
            BuiltinModel::PnormPotential { p, .. } | BuiltinModel::PnormLinear { p, .. } => {
                Some(*p)
            }
            _ => None,
        };
        if let Some(mp) = model_p {
            if mp != self.p {
                return Err(Error::InvalidParams(format!(
                    "field `model.p` = {mp} differs from the problem exponent `p` = {}",
                    self.p
                )));
            }
        }
        if let InitialPoint::Random { amplitude } = self.solver.initial {
            if !(amplitude.is_finite() && amplitude >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "field `solver.initial.random.amplitude`: got {amplitude}"
                )));
            }
        }
        self.solve_options()?.validate()
    }

    pub fn params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.alpha, self.p)
            .map_err(|e| Error::InvalidParams(format!("fields `alpha`/`p`: {e}")))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.interval.0, self.interval.1, self.n)
            .map_err(|e| Error::InvalidParams(format!("fields `interval`/`n`: {e}")))
    }

    pub fn solve_options(&self) -> Result<SolveOptions> {
        let s = &self.solver;
        let initial = match s.initial {
            InitialPoint::Zero => None,
            InitialPoint::Random { amplitude } => Some(random_start(
                self.grid()?,
                self.model.dim(),
                amplitude,
                self.seed,
            )?),
        };
        Ok(SolveOptions {
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            armijo: s.armijo,
            backtrack: s.backtrack,
            initial_step: s.initial_step,
            min_step: s.min_step,
            initial,
        })
    }

    /// `f` sampled on the grid, for the linear-source model.
    pub fn source_samples(&self) -> Result<Option<SampledFunction>> {
        match &self.model {
            BuiltinModel::PnormLinear { source, .. } => {
                let s = source.build();
                Ok(Some(SampledFunction::scalar(self.grid()?, |t| s.value(t))?))
            }
            _ => Ok(None),
        }
    }
}

/// serde_json messages already carry the line and column.
fn config_error(e: serde_json::Error) -> Error {
    Error::InvalidParams(format!("malformed config: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::SourceSpec;

    const LINEAR: &str = r#"{
        "interval": [0.0, 1.0], "n": 64, "alpha": 0.6, "p": 2.0,
        "model": {"name": "pnorm_linear", "source": {"kind": "constant", "value": 1.0}}
    }"#;

    #[test]
    fn model_inherits_p() {
        let cfg = RunConfig::from_json(LINEAR).unwrap();
        assert_eq!(
            cfg.model,
            BuiltinModel::PnormLinear {
                p: 2.0,
                source: SourceSpec::Constant { value: 1.0 }
            }
        );
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert_eq!(cfg.solver, SolverConfig::default());
    }

    #[test]
    fn violated_standing_assumption_names_constraint() {
        let text = LINEAR.replace("0.6", "0.4");
        let msg = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(msg.contains("1/p < alpha"), "{msg}");
    }

    #[test]
    fn unknown_field_and_model_rejected() {
        let text = LINEAR.replace("\"n\"", "\"nodes\"");
        let msg = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(msg.contains("nodes") && msg.contains("line"), "{msg}");
        let text = LINEAR.replace("pnorm_linear", "catenary");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn tiny_grid_rejected() {
        let text = LINEAR.replace("64", "3");
        assert!(RunConfig::from_json(&text)
            .unwrap_err()
            .to_string()
            .contains("n >= 4"));
    }

    #[test]
    fn mismatched_model_exponent() {
        let text = LINEAR.replace(
            "\"name\": \"pnorm_linear\",",
            "\"name\": \"pnorm_linear\", \"p\": 3.0,",
        );
        assert!(RunConfig::from_json(&text)
            .unwrap_err()
            .to_string()
            .contains("model.p"));
    }
}
