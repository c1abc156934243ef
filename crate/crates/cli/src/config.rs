use std::path::{Path, PathBuf};

use qpt_core::channels::channel_by_name;
use qpt_core::experiment::ExperimentDesign;
use qpt_core::qops::SuperoperatorG;
use qpt_core::reconstruct::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const QUBIT_FIXTURES: &str = "qubit-fixtures";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self {
            name: "damping".into(),
            params: vec![0.5, 0.75],
        }
    }
}

impl ChannelSpec {
    /// Invalid names or parameters are input errors, whatever the cause.
    pub fn build(&self) -> Result<SuperoperatorG, CliError> {
        channel_by_name(&self.name, &self.params)
            .map_err(|e| CliError::usage(format!("channel '{}': {e}", self.name)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub prob_floor: f64,
    pub psd_repair_tol: f64,
    /// 0 keeps no per-iteration records; a trace CSV request raises it to 1.
    pub log_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let base = SolverConfig::default();
        Self {
            max_iterations: base.max_iterations,
            convergence_tol: base.convergence_tol,
            prob_floor: base.prob_floor,
            psd_repair_tol: base.psd_repair_tol,
            log_every: 0,
        }
    }
}

impl SolverSettings {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            max_iterations: self.max_iterations,
            convergence_tol: self.convergence_tol,
            prob_floor: self.prob_floor,
            psd_repair_tol: self.psd_repair_tol,
            log_every: self.log_every,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub trace_csv: Option<PathBuf>,
}

/// Everything a run needs. Loaded from a JSON file, then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelSpec,
    pub design: String,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub trials: usize,
    /// Use exact Born probabilities instead of sampled counts.
    pub exact: bool,
    pub solver: SolverSettings,
    pub outputs: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            channel: ChannelSpec::default(),
            design: QUBIT_FIXTURES.into(),
            shots_per_setting: 20,
            seed: 2001,
            trials: 1,
            exact: false,
            solver: SolverSettings::default(),
            outputs: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::commands::read_text(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.shots_per_setting < 1 {
            return Err(CliError::usage("shots must be at least 1"));
        }
        if self.trials < 1 {
            return Err(CliError::usage("trials must be at least 1"));
        }
        if self.design != QUBIT_FIXTURES {
            return Err(CliError::usage(format!(
                "unknown design '{}' (available: {QUBIT_FIXTURES})",
                self.design
            )));
        }
        self.solver.to_config().validate()?;
        Ok(())
    }

    pub fn design(&self) -> ExperimentDesign {
        ExperimentDesign::qubit_fixtures()
    }
}
