//! On-disk scenario files: a versioned envelope around an instance
//! description plus optional command options. Unknown fields are rejected
//! everywhere so a typo cannot silently change what a run means.

use orbex_core::descriptor::InstanceDescriptor;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::errors::CliError;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Schema version; must equal [`SCENARIO_VERSION`].
    pub version: u32,
    pub instance: InstanceDescriptor,
    /// Optional shift designations `label -> [z, x]` for block-level
    /// constructions when the weight condition fails.
    #[serde(default)]
    pub shifts: Option<BTreeMap<String, (usize, usize)>>,
    #[serde(default)]
    pub options: ScenarioOptions,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    /// Overrides the probability threshold above which an input counts as
    /// confusable with an outcome (`capacity` only).
    #[serde(default)]
    pub confusability_threshold: Option<f64>,
    /// Overrides the completeness gate of the active tolerance profile.
    #[serde(default)]
    pub completeness_tol: Option<f64>,
    /// Overrides the zero-error residual gate of the active profile.
    #[serde(default)]
    pub error_residual_tol: Option<f64>,
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::ReadFile { path: path.to_path_buf(), source })?;
    let scenario: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| CliError::Schema { detail: e.to_string() })?;
    if scenario.version != SCENARIO_VERSION {
        return Err(CliError::Version { got: scenario.version });
    }
    Ok(scenario)
}
