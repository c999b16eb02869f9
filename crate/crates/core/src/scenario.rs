//! Versioned JSON scenario files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "agent": { "start": [-3.0, 0.0], "goal": [3.0, 0.0], "speed": 0.9 },
//!   "threats": [
//!     { "kind": "pursuer", "position": [0.0, 0.0], "mu": 0.9, "range": 0.95, "capture_radius": 0.2 }
//!   ],
//!   "planner": { "n_nodes": 100 },
//!   "output": { "directory": "out", "formats": ["csv", "json"] }
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{AgentConfig, PlannerOptions, Scenario};
use crate::threat::Threat;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("."),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub agent: AgentConfig,
    #[serde(default)]
    pub threats: Vec<Threat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner: Option<PlannerOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] crate::error::Error),
    #[error("reading {}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ScenarioFile {
    /// Parse and validate scenario text.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Version(file.schema_version));
        }
        file.to_scenario().validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn to_scenario(&self) -> Scenario {
        Scenario {
            agent: self.agent.clone(),
            threats: self.threats.clone(),
            options: self.planner.clone().unwrap_or_default(),
        }
    }

    pub fn output(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::Initialization;

    const GOLDEN: &str = r#"{
  "schema_version": 1,
  "agent": { "start": [-3.0, 0.0], "goal": [3.0, 0.0], "speed": 0.9 },
  "threats": [
    { "kind": "pursuer", "position": [0.0, 0.0], "mu": 0.9, "range": 0.9473684210526316, "capture_radius": 0.2 },
    { "kind": "turret", "position": [5.0, 5.0], "theta0": 0.5, "mu": 0.5, "range": 1.0 }
  ],
  "planner": { "n_nodes": 50, "initialization": "circumnav_reach" },
  "output": { "directory": "out", "formats": ["csv"] }
}"#;

    #[test]
    fn parse_and_round_trip() {
        let file = ScenarioFile::parse(GOLDEN).unwrap();
        assert_eq!(file.threats.len(), 2);
        let planner = file.planner.as_ref().unwrap();
        assert_eq!(planner.n_nodes, 50);
        assert_eq!(planner.max_iterations, 500);
        assert_eq!(planner.initialization, Initialization::CircumnavReach);
        assert_eq!(file.output().formats, vec![OutputFormat::Csv]);
        let again = ScenarioFile::parse(&file.to_json()).unwrap();
        assert_eq!(again, file);
    }

    #[test]
    fn custom_initialization_round_trips() {
        let text = GOLDEN.replace(
            r#""circumnav_reach""#,
            r#"{"custom": [[-3.0, 0.0], [0.0, 2.0], [3.0, 0.0]]}"#,
        );
        let file = ScenarioFile::parse(&text).unwrap();
        assert!(
            matches!(&file.planner.as_ref().unwrap().initialization, Initialization::Custom(p) if p.len() == 3)
        );
        assert_eq!(ScenarioFile::parse(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn unknown_keys_report_location() {
        let text = GOLDEN.replace(r#""speed": 0.9"#, r#""speed": 0.9, "sped": 1"#);
        match ScenarioFile::parse(&text) {
            Err(ScenarioError::Parse {
                line,
                column,
                message,
            }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
                assert!(message.contains("sped"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = GOLDEN.replace(r#""range": 1.0"#, r#""range": 1.0, "fov": 2"#);
        // Tagged threat objects are buffered, so the position lands at the end of the array.
        let err = ScenarioFile::parse(&text).unwrap_err();
        assert!(
            matches!(&err, ScenarioError::Parse { line: 7, message, .. } if message.contains("fov")),
            "{err:?}"
        );
    }

    #[test]
    fn version_and_validation_errors() {
        let text = GOLDEN.replace(r#""schema_version": 1"#, r#""schema_version": 2"#);
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ScenarioError::Version(2))
        ));
        let text = GOLDEN.replace(r#""speed": 0.9"#, r#""speed": -1"#);
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ScenarioError::Invalid(_))
        ));
        assert!(matches!(
            ScenarioFile::parse("{ \"schema_version\": 1,"),
            Err(ScenarioError::Parse { .. })
        ));
    }
}
