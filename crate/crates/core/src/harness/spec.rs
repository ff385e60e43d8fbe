use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// Version string embedded in every output header.
pub const ARTIFACT_VERSION: &str = concat!("shiftlab-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Smallball,
    Parametric,
    Semiparam,
    Prop31,
    Figure1,
    JuntaLayerwise,
    JuntaJoint,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::Smallball,
        Self::Parametric,
        Self::Semiparam,
        Self::Prop31,
        Self::Figure1,
        Self::JuntaLayerwise,
        Self::JuntaJoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Smallball => "smallball",
            Self::Parametric => "parametric",
            Self::Semiparam => "semiparam",
            Self::Prop31 => "prop31",
            Self::Figure1 => "figure1",
            Self::JuntaLayerwise => "junta-layerwise",
            Self::JuntaJoint => "junta-joint",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::Parse(format!("unknown experiment kind `{s}`")))
    }
}

/// One experiment: what to run, with which parameters and seeds.
///
/// `parameters` is kind-specific and is decoded by the matching runner;
/// unknown keys are rejected there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, parameters: Value, seeds: Vec<u64>) -> Result<Self> {
        let parameters = match parameters {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => return Err(LabError::Config(format!("parameters must be a JSON object, got {other}"))),
        };
        let spec = Self {
            kind,
            parameters,
            seeds,
            output_dir: default_output_dir(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(LabError::Config("seeds must be nonempty".into()));
        }
        let distinct: BTreeSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(LabError::Config("seeds must be distinct".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of `(kind, parameters, seeds)`.
    /// The output directory does not enter the hash.
    pub fn spec_hash(&self) -> String {
        let canonical = serde_json::json!({
            "kind": self.kind,
            "parameters": Value::Object(self.parameters.clone()),
            "seeds": self.seeds,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Decodes `parameters` into the runner's typed struct.
    pub fn typed_parameters<P: serde::de::DeserializeOwned>(&self) -> Result<P> {
        Ok(serde_json::from_value(Value::Object(self.parameters.clone()))?)
    }
}

/// Result of one (spec, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec_hash: String,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub trace_paths: Vec<PathBuf>,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}
