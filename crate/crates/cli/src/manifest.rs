use std::collections::BTreeMap;

use rcl_core::spec_builder::ColoringSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance block embedded in every report.
///
/// Wall time is left out unless `--timing` is given, so that reruns with
/// the same arguments are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub spec_hash: Option<String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, params: impl Serialize) -> Self {
        let params = match serde_json::to_value(params) {
            Ok(serde_json::Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        RunManifest {
            command: command.to_string(),
            params,
            seed: None,
            spec_hash: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_spec(mut self, spec: &ColoringSpec) -> Self {
        self.spec_hash = Some(spec_hash(spec));
        self
    }
}

/// SHA-256 of the spec's canonical JSON, so formatting of the input file
/// does not matter.
pub fn spec_hash(spec: &ColoringSpec) -> String {
    hex::encode(Sha256::digest(spec.to_json_string().as_bytes()))
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub result: &'a T,
}
