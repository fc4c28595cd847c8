//! JSON result records.

use serde::Serialize;
use serde_json::Value;

use crate::specfile::SpaceSpec;

pub const TOOL: &str = "bpb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun a command, plus what it produced. Only
/// `timestamp` differs between reruns.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub space: Option<String>,
    pub spec_hash: Option<String>,
    pub params: Value,
    pub outputs: Value,
    pub timestamp: String,
}

impl ResultRecord {
    pub fn new(command: &str, spec: Option<&SpaceSpec>, params: Value, outputs: Value) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            space: spec.map(SpaceSpec::print),
            spec_hash: spec.map(SpaceSpec::hash),
            params,
            outputs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialise")
    }
}
