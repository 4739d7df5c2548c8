//! Envelope shared by every report file. The timestamp is the only
//! run-dependent field and sits alone in the header.

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const TOOL: &str = "biharm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report<T: Serialize> {
    pub header: Header,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub pass: bool,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, timestamp: String, seed: u64, config: &impl Serialize, pass: bool, results: T) -> Result<Self> {
        Ok(Report {
            header: Header { timestamp },
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)?,
            pass,
            results,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// The report text with the header removed, for run-to-run comparison.
pub fn strip_header(json: &str) -> Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("header");
    }
    Ok(serde_json::to_string(&v)?)
}
