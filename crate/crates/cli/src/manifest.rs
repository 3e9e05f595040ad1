use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use envyline::verify::streams;

/// Provenance attached to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
    pub rng: RngInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RngInfo {
    pub algorithm: &'static str,
    pub seeding: &'static str,
    pub streams: BTreeMap<&'static str, u64>,
}

impl RngInfo {
    fn chacha8() -> Self {
        RngInfo {
            algorithm: "chacha8",
            seeding: "rand_chacha 0.3 ChaCha8Rng::seed_from_u64(seed), then set_stream(stream)",
            streams: BTreeMap::from([
                ("strategyproofness", streams::STRATEGYPROOFNESS),
                ("reduction", streams::REDUCTION),
                ("invariants", streams::INVARIANTS),
            ]),
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set, so that reruns are byte-identical;
/// otherwise the current time.
pub fn timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
            rng: RngInfo::chacha8(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}
