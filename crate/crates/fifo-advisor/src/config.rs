// SPDX-License-Identifier: Apache-2.0

//! Depth configurations as JSON: `{ "depths": { "<fifo name>": <depth> } }`.

use std::collections::BTreeMap;

use fifo_advisor_core::trace::ConfigError;
use fifo_advisor_core::{FifoConfig, TraceProgram};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("configuration names unknown fifo `{0}`")]
    UnknownFifo(String),
    #[error("configuration has no depth for fifo `{0}`")]
    MissingFifo(String),
    #[error("fifo `{fifo}`: depth {depth} does not fit in 32 bits")]
    TooLarge { fifo: String, depth: u64 },
    #[error(transparent)]
    Bounds(#[from] ConfigError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    depths: BTreeMap<String, u64>,
}

/// FIFO name → depth, serialized in declaration order.
pub struct DepthMap<'a> {
    pub program: &'a TraceProgram,
    pub depths: &'a [u32],
}

impl Serialize for DepthMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.depths.len()))?;
        for (fifo, depth) in self.program.fifos().iter().zip(self.depths) {
            map.serialize_entry(&fifo.name, depth)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct ConfigOut<'a> {
    depths: DepthMap<'a>,
}

pub fn parse_config(program: &TraceProgram, text: &str) -> Result<FifoConfig, ConfigFileError> {
    let file: ConfigFile = serde_json::from_str(text)?;
    if let Some(unknown) = file.depths.keys().find(|n| program.fifo_by_name(n).is_none()) {
        return Err(ConfigFileError::UnknownFifo(unknown.clone()));
    }
    let mut depths = Vec::with_capacity(program.fifo_count());
    for fifo in program.fifos() {
        let depth = *file
            .depths
            .get(&fifo.name)
            .ok_or_else(|| ConfigFileError::MissingFifo(fifo.name.clone()))?;
        depths.push(u32::try_from(depth).map_err(|_| ConfigFileError::TooLarge {
            fifo: fifo.name.clone(),
            depth,
        })?);
    }
    Ok(FifoConfig::new(program, depths)?)
}

pub fn write_config(program: &TraceProgram, config: &FifoConfig) -> String {
    let out = ConfigOut {
        depths: DepthMap {
            program,
            depths: config.depths(),
        },
    };
    let mut text = serde_json::to_string_pretty(&out).expect("config serializes");
    text.push('\n');
    text
}
