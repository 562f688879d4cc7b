use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::{Artifacts, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub selftest: bool,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &Command, selftest: bool, artifacts: &Artifacts) -> Result<Self, CliError> {
        let parameters = match serde_json::to_value(command)? {
            serde_json::Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        Ok(Self {
            subcommand: command.name().to_string(),
            selftest,
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digests: artifacts.input_digests.clone(),
            outputs: artifacts.files.iter().map(|(f, _)| f.clone()).collect(),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a file and records its digest under the path as given.
pub fn read_digested(path: &Path, digests: &mut BTreeMap<String, String>) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    digests.insert(path.display().to_string(), sha256_hex(&bytes));
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
