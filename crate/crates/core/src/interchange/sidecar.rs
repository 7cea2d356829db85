//! Optional `<basename>.meta.json` companion file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
}

impl Sidecar {
    /// `data/features.bin` -> `data/features.meta.json`
    pub fn path_for(data_path: &Path) -> PathBuf {
        let stem = data_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        data_path.with_file_name(format!("{stem}.meta.json"))
    }

    /// Missing sidecar is `Ok(None)`.
    pub fn read_for(data_path: &Path) -> Result<Option<Sidecar>> {
        let path = Self::path_for(data_path);
        match std::fs::read(&path) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(Error::File { path, source }),
        }
    }

    pub fn write_for(&self, data_path: &Path) -> Result<()> {
        let path = Self::path_for(data_path);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| Error::File { path, source })
    }
}
