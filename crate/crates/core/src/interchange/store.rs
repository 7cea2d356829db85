//! Prototype store persistence as JSON. Prototypes are kept at full `f64`
//! precision; `serde_json` is built with exact float round-tripping.

use std::path::Path;

use crate::error::{Error, Result};
use crate::prototype::PrototypeStore;

pub fn write_store(store: &PrototypeStore, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(store)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_store(path: &Path) -> Result<PrototypeStore> {
    let bytes = std::fs::read(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    let store: PrototypeStore = serde_json::from_slice(&bytes)?;
    store.validate()?;
    Ok(store)
}
