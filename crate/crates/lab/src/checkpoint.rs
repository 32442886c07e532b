//! Solution checkpoints: a flat array of little-endian `f64` in `<name>.bin`
//! and a JSON header in `<name>.json`.
//!
//! Field checkpoints store one value per grid node, `x` fastest: node
//! `(i, j, k)` is at byte offset `8·((k·ny + j)·nx + i)` and position
//! `origin + h·(i, j, k)`. Nodes outside the domain hold 0. Radial
//! checkpoints store `u` at `r_i = a + i·(b − a)/m`, `i = 0..=m`.

use std::path::Path;

use ringlab_core::field::GridSpec;
use serde::{Deserialize, Serialize};

use crate::config::{sha256_hex, Kind};
use crate::error::{LabError, Result};
use crate::io::write_atomic;

pub const CHECKPOINT_FORMAT: &str = "ringlab-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub format: String,
    pub version: u32,
    pub kind: Kind,
    pub dtype: String,
    pub byte_order: String,
    pub count: usize,
    /// `sha256` of the data file.
    pub sha256: String,
    pub domain_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialLayout>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialLayout {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    /// Number of intervals `m`.
    pub intervals: usize,
}

impl CheckpointHeader {
    pub fn field(grid: GridSpec, domain_hash: String) -> Self {
        Self::new(Kind::Field, grid.len(), domain_hash, Some(grid), None)
    }

    pub fn radial(layout: RadialLayout, domain_hash: String) -> Self {
        Self::new(
            Kind::Radial,
            layout.intervals + 1,
            domain_hash,
            None,
            Some(layout),
        )
    }

    fn new(
        kind: Kind,
        count: usize,
        domain_hash: String,
        grid: Option<GridSpec>,
        radial: Option<RadialLayout>,
    ) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            kind,
            dtype: "f64".into(),
            byte_order: "little".into(),
            count,
            sha256: String::new(),
            domain_hash,
            grid,
            radial,
        }
    }
}

pub fn encode(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Write `<stem>.bin` and `<stem>.json` into `dir`.
pub fn write(dir: &Path, stem: &str, mut header: CheckpointHeader, values: &[f64]) -> Result<()> {
    assert_eq!(
        header.count,
        values.len(),
        "header does not describe the data"
    );
    let bytes = encode(values);
    header.sha256 = sha256_hex(&bytes);
    write_atomic(&dir.join(format!("{stem}.bin")), &bytes)?;
    let json = serde_json::to_string_pretty(&header).expect("header serialises") + "\n";
    write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())
}

/// Read and validate a checkpoint. Every inconsistency is a corruption
/// error.
pub fn read(dir: &Path, stem: &str) -> Result<(CheckpointHeader, Vec<f64>)> {
    let header_path = dir.join(format!("{stem}.json"));
    let data_path = dir.join(format!("{stem}.bin"));
    let text = std::fs::read_to_string(&header_path)
        .map_err(|e| LabError::corrupt(&header_path, e.to_string()))?;
    let header: CheckpointHeader = serde_json::from_str(&text)
        .map_err(|e| LabError::corrupt(&header_path, format!("schema mismatch: {e}")))?;
    if header.format != CHECKPOINT_FORMAT || header.version != CHECKPOINT_VERSION {
        return Err(LabError::corrupt(
            &header_path,
            format!(
                "schema mismatch: expected {CHECKPOINT_FORMAT} version {CHECKPOINT_VERSION}, found {} version {}",
                header.format, header.version
            ),
        ));
    }
    if header.dtype != "f64" || header.byte_order != "little" {
        return Err(LabError::corrupt(&header_path, "unsupported data type"));
    }
    let expected = match (&header.grid, &header.radial) {
        (Some(g), None) if header.kind == Kind::Field => g.len(),
        (None, Some(r)) if header.kind == Kind::Radial => r.intervals + 1,
        _ => {
            return Err(LabError::corrupt(
                &header_path,
                "layout does not match the kind",
            ))
        }
    };
    if expected != header.count {
        return Err(LabError::corrupt(
            &header_path,
            "count does not match the layout",
        ));
    }
    let bytes =
        std::fs::read(&data_path).map_err(|e| LabError::corrupt(&data_path, e.to_string()))?;
    if bytes.len() != 8 * header.count {
        return Err(LabError::corrupt(
            &data_path,
            format!("{} bytes, expected {}", bytes.len(), 8 * header.count),
        ));
    }
    if sha256_hex(&bytes) != header.sha256 {
        return Err(LabError::corrupt(&data_path, "checksum mismatch"));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::corrupt(&data_path, "non-finite value"));
    }
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let layout = RadialLayout {
            n: 3,
            a: 0.5,
            b: 1.0,
            intervals: 4,
        };
        let values = [0.0, 0.1, 0.25, 0.1, 0.0];
        write(
            dir.path(),
            "field",
            CheckpointHeader::radial(layout, "x".into()),
            &values,
        )
        .unwrap();
        let (header, back) = read(dir.path(), "field").unwrap();
        assert_eq!(back, values);
        assert_eq!(header.radial, Some(layout));

        let bin = dir.path().join("field.bin");
        let bytes = std::fs::read(&bin).unwrap();
        std::fs::write(&bin, &bytes[..bytes.len() - 3]).unwrap();
        let err = read(dir.path(), "field").unwrap_err();
        assert_eq!(err.exit_code(), 3);

        std::fs::write(&bin, &bytes).unwrap();
        let json = dir.path().join("field.json");
        let text = std::fs::read_to_string(&json)
            .unwrap()
            .replace("\"version\": 1", "\"version\": 2");
        std::fs::write(&json, text).unwrap();
        assert!(read(dir.path(), "field")
            .unwrap_err()
            .to_string()
            .contains("schema mismatch"));
    }
}
