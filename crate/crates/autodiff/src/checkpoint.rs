//! A small self-describing checkpoint container:
//!
//! ```text
//! bytes 0..8    magic "IHCKPT01"
//! bytes 8..16   header length, u64 little-endian
//! then          header: JSON {"config": ..., "params": [{name, rows, cols, offset}]}
//! then          payload: all parameter values as f32 little-endian
//! ```
//!
//! Offsets are in elements, not bytes, and parameters appear in registration
//! order. `serde_json` serializes object keys sorted, so saving, loading,
//! and saving again produces byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::AutodiffError;
use crate::optim::ParamSet;
use crate::scalar::Scalar;

const MAGIC: &[u8; 8] = b"IHCKPT01";

#[derive(Serialize, Deserialize)]
struct Header {
    config: serde_json::Value,
    params: Vec<HeaderParam>,
}

#[derive(Serialize, Deserialize)]
struct HeaderParam {
    name: String,
    rows: usize,
    cols: usize,
    offset: usize,
}

/// One parameter as read back from disk.
pub struct CheckpointEntry {
    pub name: String,
    pub shape: (usize, usize),
    pub data: Vec<f32>,
}

pub struct LoadedCheckpoint {
    pub config: serde_json::Value,
    pub params: Vec<CheckpointEntry>,
}

pub fn save_checkpoint<T: Scalar>(
    path: impl AsRef<Path>,
    params: &ParamSet<T>,
    config: &serde_json::Value,
) -> Result<(), AutodiffError> {
    let mut header = Header {
        config: config.clone(),
        params: Vec::with_capacity(params.len()),
    };
    let mut offset = 0usize;
    for (name, tensor) in params.iter() {
        let (rows, cols) = tensor.shape();
        header.params.push(HeaderParam {
            name: name.to_string(),
            rows,
            cols,
            offset,
        });
        offset += rows * cols;
    }
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| AutodiffError::Checkpoint(format!("header serialization failed: {e}")))?;

    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(MAGIC)?;
    file.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
    file.write_all(&header_bytes)?;
    for (_, tensor) in params.iter() {
        tensor.with_data(|data| -> Result<(), AutodiffError> {
            for &v in data {
                file.write_all(&(v.to_f64() as f32).to_le_bytes())?;
            }
            Ok(())
        })?;
    }
    file.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<LoadedCheckpoint, AutodiffError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 16 {
        return Err(AutodiffError::Checkpoint(format!(
            "file too small ({} bytes) to hold a checkpoint header",
            bytes.len()
        )));
    }
    if &bytes[0..8] != MAGIC {
        return Err(AutodiffError::Checkpoint(
            "bad magic: not a checkpoint file".into(),
        ));
    }
    let header_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let payload_start = 16usize.checked_add(header_len).ok_or_else(|| {
        AutodiffError::Checkpoint("header length overflows the file".into())
    })?;
    if payload_start > bytes.len() {
        return Err(AutodiffError::Checkpoint(format!(
            "header claims {header_len} bytes but the file holds {}",
            bytes.len()
        )));
    }
    let header: Header = serde_json::from_slice(&bytes[16..payload_start])
        .map_err(|e| AutodiffError::Checkpoint(format!("header is not valid JSON: {e}")))?;

    let total_elems: usize = header.params.iter().map(|p| p.rows * p.cols).sum();
    let payload = &bytes[payload_start..];
    if payload.len() != total_elems * 4 {
        return Err(AutodiffError::Checkpoint(format!(
            "payload holds {} bytes, expected {} for {total_elems} f32 values",
            payload.len(),
            total_elems * 4
        )));
    }

    let mut params = Vec::with_capacity(header.params.len());
    let mut expected_offset = 0usize;
    for p in &header.params {
        if p.offset != expected_offset {
            return Err(AutodiffError::Checkpoint(format!(
                "parameter '{}' at offset {}, expected {expected_offset}",
                p.name, p.offset
            )));
        }
        let n = p.rows * p.cols;
        let start = p.offset * 4;
        let data: Vec<f32> = payload[start..start + n * 4]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        params.push(CheckpointEntry {
            name: p.name.clone(),
            shape: (p.rows, p.cols),
            data,
        });
        expected_offset += n;
    }

    Ok(LoadedCheckpoint {
        config: header.config,
        params,
    })
}
