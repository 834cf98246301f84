//! CIFAR-10 binary batch reader for the pairwise-distance experiment.
//!
//! A batch file is a sequence of 3073-byte records: 1 label byte followed
//! by 3072 pixel bytes (three 32x32 channel planes). Images are reshaped
//! to 4x4x4x4x4x3 tensors: the five size-4 modes take the 1024 spatial
//! bytes of a plane in first-mode-fastest order and the channel index
//! becomes the last mode. Under that mapping the flat tensor index equals
//! the pixel byte index, so no reshuffling happens on load. Any consistent
//! mapping preserves the norms and distances the experiment measures.

use anyhow::{bail, Context, Result};
use std::path::Path;
use tensor_rp::{DenseTensor, Shape};

pub const RECORD_BYTES: usize = 3073;
pub const PIXELS: usize = 3072;
pub const POINTS: usize = 50;

/// Shape the 3072 pixels are folded into.
pub fn image_shape() -> Shape {
    Shape::new(vec![4, 4, 4, 4, 4, 3]).expect("static shape")
}

/// Loads the first 50 images of a CIFAR-10 binary batch as unit-norm
/// dense tensors. Label bytes are discarded.
pub fn load_cifar10(path: &Path) -> Result<Vec<DenseTensor>> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read dataset {}", path.display()))?;
    let needed = POINTS * RECORD_BYTES;
    if bytes.len() < needed {
        bail!(
            "dataset truncated: {} holds {} bytes, record {} needs bytes {}..{} ({} records of {} bytes required)",
            path.display(),
            bytes.len(),
            bytes.len() / RECORD_BYTES,
            (bytes.len() / RECORD_BYTES) * RECORD_BYTES,
            (bytes.len() / RECORD_BYTES + 1) * RECORD_BYTES,
            POINTS,
            RECORD_BYTES
        );
    }
    if bytes.len() % RECORD_BYTES != 0 {
        bail!(
            "dataset {} has wrong record size: {} trailing bytes after offset {}",
            path.display(),
            bytes.len() % RECORD_BYTES,
            bytes.len() - bytes.len() % RECORD_BYTES
        );
    }
    let shape = image_shape();
    let mut out = Vec::with_capacity(POINTS);
    for rec in 0..POINTS {
        let base = rec * RECORD_BYTES;
        let pixels = &bytes[base + 1..base + RECORD_BYTES];
        let values: Vec<f64> = pixels.iter().map(|&b| b as f64).collect();
        let mut t = DenseTensor::new(shape.clone(), values)
            .with_context(|| format!("record {rec} at offset {base}"))?;
        let norm = t.frobenius_norm();
        if norm == 0.0 {
            bail!("record {rec} at offset {base} is all zero and cannot be normalized");
        }
        t.scale(1.0 / norm);
        out.push(t);
    }
    Ok(out)
}
