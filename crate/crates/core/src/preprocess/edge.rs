//! Edge response maps.
//!
//! The built-in backend averages normalized Scharr gradient magnitudes of
//! the image blurred at σ ∈ {1, 2, 4}. The external backend hands the image
//! to a user-supplied program (for example a learned edge detector): the
//! image is written as binary PGM to a temporary file whose path is the sole
//! argument, and the program prints `width × height` little-endian `f32`
//! values in `[0, 1]` on stdout.

use std::path::PathBuf;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{gaussian_blur, scharr_magnitude, Plane};
use crate::image::{FloatMap, GrayImage};

pub const SCALES: [f64; 3] = [1.0, 2.0, 4.0];
const EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeBackend {
    #[default]
    BuiltinMultiscale,
    External { command: PathBuf },
}

pub fn edge_response(image: &GrayImage, backend: &EdgeBackend) -> Result<FloatMap> {
    match backend {
        EdgeBackend::BuiltinMultiscale => Ok(multiscale_gradient(image)),
        EdgeBackend::External { command } => external_response(image, command),
    }
}

fn multiscale_gradient(image: &GrayImage) -> FloatMap {
    let plane = Plane::from_gray(image);
    let mut acc = vec![0.0f64; plane.data.len()];
    for sigma in SCALES {
        let grad = scharr_magnitude(&gaussian_blur(&plane, sigma));
        let norm = grad.max().max(EPSILON);
        for (a, g) in acc.iter_mut().zip(&grad.data) {
            *a += g / norm;
        }
    }
    let data = acc
        .into_iter()
        .map(|v| ((v / SCALES.len() as f64) as f32).clamp(0.0, 1.0))
        .collect();
    FloatMap::new(image.width(), image.height(), data).expect("values clamped to [0, 1]")
}

fn external_response(image: &GrayImage, command: &PathBuf) -> Result<FloatMap> {
    // Each call owns its temp file and pipe, so concurrent calls never share output.
    let input = tempfile::Builder::new()
        .prefix("edge-in-")
        .suffix(".pgm")
        .tempfile()?;
    image.save_pgm(input.path())?;

    let output = Command::new(command)
        .arg(input.path())
        .stdin(Stdio::null())
        .stderr(Stdio::inherit())
        .output()
        .map_err(|e| Error::ExternalBackend(format!("cannot run {}: {e}", command.display())))?;
    if !output.status.success() {
        return Err(Error::ExternalBackend(format!(
            "{} exited with {}",
            command.display(),
            output.status
        )));
    }

    let expected = image.width() as usize * image.height() as usize * 4;
    if output.stdout.len() != expected {
        return Err(Error::ExternalShape { expected, actual: output.stdout.len() });
    }
    let data: Vec<f32> = output
        .stdout
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    if data.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::ExternalRange);
    }
    FloatMap::new(image.width(), image.height(), data)
}
