//! Randomized scene parameters handed to the external renderer.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::seeded_rng;
use crate::error::{Error, Result};

pub const MESH_CATALOG: usize = 14;
pub const BACKGROUND_CATALOG: usize = 1000;
pub const CAMERA_COUNT: u8 = 16;
pub const LIGHT_COUNT: usize = 4;

pub const SCALE_SPREAD: f64 = 0.05;
pub const TRANSLATION_MAX_M: f64 = 0.01;
pub const ROTATION_MAX_DEG: f64 = 25.0;
/// Dimensionless intensity relative to the renderer's default light.
pub const LIGHT_RANGE: (f64, f64) = (0.2, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// Each factor is `1 + u`, `u ~ U(-0.05, 0.05)`.
    #[default]
    Symmetric,
    /// Each factor is `1 + u`, `u ~ U(0, 0.05)`.
    EnlargeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSizes {
    pub meshes: usize,
    pub backgrounds: usize,
}

impl Default for CatalogSizes {
    fn default() -> Self {
        Self { meshes: MESH_CATALOG, backgrounds: BACKGROUND_CATALOG }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub mesh_id: usize,
    pub scale: [f64; 3],
    /// Metres.
    pub translation: [f64; 3],
    /// Degrees.
    pub rotation: [f64; 3],
    pub light_intensities: [f64; LIGHT_COUNT],
    pub camera_ids: Vec<u8>,
    pub background_id: usize,
    pub seed: u64,
}

impl SceneManifest {
    pub fn validate(&self, catalog: &CatalogSizes) -> Result<()> {
        let bad = |what: String| Err(Error::OutOfRange(what));
        if self.mesh_id >= catalog.meshes {
            return bad(format!("mesh_id {} >= {}", self.mesh_id, catalog.meshes));
        }
        if self.background_id >= catalog.backgrounds {
            return bad(format!("background_id {} >= {}", self.background_id, catalog.backgrounds));
        }
        if let Some(s) = self.scale.iter().find(|s| !((*s - 1.0).abs() <= SCALE_SPREAD)) {
            return bad(format!("scale factor {s}"));
        }
        if let Some(t) = self.translation.iter().find(|t| !(0.0..=TRANSLATION_MAX_M).contains(*t)) {
            return bad(format!("translation {t}"));
        }
        if let Some(r) = self.rotation.iter().find(|r| !(0.0..=ROTATION_MAX_DEG).contains(*r)) {
            return bad(format!("rotation {r}"));
        }
        if let Some(l) = self.light_intensities.iter().find(|l| !(**l >= 0.0)) {
            return bad(format!("light intensity {l}"));
        }
        if self.camera_ids.is_empty() {
            return bad("camera_ids is empty".into());
        }
        if let Some(c) = self.camera_ids.iter().find(|&&c| c >= CAMERA_COUNT) {
            return bad(format!("camera id {c}"));
        }
        Ok(())
    }
}

pub fn sample_manifest(seed: u64, catalog: CatalogSizes) -> Result<SceneManifest> {
    sample_manifest_with(seed, catalog, ScaleMode::Symmetric)
}

pub fn sample_manifest_with(seed: u64, catalog: CatalogSizes, mode: ScaleMode) -> Result<SceneManifest> {
    if catalog.meshes == 0 || catalog.backgrounds == 0 {
        return Err(Error::InvalidParameter(format!(
            "catalog sizes must be at least 1, got {catalog:?}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mesh_id = rng.random_range(0..catalog.meshes);
    let scale_lo = match mode {
        ScaleMode::Symmetric => -SCALE_SPREAD,
        ScaleMode::EnlargeOnly => 0.0,
    };
    let scale = [(); 3].map(|_| 1.0 + rng.random_range(scale_lo..=SCALE_SPREAD));
    let translation = [(); 3].map(|_| rng.random_range(0.0..=TRANSLATION_MAX_M));
    let rotation = [(); 3].map(|_| rng.random_range(0.0..=ROTATION_MAX_DEG));
    let light_intensities = [(); LIGHT_COUNT].map(|_| rng.random_range(LIGHT_RANGE.0..=LIGHT_RANGE.1));
    // Uniform over the non-empty subsets of the camera ring.
    let bits = loop {
        let bits: u16 = rng.random();
        if bits != 0 {
            break bits;
        }
    };
    let camera_ids = (0..CAMERA_COUNT).filter(|i| bits & (1 << i) != 0).collect();
    let background_id = rng.random_range(0..catalog.backgrounds);
    Ok(SceneManifest {
        mesh_id,
        scale,
        translation,
        rotation,
        light_intensities,
        camera_ids,
        background_id,
        seed,
    })
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(mut out: W, manifests: &[SceneManifest]) -> Result<()> {
    for m in manifests {
        serde_json::to_writer(&mut out, m)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<SceneManifest>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_manifest() {
        let c = CatalogSizes::default();
        assert_eq!(sample_manifest(42, c).unwrap(), sample_manifest(42, c).unwrap());
        assert_ne!(sample_manifest(42, c).unwrap(), sample_manifest(43, c).unwrap());
    }

    #[test]
    fn rejects_empty_catalog() {
        let c = CatalogSizes { meshes: 0, backgrounds: 5 };
        assert!(sample_manifest(1, c).is_err());
    }

    #[test]
    fn rotation_mean_over_ten_thousand() {
        let c = CatalogSizes::default();
        let mut sum = 0.0;
        for seed in 0..10_000u64 {
            let m = sample_manifest(seed, c).unwrap();
            assert!((0.0..=25.0).contains(&m.rotation[0]));
            sum += m.rotation[0];
        }
        let mean = sum / 10_000.0;
        assert!((10.5..=14.5).contains(&mean), "mean {mean}");
    }

    #[test]
    fn enlarge_only_mode() {
        let c = CatalogSizes::default();
        for seed in 0..500 {
            let m = sample_manifest_with(seed, c, ScaleMode::EnlargeOnly).unwrap();
            assert!(m.scale.iter().all(|&s| (1.0..=1.05).contains(&s)));
            m.validate(&c).unwrap();
        }
    }

    #[test]
    fn jsonl_field_names_and_round_trip() {
        let c = CatalogSizes::default();
        let ms: Vec<_> = (0..3).map(|s| sample_manifest(s, c).unwrap()).collect();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &ms).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        let obj: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let mut keys: Vec<_> = obj.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "background_id",
                "camera_ids",
                "light_intensities",
                "mesh_id",
                "rotation",
                "scale",
                "seed",
                "translation"
            ]
        );
        assert_eq!(read_jsonl(&buf[..]).unwrap(), ms);
    }

    #[test]
    fn validate_catches_out_of_range_fields() {
        let c = CatalogSizes::default();
        let mut m = sample_manifest(5, c).unwrap();
        m.rotation[1] = 26.0;
        assert!(m.validate(&c).is_err());
        let mut m = sample_manifest(5, c).unwrap();
        m.camera_ids = vec![16];
        assert!(m.validate(&c).is_err());
        let mut m = sample_manifest(5, c).unwrap();
        m.camera_ids.clear();
        assert!(m.validate(&c).is_err());
    }
}
