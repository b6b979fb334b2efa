//! Shape-aware pre-processing: an edge response map and two contrast-limited
//! equalizations stacked into one three-channel tensor.

mod clahe;
mod edge;

pub use clahe::{clahe, clip_histogram, clip_limit, equalization_map, ClaheParams, Histogram, BINS};
pub use edge::{edge_response, EdgeBackend, SCALES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{FloatMap, GrayImage};
use crate::tensor::{ChannelTag, Composition, InputTensor, SHAPE_AWARE};

/// Everything needed to turn a grayscale image into an input tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessSettings {
    pub backend: EdgeBackend,
    pub low: ClaheParams,
    pub high: ClaheParams,
}

impl Default for PreprocessSettings {
    fn default() -> Self {
        Self {
            backend: EdgeBackend::BuiltinMultiscale,
            low: ClaheParams::low(),
            high: ClaheParams::high(),
        }
    }
}

impl PreprocessSettings {
    pub fn assemble(&self, image: &GrayImage) -> Result<InputTensor> {
        assemble_tensor(image, &self.backend, &self.low, &self.high)
    }

    pub fn assemble_variant(&self, image: &GrayImage, composition: Composition) -> Result<InputTensor> {
        assemble_variant(image, composition, &self.backend, &self.low, &self.high)
    }
}

fn equalized(image: &GrayImage, params: &ClaheParams) -> Result<FloatMap> {
    Ok(clahe(image, params)?.to_unit_map())
}

/// `[edge, clahe(low)/255, clahe(high)/255]`.
pub fn assemble_tensor(
    image: &GrayImage,
    backend: &EdgeBackend,
    low: &ClaheParams,
    high: &ClaheParams,
) -> Result<InputTensor> {
    if !(low.clip_factor < high.clip_factor) {
        return Err(Error::Precondition(format!(
            "low clip factor {} must be below high clip factor {}",
            low.clip_factor, high.clip_factor
        )));
    }
    assemble_variant(image, SHAPE_AWARE, backend, low, high)
}

/// Builds a tensor realizing `composition` in order. Each distinct tag is
/// computed once.
pub fn assemble_variant(
    image: &GrayImage,
    composition: Composition,
    backend: &EdgeBackend,
    low: &ClaheParams,
    high: &ClaheParams,
) -> Result<InputTensor> {
    let mut cache: [Option<FloatMap>; 4] = Default::default();
    for tag in composition {
        let slot = &mut cache[tag.code() as usize];
        if slot.is_none() {
            *slot = Some(match tag {
                ChannelTag::Raw => image.to_unit_map(),
                ChannelTag::Edge => edge_response(image, backend)?,
                ChannelTag::ClaheLow => equalized(image, low)?,
                ChannelTag::ClaheHigh => equalized(image, high)?,
            });
        }
    }
    let channel = |i: usize| cache[composition[i].code() as usize].clone().expect("filled above");
    InputTensor::new([channel(0), channel(1), channel(2)], composition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient_image() -> GrayImage {
        GrayImage::from_fn(40, 32, |x, y| ((x * 5 + y * 3) % 256) as u8).unwrap()
    }

    #[test]
    fn default_tensor_channels_in_unit_range() {
        let t = PreprocessSettings::default().assemble(&gradient_image()).unwrap();
        assert_eq!(t.semantics(), SHAPE_AWARE);
        for c in t.channels() {
            assert!(c.data().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn inverted_thresholds_rejected() {
        let img = gradient_image();
        let err = assemble_tensor(
            &img,
            &EdgeBackend::BuiltinMultiscale,
            &ClaheParams::with_clip(4.0),
            &ClaheParams::with_clip(2.0),
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_image_tensor() {
        let img = GrayImage::filled(32, 32, 90).unwrap();
        let t = PreprocessSettings::default().assemble(&img).unwrap();
        assert!(t.channels()[0].data().iter().all(|&v| v == 0.0));
        for c in &t.channels()[1..] {
            let first = c.data()[0];
            assert!(c.data().iter().all(|&v| v == first));
        }
    }

    #[test]
    fn raw_variant_is_scaled_image() {
        let mut img = GrayImage::filled(16, 16, 0).unwrap().into_raw();
        img[5] = 255;
        let img = GrayImage::new(16, 16, img).unwrap();
        let t = PreprocessSettings::default()
            .assemble_variant(&img, [ChannelTag::Raw; 3])
            .unwrap();
        for c in t.channels() {
            assert_eq!(c.data()[5], 1.0);
            assert_eq!(c.data()[0], 0.0);
        }
    }

    #[test]
    fn repeated_edge_tags_share_one_plane() {
        let t = PreprocessSettings::default()
            .assemble_variant(&gradient_image(), [ChannelTag::Edge; 3])
            .unwrap();
        let [a, b, c] = t.channels();
        assert!(a.bit_eq(b) && b.bit_eq(c));
    }

    #[test]
    fn full_variant_matches_assemble() {
        let s = PreprocessSettings::default();
        let img = gradient_image();
        assert!(s.assemble(&img).unwrap().bit_eq(&s.assemble_variant(&img, SHAPE_AWARE).unwrap()));
    }
}
