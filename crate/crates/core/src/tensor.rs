//! Three-channel network input tensor and its SAT1 container.
//!
//! SAT1 layout (little-endian):
//!
//! | offset | field                                    |
//! |--------|------------------------------------------|
//! | 0..4   | magic `b"SAT1"`                          |
//! | 4..8   | version `u32` = 1                        |
//! | 8..12  | channels `u32` = 3                       |
//! | 12..16 | height `u32`                             |
//! | 16..20 | width `u32`                              |
//! | 20..24 | dtype `u32` = 0 (IEEE-754 `f32`)         |
//! | 24..36 | three `u32` channel semantics codes      |
//! | 36..   | `f32` planes, channel-major, row-major   |

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::FloatMap;

pub const MAGIC: &[u8; 4] = b"SAT1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 36;
const CHANNELS: u32 = 3;
const DTYPE_F32: u32 = 0;

/// What a tensor channel holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChannelTag {
    Raw,
    Edge,
    ClaheLow,
    ClaheHigh,
}

impl ChannelTag {
    pub const ALL: [ChannelTag; 4] = [Self::Raw, Self::Edge, Self::ClaheLow, Self::ClaheHigh];

    pub fn code(self) -> u32 {
        match self {
            Self::Raw => 0,
            Self::Edge => 1,
            Self::ClaheLow => 2,
            Self::ClaheHigh => 3,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Raw => "RAW",
            Self::Edge => "EDGE",
            Self::ClaheLow => "CLAHE_LOW",
            Self::ClaheHigh => "CLAHE_HIGH",
        }
    }
}

impl fmt::Display for ChannelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelTag {
    type Err = Error;

    /// Accepts the canonical names plus the aliases `HED`, `CLAHE2` and `CLAHE4`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RAW" => Ok(Self::Raw),
            "EDGE" | "HED" => Ok(Self::Edge),
            "CLAHE_LOW" | "CLAHE2" => Ok(Self::ClaheLow),
            "CLAHE_HIGH" | "CLAHE4" => Ok(Self::ClaheHigh),
            _ => Err(Error::UnknownTag(s.trim().to_string())),
        }
    }
}

/// Ordered channel tags of a tensor.
pub type Composition = [ChannelTag; 3];

/// The full pre-processing composition: edge map plus both equalizations.
pub const SHAPE_AWARE: Composition = [ChannelTag::Edge, ChannelTag::ClaheLow, ChannelTag::ClaheHigh];

/// Parses `"EDGE,CLAHE_LOW,CLAHE_HIGH"` (also `/` separated).
pub fn parse_composition(s: &str) -> Result<Composition> {
    let tags = s
        .split([',', '/'])
        .map(str::parse)
        .collect::<Result<Vec<ChannelTag>>>()?;
    tags.try_into().map_err(|v: Vec<ChannelTag>| {
        Error::InvalidParameter(format!("composition needs 3 tags, got {}", v.len()))
    })
}

pub fn composition_label(c: &Composition) -> String {
    format!("{}/{}/{}", c[0], c[1], c[2])
}

/// Three same-sized channels fed to the segmentation network.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    channels: [FloatMap; 3],
    semantics: Composition,
}

impl InputTensor {
    pub fn new(channels: [FloatMap; 3], semantics: Composition) -> Result<Self> {
        let dims = channels[0].dimensions();
        for c in &channels[1..] {
            crate::image::ensure_same_dims(dims, c.dimensions())?;
        }
        Ok(Self { channels, semantics })
    }

    pub fn channels(&self) -> &[FloatMap; 3] {
        &self.channels
    }

    pub fn semantics(&self) -> Composition {
        self.semantics
    }

    pub fn width(&self) -> u32 {
        self.channels[0].width()
    }

    pub fn height(&self) -> u32 {
        self.channels[0].height()
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.semantics == other.semantics
            && self
                .channels
                .iter()
                .zip(&other.channels)
                .all(|(a, b)| a.bit_eq(b))
    }

    /// Encodes the tensor as a SAT1 byte stream.
    pub fn to_bytes(&self) -> Vec<u8> {
        let plane = self.width() as usize * self.height() as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + 3 * plane * 4);
        out.extend_from_slice(MAGIC);
        for word in [VERSION, CHANNELS, self.height(), self.width(), DTYPE_F32] {
            out.extend_from_slice(&word.to_le_bytes());
        }
        for tag in self.semantics {
            out.extend_from_slice(&tag.code().to_le_bytes());
        }
        for channel in &self.channels {
            for v in channel.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Decodes a SAT1 byte stream, re-validating every invariant.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::TruncatedPayload);
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let version = word(1);
        if version != VERSION {
            return Err(Error::VersionMismatch(version));
        }
        let (channels, height, width, dtype) = (word(2), word(3), word(4), word(5));
        if channels != CHANNELS {
            return Err(Error::MalformedHeader(format!("expected 3 channels, found {channels}")));
        }
        if dtype != DTYPE_F32 {
            return Err(Error::MalformedHeader(format!("unsupported dtype code {dtype}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::MalformedHeader(format!("zero-sized plane {width}x{height}")));
        }
        let mut semantics = [ChannelTag::Raw; 3];
        for (k, slot) in semantics.iter_mut().enumerate() {
            let code = word(6 + k);
            *slot = ChannelTag::from_code(code)
                .ok_or_else(|| Error::MalformedHeader(format!("unknown semantics code {code}")))?;
        }

        let plane = (width as usize)
            .checked_mul(height as usize)
            .ok_or_else(|| Error::MalformedHeader("plane size overflows".into()))?;
        let payload = &bytes[HEADER_LEN..];
        let expected = plane * 3 * 4;
        if payload.len() < expected {
            return Err(Error::TruncatedPayload);
        }
        if payload.len() > expected {
            return Err(Error::MalformedHeader(format!(
                "{} trailing bytes after payload",
                payload.len() - expected
            )));
        }

        let mut planes = payload.chunks_exact(plane * 4).map(|chunk| {
            let data = chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
                .collect();
            FloatMap::new(width, height, data)
        });
        let channels = [
            planes.next().unwrap()?,
            planes.next().unwrap()?,
            planes.next().unwrap()?,
        ];
        Self::new(channels, semantics)
    }
}

pub fn save_tensor(tensor: &InputTensor, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, tensor.to_bytes())?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<InputTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    InputTensor::from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(w: u32, h: u32, semantics: Composition) -> InputTensor {
        let z = FloatMap::zeros(w, h).unwrap();
        InputTensor::new([z.clone(), z.clone(), z], semantics).unwrap()
    }

    #[test]
    fn zero_tensor_layout() {
        let bytes = zeros(1, 1, SHAPE_AWARE).to_bytes();
        assert_eq!(bytes.len(), HEADER_LEN + 12);
        assert_eq!(&bytes[..4], b"SAT1");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &3u32.to_le_bytes());
        assert_eq!(&bytes[20..24], &0u32.to_le_bytes());
        assert_eq!(&bytes[24..36], &[1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0]);
        assert!(bytes[HEADER_LEN..].iter().all(|&b| b == 0));
    }

    #[test]
    fn height_precedes_width() {
        let bytes = zeros(5, 2, SHAPE_AWARE).to_bytes();
        assert_eq!(&bytes[12..16], &2u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &5u32.to_le_bytes());
    }

    #[test]
    fn header_rejections() {
        let good = zeros(2, 2, SHAPE_AWARE).to_bytes();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(InputTensor::from_bytes(&bad).unwrap_err().to_string(), "bad magic");

        let mut bad = good.clone();
        bad[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(InputTensor::from_bytes(&bad), Err(Error::VersionMismatch(2))));

        let truncated = &good[..good.len() - 1];
        assert_eq!(
            InputTensor::from_bytes(truncated).unwrap_err().to_string(),
            "truncated payload"
        );
        assert!(matches!(InputTensor::from_bytes(&good[..20]), Err(Error::TruncatedPayload)));

        let mut bad = good.clone();
        bad[24..28].copy_from_slice(&9u32.to_le_bytes());
        assert!(matches!(InputTensor::from_bytes(&bad), Err(Error::MalformedHeader(_))));

        let mut bad = good.clone();
        bad[HEADER_LEN..HEADER_LEN + 4].copy_from_slice(&2.0f32.to_le_bytes());
        assert!(matches!(InputTensor::from_bytes(&bad), Err(Error::OutOfRange(_))));

        let mut bad = good;
        bad.push(0);
        assert!(InputTensor::from_bytes(&bad).is_err());
    }

    #[test]
    fn composition_parsing() {
        assert_eq!(parse_composition("EDGE,CLAHE_LOW,CLAHE_HIGH").unwrap(), SHAPE_AWARE);
        assert_eq!(parse_composition("hed/clahe2/clahe4").unwrap(), SHAPE_AWARE);
        assert_eq!(parse_composition("RAW,RAW,RAW").unwrap(), [ChannelTag::Raw; 3]);
        assert!(matches!(parse_composition("RAW,FOO,RAW"), Err(Error::UnknownTag(_))));
        assert!(parse_composition("RAW,RAW").is_err());
        assert_eq!(composition_label(&SHAPE_AWARE), "EDGE/CLAHE_LOW/CLAHE_HIGH");
    }

    #[test]
    fn mismatched_channels_rejected() {
        let a = FloatMap::zeros(2, 2).unwrap();
        let b = FloatMap::zeros(2, 3).unwrap();
        assert!(InputTensor::new([a.clone(), a, b], SHAPE_AWARE).is_err());
    }
}
