//! `HVS1` container: a 12-byte header followed by the entropy payload.
//!
//! | offset | size | field                               |
//! |--------|------|-------------------------------------|
//! | 0      | 4    | magic `HVS1`                        |
//! | 4      | 2    | width, little-endian                |
//! | 6      | 2    | height, little-endian               |
//! | 8      | 1    | qp                                  |
//! | 9      | 1    | log2 CTU size (always 6)            |
//! | 10     | 1    | flags, bit 0 = loop filter          |
//! | 11     | 1    | reserved, 0                         |

use crate::codec::EncodedImage;
use crate::types::{CodecConfig, CTU_LOG2};
use crate::{Error, Result};

pub const CONTAINER_MAGIC: &[u8; 4] = b"HVS1";
pub const CONTAINER_HEADER_LEN: usize = 12;
const FLAG_LOOP_FILTER: u8 = 1;

pub fn write_container(image: &EncodedImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(CONTAINER_HEADER_LEN + image.payload().len());
    out.extend_from_slice(CONTAINER_MAGIC);
    out.extend_from_slice(&(image.width() as u16).to_le_bytes());
    out.extend_from_slice(&(image.height() as u16).to_le_bytes());
    out.push(image.config().qp());
    out.push(CTU_LOG2 as u8);
    out.push(if image.config().loop_filter_enabled() { FLAG_LOOP_FILTER } else { 0 });
    out.push(0);
    out.extend_from_slice(image.payload());
    out
}

pub fn read_container(bytes: &[u8]) -> Result<EncodedImage> {
    if bytes.len() < CONTAINER_HEADER_LEN {
        return Err(Error::MalformedStream(format!(
            "container is {} bytes, shorter than its header",
            bytes.len()
        )));
    }
    if &bytes[..4] != CONTAINER_MAGIC {
        return Err(Error::MalformedStream("missing HVS1 magic".into()));
    }
    let width = u16::from_le_bytes([bytes[4], bytes[5]]) as u32;
    let height = u16::from_le_bytes([bytes[6], bytes[7]]) as u32;
    let (qp, ctu_log2, flags, reserved) = (bytes[8], bytes[9], bytes[10], bytes[11]);
    if width == 0 || height == 0 {
        return Err(Error::MalformedStream(format!("zero dimension {width}x{height}")));
    }
    if ctu_log2 as u32 != CTU_LOG2 {
        return Err(Error::MalformedStream(format!("unsupported CTU size 2^{ctu_log2}")));
    }
    if flags & !FLAG_LOOP_FILTER != 0 || reserved != 0 {
        return Err(Error::MalformedStream(format!(
            "unknown header bits (flags {flags:#04x}, reserved {reserved:#04x})"
        )));
    }
    let config = CodecConfig::new(qp)
        .map_err(|_| Error::MalformedStream(format!("qp {qp} out of range")))?
        .with_loop_filter(flags & FLAG_LOOP_FILTER != 0);
    EncodedImage::new(width, height, config, bytes[CONTAINER_HEADER_LEN..].to_vec())
}
