//! Binary PPM (P6, maxval 255) plus PNG/JPEG decoding at the corpus boundary.

use std::fs;
use std::path::Path;

use super::RasterImage;
use crate::error::{Error, Result};

/// Parses a binary P6 PPM. Comments are allowed in the header; the maxval
/// must be 255.
pub fn read_ppm(bytes: &[u8]) -> Result<RasterImage> {
    let mut pos = 0usize;
    let magic = next_token(bytes, &mut pos)?;
    if magic != b"P6" {
        return Err(Error::format("ppm", "magic number is not P6"));
    }
    let width = parse_dim(next_token(bytes, &mut pos)?)?;
    let height = parse_dim(next_token(bytes, &mut pos)?)?;
    let maxval = parse_dim(next_token(bytes, &mut pos)?)?;
    if maxval != 255 {
        return Err(Error::format("ppm", format!("unsupported maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if bytes.get(pos).is_none_or(|b| !b.is_ascii_whitespace()) {
        return Err(Error::format("ppm", "missing separator before raster"));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::format("ppm", "dimensions overflow"))?;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::format("ppm", format!("raster truncated: need {need} bytes")))?;
    let pixels = raster.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    RasterImage::new(width, height, pixels)
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::format("ppm", "header ended early")),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Ok(&bytes[start..*pos])
}

fn parse_dim(tok: &[u8]) -> Result<usize> {
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::format("ppm", format!("bad header field {:?}", String::from_utf8_lossy(tok))))
}

/// Serializes as `P6\n<w> <h>\n255\n` followed by the raw RGB bytes.
pub fn encode_ppm(image: &RasterImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.pixels().len() * 3);
    out.extend_from_slice(header.as_bytes());
    for px in image.pixels() {
        out.extend_from_slice(px);
    }
    out
}

pub fn save_ppm(image: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_ppm(image))?;
    Ok(())
}

/// Decodes PPM, PNG or JPEG bytes, sniffing the format from content.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.starts_with(b"P6") {
        return read_ppm(bytes);
    }
    let decoded = image::load_from_memory(bytes).map_err(|e| Error::format("image", e.to_string()))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    RasterImage::new(w, h, pixels)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    decode_image(&bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
