//! PNG / binary PNM reading and writing.
//!
//! Images may be PNG (8-bit RGB or RGBA) or PPM; masks may be PNG or PGM.
//! Everything is normalized to RGBA on load.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::raster::{to_grayscale, PixelState, RasterImage, RegionMask};

fn decode(reader: ImageReader<impl std::io::BufRead + std::io::Seek>) -> Result<RasterImage> {
    let format = reader.format();
    match format {
        Some(ImageFormat::Png | ImageFormat::Pnm) => {}
        Some(other) => return Err(Error::UnsupportedFormat(format!("{other:?}"))),
        None => return Err(Error::UnsupportedFormat("unrecognized data".into())),
    }
    let rgba = reader.decode()?.to_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let pixels = rgba.pixels().map(|p| p.0).collect();
    RasterImage::from_pixels(w, h, pixels)
}

pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    decode(ImageReader::new(Cursor::new(bytes)).with_guessed_format()?)
}

/// Reads only the header to get `(width, height)`.
pub fn probe_dimensions(bytes: &[u8]) -> Result<(usize, usize)> {
    let reader = ImageReader::new(Cursor::new(bytes)).with_guessed_format()?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Pnm) => {}
        Some(other) => return Err(Error::UnsupportedFormat(format!("{other:?}"))),
        None => return Err(Error::UnsupportedFormat("unrecognized data".into())),
    }
    let (w, h) = reader.into_dimensions()?;
    Ok((w as usize, h as usize))
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    decode(ImageReader::open(path)?.with_guessed_format()?)
}

/// Object where mask luma ≥ 128.
pub fn mask_from_image(mask: &RasterImage) -> RegionMask {
    RegionMask::from_mask_image(&to_grayscale(mask))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<RegionMask> {
    load_image(path).map(|m| mask_from_image(&m))
}

pub fn decode_mask(bytes: &[u8]) -> Result<RegionMask> {
    decode_image(bytes).map(|m| mask_from_image(&m))
}

fn rgba_buffer(img: &RasterImage) -> Vec<u8> {
    img.pixels().iter().flatten().copied().collect()
}

pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    image::write_buffer_with_format(
        &mut out,
        &rgba_buffer(img),
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::Rgba8,
        ImageFormat::Png,
    )?;
    Ok(out.into_inner())
}

/// Writes PNG (RGBA) or binary PPM (RGB, alpha dropped) depending on the
/// file extension.
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let (w, h) = (img.width() as u32, img.height() as u32);
    match ext.as_str() {
        "png" => image::save_buffer_with_format(
            path,
            &rgba_buffer(img),
            w,
            h,
            image::ExtendedColorType::Rgba8,
            ImageFormat::Png,
        )?,
        "ppm" => {
            let rgb: Vec<u8> = img.pixels().iter().flat_map(|p| [p[0], p[1], p[2]]).collect();
            image::save_buffer_with_format(path, &rgb, w, h, image::ExtendedColorType::Rgb8, ImageFormat::Pnm)?
        }
        _ => return Err(Error::UnsupportedFormat(format!("cannot write '{}'", path.display()))),
    }
    Ok(())
}

/// Writes a mask as 8-bit grayscale: 255 for object, 0 otherwise. PNG or
/// PGM by extension.
pub fn save_mask(mask: &RegionMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let luma: Vec<u8> = mask
        .states()
        .iter()
        .map(|&s| if s == PixelState::Object { 255 } else { 0 })
        .collect();
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => ImageFormat::Pnm,
        Some(e) if e.eq_ignore_ascii_case("png") => ImageFormat::Png,
        _ => return Err(Error::UnsupportedFormat(format!("cannot write '{}'", path.display()))),
    };
    image::save_buffer_with_format(
        path,
        &luma,
        mask.width() as u32,
        mask.height() as u32,
        image::ExtendedColorType::L8,
        format,
    )?;
    Ok(())
}
