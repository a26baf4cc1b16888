use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: image is {image_width}x{image_height}, mask is {mask_width}x{mask_height}")]
    DimensionMismatch {
        image_width: usize,
        image_height: usize,
        mask_width: usize,
        mask_height: usize,
    },
    #[error("mask marks no object pixels")]
    EmptyObjectRegion,
    #[error("mask covers the whole image; no source pixels remain")]
    ObjectCoversImage,
    #[error("fill front is empty")]
    EmptyBorder,
    #[error("no valid source patch inside the search bounds")]
    NoCandidate,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
