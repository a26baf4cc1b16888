//! Exemplar-based object removal.
//!
//! The fill loop repeatedly picks the most constrained pixel on the boundary
//! of the region to remove, finds the source patch with the smallest sum of
//! squared differences to its known surroundings, and copies that patch in.
//! The best-patch search dominates the cost, so it comes in two
//! interchangeable kernels (plain and work-group tiled) and its search window
//! can be shrunk around the object. Both are instrumented with operation and
//! memory-traffic counters.
//!
//! ```no_run
//! use patchfill::{engine, io, search::SearchConfig};
//!
//! let image = io::load_image("photo.png")?;
//! let mask = io::load_mask("mask.png")?;
//! let summary = engine::inpaint(image, mask, SearchConfig::default())?;
//! io::save_image(&summary.image, "result.png")?;
//! # Ok::<(), patchfill::Error>(())
//! ```

pub mod bench;
pub mod engine;
mod error;
pub mod io;
pub mod priority;
pub mod raster;
pub mod scene;
pub mod search;
pub mod service;
pub mod tiled;

pub use error::{Error, Result};
