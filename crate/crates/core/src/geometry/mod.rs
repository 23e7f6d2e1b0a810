//! Raster, containment and boundary-matching primitives.

mod matching;
mod nearest;
mod polygon;
mod raster;

pub use matching::{count_matches, count_valid_matches, BoundaryIndex, BoundaryMatch};
pub use nearest::{KdTree, Nearest};
pub use polygon::{count_inside, pixels_inside, ContourPolygon};
pub use raster::{rasterize, Pixel, PixelSet};
