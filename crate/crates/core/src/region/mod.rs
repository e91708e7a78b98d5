//! Subsets of the complex plane: convex sets by support functions, general
//! sets by rasters.

pub mod geometry;
mod raster;
mod support;

pub use raster::{hausdorff, hausdorff_to_points, raster_intersect, Raster, Rect, DEFAULT_RESOLUTION};
pub use support::{support_contains, SupportFn, DEFAULT_ANGLES};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error("rasters are defined on different grids")]
    GridMismatch,
    #[error("region is empty")]
    EmptyRegion,
    #[error("degenerate box {0:?}")]
    DegenerateBox(Rect),
    #[error("raster resolution must be positive")]
    ZeroResolution,
    #[error("mask has {got} cells, expected {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("malformed raster document: {0}")]
    Parse(String),
}
