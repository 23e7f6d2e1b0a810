use std::collections::BTreeSet;

use crate::model::{CountMode, Point2D};

use super::nearest::{KdTree, Nearest};
use super::polygon::{pixels_inside, ContourPolygon};
use super::raster::{Pixel, PixelSet};

/// One stroke pixel paired with its nearest densified contour point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMatch {
    pub pixel: Pixel,
    pub sample: usize,
    pub distance: f64,
}

/// Densified contour with its nearest-point index, built once per contour
/// and reused for the full sketch and the epitome.
#[derive(Debug, Clone)]
pub struct BoundaryIndex {
    contour: ContourPolygon,
    tree: KdTree,
}

impl BoundaryIndex {
    pub fn new(contour: ContourPolygon) -> Self {
        let tree = KdTree::build(contour.densified());
        Self { contour, tree }
    }

    pub fn contour(&self) -> &ContourPolygon {
        &self.contour
    }

    pub fn samples(&self) -> &[Point2D] {
        self.tree.points()
    }

    pub fn nearest(&self, p: &Point2D) -> Option<Nearest> {
        self.tree.nearest(p)
    }

    /// Pairs each raster pixel inside the contour with its nearest sample,
    /// keeping pairs strictly closer than `dist_threshold`.
    pub fn matches(&self, raster: &PixelSet, dist_threshold: f64) -> Vec<BoundaryMatch> {
        match_pixels(pixels_inside(&self.contour, raster).iter(), &self.tree, dist_threshold)
    }

    pub fn count(&self, raster: &PixelSet, dist_threshold: f64, mode: CountMode) -> usize {
        count_matches(&self.matches(raster, dist_threshold), mode)
    }
}

pub(crate) fn match_pixels<'a>(
    pixels: impl Iterator<Item = &'a Pixel>,
    tree: &KdTree,
    dist_threshold: f64,
) -> Vec<BoundaryMatch> {
    pixels
        .filter_map(|pixel| {
            let nearest = tree.nearest(&pixel.center())?;
            let distance = nearest.distance();
            (distance < dist_threshold).then_some(BoundaryMatch { pixel: *pixel, sample: nearest.index, distance })
        })
        .collect()
}

pub fn count_matches(matches: &[BoundaryMatch], mode: CountMode) -> usize {
    match mode {
        CountMode::MatchedPixels => matches.len(),
        CountMode::UniqueBoundary => matches.iter().map(|m| m.sample).collect::<BTreeSet<_>>().len(),
    }
}

/// Number of valid boundary matches between `raster` and `contour`.
///
/// Pixels inside the contour are matched to their nearest densified contour
/// point; matches at distance `>= dist_threshold` are discarded. The result
/// counts distinct contour points (`UniqueBoundary`) or matched pixels
/// (`MatchedPixels`).
pub fn count_valid_matches(raster: &PixelSet, contour: &ContourPolygon, dist_threshold: f64, mode: CountMode) -> usize {
    BoundaryIndex::new(contour.clone()).count(raster, dist_threshold, mode)
}
