use crate::error::{Error, Result};
use crate::model::{signed_area, Point2D};

use super::raster::PixelSet;

/// A closed annotation contour. The closing edge from the last vertex back
/// to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPolygon {
    vertices: Vec<Point2D>,
    min_y: f64,
    max_y: f64,
}

impl ContourPolygon {
    pub fn new(mut vertices: Vec<Point2D>) -> Result<Self> {
        // An explicitly repeated start point is the same closed contour.
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::DegenerateContour(format!("{} vertices, need at least 3", vertices.len())));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateContour("non-finite vertex".into()));
        }
        if signed_area(&vertices) == 0.0 {
            return Err(Error::DegenerateContour("zero enclosed area".into()));
        }
        let min_y = vertices.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_y = vertices.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { vertices, min_y, max_y })
    }

    pub fn vertices(&self) -> &[Point2D] {
        &self.vertices
    }

    /// Vertex count `n_b`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    fn edges(&self) -> impl Iterator<Item = (Point2D, Point2D)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed x-intervals of the even-odd interior along the horizontal line
    /// at `y`. An edge crosses the line when `y` lies in its half-open
    /// y-range, so vertices on the line are counted once.
    fn row_spans(&self, y: f64) -> Vec<(f64, f64)> {
        let mut xs: Vec<f64> = self
            .edges()
            .filter(|(a, b)| (a.y <= y && y < b.y) || (b.y <= y && y < a.y))
            .map(|(a, b)| a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    }

    fn on_boundary(&self, p: &Point2D) -> bool {
        self.edges().any(|(a, b)| on_segment(p, &a, &b))
    }

    /// Boundary-inclusive containment test.
    pub fn contains(&self, p: &Point2D) -> bool {
        if p.y < self.min_y || p.y > self.max_y {
            return false;
        }
        self.row_spans(p.y).iter().any(|&(lo, hi)| lo <= p.x && p.x <= hi) || self.on_boundary(p)
    }

    /// Contour vertices plus samples at unit arc-length steps along each
    /// edge, so consecutive samples are at most one pixel apart. Exact
    /// duplicates are dropped, keeping the first occurrence.
    pub fn densified(&self) -> Vec<Point2D> {
        let mut out: Vec<Point2D> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut push = |p: Point2D| {
            if seen.insert((p.x.to_bits(), p.y.to_bits())) {
                out.push(p);
            }
        };
        for (a, b) in self.edges() {
            push(a);
            let len = a.distance(&b);
            let mut k = 1.0;
            while k < len {
                let t = k / len;
                push(Point2D::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
                k += 1.0;
            }
        }
        out
    }
}

/// Exact when coordinates are small integers or half-integers.
fn on_segment(p: &Point2D, a: &Point2D, b: &Point2D) -> bool {
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    cross == 0.0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// The subset of `raster` whose pixel centers lie inside or on `contour`.
pub fn pixels_inside(contour: &ContourPolygon, raster: &PixelSet) -> PixelSet {
    let mut out = PixelSet::new(raster.canvas());
    if contour.max_y < 0.0 {
        return out;
    }
    let first = contour.min_y.max(0.0).ceil() as u32;
    let last = contour.max_y.floor().min(u32::MAX as f64) as u32;
    if first > last {
        return out;
    }
    let mut row: Option<(u32, Vec<(f64, f64)>)> = None;
    for pixel in raster.rows(first, last) {
        let spans = match &row {
            Some((r, spans)) if *r == pixel.row => spans,
            _ => &row.insert((pixel.row, contour.row_spans(pixel.row as f64))).1,
        };
        let c = pixel.center();
        if spans.iter().any(|&(lo, hi)| lo <= c.x && c.x <= hi) || contour.on_boundary(&c) {
            out.insert(*pixel);
        }
    }
    out
}

/// Convenience for callers that only need the count `n_full` / `n_epi`.
pub fn count_inside(contour: &ContourPolygon, raster: &PixelSet) -> usize {
    pixels_inside(contour, raster).len()
}
