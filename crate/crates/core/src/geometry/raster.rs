use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Canvas, Point2D, Sketch};

/// Integer pixel address. Pixel centers sit on integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    // Field order gives row-major iteration.
    pub row: u32,
    pub col: u32,
}

impl Pixel {
    pub const fn new(col: u32, row: u32) -> Self {
        Self { row, col }
    }

    pub fn center(&self) -> Point2D {
        Point2D::new(self.col as f64, self.row as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelSet {
    canvas: Canvas,
    pixels: BTreeSet<Pixel>,
}

impl PixelSet {
    pub fn new(canvas: Canvas) -> Self {
        Self { canvas, pixels: BTreeSet::new() }
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    /// Inserts a pixel; returns false (and ignores it) when it lies off the canvas.
    pub fn insert(&mut self, pixel: Pixel) -> bool {
        if pixel.col < self.canvas.width && pixel.row < self.canvas.height {
            self.pixels.insert(pixel);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, pixel: &Pixel) -> bool {
        self.pixels.contains(pixel)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Row-major order.
    pub fn iter(&self) -> impl Iterator<Item = &Pixel> + '_ {
        self.pixels.iter()
    }

    /// Pixels in rows `first..=last`, row-major.
    pub fn rows(&self, first: u32, last: u32) -> impl Iterator<Item = &Pixel> + '_ {
        self.pixels.range(Pixel::new(0, first)..=Pixel::new(u32::MAX, last))
    }

    pub fn is_subset(&self, other: &PixelSet) -> bool {
        self.pixels.is_subset(&other.pixels)
    }
}

impl<'a> IntoIterator for &'a PixelSet {
    type Item = &'a Pixel;
    type IntoIter = std::collections::btree_set::Iter<'a, Pixel>;

    fn into_iter(self) -> Self::IntoIter {
        self.pixels.iter()
    }
}

/// Rasterizes the sketch's strokes, or only those in `kept_ids` when given.
///
/// Each polyline segment is drawn with integer line stepping between its
/// rounded endpoints, then dilated by a `width`-sided square.
pub fn rasterize(sketch: &Sketch, kept_ids: Option<&BTreeSet<u32>>) -> PixelSet {
    let mut out = PixelSet::new(sketch.canvas);
    for stroke in &sketch.strokes {
        if kept_ids.is_some_and(|ids| !ids.contains(&stroke.id)) {
            continue;
        }
        let lo = -(((stroke.width as i64) - 1) / 2);
        let hi = stroke.width as i64 / 2;
        let mut plot = |x: i64, y: i64| {
            for dy in lo..=hi {
                for dx in lo..=hi {
                    let (px, py) = (x + dx, y + dy);
                    if px >= 0 && py >= 0 && px <= u32::MAX as i64 && py <= u32::MAX as i64 {
                        out.insert(Pixel::new(px as u32, py as u32));
                    }
                }
            }
        };
        for seg in stroke.points.windows(2) {
            line(round(seg[0]), round(seg[1]), &mut plot);
        }
    }
    out
}

fn round(p: Point2D) -> (i64, i64) {
    (p.x.round() as i64, p.y.round() as i64)
}

/// All-octant integer line stepping, endpoints inclusive.
fn line((x0, y0): (i64, i64), (x1, y1): (i64, i64), plot: &mut impl FnMut(i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    loop {
        plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}
