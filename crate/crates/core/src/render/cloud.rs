use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ImportanceReport, Point2D};

/// Advance width of one glyph as a fraction of the font size. The SVG output
/// uses a monospace face so this estimate is the layout's ground truth.
pub const GLYPH_ADVANCE: f64 = 0.6;
/// Line box height as a fraction of the font size.
pub const LINE_HEIGHT: f64 = 1.2;
/// Clearance kept between neighbouring words, in canvas units.
pub const WORD_GAP: f64 = 2.0;

const SPIRAL_STEP: f64 = 0.1;
const SPIRAL_PITCH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn centered(center: Point2D, width: f64, height: f64) -> Self {
        Self { x: center.x - width / 2.0, y: center.y - height / 2.0, width, height }
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    /// Open-interior intersection; rectangles that merely touch do not overlap.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    fn inflate(&self, by: f64) -> Rect {
        Rect { x: self.x - by, y: self.y - by, width: self.width + 2.0 * by, height: self.height + 2.0 * by }
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.right() <= width && self.bottom() <= height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordBox {
    pub part_name: String,
    pub weight: f64,
    pub font_size: f64,
    /// Center of the text box.
    pub anchor: Point2D,
    pub bounds: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordCloudLayout {
    pub category: String,
    pub width: f64,
    pub height: f64,
    pub boxes: Vec<WordBox>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudStyle {
    pub width: f64,
    pub height: f64,
    pub min_pt: f64,
    pub max_pt: f64,
    pub seed: u64,
}

impl Default for CloudStyle {
    fn default() -> Self {
        Self { width: 600.0, height: 400.0, min_pt: 10.0, max_pt: 56.0, seed: 0 }
    }
}

pub fn text_extent(word: &str, font_size: f64) -> (f64, f64) {
    (word.chars().count() as f64 * GLYPH_ADVANCE * font_size, LINE_HEIGHT * font_size)
}

/// Greedy word-cloud placement.
///
/// Words are placed largest first. Each walks an Archimedean spiral out
/// from the canvas center and takes the first position where its box (plus
/// a small gap) stays on the canvas and clears every placed box. The seed
/// only rotates the spiral's starting angle, so a single word always lands
/// dead center. Zero-weight parts are not drawn.
pub fn layout_cloud(report: &ImportanceReport, style: &CloudStyle) -> Result<WordCloudLayout> {
    if report.weights.is_empty() {
        return Err(Error::InvalidValue(format!("report for \"{}\" has no parts", report.category)));
    }
    if !(style.min_pt > 0.0 && style.min_pt < style.max_pt) {
        return Err(Error::InvalidValue(format!(
            "font range must satisfy 0 < min < max, got {}..{}",
            style.min_pt, style.max_pt
        )));
    }
    let mut words: Vec<_> = report.weights.iter().filter(|w| w.weight > 0.0).collect();
    words.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.part.cmp(&b.part)));

    let mut rng = ChaCha8Rng::seed_from_u64(style.seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let center = Point2D::new(style.width / 2.0, style.height / 2.0);
    let max_radius = style.width.hypot(style.height);

    let mut boxes: Vec<WordBox> = Vec::with_capacity(words.len());
    for w in words {
        let font_size = style.min_pt + w.weight * (style.max_pt - style.min_pt);
        let (bw, bh) = text_extent(&w.part, font_size);
        let mut theta = 0.0_f64;
        let placed = loop {
            let r = SPIRAL_PITCH * theta / std::f64::consts::TAU;
            if r > max_radius {
                break None;
            }
            let at = Point2D::new(center.x + r * (theta + phase).cos(), center.y + r * (theta + phase).sin());
            let bounds = Rect::centered(at, bw, bh);
            let padded = bounds.inflate(WORD_GAP / 2.0);
            if bounds.within(style.width, style.height) && boxes.iter().all(|b| !b.bounds.inflate(WORD_GAP / 2.0).overlaps(&padded)) {
                break Some((at, bounds));
            }
            // Keep arc steps roughly constant as the spiral widens.
            theta += SPIRAL_STEP / (1.0 + r / 20.0).sqrt();
        };
        let (anchor, bounds) = placed.ok_or_else(|| Error::WordDoesNotFit {
            word: w.part.clone(),
            font_size,
            width: style.width,
            height: style.height,
        })?;
        boxes.push(WordBox { part_name: w.part.clone(), weight: w.weight, font_size, anchor, bounds });
    }
    Ok(WordCloudLayout { category: report.category.clone(), width: style.width, height: style.height, boxes })
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Scalable vector rendering of a layout. Numbers are printed with fixed
/// precision so identical layouts give identical bytes.
pub fn cloud_svg(layout: &WordCloudLayout) -> String {
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n",
        w = layout.width,
        h = layout.height
    );
    out.push_str(&format!("  <title>{}</title>\n", escape(&layout.category)));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{:.2}\" height=\"{:.2}\" fill=\"white\"/>\n",
        layout.width, layout.height
    ));
    for b in &layout.boxes {
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"{:.2}\" font-family=\"monospace\" text-anchor=\"middle\" dominant-baseline=\"central\" data-weight=\"{:.3}\">{}</text>\n",
            b.anchor.x,
            b.anchor.y,
            b.font_size,
            b.weight,
            escape(&b.part_name)
        ));
    }
    out.push_str("</svg>\n");
    out
}
