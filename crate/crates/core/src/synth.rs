//! Deterministic synthetic dataset generator.
//!
//! Produces simple line-drawn figures with known part geometry. Each part's
//! annotation is the bounding rectangle of its rasterized strokes, pushed out
//! by [`CONTOUR_MARGIN`] pixels, so every contour encloses and hugs its own
//! strokes. Every category also lists one part that is never drawn.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{write_atomic, write_category, CategoryData, REFERENCE_STEM};
use crate::error::Result;
use crate::geometry::rasterize;
use crate::model::{
    AnnotatedSketch, Canvas, CategoryPartList, Epitome, PartAnnotation, Point2D, Sketch, Stroke, StrokeOrdering,
};
use crate::ordering::prefix_epitome;

/// Distance from a part's outermost stroke pixel to its contour.
pub const CONTOUR_MARGIN: u32 = 2;
pub const SYNTH_CANVAS: Canvas = Canvas { width: 256, height: 256 };

/// Figures with one instance of every drawn part.
pub const SINGLE_INSTANCE: [&str; 4] = ["bird", "fish", "house", "plant"];
/// Figures with repeated parts (two wheels, four legs, ...).
pub const MULTI_INSTANCE: [&str; 2] = ["bicycle", "cow"];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub categories: Vec<String>,
    pub sketches_per_category: usize,
    pub seed: u64,
    /// Fraction of strokes kept by the generated prefix epitomes.
    pub keep_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            categories: SINGLE_INSTANCE.iter().map(|s| s.to_string()).collect(),
            sketches_per_category: 6,
            seed: 7,
            keep_fraction: 0.5,
        }
    }
}

type Polyline = Vec<Point2D>;

/// One drawn part: its name and strokes.
struct PartFigure {
    name: &'static str,
    strokes: Vec<Polyline>,
}

struct Pen<'a> {
    rng: &'a mut ChaCha8Rng,
    ox: f64,
    oy: f64,
    scale: f64,
}

impl Pen<'_> {
    fn jitter(&mut self) -> f64 {
        self.rng.random_range(-0.8..0.8)
    }

    fn pt(&mut self, x: f64, y: f64) -> Point2D {
        let jx = self.jitter();
        let jy = self.jitter();
        let q = |v: f64| (v * 10.0).round() / 10.0;
        Point2D::new(q(self.ox + x * self.scale + jx), q(self.oy + y * self.scale + jy))
    }

    fn line(&mut self, pts: &[(f64, f64)]) -> Polyline {
        pts.iter().map(|&(x, y)| self.pt(x, y)).collect()
    }

    fn ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64, n: usize) -> Polyline {
        (0..=n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                self.pt(cx + rx * t.cos(), cy + ry * t.sin())
            })
            .collect()
    }

    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) -> Polyline {
        self.line(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)])
    }
}

struct CategorySpec {
    parts: &'static [&'static str],
    draw: fn(&mut Pen) -> Vec<PartFigure>,
}

fn part(name: &'static str, strokes: Vec<Polyline>) -> PartFigure {
    PartFigure { name, strokes }
}

// All figures are drawn in a unit box of roughly 120x120 before scaling.

fn house(p: &mut Pen) -> Vec<PartFigure> {
    vec![
        part("wall", vec![p.rect(10.0, 50.0, 110.0, 115.0)]),
        part("roof", vec![p.line(&[(2.0, 52.0), (60.0, 8.0), (118.0, 52.0)])]),
        part("door", vec![p.rect(48.0, 80.0, 70.0, 113.0)]),
        part("window", vec![p.rect(20.0, 62.0, 38.0, 78.0), p.line(&[(29.0, 63.0), (29.0, 77.0)])]),
        part("chimney", vec![p.line(&[(85.0, 28.0), (85.0, 12.0), (97.0, 12.0), (97.0, 37.0)])]),
    ]
}

fn bird(p: &mut Pen) -> Vec<PartFigure> {
    vec![
        part("body", vec![p.ellipse(60.0, 70.0, 32.0, 16.0, 24)]),
        part("wing", vec![p.line(&[(45.0, 64.0), (60.0, 20.0), (80.0, 62.0)])]),
        part("head", vec![p.ellipse(100.0, 52.0, 10.0, 10.0, 16)]),
        part("tail", vec![p.line(&[(29.0, 68.0), (6.0, 56.0), (10.0, 74.0), (6.0, 90.0), (29.0, 74.0)])]),
        part("beak", vec![p.line(&[(110.0, 50.0), (120.0, 54.0), (109.0, 57.0)])]),
    ]
}

fn plant(p: &mut Pen) -> Vec<PartFigure> {
    vec![
        part("pot", vec![p.line(&[(35.0, 85.0), (85.0, 85.0), (78.0, 118.0), (42.0, 118.0), (35.0, 85.0)])]),
        part("stem", vec![p.line(&[(60.0, 84.0), (61.0, 55.0), (59.0, 30.0)])]),
        part("leaf", vec![p.line(&[(61.0, 60.0), (80.0, 48.0), (100.0, 52.0), (82.0, 62.0), (61.0, 60.0)])]),
        part("flower", vec![p.ellipse(59.0, 18.0, 12.0, 12.0, 18), p.ellipse(59.0, 18.0, 4.0, 4.0, 8)]),
    ]
}

fn fish(p: &mut Pen) -> Vec<PartFigure> {
    vec![
        part("body", vec![p.ellipse(55.0, 60.0, 40.0, 22.0, 28)]),
        part("tail", vec![p.line(&[(95.0, 60.0), (118.0, 40.0), (118.0, 80.0), (95.0, 60.0)])]),
        part("fin", vec![p.line(&[(45.0, 39.0), (58.0, 18.0), (70.0, 40.0)])]),
        part("eye", vec![p.ellipse(28.0, 54.0, 4.0, 4.0, 10)]),
    ]
}

fn bicycle(p: &mut Pen) -> Vec<PartFigure> {
    vec![
        part("wheel", vec![p.ellipse(28.0, 85.0, 24.0, 24.0, 28)]),
        part("wheel", vec![p.ellipse(94.0, 85.0, 24.0, 24.0, 28)]),
        part("spoke", vec![p.line(&[(12.0, 85.0), (44.0, 85.0)])]),
        part("spoke", vec![p.line(&[(78.0, 85.0), (110.0, 85.0)])]),
        part("frame", vec![p.line(&[(28.0, 85.0), (55.0, 50.0), (94.0, 50.0), (60.0, 85.0), (28.0, 85.0)])]),
        part("seat", vec![p.line(&[(46.0, 40.0), (62.0, 40.0)])]),
        part("handlebars", vec![p.line(&[(90.0, 50.0), (96.0, 32.0), (108.0, 30.0)])]),
    ]
}

fn cow(p: &mut Pen) -> Vec<PartFigure> {
    let mut figs = vec![part("body", vec![p.rect(20.0, 40.0, 95.0, 80.0)])];
    for x in [26.0, 40.0, 75.0, 89.0] {
        figs.push(part("leg", vec![p.line(&[(x, 82.0), (x, 115.0)])]));
    }
    figs.push(part("head", vec![p.ellipse(106.0, 36.0, 10.0, 12.0, 16)]));
    figs.push(part("ear", vec![p.line(&[(98.0, 24.0), (92.0, 14.0), (101.0, 20.0)])]));
    figs.push(part("ear", vec![p.line(&[(112.0, 22.0), (118.0, 12.0), (114.0, 25.0)])]));
    figs.push(part("tail", vec![p.line(&[(19.0, 45.0), (8.0, 60.0), (10.0, 78.0)])]));
    figs
}

fn spec(name: &str) -> Option<CategorySpec> {
    Some(match name {
        "house" => CategorySpec { parts: &["wall", "roof", "door", "window", "chimney", "garage"], draw: house },
        "bird" => CategorySpec { parts: &["body", "wing", "head", "tail", "beak", "leg"], draw: bird },
        "plant" => CategorySpec { parts: &["leaf", "stem", "pot", "flower", "thorn"], draw: plant },
        "fish" => CategorySpec { parts: &["body", "tail", "fin", "eye", "whisker"], draw: fish },
        "bicycle" => {
            CategorySpec { parts: &["wheel", "spoke", "frame", "seat", "handlebars", "chain"], draw: bicycle }
        }
        "cow" => CategorySpec { parts: &["leg", "body", "head", "ear", "tail", "udder"], draw: cow },
        _ => return None,
    })
}

pub fn known_categories() -> Vec<&'static str> {
    SINGLE_INSTANCE.iter().chain(MULTI_INSTANCE.iter()).copied().collect()
}

fn bbox_contour(sketch: &Sketch, stroke_ids: &[u32]) -> Vec<Point2D> {
    let raster = rasterize(sketch, Some(&stroke_ids.iter().copied().collect()));
    let (mut c0, mut r0, mut c1, mut r1) = (u32::MAX, u32::MAX, 0, 0);
    for px in raster.iter() {
        c0 = c0.min(px.col);
        c1 = c1.max(px.col);
        r0 = r0.min(px.row);
        r1 = r1.max(px.row);
    }
    let m = CONTOUR_MARGIN as f64;
    let (x0, y0, x1, y1) = (c0 as f64 - m, r0 as f64 - m, c1 as f64 + m, r1 as f64 + m);
    vec![Point2D::new(x0, y0), Point2D::new(x1, y0), Point2D::new(x1, y1), Point2D::new(x0, y1)]
}

fn generate_sketch(category: &str, spec: &CategorySpec, index: usize, rng: &mut ChaCha8Rng) -> AnnotatedSketch {
    let scale = rng.random_range(1.3..1.7);
    let extent = 120.0 * scale;
    let slack = SYNTH_CANVAS.width as f64 - extent - 2.0 * (CONTOUR_MARGIN as f64 + 4.0);
    let ox = 6.0 + rng.random_range(0.0..slack.max(1.0));
    let oy = 6.0 + rng.random_range(0.0..slack.max(1.0));
    let figures = (spec.draw)(&mut Pen { rng, ox, oy, scale });

    let stroke_count: usize = figures.iter().map(|f| f.strokes.len()).sum();
    let mut temporal: Vec<u32> = (0..stroke_count as u32).collect();
    temporal.shuffle(rng);

    let mut strokes = Vec::with_capacity(stroke_count);
    let mut members = Vec::with_capacity(figures.len());
    for fig in &figures {
        let mut ids = Vec::new();
        for line in &fig.strokes {
            let id = strokes.len() as u32;
            strokes.push(Stroke { id, temporal_index: temporal[id as usize], points: line.clone(), width: 1 });
            ids.push(id);
        }
        members.push((fig.name, ids));
    }
    let sketch = Sketch {
        category: category.into(),
        sketch_id: format!("{category}-{index:03}"),
        canvas: SYNTH_CANVAS,
        strokes,
    };
    let annotations = members
        .iter()
        .map(|(name, ids)| PartAnnotation { part_name: name.to_string(), contour: bbox_contour(&sketch, ids) })
        .collect();
    AnnotatedSketch { sketch, annotations }
}

/// Builds one synthetic category in memory.
pub fn synth_category(category: &str, sketches: usize, seed: u64, keep_fraction: f64) -> Result<CategoryData> {
    let spec = spec(category).ok_or_else(|| {
        crate::error::Error::InvalidValue(format!(
            "unknown synthetic category \"{category}\" (known: {})",
            known_categories().join(", ")
        ))
    })?;
    let salt = category.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let parts = CategoryPartList::new(category, spec.parts.iter().map(|s| s.to_string()).collect())?;
    let sketches: Vec<AnnotatedSketch> = (0..sketches).map(|i| generate_sketch(category, &spec, i, &mut rng)).collect();
    let mut epitomes: BTreeMap<StrokeOrdering, BTreeMap<String, Epitome>> = BTreeMap::new();
    for ordering in StrokeOrdering::ALL {
        let set = epitomes.entry(ordering).or_default();
        for a in &sketches {
            set.insert(a.sketch.sketch_id.clone(), prefix_epitome(&a.sketch, ordering, keep_fraction)?);
        }
    }
    Ok(CategoryData { dir: category.into(), parts, sketches, pending: Vec::new(), epitomes })
}

/// Labeled line drawing of a sketch, used as the category reference image.
pub fn reference_svg(a: &AnnotatedSketch) -> String {
    let c = a.sketch.canvas;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = c.width,
        h = c.height
    );
    for s in &a.sketch.strokes {
        let pts: Vec<String> = s.points.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        out.push_str(&format!("  <polyline points=\"{}\" fill=\"none\" stroke=\"black\"/>\n", pts.join(" ")));
    }
    for ann in &a.annotations {
        let n = ann.contour.len() as f64;
        let cx = ann.contour.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = ann.contour.iter().map(|p| p.y).sum::<f64>() / n;
        out.push_str(&format!(
            "  <text x=\"{cx:.1}\" y=\"{cy:.1}\" font-size=\"9\" font-family=\"sans-serif\" fill=\"#c03\" text-anchor=\"middle\">{}</text>\n",
            ann.part_name
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the synthetic dataset under `root`, one directory per category.
pub fn write_synth(root: &Path, config: &SynthConfig) -> Result<Vec<CategoryData>> {
    let mut out = Vec::new();
    for name in &config.categories {
        let data = synth_category(name, config.sketches_per_category, config.seed, config.keep_fraction)?;
        let dir = write_category(root, &data)?;
        if let Some(first) = data.sketches.first() {
            write_atomic(&dir.join(format!("{REFERENCE_STEM}.svg")), reference_svg(first).as_bytes())?;
        }
        out.push(CategoryData { dir, ..data });
    }
    Ok(out)
}
