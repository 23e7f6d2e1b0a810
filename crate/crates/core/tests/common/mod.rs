//! Independent reference implementations and random fixtures shared by the
//! integration tests and the acceptance gate.
//!
//! The oracles avoid every shortcut the library takes: containment is an
//! exact cross-product crossing count (no scanline spans, no division),
//! nearest points come from scanning every contour sample, and nothing is
//! cached between the full sketch and the epitome.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchparts::geometry::{rasterize, Pixel, PixelSet};
use sketchparts::model::{
    AnalysisParams, AnnotatedSketch, Canvas, CategoryPartList, CountMode, Epitome, PartAnnotation, Point2D, Sketch,
    Stroke, StrokeOrdering,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(x: f64, y: f64) -> Point2D {
    Point2D::new(x, y)
}

// ---------------------------------------------------------------- containment

fn cross(a: &Point2D, b: &Point2D, p: &Point2D) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

fn on_edge(p: &Point2D, a: &Point2D, b: &Point2D) -> bool {
    cross(a, b, p) == 0.0
        && (p.x - a.x) * (p.x - b.x) <= 0.0
        && (p.y - a.y) * (p.y - b.y) <= 0.0
}

/// Even-odd ray cast towards +x, boundary-inclusive. A polygon with an
/// explicit closing vertex is handled like the implicit form.
pub fn ray_cast_contains(poly: &[Point2D], p: &Point2D) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if on_edge(p, a, b) {
            return true;
        }
        // upward edge crosses the ray when p is strictly left of it,
        // downward edge when strictly right
        let up = a.y <= p.y && p.y < b.y && cross(a, b, p) > 0.0;
        let down = b.y <= p.y && p.y < a.y && cross(a, b, p) < 0.0;
        if up || down {
            inside = !inside;
        }
    }
    inside
}

pub fn oracle_inside(poly: &[Point2D], raster: &PixelSet) -> Vec<Pixel> {
    raster.iter().copied().filter(|px| ray_cast_contains(poly, &px.center())).collect()
}

// ---------------------------------------------------------------- matching

/// Vertices plus unit-step samples along every closed edge, first
/// occurrence kept.
pub fn oracle_samples(poly: &[Point2D]) -> Vec<Point2D> {
    let mut v = poly.to_vec();
    if v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    let n = v.len();
    let mut out: Vec<Point2D> = Vec::new();
    let mut add = |p: Point2D| {
        if !out.iter().any(|q| q.x.to_bits() == p.x.to_bits() && q.y.to_bits() == p.y.to_bits()) {
            out.push(p);
        }
    };
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        add(a);
        let len = (b.x - a.x).hypot(b.y - a.y);
        let steps = if len > 0.0 { len.ceil() as usize } else { 0 };
        for k in 1..steps {
            let t = k as f64 / len;
            add(pt(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
        }
    }
    out
}

/// Lowest index among the samples at minimal squared distance.
pub fn brute_nearest(samples: &[Point2D], q: &Point2D) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in samples.iter().enumerate() {
        let dx = q.x - s.x;
        let dy = q.y - s.y;
        let d2 = dx * dx + dy * dy;
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best
}

pub fn oracle_count(poly: &[Point2D], raster: &PixelSet, threshold: f64, mode: CountMode) -> usize {
    let samples = oracle_samples(poly);
    let mut matched_pixels = 0;
    let mut matched_samples = BTreeSet::new();
    for px in oracle_inside(poly, raster) {
        let Some((i, d2)) = brute_nearest(&samples, &px.center()) else { continue };
        if d2.sqrt() < threshold {
            matched_pixels += 1;
            matched_samples.insert(i);
        }
    }
    match mode {
        CountMode::MatchedPixels => matched_pixels,
        CountMode::UniqueBoundary => matched_samples.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleWeights {
    pub f: Vec<f64>,
    pub p_im: Vec<f64>,
    pub per_contour: Vec<(usize, f64)>,
}

/// Whole per-sketch pipeline with no spatial index and no shared state.
/// Every annotation here is assumed non-degenerate.
pub fn oracle_per_sketch(
    annotated: &AnnotatedSketch,
    epitome: &Epitome,
    parts: &CategoryPartList,
    params: &AnalysisParams,
) -> OracleWeights {
    let full = rasterize(&annotated.sketch, None);
    let epi = rasterize(&annotated.sketch, Some(&epitome.kept_stroke_ids));
    let part_index = |name: &str| parts.parts.iter().position(|p| p == name);

    let mut candidates = Vec::new();
    for (j, a) in annotated.annotations.iter().enumerate() {
        let n_full = oracle_inside(&a.contour, &full).len();
        if n_full == 0 {
            continue;
        }
        let n_epi = oracle_inside(&a.contour, &epi).len();
        if n_epi as f64 / n_full as f64 > params.epsilon {
            candidates.push(j);
        }
    }

    let m = parts.parts.len();
    let mut total = vec![0usize; m];
    let mut kept = vec![0usize; m];
    for a in &annotated.annotations {
        if let Some(s) = part_index(&a.part_name) {
            total[s] += 1;
        }
    }
    for &j in &candidates {
        if let Some(s) = part_index(&annotated.annotations[j].part_name) {
            kept[s] += 1;
        }
    }
    let p_im: Vec<f64> = (0..m).map(|s| if total[s] == 0 { 0.0 } else { kept[s] as f64 / total[s] as f64 }).collect();

    let mut f = vec![0.0; m];
    let mut per_contour = Vec::new();
    for &j in &candidates {
        let a = &annotated.annotations[j];
        let vf = oracle_count(&a.contour, &full, params.dist_threshold, params.count_mode);
        let w = if vf == 0 {
            0.0
        } else {
            oracle_count(&a.contour, &epi, params.dist_threshold, params.count_mode) as f64 / vf as f64
        };
        if let Some(s) = part_index(&a.part_name) {
            f[s] += p_im[s] * w;
        }
        per_contour.push((j, w));
    }
    OracleWeights { f, p_im, per_contour }
}

// ---------------------------------------------------------------- fixtures

pub fn signed_area2(poly: &[Point2D]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].x * poly[(i + 1) % n].y - poly[(i + 1) % n].x * poly[i].y).sum()
}

/// Star-shaped polygon around `center` with integer vertices. Often concave;
/// rounding can occasionally make it self-touch. Nonzero area.
pub fn star_polygon(rng: &mut impl Rng, center: (f64, f64), max_r: f64, vertices: usize) -> Vec<Point2D> {
    loop {
        let mut angles: Vec<f64> = (0..vertices).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let poly: Vec<Point2D> = angles
            .iter()
            .map(|&a| {
                let r = rng.random_range(1.0..=max_r);
                pt((center.0 + r * a.cos()).round().max(0.0), (center.1 + r * a.sin()).round().max(0.0))
            })
            .collect();
        let distinct: BTreeSet<(u64, u64)> = poly.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        if distinct.len() == poly.len() && signed_area2(&poly) != 0.0 {
            return poly;
        }
    }
}

/// Arbitrary integer polygon; may self-intersect.
pub fn random_polygon(rng: &mut impl Rng, extent: u32, vertices: usize) -> Vec<Point2D> {
    loop {
        let poly: Vec<Point2D> = (0..vertices)
            .map(|_| pt(rng.random_range(0..=extent) as f64, rng.random_range(0..=extent) as f64))
            .collect();
        if signed_area2(&poly) != 0.0 {
            return poly;
        }
    }
}

pub fn stroke(id: u32, temporal: u32, pts: Vec<Point2D>, width: u32) -> Stroke {
    Stroke { id, temporal_index: temporal, points: pts, width }
}

pub const MICRO_PARTS: [&str; 3] = ["wheel", "frame", "seat"];

pub fn micro_parts() -> CategoryPartList {
    CategoryPartList::new("micro", MICRO_PARTS.iter().map(|s| s.to_string()).collect()).unwrap()
}

/// Random sketch of `strokes` short polylines on a `size`×`size` canvas,
/// with `contours` annotations drawn from [`MICRO_PARTS`] (repeats allowed).
pub fn random_annotated(rng: &mut impl Rng, id: &str, size: u32, strokes: usize, contours: usize, max_seg: f64) -> AnnotatedSketch {
    let canvas = Canvas::new(size, size).unwrap();
    let hi = (size - 1) as f64;
    let mut temporal: Vec<u32> = (0..strokes as u32).collect();
    temporal.shuffle(rng);
    let strokes: Vec<Stroke> = (0..strokes)
        .map(|i| {
            let n = rng.random_range(2..=3);
            let mut p = pt(rng.random_range(0.0..=hi).round(), rng.random_range(0.0..=hi).round());
            let mut pts = vec![p];
            for _ in 1..n {
                let q = pt(
                    (p.x + rng.random_range(-max_seg..=max_seg)).clamp(0.0, hi),
                    (p.y + rng.random_range(-max_seg..=max_seg)).clamp(0.0, hi),
                );
                pts.push(q);
                p = q;
            }
            let width = if rng.random_bool(0.2) { 2 } else { 1 };
            stroke(i as u32 * 3 + 1, temporal[i], pts, width)
        })
        .collect();
    let annotations = (0..contours)
        .map(|_| {
            let k = rng.random_range(3..=6);
            let center = (rng.random_range(0.0..=hi), rng.random_range(0.0..=hi));
            PartAnnotation {
                part_name: MICRO_PARTS[rng.random_range(0..MICRO_PARTS.len())].to_string(),
                contour: star_polygon(rng, center, (size as f64 / 2.0).max(2.0), k),
            }
        })
        .collect();
    AnnotatedSketch {
        sketch: Sketch { category: "micro".into(), sketch_id: id.into(), canvas, strokes },
        annotations,
    }
}

pub fn random_subset(rng: &mut impl Rng, sketch: &Sketch) -> BTreeSet<u32> {
    sketch.strokes.iter().filter(|_| rng.random_bool(0.5)).map(|s| s.id).collect()
}

pub fn epitome_of(sketch: &Sketch, kept: BTreeSet<u32>) -> Epitome {
    Epitome { sketch_id: sketch.sketch_id.clone(), kept_stroke_ids: kept, ordering: StrokeOrdering::Temporal }
}

/// Random nested chain `E1 ⊆ E2 ⊆ S` from prefixes of a shuffled id list.
pub fn nested_chain(rng: &mut impl Rng, sketch: &Sketch) -> [BTreeSet<u32>; 3] {
    let mut ids: Vec<u32> = sketch.strokes.iter().map(|s| s.id).collect();
    ids.shuffle(rng);
    let n = ids.len();
    let b = rng.random_range(0..=n);
    let a = rng.random_range(0..=b);
    [ids[..a].iter().copied().collect(), ids[..b].iter().copied().collect(), ids.iter().copied().collect()]
}

// ---------------------------------------------------------------- table grammar

#[derive(Debug, PartialEq)]
pub struct TableRow {
    pub category: String,
    pub entries: Vec<(String, String)>,
}

/// Parses `category & part (w.www), part (w.www), ...`. Weights are kept as
/// their literal text so the three-decimal format can be checked.
pub fn parse_table_row(line: &str) -> Result<TableRow, String> {
    let (category, rest) = line.split_once(" & ").ok_or("missing \" & \" separator")?;
    if category.is_empty() || category.contains(' ') {
        return Err(format!("bad category {category:?}"));
    }
    let mut entries = Vec::new();
    if rest == "(no parts)" {
        return Ok(TableRow { category: category.into(), entries });
    }
    for item in rest.split(", ") {
        let (name, w) = item.rsplit_once(" (").ok_or_else(|| format!("bad entry {item:?}"))?;
        let w = w.strip_suffix(')').ok_or_else(|| format!("unterminated weight in {item:?}"))?;
        let b = w.as_bytes();
        let shape = b.len() == 5 && b[0].is_ascii_digit() && b[1] == b'.' && b[2..].iter().all(u8::is_ascii_digit);
        if !shape || name.is_empty() {
            return Err(format!("bad entry {item:?}"));
        }
        entries.push((name.to_string(), w.to_string()));
    }
    Ok(TableRow { category: category.into(), entries })
}
