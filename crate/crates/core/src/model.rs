//! Domain types shared by every stage of the analysis.
//!
//! Everything here is plain data. Constructors and `validate` methods check
//! the structural invariants once, at load time; downstream code assumes
//! them.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};

/// Canvas used when a sketch file does not declare its own size.
pub const DEFAULT_CANVAS: Canvas = Canvas { width: 800, height: 800 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidValue(format!("canvas must be non-empty, got {width}x{height}")));
        }
        Ok(Self { width, height })
    }

    /// Points are addressed in pixel units with pixel centers on integer
    /// coordinates, so the valid range is `[0, width - 1] x [0, height - 1]`.
    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= (self.width - 1) as f64 && p.y <= (self.height - 1) as f64
    }
}

impl fmt::Display for Canvas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Canvas {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidValue(format!("canvas \"{s}\" is not WIDTHxHEIGHT")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidValue(format!("canvas \"{s}\" is not WIDTHxHEIGHT")))
        };
        Canvas::new(parse(w)?, parse(h)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub id: u32,
    /// 0-based drawing order.
    pub temporal_index: u32,
    pub points: Vec<Point2D>,
    /// Line width in pixels.
    pub width: u32,
}

impl Stroke {
    /// Polyline arc length: sum of Euclidean segment lengths.
    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sketch {
    pub category: String,
    pub sketch_id: String,
    pub canvas: Canvas,
    pub strokes: Vec<Stroke>,
}

impl Sketch {
    pub fn validate(&self, location: &Location) -> Result<()> {
        let mut ids = HashSet::with_capacity(self.strokes.len());
        let mut temporal = vec![false; self.strokes.len()];
        for stroke in &self.strokes {
            if !ids.insert(stroke.id) {
                return Err(Error::invalid(location.clone(), format!("duplicate stroke id {}", stroke.id)));
            }
            if stroke.points.len() < 2 {
                return Err(Error::invalid(
                    location.clone(),
                    format!("stroke {} has {} point(s), need at least 2", stroke.id, stroke.points.len()),
                ));
            }
            if stroke.width == 0 {
                return Err(Error::invalid(location.clone(), format!("stroke {} has zero width", stroke.id)));
            }
            match temporal.get_mut(stroke.temporal_index as usize) {
                Some(seen @ false) => *seen = true,
                _ => {
                    return Err(Error::invalid(
                        location.clone(),
                        format!(
                            "temporal indices must be a permutation of 0..{}; stroke {} has {}",
                            self.strokes.len(),
                            stroke.id,
                            stroke.temporal_index
                        ),
                    ))
                }
            }
            for p in &stroke.points {
                if !p.is_finite() {
                    return Err(Error::invalid(location.clone(), format!("stroke {} has a non-finite point", stroke.id)));
                }
                if !self.canvas.contains(p) {
                    return Err(Error::OutOfCanvas {
                        location: location.clone(),
                        x: p.x,
                        y: p.y,
                        width: self.canvas.width,
                        height: self.canvas.height,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn stroke_ids(&self) -> BTreeSet<u32> {
        self.strokes.iter().map(|s| s.id).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrokeOrdering {
    Temporal,
    Length,
    Alternate,
}

impl StrokeOrdering {
    pub const ALL: [StrokeOrdering; 3] = [StrokeOrdering::Temporal, StrokeOrdering::Length, StrokeOrdering::Alternate];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrokeOrdering::Temporal => "temporal",
            StrokeOrdering::Length => "length",
            StrokeOrdering::Alternate => "alternate",
        }
    }
}

impl fmt::Display for StrokeOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrokeOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "temporal" => Ok(StrokeOrdering::Temporal),
            "length" => Ok(StrokeOrdering::Length),
            "alternate" => Ok(StrokeOrdering::Alternate),
            other => Err(Error::InvalidValue(format!("unknown stroke ordering \"{other}\""))),
        }
    }
}

/// The strokes of one sketch retained by a sparsified representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epitome {
    pub sketch_id: String,
    pub kept_stroke_ids: BTreeSet<u32>,
    pub ordering: StrokeOrdering,
}

impl Epitome {
    /// The epitome that keeps every stroke.
    pub fn full(sketch: &Sketch, ordering: StrokeOrdering) -> Self {
        Self { sketch_id: sketch.sketch_id.clone(), kept_stroke_ids: sketch.stroke_ids(), ordering }
    }

    pub fn validate_against(&self, sketch: &Sketch, location: &Location) -> Result<()> {
        if self.sketch_id != sketch.sketch_id {
            return Err(Error::invalid(
                location.clone(),
                format!("epitome for \"{}\" paired with sketch \"{}\"", self.sketch_id, sketch.sketch_id),
            ));
        }
        let ids = sketch.stroke_ids();
        match self.kept_stroke_ids.iter().find(|id| !ids.contains(id)) {
            Some(&stroke_id) => Err(Error::MissingStroke { location: location.clone(), stroke_id }),
            None => Ok(()),
        }
    }
}

/// A named closed contour traced around one semantic part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartAnnotation {
    pub part_name: String,
    pub contour: Vec<Point2D>,
}

/// Why an annotation was rejected. The `code` strings are part of the
/// service API and must stay stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationFault {
    UnknownPart,
    TooFewPoints,
    NonFinite,
    ZeroArea,
}

impl AnnotationFault {
    pub fn code(&self) -> &'static str {
        match self {
            AnnotationFault::UnknownPart => "unknown part",
            AnnotationFault::TooFewPoints => "too few points",
            AnnotationFault::NonFinite => "non-finite coordinate",
            AnnotationFault::ZeroArea => "zero area",
        }
    }
}

impl PartAnnotation {
    pub fn check(&self, parts: &CategoryPartList) -> std::result::Result<(), AnnotationFault> {
        if self.part_name.is_empty() || parts.index_of(&self.part_name).is_none() {
            return Err(AnnotationFault::UnknownPart);
        }
        if self.contour.len() < 3 {
            return Err(AnnotationFault::TooFewPoints);
        }
        if self.contour.iter().any(|p| !p.is_finite()) {
            return Err(AnnotationFault::NonFinite);
        }
        if signed_area(&self.contour) == 0.0 {
            return Err(AnnotationFault::ZeroArea);
        }
        Ok(())
    }
}

/// Shoelace area of the polygon obtained by joining the last point back to
/// the first.
pub(crate) fn signed_area(points: &[Point2D]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSketch {
    pub sketch: Sketch,
    pub annotations: Vec<PartAnnotation>,
}

impl AnnotatedSketch {
    pub fn count_named(&self, part: &str) -> usize {
        self.annotations.iter().filter(|a| a.part_name == part).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryPartList {
    pub category: String,
    pub parts: Vec<String>,
}

impl CategoryPartList {
    pub fn new(category: impl Into<String>, parts: Vec<String>) -> Result<Self> {
        let category = category.into();
        let mut seen = HashSet::new();
        for part in &parts {
            if part.trim().is_empty() || part.trim() != part {
                return Err(Error::InvalidValue(format!("part name \"{part}\" is empty or padded")));
            }
            if part.contains([':', '\n', '\r']) {
                return Err(Error::InvalidValue(format!("part name \"{part}\" contains a reserved character")));
            }
            if !seen.insert(part.as_str()) {
                return Err(Error::InvalidValue(format!("duplicate part \"{part}\" in category \"{category}\"")));
            }
        }
        if parts.len() < 2 {
            return Err(Error::InvalidValue(format!(
                "category \"{category}\" lists {} part(s), need at least 2",
                parts.len()
            )));
        }
        Ok(Self { category, parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn index_of(&self, part: &str) -> Option<usize> {
        self.parts.iter().position(|p| p == part)
    }
}

/// Which quantity the boundary-matching step counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Distinct contour points that were the nearest match of some pixel.
    #[default]
    UniqueBoundary,
    /// Stroke pixels whose nearest contour point is close enough.
    MatchedPixels,
}

impl CountMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMode::UniqueBoundary => "unique_boundary",
            CountMode::MatchedPixels => "matched_pixels",
        }
    }
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "unique_boundary" => Ok(CountMode::UniqueBoundary),
            "matched_pixels" => Ok(CountMode::MatchedPixels),
            other => Err(Error::InvalidValue(format!("unknown count mode \"{other}\""))),
        }
    }
}

/// How accumulated category weights are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by the largest entry, so the dominant part reads 1.000.
    #[default]
    Max,
    /// Divide by the total, giving a probability distribution.
    Sum,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Max => "max",
            Normalization::Sum => "sum",
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Normalization::Max),
            "sum" => Ok(Normalization::Sum),
            other => Err(Error::InvalidValue(format!("unknown normalization \"{other}\""))),
        }
    }
}

/// Thresholds and switches for one analysis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    /// Minimum epitome/full pixel ratio for a contour to become a candidate.
    pub epsilon: f64,
    /// Pixel-to-contour distance below which a match counts.
    pub dist_threshold: f64,
    pub count_mode: CountMode,
    pub normalization: Normalization,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            dist_threshold: 3.0,
            count_mode: CountMode::UniqueBoundary,
            normalization: Normalization::Max,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidValue(format!("epsilon must lie in [0, 1), got {}", self.epsilon)));
        }
        if !(self.dist_threshold > 0.0 && self.dist_threshold.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "distance threshold must be positive, got {}",
                self.dist_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartWeight {
    pub part: String,
    pub weight: f64,
}

/// Settings that produced a report, carried alongside the weights so that
/// results stay comparable across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub epsilon: f64,
    pub dist_threshold: f64,
    pub count_mode: CountMode,
    pub normalization: Normalization,
    pub ordering: StrokeOrdering,
    pub sketch_count: usize,
    /// Construction rule behind the `alternate` ordering.
    pub alternate_rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub category: String,
    pub ordering: StrokeOrdering,
    /// Sorted by weight descending, ties by part name.
    pub weights: Vec<PartWeight>,
    pub sketch_count: usize,
    pub metadata: ReportMetadata,
}

impl ImportanceReport {
    pub fn weight_of(&self, part: &str) -> Option<f64> {
        self.weights.iter().find(|w| w.part == part).map(|w| w.weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts() -> CategoryPartList {
        CategoryPartList::new("bicycle", vec!["wheel".into(), "frame".into()]).unwrap()
    }

    fn stroke(id: u32, t: u32, pts: &[(f64, f64)]) -> Stroke {
        Stroke { id, temporal_index: t, points: pts.iter().map(|&(x, y)| Point2D::new(x, y)).collect(), width: 1 }
    }

    #[test]
    fn part_list_needs_two_unique_parts() {
        assert!(CategoryPartList::new("tv", vec!["screen".into()]).is_err());
        assert!(CategoryPartList::new("x", vec!["a".into(), "a".into()]).is_err());
        assert!(CategoryPartList::new("x", vec!["a".into(), "b:c".into()]).is_err());
        assert_eq!(parts().index_of("frame"), Some(1));
    }

    #[test]
    fn temporal_indices_must_be_a_permutation() {
        let loc = Location::file("s.strokes");
        let mut sketch = Sketch {
            category: "bicycle".into(),
            sketch_id: "s".into(),
            canvas: Canvas::new(10, 10).unwrap(),
            strokes: vec![stroke(0, 0, &[(0.0, 0.0), (1.0, 1.0)]), stroke(1, 2, &[(0.0, 0.0), (1.0, 1.0)])],
        };
        assert!(sketch.validate(&loc).is_err());
        sketch.strokes[1].temporal_index = 1;
        sketch.validate(&loc).unwrap();
    }

    #[test]
    fn out_of_canvas_point_is_reported() {
        let sketch = Sketch {
            category: "c".into(),
            sketch_id: "s".into(),
            canvas: Canvas::new(10, 10).unwrap(),
            strokes: vec![stroke(0, 0, &[(0.0, 0.0), (10.0, 1.0)])],
        };
        assert!(matches!(sketch.validate(&Location::file("s")), Err(Error::OutOfCanvas { .. })));
    }

    #[test]
    fn epitome_subset_check() {
        let sketch = Sketch {
            category: "c".into(),
            sketch_id: "s".into(),
            canvas: DEFAULT_CANVAS,
            strokes: vec![stroke(3, 0, &[(0.0, 0.0), (1.0, 0.0)])],
        };
        let full = Epitome::full(&sketch, StrokeOrdering::Length);
        full.validate_against(&sketch, &Location::file("k")).unwrap();
        let bad = Epitome { kept_stroke_ids: [3, 4].into(), ..full };
        assert!(matches!(
            bad.validate_against(&sketch, &Location::file("k")),
            Err(Error::MissingStroke { stroke_id: 4, .. })
        ));
    }

    #[test]
    fn annotation_faults() {
        let p = parts();
        let square = vec![Point2D::new(0.0, 0.0), Point2D::new(4.0, 0.0), Point2D::new(4.0, 4.0), Point2D::new(0.0, 4.0)];
        let ok = PartAnnotation { part_name: "wheel".into(), contour: square.clone() };
        assert_eq!(ok.check(&p), Ok(()));
        let rotor = PartAnnotation { part_name: "rotor".into(), contour: square.clone() };
        assert_eq!(rotor.check(&p), Err(AnnotationFault::UnknownPart));
        let short = PartAnnotation { part_name: "wheel".into(), contour: square[..2].to_vec() };
        assert_eq!(short.check(&p), Err(AnnotationFault::TooFewPoints));
        let flat = PartAnnotation {
            part_name: "wheel".into(),
            contour: vec![Point2D::new(0.0, 0.0), Point2D::new(1.0, 1.0), Point2D::new(2.0, 2.0)],
        };
        assert_eq!(flat.check(&p), Err(AnnotationFault::ZeroArea));
    }

    #[test]
    fn canvas_parses() {
        assert_eq!("640x480".parse::<Canvas>().unwrap(), Canvas { width: 640, height: 480 });
        assert!("640".parse::<Canvas>().is_err());
        assert!("0x4".parse::<Canvas>().is_err());
    }
}
