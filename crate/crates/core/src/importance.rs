//! Part-importance scoring.
//!
//! Per sketch, each annotated contour is first screened by how many of its
//! enclosed full-sketch stroke pixels survive in the epitome (candidate
//! contours). Surviving contours contribute a coarse factor (fraction of a
//! part's contours that survive) times a fine-grained factor (how many
//! contour points are still "hugged" by epitome pixels relative to the full
//! sketch). Category reports sum these per-sketch vectors and normalize.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{count_inside, rasterize, BoundaryIndex, ContourPolygon, PixelSet};
use crate::model::{
    AnalysisParams, AnnotatedSketch, CategoryPartList, Epitome, ImportanceReport, Normalization, PartWeight,
    ReportMetadata, StrokeOrdering,
};
use crate::ordering::ALTERNATE_RULE;

/// A zero denominator or otherwise degenerate record that was skipped
/// rather than aborting the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The contour encloses no full-sketch stroke pixels.
    EmptyContour { sketch_id: String, annotation: usize },
    /// No full-sketch pixel hugs the contour boundary.
    NoBoundaryMatches { sketch_id: String, annotation: usize },
    /// The contour could not be turned into a polygon.
    DegenerateContour { sketch_id: String, annotation: usize },
    /// Every accumulated weight in the category is zero.
    AllWeightsZero { category: String },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::EmptyContour { sketch_id, annotation } => {
                write!(f, "{sketch_id}: annotation {annotation} encloses no stroke pixels; skipped")
            }
            Warning::NoBoundaryMatches { sketch_id, annotation } => {
                write!(f, "{sketch_id}: annotation {annotation} has no boundary matches; weight 0")
            }
            Warning::DegenerateContour { sketch_id, annotation } => {
                write!(f, "{sketch_id}: annotation {annotation} is degenerate; skipped")
            }
            Warning::AllWeightsZero { category } => write!(f, "{category}: all part weights are zero"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateContour {
    pub annotation_index: usize,
    pub n_full: usize,
    pub n_epi: usize,
    pub membership_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourWeight {
    pub annotation_index: usize,
    pub w_part: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerSketchWeights {
    pub sketch_id: String,
    /// Part-wise importance, indexed like the category part list.
    pub f: Vec<f64>,
    /// Coarse factor per part.
    pub p_im: Vec<f64>,
    pub per_contour: Vec<ContourWeight>,
}

/// Rasters and contour indices for one (sketch, epitome) pair, computed once
/// and shared by every step.
pub struct SketchContext<'a> {
    annotated: &'a AnnotatedSketch,
    full: PixelSet,
    epitome: PixelSet,
    contours: Vec<Option<BoundaryIndex>>,
}

impl<'a> SketchContext<'a> {
    pub fn new(annotated: &'a AnnotatedSketch, epitome: &Epitome) -> Self {
        let sketch = &annotated.sketch;
        let contours = annotated
            .annotations
            .iter()
            .map(|a| ContourPolygon::new(a.contour.clone()).ok().map(BoundaryIndex::new))
            .collect();
        Self {
            annotated,
            full: rasterize(sketch, None),
            epitome: rasterize(sketch, Some(&epitome.kept_stroke_ids)),
            contours,
        }
    }

    pub fn full_raster(&self) -> &PixelSet {
        &self.full
    }

    pub fn epitome_raster(&self) -> &PixelSet {
        &self.epitome
    }

    fn sketch_id(&self) -> &str {
        &self.annotated.sketch.sketch_id
    }

    /// Contours whose epitome/full enclosed-pixel ratio exceeds `epsilon`.
    /// Same-named contours are screened independently.
    pub fn candidates(&self, epsilon: f64, warnings: &mut Vec<Warning>) -> Vec<CandidateContour> {
        let mut out = Vec::new();
        for (annotation_index, contour) in self.contours.iter().enumerate() {
            let Some(index) = contour else {
                warnings.push(Warning::DegenerateContour { sketch_id: self.sketch_id().into(), annotation: annotation_index });
                continue;
            };
            let n_full = count_inside(index.contour(), &self.full);
            if n_full == 0 {
                warnings.push(Warning::EmptyContour { sketch_id: self.sketch_id().into(), annotation: annotation_index });
                continue;
            }
            let n_epi = count_inside(index.contour(), &self.epitome);
            let membership_ratio = n_epi as f64 / n_full as f64;
            if membership_ratio > epsilon {
                out.push(CandidateContour { annotation_index, n_full, n_epi, membership_ratio });
            }
        }
        out
    }

    /// `n_valid_epi / n_valid_full` for one candidate; 0 with a warning when
    /// the full sketch has no valid matches.
    pub fn fine_grained_weight(&self, candidate: &CandidateContour, params: &AnalysisParams, warnings: &mut Vec<Warning>) -> f64 {
        let Some(index) = &self.contours[candidate.annotation_index] else {
            return 0.0;
        };
        let n_valid_full = index.count(&self.full, params.dist_threshold, params.count_mode);
        if n_valid_full == 0 {
            warnings.push(Warning::NoBoundaryMatches {
                sketch_id: self.sketch_id().into(),
                annotation: candidate.annotation_index,
            });
            return 0.0;
        }
        let n_valid_epi = index.count(&self.epitome, params.dist_threshold, params.count_mode);
        n_valid_epi as f64 / n_valid_full as f64
    }

    /// Accumulates `p_im[s] * w_part` over every candidate contour of part
    /// `s`. This single loop covers both the per-sketch statistics pass and
    /// the per-candidate analysis step, which perform the same accumulation.
    pub fn weights(&self, parts: &CategoryPartList, params: &AnalysisParams, warnings: &mut Vec<Warning>) -> PerSketchWeights {
        let candidates = self.candidates(params.epsilon, warnings);
        let p_im = coarse_importance(self.annotated, &candidates, parts);
        let mut f = vec![0.0; parts.len()];
        let mut per_contour = Vec::with_capacity(candidates.len());
        for candidate in &candidates {
            let w_part = self.fine_grained_weight(candidate, params, warnings);
            let name = &self.annotated.annotations[candidate.annotation_index].part_name;
            if let Some(s) = parts.index_of(name) {
                f[s] += p_im[s] * w_part;
            }
            per_contour.push(ContourWeight { annotation_index: candidate.annotation_index, w_part });
        }
        PerSketchWeights { sketch_id: self.sketch_id().into(), f, p_im, per_contour }
    }
}

pub fn get_candidate_contours(
    annotated: &AnnotatedSketch,
    epitome: &Epitome,
    epsilon: f64,
    warnings: &mut Vec<Warning>,
) -> Vec<CandidateContour> {
    SketchContext::new(annotated, epitome).candidates(epsilon, warnings)
}

/// Fraction of each part's annotated contours that became candidates. Parts
/// without annotations in this sketch get 0.
pub fn coarse_importance(annotated: &AnnotatedSketch, candidates: &[CandidateContour], parts: &CategoryPartList) -> Vec<f64> {
    let mut total = vec![0usize; parts.len()];
    let mut kept = vec![0usize; parts.len()];
    for a in &annotated.annotations {
        if let Some(s) = parts.index_of(&a.part_name) {
            total[s] += 1;
        }
    }
    for c in candidates {
        if let Some(s) = parts.index_of(&annotated.annotations[c.annotation_index].part_name) {
            kept[s] += 1;
        }
    }
    total.iter().zip(&kept).map(|(&t, &k)| if t == 0 { 0.0 } else { k as f64 / t as f64 }).collect()
}

pub fn fine_grained_weight(
    annotated: &AnnotatedSketch,
    epitome: &Epitome,
    candidate: &CandidateContour,
    params: &AnalysisParams,
    warnings: &mut Vec<Warning>,
) -> f64 {
    SketchContext::new(annotated, epitome).fine_grained_weight(candidate, params, warnings)
}

pub fn per_sketch_weights(
    annotated: &AnnotatedSketch,
    epitome: &Epitome,
    parts: &CategoryPartList,
    params: &AnalysisParams,
    warnings: &mut Vec<Warning>,
) -> PerSketchWeights {
    SketchContext::new(annotated, epitome).weights(parts, params, warnings)
}

/// Scales accumulated weights, sorts them (descending, ties by name) and
/// attaches run metadata.
pub fn build_report(
    category: &str,
    parts: &CategoryPartList,
    accumulated: &[f64],
    ordering: StrokeOrdering,
    params: &AnalysisParams,
    sketch_count: usize,
    warnings: &mut Vec<Warning>,
) -> ImportanceReport {
    let scale = match params.normalization {
        Normalization::Max => accumulated.iter().copied().fold(0.0, f64::max),
        Normalization::Sum => accumulated.iter().sum(),
    };
    if scale <= 0.0 {
        warnings.push(Warning::AllWeightsZero { category: category.into() });
    }
    let mut weights: Vec<PartWeight> = parts
        .parts
        .iter()
        .zip(accumulated)
        .map(|(part, &w)| PartWeight { part: part.clone(), weight: if scale > 0.0 { w / scale } else { 0.0 } })
        .collect();
    weights.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.part.cmp(&b.part)));
    ImportanceReport {
        category: category.into(),
        ordering,
        weights,
        sketch_count,
        metadata: ReportMetadata {
            epsilon: params.epsilon,
            dist_threshold: params.dist_threshold,
            count_mode: params.count_mode,
            normalization: params.normalization,
            ordering,
            sketch_count,
            alternate_rule: ALTERNATE_RULE.into(),
        },
    }
}

/// Category-level importance report.
///
/// Per-sketch vectors may be computed in parallel; they are always summed in
/// input order so parallel and sequential runs agree bit for bit.
pub fn category_report(
    dataset: &[(&AnnotatedSketch, &Epitome)],
    parts: &CategoryPartList,
    ordering: StrokeOrdering,
    params: &AnalysisParams,
    parallel: bool,
    warnings: &mut Vec<Warning>,
) -> Result<ImportanceReport> {
    params.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset(parts.category.clone()));
    }
    let run = |(annotated, epitome): &(&AnnotatedSketch, &Epitome)| {
        let mut local = Vec::new();
        let w = per_sketch_weights(annotated, epitome, parts, params, &mut local);
        (w, local)
    };
    let per_sketch: Vec<(PerSketchWeights, Vec<Warning>)> =
        if parallel { dataset.par_iter().map(run).collect() } else { dataset.iter().map(run).collect() };

    let mut accumulated = vec![0.0; parts.len()];
    for (w, local) in per_sketch {
        for (acc, v) in accumulated.iter_mut().zip(&w.f) {
            *acc += v;
        }
        warnings.extend(local);
    }
    Ok(build_report(&parts.category, parts, &accumulated, ordering, params, dataset.len(), warnings))
}
