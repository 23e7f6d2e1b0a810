//! Stroke-sequence orderings used to build and tag epitomes.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::model::{Epitome, Sketch, StrokeOrdering};

/// Human-readable statement of the `alternate` construction, recorded in
/// report metadata.
pub const ALTERNATE_RULE: &str =
    "interleave length-descending and reverse-temporal sequences, starting with the longest stroke, skipping ids already taken";

/// Returns every stroke id of `sketch` in the order given by `ordering`.
pub fn order_strokes(sketch: &Sketch, ordering: StrokeOrdering) -> Vec<u32> {
    match ordering {
        StrokeOrdering::Temporal => temporal(sketch),
        StrokeOrdering::Length => by_length(sketch),
        StrokeOrdering::Alternate => {
            let mut reversed = temporal(sketch);
            reversed.reverse();
            interleave(&by_length(sketch), &reversed)
        }
    }
}

fn temporal(sketch: &Sketch) -> Vec<u32> {
    let mut strokes: Vec<_> = sketch.strokes.iter().collect();
    strokes.sort_by_key(|s| s.temporal_index);
    strokes.into_iter().map(|s| s.id).collect()
}

fn by_length(sketch: &Sketch) -> Vec<u32> {
    let mut strokes: Vec<_> = sketch.strokes.iter().map(|s| (s.arc_length(), s.temporal_index, s.id)).collect();
    strokes.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    strokes.into_iter().map(|(_, _, id)| id).collect()
}

fn interleave(first: &[u32], second: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(first.len());
    let mut taken = HashSet::with_capacity(first.len());
    let (mut a, mut b) = (first.iter().peekable(), second.iter().peekable());
    let mut from_first = true;
    while a.peek().is_some() || b.peek().is_some() {
        let source = if from_first { &mut a } else { &mut b };
        if let Some(&id) = source.find(|id| !taken.contains(*id)) {
            taken.insert(id);
            out.push(id);
        }
        from_first = !from_first;
    }
    out
}

/// Keeps the first `ceil(keep_fraction * n)` strokes of the ordering.
pub fn prefix_epitome(sketch: &Sketch, ordering: StrokeOrdering, keep_fraction: f64) -> Result<Epitome> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidValue(format!("keep fraction must lie in (0, 1], got {keep_fraction}")));
    }
    let order = order_strokes(sketch, ordering);
    let keep = ((keep_fraction * order.len() as f64).ceil() as usize).min(order.len());
    Ok(Epitome {
        sketch_id: sketch.sketch_id.clone(),
        kept_stroke_ids: order[..keep].iter().copied().collect::<BTreeSet<_>>(),
        ordering,
    })
}
