//! On-disk dataset layout and the plain-text record formats.
//!
//! ```text
//! <root>/<category>/parts.txt                        one part name per line
//! <root>/<category>/sketches/<id>.strokes            canvas + one stroke per line
//! <root>/<category>/annotations/<id>.parts           one named contour per line
//! <root>/<category>/epitomes/<ordering>/<id>.keep    kept stroke ids
//! <root>/<category>/reference.{svg,png,jpg}          optional labeled reference image
//! ```
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Location, Result};
use crate::model::{
    AnnotatedSketch, Canvas, CategoryPartList, Epitome, PartAnnotation, Point2D, Sketch, Stroke, StrokeOrdering,
};

pub const PARTS_FILE: &str = "parts.txt";
pub const SKETCH_DIR: &str = "sketches";
pub const ANNOTATION_DIR: &str = "annotations";
pub const EPITOME_DIR: &str = "epitomes";
pub const STROKES_EXT: &str = "strokes";
pub const PARTS_EXT: &str = "parts";
pub const KEEP_EXT: &str = "keep";
pub const REFERENCE_STEM: &str = "reference";
pub const REFERENCE_EXTS: [&str; 4] = ["svg", "png", "jpg", "jpeg"];

/// One category directory, fully validated.
#[derive(Debug, Clone)]
pub struct CategoryData {
    pub dir: PathBuf,
    pub parts: CategoryPartList,
    /// Sketches that have an annotation file, sorted by id.
    pub sketches: Vec<AnnotatedSketch>,
    /// Sketches still waiting for annotation, sorted by id.
    pub pending: Vec<Sketch>,
    pub epitomes: BTreeMap<StrokeOrdering, BTreeMap<String, Epitome>>,
}

impl CategoryData {
    pub fn name(&self) -> &str {
        &self.parts.category
    }

    /// Every annotated sketch paired with its epitome under `ordering`.
    pub fn analysis_pairs(&self, ordering: StrokeOrdering) -> Result<Vec<(&AnnotatedSketch, &Epitome)>> {
        let epitomes = self.epitomes.get(&ordering);
        self.sketches
            .iter()
            .map(|a| {
                epitomes.and_then(|e| e.get(&a.sketch.sketch_id)).map(|e| (a, e)).ok_or_else(|| {
                    Error::invalid(
                        Location::file(epitome_path(&self.dir, ordering, &a.sketch.sketch_id)),
                        format!("annotated sketch \"{}\" has no {ordering} epitome", a.sketch.sketch_id),
                    )
                })
            })
            .collect()
    }

    pub fn find_sketch(&self, sketch_id: &str) -> Option<&Sketch> {
        self.sketches
            .iter()
            .map(|a| &a.sketch)
            .chain(self.pending.iter())
            .find(|s| s.sketch_id == sketch_id)
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub categories: Vec<CategoryData>,
}

pub fn sketch_path(category_dir: &Path, sketch_id: &str) -> PathBuf {
    category_dir.join(SKETCH_DIR).join(format!("{sketch_id}.{STROKES_EXT}"))
}

pub fn annotation_path(category_dir: &Path, sketch_id: &str) -> PathBuf {
    category_dir.join(ANNOTATION_DIR).join(format!("{sketch_id}.{PARTS_EXT}"))
}

pub fn epitome_path(category_dir: &Path, ordering: StrokeOrdering, sketch_id: &str) -> PathBuf {
    category_dir.join(EPITOME_DIR).join(ordering.as_str()).join(format!("{sketch_id}.{KEEP_EXT}"))
}

pub fn reference_image_path(category_dir: &Path) -> Option<PathBuf> {
    REFERENCE_EXTS
        .iter()
        .map(|ext| category_dir.join(format!("{REFERENCE_STEM}.{ext}")))
        .find(|p| p.is_file())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Records of a text file: trimmed, non-empty, non-comment lines with their
/// 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Ids of `<dir>/*.<ext>`, sorted.
fn file_stems(dir: &Path, ext: &str) -> Result<Vec<String>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some(ext) && path.is_file() {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push(stem.to_string());
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Ids of every sketch file in a category, sorted.
pub fn list_sketch_ids(category_dir: &Path) -> Result<Vec<String>> {
    file_stems(&category_dir.join(SKETCH_DIR), STROKES_EXT)
}

pub fn parse_parts(text: &str, category: &str, path: &Path) -> Result<CategoryPartList> {
    let parts = records(text).map(|(_, l)| l.to_string()).collect();
    CategoryPartList::new(category, parts).map_err(|e| Error::invalid(Location::file(path), e.to_string()))
}

pub fn format_parts(parts: &CategoryPartList) -> String {
    parts.parts.iter().map(|p| format!("{p}\n")).collect()
}

fn parse_point(token: &str, location: &Location) -> Result<Point2D> {
    let (x, y) = token
        .split_once(',')
        .ok_or_else(|| Error::parse(location.clone(), format!("expected x,y but found \"{token}\"")))?;
    let num = |v: &str| {
        v.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(location.clone(), format!("bad coordinate \"{v}\"")))
    };
    Ok(Point2D::new(num(x)?, num(y)?))
}

fn format_points(out: &mut String, points: &[Point2D]) {
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", p.x, p.y);
    }
}

/// Parses a `.strokes` file:
///
/// ```text
/// canvas 800 800
/// stroke <id> <temporal_index> <width> x,y x,y ...
/// ```
///
/// The `canvas` line is optional and defaults to `default_canvas`.
pub fn parse_strokes(text: &str, category: &str, sketch_id: &str, default_canvas: Canvas, path: &Path) -> Result<Sketch> {
    let mut canvas = None;
    let mut strokes = Vec::new();
    for (line, record) in records(text) {
        let loc = Location::line(path, line);
        let mut fields = record.split_whitespace();
        match fields.next() {
            Some("canvas") => {
                if canvas.is_some() || !strokes.is_empty() {
                    return Err(Error::parse(loc, "canvas must be declared once, before any stroke"));
                }
                let dims: Vec<u32> = fields
                    .map(|f| f.parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::parse(loc.clone(), "canvas expects two positive integers"))?;
                let [w, h] = dims[..] else {
                    return Err(Error::parse(loc, "canvas expects two positive integers"));
                };
                canvas = Some(Canvas::new(w, h).map_err(|e| Error::parse(loc, e.to_string()))?);
            }
            Some("stroke") => {
                let mut int = |what: &str| {
                    fields
                        .next()
                        .and_then(|f| f.parse::<u32>().ok())
                        .ok_or_else(|| Error::parse(loc.clone(), format!("stroke expects an integer {what}")))
                };
                let id = int("id")?;
                let temporal_index = int("temporal index")?;
                let width = int("width")?;
                let points = fields.map(|t| parse_point(t, &loc)).collect::<Result<Vec<_>>>()?;
                strokes.push((line, Stroke { id, temporal_index, points, width }));
            }
            Some(other) => return Err(Error::parse(loc, format!("unknown record \"{other}\""))),
            None => unreachable!("records() skips blank lines"),
        }
    }
    let sketch = Sketch {
        category: category.into(),
        sketch_id: sketch_id.into(),
        canvas: canvas.unwrap_or(default_canvas),
        strokes: strokes.iter().map(|(_, s)| s.clone()).collect(),
    };
    // Validate per stroke first so errors carry the offending line.
    for (line, stroke) in &strokes {
        let single = Sketch { strokes: vec![Stroke { temporal_index: 0, ..stroke.clone() }], ..sketch.clone() };
        single.validate(&Location::line(path, *line))?;
    }
    sketch.validate(&Location::file(path))?;
    Ok(sketch)
}

pub fn format_strokes(sketch: &Sketch) -> String {
    let mut out = format!("canvas {} {}\n", sketch.canvas.width, sketch.canvas.height);
    for s in &sketch.strokes {
        let _ = write!(out, "stroke {} {} {} ", s.id, s.temporal_index, s.width);
        format_points(&mut out, &s.points);
        out.push('\n');
    }
    out
}

/// Parses a `.parts` file: `<part name>: x,y x,y x,y ...` per line.
pub fn parse_annotations(text: &str, parts: &CategoryPartList, path: &Path) -> Result<Vec<PartAnnotation>> {
    records(text)
        .map(|(line, record)| {
            let loc = Location::line(path, line);
            let (name, points) = record
                .split_once(':')
                .ok_or_else(|| Error::parse(loc.clone(), "expected \"<part>: x,y x,y ...\""))?;
            let annotation = PartAnnotation {
                part_name: name.trim().to_string(),
                contour: points.split_whitespace().map(|t| parse_point(t, &loc)).collect::<Result<_>>()?,
            };
            annotation.check(parts).map_err(|fault| match fault {
                crate::model::AnnotationFault::UnknownPart => {
                    Error::UnknownPart { location: loc.clone(), part: annotation.part_name.clone() }
                }
                other => Error::invalid(loc.clone(), format!("contour rejected: {}", other.code())),
            })?;
            Ok(annotation)
        })
        .collect()
}

pub fn format_annotations(annotations: &[PartAnnotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        let _ = write!(out, "{}: ", a.part_name);
        format_points(&mut out, &a.contour);
        out.push('\n');
    }
    out
}

pub fn parse_keep(text: &str, path: &Path) -> Result<BTreeSet<u32>> {
    let mut ids = BTreeSet::new();
    for (line, record) in records(text) {
        for token in record.split_whitespace() {
            let id = token
                .parse::<u32>()
                .map_err(|_| Error::parse(Location::line(path, line), format!("bad stroke id \"{token}\"")))?;
            ids.insert(id);
        }
    }
    Ok(ids)
}

pub fn format_keep(epitome: &Epitome) -> String {
    let ids: Vec<String> = epitome.kept_stroke_ids.iter().map(u32::to_string).collect();
    format!("{}\n", ids.join(" "))
}

/// Writes `bytes` to `path` via a temporary file in the same directory and
/// an atomic rename, so readers see either the old or the new content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_parts(category_dir: &Path) -> Result<CategoryPartList> {
    let path = category_dir.join(PARTS_FILE);
    parse_parts(&read(&path)?, &category_name(category_dir)?, &path)
}

pub fn load_sketch(category_dir: &Path, sketch_id: &str, default_canvas: Canvas) -> Result<Sketch> {
    let path = sketch_path(category_dir, sketch_id);
    parse_strokes(&read(&path)?, &category_name(category_dir)?, sketch_id, default_canvas, &path)
}

/// Annotations of one sketch, or `None` when it has not been annotated yet.
pub fn load_annotations(category_dir: &Path, sketch_id: &str, parts: &CategoryPartList) -> Result<Option<Vec<PartAnnotation>>> {
    let path = annotation_path(category_dir, sketch_id);
    if !path.exists() {
        return Ok(None);
    }
    parse_annotations(&read(&path)?, parts, &path).map(Some)
}

fn category_name(dir: &Path) -> Result<String> {
    dir.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_string)
        .ok_or_else(|| Error::invalid(Location::file(dir), "category directory has no usable name"))
}

/// Loads and validates one category directory.
pub fn validate_dataset(category_dir: &Path, default_canvas: Canvas) -> Result<CategoryData> {
    let parts = load_parts(category_dir)?;

    let mut sketches = Vec::new();
    let mut pending = Vec::new();
    let mut by_id = HashMap::new();
    for id in file_stems(&category_dir.join(SKETCH_DIR), STROKES_EXT)? {
        let sketch = load_sketch(category_dir, &id, default_canvas)?;
        by_id.insert(id.clone(), sketch.clone());
        match load_annotations(category_dir, &id, &parts)? {
            Some(annotations) => sketches.push(AnnotatedSketch { sketch, annotations }),
            None => pending.push(sketch),
        }
    }
    for id in file_stems(&category_dir.join(ANNOTATION_DIR), PARTS_EXT)? {
        if !by_id.contains_key(&id) {
            return Err(Error::invalid(Location::file(annotation_path(category_dir, &id)), "annotation for unknown sketch"));
        }
    }

    let mut epitomes = BTreeMap::new();
    let epitome_root = category_dir.join(EPITOME_DIR);
    if epitome_root.is_dir() {
        for entry in fs::read_dir(&epitome_root).map_err(|e| Error::io(&epitome_root, e))? {
            let dir = entry.map_err(|e| Error::io(&epitome_root, e))?.path();
            if !dir.is_dir() {
                continue;
            }
            let name = dir.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let ordering: StrokeOrdering =
                name.parse().map_err(|e: Error| Error::invalid(Location::file(&dir), e.to_string()))?;
            let mut set = BTreeMap::new();
            for id in file_stems(&dir, KEEP_EXT)? {
                let path = epitome_path(category_dir, ordering, &id);
                let sketch = by_id
                    .get(&id)
                    .ok_or_else(|| Error::invalid(Location::file(&path), "epitome for unknown sketch"))?;
                let epitome = Epitome { sketch_id: id.clone(), kept_stroke_ids: parse_keep(&read(&path)?, &path)?, ordering };
                epitome.validate_against(sketch, &Location::file(&path))?;
                set.insert(id, epitome);
            }
            epitomes.insert(ordering, set);
        }
    }

    Ok(CategoryData { dir: category_dir.to_path_buf(), parts, sketches, pending, epitomes })
}

/// Category directories under `root` (those holding a parts list), sorted.
pub fn category_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() && path.join(PARTS_FILE).is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Loads every category under `root`. Sketch ids must be unique across the
/// whole dataset because the service addresses sketches by id alone.
pub fn load_dataset(root: &Path, default_canvas: Canvas) -> Result<Dataset> {
    let mut categories = Vec::new();
    let mut owners: HashMap<String, String> = HashMap::new();
    for dir in category_dirs(root)? {
        let data = validate_dataset(&dir, default_canvas)?;
        for s in data.sketches.iter().map(|a| &a.sketch).chain(&data.pending) {
            if let Some(prev) = owners.insert(s.sketch_id.clone(), data.name().to_string()) {
                return Err(Error::invalid(
                    Location::file(sketch_path(&dir, &s.sketch_id)),
                    format!("sketch id \"{}\" also used in category \"{prev}\"", s.sketch_id),
                ));
            }
        }
        categories.push(data);
    }
    if categories.is_empty() {
        return Err(Error::invalid(Location::file(root), "no category directories (with parts.txt) found"));
    }
    Ok(Dataset { root: root.to_path_buf(), categories })
}

/// Writes `data` under `<root>/<category>/` in the canonical text layout.
pub fn write_category(root: &Path, data: &CategoryData) -> Result<PathBuf> {
    let dir = root.join(data.name());
    write_atomic(&dir.join(PARTS_FILE), format_parts(&data.parts).as_bytes())?;
    for a in &data.sketches {
        write_atomic(&sketch_path(&dir, &a.sketch.sketch_id), format_strokes(&a.sketch).as_bytes())?;
        write_atomic(&annotation_path(&dir, &a.sketch.sketch_id), format_annotations(&a.annotations).as_bytes())?;
    }
    for s in &data.pending {
        write_atomic(&sketch_path(&dir, &s.sketch_id), format_strokes(s).as_bytes())?;
    }
    for (ordering, set) in &data.epitomes {
        fs::create_dir_all(dir.join(EPITOME_DIR).join(ordering.as_str())).map_err(|e| Error::io(&dir, e))?;
        for (id, e) in set {
            write_atomic(&epitome_path(&dir, *ordering, id), format_keep(e).as_bytes())?;
        }
    }
    Ok(dir)
}
