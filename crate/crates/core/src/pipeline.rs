//! End-to-end analysis run: load, score every category under each requested
//! ordering, and write reports, tables and word clouds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dataset::{load_dataset, write_atomic, Dataset};
use crate::error::{Error, Result};
use crate::importance::{category_report, Warning};
use crate::model::{AnalysisParams, Canvas, ImportanceReport, StrokeOrdering, DEFAULT_CANVAS};
use crate::render::{cloud_svg, layout_cloud, render_table, CloudStyle};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset_root: PathBuf,
    pub orderings: Vec<StrokeOrdering>,
    pub params: AnalysisParams,
    pub output_dir: PathBuf,
    /// Canvas assumed for sketch files that do not declare one.
    pub default_canvas: Canvas,
    pub cloud: CloudStyle,
    pub parallel: bool,
}

impl RunConfig {
    pub fn new(dataset_root: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            dataset_root: dataset_root.into(),
            orderings: StrokeOrdering::ALL.to_vec(),
            params: AnalysisParams::default(),
            output_dir: output_dir.into(),
            default_canvas: DEFAULT_CANVAS,
            cloud: CloudStyle::default(),
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.orderings.is_empty() {
            return Err(Error::InvalidValue("no stroke ordering requested".into()));
        }
        if !self.dataset_root.is_dir() {
            return Err(Error::InvalidValue(format!("dataset root {} is not a directory", self.dataset_root.display())));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    ordering: StrokeOrdering,
    reports: &'a [ImportanceReport],
    warnings: &'a [Warning],
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub reports: BTreeMap<StrokeOrdering, Vec<ImportanceReport>>,
    pub warnings: BTreeMap<StrokeOrdering, Vec<Warning>>,
    pub files: Vec<PathBuf>,
}

pub fn report_file_name(ordering: StrokeOrdering) -> String {
    format!("report_{ordering}.json")
}

pub fn table_file_name(ordering: StrokeOrdering) -> String {
    format!("table_{ordering}.txt")
}

pub fn cloud_file_name(category: &str, ordering: StrokeOrdering) -> String {
    let slug: String = category.chars().map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("cloud_{slug}_{ordering}.svg")
}

/// Scores every category of `dataset` under one ordering.
pub fn analyze_dataset(
    dataset: &Dataset,
    ordering: StrokeOrdering,
    params: &AnalysisParams,
    parallel: bool,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<ImportanceReport>> {
    dataset
        .categories
        .iter()
        .map(|c| category_report(&c.analysis_pairs(ordering)?, &c.parts, ordering, params, parallel, warnings))
        .collect()
}

pub fn cmd_analyze(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let dataset = load_dataset(&config.dataset_root, config.default_canvas)?;
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;

    let mut orderings = config.orderings.clone();
    orderings.sort();
    orderings.dedup();

    let mut out = RunOutput { reports: BTreeMap::new(), warnings: BTreeMap::new(), files: Vec::new() };
    for ordering in orderings {
        let mut warnings = Vec::new();
        let reports = analyze_dataset(&dataset, ordering, &config.params, config.parallel, &mut warnings)?;
        for w in &warnings {
            log::warn!("{ordering}: {w}");
        }

        let report_json = serde_json::to_string_pretty(&ReportFile { ordering, reports: &reports, warnings: &warnings })
            .expect("report types serialize");
        out.files.push(write(&config.output_dir, &report_file_name(ordering), (report_json + "\n").as_bytes())?);
        out.files.push(write(&config.output_dir, &table_file_name(ordering), render_table(&reports).as_bytes())?);
        for report in &reports {
            let layout = layout_cloud(report, &config.cloud)?;
            let name = cloud_file_name(&report.category, ordering);
            out.files.push(write(&config.output_dir, &name, cloud_svg(&layout).as_bytes())?);
        }
        out.reports.insert(ordering, reports);
        out.warnings.insert(ordering, warnings);
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, bytes)?;
    Ok(path)
}
