use std::fmt::Write as _;

use crate::model::ImportanceReport;

/// `category & part (w.www), part (w.www), ...` for one report. Zero-weight
/// parts are kept.
pub fn table_row(report: &ImportanceReport) -> String {
    if report.weights.is_empty() {
        return format!("{} & (no parts)", report.category);
    }
    let mut row = format!("{} & ", report.category);
    for (i, w) in report.weights.iter().enumerate() {
        if i > 0 {
            row.push_str(", ");
        }
        let _ = write!(row, "{} ({:.3})", w.part, w.weight);
    }
    row
}

/// One row per report, newline-terminated, in the given order.
pub fn render_table(reports: &[ImportanceReport]) -> String {
    reports.iter().map(|r| table_row(r) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::importance::build_report;
    use crate::model::{AnalysisParams, CategoryPartList, StrokeOrdering};

    fn report(category: &str, parts: &[(&str, f64)]) -> ImportanceReport {
        let list = CategoryPartList::new(category, parts.iter().map(|p| p.0.to_string()).collect()).unwrap();
        let acc: Vec<f64> = parts.iter().map(|p| p.1).collect();
        build_report(category, &list, &acc, StrokeOrdering::Temporal, &AnalysisParams::default(), 1, &mut Vec::new())
    }

    #[test]
    fn formats_three_decimals() {
        assert_eq!(table_row(&report("cow", &[("tail", 0.5), ("leg", 1.0)])), "cow & leg (1.000), tail (0.500)");
    }

    #[test]
    fn zero_weight_parts_are_rendered() {
        let row = table_row(&report("sheep", &[("leg", 2.0), ("nose", 0.0)]));
        assert!(row.ends_with("nose (0.000)"));
    }

    #[test]
    fn empty_report_row() {
        let mut r = report("tv", &[("screen", 1.0), ("stand", 1.0)]);
        r.weights.clear();
        assert_eq!(table_row(&r), "tv & (no parts)");
    }

    #[test]
    fn multiple_rows() {
        let t = render_table(&[report("a", &[("x", 1.0), ("y", 1.0)]), report("b", &[("x", 1.0), ("y", 3.0)])]);
        assert_eq!(t, "a & x (1.000), y (1.000)\nb & y (1.000), x (0.333)\n");
    }
}
