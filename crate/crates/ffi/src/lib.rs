//! C ABI over the `sketchparts` library.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every entry point returns an [`SpStatus`];
//! on failure a description is available from [`sp_last_error_message`] on
//! the same thread. Strings returned through out-parameters are allocated by
//! the library and must be released with [`sp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sketchparts::dataset::{load_dataset, parse_strokes, Dataset};
use sketchparts::importance::{category_report, Warning};
use sketchparts::model::{
    AnalysisParams, CountMode, ImportanceReport, Normalization, StrokeOrdering, DEFAULT_CANVAS,
};
use sketchparts::ordering::order_strokes;
use sketchparts::render::table_row;
use sketchparts::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    EmptyDataset = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpOrdering {
    Temporal = 0,
    Length = 1,
    Alternate = 2,
}

impl From<SpOrdering> for StrokeOrdering {
    fn from(o: SpOrdering) -> Self {
        match o {
            SpOrdering::Temporal => StrokeOrdering::Temporal,
            SpOrdering::Length => StrokeOrdering::Length,
            SpOrdering::Alternate => StrokeOrdering::Alternate,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpCountMode {
    UniqueBoundary = 0,
    MatchedPixels = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpNormalization {
    Max = 0,
    Sum = 1,
}

/// Analysis parameters. Obtain defaults from [`sp_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpParams {
    pub epsilon: f64,
    pub dist_threshold: f64,
    pub count_mode: SpCountMode,
    pub normalization: SpNormalization,
}

impl From<SpParams> for AnalysisParams {
    fn from(p: SpParams) -> Self {
        AnalysisParams {
            epsilon: p.epsilon,
            dist_threshold: p.dist_threshold,
            count_mode: match p.count_mode {
                SpCountMode::UniqueBoundary => CountMode::UniqueBoundary,
                SpCountMode::MatchedPixels => CountMode::MatchedPixels,
            },
            normalization: match p.normalization {
                SpNormalization::Max => Normalization::Max,
                SpNormalization::Sum => Normalization::Sum,
            },
        }
    }
}

/// A loaded and validated dataset.
pub struct SpDataset {
    inner: Dataset,
}

/// One category's importance report plus the warnings raised computing it.
pub struct SpReport {
    report: ImportanceReport,
    warnings: Vec<Warning>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(SpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => SpStatus::Io,
            Error::Parse { .. } => SpStatus::Parse,
            Error::EmptyDataset(_) => SpStatus::EmptyDataset,
            _ => SpStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(body: impl FnOnce() -> FfiResult<()>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SpStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            SpStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    // SAFETY: the caller promises `p` is null or points to a live `T`.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(SpStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    // SAFETY: the caller promises `p` is null or writable.
    unsafe { p.as_mut() }.ok_or_else(|| Failure(SpStatus::NullPointer, format!("{what} is null")))
}

fn c_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(SpStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and NUL-terminated per the contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(SpStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn owned_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

fn index_check(index: usize, len: usize, what: &str) -> FfiResult<()> {
    if index < len {
        Ok(())
    } else {
        Err(Failure(SpStatus::OutOfRange, format!("{what} index {index} out of range (len {len})")))
    }
}

/// Message for the most recent failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[no_mangle]
pub extern "C" fn sp_params_default() -> SpParams {
    let d = AnalysisParams::default();
    SpParams {
        epsilon: d.epsilon,
        dist_threshold: d.dist_threshold,
        count_mode: match d.count_mode {
            CountMode::UniqueBoundary => SpCountMode::UniqueBoundary,
            CountMode::MatchedPixels => SpCountMode::MatchedPixels,
        },
        normalization: match d.normalization {
            Normalization::Max => SpNormalization::Max,
            Normalization::Sum => SpNormalization::Sum,
        },
    }
}

/// Loads and validates the dataset rooted at `root`.
///
/// # Safety
/// `root` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_load(root: *const c_char, out: *mut *mut SpDataset) -> SpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let root = c_str(root, "root")?;
        let inner = load_dataset(Path::new(root), DEFAULT_CANVAS)?;
        *out = Box::into_raw(Box::new(SpDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be NULL or a handle from [`sp_dataset_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_free(dataset: *mut SpDataset) {
    if !dataset.is_null() {
        drop(unsafe { Box::from_raw(dataset) });
    }
}

/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_category_count(dataset: *const SpDataset, out: *mut usize) -> SpStatus {
    guard(|| {
        let dataset = non_null(dataset, "dataset")?;
        *out_ptr(out, "out")? = dataset.inner.categories.len();
        Ok(())
    })
}

/// Writes a newly allocated copy of the category name to `out`.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_category_name(
    dataset: *const SpDataset,
    index: usize,
    out: *mut *mut c_char,
) -> SpStatus {
    guard(|| {
        let dataset = non_null(dataset, "dataset")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let categories = &dataset.inner.categories;
        index_check(index, categories.len(), "category")?;
        *out = owned_c_string(categories[index].name());
        Ok(())
    })
}

/// Scores one category. `params` may be NULL for the defaults.
///
/// # Safety
/// `dataset` must be a live handle; `params` NULL or readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_analyze(
    dataset: *const SpDataset,
    category_index: usize,
    ordering: SpOrdering,
    params: *const SpParams,
    out: *mut *mut SpReport,
) -> SpStatus {
    guard(|| {
        let dataset = non_null(dataset, "dataset")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let params: AnalysisParams = if params.is_null() {
            AnalysisParams::default()
        } else {
            (*non_null(params, "params")?).into()
        };
        params.validate()?;
        let categories = &dataset.inner.categories;
        index_check(category_index, categories.len(), "category")?;
        let category = &categories[category_index];
        let ordering = StrokeOrdering::from(ordering);
        let mut warnings = Vec::new();
        let report =
            category_report(&category.analysis_pairs(ordering)?, &category.parts, ordering, &params, true, &mut warnings)?;
        *out = Box::into_raw(Box::new(SpReport { report, warnings }));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle from [`sp_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_report_free(report: *mut SpReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Number of parts in the report, in descending weight order.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_len(report: *const SpReport, out: *mut usize) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        *out_ptr(out, "out")? = report.report.weights.len();
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_part_name(report: *const SpReport, index: usize, out: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let weights = &report.report.weights;
        index_check(index, weights.len(), "part")?;
        *out = owned_c_string(&weights[index].part);
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_weight(report: *const SpReport, index: usize, out: *mut f64) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        let weights = &report.report.weights;
        index_check(index, weights.len(), "part")?;
        *out_ptr(out, "out")? = weights[index].weight;
        Ok(())
    })
}

/// The report formatted as one table row, without a trailing newline.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_table_row(report: *const SpReport, out: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        let out = out_ptr(out, "out")?;
        *out = owned_c_string(&table_row(&report.report));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_warning_count(report: *const SpReport, out: *mut usize) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        *out_ptr(out, "out")? = report.warnings.len();
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_report_warning(report: *const SpReport, index: usize, out: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let report = non_null(report, "report")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        index_check(index, report.warnings.len(), "warning")?;
        *out = owned_c_string(&report.warnings[index].to_string());
        Ok(())
    })
}

/// Orders the strokes of one sketch file. The full length is always written
/// to `out_len`; if it exceeds `capacity` nothing is copied and
/// `SP_STATUS_OUT_OF_RANGE` is returned, so callers can size a buffer with a
/// first call passing `capacity = 0`.
///
/// # Safety
/// `path` must be a NUL-terminated string, `out_ids` valid for `capacity`
/// writes (or NULL when `capacity` is 0), and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_order_strokes_file(
    path: *const c_char,
    ordering: SpOrdering,
    out_ids: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> SpStatus {
    guard(|| {
        let out_len = out_ptr(out_len, "out_len")?;
        let path = Path::new(c_str(path, "path")?);
        let text = std::fs::read_to_string(path).map_err(|e| Failure(SpStatus::Io, format!("{}: {e}", path.display())))?;
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sketch");
        let sketch = parse_strokes(&text, "", id, DEFAULT_CANVAS, path)?;
        let ids = order_strokes(&sketch, ordering.into());
        *out_len = ids.len();
        if ids.len() > capacity {
            return Err(Failure(
                SpStatus::OutOfRange,
                format!("buffer holds {capacity} ids, {} needed", ids.len()),
            ));
        }
        if !ids.is_empty() {
            if out_ids.is_null() {
                return Err(Failure(SpStatus::NullPointer, "out_ids is null".into()));
            }
            // SAFETY: `out_ids` is valid for `capacity >= ids.len()` writes.
            unsafe { ptr::copy_nonoverlapping(ids.as_ptr(), out_ids, ids.len()) };
        }
        Ok(())
    })
}
