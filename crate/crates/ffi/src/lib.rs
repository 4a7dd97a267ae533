//! C ABI over the revaudit core: corpus loading, fitted-model prediction and
//! the fairness and linkage measures on plain arrays.
//!
//! Every function returns an [`RaStatus`]. On failure the message is kept
//! per thread and can be read with [`ra_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nalgebra::DMatrix;
use revaudit::config::CorpusConfig;
use revaudit::corpus::{load_corpus, Corpus, CorpusPaths};
use revaudit::fairness::{auc_gap, cdf_max_disparity, dp_gap, eo_gap, EoMode, Gap, GroupedOutcome};
use revaudit::linkage::normalized_levenshtein;
use revaudit::stats::{roc_auc, LogisticModel};
use revaudit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Undefined = 6,
    Numeric = 7,
    Panic = 8,
}

/// A loaded, validated corpus.
pub struct RaCorpus {
    inner: Corpus,
}

/// A fitted logistic model.
pub struct RaModel {
    inner: LogisticModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RaStatus {
    match e {
        Error::Stage { source, .. } => status_of(source),
        Error::Io { .. } => RaStatus::Io,
        Error::Malformed { .. } | Error::Parse(_) => RaStatus::Parse,
        Error::Referential { .. }
        | Error::Invalid(_)
        | Error::ValidationFailed { .. }
        | Error::DanglingReference(_) => RaStatus::Validation,
        Error::UndefinedStatistic(_)
        | Error::UndefinedDisparity(_)
        | Error::UndefinedConditional(_)
        | Error::UndefinedAuc { .. } => RaStatus::Undefined,
        Error::NonConvergence { .. } | Error::IllPosed(_) | Error::Clustering(_) => RaStatus::Numeric,
        Error::DegenerateInput(_)
        | Error::DimensionMismatch { .. }
        | Error::Assembly { .. }
        | Error::ColumnMismatch(_)
        | Error::Config(_)
        | Error::UnknownFigure(_) => RaStatus::InvalidArgument,
    }
}

struct Fail(RaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RaStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RaStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Loads the tables in `dir` (standard file names), using `dir/corpus.cfg`
/// when present.
///
/// # Safety
/// `dir` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_corpus_load(dir: *const c_char, out: *mut *mut RaCorpus) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = Path::new(str_arg(dir, "dir")?);
        let cfg_path = dir.join("corpus.cfg");
        let cfg = if cfg_path.exists() { CorpusConfig::read(&cfg_path)? } else { CorpusConfig::default() };
        let corpus = load_corpus(&CorpusPaths::in_dir(dir), &cfg)?;
        out.write(Box::into_raw(Box::new(RaCorpus { inner: corpus })));
        Ok(())
    })
}

/// # Safety
/// `corpus` must come from [`ra_corpus_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ra_corpus_free(corpus: *mut RaCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// # Safety
/// `corpus` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_corpus_submission_count(corpus: *const RaCorpus, out: *mut usize) -> RaStatus {
    guard(|| {
        let c = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        write_out(out, c.inner.submissions().len(), "out")
    })
}

/// # Safety
/// `corpus` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_corpus_review_count(corpus: *const RaCorpus, out: *mut usize) -> RaStatus {
    guard(|| {
        let c = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        write_out(out, c.inner.reviews().len(), "out")
    })
}

/// Fails with `RA_STATUS_UNDEFINED` on an empty corpus.
///
/// # Safety
/// `corpus` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_corpus_reviews_per_submission(corpus: *const RaCorpus, out: *mut f64) -> RaStatus {
    guard(|| {
        let c = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        write_out(out, c.inner.reviews_per_submission()?, "out")
    })
}

/// Reads a model written by the `audit` stage.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_model_load(path: *const c_char, out: *mut *mut RaModel) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = LogisticModel::load(Path::new(str_arg(path, "path")?))?;
        out.write(Box::into_raw(Box::new(RaModel { inner: model })));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`ra_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ra_model_free(model: *mut RaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_model_feature_count(model: *const RaModel, out: *mut usize) -> RaStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        write_out(out, m.inner.coefficients.len(), "out")
    })
}

/// Acceptance probabilities for a row-major `n_rows x n_cols` matrix of
/// already standardized features.
///
/// # Safety
/// `x` must hold `n_rows * n_cols` values and `out` room for `n_rows`.
#[no_mangle]
pub unsafe extern "C" fn ra_model_predict(
    model: *const RaModel,
    x: *const f64,
    n_rows: usize,
    n_cols: usize,
    out: *mut f64,
) -> RaStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| Fail(RaStatus::InvalidArgument, "matrix size overflows".into()))?;
        let x = slice_arg(x, len, "x")?;
        let p = m.inner.predict_matrix(&DMatrix::from_row_slice(n_rows, n_cols, x))?;
        if n_rows > 0 && out.is_null() {
            return Err(null("out"));
        }
        std::ptr::copy_nonoverlapping(p.as_ptr(), out, n_rows);
        Ok(())
    })
}

unsafe fn rows(
    scores: *const f64,
    labels: *const u8,
    groups: *const u32,
    n: usize,
) -> Result<Vec<GroupedOutcome>, Fail> {
    let s = slice_arg(scores, n, "scores")?;
    let y = slice_arg(labels, n, "labels")?;
    let g = slice_arg(groups, n, "groups")?;
    Ok((0..n)
        .map(|i| GroupedOutcome::new(i.to_string(), s[i], y[i] != 0, g[i].to_string()))
        .collect())
}

unsafe fn gap_out(gap: Result<Gap, Error>, out: *mut f64) -> Result<(), Fail> {
    write_out(out, gap?.value, "out")
}

/// Largest pairwise gap in positive rates (`score >= threshold`) across
/// the group ids in `groups`. `labels` are 0 or 1.
///
/// # Safety
/// The three arrays must hold `n` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_dp_gap(
    scores: *const f64,
    labels: *const u8,
    groups: *const u32,
    n: usize,
    threshold: f64,
    out: *mut f64,
) -> RaStatus {
    guard(|| gap_out(dp_gap(&rows(scores, labels, groups, n)?, threshold), out))
}

/// True-positive-rate gap; with `both_rates` the larger of the TPR and FPR
/// gaps.
///
/// # Safety
/// The three arrays must hold `n` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_eo_gap(
    scores: *const f64,
    labels: *const u8,
    groups: *const u32,
    n: usize,
    threshold: f64,
    both_rates: bool,
    out: *mut f64,
) -> RaStatus {
    let mode = if both_rates { EoMode::BothRates } else { EoMode::TruePositive };
    guard(|| gap_out(eo_gap(&rows(scores, labels, groups, n)?, threshold, mode), out))
}

/// # Safety
/// The three arrays must hold `n` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_auc_gap(
    scores: *const f64,
    labels: *const u8,
    groups: *const u32,
    n: usize,
    out: *mut f64,
) -> RaStatus {
    guard(|| gap_out(auc_gap(&rows(scores, labels, groups, n)?), out))
}

/// # Safety
/// Both arrays must hold `n` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_roc_auc(scores: *const f64, labels: *const u8, n: usize, out: *mut f64) -> RaStatus {
    guard(|| {
        let s = slice_arg(scores, n, "scores")?;
        let y: Vec<bool> = slice_arg(labels, n, "labels")?.iter().map(|&v| v != 0).collect();
        write_out(out, roc_auc(s, &y)?.auc, "out")
    })
}

/// Two-sample Kolmogorov-Smirnov distance.
///
/// # Safety
/// `a` must hold `na` and `b` `nb` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_cdf_max_disparity(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut f64,
) -> RaStatus {
    guard(|| {
        let d = cdf_max_disparity(slice_arg(a, na, "a")?, slice_arg(b, nb, "b")?)?;
        write_out(out, d, "out")
    })
}

/// Similarity in `[0, 1]`: one minus edit distance over the longer length.
///
/// # Safety
/// `a` and `b` must be nul-terminated UTF-8 strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_normalized_levenshtein(a: *const c_char, b: *const c_char, out: *mut f64) -> RaStatus {
    guard(|| {
        let s = normalized_levenshtein(str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, s.value(), "out")
    })
}
