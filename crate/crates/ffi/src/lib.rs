//! C ABI for the metarec library: opaque handles, status codes, and a
//! thread-local last-error message. The companion header is generated into
//! `include/metarec.h` by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use metarec::ensemble::EnsembleBundle;
use metarec::metafeatures::{FamilyId, MetaFeatureGroupSet};
use metarec::stats::ContingencyTable;
use metarec::tabular::{DataFormat, TabularDataset};
use metarec::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Domain = 5,
    Config = 6,
    Internal = 7,
}

/// Input file format for dataset loading.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrFormat {
    Csv = 0,
    Arff = 1,
}

/// Opaque handle to a loaded classification dataset.
pub struct MrDataset(TabularDataset);

/// Opaque handle to the five extracted meta-feature vectors of one problem.
pub struct MrFeatures(MetaFeatureGroupSet);

/// Opaque handle to a trained ensemble bundle.
pub struct MrBundle(EnsembleBundle);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> MrStatus {
    match err {
        Error::Io { .. } => MrStatus::Io,
        Error::MalformedInput(_)
        | Error::EmptyDataset
        | Error::NonNominalTarget(_)
        | Error::OutOfRangeAccuracy(_)
        | Error::DegenerateTarget(_)
        | Error::Serde { .. } => MrStatus::Parse,
        Error::Config(_) => MrStatus::Config,
        _ => MrStatus::Domain,
    }
}

fn fail(err: Error) -> MrStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn catch<T>(f: impl FnOnce() -> Result<T, MrStatus>) -> Result<T, MrStatus> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(result) => result,
        Err(_) => {
            set_error("internal panic");
            Err(MrStatus::Internal)
        }
    }
}

unsafe fn path_arg<'a>(ptr: *const c_char) -> Result<&'a Path, MrStatus> {
    if ptr.is_null() {
        set_error("null path argument");
        return Err(MrStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(MrStatus::InvalidUtf8)
        }
    }
}

unsafe fn ref_arg<'a, T>(ptr: *const T) -> Result<&'a T, MrStatus> {
    if ptr.is_null() {
        set_error("null handle argument");
        return Err(MrStatus::NullArgument);
    }
    Ok(&*ptr)
}

/// Library version string; owned by the library, do not free.
#[no_mangle]
pub extern "C" fn mr_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr() as *const c_char
}

/// Message describing the last error on this thread; owned by the library,
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads a CSV or ARFF classification dataset (last column = target).
/// Returns null on error; consult `mr_last_error_message`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string pointer.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_load(path: *const c_char, format: MrFormat) -> *mut MrDataset {
    let result = catch(|| {
        let path = path_arg(path)?;
        let format = match format {
            MrFormat::Csv => DataFormat::Csv,
            MrFormat::Arff => DataFormat::Arff,
        };
        metarec::tabular::load_dataset(path, format).map_err(fail)
    });
    match result {
        Ok(d) => Box::into_raw(Box::new(MrDataset(d))),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `handle` must be null or a pointer returned by `mr_dataset_load`.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_free(handle: *mut MrDataset) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a valid dataset pointer and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_instance_count(
    handle: *const MrDataset,
    out: *mut usize,
) -> MrStatus {
    read_count(handle, out, |d| d.n_instances())
}

/// # Safety
/// `handle` must be a valid dataset pointer and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_attribute_count(
    handle: *const MrDataset,
    out: *mut usize,
) -> MrStatus {
    read_count(handle, out, |d| d.n_attributes())
}

/// # Safety
/// `handle` must be a valid dataset pointer and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_class_count(
    handle: *const MrDataset,
    out: *mut usize,
) -> MrStatus {
    read_count(handle, out, |d| d.n_classes())
}

unsafe fn read_count(
    handle: *const MrDataset,
    out: *mut usize,
    get: impl Fn(&TabularDataset) -> usize,
) -> MrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MrStatus::NullArgument;
    }
    match ref_arg(handle) {
        Ok(d) => {
            *out = get(&d.0);
            MrStatus::Ok
        }
        Err(status) => status,
    }
}

/// Extracts all five meta-feature families (deterministic in `seed`).
/// Returns null on error.
///
/// # Safety
/// `dataset` must be a valid dataset pointer.
#[no_mangle]
pub unsafe extern "C" fn mr_features_extract(
    dataset: *const MrDataset,
    seed: u64,
) -> *mut MrFeatures {
    let result = catch(|| {
        let d = ref_arg(dataset)?;
        metarec::metafeatures::extract_all(&d.0, seed).map_err(fail)
    });
    match result {
        Ok(f) => Box::into_raw(Box::new(MrFeatures(f))),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `handle` must be null or a pointer returned by `mr_features_extract`.
#[no_mangle]
pub unsafe extern "C" fn mr_features_free(handle: *mut MrFeatures) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of measures in family 1..=5 (31, 15, 6, 7, 18).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_family_arity(family: u32, out: *mut usize) -> MrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MrStatus::NullArgument;
    }
    match FamilyId::new(family as u8) {
        Ok(f) => {
            *out = f.arity();
            MrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Copies one family's measure values into `buf` (length must equal the
/// family arity).
///
/// # Safety
/// `handle` must be a valid features pointer and `buf` writable for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn mr_features_family_values(
    handle: *const MrFeatures,
    family: u32,
    buf: *mut f64,
    len: usize,
) -> MrStatus {
    let features = match ref_arg(handle) {
        Ok(f) => f,
        Err(status) => return status,
    };
    if buf.is_null() {
        set_error("null output buffer");
        return MrStatus::NullArgument;
    }
    let family = match FamilyId::new(family as u8) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let values = &features.0.vector(family).values;
    if values.len() != len {
        set_error(&format!(
            "buffer length {len} does not match family arity {}",
            values.len()
        ));
        return MrStatus::Domain;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
    MrStatus::Ok
}

/// Kappa association from a row-major k x k contingency table of error
/// counts.
///
/// # Safety
/// `counts` must point to `k * k` readable u64 values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_kappa(counts: *const u64, k: usize, out: *mut f64) -> MrStatus {
    if counts.is_null() || out.is_null() {
        set_error("null argument");
        return MrStatus::NullArgument;
    }
    let flat = std::slice::from_raw_parts(counts, k * k);
    let rows: Vec<Vec<u64>> = (0..k).map(|i| flat[i * k..(i + 1) * k].to_vec()).collect();
    let result = ContingencyTable::from_counts(&rows).and_then(|t| metarec::stats::kappa(&t));
    match result {
        Ok(v) => {
            *out = v;
            MrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Adaptive diversity threshold delta for N included instances.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_diversity_threshold(n: u64, alpha: f64, out: *mut f64) -> MrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MrStatus::NullArgument;
    }
    match metarec::stats::diversity_threshold(n, alpha) {
        Ok(v) => {
            *out = v;
            MrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Descending-probability ranks with tie averaging.
///
/// # Safety
/// `probs` must point to `len` readable doubles and `out_ranks` to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mr_rank_algorithms(
    probs: *const f64,
    len: usize,
    out_ranks: *mut f64,
) -> MrStatus {
    if probs.is_null() || out_ranks.is_null() {
        set_error("null argument");
        return MrStatus::NullArgument;
    }
    let input = std::slice::from_raw_parts(probs, len);
    if input.iter().any(|v| !v.is_finite()) {
        set_error("probabilities must be finite");
        return MrStatus::Domain;
    }
    let ranks = metarec::ensemble::rank_algorithms(input);
    std::ptr::copy_nonoverlapping(ranks.as_ptr(), out_ranks, len);
    MrStatus::Ok
}

/// Loads a persisted ensemble bundle directory. Returns null on error.
///
/// # Safety
/// `dir` must be a valid NUL-terminated string pointer.
#[no_mangle]
pub unsafe extern "C" fn mr_bundle_load(dir: *const c_char) -> *mut MrBundle {
    let result = catch(|| {
        let dir = path_arg(dir)?;
        EnsembleBundle::load(dir).map_err(fail)
    });
    match result {
        Ok(b) => Box::into_raw(Box::new(MrBundle(b))),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `handle` must be null or a pointer returned by `mr_bundle_load`.
#[no_mangle]
pub unsafe extern "C" fn mr_bundle_free(handle: *mut MrBundle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of candidate algorithms the bundle scores.
///
/// # Safety
/// `handle` must be a valid bundle pointer and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_bundle_algorithm_count(
    handle: *const MrBundle,
    out: *mut usize,
) -> MrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MrStatus::NullArgument;
    }
    match ref_arg(handle) {
        Ok(b) => {
            *out = b.0.matrix.k();
            MrStatus::Ok
        }
        Err(status) => status,
    }
}

/// Runs the full recommendation for one dataset: meta-feature extraction,
/// ensemble probabilities, threshold picks, and tie-averaged ranks. All
/// three output buffers must hold `len` = algorithm count entries.
///
/// # Safety
/// `bundle` and `dataset` must be valid pointers; `out_probs`, `out_picks`,
/// and `out_ranks` must be writable for `len` entries each.
#[no_mangle]
pub unsafe extern "C" fn mr_bundle_recommend(
    bundle: *const MrBundle,
    dataset: *const MrDataset,
    seed: u64,
    pick_threshold: f64,
    out_probs: *mut f64,
    out_picks: *mut u8,
    out_ranks: *mut f64,
    len: usize,
) -> MrStatus {
    let result = catch(|| {
        let bundle = ref_arg(bundle)?;
        let dataset = ref_arg(dataset)?;
        if out_probs.is_null() || out_picks.is_null() || out_ranks.is_null() {
            set_error("null output buffer");
            return Err(MrStatus::NullArgument);
        }
        if len != bundle.0.matrix.k() {
            set_error(&format!(
                "buffer length {len} does not match algorithm count {}",
                bundle.0.matrix.k()
            ));
            return Err(MrStatus::Domain);
        }
        let features = metarec::metafeatures::extract_all(&dataset.0, seed).map_err(fail)?;
        let probs =
            metarec::ensemble::ensemble_predict(&bundle.0.matrix, &bundle.0.flags, &features)
                .map_err(fail)?;
        Ok(metarec::ensemble::recommend(&probs, pick_threshold))
    });
    match result {
        Ok(rec) => {
            std::ptr::copy_nonoverlapping(rec.probabilities.as_ptr(), out_probs, len);
            std::ptr::copy_nonoverlapping(rec.picks.as_ptr(), out_picks, len);
            std::ptr::copy_nonoverlapping(rec.ranks.as_ptr(), out_ranks, len);
            MrStatus::Ok
        }
        Err(status) => status,
    }
}
