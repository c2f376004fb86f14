//! C interface to `fibsum`.
//!
//! Every function returns a [`FibsumStatus`]. Strings handed out by the
//! library are owned by the caller and must be released with
//! [`fibsum_string_free`]; catalogs with [`fibsum_catalog_free`]. After a
//! failure, [`fibsum_last_error`] describes it on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use fibsum::bigfib;
use fibsum::catalog::{default_catalog_dir, load_catalog, Catalog, CatalogError};
use fibsum::dsl::{parse_identity, Binding, Evaluator};
use fibsum::verify::{verify_entry, ParamGrid};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibsumStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Identity text, binding, grid or catalog file did not parse.
    Parse = 3,
    Io = 4,
    UnknownId = 5,
    /// The identity could not be evaluated at the given binding.
    Eval = 6,
    /// An internal panic was caught at the boundary.
    Internal = 7,
}

/// Which side of an identity [`fibsum_eval`] evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibsumSide {
    Lhs = 0,
    Rhs = 1,
}

/// A loaded catalog. Opaque to C.
pub struct FibsumCatalog {
    inner: Catalog,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FibsumStatus, String);

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let status = match e {
            CatalogError::Io { .. } => FibsumStatus::Io,
            CatalogError::UnknownId { .. } => FibsumStatus::UnknownId,
            _ => FibsumStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

/// Runs `f`, records any failure and maps panics to `Internal`.
fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> FibsumStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FibsumStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal error");
            FibsumStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FibsumStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FibsumStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FibsumStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(value).map_err(|_| Failure(FibsumStatus::Internal, "NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn fibsum_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer this library returned and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fibsum_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes F(j) in decimal to `*out`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fibsum_fib(j: i64, out: *mut *mut c_char) -> FibsumStatus {
    guarded(|| put_string(out, bigfib::fib(j).to_string()))
}

/// Writes L(j) in decimal to `*out`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fibsum_lucas(j: i64, out: *mut *mut c_char) -> FibsumStatus {
    guarded(|| put_string(out, bigfib::lucas(j).to_string()))
}

/// Evaluates one side of the identity in `source` (one `identity` block)
/// at `binding` (`"n=2,s=0"`, may be empty) and writes the value, e.g.
/// `"3/2 + 1/2*sqrt5"`, to `*out`.
///
/// # Safety
/// `source` and `binding` must be NUL-terminated strings; `out` must be
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fibsum_eval(
    source: *const c_char,
    binding: *const c_char,
    side: FibsumSide,
    out: *mut *mut c_char,
) -> FibsumStatus {
    guarded(|| {
        let spec = parse_identity(text(source, "source")?).map_err(|e| Failure(FibsumStatus::Parse, e.to_string()))?;
        let env = Binding::parse(text(binding, "binding")?).map_err(|e| Failure(FibsumStatus::Parse, e))?;
        let eval_err = |e: fibsum::dsl::EvalError| Failure(FibsumStatus::Eval, format!("at {env}: {e}"));
        let mut ev = Evaluator::new();
        if !ev.admissible(&spec, &env).map_err(eval_err)? {
            return Err(Failure(
                FibsumStatus::Eval,
                format!("{env} is outside the domain of {}", spec.id),
            ));
        }
        let value = match side {
            FibsumSide::Lhs => ev.eval(&spec.lhs, &env),
            FibsumSide::Rhs => ev
                .active_case(&spec, &env)
                .and_then(|case| ev.eval(&spec.rhs[case].expr, &env)),
        }
        .map_err(eval_err)?;
        put_string(out, value.to_string())
    })
}

/// Loads the catalog under `dir`, or the default catalog when `dir` is
/// null, into `*out`.
///
/// # Safety
/// `dir` must be null or a NUL-terminated string; `out` must be valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fibsum_catalog_open(dir: *const c_char, out: *mut *mut FibsumCatalog) -> FibsumStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Failure(FibsumStatus::NullArgument, "output pointer is null".into()));
        }
        let dir = if dir.is_null() {
            default_catalog_dir()
        } else {
            PathBuf::from(text(dir, "dir")?)
        };
        let inner = load_catalog(&dir)?;
        *out = Box::into_raw(Box::new(FibsumCatalog { inner }));
        Ok(())
    })
}

/// Releases a catalog. Null is ignored.
///
/// # Safety
/// `catalog` must be null or a handle from [`fibsum_catalog_open`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn fibsum_catalog_free(catalog: *mut FibsumCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Number of entries, or 0 for a null handle.
///
/// # Safety
/// `catalog` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fibsum_catalog_len(catalog: *const FibsumCatalog) -> usize {
    catalog.as_ref().map_or(0, |c| c.inner.len())
}

/// Verifies entry `id` over its default grid laid under `grid` (e.g.
/// `"n=0..10;cap=500"`, or null). Writes whether it passed to `*passed`
/// and, if `report` is not null, the rendered report to `*report`.
///
/// # Safety
/// `catalog` must be a live handle; `id` and `grid` NUL-terminated (grid
/// may be null); `passed` valid for a write; `report` null or valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn fibsum_verify(
    catalog: *const FibsumCatalog,
    id: *const c_char,
    grid: *const c_char,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> FibsumStatus {
    guarded(|| {
        let catalog = catalog
            .as_ref()
            .ok_or_else(|| Failure(FibsumStatus::NullArgument, "catalog is null".into()))?;
        if passed.is_null() {
            return Err(Failure(FibsumStatus::NullArgument, "passed is null".into()));
        }
        let entry = catalog.inner.entry(text(id, "id")?)?;
        let overrides = if grid.is_null() {
            ParamGrid::new()
        } else {
            text(grid, "grid")?
                .parse::<ParamGrid>()
                .map_err(|e| Failure(FibsumStatus::Parse, e.to_string()))?
        };
        let g = ParamGrid::default_for(entry).overridden_by(&overrides);
        let r = verify_entry(entry, &g).map_err(|e| Failure(FibsumStatus::Parse, e.to_string()))?;
        *passed = r.passed();
        if !report.is_null() {
            put_string(report, r.render())?;
        }
        Ok(())
    })
}
