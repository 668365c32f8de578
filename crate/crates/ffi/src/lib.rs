//! C interface to `mwdkit`.
//!
//! Every object is an opaque handle created by a `mwd_*` constructor and
//! released by the matching `*_free`. Functions return an [`MwdStatus`];
//! on failure `mwd_last_error` returns a message for the calling thread.
//! Complex arrays cross the boundary as interleaved `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mwdkit::blockmat::{BlockMatrix, Preset};
use mwdkit::config;
use mwdkit::mwd::{mwd, PhaseSpaceField};
use mwdkit::quantize::{kernel_from_symbol, OperatorMatrix, SymbolField};
use mwdkit::{Complex64, Error, Grid, Signal};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Singular = 4,
    GridMismatch = 5,
    Numerical = 6,
    Panic = 7,
    BufferTooSmall = 8,
}

pub struct MwdMatrix(BlockMatrix);
pub struct MwdGrid(Grid);
pub struct MwdSignal(Signal);
pub struct MwdField(PhaseSpaceField);
pub struct MwdSymbol(SymbolField);
pub struct MwdOperator(OperatorMatrix);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(MwdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) | Error::Io(_) => MwdStatus::Config,
            Error::SingularMatrix { .. } | Error::NotRightRegular => MwdStatus::Singular,
            Error::GridMismatch(_) | Error::DimensionMismatch(_) => MwdStatus::GridMismatch,
            Error::NonPositiveParameter { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidExponent(_)
            | Error::OffGridShift(_) => MwdStatus::InvalidArgument,
            _ => MwdStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: MwdStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> MwdStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (MwdStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (MwdStatus::Panic, format!("panic: {m}"))
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(MwdStatus::NullPointer, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(MwdStatus::NullPointer, "out is null"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(MwdStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MwdStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn json(s: &str) -> Result<serde_json::Value, Failure> {
    serde_json::from_str(s).map_err(|e| fail(MwdStatus::Config, format!("JSON: {e}")))
}

unsafe fn write_complex(values: &[Complex64], out: *mut f64, cap: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(MwdStatus::NullPointer, "out is null"));
    }
    if cap < 2 * values.len() {
        return Err(fail(
            MwdStatus::BufferTooSmall,
            format!("need {} doubles, buffer holds {cap}", 2 * values.len()),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(out, 2 * values.len());
    for (c, v) in dst.chunks_exact_mut(2).zip(values) {
        c[0] = v.re;
        c[1] = v.im;
    }
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap - 1` bytes). Returns the full message length.
#[no_mangle]
pub unsafe extern "C" fn mwd_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mwd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Named matrix in dimension `d`. `param` is τ for `"tau"` and the scalar
/// `c` of `M = cI` / `T = cI` for `"cohen"` / `"affine"`; otherwise ignored.
#[no_mangle]
pub unsafe extern "C" fn mwd_matrix_preset(
    name: *const c_char,
    param: f64,
    d: usize,
    out: *mut *mut MwdMatrix,
) -> MwdStatus {
    guard(|| {
        let name = text(name, "name")?;
        let scalar = || mwdkit::blockmat::eye(d) * param;
        let preset = match name {
            "wigner" => Preset::Wigner,
            "stft" => Preset::Stft,
            "ambiguity" => Preset::Ambiguity,
            "rihaczek" => Preset::Rihaczek,
            "tau" => Preset::Tau(param),
            "cohen" => Preset::Cohen(scalar()),
            "affine" => Preset::Affine(scalar()),
            other => {
                return Err(fail(
                    MwdStatus::InvalidArgument,
                    format!("unknown preset {other:?}"),
                ))
            }
        };
        put(out, MwdMatrix(BlockMatrix::preset(&preset, d)?))
    })
}

/// `2d × 2d` matrix from row-major `entries` (`4 d²` doubles).
#[no_mangle]
pub unsafe extern "C" fn mwd_matrix_from_entries(
    entries: *const f64,
    d: usize,
    out: *mut *mut MwdMatrix,
) -> MwdStatus {
    guard(|| {
        if entries.is_null() {
            return Err(fail(MwdStatus::NullPointer, "entries is null"));
        }
        if d == 0 {
            return Err(fail(MwdStatus::InvalidArgument, "d must be positive"));
        }
        let data = std::slice::from_raw_parts(entries, 4 * d * d);
        put(out, MwdMatrix(BlockMatrix::from_row_slice(d, data)?))
    })
}

/// Matrix from the same JSON object accepted by the CLI's `matrix` field.
#[no_mangle]
pub unsafe extern "C" fn mwd_matrix_from_json(
    json_text: *const c_char,
    d: usize,
    out: *mut *mut MwdMatrix,
) -> MwdStatus {
    guard(|| {
        let v = json(text(json_text, "json")?)?;
        put(out, MwdMatrix(config::parse_matrix(&v, d, "matrix")?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mwd_matrix_det(m: *const MwdMatrix, out: *mut f64) -> MwdStatus {
    guard(|| {
        let m = get(m, "matrix")?;
        if out.is_null() {
            return Err(fail(MwdStatus::NullPointer, "out is null"));
        }
        *out = m.0.det();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mwd_matrix_free(m: *mut MwdMatrix) {
    free(m)
}

/// Grid of `n` points (a power of two) per axis over `[-len/2, len/2)^dim`.
#[no_mangle]
pub unsafe extern "C" fn mwd_grid_new(
    dim: usize,
    n: usize,
    len: f64,
    out: *mut *mut MwdGrid,
) -> MwdStatus {
    guard(|| put(out, MwdGrid(Grid::new(dim, n, len)?)))
}

/// Number of grid points, `n^dim`; 0 for a null grid.
#[no_mangle]
pub unsafe extern "C" fn mwd_grid_total(g: *const MwdGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.total())
}

#[no_mangle]
pub unsafe extern "C" fn mwd_grid_free(g: *mut MwdGrid) {
    free(g)
}

/// Signal from a JSON object as in the CLI's `signals` list.
#[no_mangle]
pub unsafe extern "C" fn mwd_signal_from_json(
    json_text: *const c_char,
    d: usize,
    out: *mut *mut MwdSignal,
) -> MwdStatus {
    guard(|| {
        let v = json(text(json_text, "json")?)?;
        put(out, MwdSignal(config::parse_signal(&v, d, "signal")?))
    })
}

/// Samples on `grid` into `out` (`2 * total` doubles).
#[no_mangle]
pub unsafe extern "C" fn mwd_signal_sample(
    s: *const MwdSignal,
    grid: *const MwdGrid,
    out: *mut f64,
    cap: usize,
) -> MwdStatus {
    guard(|| {
        let s = get(s, "signal")?;
        let g = get(grid, "grid")?;
        write_complex(&s.0.sample(&g.0)?, out, cap)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mwd_signal_free(s: *mut MwdSignal) {
    free(s)
}

/// `B_A(f, g)` on `grid`; `g` may be null for `B_A(f, f)`.
#[no_mangle]
pub unsafe extern "C" fn mwd_transform(
    a: *const MwdMatrix,
    f: *const MwdSignal,
    g: *const MwdSignal,
    grid: *const MwdGrid,
    out: *mut *mut MwdField,
) -> MwdStatus {
    guard(|| {
        let a = get(a, "matrix")?;
        let f = get(f, "f")?;
        let g = if g.is_null() { f } else { &*g };
        let grid = get(grid, "grid")?;
        put(out, MwdField(mwd(&a.0, &f.0, &g.0, &grid.0)?))
    })
}

/// Number of complex values in the field, `n^(2 dim)`, ordered with `x` outer.
#[no_mangle]
pub unsafe extern "C" fn mwd_field_len(f: *const MwdField) -> usize {
    f.as_ref().map_or(0, |f| f.0.values.len())
}

#[no_mangle]
pub unsafe extern "C" fn mwd_field_copy(f: *const MwdField, out: *mut f64, cap: usize) -> MwdStatus {
    guard(|| write_complex(&get(f, "field")?.0.values, out, cap))
}

#[no_mangle]
pub unsafe extern "C" fn mwd_field_free(f: *mut MwdField) {
    free(f)
}

/// Symbol sampled on `grid` and its dual, from a JSON object as in the CLI's
/// `symbol` field. Relative `file` paths resolve against the working directory.
#[no_mangle]
pub unsafe extern "C" fn mwd_symbol_from_json(
    json_text: *const c_char,
    grid: *const MwdGrid,
    out: *mut *mut MwdSymbol,
) -> MwdStatus {
    guard(|| {
        let v = json(text(json_text, "json")?)?;
        let g = get(grid, "grid")?;
        let spec = config::parse_symbol(&v, Path::new("."), "symbol")?;
        put(out, MwdSymbol(spec.build(&g.0)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mwd_symbol_free(s: *mut MwdSymbol) {
    free(s)
}

/// Kernel of the operator with symbol `sigma` under the matrix `a`.
#[no_mangle]
pub unsafe extern "C" fn mwd_operator_from_symbol(
    sigma: *const MwdSymbol,
    a: *const MwdMatrix,
    out: *mut *mut MwdOperator,
) -> MwdStatus {
    guard(|| {
        let s = get(sigma, "symbol")?;
        let a = get(a, "matrix")?;
        put(out, MwdOperator(kernel_from_symbol(&s.0, &a.0)?))
    })
}

/// Applies the operator to `n` interleaved complex samples; `out` needs `2n` doubles.
#[no_mangle]
pub unsafe extern "C" fn mwd_operator_apply(
    op: *const MwdOperator,
    input: *const f64,
    n: usize,
    out: *mut f64,
    cap: usize,
) -> MwdStatus {
    guard(|| {
        let op = get(op, "operator")?;
        if input.is_null() {
            return Err(fail(MwdStatus::NullPointer, "input is null"));
        }
        let total = op.0.grid.total();
        if n != total {
            return Err(fail(
                MwdStatus::GridMismatch,
                format!("{n} samples for a grid of {total} points"),
            ));
        }
        let raw = std::slice::from_raw_parts(input, 2 * n);
        let f: Vec<Complex64> = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        write_complex(&op.0.apply_samples(&f), out, cap)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mwd_operator_free(op: *mut MwdOperator) {
    free(op)
}
