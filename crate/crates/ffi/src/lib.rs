//! C interface to `gcdtensor`.
//!
//! Objects cross the boundary as opaque handles created by a `gt_*`
//! constructor and released with the matching `gt_*_free`. Every fallible
//! call returns a [`GtStatus`]; on failure the message is kept per thread
//! and read with [`gt_last_error`]. Strings handed out by the library are
//! released with [`gt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gcdtensor::determinant::{det_closed_form, tensor_det_oracle, DetReport, DetScheme};
use gcdtensor::gcdtensor::{build_gcd_tensor, scp_decompose, CpDecomposition, MultiplicativeFn, WeightScheme};
use gcdtensor::json::{decomposition_to_json, det_report_to_json, tensor_from_json, tensor_to_json};
use gcdtensor::numtheory::IntegerSet;
use gcdtensor::positivity::{extreme_form_on_sphere, psd_sample_check, ExtremeOptions, Extremum};
use gcdtensor::{AnyTensor, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Domain = 4,
    Unsupported = 5,
    NotClosed = 6,
    NotALattice = 7,
    Panic = 8,
}

/// Weighting used by [`gt_decompose`] and [`gt_det_closed_form`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtScheme {
    /// Euler totient over the factor closure.
    Phi = 0,
    /// Generalized totient over the GCD closure.
    Psi = 1,
    /// `(g * mu)` for the multiplicative function named by `g`.
    Multiplicative = 2,
    /// `(p^r * mu)`, decomposing the entrywise `r`-th power.
    Fractional = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtExtremum {
    Min = 0,
    Max = 1,
}

/// A dense tensor with integer, rational or float entries.
pub struct GtTensor(AnyTensor);

/// A strongly completely positive decomposition.
pub struct GtDecomposition(CpDecomposition);

/// A determinant, possibly kept in factored form.
pub struct GtDetReport(DetReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GtStatus {
    match e {
        Error::Usage(_) | Error::Json(_) | Error::Io(_) => GtStatus::InvalidArgument,
        Error::Shape(_) => GtStatus::Shape,
        Error::Domain(_) => GtStatus::Domain,
        Error::Unsupported(_) => GtStatus::Unsupported,
        Error::NotClosed { .. } => GtStatus::NotClosed,
        Error::OrderAxiom(_) | Error::NoMeet(..) => GtStatus::NotALattice,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, recording any error or panic for `gt_last_error`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GtStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            GtStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            GtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn read_set(elements: *const u64, len: usize) -> Result<IntegerSet, Fail> {
    if elements.is_null() {
        return Err(Fail::Null("elements"));
    }
    let v = std::slice::from_raw_parts(elements, len).to_vec();
    Ok(IntegerSet::new(v)?)
}

unsafe fn read_str<'a>(s: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Usage(format!("{name} is not UTF-8"))))
}

fn give_string(s: String, out: &mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Lib(Error::Usage("string contains NUL".into())))?;
    *out = c.into_raw();
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn weight_scheme(scheme: GtScheme, g: *const c_char, r: f64) -> Result<WeightScheme, Fail> {
    Ok(match scheme {
        GtScheme::Phi => WeightScheme::Phi,
        GtScheme::Psi => WeightScheme::Psi,
        GtScheme::Multiplicative => WeightScheme::Multiplicative(MultiplicativeFn::parse(read_str(g, "g")?)?),
        GtScheme::Fractional => WeightScheme::Fractional(r),
    })
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next `gt_*` call on the same thread.
#[no_mangle]
pub extern "C" fn gt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the order-`order` GCD tensor of the `len` distinct positive
/// integers at `elements`.
///
/// # Safety
/// `elements` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_build(
    elements: *const u64,
    len: usize,
    order: usize,
    out: *mut *mut GtTensor,
) -> GtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = read_set(elements, len)?;
        *out = boxed(GtTensor(AnyTensor::Int(build_gcd_tensor(&s, order)?)));
        Ok(())
    })
}

/// Parses a tensor from its JSON encoding (a bare tensor or a CLI report).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_from_json(json: *const c_char, out: *mut *mut GtTensor) -> GtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let v: serde_json::Value = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        *out = boxed(GtTensor(tensor_from_json(&v)?));
        Ok(())
    })
}

/// # Safety
/// `t` must be a live tensor handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_to_json(t: *const GtTensor, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        give_string(tensor_to_json(&t.0).to_string(), out_ptr(out, "out")?)
    })
}

/// Order (number of indices) of `t`, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live tensor handle.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_order(t: *const GtTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.shape().len())
}

/// Extent of the first index of `t`, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live tensor handle.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_dim(t: *const GtTensor) -> usize {
    t.as_ref().and_then(|t| t.0.shape().first().copied()).unwrap_or(0)
}

/// Copies all entries, converted to double, into `buf` in row-major order.
///
/// # Safety
/// `t` must be a live tensor handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_entries_f64(t: *const GtTensor, buf: *mut f64, len: usize) -> GtStatus {
    guard(|| {
        let t = deref(t, "tensor")?.0.to_f64();
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        let entries = t.entries();
        if len != entries.len() {
            return Err(Error::Shape(format!("buffer holds {len} entries, tensor has {}", entries.len())).into());
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(entries);
        Ok(())
    })
}

/// # Safety
/// `t` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_tensor_free(t: *mut GtTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Decomposes the GCD tensor of `elements` (or its transform) as a sum of
/// weighted symmetric outer powers. `g` names the multiplicative function
/// for `GT_SCHEME_MULTIPLICATIVE` and is ignored otherwise; `r` is the
/// exponent for `GT_SCHEME_FRACTIONAL`.
///
/// # Safety
/// `elements` must point to `len` values, `g` must be NULL or a
/// NUL-terminated string, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_decompose(
    elements: *const u64,
    len: usize,
    order: usize,
    scheme: GtScheme,
    g: *const c_char,
    r: f64,
    out: *mut *mut GtDecomposition,
) -> GtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = read_set(elements, len)?;
        let scheme = weight_scheme(scheme, g, r)?;
        *out = boxed(GtDecomposition(scp_decompose(&s, order, &scheme)?));
        Ok(())
    })
}

/// Sums the decomposition back into a dense tensor.
///
/// # Safety
/// `d` must be a live decomposition handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_decomposition_reconstruct(d: *const GtDecomposition, out: *mut *mut GtTensor) -> GtStatus {
    guard(|| {
        let d = deref(d, "decomposition")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(GtTensor(d.0.reconstruct()?));
        Ok(())
    })
}

/// Writes 1 to `spanning` if the vectors span the whole space, else 0.
///
/// # Safety
/// `d` must be a live decomposition handle; `spanning` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_decomposition_spanning(d: *const GtDecomposition, spanning: *mut c_int) -> GtStatus {
    guard(|| {
        let d = deref(d, "decomposition")?;
        *out_ptr(spanning, "spanning")? = c_int::from(d.0.rank_witness().spanning);
        Ok(())
    })
}

/// # Safety
/// `d` must be a live decomposition handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_decomposition_to_json(d: *const GtDecomposition, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let d = deref(d, "decomposition")?;
        give_string(decomposition_to_json(&d.0).to_string(), out_ptr(out, "out")?)
    })
}

/// # Safety
/// `d` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_decomposition_free(d: *mut GtDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Closed-form determinant of the order-`order` GCD tensor. Fails with
/// `GT_STATUS_NOT_CLOSED` when the set lacks the closure property the
/// scheme needs. `GT_SCHEME_FRACTIONAL` is not accepted.
///
/// # Safety
/// As for [`gt_decompose`].
#[no_mangle]
pub unsafe extern "C" fn gt_det_closed_form(
    elements: *const u64,
    len: usize,
    order: usize,
    scheme: GtScheme,
    g: *const c_char,
    out: *mut *mut GtDetReport,
) -> GtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = read_set(elements, len)?;
        let scheme = match scheme {
            GtScheme::Phi => DetScheme::Phi,
            GtScheme::Psi => DetScheme::Psi,
            GtScheme::Multiplicative => DetScheme::Multiplicative(MultiplicativeFn::parse(read_str(g, "g")?)?),
            GtScheme::Fractional => {
                return Err(Error::Unsupported("no closed-form determinant for fractional powers".into()).into())
            }
        };
        *out = boxed(GtDetReport(det_closed_form(&s, order, &scheme)?));
        Ok(())
    })
}

/// Determinant computed directly from the entries: a matrix determinant at
/// order 2, a Sylvester resultant in dimension 2. Other shapes and float
/// tensors give `GT_STATUS_UNSUPPORTED`.
///
/// # Safety
/// `t` must be a live tensor handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_det_oracle(t: *const GtTensor, out: *mut *mut GtDetReport) -> GtStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        let out = out_ptr(out, "out")?;
        let report = match &t.0 {
            AnyTensor::Int(t) => tensor_det_oracle(t)?,
            AnyTensor::Rational(t) => tensor_det_oracle(t)?,
            AnyTensor::Float(t) => tensor_det_oracle(t)?,
        };
        *out = boxed(GtDetReport(report));
        Ok(())
    })
}

/// The determinant as a decimal or `p/q` string, or NULL in `out` when it
/// is too large to expand (see the JSON for its factored form).
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_det_report_value(r: *const GtDetReport, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let r = deref(r, "report")?;
        let out = out_ptr(out, "out")?;
        match r.0.value_string() {
            Some(v) => give_string(v, out),
            None => {
                *out = ptr::null_mut();
                Ok(())
            }
        }
    })
}

/// Writes 1 if both values are known and equal, 0 if they differ, -1 if
/// either is unexpanded.
///
/// # Safety
/// `a` and `b` must be live report handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_det_report_agrees(a: *const GtDetReport, b: *const GtDetReport, out: *mut c_int) -> GtStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out_ptr(out, "out")? = a.0.agrees_with(&b.0).map_or(-1, c_int::from);
        Ok(())
    })
}

/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_det_report_to_json(r: *const GtDetReport, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let r = deref(r, "report")?;
        give_string(det_report_to_json(&r.0).to_string(), out_ptr(out, "out")?)
    })
}

/// # Safety
/// `r` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_det_report_free(r: *mut GtDetReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Searches for a vector with negative form value (even order only).
/// `witness_found` receives 1 or 0 and `min_value` the smallest normalized
/// value seen. When `witness` is not NULL it must hold `dim` doubles and
/// receives the witness if one was found.
///
/// # Safety
/// `t` must be a live tensor handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_psd_check(
    t: *const GtTensor,
    trials: usize,
    seed: u64,
    witness_found: *mut c_int,
    min_value: *mut f64,
    witness: *mut f64,
) -> GtStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        let found = out_ptr(witness_found, "witness_found")?;
        let min_value = out_ptr(min_value, "min_value")?;
        let report = match &t.0 {
            AnyTensor::Int(t) => psd_sample_check(t, trials, seed)?,
            AnyTensor::Rational(t) => psd_sample_check(t, trials, seed)?,
            AnyTensor::Float(t) => psd_sample_check(t, trials, seed)?,
        };
        *found = c_int::from(report.witness_found());
        *min_value = report.min_normalized_value;
        if let (Some(w), false) = (&report.witness, witness.is_null()) {
            std::slice::from_raw_parts_mut(witness, w.len()).copy_from_slice(w);
        }
        Ok(())
    })
}

/// Minimum or maximum of the form `A x^m` over the unit `m`-sphere of a
/// symmetric even-order tensor. `vector` may be NULL; otherwise it must
/// hold `dim` doubles and receives the optimizer.
///
/// # Safety
/// `t` must be a live tensor handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_extreme_form(
    t: *const GtTensor,
    mode: GtExtremum,
    restarts: usize,
    iterations: usize,
    seed: u64,
    value: *mut f64,
    vector: *mut f64,
) -> GtStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        let value = out_ptr(value, "value")?;
        let mode = match mode {
            GtExtremum::Min => Extremum::Min,
            GtExtremum::Max => Extremum::Max,
        };
        let opts = ExtremeOptions {
            restarts,
            iterations,
            seed,
            ..ExtremeOptions::default()
        };
        let res = extreme_form_on_sphere(&t.0.to_f64(), mode, &opts)?;
        *value = res.value;
        if !vector.is_null() {
            std::slice::from_raw_parts_mut(vector, res.vector.len()).copy_from_slice(&res.vector);
        }
        Ok(())
    })
}
