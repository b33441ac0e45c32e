//! C ABI over `k2local`.
//!
//! Every fallible function returns a [`K2Status`] and writes results through
//! out-pointers.  On failure the message is kept per thread and can be read
//! with [`k2_last_error_message`].  Objects are opaque handles released by
//! their `_free` function; strings returned by the library are released with
//! [`k2_string_free`].

use k2local::config::RunConfig;
use k2local::d1::D1Engine;
use k2local::e1::{AdaptedGenerator, FiltrationCaps, GenFamily};
use k2local::e2::e2_p0;
use k2local::group::{element_a, reduced_det, G2Element, O2Element};
use k2local::padic::{
    central_character_valuation, log_base4, teichmueller_omega_with, OmegaRoot, Precision, UnitOnePlus3, WittElement,
};
use k2local::pipeline::verify_all;
use k2local::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAUnit = 3,
    PrecisionMismatch = 4,
    Invariant = 5,
    Config = 6,
    Internal = 7,
}

/// An element of `W(F_9)/3^N`.
pub struct K2Witt(WittElement);

/// An element of the extended stabilizer group `G_2`, truncated at `3^N`.
pub struct K2G2Element(G2Element);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> K2Status {
    match e {
        Error::NotAUnit(_) => K2Status::NotAUnit,
        Error::PrecisionMismatch(..) => K2Status::PrecisionMismatch,
        Error::PrecisionOutOfRange(_) | Error::Domain(_) | Error::ClosureBound(_) => K2Status::InvalidArgument,
        Error::Invariant(_) => K2Status::Invariant,
        Error::Config { .. } => K2Status::Config,
        Error::Io(_) => K2Status::Internal,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (K2Status, String)> + UnwindSafe) -> K2Status {
    match catch_unwind(f) {
        Ok(Ok(())) => K2Status::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            K2Status::Internal
        }
    }
}

fn lib<T>(r: k2local::Result<T>) -> Result<T, (K2Status, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (K2Status, String) {
    (K2Status::NullPointer, "null pointer argument".into())
}

fn precision(n: u32) -> Result<Precision, (K2Status, String)> {
    lib(Precision::new(n))
}

fn root(r: u32) -> Result<OmegaRoot, (K2Status, String)> {
    match r {
        0 => Ok(OmegaRoot::Primary),
        1 => Ok(OmegaRoot::Conjugate),
        _ => Err((K2Status::InvalidArgument, format!("omega root must be 0 or 1, got {r}"))),
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (K2Status, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn read<'a, T>(p: *const T) -> Result<&'a T, (K2Status, String)> {
    p.as_ref().ok_or_else(null)
}

/// Message of the last failed call on this thread, or null.  Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn k2_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn k2_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn k2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `c0 + c1 x` at precision `n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_new(c0: i64, c1: i64, n: u32, out: *mut *mut K2Witt) -> K2Status {
    guard(|| {
        let w = WittElement::new(c0, c1, precision(n)?);
        write(out, Box::into_raw(Box::new(K2Witt(w))))
    })
}

/// The Teichmuller lift omega; `omega_root` is 0 (primary) or 1 (conjugate).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_omega(n: u32, omega_root: u32, out: *mut *mut K2Witt) -> K2Status {
    guard(|| {
        let w = teichmueller_omega_with(precision(n)?, root(omega_root)?);
        write(out, Box::into_raw(Box::new(K2Witt(w))))
    })
}

/// # Safety
/// `w` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_free(w: *mut K2Witt) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Coordinates in `[0, 3^N)`.
///
/// # Safety
/// `w` must be a live handle; `c0`, `c1` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_coords(w: *const K2Witt, c0: *mut u64, c1: *mut u64) -> K2Status {
    guard(|| {
        let (a, b) = read(w)?.0.coords();
        write(c0, a.value())?;
        write(c1, b.value())
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_mul(a: *const K2Witt, b: *const K2Witt, out: *mut *mut K2Witt) -> K2Status {
    guard(|| {
        let p = lib(read(a)?.0.checked_mul(&read(b)?.0))?;
        write(out, Box::into_raw(Box::new(K2Witt(p))))
    })
}

/// # Safety
/// `a` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_inverse(a: *const K2Witt, out: *mut *mut K2Witt) -> K2Status {
    guard(|| {
        let p = lib(read(a)?.0.inverse())?;
        write(out, Box::into_raw(Box::new(K2Witt(p))))
    })
}

/// The norm to `Z/3^N`, in `[0, 3^N)`.
///
/// # Safety
/// `a` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_witt_norm(a: *const K2Witt, out: *mut u64) -> K2Status {
    guard(|| write(out, read(a)?.0.norm().value()))
}

/// `(x0 + x1 w) + (y0 + y1 w) S`, composed with Frobenius when `galois` is set.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_new(x0: i64, x1: i64, y0: i64, y1: i64, galois: bool, n: u32, out: *mut *mut K2G2Element) -> K2Status {
    guard(|| {
        let p = precision(n)?;
        let u = lib(O2Element::new(WittElement::new(x0, x1, p), WittElement::new(y0, y1, p)))?;
        let g = lib(G2Element::new(u, galois))?;
        write(out, Box::into_raw(Box::new(K2G2Element(g))))
    })
}

/// The order-3 element `a = -(1 + omega S)/2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_element_a(n: u32, omega_root: u32, out: *mut *mut K2G2Element) -> K2Status {
    guard(|| {
        let g = element_a(precision(n)?, root(omega_root)?);
        write(out, Box::into_raw(Box::new(K2G2Element(g))))
    })
}

/// The Frobenius generator `phi`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_phi(n: u32, out: *mut *mut K2G2Element) -> K2Status {
    guard(|| write(out, Box::into_raw(Box::new(K2G2Element(G2Element::phi(precision(n)?))))))
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_free(g: *mut K2G2Element) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `a`, `b` must be live handles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_mul(a: *const K2G2Element, b: *const K2G2Element, out: *mut *mut K2G2Element) -> K2Status {
    guard(|| {
        let p = lib(read(a)?.0.checked_mul(&read(b)?.0))?;
        write(out, Box::into_raw(Box::new(K2G2Element(p))))
    })
}

/// # Safety
/// `a` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_inverse(a: *const K2G2Element, out: *mut *mut K2G2Element) -> K2Status {
    guard(|| write(out, Box::into_raw(Box::new(K2G2Element(read(a)?.0.inverse())))))
}

/// Order of `g` if at most `max`, else 0.
///
/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_order(g: *const K2G2Element, max: u32, out: *mut u32) -> K2Status {
    guard(|| write(out, read(g)?.0.order(max).unwrap_or(0)))
}

/// Reduced determinant, a residue modulo `3^{N-1}` in `[0, 3^{N-1})`.
///
/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_g2_reduced_det(g: *const K2G2Element, out: *mut u64) -> K2Status {
    guard(|| write(out, lib(reduced_det(&read(g)?.0))?.value()))
}

/// `log(u)/log(4)` modulo `3^{N-1}` for `u = 1 mod 3`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_log_base4(u: i64, n: u32, out: *mut u64) -> K2Status {
    guard(|| {
        let v = lib(UnitOnePlus3::from_i64(u, precision(n)?).and_then(log_base4))?;
        write(out, v.value())
    })
}

/// `v_3(4^{|t|/2} - 1)` for a nonzero multiple of 4.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_central_character_valuation(t: i64, out: *mut u32) -> K2Status {
    guard(|| write(out, lib(central_character_valuation(t))?))
}

fn family(code: u32) -> Result<GenFamily, (K2Status, String)> {
    match code {
        0 => Ok(GenFamily::Delta),
        1 => Ok(GenFamily::B),
        2 => Ok(GenFamily::BBar),
        3 => Ok(GenFamily::DeltaBar),
        _ => Err((K2Status::InvalidArgument, format!("family code must be 0..=3, got {code}"))),
    }
}

fn family_code(f: GenFamily) -> u32 {
    match f {
        GenFamily::Delta => 0,
        GenFamily::B => 1,
        GenFamily::BBar => 2,
        GenFamily::DeltaBar => 3,
    }
}

/// `d_1` of one adapted generator.  Families: 0 delta, 1 b, 2 bbar, 3 deltabar;
/// `label` is `k` for delta and `2k+1` for b, bbar.  The image is
/// `coeff * v1^shift * (target_family, target_label)`; `coeff = 0` means zero.
///
/// # Safety
/// All out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_d1_eval(
    family_code_in: u32,
    label: i64,
    coeff: *mut i8,
    shift: *mut u32,
    target_family: *mut u32,
    target_label: *mut i64,
) -> K2Status {
    guard(|| {
        let g = lib(AdaptedGenerator::from_label(family(family_code_in)?, label))?;
        match lib(D1Engine::new().d1_generator(&g))? {
            Some(img) => {
                write(coeff, img.coeff.signed())?;
                write(shift, img.v1_shift)?;
                write(target_family, family_code(img.target.family))?;
                write(target_label, img.target.label())
            }
            None => {
                write(coeff, 0)?;
                write(shift, 0)?;
                write(target_family, 0)?;
                write(target_label, 0)
            }
        }
    })
}

/// `dim E_2^{p,0,t}` for `p = 0..3` at caps `(j, v)`, checked against doubled caps.
///
/// # Safety
/// `dims` must point to 4 writable `size_t`; `stabilized` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_e2_p0(t: i64, j: u32, v: u32, dims: *mut usize, stabilized: *mut bool) -> K2Status {
    guard(|| {
        if dims.is_null() {
            return Err(null());
        }
        let caps = lib(FiltrationCaps::new(j, v, t, t))?;
        let r = lib(e2_p0(&D1Engine::new(), t, &caps))?;
        for (i, d) in r.dims.iter().enumerate() {
            dims.add(i).write(*d);
        }
        write(stabilized, r.stabilized)
    })
}

/// Run every gate on a `key=value` config (null or empty for defaults).  The
/// consolidated report is written to `json_out` as a new string; nothing is
/// written to disk.
///
/// # Safety
/// `config_text` must be null or NUL-terminated; out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k2_verify_all_json(config_text: *const c_char, json_out: *mut *mut c_char, pass: *mut bool) -> K2Status {
    guard(|| {
        let text = if config_text.is_null() {
            String::new()
        } else {
            CStr::from_ptr(config_text).to_str().map_err(|_| (K2Status::InvalidArgument, "config is not UTF-8".to_string()))?.to_owned()
        };
        let cfg = lib(RunConfig::parse(&text))?;
        let (report, _) = verify_all(&cfg);
        let json = lib(report.to_json())?;
        let c = CString::new(json).map_err(|_| (K2Status::Internal, "NUL in report".to_string()))?;
        write(pass, report.pass)?;
        write(json_out, c.into_raw())
    })
}
