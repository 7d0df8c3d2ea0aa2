//! C interface to `padic-prob`.
//!
//! Every fallible call returns a [`PpStatus`]; on failure the message is kept
//! per thread and read with [`pp_last_error_message`]. Objects cross the
//! boundary as opaque handles released by their `_free` function. Strings
//! returned to the caller are released with [`pp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use padic_prob::cylinder::{integrate_continuous, ContinuousMap, UniformMeasure};
use padic_prob::frequency::{Alphabet, Collective, SequenceSelector};
use padic_prob::limit::{
    gamma1_bounded_check, randomness_test, verify_thm31, verify_thm32, Decision, RandomnessOptions, Region,
    TheoremOptions, TheoremReport, TheoremVerdict,
};
use padic_prob::padic::{abs_p, vp, Valuation};
use padic_prob::rational::{self, parse_rational};
use padic_prob::{Error, Prime};

/// Status codes; the nonzero values agree with the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    Io = 1,
    Parse = 2,
    Hypothesis = 3,
    InsufficientData = 4,
    Domain = 5,
    ConditioningOnNull = 6,
    Range = 7,
    OverlappingPieces = 8,
    NoRingStructure = 9,
    NotInvertible = 10,
    RegionNotSignificant = 11,
    NotAField = 12,
    OscillationMissing = 13,
    NullPointer = 100,
    Utf8 = 101,
    Panic = 102,
}

impl From<&Error> for PpStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            1 => PpStatus::Io,
            2 => PpStatus::Parse,
            3 => PpStatus::Hypothesis,
            4 => PpStatus::InsufficientData,
            5 => PpStatus::Domain,
            6 => PpStatus::ConditioningOnNull,
            7 => PpStatus::Range,
            8 => PpStatus::OverlappingPieces,
            9 => PpStatus::NoRingStructure,
            10 => PpStatus::NotInvertible,
            11 => PpStatus::RegionNotSignificant,
            12 => PpStatus::NotAField,
            _ => PpStatus::OscillationMissing,
        }
    }
}

/// Outcome of the sphere randomness test.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpDecision {
    NotRejected = 0,
    Rejected = 1,
    /// Rejected with a hit at every checkpoint from k_ε on.
    RejectedPersistent = 2,
}

/// Region of the randomness test.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpMode {
    Sphere = 0,
    Residue = 1,
}

/// Valuation reported for zero.
pub const PP_VALUATION_INFINITE: i64 = i64::MAX;

/// Opaque index sequence.
pub struct PpSelector(SequenceSelector);

/// Opaque label sequence.
pub struct PpCollective(Collective);

/// Opaque theorem-verification report.
pub struct PpReport(TheoremReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), PpFail>) -> PpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(PpFail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PpStatus::Panic
        }
    }
}

struct PpFail(PpStatus, String);

impl From<Error> for PpFail {
    fn from(e: Error) -> Self {
        PpFail(PpStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> PpFail {
    PpFail(PpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, PpFail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| PpFail(PpStatus::Utf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PpFail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, PpFail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn valuation_code(v: Valuation) -> i64 {
    v.finite().unwrap_or(PP_VALUATION_INFINITE)
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn pp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `v_p(x)` and `|x|_p` of a rational `"n"` or `"n/d"`. `abs_out` receives a
/// string to release with [`pp_string_free`] and may be null.
///
/// # Safety
/// `x` must be a NUL-terminated string; outputs must be valid or null as documented.
#[no_mangle]
pub unsafe extern "C" fn pp_valuation(
    prime: u64,
    x: *const c_char,
    valuation_out: *mut i64,
    abs_out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let p = Prime::new(prime)?;
        let x = parse_rational(text(x, "x")?)?;
        *out(valuation_out, "valuation_out")? = valuation_code(vp(&x, p));
        if let Some(a) = abs_out.as_mut() {
            *a = c_string(rational::to_text(&abs_p(&x, p).to_rational()));
        }
        Ok(())
    })
}

/// Parses a selector such as `"2+1*p^k"`, `"trunc(-1)"` or `"list:4,10,28"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `selector_out` valid.
#[no_mangle]
pub unsafe extern "C" fn pp_selector_parse(
    spec: *const c_char,
    prime: u64,
    selector_out: *mut *mut PpSelector,
) -> PpStatus {
    guard(|| {
        let s = SequenceSelector::parse(text(spec, "spec")?, Prime::new(prime)?)?;
        *out(selector_out, "selector_out")? = Box::into_raw(Box::new(PpSelector(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`pp_selector_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn pp_selector_free(s: *mut PpSelector) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// A binary collective from `len` labels, each 0 or 1.
///
/// # Safety
/// `bits` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn pp_collective_from_bits(
    bits: *const u8,
    len: usize,
    collective_out: *mut *mut PpCollective,
) -> PpStatus {
    guard(|| {
        if bits.is_null() && len > 0 {
            return Err(null("bits"));
        }
        let labels = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(bits, len).to_vec() };
        let c = Collective::from_labels(Alphabet::binary(), labels)?;
        *out(collective_out, "collective_out")? = Box::into_raw(Box::new(PpCollective(c)));
        Ok(())
    })
}

/// A binary collective read from a text file of `0`/`1` characters.
///
/// # Safety
/// `path` must be a NUL-terminated string and `collective_out` valid.
#[no_mangle]
pub unsafe extern "C" fn pp_collective_from_file(
    path: *const c_char,
    collective_out: *mut *mut PpCollective,
) -> PpStatus {
    guard(|| {
        let c = Collective::from_file(Alphabet::binary(), text(path, "path")?)?;
        *out(collective_out, "collective_out")? = Box::into_raw(Box::new(PpCollective(c)));
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn pp_collective_free(c: *mut PpCollective) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

fn theorem_options(kmax: u32, threshold: i64) -> TheoremOptions {
    let mut o = TheoremOptions::new(kmax);
    if threshold >= 0 {
        o.threshold = Some(threshold);
    }
    o
}

/// Ball probabilities of fair binomial sums along a selector converging to `m`.
/// A negative `threshold` keeps the default.
///
/// # Safety
/// `selector` must be a live handle and `report_out` valid.
#[no_mangle]
pub unsafe extern "C" fn pp_verify_thm31(
    prime: u64,
    m: u64,
    r: u64,
    l: u32,
    selector: *const PpSelector,
    kmax: u32,
    threshold: i64,
    report_out: *mut *mut PpReport,
) -> PpStatus {
    guard(|| {
        let sel = &handle(selector, "selector")?.0;
        let rep = verify_thm31(Prime::new(prime)?, m, r, l, sel, &theorem_options(kmax, threshold))?;
        *out(report_out, "report_out")? = Box::into_raw(Box::new(PpReport(rep)));
        Ok(())
    })
}

/// As [`pp_verify_thm31`] with the selector converging to `prime`.
///
/// # Safety
/// `selector` must be a live handle and `report_out` valid.
#[no_mangle]
pub unsafe extern "C" fn pp_verify_thm32(
    prime: u64,
    r: u64,
    l: u32,
    selector: *const PpSelector,
    kmax: u32,
    threshold: i64,
    report_out: *mut *mut PpReport,
) -> PpStatus {
    guard(|| {
        let sel = &handle(selector, "selector")?.0;
        let rep = verify_thm32(Prime::new(prime)?, r, l, sel, &theorem_options(kmax, threshold))?;
        *out(report_out, "report_out")? = Box::into_raw(Box::new(PpReport(rep)));
        Ok(())
    })
}

/// Number of trace rows; 0 for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pp_report_len(report: *const PpReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.trace.rows.len())
}

/// Whether the trace passed the convergence check.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pp_report_converging(report: *const PpReport) -> bool {
    report
        .as_ref()
        .is_some_and(|r| r.0.verdict == TheoremVerdict::Converging)
}

/// Row `i`: `k`, `N_k`, the distance valuation to the limit, and the exact
/// value as `"num/den"` (release with [`pp_string_free`]; may be null).
///
/// # Safety
/// `report` must be a live handle; outputs must be valid or null as documented.
#[no_mangle]
pub unsafe extern "C" fn pp_report_row(
    report: *const PpReport,
    i: usize,
    k_out: *mut u32,
    n_out: *mut u64,
    vp_out: *mut i64,
    value_out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let rows = &handle(report, "report")?.0.trace.rows;
        let row = rows
            .get(i)
            .ok_or_else(|| PpFail(PpStatus::Range, format!("row {i} of {}", rows.len())))?;
        *out(k_out, "k_out")? = row.k;
        *out(n_out, "n_out")? = row.n;
        *out(vp_out, "vp_out")? = valuation_code(row.vp_to_limit);
        if let Some(v) = value_out.as_mut() {
            *v = c_string(rational::to_fraction_string(&row.value));
        }
        Ok(())
    })
}

/// Summary JSON of the report; release with [`pp_string_free`]. Null for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pp_report_json(report: *const PpReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => c_string(r.0.to_json().to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `r` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn pp_report_free(r: *mut PpReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// The randomness test with ε = p^-eps_exp at checkpoints `k = 1..kmax`.
///
/// # Safety
/// Handles must be live; `decision_out` valid; `k_eps_out` valid or null.
#[no_mangle]
pub unsafe extern "C" fn pp_randomness_test(
    omega: *const PpCollective,
    selector: *const PpSelector,
    l: u32,
    r: u64,
    eps_exp: i64,
    kmax: u32,
    mode: PpMode,
    decision_out: *mut PpDecision,
    k_eps_out: *mut u32,
) -> PpStatus {
    guard(|| {
        let omega = &handle(omega, "omega")?.0;
        let sel = &handle(selector, "selector")?.0;
        let mut opts = RandomnessOptions::new(l, r, eps_exp, kmax);
        opts.mode = match mode {
            PpMode::Sphere => Region::Sphere,
            PpMode::Residue => Region::Residue,
        };
        let rep = randomness_test(omega, sel, &opts)?;
        *out(decision_out, "decision_out")? = match rep.decision {
            Decision::NotRejected => PpDecision::NotRejected,
            Decision::Rejected { persistent: false, .. } => PpDecision::Rejected,
            Decision::Rejected { persistent: true, .. } => PpDecision::RejectedPersistent,
        };
        if let Some(k) = k_eps_out.as_mut() {
            *k = rep.k_eps;
        }
        Ok(())
    })
}

/// Depth-`depth` Riemann sum of the digit-weight map `Z_q -> Q_p` against the
/// uniform measure, as JSON `{depth, value, error_exponent}`.
///
/// # Safety
/// `json_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pp_integrate_digit_weight(
    q: u64,
    prime: u64,
    depth: usize,
    json_out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let (q, p) = (Prime::new(q)?, Prime::new(prime)?);
        let r = integrate_continuous(&UniformMeasure::new(q, p)?, &ContinuousMap::digit_weight(q, p), depth)?;
        *out(json_out, "json_out")? = c_string(r.to_json().to_string());
        Ok(())
    })
}

/// Finite check that the first `m_max` Mahler coefficients of cosh z have `|·|_p <= 1`.
///
/// # Safety
/// `bounded_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pp_gamma1_bounded(prime: u64, m_max: usize, bounded_out: *mut bool) -> PpStatus {
    guard(|| {
        let r = gamma1_bounded_check(Prime::new(prime)?, m_max)?;
        *out(bounded_out, "bounded_out")? = r.bounded;
        Ok(())
    })
}
