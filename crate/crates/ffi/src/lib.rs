//! C ABI over `men-core`.
//!
//! States and models cross the boundary as opaque handles created by the
//! `men_*_new`, `men_*_load`, `men_extract` and `men_reconstruct` functions
//! and released with `men_state_free` / `men_model_free`. Every fallible call
//! returns a [`MenStatus`]; on failure, `men_last_error_message` yields the
//! message for the calling thread. Qubits are numbered from 1 and qubit 1 is
//! the most significant bit of a basis index.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use libc::{c_char, size_t};
use men_core::classify::{classify, TripartiteClass};
use men_core::format::{load_model, load_state, save_model, save_state};
use men_core::inference::{
    chain_marginal_ratio, conditional_probability, marginal_ratio, mle_brute_force, mle_chain,
    random_chain_model,
};
use men_core::men::model::{extract_men, reconstruct_state};
use men_core::men::{build_graph, MenModel};
use men_core::{Assignment, MenError, PureState, ToleranceConfig};
use num_complex::Complex64;

/// Opaque pure state.
pub struct MenStateHandle(PureState);

/// Opaque network model.
pub struct MenModelHandle(MenModel);

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Panic = 4,
    MissingBinding = 10,
    InvalidPartition = 11,
    InvalidUnitary = 12,
    ZeroProbabilityOutcome = 13,
    NotSeparable = 14,
    DegenerateState = 15,
    ZeroReferenceAmplitude = 16,
    ZeroAmplitude = 17,
    InconsistentGraph = 18,
    EnumerationBoundExceeded = 19,
    InvalidQuery = 20,
    ZeroEvidenceProbability = 21,
    NotAChain = 22,
    NotAPrefix = 23,
    WrongArity = 24,
    AllBasesRejected = 25,
    InvalidState = 26,
    InvalidModel = 27,
    Format = 28,
    Io = 29,
}

impl From<&MenError> for MenStatus {
    fn from(e: &MenError) -> Self {
        match e {
            MenError::MissingBinding { .. } => MenStatus::MissingBinding,
            MenError::InvalidPartition(_) => MenStatus::InvalidPartition,
            MenError::InvalidUnitary { .. } => MenStatus::InvalidUnitary,
            MenError::ZeroProbabilityOutcome { .. } => MenStatus::ZeroProbabilityOutcome,
            MenError::NotSeparable => MenStatus::NotSeparable,
            MenError::DegenerateState => MenStatus::DegenerateState,
            MenError::ZeroReferenceAmplitude { .. } => MenStatus::ZeroReferenceAmplitude,
            MenError::ZeroAmplitude { .. } => MenStatus::ZeroAmplitude,
            MenError::InconsistentGraph { .. } => MenStatus::InconsistentGraph,
            MenError::EnumerationBoundExceeded { .. } => MenStatus::EnumerationBoundExceeded,
            MenError::InvalidQuery(_) => MenStatus::InvalidQuery,
            MenError::ZeroEvidenceProbability => MenStatus::ZeroEvidenceProbability,
            MenError::NotAChain => MenStatus::NotAChain,
            MenError::NotAPrefix => MenStatus::NotAPrefix,
            MenError::WrongArity { .. } => MenStatus::WrongArity,
            MenError::AllBasesRejected => MenStatus::AllBasesRejected,
            MenError::InvalidState(_) => MenStatus::InvalidState,
            MenError::InvalidModel(_) => MenStatus::InvalidModel,
            MenError::Format(_) => MenStatus::Format,
            MenError::Io(_) => MenStatus::Io,
        }
    }
}

/// Numerical thresholds; see [`men_tolerance_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MenTolerance {
    pub rel_eps: f64,
    pub abs_eps: f64,
    pub zero_amp_threshold: f64,
}

/// Tripartite class tag.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MenClass {
    FullySeparable = 0,
    Biseparable = 1,
    WLike = 2,
    GhzLike = 3,
}

/// Value and operation count of a query.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MenQuery {
    pub value: f64,
    pub ln_value: f64,
    pub op_count: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

struct Failure(MenStatus, String);

impl From<MenError> for Failure {
    fn from(e: MenError) -> Self {
        Failure(MenStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: MenStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> MenStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MenStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MenStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    match p.as_ref() {
        Some(r) => Ok(r),
        None => fail(MenStatus::NullPointer, format!("{what} is NULL")),
    }
}

unsafe fn slice<'a, T>(p: *const T, len: size_t, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(MenStatus::NullPointer, format!("{what} is NULL"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    match p.as_mut() {
        Some(r) => Ok(r),
        None => fail(MenStatus::NullPointer, format!("{what} is NULL")),
    }
}

unsafe fn path_arg(p: *const c_char) -> FfiResult<PathBuf> {
    if p.is_null() {
        return fail(MenStatus::NullPointer, "path is NULL");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => fail(MenStatus::InvalidArgument, "path is not valid UTF-8"),
    }
}

unsafe fn tolerance_arg(p: *const MenTolerance) -> FfiResult<ToleranceConfig> {
    match p.as_ref() {
        None => Ok(ToleranceConfig::default()),
        Some(t) => ToleranceConfig::new(t.rel_eps, t.abs_eps, t.zero_amp_threshold)
            .map_err(|e| Failure(MenStatus::InvalidArgument, e.to_string())),
    }
}

unsafe fn assignment_arg(
    qubits: *const u32,
    bits: *const u8,
    len: size_t,
) -> FfiResult<Assignment> {
    let q = slice(qubits, len, "qubits")?;
    let b = slice(bits, len, "bits")?;
    if let Some(&bad) = b.iter().find(|&&v| v > 1) {
        return fail(
            MenStatus::InvalidArgument,
            format!("bit value {bad} is not 0 or 1"),
        );
    }
    Ok(Assignment::from_pairs(
        q.iter().zip(b).map(|(&q, &b)| (q as usize, b)),
    )?)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn men_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn men_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn men_tolerance_default() -> MenTolerance {
    let t = ToleranceConfig::default();
    MenTolerance {
        rel_eps: t.rel_eps,
        abs_eps: t.abs_eps,
        zero_amp_threshold: t.zero_amp_threshold,
    }
}

/// Builds a state from `2^n` real and imaginary parts in index order.
/// The vector must have unit norm within `1e-6`; larger drift than `1e-9`
/// is renormalized.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_state_new(
    n: size_t,
    re: *const f64,
    im: *const f64,
    len: size_t,
    out: *mut *mut MenStateHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        if n == 0 || n > men_core::state::MAX_DENSE_QUBITS || len != 1usize << n {
            return fail(
                MenStatus::InvalidArgument,
                format!("{len} amplitudes do not match n = {n}"),
            );
        }
        let amps: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() < men_core::format::RENORMALIZE_TOLERANCE) {
            return Err(MenError::InvalidState(format!("norm {norm} is not 1")).into());
        }
        let psi = if (norm - 1.0).abs() <= 1e-9 {
            PureState::new(n, amps)?
        } else {
            PureState::normalized(n, amps)?
        };
        *slot = boxed(MenStateHandle(psi));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_state_load(
    path: *const c_char,
    out: *mut *mut MenStateHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        *slot = boxed(MenStateHandle(load_state(&path_arg(path)?)?));
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn men_state_save(
    state: *const MenStateHandle,
    path: *const c_char,
) -> MenStatus {
    guard(|| Ok(save_state(&path_arg(path)?, &deref(state, "state")?.0)?))
}

/// Number of qubits, or 0 for a NULL handle.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn men_state_num_qubits(state: *const MenStateHandle) -> size_t {
    state.as_ref().map_or(0, |s| s.0.num_qubits())
}

/// Copies the `2^n` amplitudes into `re` and `im`, each of capacity `cap`.
///
/// # Safety
/// `re` and `im` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn men_state_amplitudes(
    state: *const MenStateHandle,
    re: *mut f64,
    im: *mut f64,
    cap: size_t,
) -> MenStatus {
    guard(|| {
        let psi = &deref(state, "state")?.0;
        if cap < psi.dim() {
            return fail(
                MenStatus::BufferTooSmall,
                format!("capacity {cap} is below {}", psi.dim()),
            );
        }
        if re.is_null() || im.is_null() {
            return fail(MenStatus::NullPointer, "output buffer is NULL");
        }
        for (k, a) in psi.amplitudes().iter().enumerate() {
            *re.add(k) = a.re;
            *im.add(k) = a.im;
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn men_state_free(state: *mut MenStateHandle) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Edges of the robust network graph as `(i, j)` pairs with `i < j`,
/// flattened into `edges` (capacity `cap` pairs). `count` receives the
/// number of edges even when the buffer is too small. `tol` may be NULL.
///
/// # Safety
/// `edges` must point to `2 * cap` writable values; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_state_graph(
    state: *const MenStateHandle,
    tol: *const MenTolerance,
    edges: *mut u32,
    cap: size_t,
    count: *mut size_t,
) -> MenStatus {
    guard(|| {
        let psi = &deref(state, "state")?.0;
        let tol = tolerance_arg(tol)?;
        let count = out(count, "count")?;
        let list = build_graph(psi, &tol).graph.edges();
        *count = list.len();
        if list.len() > cap {
            return fail(
                MenStatus::BufferTooSmall,
                format!("{} edges exceed capacity {cap}", list.len()),
            );
        }
        if !list.is_empty() && edges.is_null() {
            return fail(MenStatus::NullPointer, "edges is NULL");
        }
        for (k, (i, j)) in list.into_iter().enumerate() {
            *edges.add(2 * k) = i as u32;
            *edges.add(2 * k + 1) = j as u32;
        }
        Ok(())
    })
}

/// Extracts the network model of a state with no near-zero amplitudes.
///
/// # Safety
/// `state` must be a live handle; `tol` may be NULL; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_extract(
    state: *const MenStateHandle,
    tol: *const MenTolerance,
    out: *mut *mut MenModelHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let model = extract_men(&deref(state, "state")?.0, &tolerance_arg(tol)?)?;
        *slot = boxed(MenModelHandle(model));
        Ok(())
    })
}

/// Rebuilds the normalized state of a model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_reconstruct(
    model: *const MenModelHandle,
    out: *mut *mut MenStateHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        *slot = boxed(MenStateHandle(reconstruct_state(
            &deref(model, "model")?.0,
        )?));
        Ok(())
    })
}

/// Random nonzero model on the chain `1 - 2 - ... - n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_random_chain_model(
    n: size_t,
    seed: u64,
    out: *mut *mut MenModelHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let tol = ToleranceConfig::default();
        *slot = boxed(MenModelHandle(random_chain_model(
            n,
            seed,
            tol.zero_amp_threshold,
        )?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_model_load(
    path: *const c_char,
    out: *mut *mut MenModelHandle,
) -> MenStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        *slot = boxed(MenModelHandle(load_model(&path_arg(path)?)?));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn men_model_save(
    model: *const MenModelHandle,
    path: *const c_char,
) -> MenStatus {
    guard(|| Ok(save_model(&path_arg(path)?, &deref(model, "model")?.0)?))
}

/// Number of qubits, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn men_model_num_qubits(model: *const MenModelHandle) -> size_t {
    model.as_ref().map_or(0, |m| m.0.num_qubits())
}

/// 1 if the model graph is the chain `1 - 2 - ... - n`, else 0.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn men_model_is_chain(model: *const MenModelHandle) -> i32 {
    model
        .as_ref()
        .map_or(0, |m| i32::from(m.0.graph().is_chain()))
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn men_model_free(model: *mut MenModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `p(x_M) / p(x0)` for the partial assignment `qubits[k] = bits[k]`.
/// Chains take the linear-time path; other graphs are enumerated.
///
/// # Safety
/// `qubits` and `bits` must point to `len` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn men_marginal_ratio(
    model: *const MenModelHandle,
    qubits: *const u32,
    bits: *const u8,
    len: size_t,
    out: *mut MenQuery,
) -> MenStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let slot = self::out(out, "out")?;
        let x = assignment_arg(qubits, bits, len)?;
        let r = if model.graph().is_chain() {
            chain_marginal_ratio(model, &x)?
        } else {
            marginal_ratio(model, &x)?
        };
        *slot = MenQuery {
            value: r.value,
            ln_value: r.ln_value,
            op_count: r.op_count,
        };
        Ok(())
    })
}

/// `p(query | evidence)`; either assignment may be empty.
///
/// # Safety
/// Each array must hold its stated number of readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn men_conditional_probability(
    model: *const MenModelHandle,
    query_qubits: *const u32,
    query_bits: *const u8,
    query_len: size_t,
    evidence_qubits: *const u32,
    evidence_bits: *const u8,
    evidence_len: size_t,
    out: *mut f64,
) -> MenStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let slot = self::out(out, "out")?;
        let q = assignment_arg(query_qubits, query_bits, query_len)?;
        let e = assignment_arg(evidence_qubits, evidence_bits, evidence_len)?;
        *slot = conditional_probability(model, &q, &e)?;
        Ok(())
    })
}

/// Most likely basis assignment. `bits` receives `n` values, qubit 1 first.
///
/// # Safety
/// `bits` must point to `cap` writable bytes; `probability` must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_mle(
    model: *const MenModelHandle,
    bits: *mut u8,
    cap: size_t,
    probability: *mut f64,
) -> MenStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let n = model.num_qubits();
        let prob = out(probability, "probability")?;
        if cap < n {
            return fail(
                MenStatus::BufferTooSmall,
                format!("capacity {cap} is below {n}"),
            );
        }
        if bits.is_null() {
            return fail(MenStatus::NullPointer, "bits is NULL");
        }
        let r = if model.graph().is_chain() {
            mle_chain(model)?
        } else {
            mle_brute_force(&reconstruct_state(model)?)
        };
        for (k, b) in r.assignment.full_bits(n)?.into_iter().enumerate() {
            *bits.add(k) = b;
        }
        *prob = r.probability;
        Ok(())
    })
}

/// Classifies a three-qubit state. For `Biseparable`, `qubit` receives the
/// qubit that factors out; otherwise 0.
///
/// # Safety
/// `state` must be a live handle; `tol` may be NULL; `class` and `qubit`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn men_classify(
    state: *const MenStateHandle,
    samples: size_t,
    seed: u64,
    tol: *const MenTolerance,
    class: *mut MenClass,
    qubit: *mut u32,
) -> MenStatus {
    guard(|| {
        let psi = &deref(state, "state")?.0;
        let tol = tolerance_arg(tol)?;
        let class = out(class, "class")?;
        let qubit = out(qubit, "qubit")?;
        let (c, q) = match classify(psi, samples, seed, &tol)? {
            TripartiteClass::FullySeparable => (MenClass::FullySeparable, 0),
            TripartiteClass::Biseparable(i) => (MenClass::Biseparable, i as u32),
            TripartiteClass::WLike => (MenClass::WLike, 0),
            TripartiteClass::GhzLike => (MenClass::GhzLike, 0),
        };
        *class = c;
        *qubit = q;
        Ok(())
    })
}
