//! C interface: opaque handles, status codes and a per-thread error message.
//!
//! Every handle returned through an out-pointer is owned by the caller and
//! released with the matching `*_free` function. Randomness is drawn from a
//! ChaCha20 stream keyed by the `seed` argument, so equal seeds reproduce
//! equal outputs.
//!
//! Pointer arguments must be null or valid for the access their type implies;
//! null inputs are reported as `TS_STATUS_NULL_POINTER`. Byte buffers must
//! hold `len` readable bytes. Each handle may be freed once and must not be
//! shared across threads while a call on it is in progress.

#![allow(clippy::missing_safety_doc)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use tracesig::encoding::Encode;
use tracesig::lattice::ParamSet;
use tracesig::scheme::{self, Certificate, ClaimProof, GroupKeys, GroupSignature, TracingTrapdoor, UserSecret};
use tracesig::sigs::usersig_keygen;
use tracesig::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// A cryptographic check failed or the operation had no result.
    Rejected = 1,
    NullPointer = 2,
    InvalidParams = 3,
    Malformed = 4,
    GroupFull = 5,
    Internal = 6,
}

pub struct TsParams(ParamSet);

/// Group public key together with the manager and opener keys and the registry.
pub struct TsGroup(GroupKeys);

pub struct TsMember {
    id: u64,
    usk: UserSecret,
    cert: Certificate,
}

pub struct TsSignature(GroupSignature);

pub struct TsTrapdoor(TracingTrapdoor);

pub struct TsClaim(ClaimProof);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TsStatus {
    match e {
        Error::Param(_) => TsStatus::InvalidParams,
        Error::Decode(_) | Error::Integrity(_) | Error::Dimension(_) | Error::ModulusMismatch(..) => TsStatus::Malformed,
        Error::Registry(_) => TsStatus::GroupFull,
        Error::Rejected(_) | Error::Witness(_) | Error::KeyExhausted | Error::KeyConsumed => TsStatus::Rejected,
        _ => TsStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<TsStatus, Error>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TsStatus::Internal
        }
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => {
                set_error(format!("{} is null", stringify!($p)));
                return Ok(TsStatus::NullPointer);
            }
        }
    };
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if len == 0 {
        Some(&[])
    } else if data.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(data, len))
    }
}

macro_rules! input {
    ($data:expr, $len:expr) => {
        match unsafe { bytes($data, $len) } {
            Some(b) => b,
            None => {
                set_error(format!("{} is null", stringify!($data)));
                return Ok(TsStatus::NullPointer);
            }
        }
    };
}

fn put<T>(out: *mut *mut T, value: T) -> TsStatus {
    if out.is_null() {
        set_error("output pointer is null".into());
        return TsStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    TsStatus::Ok
}

fn put_flag(out: *mut bool, value: bool) -> TsStatus {
    if out.is_null() {
        set_error("output pointer is null".into());
        return TsStatus::NullPointer;
    }
    unsafe { *out = value };
    TsStatus::Ok
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parameters for security level `lambda` and group size `2^l - 1`.
#[no_mangle]
pub unsafe extern "C" fn ts_setup(lambda: usize, group_size: u64, out: *mut *mut TsParams) -> TsStatus {
    guard(|| Ok(put(out, TsParams(scheme::setup(lambda, group_size)?))))
}

#[no_mangle]
pub unsafe extern "C" fn ts_params_free(params: *mut TsParams) {
    free(params)
}

#[no_mangle]
pub unsafe extern "C" fn ts_group_keygen(params: *const TsParams, seed: u64, out: *mut *mut TsGroup) -> TsStatus {
    guard(|| {
        let pp = deref!(params);
        Ok(put(out, TsGroup(scheme::keygen(&pp.0, &mut ChaCha20Rng::seed_from_u64(seed))?)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_group_free(group: *mut TsGroup) {
    free(group)
}

/// Number of members registered so far.
#[no_mangle]
pub unsafe extern "C" fn ts_group_size(group: *const TsGroup, out: *mut u64) -> TsStatus {
    guard(|| {
        let g = deref!(group);
        if out.is_null() {
            return Ok(TsStatus::NullPointer);
        }
        unsafe { *out = g.0.registry.counter() };
        Ok(TsStatus::Ok)
    })
}

/// Runs the whole join exchange for a fresh applicant.
#[no_mangle]
pub unsafe extern "C" fn ts_group_join(group: *mut TsGroup, seed: u64, out: *mut *mut TsMember) -> TsStatus {
    guard(|| {
        let g = match unsafe { group.as_mut() } {
            Some(g) => &mut g.0,
            None => return Ok(TsStatus::NullPointer),
        };
        let rng = &mut ChaCha20Rng::seed_from_u64(seed);
        let (_, mut user_sk) = usersig_keygen(rng);
        let (request, pending) = scheme::join_user_request(&g.gpk, &mut user_sk, rng)?;
        let response = scheme::join_gm_process(&g.gsk, &g.gpk, &mut g.registry, &request, rng)?;
        let (id, usk, cert) = scheme::join_user_finalize(&g.gpk, &pending, &response)?;
        Ok(put(out, TsMember { id, usk, cert }))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_member_id(member: *const TsMember) -> u64 {
    unsafe { member.as_ref() }.map_or(0, |m| m.id)
}

#[no_mangle]
pub unsafe extern "C" fn ts_member_free(member: *mut TsMember) {
    free(member)
}

#[no_mangle]
pub unsafe extern "C" fn ts_sign(
    group: *const TsGroup,
    member: *const TsMember,
    msg: *const u8,
    msg_len: usize,
    seed: u64,
    out: *mut *mut TsSignature,
) -> TsStatus {
    guard(|| {
        let (g, m, msg) = (deref!(group), deref!(member), input!(msg, msg_len));
        let sigma = scheme::sign(&g.0.gpk, &m.usk, &m.cert, msg, &mut ChaCha20Rng::seed_from_u64(seed))?;
        Ok(put(out, TsSignature(sigma)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_signature_free(sig: *mut TsSignature) {
    free(sig)
}

#[no_mangle]
pub unsafe extern "C" fn ts_verify(group: *const TsGroup, msg: *const u8, msg_len: usize, sig: *const TsSignature, valid: *mut bool) -> TsStatus {
    guard(|| {
        let (g, msg, s) = (deref!(group), input!(msg, msg_len), deref!(sig));
        Ok(put_flag(valid, scheme::verify(&g.0.gpk, msg, &s.0)))
    })
}

/// Writes the signer's identifier, or returns `TS_STATUS_REJECTED`.
#[no_mangle]
pub unsafe extern "C" fn ts_open(group: *const TsGroup, msg: *const u8, msg_len: usize, sig: *const TsSignature, id: *mut u64) -> TsStatus {
    guard(|| {
        let (g, msg, s) = (deref!(group), input!(msg, msg_len), deref!(sig));
        if id.is_null() {
            return Ok(TsStatus::NullPointer);
        }
        match scheme::open(&g.0.gpk, &g.0.osk, msg, &s.0) {
            Some(v) => {
                unsafe { *id = v };
                Ok(TsStatus::Ok)
            }
            None => Err(Error::Rejected("signature does not open".into())),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_reveal(group: *const TsGroup, id: u64, out: *mut *mut TsTrapdoor) -> TsStatus {
    guard(|| {
        let g = &deref!(group).0;
        match scheme::reveal(&g.gpk, &g.osk, &g.registry, id)? {
            Some(td) => Ok(put(out, TsTrapdoor(td))),
            None => Err(Error::Rejected(format!("no registered member {id}"))),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_trapdoor_free(trapdoor: *mut TsTrapdoor) {
    free(trapdoor)
}

#[no_mangle]
pub unsafe extern "C" fn ts_trace(group: *const TsGroup, trapdoor: *const TsTrapdoor, sig: *const TsSignature, matched: *mut bool) -> TsStatus {
    guard(|| {
        let (g, td, s) = (deref!(group), deref!(trapdoor), deref!(sig));
        Ok(put_flag(matched, scheme::trace(&g.0.gpk, &td.0, &s.0)))
    })
}

/// Returns `TS_STATUS_REJECTED` when the member did not produce the signature.
#[no_mangle]
pub unsafe extern "C" fn ts_claim(
    group: *const TsGroup,
    member: *const TsMember,
    msg: *const u8,
    msg_len: usize,
    sig: *const TsSignature,
    seed: u64,
    out: *mut *mut TsClaim,
) -> TsStatus {
    guard(|| {
        let (g, m, msg, s) = (deref!(group), deref!(member), input!(msg, msg_len), deref!(sig));
        match scheme::claim(&g.0.gpk, &m.usk, msg, &s.0, &mut ChaCha20Rng::seed_from_u64(seed))? {
            Some(proof) => Ok(put(out, TsClaim(proof))),
            None => Err(Error::Rejected("member cannot claim this signature".into())),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_claim_free(claim: *mut TsClaim) {
    free(claim)
}

#[no_mangle]
pub unsafe extern "C" fn ts_claim_verify(
    group: *const TsGroup,
    msg: *const u8,
    msg_len: usize,
    sig: *const TsSignature,
    claim: *const TsClaim,
    valid: *mut bool,
) -> TsStatus {
    guard(|| {
        let (g, msg, s, c) = (deref!(group), input!(msg, msg_len), deref!(sig), deref!(claim));
        Ok(put_flag(valid, scheme::claim_verify(&g.0.gpk, msg, &s.0, &c.0)))
    })
}

/// A byte buffer allocated by this library; release with `ts_buffer_free`.
#[repr(C)]
pub struct TsBuffer {
    pub data: *mut u8,
    pub len: usize,
}

#[no_mangle]
pub unsafe extern "C" fn ts_signature_encode(sig: *const TsSignature, out: *mut TsBuffer) -> TsStatus {
    guard(|| {
        let s = deref!(sig);
        if out.is_null() {
            return Ok(TsStatus::NullPointer);
        }
        let boxed = s.0.to_bytes().into_boxed_slice();
        let len = boxed.len();
        let data = Box::into_raw(boxed) as *mut u8;
        unsafe { *out = TsBuffer { data, len } };
        Ok(TsStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_signature_decode(group: *const TsGroup, data: *const u8, len: usize, out: *mut *mut TsSignature) -> TsStatus {
    guard(|| {
        let (g, data) = (deref!(group), input!(data, len));
        Ok(put(out, TsSignature(GroupSignature::from_bytes_for(data, &g.0.gpk)?)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_buffer_free(buffer: TsBuffer) {
    if !buffer.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(buffer.data, buffer.len)));
    }
}
