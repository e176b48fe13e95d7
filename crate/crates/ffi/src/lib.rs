//! C ABI over the draftrank inference path.
//!
//! Every fallible function returns a [`DrStatus`]; on failure the message is
//! available from [`dr_last_error_message`] on the same thread. Models are
//! opaque [`DrModel`] handles created by [`dr_model_load`] and released with
//! [`dr_model_free`]. Ranked output is written into caller-owned buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use draftrank::draft::CatalogFingerprint;
use draftrank::eval::kendall_tau;
use draftrank::preference::{encode_pool, ranknet_loss, triplet_loss, CardId, Head, PreferenceModel};
use draftrank::training::load_checkpoint;
use draftrank::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Catalog = 4,
    Format = 5,
    Validation = 6,
    Config = 7,
    Version = 8,
    Compatibility = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrHead {
    Cpr = 0,
    Ranknet = 1,
}

/// A loaded checkpoint ready for ranking.
pub struct DrModel {
    model: PreferenceModel,
    catalog: CatalogFingerprint,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(error: &Error) -> DrStatus {
    match error {
        Error::Shape(_) => DrStatus::Shape,
        Error::Input(_) | Error::Usage(_) => DrStatus::InvalidArgument,
        Error::Catalog(_) => DrStatus::Catalog,
        Error::Format { .. } => DrStatus::Format,
        Error::Validation { .. } => DrStatus::Validation,
        Error::Config(_) => DrStatus::Config,
        Error::Version { .. } => DrStatus::Version,
        Error::Compatibility(_) => DrStatus::Compatibility,
        Error::Io { .. } => DrStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DrStatus, String)>) -> DrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DrStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DrStatus::Panic
        }
    }
}

fn lift(e: Error) -> (DrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DrStatus, String) {
    (DrStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `ptr` must point to `len` readable values, or be null when `len` is 0.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], (DrStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn cards(ids: &[u32]) -> Vec<CardId> {
    ids.iter().copied().map(CardId).collect()
}

/// Message for the last failed call on this thread ("" after success).
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn dr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load a checkpoint file into a new handle stored in `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dr_model_load(path: *const c_char, out: *mut *mut DrModel) -> DrStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (DrStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let ckpt = load_checkpoint(path).map_err(lift)?;
        let model = ckpt.model().map_err(lift)?;
        *out = Box::into_raw(Box::new(DrModel {
            model,
            catalog: ckpt.catalog,
        }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `model` must come from [`dr_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dr_model_free(model: *mut DrModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn model_ref<'a>(model: *const DrModel) -> Result<&'a DrModel, (DrStatus, String)> {
    model.as_ref().ok_or_else(|| null("model"))
}

/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dr_model_head(model: *const DrModel, out: *mut DrHead) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match m.model.head() {
            Head::Cpr => DrHead::Cpr,
            Head::Ranknet => DrHead::Ranknet,
        };
        Ok(())
    })
}

/// Number of cards in the model's catalog (its input dimension).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dr_model_card_count(model: *const DrModel, out: *mut usize) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.model.card_count();
        Ok(())
    })
}

/// Embedding dimension D (1 for ranknet).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dr_model_output_dim(model: *const DrModel, out: *mut usize) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.model.net().output_dim();
        Ok(())
    })
}

/// Hex SHA-256 of the catalog names the model was trained on, written with a
/// trailing NUL into `buf` (65 bytes needed).
///
/// # Safety
/// `model` must be a live handle and `buf` writable for `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn dr_model_catalog_sha256(model: *const DrModel, buf: *mut c_char, buf_len: usize) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let hex = m.catalog.names_sha256.as_bytes();
        if buf_len < hex.len() + 1 {
            return Err((DrStatus::BufferTooSmall, format!("need {} bytes", hex.len() + 1)));
        }
        ptr::copy_nonoverlapping(hex.as_ptr().cast(), buf, hex.len());
        *buf.add(hex.len()) = 0;
        Ok(())
    })
}

/// Rank `pack` given `pool`. Writes `pack_len` card ids in ranked order to
/// `out_cards` and their scores (cpr: distance, ascending; ranknet: utility,
/// descending) to `out_scores`; either output may be null.
///
/// # Safety
/// Input arrays must hold the stated number of elements; non-null outputs
/// must be writable for `pack_len` elements.
#[no_mangle]
pub unsafe extern "C" fn dr_model_rank(
    model: *const DrModel,
    pool: *const u32,
    pool_len: usize,
    pack: *const u32,
    pack_len: usize,
    out_cards: *mut u32,
    out_scores: *mut f64,
) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        let pool = slice(pool, pool_len, "pool")?;
        let pack = slice(pack, pack_len, "pack")?;
        let encoded = encode_pool(&cards(pool), m.model.card_count()).map_err(lift)?;
        let ranked = m.model.rank(&encoded, &cards(pack)).map_err(lift)?;
        for (i, e) in ranked.entries.iter().enumerate() {
            if !out_cards.is_null() {
                *out_cards.add(i) = e.card.0;
            }
            if !out_scores.is_null() {
                *out_scores.add(i) = e.score;
            }
        }
        Ok(())
    })
}

/// Embed a pool; writes `dim` values where `dim` must equal the output dimension.
///
/// # Safety
/// `pool` must hold `pool_len` ids and `out` be writable for `dim` values.
#[no_mangle]
pub unsafe extern "C" fn dr_model_embed_pool(
    model: *const DrModel,
    pool: *const u32,
    pool_len: usize,
    out: *mut f64,
    dim: usize,
) -> DrStatus {
    guard(|| {
        let m = model_ref(model)?;
        let pool = slice(pool, pool_len, "pool")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let want = m.model.net().output_dim();
        if dim != want {
            return Err((DrStatus::Shape, format!("dim {dim} does not match model output {want}")));
        }
        let encoded = encode_pool(&cards(pool), m.model.card_count()).map_err(lift)?;
        let e = m.model.embed_pool(&encoded).map_err(lift)?;
        ptr::copy_nonoverlapping(e.0.as_ptr(), out, dim);
        Ok(())
    })
}

/// Triplet loss max(d(a,p) - d(a,n) + margin, 0) on `dim`-vectors.
///
/// # Safety
/// `a`, `p`, `n` must each hold `dim` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dr_triplet_loss(
    a: *const f64,
    p: *const f64,
    n: *const f64,
    dim: usize,
    margin: f64,
    out: *mut f64,
) -> DrStatus {
    guard(|| {
        let (a, p, n) = (slice(a, dim, "a")?, slice(p, dim, "p")?, slice(n, dim, "n")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = triplet_loss(a, p, n, margin).map_err(lift)?.loss;
        Ok(())
    })
}

/// Pairwise logistic loss -log sigmoid(u_pos - u_neg); NaN for non-finite input.
#[no_mangle]
pub extern "C" fn dr_ranknet_loss(u_pos: f64, u_neg: f64) -> f64 {
    ranknet_loss(u_pos, u_neg).map(|l| l.loss).unwrap_or(f64::NAN)
}

/// Kendall tau-b of two length-`len` sequences.
///
/// # Safety
/// `x` and `y` must each hold `len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dr_kendall_tau(x: *const f64, y: *const f64, len: usize, out: *mut f64) -> DrStatus {
    guard(|| {
        let (x, y) = (slice(x, len, "x")?, slice(y, len, "y")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = kendall_tau(x, y).map_err(lift)?;
        Ok(())
    })
}
