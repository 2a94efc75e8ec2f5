//! C ABI for the dephasim engine.
//!
//! Models are opaque handles built from the same JSON document the CLI reads.
//! Every call returns a [`DephasimStatus`]; on failure the message is
//! available from [`dephasim_last_error_message`] on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dephasim::cli::config::{parse_config, resolve, Overrides};
use dephasim::decoherence::{point, reduced_density_matrix, theta_phase, thermal_factor};
use dephasim::kernels::QuadratureSpec;
use dephasim::oracle::{oracle_overlap, truncation_autotune, Truncation};
use dephasim::{Error, LevelPair, ValidatedModel};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidArgument = 4,
    ResourceLimit = 5,
    TruncationInsufficient = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

/// Decoherence factor of one level pair at one time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DephasimPoint {
    pub t: f64,
    pub vacuum_part: f64,
    /// Signed Laguerre product (Fock) or thermal multiplier.
    pub excitation_part: f64,
    pub total: f64,
    pub theta: f64,
    pub gaussian_total: f64,
}

/// Opaque model handle.
pub struct DephasimModel {
    model: ValidatedModel,
    quad: QuadratureSpec,
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(v) => v,
    Err(_) => panic!("version string"),
};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: DephasimStatus,
    message: String,
}

impl Failure {
    fn new(status: DephasimStatus, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionCap { .. } | Error::QuadratureNonConvergence { .. } | Error::ThermalNonConvergence { .. } => {
                DephasimStatus::ResourceLimit
            }
            Error::TruncationInsufficient { .. } => DephasimStatus::TruncationInsufficient,
            _ => DephasimStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DephasimStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DephasimStatus::Ok,
        Ok(Err(fail)) => {
            set_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_error("internal panic");
            DephasimStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(DephasimStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn handle<'a>(model: *const DephasimModel) -> Result<&'a DephasimModel, Failure> {
    non_null(model, "model")?;
    Ok(unsafe { &*model })
}

fn pair(h: &DephasimModel, n: usize, m: usize) -> Result<LevelPair, Failure> {
    Ok(h.model.pair(n, m)?)
}

/// Library version, e.g. `"0.1.0"`. The string is static.
#[no_mangle]
pub extern "C" fn dephasim_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dephasim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parse a JSON config (NUL-terminated UTF-8) into a new model handle.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dephasim_model_from_json(json: *const c_char, out: *mut *mut DephasimModel) -> DephasimStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| Failure::new(DephasimStatus::InvalidUtf8, e.to_string()))?;
        let file = parse_config(text).map_err(|e| Failure::new(DephasimStatus::InvalidConfig, e.to_string()))?;
        let cfg = resolve(file, &Overrides::default()).map_err(|e| Failure::new(DephasimStatus::InvalidConfig, e.to_string()))?;
        let boxed = Box::new(DephasimModel { model: cfg.model, quad: cfg.quad });
        unsafe { *out = Box::into_raw(boxed) };
        Ok(())
    })
}

/// Release a handle from [`dephasim_model_from_json`]. NULL is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dephasim_model_free(model: *mut DephasimModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Number of system levels.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephasim_model_levels(model: *const DephasimModel, out: *mut usize) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(out, "out")?;
        unsafe { *out = h.model.levels() };
        Ok(())
    })
}

/// Decoherence factor of pair `(n, m)` at time `t` for the model's bath state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephasim_decoherence_factor(
    model: *const DephasimModel,
    n: usize,
    m: usize,
    t: f64,
    out: *mut DephasimPoint,
) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(out, "out")?;
        let p = point(&h.model, pair(h, n, m)?, t, &h.quad)?;
        unsafe {
            *out = DephasimPoint {
                t: p.t,
                vacuum_part: p.vacuum_part,
                excitation_part: p.excitation_part,
                total: p.total,
                theta: p.theta,
                gaussian_total: p.gaussian_total,
            }
        };
        Ok(())
    })
}

/// Phase of `ρ_nm(t)` relative to `ρ_nm(0)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephasim_theta_phase(
    model: *const DephasimModel,
    n: usize,
    m: usize,
    t: f64,
    out: *mut f64,
) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(out, "out")?;
        unsafe { *out = theta_phase(&h.model, pair(h, n, m)?, t)? };
        Ok(())
    })
}

/// Thermal decoherence factor at an explicit temperature.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephasim_thermal_factor(
    model: *const DephasimModel,
    n: usize,
    m: usize,
    t: f64,
    temperature: f64,
    out: *mut f64,
) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(out, "out")?;
        unsafe { *out = thermal_factor(&h.model, pair(h, n, m)?, t, temperature, &h.quad)? };
        Ok(())
    })
}

/// Reduced density matrix at `t`, row-major with interleaved `(re, im)`:
/// `buf[2 (i N + j)] = Re ρ_ij`. `len` is the buffer length in doubles and
/// must be at least `2 N²`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dephasim_reduced_density(
    model: *const DephasimModel,
    t: f64,
    buf: *mut f64,
    len: usize,
) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(buf, "buf")?;
        let n = h.model.levels();
        if len < 2 * n * n {
            return Err(Failure::new(DephasimStatus::BufferTooSmall, format!("need {} doubles, got {len}", 2 * n * n)));
        }
        let rho = reduced_density_matrix(&h.model, t, &h.quad)?;
        let out = unsafe { std::slice::from_raw_parts_mut(buf, 2 * n * n) };
        for i in 0..n {
            for j in 0..n {
                out[2 * (i * n + j)] = rho[(i, j)].re;
                out[2 * (i * n + j) + 1] = rho[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// Brute-force branch overlap `<χ_m(t)|χ_n(t)>` on a truncated Fock space.
/// `trunc_dim = 0` picks the dimension automatically.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephasim_oracle_overlap(
    model: *const DephasimModel,
    n: usize,
    m: usize,
    t: f64,
    trunc_dim: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> DephasimStatus {
    guard(|| {
        let h = unsafe { handle(model) }?;
        non_null(out_re, "out_re")?;
        non_null(out_im, "out_im")?;
        let modes = h.model.bath().modes().ok_or(Error::OracleNeedsDiscreteBath)?.len();
        let trunc = if trunc_dim == 0 {
            truncation_autotune(&h.model, t, 1e-12)?
        } else {
            Truncation::uniform(modes, trunc_dim)
        };
        let v = oracle_overlap(&h.model, pair(h, n, m)?, t, &trunc)?;
        unsafe {
            *out_re = v.re;
            *out_im = v.im;
        }
        Ok(())
    })
}
