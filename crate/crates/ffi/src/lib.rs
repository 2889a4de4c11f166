//! C ABI for locspec.
//!
//! Models and samples are opaque handles created and freed through this
//! API. Every fallible call returns an [`LsStatus`]; on failure the message
//! is available from [`ls_last_error`] on the same thread. Panics are caught
//! at the boundary and reported as `LS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use locspec::kernel::SmoothingKernel;
use locspec::process::{simulate_stream, ModelSpec, Sample, TvArmaModel};
use locspec::spectral::{spectral_mean_freq, spectral_mean_lag, FrequencyGrid, Taper};
use locspec::verify::FunctionalRef;
use locspec::whittle::{fit_whittle, local_yule_walker, FamilySpec, OptimizerConfig, SpectralFamily};
use locspec::Error;
use serde::de::DeserializeOwned;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    InvalidCurve = 5,
    InvalidModel = 6,
    OutOfBand = 7,
    OutsideBox = 8,
    IllConditioned = 9,
    Numerical = 10,
    Io = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsKernel {
    Epanechnikov = 0,
    Triangular = 1,
    Uniform = 2,
}

/// Evaluation route for spectral means.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsRoute {
    Frequency = 0,
    Lag = 1,
}

/// Opaque validated tvARMA model.
pub struct LsModel(TvArmaModel);

/// Opaque observed or simulated series.
pub struct LsSample(Sample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> LsStatus {
    match err {
        Error::InvalidCurve(_) => LsStatus::InvalidCurve,
        Error::InvalidModel(_) => LsStatus::InvalidModel,
        Error::InvalidArgument(_) => LsStatus::InvalidArgument,
        Error::OutOfBand { .. } => LsStatus::OutOfBand,
        Error::OutsideBox { .. } => LsStatus::OutsideBox,
        Error::IllConditioned { .. } => LsStatus::IllConditioned,
        Error::Numerical(_) => LsStatus::Numerical,
        Error::Config(_) => LsStatus::Config,
        Error::Io { .. } => LsStatus::Io,
    }
}

enum Failure {
    Status(LsStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(LsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(LsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Lib(Error::Config(format!("{what}: {e}"))))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a model from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_from_json(json: *const c_char, out: *mut *mut LsModel) -> LsStatus {
    guard(|| {
        let spec: ModelSpec = parse_json(read_str(json, "json")?, "model")?;
        let model = TvArmaModel::from_spec(&spec)?;
        write_out(out, Box::into_raw(Box::new(LsModel(model))), "out")
    })
}

/// # Safety
/// `model` must come from [`ls_model_from_json`] and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_model_free(model: *mut LsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `f(u, lambda)`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_spectral_density(model: *const LsModel, u: f64, lambda: f64, out: *mut f64) -> LsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        write_out(out, m.0.spectral_density(u, lambda), "out")
    })
}

/// `c(u, k)`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_covariance(model: *const LsModel, u: f64, k: i64, out: *mut f64) -> LsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        write_out(out, m.0.covariance(u, k), "out")
    })
}

/// Simulates `n` observations from stream `stream` of `seed`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_simulate(
    model: *const LsModel,
    n: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut LsSample,
) -> LsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let s = simulate_stream(&m.0, n, seed, stream, None)?;
        write_out(out, Box::into_raw(Box::new(LsSample(s))), "out")
    })
}

/// Copies `n` values into a new sample.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_sample_from_values(values: *const f64, n: usize, out: *mut *mut LsSample) -> LsStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, n).to_vec();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Failure::Lib(Error::InvalidArgument("sample contains non-finite values".into())));
        }
        write_out(out, Box::into_raw(Box::new(LsSample(Sample::from_values(v)))), "out")
    })
}

/// # Safety
/// `sample` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ls_sample_len(sample: *const LsSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.n())
}

/// Copies the sample into `buf`, which must hold `ls_sample_len` values.
///
/// # Safety
/// `sample` must be a live handle; `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_sample_values(sample: *const LsSample, buf: *mut f64, cap: usize) -> LsStatus {
    guard(|| {
        let s = deref(sample, "sample")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = s.0.values();
        if cap < v.len() {
            return Err(Failure::Status(LsStatus::BufferTooSmall, format!("need {} values, buffer holds {cap}", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// # Safety
/// `sample` must come from this API and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_sample_free(sample: *mut LsSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Untapered spectral mean `F_n(phi)`. `functional` is a menu name such as
/// `"cos1"` or an inline functional in JSON.
///
/// # Safety
/// `sample` must be a live handle, `functional` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_spectral_mean(
    sample: *const LsSample,
    functional: *const c_char,
    route: LsRoute,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        let s = deref(sample, "sample")?;
        let text = read_str(functional, "functional")?;
        let fref = serde_json::from_str::<FunctionalRef>(text).unwrap_or_else(|_| FunctionalRef::Named(text.to_string()));
        let (_, phi) = fref.resolve()?;
        let n = s.0.n();
        let taper = Taper::none(n);
        let v = match route {
            LsRoute::Frequency => spectral_mean_freq(&s.0, &taper, &phi, &FrequencyGrid::exact_for(n))?,
            LsRoute::Lag => spectral_mean_lag(&s.0, &taper, &phi, None)?,
        };
        write_out(out, v, "out")
    })
}

/// Global Whittle fit. `family_json` is e.g. `{"family":{"kind":"ar","p":2}}`.
/// The parameter vector `(ar..., ma..., sigma2)` goes to `theta`; its length
/// is written to `dim` even when `cap` is too small.
///
/// # Safety
/// Pointers must be valid; `theta` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_fit_whittle(
    sample: *const LsSample,
    family_json: *const c_char,
    theta: *mut f64,
    cap: usize,
    dim: *mut usize,
) -> LsStatus {
    guard(|| {
        let s = deref(sample, "sample")?;
        let spec: FamilySpec = parse_json(read_str(family_json, "family_json")?, "family")?;
        let fam = SpectralFamily::new(&spec)?;
        let fit = fit_whittle(&s.0, &fam, &OptimizerConfig::default())?;
        write_out(dim, fit.theta.len(), "dim")?;
        if theta.is_null() {
            return Err(null("theta"));
        }
        if cap < fit.theta.len() {
            return Err(Failure::Status(LsStatus::BufferTooSmall, format!("need {} values", fit.theta.len())));
        }
        ptr::copy_nonoverlapping(fit.theta.as_ptr(), theta, fit.theta.len());
        Ok(())
    })
}

/// Local Yule-Walker estimate at `u`: `p` coefficients into `alpha` and the
/// innovation variance into `sigma2`.
///
/// # Safety
/// `sample` must be a live handle; `alpha` must hold `p` doubles; `sigma2` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_local_yule_walker(
    sample: *const LsSample,
    p: usize,
    kernel: LsKernel,
    bandwidth: f64,
    u: f64,
    alpha: *mut f64,
    sigma2: *mut f64,
) -> LsStatus {
    guard(|| {
        let s = deref(sample, "sample")?;
        let k = match kernel {
            LsKernel::Epanechnikov => SmoothingKernel::Epanechnikov,
            LsKernel::Triangular => SmoothingKernel::Triangular,
            LsKernel::Uniform => SmoothingKernel::Uniform,
        };
        let fit = local_yule_walker(&s.0, p, k, bandwidth, u)?;
        if p > 0 && alpha.is_null() {
            return Err(null("alpha"));
        }
        if p > 0 {
            ptr::copy_nonoverlapping(fit.alpha.as_ptr(), alpha, p);
        }
        write_out(sigma2, fit.sigma2, "sigma2")
    })
}
