//! C ABI for `acfront`.
//!
//! Every fallible function returns an [`AcfStatus`]; on failure a description is available from
//! [`acf_last_error`] on the calling thread. Objects are opaque handles created by `*_new`,
//! `*_parse` or `*_run` functions and released with the matching `*_free` function.

use acfront::core::Orientation;
use acfront::forcing::{Epsilon, Forcing, Topography};
use acfront::frontdyn::{integrate, nfront_rhs, FrontModel, FrontState, IntegrateControls};
use acfront::geometry::{homoclinic_intersections, SectionSettings};
use acfront::melnikov::MelnikovFn;
use acfront::pde::{self, PdeOutcome, PdeResult, PdeRunConfig};
use acfront::stationary::enumerate_stationary_localized;
use acfront::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments were rejected (bad spec string, non-monotone positions, eps out of range...).
    InvalidInput = 2,
    /// A numerical method failed (non-convergence, NaN, step-size underflow...).
    NumericFailure = 3,
    UnknownScenario = 4,
    /// The output buffer is shorter than the result; the required length is still reported.
    BufferTooSmall = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Front orientation: `Up` connects -1 to +1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfOrientation {
    Up = 0,
    Down = 1,
}

impl From<AcfOrientation> for Orientation {
    fn from(o: AcfOrientation) -> Self {
        match o {
            AcfOrientation::Up => Orientation::Up,
            AcfOrientation::Down => Orientation::Down,
        }
    }
}

/// How a PDE run ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfPdeOutcome {
    Completed = 0,
    Pinned = 1,
    AllFrontsAnnihilated = 2,
}

/// Opaque forcing description.
pub struct AcfForcing {
    inner: Forcing,
}

/// Opaque Melnikov function evaluator.
pub struct AcfMelnikov {
    inner: MelnikovFn,
}

/// Opaque PDE run configuration.
pub struct AcfPdeConfig {
    inner: PdeRunConfig,
}

/// Opaque PDE run result.
pub struct AcfPdeResult {
    inner: PdeResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AcfStatus {
    match err {
        Error::UnknownScenario(_) => AcfStatus::UnknownScenario,
        Error::Io(_) | Error::Csv(_) => AcfStatus::Io,
        e if e.exit_code() == 3 => AcfStatus::InvalidInput,
        _ => AcfStatus::NumericFailure,
    }
}

fn fail(status: AcfStatus, msg: impl Into<String>) -> AcfStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), AcfStatus>>(f: F) -> AcfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcfStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(AcfStatus::Panic, format!("panic: {msg}"))
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, AcfStatus>;
}

impl<T> OrStatus<T> for acfront::Result<T> {
    fn or_status(self) -> Result<T, AcfStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, AcfStatus> {
    if p.is_null() {
        return Err(fail(AcfStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AcfStatus::InvalidInput, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, AcfStatus> {
    p.as_ref().ok_or_else(|| fail(AcfStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, AcfStatus> {
    p.as_mut().ok_or_else(|| fail(AcfStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], AcfStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(AcfStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Copies `src` into the caller buffer `dst` of capacity `cap`, storing the full length in `len`.
unsafe fn copy_out(src: &[f64], dst: *mut f64, cap: usize, len: *mut usize) -> Result<(), AcfStatus> {
    *out_arg(len, "len")? = src.len();
    if src.len() > cap {
        return Err(fail(AcfStatus::BufferTooSmall, format!("buffer holds {cap} values, {} needed", src.len())));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(fail(AcfStatus::NullPointer, "output buffer is null"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn acf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn acf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a forcing spec (`zero`, `topo:exp:1`, `triple:1,0,0,2`, `canonical:cos:1:2;const:0;const:0`).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_forcing_parse(spec: *const c_char, out: *mut *mut AcfForcing) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f: Forcing = str_arg(spec, "spec")?.parse().or_status()?;
        *out = Box::into_raw(Box::new(AcfForcing { inner: f }));
        Ok(())
    })
}

/// Topographic forcing from a topography spec (`exp:MU`, `-alg:P`, `sin:AMP:K`, ...).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_forcing_topography(spec: *const c_char, out: *mut *mut AcfForcing) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let t: Topography = str_arg(spec, "spec")?.parse().or_status()?;
        *out = Box::into_raw(Box::new(AcfForcing { inner: Forcing::topography(t) }));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from `acf_forcing_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acf_forcing_free(f: *mut AcfForcing) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Melnikov evaluator for `forcing` and front orientation `o` (closed form when available).
///
/// # Safety
/// `forcing` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_melnikov_new(forcing: *const AcfForcing, o: AcfOrientation, out: *mut *mut AcfMelnikov) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = ref_arg(forcing, "forcing")?;
        let m = MelnikovFn::auto(f.inner.clone(), o.into());
        m.validate().or_status()?;
        *out = Box::into_raw(Box::new(AcfMelnikov { inner: m }));
        Ok(())
    })
}

/// `R(phi)` and `R'(phi)`.
///
/// # Safety
/// `m` must be a live handle; `r` and `r_prime` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acf_melnikov_eval(m: *const AcfMelnikov, phi: f64, r: *mut f64, r_prime: *mut f64) -> AcfStatus {
    guard(|| {
        let m = ref_arg(m, "m")?;
        let (v, d) = m.inner.eval_pair(phi).or_status()?;
        *out_arg(r, "r")? = v;
        *out_arg(r_prime, "r_prime")? = d;
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acf_melnikov_free(m: *mut AcfMelnikov) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Right-hand side of the reduced N-front ODE at `positions[0..n]` (strictly increasing),
/// written to `velocities[0..n]`.
///
/// # Safety
/// `forcing` must be a live handle; `positions` and `velocities` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn acf_nfront_rhs(
    forcing: *const AcfForcing,
    eps: f64,
    first: AcfOrientation,
    positions: *const f64,
    n: usize,
    velocities: *mut f64,
) -> AcfStatus {
    guard(|| {
        let f = ref_arg(forcing, "forcing")?;
        let pos = slice_arg(positions, n, "positions")?;
        let s = FrontState::new(pos.to_vec(), first.into(), Epsilon::new(eps).or_status()?).or_status()?;
        let model = FrontModel::new(&f.inner);
        let v = nfront_rhs(&s, &model.up, &model.down).or_status()?;
        let mut len = 0;
        copy_out(&v, velocities, n, &mut len)
    })
}

/// Integrates the reduced N-front ODE to `t_end` and writes the final positions over `positions`.
///
/// # Safety
/// `forcing` must be a live handle; `positions` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn acf_nfront_integrate(
    forcing: *const AcfForcing,
    eps: f64,
    first: AcfOrientation,
    positions: *mut f64,
    n: usize,
    t_end: f64,
) -> AcfStatus {
    guard(|| {
        let f = ref_arg(forcing, "forcing")?;
        let pos = slice_arg(positions, n, "positions")?;
        let s = FrontState::new(pos.to_vec(), first.into(), Epsilon::new(eps).or_status()?).or_status()?;
        let traj = integrate(&s, t_end, &FrontModel::new(&f.inner), IntegrateControls::default()).or_status()?;
        let last = &traj.last().positions;
        if last.len() != n {
            return Err(fail(AcfStatus::NumericFailure, "fronts collided before t_end"));
        }
        let mut len = 0;
        copy_out(last, positions, n, &mut len)
    })
}

/// Number of localized stationary patterns of `n` fronts on topography `topo_spec` and whether
/// every pattern with two or more fronts is unstable.
///
/// # Safety
/// `topo_spec` must be a NUL-terminated string; `count` and `all_unstable` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acf_stationary_localized(
    topo_spec: *const c_char,
    eps: f64,
    n: usize,
    count: *mut usize,
    all_unstable: *mut bool,
) -> AcfStatus {
    guard(|| {
        let topo: Topography = str_arg(topo_spec, "topo_spec")?.parse().or_status()?;
        let report = enumerate_stationary_localized(&topo, Epsilon::new(eps).or_status()?, n).or_status()?;
        *out_arg(count, "count")? = report.fronts.len();
        *out_arg(all_unstable, "all_unstable")? = report.all_unstable;
        Ok(())
    })
}

/// Number of intersections of the first-order stable and unstable manifolds of the `-1` state
/// on the section `x = 0` (front positions in `[-4.5, 4.5]`).
///
/// # Safety
/// `forcing` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_homoclinic_count(forcing: *const AcfForcing, eps: f64, count: *mut usize) -> AcfStatus {
    guard(|| {
        let f = ref_arg(forcing, "forcing")?;
        let hits = homoclinic_intersections(&f.inner, SectionSettings::new(eps)).or_status()?;
        *out_arg(count, "count")? = hits.len();
        Ok(())
    })
}

/// Evans function of the homogeneous front at `lambda = re + i im`.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acf_evans_homogeneous(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> AcfStatus {
    guard(|| {
        let d = pde::evans_homogeneous(Complex64::new(re, im)).or_status()?;
        *out_arg(out_re, "out_re")? = d.re;
        *out_arg(out_im, "out_im")? = d.im;
        Ok(())
    })
}

/// Configuration of a built-in scenario.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_config_scenario(id: *const c_char, out: *mut *mut AcfPdeConfig) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = acfront::cli::scenarios::find_scenario(str_arg(id, "id")?).or_status()?;
        *out = Box::into_raw(Box::new(AcfPdeConfig { inner: s.config }));
        Ok(())
    })
}

/// Configuration from its JSON serialization (as stored in a run's meta.json).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_config_from_json(json: *const c_char, out: *mut *mut AcfPdeConfig) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let cfg: PdeRunConfig = serde_json::from_str(str_arg(json, "json")?)
            .map_err(|e| fail(AcfStatus::InvalidInput, format!("bad configuration JSON: {e}")))?;
        cfg.validate().or_status()?;
        *out = Box::into_raw(Box::new(AcfPdeConfig { inner: cfg }));
        Ok(())
    })
}

/// Applies a `key=value` override (dotted keys for nested fields).
///
/// # Safety
/// `cfg` must be a live handle and `assignment` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_config_set(cfg: *mut AcfPdeConfig, assignment: *const c_char) -> AcfStatus {
    guard(|| {
        let cfg = out_arg(cfg, "cfg")?;
        let a = str_arg(assignment, "assignment")?.to_string();
        cfg.inner = acfront::cli::scenarios::with_overrides(&cfg.inner, &[a]).or_status()?;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_config_free(cfg: *mut AcfPdeConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the PDE.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_run(cfg: *const AcfPdeConfig, out: *mut *mut AcfPdeResult) -> AcfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let r = pde::run(&ref_arg(cfg, "cfg")?.inner).or_status()?;
        *out = Box::into_raw(Box::new(AcfPdeResult { inner: r }));
        Ok(())
    })
}

/// Outcome and final time of a run.
///
/// # Safety
/// `r` must be a live handle; `outcome` and `final_time` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_result_summary(r: *const AcfPdeResult, outcome: *mut AcfPdeOutcome, final_time: *mut f64) -> AcfStatus {
    guard(|| {
        let r = &ref_arg(r, "r")?.inner;
        *out_arg(outcome, "outcome")? = match r.outcome {
            PdeOutcome::Completed => AcfPdeOutcome::Completed,
            PdeOutcome::Pinned => AcfPdeOutcome::Pinned,
            PdeOutcome::AllFrontsAnnihilated => AcfPdeOutcome::AllFrontsAnnihilated,
        };
        *out_arg(final_time, "final_time")? = r.final_time;
        Ok(())
    })
}

/// Front positions of the last tracking sample. `len` receives the number of fronts; when it
/// exceeds `cap` the status is `BufferTooSmall` and nothing is copied.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `cap` values; `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_result_positions(r: *const AcfPdeResult, buf: *mut f64, cap: usize, len: *mut usize) -> AcfStatus {
    guard(|| {
        let r = &ref_arg(r, "r")?.inner;
        let pos = r.tracks.last().map(|t| t.positions.as_slice()).unwrap_or(&[]);
        copy_out(pos, buf, cap, len)
    })
}

/// Final field values on the grid nodes, with the same buffer protocol as
/// [`acf_pde_result_positions`].
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `cap` values; `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_result_field(r: *const AcfPdeResult, buf: *mut f64, cap: usize, len: *mut usize) -> AcfStatus {
    guard(|| copy_out(ref_arg(r, "r")?.inner.final_field.values(), buf, cap, len))
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acf_pde_result_free(r: *mut AcfPdeResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
