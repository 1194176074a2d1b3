//! C ABI over the `nonlocal` library.
//!
//! Conventions:
//! - Every fallible function returns an [`NlStatus`]; `NL_STATUS_OK` is zero. On failure
//!   [`nl_last_error_message`] describes the error for the calling thread.
//! - States and experiment runs are opaque handles created by `nl_*_new`/`nl_run_config`
//!   and released with the matching `*_free`; freeing NULL is a no-op.
//! - Pointer rules for every `unsafe` entry point: a NULL pointer is reported as
//!   `NL_STATUS_NULL_POINTER` where the argument is required; non-NULL output pointers must
//!   be valid for writes; strings must be NUL-terminated; handles must come from this
//!   library and not be used after being freed.
//! - Panics never cross the boundary; they surface as `NL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;

use nonlocal::biphoton::{FrequencyGrid, JointAmplitude, SourceSpec};
use nonlocal::dispersion::correlation_width;
use nonlocal::harness::{parse_config, run_experiment, write_outputs, RunOutput};
use nonlocal::hom::{hom_coincidence, HomSetup};
use nonlocal::interferometry::{chsh_value, coincidence_rate, ChshSettings, FransonSetup};
use nonlocal::lightcone::{
    amplitude_b_closed, amplitude_b_numeric, assemble_two_atom_state, balance_to_maximal,
    concurrence, feynman_propagator, max_product_fidelity, mutual_information, post_select,
    QuadratureOptions, TwoAtomConfig,
};
use nonlocal::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A physical or setup parameter violates its invariants.
    Parameter = 3,
    /// A config could not be parsed or names an unknown experiment.
    Config = 4,
    /// The grid cannot represent the requested state or shift.
    Grid = 5,
    /// A numerical method failed or an invariant check did not hold.
    Numerical = 6,
    Io = 7,
    /// The output buffer is too small; the required size was reported.
    BufferTooSmall = 8,
    Panic = 9,
}

impl From<&Error> for NlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config { .. } | Error::UnknownExperiment(_) => NlStatus::Config,
            Error::Parameter(_)
            | Error::BinOverlap { .. }
            | Error::OverUnity(_)
            | Error::OnCone { .. }
            | Error::ZeroSupport
            | Error::ZeroBranch(_)
            | Error::DomainMismatch { .. }
            | Error::AxisMismatch(_) => NlStatus::Parameter,
            Error::GridResolution(_)
            | Error::OutOfBand { .. }
            | Error::DegenerateGrid(_)
            | Error::OffGrid { .. }
            | Error::InsufficientCoverage(_) => NlStatus::Grid,
            Error::Io { .. } => NlStatus::Io,
            _ => NlStatus::Numerical,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(NlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(NlStatus::from(&e), e.to_string())
    }
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("NUL bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

/// Runs `f`, recording its error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            NlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            NlStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees that non-NULL output pointers are valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| Failure(NlStatus::NullPointer, format!("{name} is NULL")))
}

fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees that non-NULL handles come from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(NlStatus::NullPointer, format!("{name} is NULL")))
}

fn in_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(NlStatus::NullPointer, format!("{name} is NULL")));
    }
    // SAFETY: non-NULL string arguments must be NUL-terminated.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(NlStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// Complex number as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NlComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for NlComplex {
    fn from(z: Complex64) -> Self {
        NlComplex { re: z.re, im: z.im }
    }
}

impl From<NlComplex> for Complex64 {
    fn from(z: NlComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Two atoms a distance `separation` apart, coupled for `duration`; natural units.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlTwoAtomConfig {
    pub separation: f64,
    pub omega: f64,
    pub dipole: f64,
    pub duration: f64,
}

impl NlTwoAtomConfig {
    fn to_config(self) -> Result<TwoAtomConfig, Failure> {
        Ok(TwoAtomConfig::new(
            self.separation,
            self.omega,
            self.dipole,
            self.duration,
        )?)
    }
}

/// Outcome of post-selection followed by balancing.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NlProtocolResult {
    /// Best fidelity with a product state before post-selection.
    pub product_fidelity: f64,
    pub post_success: f64,
    pub stage_success: f64,
    pub total_success: f64,
    pub concurrence: f64,
    pub mutual_information: f64,
    pub cos_theta: f64,
}

/// Opaque joint two-photon amplitude.
pub struct NlState {
    inner: JointAmplitude,
}

/// Opaque result of a config-driven experiment run.
pub struct NlRun {
    inner: RunOutput,
    csv: CString,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a successful call.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn nl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `D_F(r, t)` with regularization ε > 0.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_feynman_propagator(
    r: f64,
    t: f64,
    epsilon: f64,
    out: *mut NlComplex,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = feynman_propagator(r, t, epsilon)?.into();
        Ok(())
    })
}

/// Far-field closed form of the transfer amplitude b.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_amplitude_b_closed(
    config: NlTwoAtomConfig,
    out: *mut NlComplex,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = amplitude_b_closed(&config.to_config()?)?.value.into();
        Ok(())
    })
}

/// Transfer amplitude b by quadrature with default options; `error_estimate` may be NULL.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_amplitude_b_numeric(
    config: NlTwoAtomConfig,
    out: *mut NlComplex,
    error_estimate: *mut f64,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let n = amplitude_b_numeric(&config.to_config()?, &QuadratureOptions::default())?;
        *out = n.value.into();
        // SAFETY: optional output; NULL means the caller does not want it.
        if let Some(e) = unsafe { error_estimate.as_mut() } {
            *e = n.error_estimate;
        }
        Ok(())
    })
}

/// Two-atom state from (b, p_γ), post-selected on no photon and balanced to a′ = b′.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_entanglement_protocol(
    b: NlComplex,
    p_gamma: f64,
    out: *mut NlProtocolResult,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let state = assemble_two_atom_state(b.into(), p_gamma)?;
        let post = post_select(&state)?;
        let bal = balance_to_maximal(&post)?;
        *out = NlProtocolResult {
            product_fidelity: max_product_fidelity(&state),
            post_success: post.success,
            stage_success: bal.stage_success,
            total_success: bal.state.success,
            concurrence: concurrence(&bal.state),
            mutual_information: mutual_information(&bal.state),
            cos_theta: bal.cos_theta,
        };
        Ok(())
    })
}

fn new_state(
    spec: SourceSpec,
    n_points: usize,
    span: f64,
    grid_center: f64,
    out: *mut *mut NlState,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let grid = FrequencyGrid::square(n_points, grid_center, span)?;
        let inner = spec.build(&grid)?;
        *out = Box::into_raw(Box::new(NlState { inner }));
        Ok(())
    })
}

/// Gaussian down-conversion state on an `n_points`² grid of full width `span` centered
/// at `grid_center` on both axes.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_state_new_pdc(
    n_points: usize,
    span: f64,
    grid_center: f64,
    center1: f64,
    center2: f64,
    sigma_plus: f64,
    sigma_minus: f64,
    out: *mut *mut NlState,
) -> NlStatus {
    let spec = SourceSpec::GaussianPdc {
        center1,
        center2,
        sigma_plus,
        sigma_minus,
    };
    new_state(spec, n_points, span, grid_center, out)
}

/// Atomic cascade state with lifetimes τ₁ > τ₂.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_state_new_cascade(
    n_points: usize,
    span: f64,
    grid_center: f64,
    sum_frequency: f64,
    tau1: f64,
    tau2: f64,
    out: *mut *mut NlState,
) -> NlStatus {
    let spec = SourceSpec::Cascade {
        sum_frequency,
        tau1,
        tau2,
    };
    new_state(spec, n_points, span, grid_center, out)
}

/// Releases a state; NULL is ignored.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_state_free(state: *mut NlState) {
    if !state.is_null() {
        // SAFETY: non-NULL handles were produced by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// RMS of t₁ − t₂.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_state_correlation_width(
    state: *const NlState,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        let s = in_ref(state, "state")?;
        *out_ref(out, "out")? = correlation_width(&s.inner)?;
        Ok(())
    })
}

/// HOM coincidence probability with photon 1 delayed by `delay`.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_hom_coincidence(
    state: *const NlState,
    delay: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        let s = in_ref(state, "state")?;
        let setup = HomSetup::new(delay, None)?;
        *out_ref(out, "out")? = hom_coincidence(&s.inner, &setup)?;
        Ok(())
    })
}

/// Franson coincidence rate (HH ports) normalized to the fringe maximum.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_franson_rate(
    state: *const NlState,
    delay: f64,
    window: f64,
    phi1: f64,
    phi2: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        let s = in_ref(state, "state")?;
        let setup = FransonSetup::symmetric(delay, window, phi1, phi2)?;
        *out_ref(out, "out")? = coincidence_rate(&s.inner, &setup)?.value;
        Ok(())
    })
}

/// CHSH value at the standard analyzer settings.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_chsh(
    state: *const NlState,
    delay: f64,
    window: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        let s = in_ref(state, "state")?;
        let setup = FransonSetup::symmetric(delay, window, 0.0, 0.0)?;
        *out_ref(out, "out")? = chsh_value(&s.inner, &setup, &ChshSettings::default())?
            .value
            .s;
        Ok(())
    })
}

/// Parses a JSON config and runs its experiment.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_run_config(
    config_json: *const c_char,
    out: *mut *mut NlRun,
) -> NlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let config = parse_config(in_str(config_json, "config_json")?)?;
        let inner = run_experiment(&config)?;
        let csv = CString::new(inner.scan.to_csv()?)
            .map_err(|e| Failure(NlStatus::Numerical, e.to_string()))?;
        *out = Box::into_raw(Box::new(NlRun { inner, csv }));
        Ok(())
    })
}

/// Number of table rows of a run.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_run_rows(run: *const NlRun, out: *mut usize) -> NlStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(run, "run")?.inner.scan.len();
        Ok(())
    })
}

/// Copies the run's CSV table, NUL-terminated, into `buf`. `needed` receives the size
/// including the terminator; with `capacity` too small nothing is copied and
/// `NL_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be NULL when `capacity` is 0.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_run_csv(
    run: *const NlRun,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> NlStatus {
    guard(|| {
        let bytes = in_ref(run, "run")?.csv.as_bytes_with_nul();
        *out_ref(needed, "needed")? = bytes.len();
        if capacity < bytes.len() {
            return Err(Failure(
                NlStatus::BufferTooSmall,
                format!("CSV needs {} bytes, buffer has {capacity}", bytes.len()),
            ));
        }
        if buf.is_null() {
            return Err(Failure(NlStatus::NullPointer, "buf is NULL".into()));
        }
        // SAFETY: buf is valid for `capacity` ≥ bytes.len() writes and cannot overlap
        // the library-owned CSV.
        unsafe { ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, bytes.len()) };
        Ok(())
    })
}

/// Writes the run's CSV, sidecar and manifest into `dir`.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_run_write(run: *const NlRun, dir: *const c_char) -> NlStatus {
    guard(|| {
        let r = in_ref(run, "run")?;
        write_outputs(&r.inner, Path::new(in_str(dir, "dir")?))?;
        Ok(())
    })
}

/// Releases a run; NULL is ignored.
///
/// # Safety
/// Pointer arguments follow the rules in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn nl_run_free(run: *mut NlRun) {
    if !run.is_null() {
        // SAFETY: non-NULL handles were produced by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(run) });
    }
}
