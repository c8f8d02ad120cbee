//! C interface to the gravwell solver.
//!
//! Every fallible function returns a [`GwStatus`]; on failure the message is
//! kept per thread and can be read with [`gw_last_error_message`]. Handles are
//! opaque and must be released with their `destroy` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gravwell::euler::{Conserved, GasModel};
use gravwell::fv1d::{Boundary, Grid1D};
use gravwell::harness::{run_case, CaseConfig, Overrides};
use gravwell::potential::Potential;
use gravwell::riemann::InterfaceSolver;
use gravwell::sim1d::{Scheme, Simulation1d};
use gravwell::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAdmissible = 3,
    NoEquilibrium = 4,
    NoConvergence = 5,
    StepFailure = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwPotential {
    Zero = 0,
    /// `(x - 1/2)^2 / 2`
    Quadratic = 1,
    /// `sin x`
    Sine = 2,
    /// `x`
    Linear = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwBoundary {
    Periodic = 0,
    Neumann = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwScheme {
    Hll = 0,
    Wb1 = 1,
    Wb2 = 2,
    Wb3 = 3,
}

/// Parameters of a one-dimensional run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GwSim1dParams {
    pub x_min: f64,
    pub x_max: f64,
    pub potential: GwPotential,
    pub boundary: GwBoundary,
    pub scheme: GwScheme,
    pub gamma: f64,
    pub cfl: f64,
    /// Multiplier on the wave-speed bound, at least 1.
    pub lambda_scale: f64,
    pub c_theta: f64,
}

/// Output of the interface solver for one pair of states. Conserved states
/// are `(rho, q, E)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GwInterface {
    pub lambda: f64,
    pub wl_star: [f64; 3],
    pub wr_star: [f64; 3],
    pub s_star: f64,
    pub source_q: f64,
    pub source_e: f64,
    pub flux: [f64; 3],
}

/// Opaque one-dimensional simulation.
pub struct GwSim1d {
    sim: Simulation1d,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GwStatus {
    match e {
        Error::NotAdmissible { .. } => GwStatus::NotAdmissible,
        Error::NoEquilibrium { .. } => GwStatus::NoEquilibrium,
        Error::NoConvergence { .. } => GwStatus::NoConvergence,
        Error::InvalidInput(_) => GwStatus::InvalidArgument,
        Error::StepFailure(_) => GwStatus::StepFailure,
        Error::Config { .. } => GwStatus::Config,
        Error::Io(_) => GwStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GwStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            GwStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            GwStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees that a non-null pointer is valid for reads.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn slice<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: the caller guarantees `n` readable elements behind `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, n) })
}

fn slice_mut<'a>(p: *mut f64, n: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: the caller guarantees `n` writable elements behind `p`.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, n) })
}

fn conserved(w: &[f64]) -> Conserved {
    Conserved::new(w[0], w[1], w[2])
}

fn triple(w: &Conserved) -> [f64; 3] {
    [w.rho, w.q, w.e]
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn gw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Resolves the interface between `wl` and `wr` (each `rho, q, E`).
///
/// # Safety
/// `wl`, `wr` must each point to three readable doubles, `out` to a writable
/// [`GwInterface`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn gw_interface_assemble(
    gamma: f64,
    lambda_scale: f64,
    wl: *const f64,
    wr: *const f64,
    phi_l: f64,
    phi_r: f64,
    dx: f64,
    out: *mut GwInterface,
) -> GwStatus {
    guard(|| {
        let (wl, wr) = (
            conserved(slice(wl, 3, "wl")?),
            conserved(slice(wr, 3, "wr")?),
        );
        // SAFETY: checked for null; the caller guarantees validity.
        let out = unsafe { out.as_mut() }.ok_or(Failure::Null("out"))?;
        if dx.is_nan() || dx <= 0.0 {
            return Err(Error::InvalidInput(format!("dx must be positive, got {dx}")).into());
        }
        let solver = InterfaceSolver::new(GasModel::new(gamma)?, lambda_scale)?;
        let res = solver.assemble(&wl, &wr, phi_l, phi_r, dx)?;
        *out = GwInterface {
            lambda: res.lambda,
            wl_star: triple(&res.wl_star),
            wr_star: triple(&res.wr_star),
            s_star: res.s_star,
            source_q: res.source_q,
            source_e: res.source_e,
            flux: triple(&solver.flux(&wl, &wr, &res)),
        };
        Ok(())
    })
}

/// Creates a one-dimensional run on `n` cells from the cell averages `rho`,
/// `q` and `energy`.
///
/// # Safety
/// `params` must be readable, the three arrays must hold `n` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_create(
    params: *const GwSim1dParams,
    n: usize,
    rho: *const f64,
    q: *const f64,
    energy: *const f64,
    out: *mut *mut GwSim1d,
) -> GwStatus {
    guard(|| {
        let p = non_null(params, "params")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let (rho, q, e) = (
            slice(rho, n, "rho")?,
            slice(q, n, "q")?,
            slice(energy, n, "energy")?,
        );
        let potential = match p.potential {
            GwPotential::Zero => Potential::Zero,
            GwPotential::Quadratic => Potential::Quadratic,
            GwPotential::Sine => Potential::Sine,
            GwPotential::Linear => Potential::Linear { slope: 1.0 },
        };
        let (boundary, periodic) = match p.boundary {
            GwBoundary::Periodic => (Boundary::periodic(), true),
            GwBoundary::Neumann => (Boundary::neumann(), false),
        };
        let mut scheme = match p.scheme {
            GwScheme::Hll => Scheme::hll(),
            GwScheme::Wb1 => Scheme::well_balanced(1),
            GwScheme::Wb2 => Scheme::well_balanced(2),
            GwScheme::Wb3 => Scheme::well_balanced(3),
        };
        scheme.cfl = p.cfl;
        scheme.lambda_scale = p.lambda_scale;
        scheme.c_theta = p.c_theta;
        let grid = Grid1D::new(p.x_min, p.x_max, n, potential, periodic)?;
        let cells: Vec<Conserved> = (0..n).map(|i| Conserved::new(rho[i], q[i], e[i])).collect();
        let sim = Simulation1d::new(grid, boundary, GasModel::new(p.gamma)?, scheme, &cells)?;
        // SAFETY: checked for null above.
        unsafe { *out = Box::into_raw(Box::new(GwSim1d { sim })) };
        Ok(())
    })
}

/// Releases a run; null is ignored.
///
/// # Safety
/// `sim` must come from [`gw_sim1d_create`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_destroy(sim: *mut GwSim1d) {
    if !sim.is_null() {
        // SAFETY: created by `Box::into_raw` in `gw_sim1d_create`.
        drop(unsafe { Box::from_raw(sim) });
    }
}

fn handle<'a>(sim: *mut GwSim1d) -> Result<&'a mut GwSim1d, Failure> {
    // SAFETY: the caller passes a live handle or null.
    unsafe { sim.as_mut() }.ok_or(Failure::Null("sim"))
}

/// Advances by one step without passing `t_end`; the step size goes to `dt`
/// when it is not null.
///
/// # Safety
/// `sim` must be a live handle; `dt` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_step(sim: *mut GwSim1d, t_end: f64, dt: *mut f64) -> GwStatus {
    guard(|| {
        let h = handle(sim)?;
        let step = h.sim.step(t_end)?;
        // SAFETY: null or writable per the contract.
        if let Some(dt) = unsafe { dt.as_mut() } {
            *dt = step;
        }
        Ok(())
    })
}

/// Steps until `t_final` is reached exactly.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_advance(sim: *mut GwSim1d, t_final: f64) -> GwStatus {
    guard(|| Ok(handle(sim)?.sim.advance_to(t_final)?))
}

/// Current time, or NaN for a null handle.
///
/// # Safety
/// `sim` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_time(sim: *const GwSim1d) -> f64 {
    // SAFETY: live handle or null.
    unsafe { sim.as_ref() }.map_or(f64::NAN, |h| h.sim.time())
}

/// Copies the `n` interior cell averages into the three arrays.
///
/// # Safety
/// `sim` must be a live handle and each array must hold `n` writable doubles,
/// where `n` is the cell count given at creation.
#[no_mangle]
pub unsafe extern "C" fn gw_sim1d_state(
    sim: *const GwSim1d,
    n: usize,
    rho: *mut f64,
    q: *mut f64,
    energy: *mut f64,
) -> GwStatus {
    guard(|| {
        // SAFETY: live handle or null.
        let h = unsafe { sim.as_ref() }.ok_or(Failure::Null("sim"))?;
        let cells = h.sim.cells();
        if n != cells.len() {
            return Err(Error::InvalidInput(format!(
                "run has {} cells, buffers hold {n}",
                cells.len()
            ))
            .into());
        }
        let (r, m, e) = (
            slice_mut(rho, n, "rho")?,
            slice_mut(q, n, "q")?,
            slice_mut(energy, n, "energy")?,
        );
        for (i, w) in cells.iter().enumerate() {
            r[i] = w.rho;
            m[i] = w.q;
            e[i] = w.e;
        }
        Ok(())
    })
}

/// Runs a configuration file as the `run` subcommand does. `output_dir` may
/// be null to keep the configured directory; `passed` receives 1 when every
/// threshold holds.
///
/// # Safety
/// `config_path` must be a NUL-terminated string, `output_dir` null or
/// NUL-terminated, `passed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gw_run_config(
    config_path: *const c_char,
    output_dir: *const c_char,
    passed: *mut i32,
) -> GwStatus {
    guard(|| {
        if config_path.is_null() {
            return Err(Failure::Null("config_path"));
        }
        let to_str = |p: *const c_char| {
            // SAFETY: non-null and NUL-terminated per the contract.
            unsafe { CStr::from_ptr(p) }
                .to_str()
                .map_err(|_| Failure::Core(Error::InvalidInput("path is not UTF-8".into())))
        };
        let mut o = Overrides::default();
        if !output_dir.is_null() {
            o.output = Some(to_str(output_dir)?.into());
        }
        let cc = CaseConfig::load(Path::new(to_str(config_path)?), &o)?;
        let report = run_case(&cc)?;
        // SAFETY: null or writable per the contract.
        if let Some(p) = unsafe { passed.as_mut() } {
            *p = i32::from(report.passed);
        }
        Ok(())
    })
}
