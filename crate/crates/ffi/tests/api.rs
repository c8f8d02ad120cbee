use std::ffi::{CStr, CString};
use std::ptr;

use gravwell_ffi::*;

fn last_error() -> String {
    let p = gw_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn params(scheme: GwScheme) -> GwSim1dParams {
    GwSim1dParams {
        x_min: 0.0,
        x_max: 1.0,
        potential: GwPotential::Zero,
        boundary: GwBoundary::Neumann,
        scheme,
        gamma: 1.4,
        cfl: 0.9,
        lambda_scale: 1.0,
        c_theta: 1.0,
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(gw_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn sod_interface_matches_hll_without_potential() {
    // Sod states (rho, q, E).
    let wl = [1.0, 0.0, 2.5];
    let wr = [0.125, 0.0, 0.25];
    let mut out = GwInterface::default();
    let st = unsafe {
        gw_interface_assemble(1.4, 1.0, wl.as_ptr(), wr.as_ptr(), 0.0, 0.0, 0.1, &mut out)
    };
    assert_eq!(st, GwStatus::Ok);
    assert_eq!(out.wl_star, out.wr_star);
    // lambda = c_L = sqrt(1.4); rho_HLL = (1 + 0.125)/2.
    assert!((out.lambda - 1.4f64.sqrt()).abs() < 1e-15);
    assert!((out.wl_star[0] - 0.5625).abs() < 1e-15);
    assert!(gw_last_error_message().is_null());
}

#[test]
fn errors_carry_status_and_message() {
    let bad = [1.0, 0.0, -1.0];
    let good = [1.0, 0.0, 2.5];
    let mut out = GwInterface::default();
    let st = unsafe {
        gw_interface_assemble(
            1.4,
            1.0,
            bad.as_ptr(),
            good.as_ptr(),
            0.0,
            0.0,
            0.1,
            &mut out,
        )
    };
    assert_eq!(st, GwStatus::NotAdmissible);
    assert!(last_error().contains("admissible"));

    let st = unsafe {
        gw_interface_assemble(
            1.4,
            1.0,
            ptr::null(),
            good.as_ptr(),
            0.0,
            0.0,
            0.1,
            &mut out,
        )
    };
    assert_eq!(st, GwStatus::NullPointer);
    assert!(last_error().contains("wl"));

    let st = unsafe {
        gw_interface_assemble(
            1.4,
            0.5,
            good.as_ptr(),
            good.as_ptr(),
            0.0,
            0.0,
            0.1,
            &mut out,
        )
    };
    assert_eq!(st, GwStatus::InvalidArgument);
}

#[test]
fn simulation_lifecycle() {
    let n = 40;
    let rho: Vec<f64> = (0..n)
        .map(|i| if i < n / 2 { 1.0 } else { 0.125 })
        .collect();
    let q = vec![0.0; n];
    let e: Vec<f64> = (0..n).map(|i| if i < n / 2 { 2.5 } else { 0.25 }).collect();
    let mut sim: *mut GwSim1d = ptr::null_mut();
    let p = GwSim1dParams {
        boundary: GwBoundary::Periodic,
        ..params(GwScheme::Wb2)
    };
    let st = unsafe { gw_sim1d_create(&p, n, rho.as_ptr(), q.as_ptr(), e.as_ptr(), &mut sim) };
    assert_eq!(st, GwStatus::Ok);
    assert!(!sim.is_null());

    let mut dt = 0.0;
    assert_eq!(unsafe { gw_sim1d_step(sim, 0.1, &mut dt) }, GwStatus::Ok);
    assert!(dt > 0.0 && dt <= 0.1);
    assert_eq!(unsafe { gw_sim1d_time(sim) }, dt);
    assert_eq!(unsafe { gw_sim1d_advance(sim, 0.1) }, GwStatus::Ok);
    assert_eq!(unsafe { gw_sim1d_time(sim) }, 0.1);

    let (mut r, mut m, mut en) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let st = unsafe { gw_sim1d_state(sim, n, r.as_mut_ptr(), m.as_mut_ptr(), en.as_mut_ptr()) };
    assert_eq!(st, GwStatus::Ok);
    // Periodic boundaries conserve mass to rounding.
    let mass: f64 = r.iter().sum();
    let dev = (mass - rho.iter().sum::<f64>()).abs();
    assert!(dev < 1e-12, "mass changed by {dev:e}");
    assert!(r.iter().all(|x| *x > 0.0));

    let st = unsafe { gw_sim1d_state(sim, n - 1, r.as_mut_ptr(), m.as_mut_ptr(), en.as_mut_ptr()) };
    assert_eq!(st, GwStatus::InvalidArgument);
    unsafe { gw_sim1d_destroy(sim) };
    unsafe { gw_sim1d_destroy(ptr::null_mut()) };
    assert!(unsafe { gw_sim1d_time(ptr::null()) }.is_nan());
}

#[test]
fn creation_rejects_bad_input() {
    let (rho, q, e) = ([1.0, -1.0, 1.0, 1.0], [0.0; 4], [2.5; 4]);
    let mut sim: *mut GwSim1d = ptr::null_mut();
    let st = unsafe {
        gw_sim1d_create(
            &params(GwScheme::Wb1),
            4,
            rho.as_ptr(),
            q.as_ptr(),
            e.as_ptr(),
            &mut sim,
        )
    };
    assert_eq!(st, GwStatus::NotAdmissible);
    assert!(sim.is_null());
    let st = unsafe {
        gw_sim1d_create(
            ptr::null(),
            4,
            rho.as_ptr(),
            q.as_ptr(),
            e.as_ptr(),
            &mut sim,
        )
    };
    assert_eq!(st, GwStatus::NullPointer);
}

#[test]
fn runs_a_configuration_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("a.conf");
    std::fs::write(
        &conf,
        "case = hydro_phi1\nn = 20\nschemes = wb1\nt_final = 0.1\nmax.wb1.rho.l2 = 1e-12\n",
    )
    .unwrap();
    let path = CString::new(conf.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    let mut passed = -1;
    let st = unsafe { gw_run_config(path.as_ptr(), out.as_ptr(), &mut passed) };
    assert_eq!(st, GwStatus::Ok);
    assert_eq!(passed, 1);
    assert!(dir.path().join("out/report.json").exists());

    let missing = CString::new("/nonexistent/x.conf").unwrap();
    assert_eq!(
        unsafe { gw_run_config(missing.as_ptr(), ptr::null(), ptr::null_mut()) },
        GwStatus::Io
    );
}

#[test]
fn header_declares_the_interface() {
    let header = include_str!("../include/gravwell.h");
    for name in [
        "gw_sim1d_create",
        "gw_sim1d_destroy",
        "gw_interface_assemble",
        "gw_last_error_message",
        "GW_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
