//! Well-balanced approximate Riemann solver.
//!
//! Two intermediate states separated by a stationary discontinuity, bounded
//! by the waves `-lambda` and `+lambda`. The solver is exact on steady states
//! of the Euler equations with gravity and reduces to HLL when the potential
//! is constant.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel, Thermo};

const MAX_ENLARGEMENTS: u32 = 40;
const DEGENERATE_TOL: f64 = 1e-14;

/// Weight function with `psi(0) = 1`, `psi(1) = 0` and decay at infinity.
#[inline]
pub fn psi(y: f64) -> f64 {
    if !(y.abs() < 30.0) {
        return 0.0;
    }
    (0.5 * PI * y).cos() * (-2.0 * y * y).exp()
}

/// Smallest admissible wave-speed bound before enlargement.
pub fn wave_speed(l: &Thermo, r: &Thermo, lambda_scale: f64) -> f64 {
    lambda_scale * (l.u.abs() + l.c).max(r.u.abs() + r.c)
}

/// HLL average `(W_L + W_R)/2 - (F(W_R) - F(W_L)) / (2 lambda)`.
pub fn hll_average(wl: &Conserved, wr: &Conserved, lambda: f64, gas: &GasModel) -> Conserved {
    (*wl + *wr) * 0.5 - (gas.flux(wr) - gas.flux(wl)) / (2.0 * lambda)
}

/// HLL average of `rho * eta(s)`.
pub fn hll_entropy_average(l: &Thermo, r: &Thermo, lambda: f64, eta: impl Fn(f64) -> f64) -> f64 {
    let al = l.rho * eta(l.s);
    let ar = r.rho * eta(r.s);
    0.5 * (al + ar) - (ar * r.u - al * l.u) / (2.0 * lambda)
}

/// Energy source `-((q_L + q_R)/2) [phi] / dx`.
pub fn source_energy(wl: &Conserved, wr: &Conserved, phi_l: f64, phi_r: f64, dx: f64) -> f64 {
    -0.5 * (wl.q + wr.q) * (phi_r - phi_l) / dx
}

/// How the ratio `[phi]/[h]` degenerates for a pair of states.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Ratio {
    Flat,
    Value(f64),
}

fn potential_ratio(l: &Thermo, r: &Thermo, phi_l: f64, phi_r: f64) -> Ratio {
    let dphi = phi_r - phi_l;
    if dphi.abs() <= DEGENERATE_TOL * (1.0 + phi_l.abs() + phi_r.abs()) {
        return Ratio::Flat;
    }
    let dh = r.h - l.h;
    if dh.abs() <= DEGENERATE_TOL * (1.0 + l.h.abs() + r.h.abs()) {
        return Ratio::Flat;
    }
    Ratio::Value(dphi / dh)
}

fn source_momentum_from(
    l: &Thermo,
    r: &Thermo,
    phi_l: f64,
    phi_r: f64,
    dx: f64,
    ratio: Ratio,
    gamma: f64,
) -> f64 {
    let dphi = phi_r - phi_l;
    let rho_harm = 2.0 * l.rho * r.rho / (l.rho + r.rho);
    let gravity = -rho_harm * dphi / dx;
    let Ratio::Value(a) = ratio else {
        return gravity;
    };
    let kappa_l = l.p / l.rho.powf(gamma);
    let kappa_r = r.p / r.rho.powf(gamma);
    let eps = 0.5
        * (kappa_l + kappa_r)
        * ((r.rho.powf(gamma) - l.rho.powf(gamma))
            - rho_harm * gamma / (gamma - 1.0)
                * (r.rho.powf(gamma - 1.0) - l.rho.powf(gamma - 1.0)));
    gravity + eps / dx * psi(1.0 + a * a * a)
}

/// Momentum source of the interface.
pub fn source_momentum(
    wl: &Conserved,
    wr: &Conserved,
    phi_l: f64,
    phi_r: f64,
    dx: f64,
    gas: &GasModel,
) -> Result<f64> {
    let l = gas.thermo(wl)?;
    let r = gas.thermo(wr)?;
    let ratio = potential_ratio(&l, &r, phi_l, phi_r);
    Ok(source_momentum_from(
        &l, &r, phi_l, phi_r, dx, ratio, gas.gamma,
    ))
}

/// Density jump across the stationary discontinuity.
pub fn delta_rho(
    wl: &Conserved,
    wr: &Conserved,
    phi_l: f64,
    phi_r: f64,
    gas: &GasModel,
) -> Result<f64> {
    let l = gas.thermo(wl)?;
    let r = gas.thermo(wr)?;
    Ok(delta_rho_from(
        &l,
        &r,
        potential_ratio(&l, &r, phi_l, phi_r),
    ))
}

fn delta_rho_from(l: &Thermo, r: &Thermo, ratio: Ratio) -> f64 {
    match ratio {
        Ratio::Flat => 0.0,
        Ratio::Value(a) => 0.5 * (r.rho - l.rho) * psi(1.0 + a),
    }
}

/// Averaged squared momentum making both intermediate entropies equal.
pub fn q2_tilde(rho_l: f64, rho_r: f64, e_hat: f64, s_star: f64, gamma: f64) -> f64 {
    let harm = 2.0 * rho_l * rho_r / (rho_l + rho_r);
    harm * (2.0 * e_hat - (-s_star).exp() * (rho_l.powf(gamma) + rho_r.powf(gamma)) / (gamma - 1.0))
}

/// Half energy jump across the stationary discontinuity.
pub fn delta_e(rho_l: f64, rho_r: f64, e_hat: f64, q2: f64, gamma: f64) -> f64 {
    let gl = rho_l.powf(gamma);
    let gr = rho_r.powf(gamma);
    (gr * (e_hat - q2 / (2.0 * rho_l)) - gl * (e_hat - q2 / (2.0 * rho_r))) / (gl + gr)
}

/// Everything the schemes need from one interface.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceResolution {
    /// Wave-speed bound, after any enlargement.
    pub lambda: f64,
    pub wl_star: Conserved,
    pub wr_star: Conserved,
    /// Intermediate entropy shared by both intermediate states.
    pub s_star: f64,
    pub source_q: f64,
    pub source_e: f64,
    pub hll: Conserved,
    pub q2_tilde: f64,
    pub delta_rho: f64,
    /// Tangential velocity carried by both intermediate states.
    pub v_hat: f64,
    pub enlargements: u32,
}

impl InterfaceResolution {
    /// Interface source `(0, S^q, 0, S^E)`.
    pub fn source(&self) -> Conserved {
        Conserved {
            rho: 0.0,
            q: self.source_q,
            qt: 0.0,
            e: self.source_e,
        }
    }

    /// Pressure of an intermediate state under the averaged kinetic energy
    /// used to close the energy jump.
    pub fn closure_pressure(&self, star: &Conserved, gamma: f64) -> f64 {
        (gamma - 1.0)
            * (star.e - self.q2_tilde / (2.0 * star.rho) - 0.5 * star.rho * self.v_hat * self.v_hat)
    }
}

/// Well-balanced interface solver for a fixed gas and wave-speed scale.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceSolver {
    pub gas: GasModel,
    /// Multiplier `Lambda >= 1` on the characteristic speed bound.
    pub lambda_scale: f64,
}

impl InterfaceSolver {
    pub fn new(gas: GasModel, lambda_scale: f64) -> Result<Self> {
        if !(lambda_scale >= 1.0) || !lambda_scale.is_finite() {
            return Err(Error::InvalidInput(format!(
                "wave-speed scale must be >= 1, got {lambda_scale}"
            )));
        }
        Ok(Self { gas, lambda_scale })
    }

    pub fn assemble(
        &self,
        wl: &Conserved,
        wr: &Conserved,
        phi_l: f64,
        phi_r: f64,
        dx: f64,
    ) -> Result<InterfaceResolution> {
        let gas = &self.gas;
        let g = gas.gamma;
        let l = gas.thermo(wl)?;
        let r = gas.thermo(wr)?;

        let ratio = potential_ratio(&l, &r, phi_l, phi_r);
        let source_q = source_momentum_from(&l, &r, phi_l, phi_r, dx, ratio, g);
        let source_e = source_energy(wl, wr, phi_l, phi_r, dx);
        let d_rho = delta_rho_from(&l, &r, ratio);

        let mut lambda = wave_speed(&l, &r, self.lambda_scale);
        let mut enlargements = 0;
        loop {
            let rho_hll = 0.5 * (wl.rho + wr.rho) - (wr.q - wl.q) / (2.0 * lambda);
            if rho_hll > 0.0 && d_rho.abs() < rho_hll {
                break;
            }
            if enlargements == MAX_ENLARGEMENTS {
                return Err(Error::StepFailure(format!(
                    "wave-speed enlargement exhausted (rho_hll = {rho_hll}, delta_rho = {d_rho})"
                )));
            }
            lambda *= 2.0;
            enlargements += 1;
        }

        let hll = hll_average(wl, wr, lambda, gas);
        let rho_s = hll_entropy_average(&l, &r, lambda, |s| s);
        let s_star = rho_s / hll.rho;

        let rho_hat = hll.rho;
        let q_hat = hll.q + source_q * dx / (2.0 * lambda);
        let e_hat = hll.e + source_e * dx / (2.0 * lambda);
        let v_hat = hll.qt / hll.rho;
        // Energy without the tangential kinetic part.
        let e_norm = e_hat - 0.5 * rho_hat * v_hat * v_hat;

        let rho_l = rho_hat - d_rho;
        let rho_r = rho_hat + d_rho;
        let q2 = q2_tilde(rho_l, rho_r, e_norm, s_star, g);
        let de = delta_e(rho_l, rho_r, e_norm, q2, g);

        let wl_star = Conserved {
            rho: rho_l,
            q: q_hat,
            qt: rho_l * v_hat,
            e: e_norm - de + 0.5 * rho_l * v_hat * v_hat,
        };
        let wr_star = Conserved {
            rho: rho_r,
            q: q_hat,
            qt: rho_r * v_hat,
            e: e_norm + de + 0.5 * rho_r * v_hat * v_hat,
        };

        Ok(InterfaceResolution {
            lambda,
            wl_star,
            wr_star,
            s_star,
            source_q,
            source_e,
            hll,
            q2_tilde: q2,
            delta_rho: d_rho,
            v_hat,
            enlargements,
        })
    }

    /// Numerical flux `F = (F_L + F_R)/2 - lambda/2 (W_L* - W_L) + lambda/2 (W_R* - W_R)`.
    pub fn flux(&self, wl: &Conserved, wr: &Conserved, res: &InterfaceResolution) -> Conserved {
        let gas = &self.gas;
        (gas.flux(wl) + gas.flux(wr)) * 0.5 - (res.wl_star - *wl) * (0.5 * res.lambda)
            + (res.wr_star - *wr) * (0.5 * res.lambda)
    }

    /// Numerical entropy flux for `rho * eta(s)` consistent with [`Self::flux`].
    pub fn entropy_flux(
        &self,
        wl: &Conserved,
        wr: &Conserved,
        res: &InterfaceResolution,
        eta: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        let l = self.gas.thermo(wl)?;
        let r = self.gas.thermo(wr)?;
        let al = l.rho * eta(l.s);
        let ar = r.rho * eta(r.s);
        let star = eta(res.s_star);
        Ok(
            0.5 * (al * l.u + ar * r.u) - 0.5 * res.lambda * (res.wl_star.rho * star - al)
                + 0.5 * res.lambda * (res.wr_star.rho * star - ar),
        )
    }
}

/// Plain single-speed HLL flux with `lambda = Lambda * max(|u| + c)`.
pub fn hll_flux(
    wl: &Conserved,
    wr: &Conserved,
    lambda_scale: f64,
    gas: &GasModel,
) -> Result<(Conserved, f64)> {
    let l = gas.thermo(wl)?;
    let r = gas.thermo(wr)?;
    let lambda = wave_speed(&l, &r, lambda_scale);
    let f = (gas.flux(wl) + gas.flux(wr)) * 0.5 - (*wr - *wl) * (0.5 * lambda);
    Ok((f, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{moving_equilibrium, Branch, Triplet};
    use crate::euler::Primitive;
    use proptest::prelude::*;

    fn solver() -> InterfaceSolver {
        InterfaceSolver::new(GasModel::default(), 1.0).unwrap()
    }

    fn close(a: &Conserved, b: &Conserved, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
    }

    #[test]
    fn psi_reference_values() {
        assert_eq!(psi(0.0), 1.0);
        assert!(psi(1.0).abs() < 1e-16);
        assert!(psi(-1.0).abs() < 1e-16);
        assert_eq!(psi(1e300), 0.0);
        assert_eq!(psi(f64::INFINITY), 0.0);
        // cos(pi/4) exp(-1/2)
        assert!((psi(0.5) - 0.428_881_942_480_353_4).abs() < 1e-15);
    }

    #[test]
    fn sod_pair_wave_speed_and_hll_state() {
        let gas = GasModel::default();
        let wl = gas.to_conserved(&Primitive::new(1.0, 0.0, 1.0));
        let wr = gas.to_conserved(&Primitive::new(0.125, 0.0, 0.1));
        let res = solver().assemble(&wl, &wr, 0.0, 0.0, 0.01).unwrap();
        assert!((res.lambda - 1.4f64.sqrt()).abs() < 1e-15);
        // (W_L + W_R)/2 - (F_R - F_L)/(2 lambda) with F = (0, p, 0)
        let expected = Conserved::new(0.5625, 0.45 / 1.4f64.sqrt(), 0.5 * (2.5 + 0.25));
        assert!(close(&res.hll, &expected, 1e-15));
        assert_eq!(res.wl_star, res.wr_star);
        assert_eq!(res.source_q, 0.0);
        assert_eq!(res.source_e, 0.0);
    }

    #[test]
    fn equilibrium_pair_is_a_fixed_point() {
        let gas = GasModel::default();
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let (pl, pr) = (0.12, 0.135);
        let wl = gas.to_conserved(&moving_equilibrium(&t, pl, Branch::Subsonic, &gas).unwrap());
        let wr = gas.to_conserved(&moving_equilibrium(&t, pr, Branch::Subsonic, &gas).unwrap());
        let res = solver().assemble(&wl, &wr, pl, pr, 0.02).unwrap();
        assert!(
            close(&res.wl_star, &wl, 1e-12),
            "{:?} vs {:?}",
            res.wl_star,
            wl
        );
        assert!(close(&res.wr_star, &wr, 1e-12));
        assert!((res.q2_tilde - 1.0).abs() < 1e-11);
    }

    #[test]
    fn tangential_velocity_survives_equilibrium() {
        let gas = GasModel::default();
        let t = Triplet {
            q: 1.0,
            h: 10.0,
            s: 0.0,
        };
        let mk = |phi: f64| {
            let p = crate::equilibrium::moving_equilibrium_with_tangent(
                &t,
                phi,
                1.0,
                Branch::Subsonic,
                &gas,
            )
            .unwrap();
            gas.to_conserved(&p)
        };
        let (wl, wr) = (mk(0.3), mk(0.5));
        let res = solver().assemble(&wl, &wr, 0.3, 0.5, 0.03).unwrap();
        assert!(close(&res.wl_star, &wl, 1e-12));
        assert!(close(&res.wr_star, &wr, 1e-12));
        assert!((res.wl_star.qt / res.wl_star.rho - 1.0).abs() < 1e-13);
    }

    #[test]
    fn degenerate_potential_gives_zero_jump() {
        let gas = GasModel::default();
        let wl = gas.to_conserved(&Primitive::new(1.0, 0.3, 1.0));
        let wr = gas.to_conserved(&Primitive::new(0.5, -0.2, 0.7));
        let r = solver().assemble(&wl, &wr, 0.4, 0.4 + 1e-17, 0.1).unwrap();
        assert_eq!(r.delta_rho, 0.0);
        assert_eq!(r.wl_star.rho, r.wr_star.rho);
    }

    #[test]
    fn non_admissible_input_is_rejected() {
        let wl = Conserved::new(1.0, 0.0, -1.0);
        let wr = Conserved::new(1.0, 0.0, 1.0);
        assert!(matches!(
            solver().assemble(&wl, &wr, 0.0, 0.0, 0.1),
            Err(Error::NotAdmissible { .. })
        ));
    }

    fn state() -> impl Strategy<Value = Primitive> {
        (-2.5f64..2.5, -3.0f64..3.0, -2.5f64..2.5)
            .prop_map(|(lr, u, lp)| Primitive::new(lr.exp(), u, lp.exp()))
    }

    proptest! {
        #[test]
        fn consistency_and_entropy_closure(a in state(), b in state(), pl in -1.0f64..1.0, dp in -1.0f64..1.0, dx in 1e-3f64..0.5) {
            let s = solver();
            let gas = s.gas;
            let (wl, wr) = (gas.to_conserved(&a), gas.to_conserved(&b));
            let res = s.assemble(&wl, &wr, pl, pl + dp, dx).unwrap();
            let mean = (res.wl_star + res.wr_star) * 0.5;
            let expected = res.hll + res.source() * (dx / (2.0 * res.lambda));
            prop_assert!(close(&mean, &expected, 1e-12), "{:?} vs {:?}", mean, expected);
            for star in [res.wl_star, res.wr_star] {
                let p = res.closure_pressure(&star, gas.gamma);
                let target = (-res.s_star).exp() * star.rho.powf(gas.gamma);
                prop_assert!((p - target).abs() <= 1e-10 * target.abs().max(1e-300) + 1e-12 * star.e.abs(),
                    "closure {} vs {}", p, target);
            }
            prop_assert!(res.wl_star.rho > 0.0 && res.wr_star.rho > 0.0);
        }

        #[test]
        fn constant_potential_reduces_to_hll(a in state(), b in state(), phi in -2.0f64..2.0) {
            let s = solver();
            let gas = s.gas;
            let (wl, wr) = (gas.to_conserved(&a), gas.to_conserved(&b));
            let res = s.assemble(&wl, &wr, phi, phi, 0.1).unwrap();
            prop_assert_eq!(res.wl_star, res.hll);
            prop_assert_eq!(res.wr_star, res.hll);
            let (f, lambda) = hll_flux(&wl, &wr, 1.0, &gas).unwrap();
            prop_assert_eq!(lambda, res.lambda);
            prop_assert!(close(&s.flux(&wl, &wr, &res), &f, 1e-13));
        }
    }
}
