//! Steady states of the Euler equations with gravity.
//!
//! One-dimensional steady solutions are characterised by constant momentum
//! `q0`, constant specific entropy `s0` and constant `H0 = h + phi`. Given the
//! triplet and a potential value the density follows from a scalar equation.

use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel, Primitive};

const TOL: f64 = 1e-14;
const MAX_ITER: usize = 100;

/// Invariants `(q, H, s)` of a moving equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub q: f64,
    pub h: f64,
    pub s: f64,
}

/// Which root of the equilibrium equation to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Subsonic,
    Supersonic,
}

/// Sonic density separating the two branches.
pub fn sonic_density(q0: f64, kappa: f64, gas: &GasModel) -> f64 {
    (q0 * q0 / (gas.gamma * kappa)).powf(1.0 / (gas.gamma + 1.0))
}

struct Residual {
    gamma: f64,
    kappa: f64,
    q0: f64,
    rhs: f64,
}

impl Residual {
    fn value(&self, rho: f64) -> f64 {
        let g = self.gamma;
        g * self.kappa / (g - 1.0) * rho.powf(g - 1.0) + 0.5 * self.q0 * self.q0 / (rho * rho)
            - self.rhs
    }

    fn derivative(&self, rho: f64) -> f64 {
        self.gamma * self.kappa * rho.powf(self.gamma - 2.0) - self.q0 * self.q0 / (rho * rho * rho)
    }
}

/// Density of the steady state with invariants `t` at potential `phi`.
///
/// `v0` is a constant tangential velocity whose kinetic energy is part of `H`.
pub fn equilibrium_density(
    t: &Triplet,
    phi: f64,
    v0: f64,
    branch: Branch,
    gas: &GasModel,
) -> Result<f64> {
    let g = gas.gamma;
    let kappa = (-t.s).exp();
    let rhs = t.h - phi - 0.5 * v0 * v0;
    if t.q == 0.0 {
        if !(rhs > 0.0) {
            return Err(Error::NoEquilibrium {
                phi,
                residual: -rhs,
            });
        }
        return Ok(((g - 1.0) * rhs / (g * kappa)).powf(1.0 / (g - 1.0)));
    }
    let f = Residual {
        gamma: g,
        kappa,
        q0: t.q,
        rhs,
    };
    let rho_s = sonic_density(t.q, kappa, gas);
    let f_s = f.value(rho_s);
    if f_s > 0.0 {
        return Err(Error::NoEquilibrium { phi, residual: f_s });
    }
    if f_s == 0.0 {
        return Ok(rho_s);
    }
    // Bracket [lo, hi] with f(lo) and f(hi) of opposite sign.
    let (mut lo, mut hi, mut rho) = match branch {
        Branch::Subsonic => {
            let mut hi = 2.0 * rho_s;
            while f.value(hi) <= 0.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::NoEquilibrium { phi, residual: f_s });
                }
            }
            (rho_s, hi, 1.5 * rho_s)
        }
        Branch::Supersonic => {
            let mut lo = 0.5 * rho_s;
            while f.value(lo) <= 0.0 {
                lo *= 0.5;
                if lo == 0.0 {
                    return Err(Error::NoEquilibrium { phi, residual: f_s });
                }
            }
            (lo, rho_s, 0.5 * rho_s)
        }
    };
    if rho <= lo.min(hi) || rho >= lo.max(hi) {
        rho = 0.5 * (lo + hi);
    }
    let increasing = branch == Branch::Subsonic;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        residual = f.value(rho);
        if residual == 0.0 {
            return Ok(rho);
        }
        if (residual > 0.0) == increasing {
            hi = rho;
        } else {
            lo = rho;
        }
        let d = f.derivative(rho);
        let mut next = rho - residual / d;
        let (a, b) = (lo.min(hi), lo.max(hi));
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - rho).abs() <= TOL * rho {
            return Ok(next);
        }
        rho = next;
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual,
    })
}

/// Primitive steady state for invariants `t` at potential `phi`.
pub fn moving_equilibrium(
    t: &Triplet,
    phi: f64,
    branch: Branch,
    gas: &GasModel,
) -> Result<Primitive> {
    moving_equilibrium_with_tangent(t, phi, 0.0, branch, gas)
}

pub fn moving_equilibrium_with_tangent(
    t: &Triplet,
    phi: f64,
    v0: f64,
    branch: Branch,
    gas: &GasModel,
) -> Result<Primitive> {
    let rho = equilibrium_density(t, phi, v0, branch, gas)?;
    let p = (-t.s).exp() * rho.powf(gas.gamma);
    Ok(Primitive {
        rho,
        u: t.q / rho,
        v: v0,
        p,
    })
}

/// Isentropic atmosphere at rest with `p = kappa rho^gamma`.
pub fn hydrostatic_isentropic(h0: f64, kappa: f64, phi: f64, gas: &GasModel) -> Result<Primitive> {
    let g = gas.gamma;
    let base = (g - 1.0) * (h0 - phi) / (g * kappa);
    if !(base > 0.0) {
        return Err(Error::NoEquilibrium {
            phi,
            residual: h0 - phi,
        });
    }
    let rho = base.powf(1.0 / (g - 1.0));
    Ok(Primitive::new(rho, 0.0, kappa * rho.powf(g)))
}

/// Isothermal atmosphere at rest, `p = RT rho`.
pub fn isothermal(rho0: f64, rt: f64, phi: f64) -> Primitive {
    let rho = rho0 * (-phi / rt).exp();
    Primitive::new(rho, 0.0, rt * rho)
}

/// Distance between the invariants of two states: Euclidean norm of the
/// differences in momentum, `H = h + phi` and entropy.
pub fn iss_residual(
    wl: &Conserved,
    wr: &Conserved,
    phi_l: f64,
    phi_r: f64,
    gas: &GasModel,
) -> Result<f64> {
    let l = gas.thermo(wl)?;
    let r = gas.thermo(wr)?;
    let dq = wr.q - wl.q;
    let dh = (r.h + phi_r) - (l.h + phi_l);
    let ds = r.s - l.s;
    Ok((dq * dq + dh * dh + ds * ds).sqrt())
}

/// A steady state that can be evaluated at any potential value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equilibrium {
    Moving {
        triplet: Triplet,
        branch: Branch,
        v0: f64,
    },
    Isothermal {
        rho0: f64,
        rt: f64,
    },
}

impl Equilibrium {
    pub fn at(&self, phi: f64, gas: &GasModel) -> Result<Primitive> {
        match self {
            Equilibrium::Moving {
                triplet,
                branch,
                v0,
            } => moving_equilibrium_with_tangent(triplet, phi, *v0, *branch, gas),
            Equilibrium::Isothermal { rho0, rt } => Ok(isothermal(*rho0, *rt, phi)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn moving_state_at_zero_potential() {
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let p = moving_equilibrium(&t, 0.0, Branch::Subsonic, &gas()).unwrap();
        // reference root computed with 40-digit arithmetic
        assert!(
            (p.rho - 2.328_303_070_920_727).abs() < 1e-13,
            "rho = {}",
            p.rho
        );
        assert!((p.u - 1.0 / p.rho).abs() < 1e-15);
        assert!((p.p - p.rho.powf(1.4)).abs() < 1e-13);
    }

    #[test]
    fn moving_state_satisfies_invariants() {
        let g = gas();
        let t = Triplet {
            q: 0.7,
            h: 4.0,
            s: 0.3,
        };
        for &phi in &[-1.0, -0.2, 0.0, 0.4, 0.9] {
            for branch in [Branch::Subsonic, Branch::Supersonic] {
                let p = moving_equilibrium(&t, phi, branch, &g).unwrap();
                let w = g.to_conserved(&p);
                let th = g.thermo(&w).unwrap();
                assert!((w.q - t.q).abs() < 1e-14);
                assert!((th.h + phi - t.h).abs() < 1e-13 * t.h.abs().max(1.0), "H");
                assert!((th.s - t.s).abs() < 1e-12, "s");
                let mach = th.u.abs() / th.c;
                match branch {
                    Branch::Subsonic => assert!(mach < 1.0),
                    Branch::Supersonic => assert!(mach > 1.0),
                }
            }
        }
    }

    #[test]
    fn missing_equilibrium_is_an_error() {
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let r = moving_equilibrium(&t, 4.5, Branch::Subsonic, &gas());
        assert!(matches!(r, Err(Error::NoEquilibrium { .. })));
    }

    #[test]
    fn isentropic_hydrostatic_matches_test_profile() {
        let g = gas();
        for &phi in &[0.0, 0.1, 0.125, 0.3] {
            let a = hydrostatic_isentropic(g.gamma / (g.gamma - 1.0), 1.0, phi, &g).unwrap();
            let rho = (1.0 - (g.gamma - 1.0) * phi / g.gamma).powf(1.0 / (g.gamma - 1.0));
            assert!((a.rho - rho).abs() < 1e-14);
            assert!((a.p - rho.powf(g.gamma)).abs() < 1e-14);
            let b = moving_equilibrium(
                &Triplet {
                    q: 0.0,
                    h: 3.5,
                    s: 0.0,
                },
                phi,
                Branch::Subsonic,
                &g,
            )
            .unwrap();
            assert!((a.rho - b.rho).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_vanishes_on_an_equilibrium_pair() {
        let g = gas();
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let wl = g.to_conserved(&moving_equilibrium(&t, 0.1, Branch::Subsonic, &g).unwrap());
        let wr = g.to_conserved(&moving_equilibrium(&t, 0.3, Branch::Subsonic, &g).unwrap());
        assert!(iss_residual(&wl, &wr, 0.1, 0.3, &g).unwrap() < 1e-13);
        assert!(iss_residual(&wl, &wr, 0.1, 0.2, &g).unwrap() > 1e-2);
    }

    #[test]
    fn isothermal_profile() {
        let p = isothermal(1.0, 4.0, 2.0);
        assert!((p.rho - (-0.5f64).exp()).abs() < 1e-15);
        assert!((p.p - 4.0 * p.rho).abs() < 1e-15);
    }
}
