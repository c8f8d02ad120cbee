//! High-order extension with a well-balanced blending.
//!
//! Interface values come from a reconstruction in primitive variables and are
//! blended with the cell averages. The blending weight tends to zero close to
//! discrete steady states, so the first-order well-balanced scheme is
//! recovered there.

use crate::equilibrium::iss_residual;
use crate::error::Result;
use crate::euler::{Conserved, GasModel, Primitive};
use crate::fv1d::{Grid1D, GHOST};
use crate::quadrature::GAUSS2;
use crate::riemann::InterfaceSolver;

/// Variation scale below which the parabola is used without limiting.
const SMOOTH_RADIUS: f64 = 1.0;

pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Quadratic `a + b xi + c xi^2` on the reference cell `xi in [-1/2, 1/2]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, xi: f64) -> f64 {
        self.a + xi * (self.b + xi * self.c)
    }

    /// Mean over the reference cell.
    pub fn mean(&self) -> f64 {
        self.a + self.c / 12.0
    }
}

fn linear(um: f64, u0: f64, up: f64) -> Quadratic {
    Quadratic {
        a: u0,
        b: minmod(u0 - um, up - u0),
        c: 0.0,
    }
}

fn parabola(um: f64, u0: f64, up: f64, dx: f64) -> Option<Quadratic> {
    let c = 0.5 * (up - 2.0 * u0 + um);
    let q = Quadratic {
        a: u0 - c / 12.0,
        b: 0.5 * (up - um),
        c,
    };
    let (dm, dp) = (u0 - um, up - u0);
    if dm * dm + dp * dp < (SMOOTH_RADIUS * dx).powi(2) {
        return Some(q);
    }
    let within = |v: f64, a: f64, b: f64| v >= a.min(b) && v <= a.max(b);
    if within(q.eval(0.5), u0, up) && within(q.eval(-0.5), um, u0) {
        Some(q)
    } else {
        None
    }
}

/// Reconstruction order selector: slope (`Linear`) or parabola (`Parabolic`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    Linear,
    Parabolic,
}

impl Reconstruction {
    /// Polynomial degree `d`.
    pub fn degree(&self) -> u32 {
        match self {
            Reconstruction::Linear => 1,
            Reconstruction::Parabolic => 2,
        }
    }
}

/// Reconstructed primitive profile of one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellProfile {
    pub rho: Quadratic,
    pub u: Quadratic,
    pub v: Quadratic,
    pub p: Quadratic,
}

impl CellProfile {
    pub fn eval(&self, xi: f64) -> Primitive {
        Primitive {
            rho: self.rho.eval(xi),
            u: self.u.eval(xi),
            v: self.v.eval(xi),
            p: self.p.eval(xi),
        }
    }

    fn positive(&self) -> bool {
        [-0.5, GAUSS2[0].0, GAUSS2[1].0, 0.5]
            .iter()
            .all(|&xi| self.rho.eval(xi) > 0.0 && self.p.eval(xi) > 0.0)
    }
}

/// Mean-preserving reconstruction of cell `0` from primitive cell values.
pub fn reconstruct(
    kind: Reconstruction,
    m: &Primitive,
    c: &Primitive,
    p: &Primitive,
    dx: f64,
) -> CellProfile {
    let lin = CellProfile {
        rho: linear(m.rho, c.rho, p.rho),
        u: linear(m.u, c.u, p.u),
        v: linear(m.v, c.v, p.v),
        p: linear(m.p, c.p, p.p),
    };
    if kind == Reconstruction::Linear {
        return lin;
    }
    let pick =
        |a: f64, b: f64, d: f64, fallback: Quadratic| parabola(a, b, d, dx).unwrap_or(fallback);
    let par = CellProfile {
        rho: pick(m.rho, c.rho, p.rho, lin.rho),
        u: pick(m.u, c.u, p.u, lin.u),
        v: pick(m.v, c.v, p.v, lin.v),
        p: pick(m.p, c.p, p.p, lin.p),
    };
    if par.positive() {
        par
    } else {
        lin
    }
}

/// Blending weight `sigma / (sigma + (dx / C)^(d+1))`.
pub fn theta(sigma: f64, c: f64, dx: f64, degree: u32) -> f64 {
    if c == 0.0 || sigma == 0.0 {
        return 0.0;
    }
    sigma / (sigma + (dx / c).powi(degree as i32 + 1))
}

/// Rate coefficients per interface from two consecutive time levels.
pub fn rate_coefficients(
    now: &[Conserved],
    prev: &[Conserved],
    dt_prev: f64,
    c_theta: f64,
) -> Vec<f64> {
    let rate: Vec<f64> = now
        .iter()
        .zip(prev)
        .map(|(a, b)| (*a - *b).norm() / dt_prev)
        .collect();
    rate.windows(2)
        .map(|w| c_theta * 0.5 * (w[0] + w[1]))
        .collect()
}

/// Settings of the high-order operator.
#[derive(Debug, Clone, Copy)]
pub struct HighOrder {
    pub solver: InterfaceSolver,
    pub reconstruction: Reconstruction,
    /// `false` forces `theta = 1` everywhere.
    pub well_balanced: bool,
}

impl HighOrder {
    /// Semi-discrete rate of the interior cells and the largest wave speed.
    ///
    /// `c_coef` holds one rate coefficient per storage-cell pair (length
    /// `len - 1`); interface `m` uses entry `GHOST - 1 + m`.
    pub fn rate(
        &self,
        grid: &Grid1D,
        cells: &[Conserved],
        c_coef: &[f64],
    ) -> Result<(Vec<Conserved>, f64)> {
        let gas: &GasModel = &self.solver.gas;
        let dx = grid.dx;
        let degree = self.reconstruction.degree();
        let prims: Vec<Primitive> = cells.iter().map(|w| gas.to_primitive(w)).collect();
        for w in cells {
            gas.check(w)?;
        }
        let len = cells.len();
        let profiles: Vec<Option<CellProfile>> = (0..len)
            .map(|k| {
                (k > 0 && k + 1 < len).then(|| {
                    reconstruct(
                        self.reconstruction,
                        &prims[k - 1],
                        &prims[k],
                        &prims[k + 1],
                        dx,
                    )
                })
            })
            .collect();

        let n = grid.n;
        let mut fluxes = Vec::with_capacity(n + 1);
        let mut sources = Vec::with_capacity(n + 1);
        let mut thetas = Vec::with_capacity(n + 1);
        let mut lmax: f64 = 0.0;
        for m in 0..=n {
            let k = GHOST - 1 + m;
            let th = if self.well_balanced {
                let sigma =
                    iss_residual(&cells[k], &cells[k + 1], grid.phi[k], grid.phi[k + 1], gas)?;
                theta(sigma, c_coef[k], dx, degree)
            } else {
                1.0
            };
            let (wl, wr, pl, pr) = if th == 0.0 {
                (cells[k], cells[k + 1], grid.phi[k], grid.phi[k + 1])
            } else {
                let edge_l = gas.to_conserved(&profiles[k].expect("interior profile").eval(0.5));
                let edge_r =
                    gas.to_conserved(&profiles[k + 1].expect("interior profile").eval(-0.5));
                let phi_l = grid.potential.value(grid.x[k] + 0.5 * dx);
                let phi_r = grid.potential.value(grid.x[k + 1] - 0.5 * dx);
                (
                    cells[k] * (1.0 - th) + edge_l * th,
                    cells[k + 1] * (1.0 - th) + edge_r * th,
                    (1.0 - th) * grid.phi[k] + th * phi_l,
                    (1.0 - th) * grid.phi[k + 1] + th * phi_r,
                )
            };
            let res = self.solver.assemble(&wl, &wr, pl, pr, dx)?;
            lmax = lmax.max(res.lambda);
            fluxes.push(self.solver.flux(&wl, &wr, &res));
            sources.push(res.source());
            thetas.push(th);
        }

        let rate = (0..n)
            .map(|m| {
                let k = GHOST + m;
                let (th_m, th_p) = (thetas[m], thetas[m + 1]);
                let mut src = (sources[m + 1] * (1.0 - th_p) + sources[m] * (1.0 - th_m)) * 0.5;
                let weight = 0.5 * (th_m + th_p);
                if weight > 0.0 {
                    src +=
                        self.cell_source(grid, k, profiles[k].as_ref().expect("interior profile"))
                            * weight;
                }
                -(fluxes[m + 1] - fluxes[m]) / dx + src
            })
            .collect();
        Ok((rate, lmax))
    }

    /// Two-point Gauss quadrature of `(0, -rho phi', 0, -q phi')` over cell `k`.
    fn cell_source(&self, grid: &Grid1D, k: usize, profile: &CellProfile) -> Conserved {
        let mut s = Conserved::ZERO;
        for &(xi, w) in &GAUSS2 {
            let p = profile.eval(xi);
            let dphi = grid.potential.derivative(grid.x[k] + xi * grid.dx);
            s.q -= w * p.rho * dphi;
            s.e -= w * p.rho * p.u * dphi;
        }
        s
    }
}
