//! First-order finite-volume schemes on a uniform one-dimensional grid.
//!
//! Cell states are stored with [`GHOST`] ghost cells on each side. Interface
//! `m` (for `m = 0..=n`) separates storage cells `GHOST - 1 + m` and
//! `GHOST + m`.

use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel};
use crate::potential::Potential;
use crate::quadrature::cell_mean;
use crate::riemann::{hll_flux, InterfaceResolution, InterfaceSolver};

pub const GHOST: usize = 2;

/// Uniform grid with cell-averaged potential values, ghosts included.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
    pub potential: Potential,
    pub periodic: bool,
    /// Cell centres in the frame of each cell; periodic ghosts carry the
    /// centre of the interior cell they copy.
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
}

impl Grid1D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        n: usize,
        potential: Potential,
        periodic: bool,
    ) -> Result<Self> {
        if n < 2 || !(x_max > x_min) {
            return Err(Error::InvalidInput(format!(
                "bad grid [{x_min}, {x_max}] with {n} cells"
            )));
        }
        let dx = (x_max - x_min) / n as f64;
        let x: Vec<f64> = (0..n + 2 * GHOST)
            .map(|k| {
                let mut i = k as isize - GHOST as isize;
                if periodic {
                    i = i.rem_euclid(n as isize);
                }
                x_min + (i as f64 + 0.5) * dx
            })
            .collect();
        let phi = x
            .iter()
            .map(|&xc| cell_average_phi(&potential, xc, dx))
            .collect();
        Ok(Self {
            x_min,
            x_max,
            n,
            dx,
            potential,
            periodic,
            x,
            phi,
        })
    }

    pub fn len(&self) -> usize {
        self.n + 2 * GHOST
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn interior(&self) -> Range<usize> {
        GHOST..GHOST + self.n
    }

    /// Geometric centre of storage cell `k`, ghosts included.
    pub fn center(&self, k: usize) -> f64 {
        self.x_min + (k as f64 - GHOST as f64 + 0.5) * self.dx
    }
}

/// Cell average of the potential with the three-point Gauss rule.
pub fn cell_average_phi(potential: &Potential, x: f64, dx: f64) -> f64 {
    cell_mean(x, dx, |s| potential.value(s))
}

/// Data handed to a ghost-state generator.
#[derive(Debug, Clone, Copy)]
pub struct GhostCell {
    pub x: f64,
    pub dx: f64,
    pub phi: f64,
    pub t: f64,
}

pub type GhostFn = Arc<dyn Fn(&GhostCell) -> Result<Conserved> + Send + Sync>;
pub type VelocityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Boundary treatment of one side of the domain.
#[derive(Clone)]
pub enum BoundarySide {
    Periodic,
    /// Zeroth-order extrapolation.
    Neumann,
    /// Ghost states from a prescribed solution.
    Exact(GhostFn),
    /// Prescribed states whose velocity is shifted by a function of time.
    DirichletVelocity {
        base: GhostFn,
        velocity: VelocityFn,
    },
}

impl std::fmt::Debug for BoundarySide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BoundarySide::Periodic => "Periodic",
            BoundarySide::Neumann => "Neumann",
            BoundarySide::Exact(_) => "Exact",
            BoundarySide::DirichletVelocity { .. } => "DirichletVelocity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct Boundary {
    pub left: BoundarySide,
    pub right: BoundarySide,
}

impl Boundary {
    pub fn periodic() -> Self {
        Self {
            left: BoundarySide::Periodic,
            right: BoundarySide::Periodic,
        }
    }

    pub fn neumann() -> Self {
        Self {
            left: BoundarySide::Neumann,
            right: BoundarySide::Neumann,
        }
    }

    pub fn exact(f: GhostFn) -> Self {
        Self {
            left: BoundarySide::Exact(f.clone()),
            right: BoundarySide::Exact(f),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.left, BoundarySide::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        let l = matches!(self.left, BoundarySide::Periodic);
        let r = matches!(self.right, BoundarySide::Periodic);
        if l != r {
            return Err(Error::InvalidInput(
                "periodic boundaries must be used on both sides".into(),
            ));
        }
        Ok(())
    }

    /// Overwrites the ghost cells of `cells` for time `t`.
    pub fn fill(
        &self,
        grid: &Grid1D,
        cells: &mut [Conserved],
        t: f64,
        gas: &GasModel,
    ) -> Result<()> {
        let n = grid.n;
        for g in 0..GHOST {
            let kl = g;
            let kr = GHOST + n + g;
            cells[kl] = self.ghost(&self.left, grid, cells, kl, GHOST, t, gas)?;
            cells[kr] = self.ghost(&self.right, grid, cells, kr, GHOST + n - 1, t, gas)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn ghost(
        &self,
        side: &BoundarySide,
        grid: &Grid1D,
        cells: &[Conserved],
        k: usize,
        nearest: usize,
        t: f64,
        gas: &GasModel,
    ) -> Result<Conserved> {
        let cell = GhostCell {
            x: grid.center(k),
            dx: grid.dx,
            phi: grid.phi[k],
            t,
        };
        match side {
            BoundarySide::Periodic => {
                let n = grid.n;
                let src = if k < GHOST { k + n } else { k - n };
                Ok(cells[src])
            }
            BoundarySide::Neumann => Ok(cells[nearest]),
            BoundarySide::Exact(f) => f(&cell),
            BoundarySide::DirichletVelocity { base, velocity } => {
                let mut p = gas.to_primitive(&base(&cell)?);
                p.u += velocity(t);
                Ok(gas.to_conserved(&p))
            }
        }
    }
}

/// Resolves all `n + 1` interfaces of a ghost-filled state.
pub fn resolve_interfaces(
    solver: &InterfaceSolver,
    grid: &Grid1D,
    cells: &[Conserved],
) -> Result<Vec<InterfaceResolution>> {
    (0..=grid.n)
        .map(|m| {
            let k = GHOST - 1 + m;
            solver.assemble(
                &cells[k],
                &cells[k + 1],
                grid.phi[k],
                grid.phi[k + 1],
                grid.dx,
            )
        })
        .collect()
}

pub fn max_lambda(res: &[InterfaceResolution]) -> f64 {
    res.iter().map(|r| r.lambda).fold(0.0, f64::max)
}

/// `dt = cfl * dx / (2 max lambda)`.
pub fn cfl_dt(max_lambda: f64, dx: f64, cfl: f64) -> f64 {
    cfl * 0.5 * dx / max_lambda
}

/// Update written with the intermediate states of the two adjacent interfaces.
pub fn step_star_form(
    grid: &Grid1D,
    cells: &[Conserved],
    res: &[InterfaceResolution],
    dt: f64,
) -> Vec<Conserved> {
    let r = dt / grid.dx;
    grid.interior()
        .map(|k| {
            let m = k - GHOST;
            let w = cells[k];
            let right = &res[m + 1];
            let left = &res[m];
            w + ((right.wl_star - w) * right.lambda + (left.wr_star - w) * left.lambda) * r
        })
        .collect()
}

/// Time derivative in conservation form: flux differences plus the mean of
/// the two interface sources.
pub fn wb_rate(
    solver: &InterfaceSolver,
    grid: &Grid1D,
    cells: &[Conserved],
    res: &[InterfaceResolution],
) -> Vec<Conserved> {
    let fluxes: Vec<Conserved> = res
        .iter()
        .enumerate()
        .map(|(m, r)| {
            let k = GHOST - 1 + m;
            solver.flux(&cells[k], &cells[k + 1], r)
        })
        .collect();
    (0..grid.n)
        .map(|m| {
            -(fluxes[m + 1] - fluxes[m]) / grid.dx + (res[m].source() + res[m + 1].source()) * 0.5
        })
        .collect()
}

/// Forward-Euler step in conservation form.
pub fn step_conservative(
    solver: &InterfaceSolver,
    grid: &Grid1D,
    cells: &[Conserved],
    res: &[InterfaceResolution],
    dt: f64,
) -> Vec<Conserved> {
    wb_rate(solver, grid, cells, res)
        .into_iter()
        .zip(&cells[grid.interior()])
        .map(|(l, w)| *w + l * dt)
        .collect()
}

/// Plain HLL flux with a centred source; returns the rate and the largest
/// wave speed.
pub fn hll_rate(
    gas: &GasModel,
    lambda_scale: f64,
    grid: &Grid1D,
    cells: &[Conserved],
) -> Result<(Vec<Conserved>, f64)> {
    let mut fluxes = Vec::with_capacity(grid.n + 1);
    let mut lmax: f64 = 0.0;
    for m in 0..=grid.n {
        let k = GHOST - 1 + m;
        let (f, l) = hll_flux(&cells[k], &cells[k + 1], lambda_scale, gas)?;
        fluxes.push(f);
        lmax = lmax.max(l);
    }
    let rate = grid
        .interior()
        .map(|k| {
            let m = k - GHOST;
            let w = cells[k];
            let dphi = (grid.phi[k + 1] - grid.phi[k - 1]) / (2.0 * grid.dx);
            let src = Conserved {
                rho: 0.0,
                q: -w.rho * dphi,
                qt: 0.0,
                e: -w.q * dphi,
            };
            -(fluxes[m + 1] - fluxes[m]) / grid.dx + src
        })
        .collect();
    Ok((rate, lmax))
}

/// Largest scaled violation of the discrete entropy inequality over one
/// first-order step, for the entropy `rho * eta(s)`. Non-positive values mean
/// the inequality holds.
pub fn entropy_step_diagnostic(
    solver: &InterfaceSolver,
    grid: &Grid1D,
    before: &[Conserved],
    after: &[Conserved],
    res: &[InterfaceResolution],
    dt: f64,
    eta: impl Fn(f64) -> f64 + Copy,
) -> Result<f64> {
    let gas = &solver.gas;
    let g: Vec<f64> = res
        .iter()
        .enumerate()
        .map(|(m, r)| {
            let k = GHOST - 1 + m;
            solver.entropy_flux(&before[k], &before[k + 1], r, eta)
        })
        .collect::<Result<_>>()?;
    let mut worst = f64::NEG_INFINITY;
    for (m, k) in grid.interior().enumerate() {
        let old = gas.thermo(&before[k])?;
        let new = gas.thermo(&after[m])?;
        let u_old = old.rho * eta(old.s);
        let lhs = new.rho * eta(new.s);
        let rhs = u_old - dt / grid.dx * (g[m + 1] - g[m]);
        worst = worst.max((lhs - rhs) / u_old.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{moving_equilibrium, Branch, Triplet};
    use crate::euler::Primitive;

    fn gas() -> GasModel {
        GasModel::default()
    }

    fn filled(grid: &Grid1D, bc: &Boundary, f: impl Fn(f64, f64) -> Primitive) -> Vec<Conserved> {
        let g = gas();
        let mut cells: Vec<Conserved> = (0..grid.len())
            .map(|k| g.to_conserved(&f(grid.center(k), grid.phi[k])))
            .collect();
        bc.fill(grid, &mut cells, 0.0, &g).unwrap();
        cells
    }

    #[test]
    fn periodic_ghosts_wrap_potential_and_state() {
        let grid = Grid1D::new(0.0, 1.0, 10, Potential::Sine, true).unwrap();
        assert_eq!(grid.phi[0], grid.phi[10]);
        assert_eq!(grid.phi[GHOST + 10], grid.phi[GHOST]);
        let cells = filled(&grid, &Boundary::periodic(), |x, _| {
            Primitive::new(1.0 + x, 0.0, 1.0)
        });
        assert_eq!(cells[1], cells[11]);
        assert_eq!(cells[12], cells[2]);
    }

    #[test]
    fn star_and_flux_forms_agree() {
        let g = gas();
        let solver = InterfaceSolver::new(g, 1.0).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 40, Potential::Quadratic, false).unwrap();
        let cells = filled(&grid, &Boundary::neumann(), |x, _| {
            Primitive::new(1.0 + 0.5 * (6.0 * x).sin(), 0.3 * x, 1.0 + x * x)
        });
        let res = resolve_interfaces(&solver, &grid, &cells).unwrap();
        let dt = cfl_dt(max_lambda(&res), grid.dx, 1.0);
        let a = step_star_form(&grid, &cells, &res, dt);
        let b = step_conservative(&solver, &grid, &cells, &res, dt);
        for (x, y) in a.iter().zip(&b) {
            assert!((*x - *y).max_abs() < 1e-13, "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn equilibrium_chain_is_stationary() {
        let g = gas();
        let solver = InterfaceSolver::new(g, 1.0).unwrap();
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let grid = Grid1D::new(0.0, 1.0, 50, Potential::Sine, true).unwrap();
        let cells = filled(&grid, &Boundary::periodic(), |_, phi| {
            moving_equilibrium(&t, phi, Branch::Subsonic, &g).unwrap()
        });
        let res = resolve_interfaces(&solver, &grid, &cells).unwrap();
        let next = step_star_form(&grid, &cells, &res, cfl_dt(max_lambda(&res), grid.dx, 1.0));
        for (m, w) in next.iter().enumerate() {
            assert!((*w - cells[GHOST + m]).max_abs() < 1e-13);
        }
    }

    #[test]
    fn constant_state_is_preserved_by_hll() {
        let g = gas();
        let grid = Grid1D::new(0.0, 1.0, 8, Potential::Zero, false).unwrap();
        let cells = filled(&grid, &Boundary::neumann(), |_, _| {
            Primitive::new(1.0, 0.5, 1.0)
        });
        let (rate, l) = hll_rate(&g, 1.0, &grid, &cells).unwrap();
        assert!(rate.iter().all(|r| r.max_abs() == 0.0));
        assert!((l - (0.5 + 1.4f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn sod_step_satisfies_entropy_inequality() {
        let g = gas();
        let solver = InterfaceSolver::new(g, 1.0).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 50, Potential::Zero, false).unwrap();
        let cells = filled(&grid, &Boundary::neumann(), |x, _| {
            if x < 0.5 {
                Primitive::new(1.0, 0.0, 1.0)
            } else {
                Primitive::new(0.125, 0.0, 0.1)
            }
        });
        let res = resolve_interfaces(&solver, &grid, &cells).unwrap();
        let dt = cfl_dt(max_lambda(&res), grid.dx, 1.0);
        let next = step_star_form(&grid, &cells, &res, dt);
        let v = entropy_step_diagnostic(&solver, &grid, &cells, &next, &res, dt, |s| s).unwrap();
        assert!(v <= 1e-12, "violation {v}");
        let v = entropy_step_diagnostic(&solver, &grid, &cells, &next, &res, dt, f64::exp).unwrap();
        assert!(v <= 1e-12, "violation {v}");
    }
}
