//! First-order schemes on a uniform Cartesian grid.
//!
//! Every interface is resolved with the one-dimensional solver in the frame
//! of its normal, and both directions are accumulated in a single unsplit
//! update. Storage carries one ghost layer; cell `(i, j)` of the interior is
//! stored at `(i + 1, j + 1)`.

use rayon::prelude::*;

use crate::equilibrium::{moving_equilibrium_with_tangent, Branch, Triplet};
use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel, Primitive};
use crate::potential::Potential2d;
use crate::quadrature::cell_mean_2d;
use crate::riemann::{hll_flux, InterfaceSolver};
use crate::sim1d::{Method, RunStats};

const G: usize = 1;
const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Periodic,
    /// Zeroth-order extrapolation.
    Neumann,
}

/// Boundary treatment of the four sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundary2d {
    pub left: Side,
    pub right: Side,
    pub bottom: Side,
    pub top: Side,
}

impl Boundary2d {
    pub fn periodic() -> Self {
        Self {
            left: Side::Periodic,
            right: Side::Periodic,
            bottom: Side::Periodic,
            top: Side::Periodic,
        }
    }

    pub fn neumann() -> Self {
        Self {
            left: Side::Neumann,
            right: Side::Neumann,
            bottom: Side::Neumann,
            top: Side::Neumann,
        }
    }

    pub fn periodic_x(&self) -> bool {
        self.left == Side::Periodic
    }

    pub fn periodic_y(&self) -> bool {
        self.bottom == Side::Periodic
    }

    pub fn validate(&self) -> Result<()> {
        if (self.left == Side::Periodic) != (self.right == Side::Periodic)
            || (self.bottom == Side::Periodic) != (self.top == Side::Periodic)
        {
            return Err(Error::InvalidInput(
                "periodic boundaries must come in opposite pairs".into(),
            ));
        }
        Ok(())
    }
}

/// Uniform Cartesian grid with cell-averaged potential, ghosts included.
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub potential: Potential2d,
    pub phi: Vec<f64>,
}

impl Grid2D {
    /// Periodic ghosts take the potential of the cell they copy.
    pub fn new(
        bounds: [f64; 4],
        nx: usize,
        ny: usize,
        potential: Potential2d,
        boundary: &Boundary2d,
    ) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = bounds;
        if nx < 2 || ny < 2 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::InvalidInput(format!(
                "bad grid {bounds:?} with {nx} x {ny} cells"
            )));
        }
        let dx = (x_max - x_min) / nx as f64;
        let dy = (y_max - y_min) / ny as f64;
        let mut grid = Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            dx,
            dy,
            potential,
            phi: Vec::new(),
        };
        let wrap = |k: usize, n: usize, periodic: bool| -> f64 {
            let mut i = k as isize - G as isize;
            if periodic {
                i = i.rem_euclid(n as isize);
            }
            i as f64 + 0.5
        };
        let mut phi = Vec::with_capacity(grid.storage_len());
        for j in 0..ny + 2 * G {
            let y = y_min + wrap(j, ny, boundary.periodic_y()) * dy;
            for i in 0..nx + 2 * G {
                let x = x_min + wrap(i, nx, boundary.periodic_x()) * dx;
                phi.push(cell_mean_2d(x, y, dx, dy, |a, b| potential.value(a, b)));
            }
        }
        grid.phi = phi;
        Ok(grid)
    }

    pub fn stride(&self) -> usize {
        self.nx + 2 * G
    }

    pub fn storage_len(&self) -> usize {
        self.stride() * (self.ny + 2 * G)
    }

    /// Storage index of interior cell `(i, j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        (j + G) * self.stride() + i + G
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx,
            self.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Interior cell averages of `f` with the tensor three-point Gauss rule.
    pub fn average(&self, f: impl Fn(f64, f64) -> Conserved) -> Vec<Conserved> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.center(i, j);
                let mut acc = Conserved::ZERO;
                for (a, wa) in crate::quadrature::GAUSS3 {
                    for (b, wb) in crate::quadrature::GAUSS3 {
                        acc += f(x + a * self.dx, y + b * self.dy) * (wa * wb);
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    pub fn fill(&self, boundary: &Boundary2d, cells: &mut [Conserved]) {
        let (nx, ny, s) = (self.nx, self.ny, self.stride());
        for j in G..ny + G {
            let row = j * s;
            cells[row] = match boundary.left {
                Side::Periodic => cells[row + nx],
                Side::Neumann => cells[row + 1],
            };
            cells[row + nx + 1] = match boundary.right {
                Side::Periodic => cells[row + 1],
                Side::Neumann => cells[row + nx],
            };
        }
        for i in G..nx + G {
            cells[i] = match boundary.bottom {
                Side::Periodic => cells[ny * s + i],
                Side::Neumann => cells[s + i],
            };
            cells[(ny + 1) * s + i] = match boundary.top {
                Side::Periodic => cells[s + i],
                Side::Neumann => cells[ny * s + i],
            };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Moving equilibrium along one grid axis with a constant transverse velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAlignedEquilibrium {
    pub axis: Axis,
    pub triplet: Triplet,
    pub v0: f64,
    pub branch: Branch,
}

impl GridAlignedEquilibrium {
    pub fn at(&self, phi: f64, gas: &GasModel) -> Result<Primitive> {
        let p = moving_equilibrium_with_tangent(&self.triplet, phi, self.v0, self.branch, gas)?;
        Ok(match self.axis {
            Axis::X => p,
            Axis::Y => Primitive {
                u: p.v,
                v: p.u,
                ..p
            },
        })
    }
}

/// Star-form contributions of one interface to its two neighbours.
#[derive(Debug, Clone, Copy)]
struct Face {
    lambda: f64,
    /// `lambda (W_L* - W_L)` for the cell on the low side.
    to_low: Conserved,
    /// `lambda (W_R* - W_R)` for the cell on the high side.
    to_high: Conserved,
    enlarged: bool,
    negative_q2: bool,
}

/// A two-dimensional first-order run.
pub struct Simulation2d {
    pub grid: Grid2D,
    pub boundary: Boundary2d,
    pub gas: GasModel,
    pub method: Method,
    pub lambda_scale: f64,
    /// Fraction of the largest step allowed by the positivity bound of each
    /// direction; the sum of both must not exceed one, hence `cfl <= 0.5`.
    pub cfl: f64,
    pub stats: RunStats,
    cells: Vec<Conserved>,
    time: f64,
}

impl Simulation2d {
    pub fn new(
        grid: Grid2D,
        boundary: Boundary2d,
        gas: GasModel,
        method: Method,
        lambda_scale: f64,
        cfl: f64,
        interior: &[Conserved],
    ) -> Result<Self> {
        boundary.validate()?;
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "cfl must lie in (0, 1], got {cfl}"
            )));
        }
        InterfaceSolver::new(gas, lambda_scale)?;
        if interior.len() != grid.nx * grid.ny {
            return Err(Error::InvalidInput(format!(
                "expected {} cells, got {}",
                grid.nx * grid.ny,
                interior.len()
            )));
        }
        let mut cells = vec![Conserved::ZERO; grid.storage_len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let w = interior[j * grid.nx + i];
                gas.check(&w)?;
                cells[grid.index(i, j)] = w;
            }
        }
        let stats = RunStats {
            entropy_violation: [f64::NEG_INFINITY; 2],
            min_rho: f64::INFINITY,
            min_p: f64::INFINITY,
            ..RunStats::default()
        };
        let mut sim = Self {
            grid,
            boundary,
            gas,
            method,
            lambda_scale,
            cfl,
            stats,
            cells,
            time: 0.0,
        };
        sim.track_extrema();
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Interior cells in row-major order (x fastest).
    pub fn cells(&self) -> Vec<Conserved> {
        let g = &self.grid;
        (0..g.ny)
            .flat_map(|j| (0..g.nx).map(move |i| self.cells[g.index(i, j)]))
            .collect()
    }

    fn track_extrema(&mut self) {
        for w in self.cells() {
            self.stats.min_rho = self.stats.min_rho.min(w.rho);
            self.stats.min_p = self.stats.min_p.min(self.gas.pressure(&w));
        }
    }

    pub fn step(&mut self, t_end: f64) -> Result<f64> {
        let remaining = t_end - self.time;
        if !(remaining > 0.0) {
            return Err(Error::InvalidInput(format!(
                "end time {t_end} not after current time {}",
                self.time
            )));
        }
        self.grid.fill(&self.boundary, &mut self.cells);
        let dt = match self.method {
            Method::WellBalanced => self.step_wb(remaining)?,
            Method::Hll => self.step_hll(remaining)?,
        };
        self.time = if dt == remaining {
            t_end
        } else {
            self.time + dt
        };
        self.stats.steps += 1;
        self.track_extrema();
        Ok(dt)
    }

    pub fn advance_to(&mut self, t_final: f64) -> Result<()> {
        while self.time < t_final {
            self.step(t_final)?;
        }
        Ok(())
    }

    /// Resolves the `nx + 1` x-faces of every row and the `ny + 1` y-faces of
    /// every column.
    fn faces(&self, solver: &InterfaceSolver) -> Result<(Vec<Face>, Vec<Face>)> {
        let g = &self.grid;
        let s = g.stride();
        let cells = &self.cells;
        let face = |a: usize, b: usize, h: f64, rotate: bool| -> Result<Face> {
            let (wl, wr) = if rotate {
                (cells[a].swapped(), cells[b].swapped())
            } else {
                (cells[a], cells[b])
            };
            let r = solver.assemble(&wl, &wr, g.phi[a], g.phi[b], h)?;
            let (mut lo, mut hi) = ((r.wl_star - wl) * r.lambda, (r.wr_star - wr) * r.lambda);
            if rotate {
                lo = lo.swapped();
                hi = hi.swapped();
            }
            Ok(Face {
                lambda: r.lambda,
                to_low: lo,
                to_high: hi,
                enlarged: r.enlargements > 0,
                negative_q2: r.q2_tilde < 0.0,
            })
        };
        let xf: Vec<Vec<Face>> = (0..g.ny)
            .into_par_iter()
            .map(|j| {
                let row = (j + G) * s;
                (0..=g.nx)
                    .map(|i| face(row + i, row + i + 1, g.dx, false))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let yf: Vec<Vec<Face>> = (0..=g.ny)
            .into_par_iter()
            .map(|j| {
                (0..g.nx)
                    .map(|i| face(j * s + i + G, (j + 1) * s + i + G, g.dy, true))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok((xf.concat(), yf.concat()))
    }

    fn step_wb(&mut self, remaining: f64) -> Result<f64> {
        let solver = InterfaceSolver::new(self.gas, self.lambda_scale)?;
        let (xf, yf) = self.faces(&solver)?;
        for f in xf.iter().chain(&yf) {
            self.stats.enlargements += f.enlarged as usize;
            self.stats.negative_q2 += f.negative_q2 as usize;
        }
        let lx = xf.iter().map(|f| f.lambda).fold(0.0, f64::max);
        let ly = yf.iter().map(|f| f.lambda).fold(0.0, f64::max);
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        // y-face (i, j) lies below cell (i, j).
        let rate: Vec<Conserved> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| {
                let west = &xf[j * (nx + 1) + i];
                let east = &xf[j * (nx + 1) + i + 1];
                let south = &yf[j * nx + i];
                let north = &yf[(j + 1) * nx + i];
                (east.to_low + west.to_high) / g.dx + (north.to_low + south.to_high) / g.dy
            })
            .collect();
        let dt = self.cfl_dt(lx, ly).min(remaining);
        self.apply(&rate, dt, "well-balanced")
    }

    fn cfl_dt(&self, lx: f64, ly: f64) -> f64 {
        let bx = if lx > 0.0 {
            self.grid.dx / lx
        } else {
            f64::INFINITY
        };
        let by = if ly > 0.0 {
            self.grid.dy / ly
        } else {
            f64::INFINITY
        };
        self.cfl * 0.5 * bx.min(by)
    }

    fn step_hll(&mut self, remaining: f64) -> Result<f64> {
        let g = &self.grid;
        let s = g.stride();
        let cells = &self.cells;
        let (gas, scale) = (&self.gas, self.lambda_scale);
        let xf: Vec<Vec<(Conserved, f64)>> = (0..g.ny)
            .into_par_iter()
            .map(|j| {
                let row = (j + G) * s;
                (0..=g.nx)
                    .map(|i| hll_flux(&cells[row + i], &cells[row + i + 1], scale, gas))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let yf: Vec<Vec<(Conserved, f64)>> = (0..=g.ny)
            .into_par_iter()
            .map(|j| {
                (0..g.nx)
                    .map(|i| {
                        let (f, l) = hll_flux(
                            &cells[j * s + i + G].swapped(),
                            &cells[(j + 1) * s + i + G].swapped(),
                            scale,
                            gas,
                        )?;
                        Ok((f.swapped(), l))
                    })
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let (xf, yf) = (xf.concat(), yf.concat());
        let lx = xf.iter().map(|f| f.1).fold(0.0, f64::max);
        let ly = yf.iter().map(|f| f.1).fold(0.0, f64::max);
        let (nx, ny) = (g.nx, g.ny);
        let rate: Vec<Conserved> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| {
                let k = g.index(i, j);
                let w = cells[k];
                let gx = (g.phi[k + 1] - g.phi[k - 1]) / (2.0 * g.dx);
                let gy = (g.phi[k + s] - g.phi[k - s]) / (2.0 * g.dy);
                let src = Conserved {
                    rho: 0.0,
                    q: -w.rho * gx,
                    qt: -w.rho * gy,
                    e: -(w.q * gx + w.qt * gy),
                };
                let fx = xf[j * (nx + 1) + i + 1].0 - xf[j * (nx + 1) + i].0;
                let fy = yf[(j + 1) * nx + i].0 - yf[j * nx + i].0;
                src - fx / g.dx - fy / g.dy
            })
            .collect();
        let dt = self.cfl_dt(lx, ly).min(remaining);
        self.apply(&rate, dt, "HLL")
    }

    fn apply(&mut self, rate: &[Conserved], mut dt: f64, label: &str) -> Result<f64> {
        let g = &self.grid;
        for _ in 0..=MAX_HALVINGS {
            let next: Vec<Conserved> = (0..g.ny)
                .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
                .zip(rate)
                .map(|((i, j), l)| self.cells[g.index(i, j)] + *l * dt)
                .collect();
            if next.iter().all(|w| self.gas.is_admissible(w)) {
                for (n, w) in next.into_iter().enumerate() {
                    let k = g.index(n % g.nx, n / g.nx);
                    self.cells[k] = w;
                }
                return Ok(dt);
            }
            dt *= 0.5;
            self.stats.halvings += 1;
        }
        Err(Error::StepFailure(format!(
            "no admissible {label} update at t = {}",
            self.time
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv1d::{Boundary, Grid1D};
    use crate::potential::Potential;
    use crate::sim1d::{Scheme, Simulation1d};

    fn steady() -> GridAlignedEquilibrium {
        GridAlignedEquilibrium {
            axis: Axis::Y,
            triplet: Triplet {
                q: 1.0,
                h: 10.0,
                s: 0.0,
            },
            v0: 1.0,
            branch: Branch::Subsonic,
        }
    }

    #[test]
    fn grid_aligned_equilibrium_is_a_fixed_point() {
        let gas = GasModel::default();
        let eq = steady();
        let bc = Boundary2d::periodic();
        let grid = Grid2D::new([0.0, 1.0, 0.0, 1.0], 16, 16, Potential2d::SineY, &bc).unwrap();
        let init: Vec<Conserved> = (0..16)
            .flat_map(|j| (0..16).map(move |i| (i, j)))
            .map(|(i, j)| gas.to_conserved(&eq.at(grid.phi[grid.index(i, j)], &gas).unwrap()))
            .collect();
        let mut sim =
            Simulation2d::new(grid, bc, gas, Method::WellBalanced, 1.0, 0.5, &init).unwrap();
        for _ in 0..50 {
            sim.step(10.0).unwrap();
        }
        let drift = sim
            .cells()
            .iter()
            .zip(&init)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-13, "drift {drift}");
    }

    #[test]
    fn uniform_state_is_unchanged() {
        let gas = GasModel::default();
        let bc = Boundary2d::neumann();
        let grid = Grid2D::new([0.0, 1.0, 0.0, 2.0], 8, 5, Potential2d::Zero, &bc).unwrap();
        let w = gas.to_conserved(&Primitive {
            rho: 1.3,
            u: 0.4,
            v: -0.7,
            p: 2.0,
        });
        let mut sim =
            Simulation2d::new(grid, bc, gas, Method::WellBalanced, 1.0, 0.5, &[w; 40]).unwrap();
        sim.advance_to(0.1).unwrap();
        for c in sim.cells() {
            assert!((c - w).max_abs() < 1e-14);
        }
    }

    #[test]
    fn sod_rows_match_the_one_dimensional_scheme() {
        let gas = GasModel::default();
        let n = 40;
        let sod = |x: f64| {
            if x < 0.5 {
                Primitive::new(1.0, 0.0, 1.0)
            } else {
                Primitive::new(0.125, 0.0, 0.1)
            }
        };
        let g1 = Grid1D::new(0.0, 1.0, n, Potential::Zero, false).unwrap();
        let init1: Vec<Conserved> = g1
            .interior()
            .map(|k| gas.to_conserved(&sod(g1.center(k))))
            .collect();
        let scheme = Scheme {
            cfl: 0.5,
            ..Scheme::well_balanced(1)
        };
        let mut s1 = Simulation1d::new(g1, Boundary::neumann(), gas, scheme, &init1).unwrap();

        let bc = Boundary2d::neumann();
        let g2 = Grid2D::new([0.0, 1.0, 0.0, 0.3], n, 3, Potential2d::Zero, &bc).unwrap();
        let init2: Vec<Conserved> = (0..3).flat_map(|_| init1.iter().copied()).collect();
        let mut s2 =
            Simulation2d::new(g2, bc, gas, Method::WellBalanced, 1.0, 0.5, &init2).unwrap();
        for _ in 0..30 {
            let dt1 = s1.step(1.0).unwrap();
            let dt2 = s2.step(1.0).unwrap();
            assert!((dt1 - dt2).abs() < 1e-15);
        }
        let rows = s2.cells();
        for j in 0..3 {
            for (a, b) in rows[j * n..(j + 1) * n].iter().zip(s1.cells()) {
                assert!((*a - *b).max_abs() < 1e-13);
                assert!(a.qt.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn mass_is_conserved_with_periodic_boundaries() {
        let gas = GasModel::default();
        let bc = Boundary2d::periodic();
        let grid = Grid2D::new([0.0, 1.0, 0.0, 1.0], 20, 20, Potential2d::Gaussian, &bc).unwrap();
        let init = grid.average(|x, y| {
            let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
            let p = if r2 < 0.0625 {
                Primitive::new(1.0, 0.0, 1.0)
            } else {
                Primitive::new(0.125, 0.0, 0.1)
            };
            gas.to_conserved(&p)
        });
        let mass = |c: &[Conserved]| c.iter().map(|w| w.rho).sum::<f64>();
        let m0 = mass(&init);
        for method in [Method::WellBalanced, Method::Hll] {
            let mut sim =
                Simulation2d::new(grid.clone(), bc, gas, method, 1.0, 0.5, &init).unwrap();
            for _ in 0..20 {
                sim.step(1.0).unwrap();
                let m = mass(&sim.cells());
                assert!(((m - m0) / m0).abs() < 1e-12);
            }
            assert!(sim.stats.min_rho > 0.0 && sim.stats.min_p > 0.0);
        }
    }
}
