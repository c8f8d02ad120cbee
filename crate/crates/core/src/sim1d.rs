//! Time stepping of one-dimensional runs.

use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel};
use crate::fv1d::{self, Boundary, Grid1D};
use crate::highorder::{rate_coefficients, HighOrder, Reconstruction};
use crate::riemann::InterfaceSolver;

const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain HLL with a centred source, first order.
    Hll,
    /// Well-balanced interface solver.
    WellBalanced,
}

/// How the rate coefficient of the blending weight is obtained on the first
/// step, where no previous time level exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstStepRate {
    /// `C = 0`, so the first step is the first-order well-balanced one.
    Zero,
    /// Estimate `|W^1 - W^0| / dt` by the first-order well-balanced residual.
    Residual,
}

/// Spatial and temporal discretisation of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scheme {
    pub method: Method,
    /// Order of accuracy `d + 1`, one to three.
    pub order: u8,
    /// Blend towards the first-order scheme near steady states.
    pub wb_correction: bool,
    pub c_theta: f64,
    pub lambda_scale: f64,
    pub cfl: f64,
    pub first_step_rate: FirstStepRate,
}

impl Scheme {
    pub fn well_balanced(order: u8) -> Self {
        Self {
            method: Method::WellBalanced,
            order,
            wb_correction: true,
            c_theta: 1.0,
            lambda_scale: 1.0,
            cfl: 0.9,
            first_step_rate: FirstStepRate::Residual,
        }
    }

    pub fn hll() -> Self {
        Self {
            order: 1,
            method: Method::Hll,
            ..Self::well_balanced(1)
        }
    }

    /// Parses `hll`, `wb1`..`wb3` or `ho2`/`ho3` (high order without blending).
    pub fn parse(name: &str) -> Result<Self> {
        let s = match name {
            "hll" => Self::hll(),
            "wb1" => Self::well_balanced(1),
            "wb2" => Self::well_balanced(2),
            "wb3" => Self::well_balanced(3),
            "ho2" => Self {
                wb_correction: false,
                ..Self::well_balanced(2)
            },
            "ho3" => Self {
                wb_correction: false,
                ..Self::well_balanced(3)
            },
            other => return Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        };
        Ok(s)
    }

    pub fn name(&self) -> String {
        match (self.method, self.order, self.wb_correction) {
            (Method::Hll, _, _) => "hll".into(),
            (_, 1, _) => "wb1".into(),
            (_, o, true) => format!("wb{o}"),
            (_, o, false) => format!("ho{o}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.order) {
            return Err(Error::InvalidInput(format!(
                "order must be 1, 2 or 3, got {}",
                self.order
            )));
        }
        if self.method == Method::Hll && self.order != 1 {
            return Err(Error::InvalidInput(
                "the HLL baseline is first order only".into(),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.c_theta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "c_theta must be non-negative, got {}",
                self.c_theta
            )));
        }
        Ok(())
    }
}

/// Counters collected while stepping.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub steps: usize,
    pub halvings: usize,
    pub enlargements: usize,
    /// Interfaces where the averaged squared momentum came out negative.
    pub negative_q2: usize,
    /// Largest entropy-inequality violation for `eta = s` and `eta = exp(s)`.
    pub entropy_violation: [f64; 2],
    pub min_rho: f64,
    pub min_p: f64,
}

/// A one-dimensional run: grid, boundary treatment, scheme and state.
pub struct Simulation1d {
    pub grid: Grid1D,
    pub boundary: Boundary,
    pub gas: GasModel,
    pub scheme: Scheme,
    /// Evaluate the entropy inequality after each first-order step.
    pub monitor_entropy: bool,
    pub stats: RunStats,
    cells: Vec<Conserved>,
    prev: Option<(Vec<Conserved>, f64)>,
    time: f64,
}

impl Simulation1d {
    pub fn new(
        grid: Grid1D,
        boundary: Boundary,
        gas: GasModel,
        scheme: Scheme,
        interior: &[Conserved],
    ) -> Result<Self> {
        scheme.validate()?;
        boundary.validate()?;
        if boundary.is_periodic() != grid.periodic {
            return Err(Error::InvalidInput(
                "grid and boundary disagree on periodicity".into(),
            ));
        }
        if interior.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "expected {} cells, got {}",
                grid.n,
                interior.len()
            )));
        }
        for w in interior {
            gas.check(w)?;
        }
        let mut cells = vec![Conserved::ZERO; grid.len()];
        cells[grid.interior()].copy_from_slice(interior);
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
            scheme,
            monitor_entropy: false,
            stats,
            cells,
            prev: None,
            time: 0.0,
        };
        sim.track_extrema();
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn cells(&self) -> &[Conserved] {
        &self.cells[self.grid.interior()]
    }

    fn solver(&self) -> Result<InterfaceSolver> {
        InterfaceSolver::new(self.gas, self.scheme.lambda_scale)
    }

    fn track_extrema(&mut self) {
        for w in &self.cells[self.grid.interior()] {
            self.stats.min_rho = self.stats.min_rho.min(w.rho);
            self.stats.min_p = self.stats.min_p.min(self.gas.pressure(w));
        }
    }

    fn admissible(&self, cells: &[Conserved]) -> Result<()> {
        cells.iter().try_for_each(|w| self.gas.check(w))
    }

    /// Advances by one step without passing `t_end`; returns the step size.
    pub fn step(&mut self, t_end: f64) -> Result<f64> {
        let remaining = t_end - self.time;
        if !(remaining > 0.0) {
            return Err(Error::InvalidInput(format!(
                "end time {t_end} not after current time {}",
                self.time
            )));
        }
        self.boundary
            .fill(&self.grid, &mut self.cells, self.time, &self.gas)?;
        let old = self.cells.clone();
        let dt = match (self.scheme.method, self.scheme.order) {
            (Method::Hll, _) => self.step_hll(remaining)?,
            (Method::WellBalanced, 1) => self.step_wb1(remaining)?,
            _ => self.step_high_order(remaining)?,
        };
        self.prev = Some((old, dt));
        self.time = if dt == remaining {
            t_end
        } else {
            self.time + dt
        };
        self.stats.steps += 1;
        self.track_extrema();
        Ok(dt)
    }

    /// Steps until `t_final` is reached exactly.
    pub fn advance_to(&mut self, t_final: f64) -> Result<()> {
        while self.time < t_final {
            self.step(t_final)?;
        }
        Ok(())
    }

    fn step_hll(&mut self, remaining: f64) -> Result<f64> {
        let (rate, lmax) =
            fv1d::hll_rate(&self.gas, self.scheme.lambda_scale, &self.grid, &self.cells)?;
        let mut dt = fv1d::cfl_dt(lmax, self.grid.dx, self.scheme.cfl).min(remaining);
        for _ in 0..=MAX_HALVINGS {
            let next: Vec<Conserved> = self.cells[self.grid.interior()]
                .iter()
                .zip(&rate)
                .map(|(w, l)| *w + *l * dt)
                .collect();
            if self.admissible(&next).is_ok() {
                self.cells[self.grid.interior()].copy_from_slice(&next);
                return Ok(dt);
            }
            dt *= 0.5;
            self.stats.halvings += 1;
        }
        Err(Error::StepFailure(format!(
            "no admissible HLL update at t = {}",
            self.time
        )))
    }

    fn step_wb1(&mut self, remaining: f64) -> Result<f64> {
        let solver = self.solver()?;
        let res = fv1d::resolve_interfaces(&solver, &self.grid, &self.cells)?;
        self.stats.enlargements += res.iter().filter(|r| r.enlargements > 0).count();
        self.stats.negative_q2 += res.iter().filter(|r| r.q2_tilde < 0.0).count();
        let mut dt =
            fv1d::cfl_dt(fv1d::max_lambda(&res), self.grid.dx, self.scheme.cfl).min(remaining);
        for _ in 0..=MAX_HALVINGS {
            let next = fv1d::step_star_form(&self.grid, &self.cells, &res, dt);
            if self.admissible(&next).is_ok() {
                if self.monitor_entropy {
                    let etas: [fn(f64) -> f64; 2] = [|s| s, f64::exp];
                    for (slot, eta) in etas.into_iter().enumerate() {
                        let v = fv1d::entropy_step_diagnostic(
                            &solver,
                            &self.grid,
                            &self.cells,
                            &next,
                            &res,
                            dt,
                            eta,
                        )?;
                        let worst = &mut self.stats.entropy_violation[slot];
                        *worst = worst.max(v);
                    }
                }
                self.cells[self.grid.interior()].copy_from_slice(&next);
                return Ok(dt);
            }
            dt *= 0.5;
            self.stats.halvings += 1;
        }
        Err(Error::StepFailure(format!(
            "no admissible first-order update at t = {}",
            self.time
        )))
    }

    fn step_high_order(&mut self, remaining: f64) -> Result<f64> {
        let reconstruction = if self.scheme.order == 2 {
            Reconstruction::Linear
        } else {
            Reconstruction::Parabolic
        };
        let ho = HighOrder {
            solver: self.solver()?,
            reconstruction,
            well_balanced: self.scheme.wb_correction,
        };
        let c_coef = match &self.prev {
            Some((prev, dt_prev)) => {
                rate_coefficients(&self.cells, prev, *dt_prev, self.scheme.c_theta)
            }
            None => match self.scheme.first_step_rate {
                FirstStepRate::Zero => vec![0.0; self.cells.len() - 1],
                FirstStepRate::Residual => self.startup_coefficients()?,
            },
        };
        let (rate0, lmax) = ho.rate(&self.grid, &self.cells, &c_coef)?;
        let mut dt = fv1d::cfl_dt(lmax, self.grid.dx, self.scheme.cfl).min(remaining);
        for _ in 0..=MAX_HALVINGS {
            match self.ssprk(&ho, &rate0, &c_coef, dt) {
                Ok(next) => {
                    self.cells = next;
                    return Ok(dt);
                }
                Err(Error::NotAdmissible { .. }) => {
                    dt *= 0.5;
                    self.stats.halvings += 1;
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::StepFailure(format!(
            "no admissible high-order update at t = {}",
            self.time
        )))
    }

    fn startup_coefficients(&self) -> Result<Vec<f64>> {
        let solver = self.solver()?;
        let res = fv1d::resolve_interfaces(&solver, &self.grid, &self.cells)?;
        let rate = fv1d::wb_rate(&solver, &self.grid, &self.cells, &res);
        let range = self.grid.interior();
        let n = self.grid.n as isize;
        let norms: Vec<f64> = (0..self.cells.len())
            .map(|k| {
                let i = if self.grid.periodic {
                    (k as isize - range.start as isize).rem_euclid(n) as usize
                } else {
                    k.clamp(range.start, range.end - 1) - range.start
                };
                rate[i].norm()
            })
            .collect();
        Ok(norms
            .windows(2)
            .map(|w| self.scheme.c_theta * 0.5 * (w[0] + w[1]))
            .collect())
    }

    /// Strong-stability-preserving Runge-Kutta step (Heun or Shu-Osher).
    fn ssprk(
        &self,
        ho: &HighOrder,
        rate0: &[Conserved],
        c_coef: &[f64],
        dt: f64,
    ) -> Result<Vec<Conserved>> {
        let range = self.grid.interior();
        let w0 = &self.cells;
        let euler = |w: &[Conserved], rate: &[Conserved]| -> Vec<Conserved> {
            let mut out = w.to_vec();
            for (k, l) in range.clone().zip(rate) {
                out[k] = w[k] + *l * dt;
            }
            out
        };
        let combine = |a: f64, x: &[Conserved], b: f64, y: &[Conserved]| -> Vec<Conserved> {
            let mut out = x.to_vec();
            for k in range.clone() {
                out[k] = x[k] * a + y[k] * b;
            }
            out
        };
        let stage = |w: &mut Vec<Conserved>, t: f64| -> Result<Vec<Conserved>> {
            self.admissible(&w[range.clone()])?;
            self.boundary.fill(&self.grid, w, t, &self.gas)?;
            Ok(ho.rate(&self.grid, w, c_coef)?.0)
        };
        let t = self.time;
        let mut w1 = euler(w0, rate0);
        let r1 = stage(&mut w1, t + dt)?;
        let out = if self.scheme.order == 2 {
            combine(0.5, w0, 0.5, &euler(&w1, &r1))
        } else {
            let mut w2 = combine(0.75, w0, 0.25, &euler(&w1, &r1));
            let r2 = stage(&mut w2, t + 0.5 * dt)?;
            combine(1.0 / 3.0, w0, 2.0 / 3.0, &euler(&w2, &r2))
        };
        self.admissible(&out[range])?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{moving_equilibrium, Branch, Triplet};
    use crate::euler::Primitive;
    use crate::fv1d::GhostCell;
    use crate::potential::Potential;
    use std::sync::Arc;

    #[test]
    fn scheme_names_roundtrip() {
        for name in ["hll", "wb1", "wb2", "wb3", "ho2", "ho3"] {
            assert_eq!(Scheme::parse(name).unwrap().name(), name);
        }
        assert!(Scheme::parse("wb4").is_err());
    }

    #[test]
    fn high_order_schemes_keep_moving_equilibrium() {
        let gas = GasModel::default();
        let t = Triplet {
            q: 1.0,
            h: 5.0,
            s: 0.0,
        };
        let grid = Grid1D::new(0.0, 1.0, 50, Potential::Quadratic, false).unwrap();
        let eq = move |c: &GhostCell| {
            Ok(gas.to_conserved(&moving_equilibrium(&t, c.phi, Branch::Subsonic, &gas)?))
        };
        let cells: Vec<Conserved> = grid
            .interior()
            .map(|k| {
                eq(&GhostCell {
                    x: 0.0,
                    dx: grid.dx,
                    phi: grid.phi[k],
                    t: 0.0,
                })
                .unwrap()
            })
            .collect();
        for order in 1..=3 {
            let bc = Boundary::exact(Arc::new(eq));
            let mut sim =
                Simulation1d::new(grid.clone(), bc, gas, Scheme::well_balanced(order), &cells)
                    .unwrap();
            for _ in 0..100 {
                sim.step(10.0).unwrap();
            }
            let err = sim
                .cells()
                .iter()
                .zip(&cells)
                .map(|(a, b)| (*a - *b).max_abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "order {order}: drift {err}");
        }
    }

    #[test]
    fn sod_first_order_stays_admissible_and_entropic() {
        let gas = GasModel::default();
        let grid = Grid1D::new(0.0, 1.0, 75, Potential::Zero, false).unwrap();
        let cells: Vec<Conserved> = grid
            .interior()
            .map(|k| {
                let p = if grid.center(k) < 0.5 {
                    Primitive::new(1.0, 0.0, 1.0)
                } else {
                    Primitive::new(0.125, 0.0, 0.1)
                };
                gas.to_conserved(&p)
            })
            .collect();
        let mut sim = Simulation1d::new(
            grid,
            Boundary::neumann(),
            gas,
            Scheme::well_balanced(1),
            &cells,
        )
        .unwrap();
        sim.monitor_entropy = true;
        sim.advance_to(0.1644).unwrap();
        assert_eq!(sim.time(), 0.1644);
        assert!(sim.stats.entropy_violation[0] <= 1e-11);
        assert!(sim.stats.entropy_violation[1] <= 1e-11);
        assert!(sim.stats.min_rho > 0.0);
    }
}
