//! Reference solutions: exact Riemann solver, a closed-form unsteady solution
//! with a linear potential, the gravitational vortex and a fine-grid HLL run.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel, Primitive};
use crate::fv1d::{Boundary, Grid1D};
use crate::potential::{vortex_potential, Potential, VORTEX_CENTER};
use crate::quadrature::GAUSS3;
use crate::sim1d::{Scheme, Simulation1d};

const RIEMANN_TOL: f64 = 1e-14;
const RIEMANN_MAX_ITER: usize = 200;

/// Exact solution of the Riemann problem for the homogeneous Euler equations.
#[derive(Debug, Clone, Copy)]
pub struct ExactRiemann {
    gas: GasModel,
    l: Primitive,
    r: Primitive,
    cl: f64,
    cr: f64,
    /// Star pressure and velocity, absent when the data generate vacuum.
    star: Option<(f64, f64)>,
}

impl ExactRiemann {
    pub fn new(l: Primitive, r: Primitive, gas: GasModel) -> Result<Self> {
        for s in [&l, &r] {
            if !(s.rho > 0.0 && s.p > 0.0) {
                return Err(Error::NotAdmissible { rho: s.rho, p: s.p });
            }
        }
        let cl = gas.sound_speed(l.rho, l.p);
        let cr = gas.sound_speed(r.rho, r.p);
        let mut solver = Self {
            gas,
            l,
            r,
            cl,
            cr,
            star: None,
        };
        if 2.0 * (cl + cr) / (gas.gamma - 1.0) > r.u - l.u {
            solver.star = Some(solver.star_state()?);
        }
        Ok(solver)
    }

    /// Star pressure and velocity (`None` for vacuum-generating data).
    pub fn star(&self) -> Option<(f64, f64)> {
        self.star
    }

    fn wave(&self, p: f64, s: &Primitive, c: f64) -> (f64, f64) {
        let g = self.gas.gamma;
        if p > s.p {
            let a = 2.0 / ((g + 1.0) * s.rho);
            let b = (g - 1.0) / (g + 1.0) * s.p;
            let root = (a / (p + b)).sqrt();
            ((p - s.p) * root, root * (1.0 - 0.5 * (p - s.p) / (b + p)))
        } else {
            let z = (g - 1.0) / (2.0 * g);
            let ratio = p / s.p;
            (
                2.0 * c / (g - 1.0) * (ratio.powf(z) - 1.0),
                ratio.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c),
            )
        }
    }

    fn star_state(&self) -> Result<(f64, f64)> {
        let (l, r) = (&self.l, &self.r);
        let g = self.gas.gamma;
        let du = r.u - l.u;
        let f = |p: f64| {
            let (fl, dl) = self.wave(p, l, self.cl);
            let (fr, dr) = self.wave(p, r, self.cr);
            (fl + fr + du, dl + dr)
        };
        // Two-rarefaction guess.
        let z = (g - 1.0) / (2.0 * g);
        let guess = ((self.cl + self.cr - 0.5 * (g - 1.0) * du)
            / (self.cl / l.p.powf(z) + self.cr / r.p.powf(z)))
        .powf(1.0 / z);
        let mut lo = 0.0;
        let mut hi = l.p.max(r.p).max(guess);
        while f(hi).0 < 0.0 {
            hi *= 2.0;
        }
        let mut p = guess.clamp(f64::MIN_POSITIVE, hi);
        for _ in 0..RIEMANN_MAX_ITER {
            let (val, der) = f(p);
            if val > 0.0 {
                hi = p;
            } else {
                lo = p;
            }
            let mut next = p - val / der;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - p).abs() <= RIEMANN_TOL * 0.5 * (next + p) {
                let (fl, _) = self.wave(next, l, self.cl);
                let (fr, _) = self.wave(next, r, self.cr);
                return Ok((next, 0.5 * (l.u + r.u) + 0.5 * (fr - fl)));
            }
            p = next;
        }
        Err(Error::NoConvergence {
            iterations: RIEMANN_MAX_ITER,
            residual: f(p).0,
        })
    }

    /// Self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        match self.star {
            Some((ps, us)) => {
                if xi <= us {
                    self.sample_side(xi, ps, us, &self.l, self.cl, -1.0)
                } else {
                    self.sample_side(xi, ps, us, &self.r, self.cr, 1.0)
                }
            }
            None => self.sample_vacuum(xi),
        }
    }

    /// Sampling on one side of the contact; `dir` is -1 (left) or +1 (right).
    fn sample_side(&self, xi: f64, ps: f64, us: f64, s: &Primitive, c: f64, dir: f64) -> Primitive {
        let g = self.gas.gamma;
        let gm = (g - 1.0) / (g + 1.0);
        if ps > s.p {
            let ratio = ps / s.p;
            let speed =
                s.u + dir * c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
            if dir * (xi - speed) >= 0.0 {
                *s
            } else {
                let rho = s.rho * (ratio + gm) / (ratio * gm + 1.0);
                Primitive::new(rho, us, ps)
            }
        } else {
            let head = s.u + dir * c;
            let cs = c * (ps / s.p).powf((g - 1.0) / (2.0 * g));
            let tail = us + dir * cs;
            if dir * (xi - head) >= 0.0 {
                *s
            } else if dir * (xi - tail) <= 0.0 {
                Primitive::new(s.rho * (ps / s.p).powf(1.0 / g), us, ps)
            } else {
                self.fan(xi, s, c, dir)
            }
        }
    }

    fn fan(&self, xi: f64, s: &Primitive, c: f64, dir: f64) -> Primitive {
        let g = self.gas.gamma;
        let base = 2.0 / (g + 1.0) - dir * (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
        let rho = s.rho * base.powf(2.0 / (g - 1.0));
        let u = 2.0 / (g + 1.0) * (-dir * c + (g - 1.0) / 2.0 * s.u + xi);
        let p = s.p * base.powf(2.0 * g / (g - 1.0));
        Primitive::new(rho, u, p)
    }

    fn sample_vacuum(&self, xi: f64) -> Primitive {
        let g = self.gas.gamma;
        let (l, r) = (&self.l, &self.r);
        let front_l = l.u + 2.0 * self.cl / (g - 1.0);
        let front_r = r.u - 2.0 * self.cr / (g - 1.0);
        if xi <= l.u - self.cl {
            *l
        } else if xi < front_l {
            self.fan(xi, l, self.cl, -1.0)
        } else if xi <= front_r {
            Primitive::new(0.0, 0.5 * (front_l + front_r), 0.0)
        } else if xi < r.u + self.cr {
            self.fan(xi, r, self.cr, 1.0)
        } else {
            *r
        }
    }
}

/// Smooth unsteady solution for `phi(x) = x`: a density wave advected with
/// speed `u0` on top of a balancing pressure.
pub fn exact_unsteady(x: f64, t: f64, u0: f64, k: f64) -> Primitive {
    let xi = x - u0 * t;
    let arg = k * PI * xi;
    Primitive::new(
        1.0 + 0.2 * arg.sin(),
        u0,
        4.5 - xi + arg.cos() / (5.0 * k * PI),
    )
}

/// Gravitational vortex around [`VORTEX_CENTER`] on an isothermal background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub rt: f64,
    pub rc: f64,
}

impl Default for Vortex {
    fn default() -> Self {
        Self { rt: 4.0, rc: 0.6 }
    }
}

impl Vortex {
    pub fn angular_velocity(r: f64) -> f64 {
        if r <= 0.2 {
            5.0 * r
        } else if r <= 0.4 {
            2.0 - 5.0 * r
        } else {
            0.0
        }
    }

    fn p1(&self, r: f64) -> f64 {
        1.0 - (-12.5 * r * r / self.rt).exp()
    }

    fn p2(&self, r: f64) -> f64 {
        let rt = self.rt;
        let ln5 = 5f64.ln();
        let p21 = (-(0.5 + ln5) / rt).exp() / ((rt - 1.0) * (rt - 0.5));
        let p22 = (ln5 / rt).exp() * (rt * (4.0 * rt - 2.5) + 0.5);
        p21 * (p22
            + r.powf(-1.0 / rt)
                * (-2.0
                    + 10.0 * r * (1.0 - 2.0 * rt)
                    + rt * (6.0 - 4.0 * rt)
                    + 12.5 * r * r * (rt - 1.0)))
    }

    /// Pressure excess balancing the centrifugal force.
    pub fn vortex_pressure(&self, r: f64) -> f64 {
        let rt = self.rt;
        if r <= 0.2 {
            rt * self.p1(r)
        } else if r <= 0.4 {
            rt * (self.p1(0.2) + self.p2(r))
        } else {
            rt * (self.p1(0.2) + self.p2(0.4))
        }
    }

    pub fn state(&self, x: f64, y: f64) -> Primitive {
        let (cx, cy) = VORTEX_CENTER;
        let (dx, dy) = (x - cx, y - cy);
        let r = (dx * dx + dy * dy).sqrt();
        let rho = (-vortex_potential(r, self.rc) / self.rt).exp();
        let ut = Self::angular_velocity(r);
        let (sin, cos) = if r > 0.0 {
            (dy / r, dx / r)
        } else {
            (0.0, 1.0)
        };
        Primitive {
            rho,
            u: -ut * sin,
            v: ut * cos,
            p: self.rt * rho + self.vortex_pressure(r),
        }
    }
}

/// Conservative remap of a fine uniform grid onto a coarse one spanning the
/// same interval, by overlap-weighted averaging.
pub fn block_average(fine: &[Conserved], n_coarse: usize) -> Vec<Conserved> {
    let nf = fine.len() as f64;
    let ratio = nf / n_coarse as f64;
    (0..n_coarse)
        .map(|i| {
            let (a, b) = (i as f64 * ratio, (i + 1) as f64 * ratio);
            let mut acc = Conserved::ZERO;
            let mut j = a.floor() as usize;
            while (j as f64) < b && j < fine.len() {
                let overlap = (b.min(j as f64 + 1.0) - a.max(j as f64)).max(0.0);
                acc += fine[j] * overlap;
                j += 1;
            }
            acc / ratio
        })
        .collect()
}

/// Plain HLL with a centred source on `n_ref` cells, remapped onto `n_coarse`
/// cells of `[x_min, x_max]`. Initial cell averages use the three-point Gauss
/// rule on the fine grid.
#[allow(clippy::too_many_arguments)]
pub fn fine_hll_reference(
    x_min: f64,
    x_max: f64,
    potential: Potential,
    boundary: Boundary,
    gas: GasModel,
    initial: impl Fn(f64) -> Result<Conserved>,
    t_final: f64,
    n_ref: usize,
    n_coarse: usize,
) -> Result<Vec<Conserved>> {
    let grid = Grid1D::new(x_min, x_max, n_ref, potential, boundary.is_periodic())?;
    let init = grid
        .interior()
        .map(|k| {
            GAUSS3.iter().try_fold(Conserved::ZERO, |acc, &(xi, w)| {
                Ok(acc + initial(grid.center(k) + xi * grid.dx)? * w)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sim = Simulation1d::new(grid, boundary, gas, Scheme::hll(), &init)?;
    sim.advance_to(t_final)?;
    Ok(block_average(sim.cells(), n_coarse))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn fine_reference_of_a_constant_state() {
        let gas = gas();
        let w = gas.to_conserved(&Primitive::new(0.7, 0.3, 1.1));
        let r = fine_hll_reference(
            0.0,
            1.0,
            Potential::Zero,
            Boundary::neumann(),
            gas,
            |_| Ok(w),
            0.05,
            200,
            75,
        )
        .unwrap();
        assert_eq!(r.len(), 75);
        for c in r {
            assert!((c - w).max_abs() < 1e-13);
        }
    }

    #[test]
    fn sod_star_region() {
        let rs = ExactRiemann::new(
            Primitive::new(1.0, 0.0, 1.0),
            Primitive::new(0.125, 0.0, 0.1),
            gas(),
        )
        .unwrap();
        let w = rs.sample(0.0);
        // star values recomputed with 40-digit Newton iteration
        assert!((w.p - 0.303_130_178_050_646_8).abs() < 1e-12, "p = {}", w.p);
        assert!((w.u - 0.927_452_620_048_95).abs() < 1e-12, "u = {}", w.u);
        assert!(
            (w.rho - 0.426_319_428_178_495_2).abs() < 1e-12,
            "rho = {}",
            w.rho
        );
    }

    #[test]
    fn identical_states_give_constant_solution() {
        let s = Primitive::new(0.7, 0.3, 1.2);
        let rs = ExactRiemann::new(s, s, gas()).unwrap();
        for &xi in &[-3.0, -0.5, 0.0, 0.4, 5.0] {
            let w = rs.sample(xi);
            assert!(
                (w.rho - s.rho).abs() < 1e-14
                    && (w.u - s.u).abs() < 1e-14
                    && (w.p - s.p).abs() < 1e-14
            );
        }
    }

    #[test]
    fn stationary_shock_satisfies_rankine_hugoniot() {
        let g = gas();
        let l = Primitive::new(24.0 / 25.0, 25.0 / 12.0, 17.0 / 6.0);
        let r = Primitive::new(1.0, 2.0, 3.0);
        let (wl, wr) = (g.to_conserved(&l), g.to_conserved(&r));
        let jump = g.flux(&wr) - g.flux(&wl);
        assert!(jump.max_abs() < 1e-12, "{jump:?}");
        let rs = ExactRiemann::new(l, r, g).unwrap();
        let left = rs.sample(-1e-9);
        let right = rs.sample(1e-9);
        assert!((left.rho - l.rho).abs() < 1e-9 && (right.rho - r.rho).abs() < 1e-9);
    }

    #[test]
    fn vacuum_branch_samples_zero_density() {
        let rs = ExactRiemann::new(
            Primitive::new(1.0, -10.0, 0.1),
            Primitive::new(1.0, 10.0, 0.1),
            gas(),
        )
        .unwrap();
        assert!(rs.star().is_none());
        assert_eq!(rs.sample(0.0).rho, 0.0);
        assert_eq!(rs.sample(-20.0).rho, 1.0);
    }

    #[test]
    fn unsteady_solution_values() {
        let w = exact_unsteady(0.0, 0.0, 1.0, 5.0);
        assert_eq!(w.rho, 1.0);
        assert!((w.p - (4.5 + 1.0 / (25.0 * PI))).abs() < 1e-15);
    }

    #[test]
    fn unsteady_solution_solves_the_balance_law() {
        let g = gas();
        let d = 1e-5;
        let cons = |x: f64, t: f64| g.to_conserved(&exact_unsteady(x, t, 1.0, 5.0));
        for &(x, t) in &[(0.3, 0.02), (1.1, 0.07), (1.77, 0.1)] {
            let dt = (cons(x, t + d) - cons(x, t - d)) / (2.0 * d);
            let dx = (g.flux(&cons(x + d, t)) - g.flux(&cons(x - d, t))) / (2.0 * d);
            let w = cons(x, t);
            let src = Conserved::new(0.0, -w.rho, -w.q);
            let res = dt + dx - src;
            assert!(res.max_abs() < 1e-8, "residual {res:?}");
        }
    }

    #[test]
    fn vortex_pressure_integrates_centrifugal_balance() {
        let v = Vortex::default();
        let integrand = |s: f64| {
            let rho = (-vortex_potential(s, v.rc) / v.rt).exp();
            let ut = Vortex::angular_velocity(s);
            rho * ut * ut / s
        };
        // composite Simpson on [1e-9, r]
        let simpson = |a: f64, b: f64, n: usize| {
            let h = (b - a) / n as f64;
            let mut acc = integrand(a) + integrand(b);
            for i in 1..n {
                acc += integrand(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        for &r in &[0.1f64, 0.2, 0.3, 0.4, 0.55] {
            let mut q = simpson(1e-12, r.min(0.2), 2000);
            if r > 0.2 {
                q += simpson(0.2, r.min(0.4), 2000);
            }
            assert!(
                (q - v.vortex_pressure(r)).abs() < 1e-10,
                "r = {r}: {q} vs {}",
                v.vortex_pressure(r)
            );
        }
    }

    #[test]
    fn block_average_conserves_totals() {
        let fine: Vec<Conserved> = (0..2000)
            .map(|i| Conserved::new(1.0 + (i as f64 * 0.01).sin(), 0.0, 1.0))
            .collect();
        let coarse = block_average(&fine, 75);
        let tf: f64 = fine.iter().map(|w| w.rho).sum::<f64>() / 2000.0;
        let tc: f64 = coarse.iter().map(|w| w.rho).sum::<f64>() / 75.0;
        assert!((tf - tc).abs() < 1e-14);
    }
}
