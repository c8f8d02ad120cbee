//! State algebra for the compressible Euler equations with an ideal-gas law.
//!
//! A state carries density, normal momentum, an optional tangential momentum
//! (zero in one dimension) and total energy.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Ideal-gas closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    /// Pressure from density, momenta and total energy.
    #[inline]
    pub fn pressure(&self, w: &Conserved) -> f64 {
        (self.gamma - 1.0) * (w.e - 0.5 * (w.q * w.q + w.qt * w.qt) / w.rho)
    }

    /// Specific entropy `s = -ln(p / rho^gamma)`.
    #[inline]
    pub fn entropy(&self, rho: f64, p: f64) -> f64 {
        self.gamma * rho.ln() - p.ln()
    }

    #[inline]
    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }

    pub fn is_admissible(&self, w: &Conserved) -> bool {
        w.is_finite() && w.rho > 0.0 && self.pressure(w) > 0.0
    }

    pub fn check(&self, w: &Conserved) -> Result<()> {
        if self.is_admissible(w) {
            Ok(())
        } else {
            Err(Error::NotAdmissible {
                rho: w.rho,
                p: self.pressure(w),
            })
        }
    }

    /// Derived quantities of an admissible state.
    pub fn thermo(&self, w: &Conserved) -> Result<Thermo> {
        self.check(w)?;
        let u = w.q / w.rho;
        let v = w.qt / w.rho;
        let p = self.pressure(w);
        Ok(Thermo {
            rho: w.rho,
            u,
            v,
            p,
            c: self.sound_speed(w.rho, p),
            s: self.entropy(w.rho, p),
            h: (w.e + p) / w.rho,
        })
    }

    pub fn to_primitive(&self, w: &Conserved) -> Primitive {
        Primitive {
            rho: w.rho,
            u: w.q / w.rho,
            v: w.qt / w.rho,
            p: self.pressure(w),
        }
    }

    pub fn to_conserved(&self, p: &Primitive) -> Conserved {
        Conserved {
            rho: p.rho,
            q: p.rho * p.u,
            qt: p.rho * p.v,
            e: p.p / (self.gamma - 1.0) + 0.5 * p.rho * (p.u * p.u + p.v * p.v),
        }
    }

    /// Physical flux in the normal direction.
    #[inline]
    pub fn flux(&self, w: &Conserved) -> Conserved {
        let u = w.q / w.rho;
        let p = self.pressure(w);
        Conserved {
            rho: w.q,
            q: w.q * u + p,
            qt: w.qt * u,
            e: u * (w.e + p),
        }
    }

    /// Specific total enthalpy `(E + p) / rho`.
    pub fn enthalpy(&self, w: &Conserved) -> f64 {
        (w.e + self.pressure(w)) / w.rho
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Conserved variables `(rho, rho u, rho v, E)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Conserved {
    pub rho: f64,
    pub q: f64,
    pub qt: f64,
    pub e: f64,
}

impl Conserved {
    pub const ZERO: Conserved = Conserved {
        rho: 0.0,
        q: 0.0,
        qt: 0.0,
        e: 0.0,
    };

    pub fn new(rho: f64, q: f64, e: f64) -> Self {
        Self { rho, q, qt: 0.0, e }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.q.is_finite() && self.qt.is_finite() && self.e.is_finite()
    }

    /// Euclidean norm over all four components.
    pub fn norm(&self) -> f64 {
        (self.rho * self.rho + self.q * self.q + self.qt * self.qt + self.e * self.e).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.rho
            .abs()
            .max(self.q.abs())
            .max(self.qt.abs())
            .max(self.e.abs())
    }

    /// Swaps the normal and tangential momenta.
    pub fn swapped(&self) -> Self {
        Self {
            rho: self.rho,
            q: self.qt,
            qt: self.q,
            e: self.e,
        }
    }
}

impl Add for Conserved {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            rho: self.rho + o.rho,
            q: self.q + o.q,
            qt: self.qt + o.qt,
            e: self.e + o.e,
        }
    }
}

impl Sub for Conserved {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            rho: self.rho - o.rho,
            q: self.q - o.q,
            qt: self.qt - o.qt,
            e: self.e - o.e,
        }
    }
}

impl Neg for Conserved {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            rho: -self.rho,
            q: -self.q,
            qt: -self.qt,
            e: -self.e,
        }
    }
}

impl Mul<f64> for Conserved {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            rho: self.rho * s,
            q: self.q * s,
            qt: self.qt * s,
            e: self.e * s,
        }
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, w: Conserved) -> Conserved {
        w * self
    }
}

impl Div<f64> for Conserved {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self {
            rho: self.rho / s,
            q: self.q / s,
            qt: self.qt / s,
            e: self.e / s,
        }
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Conserved {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Primitive variables `(rho, u, v, p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, v: 0.0, p }
    }
}

/// Thermodynamic quantities of an admissible state.
#[derive(Debug, Clone, Copy)]
pub struct Thermo {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub c: f64,
    pub s: f64,
    pub h: f64,
}
