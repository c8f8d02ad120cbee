//! Gravitational potentials used by the test cases.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One-dimensional potential with an analytic derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    /// `(x - 1/2)^2 / 2`
    Quadratic,
    /// `sin x`
    Sine,
    /// `slope * x`
    Linear {
        slope: f64,
    },
}

impl Potential {
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "none" => Ok(Potential::Zero),
            "phi1" => Ok(Potential::Quadratic),
            "phi2" => Ok(Potential::Sine),
            "linear" => Ok(Potential::Linear { slope: 1.0 }),
            other => Err(Error::InvalidInput(format!(
                "unknown 1D potential '{other}'"
            ))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Quadratic => 0.5 * (x - 0.5) * (x - 0.5),
            Potential::Sine => x.sin(),
            Potential::Linear { slope } => slope * x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Quadratic => x - 0.5,
            Potential::Sine => x.cos(),
            Potential::Linear { slope } => *slope,
        }
    }
}

/// Two-dimensional potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential2d {
    Zero,
    /// `sin(2 pi y)`
    SineY,
    /// `-exp(-50 r^2)` about `(0.5, 0.5)`
    Gaussian,
    /// Piecewise radial potential of the stationary vortex.
    Vortex {
        rc: f64,
    },
}

pub const VORTEX_CENTER: (f64, f64) = (0.5, 0.5);

impl Potential2d {
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "none" => Ok(Potential2d::Zero),
            "sine_y" => Ok(Potential2d::SineY),
            "gaussian2d" => Ok(Potential2d::Gaussian),
            "vortex_piecewise" => Ok(Potential2d::Vortex { rc: 0.6 }),
            other => Err(Error::InvalidInput(format!(
                "unknown 2D potential '{other}'"
            ))),
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = VORTEX_CENTER;
        let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        match self {
            Potential2d::Zero => 0.0,
            Potential2d::SineY => (2.0 * PI * y).sin(),
            Potential2d::Gaussian => -(-50.0 * r * r).exp(),
            Potential2d::Vortex { rc } => vortex_potential(r, *rc),
        }
    }
}

/// Radial potential of the vortex; continuous with a piecewise smooth gradient.
pub fn vortex_potential(r: f64, rc: f64) -> f64 {
    let a = rc - 0.4;
    let ln2 = 2f64.ln();
    if r <= 0.2 {
        12.5 * r * r
    } else if r <= 0.4 {
        0.5 - 0.2f64.ln() + r.ln()
    } else if r <= rc {
        ln2 - 0.5 * rc / a + 2.5 * rc / a * r - 1.25 * r * r / a
    } else {
        ln2 - 0.5 * rc / a + 1.25 * rc * rc / a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for pot in [
            Potential::Quadratic,
            Potential::Sine,
            Potential::Linear { slope: 1.0 },
        ] {
            for &x in &[0.1, 0.45, 0.9] {
                let fd = (pot.value(x + h) - pot.value(x - h)) / (2.0 * h);
                assert!((fd - pot.derivative(x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn vortex_potential_is_continuous() {
        let rc = 0.6;
        for &r0 in &[0.2, 0.4, rc] {
            let jump = vortex_potential(r0 + 1e-12, rc) - vortex_potential(r0 - 1e-12, rc);
            assert!(jump.abs() < 1e-10, "jump {jump} at {r0}");
        }
        // gradient matches u_theta^2 / r at the kinks
        let g = |r: f64| (vortex_potential(r + 1e-7, rc) - vortex_potential(r - 1e-7, rc)) / 2e-7;
        assert!((g(0.1) - 2.5).abs() < 1e-6);
        assert!((g(0.3) - 1.0 / 0.3).abs() < 1e-6);
        assert!((g(0.5) - 2.5 * (rc - 0.5) / (rc - 0.4)).abs() < 1e-6);
        assert_eq!(g(0.65), 0.0);
    }

    #[test]
    fn ids_parse() {
        assert_eq!(Potential::parse("phi1").unwrap(), Potential::Quadratic);
        assert!(Potential::parse("phi9").is_err());
        assert!(matches!(
            Potential2d::parse("vortex_piecewise").unwrap(),
            Potential2d::Vortex { .. }
        ));
    }
}
