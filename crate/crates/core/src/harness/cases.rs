//! Registry of the experiments and their default parameters.

use crate::config::Config;
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct CaseInfo {
    pub id: &'static str,
    pub summary: &'static str,
    defaults: &'static str,
}

impl CaseInfo {
    /// Common defaults overlaid with the case's own.
    pub fn defaults(&self) -> Config {
        let common = Config::parse(COMMON).expect("common defaults parse");
        let own = Config::parse(self.defaults).expect("case defaults parse");
        let mut cfg = common.merged(&own);
        cfg.set("case", self.id);
        if !cfg.contains("output") {
            cfg.set("output", format!("out/{}", self.id));
        }
        cfg
    }
}

const COMMON: &str = "
gamma = 1.4
lambda = 1
c_theta = 1
cfl = 0.9
first_step_rate = residual
branch = subsonic
snapshots = 0
monitor_entropy = false
";

pub const CASES: &[CaseInfo] = &[
    CaseInfo {
        id: "eoc_exact",
        summary: "convergence to the travelling exact solution under phi(x) = x",
        defaults: "
dimension = 1
domain = 0, 2
n = 16, 32, 64, 128, 256, 512, 1024
schemes = wb1, wb2, wb3
t_final = 0.1
potential = linear
bc = exact
u0 = 1
k = 5
",
    },
    CaseInfo {
        id: "hydro_phi1",
        summary: "isentropic atmosphere at rest, quadratic potential, exact boundaries",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = hll, wb1, wb2, wb3
t_final = 1
potential = phi1
bc = exact
triplet = 0, 3.5, 0
",
    },
    CaseInfo {
        id: "hydro_phi2",
        summary: "isentropic atmosphere at rest, sine potential, periodic boundaries",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = hll, wb1, wb2, wb3
t_final = 1
potential = phi2
bc = periodic
triplet = 0, 3.5, 0
",
    },
    CaseInfo {
        id: "moving_phi1",
        summary: "moving equilibrium (q, H, s) = (1, 5, 0), quadratic potential",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = hll, wb1, wb2, wb3
t_final = 1
potential = phi1
bc = exact
triplet = 1, 5, 0
",
    },
    CaseInfo {
        id: "moving_phi2",
        summary: "moving equilibrium (q, H, s) = (1, 5, 0), sine potential",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = hll, wb1, wb2, wb3
t_final = 1
potential = phi2
bc = periodic
triplet = 1, 5, 0
",
    },
    CaseInfo {
        id: "hydro_perturbed",
        summary: "pressure pulse on the atmosphere at rest",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = wb1, wb2, wb3
c_theta.wb3 = 0.15
t_final = 0.075
potential = phi1
bc = exact
triplet = 0, 3.5, 0
amplitude = 1e-12
support_radius = 0.25
monitor_entropy = true
",
    },
    CaseInfo {
        id: "moving_perturbed",
        summary: "pressure pulse on the moving equilibrium",
        defaults: "
dimension = 1
domain = 0, 1
n = 50
schemes = wb1, wb2, wb3
c_theta.wb3 = 0.15
t_final = 0.075
potential = phi1
bc = exact
triplet = 1, 5, 0
amplitude = 1e-12
support_radius = 0.25
monitor_entropy = true
",
    },
    CaseInfo {
        id: "moving_boundary_perturbed",
        summary: "moving equilibrium driven by an oscillating right-boundary velocity",
        defaults: "
dimension = 1
domain = 0, 1
n = 512
schemes = wb1, wb2, wb3
c_theta.wb3 = 0.15
lambda = 5
t_final = 0.72
potential = phi1
bc = exact
triplet = 1, 5, 0
boundary_amplitude = 1e-8
boundary_frequency = 4
",
    },
    CaseInfo {
        id: "sod",
        summary: "Sod shock tube without gravity",
        defaults: "
dimension = 1
domain = 0, 1
n = 75
schemes = wb1, wb2, wb3
t_final = 0.1644
potential = none
bc = neumann
x0 = 0.5
left = 1, 0, 1
right = 0.125, 0, 0.1
monitor_entropy = true
",
    },
    CaseInfo {
        id: "double_rarefaction",
        summary: "two receding rarefactions leaving a near-vacuum",
        defaults: "
dimension = 1
domain = 0, 1
n = 75
schemes = wb1, wb2, wb3
t_final = 0.09
potential = none
bc = neumann
x0 = 0.5
left = 1, -3.3333333333333335, 1
right = 1, 3.3333333333333335, 1
monitor_entropy = true
",
    },
    CaseInfo {
        id: "stationary_shock",
        summary: "single shock of zero speed",
        defaults: "
dimension = 1
domain = 0, 1
n = 75
schemes = wb1, wb2, wb3
c_theta = 3
t_final = 0.25
potential = none
bc = neumann
x0 = 0.5
left = 0.96, 2.0833333333333335, 2.8333333333333335
right = 1, 2, 3
monitor_entropy = true
",
    },
    CaseInfo {
        id: "gravity_rp",
        summary: "Riemann problem in steady variables under the quadratic potential",
        defaults: "
dimension = 1
domain = 0, 1
n = 75
schemes = wb1, wb2, wb3
t_final = 0.2
potential = phi1
bc = neumann
x0 = 0.5
triplet_left = 0.5, 6, 0
triplet_right = 0, 3, 0.2876820724517809
n_ref = 2000
monitor_entropy = true
",
    },
    CaseInfo {
        id: "vortex2d",
        summary: "stationary vortex on an isothermal atmosphere",
        defaults: "
dimension = 2
domain = 0, 1, 0, 1
n = 64, 128, 256
schemes = wb1
cfl = 0.5
t_final = 0.165
potential = vortex_piecewise
bc = periodic
rt = 4
rc = 0.6
",
    },
    CaseInfo {
        id: "steady2d",
        summary: "grid-aligned moving equilibrium under sin(2 pi y)",
        defaults: "
dimension = 2
domain = 0, 1, 0, 1
n = 32
schemes = hll, wb1
cfl = 0.5
t_final = 1
potential = sine_y
bc = periodic
triplet = 1, 10, 0
v0 = 1
",
    },
    CaseInfo {
        id: "steady2d_perturbed",
        summary: "density pulse transported along the grid-aligned equilibrium",
        defaults: "
dimension = 2
domain = 0, 1, 0, 1
n = 128
schemes = wb1
cfl = 0.5
t_final = 0.2
potential = sine_y
bc = periodic
triplet = 1, 10, 0
v0 = 1
amplitude = 1e-5
snapshots = 2
",
    },
    CaseInfo {
        id: "implosion2d",
        summary: "radial implosion under a Gaussian potential well",
        defaults: "
dimension = 2
domain = 0, 1, 0, 1
n = 128
schemes = wb1
cfl = 0.5
t_final = 0.125
potential = gaussian2d
bc = neumann
radius = 0.25
inner = 1, 0, 0, 1
outer = 0.125, 0, 0, 0.1
snapshots = 2
",
    },
];

pub fn lookup(id: &str) -> Result<&'static CaseInfo> {
    CASES
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidInput(format!("unknown case '{id}' (see list-cases)")))
}
