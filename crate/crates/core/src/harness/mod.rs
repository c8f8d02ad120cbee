//! Case driver: configuration, runs, error tables, thresholds and reports.

pub mod cases;
pub mod norms;
pub mod output;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::equilibrium::{moving_equilibrium, Branch, Equilibrium, Triplet};
use crate::error::{Error, Result};
use crate::euler::{Conserved, GasModel, Primitive};
use crate::fv1d::{Boundary, BoundarySide, GhostCell, Grid1D};
use crate::fv2d::{Axis, Boundary2d, Grid2D, GridAlignedEquilibrium, Simulation2d};
use crate::oracle::{exact_unsteady, fine_hll_reference, ExactRiemann, Vortex};
use crate::potential::{Potential, Potential2d};
use crate::quadrature::GAUSS3;
use crate::sim1d::{FirstStepRate, Method, RunStats, Scheme, Simulation1d};

use cases::CaseInfo;
use norms::{eoc, error_norms, Norms};

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub order: Option<u8>,
    pub t_final: Option<f64>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut Config) {
        if let Some(n) = self.n {
            cfg.set("n", n);
        }
        if let Some(d) = self.order {
            cfg.set("schemes", format!("wb{d}"));
        }
        if let Some(t) = self.t_final {
            cfg.set("t_final", t);
        }
        if let Some(o) = &self.output {
            cfg.set("output", o.display());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Max(f64),
    Min(f64),
    Range(f64, f64),
}

/// Acceptance threshold on a report metric, written `max.<metric> = v`,
/// `min.<metric> = v` or `range.<metric> = lo, hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub metric: String,
    pub bound: Bound,
}

impl Threshold {
    pub fn check(&self, value: Option<f64>) -> bool {
        let Some(v) = value.filter(|v| !v.is_nan()) else {
            return false;
        };
        match self.bound {
            Bound::Max(b) => v <= b,
            Bound::Min(b) => v >= b,
            Bound::Range(lo, hi) => lo <= v && v <= hi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub metric: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub value: Option<f64>,
    pub passed: bool,
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub struct CaseConfig {
    pub info: &'static CaseInfo,
    pub cfg: Config,
    pub dimension: u8,
    pub ns: Vec<usize>,
    pub schemes: Vec<String>,
    pub t_final: f64,
    pub gas: GasModel,
    pub output: PathBuf,
    pub snapshots: usize,
    pub monitor_entropy: bool,
    pub thresholds: Vec<Threshold>,
}

impl CaseConfig {
    /// Resolves a user configuration against the defaults of its case.
    pub fn from_config(user: &Config) -> Result<Self> {
        let info = cases::lookup(user.str("case")?)?;
        let defaults = info.defaults();
        let mut thresholds = Vec::new();
        for key in user.keys() {
            if let Some((kind, metric)) = key.split_once('.') {
                let bound = match kind {
                    "max" => Some(Bound::Max(user.get(key)?)),
                    "min" => Some(Bound::Min(user.get(key)?)),
                    "range" => {
                        let v: Vec<f64> = user.list(key)?;
                        if v.len() != 2 || v[0] > v[1] {
                            return Err(Error::Config {
                                line: 0,
                                message: format!("`{key}` needs `lo, hi`"),
                            });
                        }
                        Some(Bound::Range(v[0], v[1]))
                    }
                    "c_theta" => None,
                    _ => {
                        return Err(Error::Config {
                            line: 0,
                            message: format!("unknown key `{key}`"),
                        })
                    }
                };
                if let Some(bound) = bound {
                    thresholds.push(Threshold {
                        metric: metric.to_string(),
                        bound,
                    });
                }
                continue;
            }
            if !defaults.contains(key) {
                return Err(Error::Config {
                    line: 0,
                    message: format!("unknown key `{key}` for case {}", info.id),
                });
            }
        }
        let cfg = defaults.merged(user);
        let dimension: u8 = cfg.get("dimension")?;
        let ns: Vec<usize> = cfg.list("n")?;
        let schemes: Vec<String> = cfg.list("schemes")?;
        let t_final: f64 = cfg.get("t_final")?;
        if !(t_final > 0.0) {
            return Err(Error::InvalidInput(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        if ns.is_empty() || ns.iter().any(|&n| n < 8) {
            return Err(Error::InvalidInput(
                "every grid needs at least 8 cells".into(),
            ));
        }
        let cc = Self {
            info,
            dimension,
            ns,
            schemes,
            t_final,
            gas: GasModel::new(cfg.get("gamma")?)?,
            output: PathBuf::from(cfg.str("output")?),
            snapshots: cfg.get("snapshots")?,
            monitor_entropy: cfg.bool("monitor_entropy")?,
            thresholds,
            cfg,
        };
        for s in &cc.schemes {
            match cc.dimension {
                1 => {
                    cc.scheme(s)?;
                }
                _ => {
                    cc.method_2d(s)?;
                }
            }
        }
        Ok(cc)
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let mut user = Config::load(path)?;
        overrides.apply(&mut user);
        Self::from_config(&user)
    }

    /// Defaults of a registered case with overrides.
    pub fn builtin(id: &str, overrides: &Overrides) -> Result<Self> {
        let mut user = Config::default();
        user.set("case", id);
        overrides.apply(&mut user);
        Self::from_config(&user)
    }

    pub fn id(&self) -> &'static str {
        self.info.id
    }

    pub fn scheme(&self, name: &str) -> Result<Scheme> {
        let mut s = Scheme::parse(name)?;
        s.cfl = self.cfg.get("cfl")?;
        s.lambda_scale = self.cfg.get("lambda")?;
        let specific = format!("c_theta.{name}");
        s.c_theta = if self.cfg.contains(&specific) {
            self.cfg.get(&specific)?
        } else {
            self.cfg.get("c_theta")?
        };
        s.first_step_rate = match self.cfg.str("first_step_rate")? {
            "residual" => FirstStepRate::Residual,
            "zero" => FirstStepRate::Zero,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown first_step_rate '{other}'"
                )))
            }
        };
        s.validate()?;
        Ok(s)
    }

    fn method_2d(&self, name: &str) -> Result<Method> {
        match name {
            "wb1" => Ok(Method::WellBalanced),
            "hll" => Ok(Method::Hll),
            other => Err(Error::InvalidInput(format!(
                "two-dimensional runs support wb1 and hll, not '{other}'"
            ))),
        }
    }

    fn f64s(&self, key: &str) -> Result<Vec<f64>> {
        self.cfg.list(key)
    }

    fn triplet(&self, key: &str) -> Result<Triplet> {
        let v = self.f64s(key)?;
        if v.len() != 3 {
            return Err(Error::InvalidInput(format!("`{key}` needs q, H, s")));
        }
        Ok(Triplet {
            q: v[0],
            h: v[1],
            s: v[2],
        })
    }

    fn branch(&self) -> Result<Branch> {
        match self.cfg.str("branch")? {
            "subsonic" => Ok(Branch::Subsonic),
            "supersonic" => Ok(Branch::Supersonic),
            other => Err(Error::InvalidInput(format!("unknown branch '{other}'"))),
        }
    }

    fn primitive(&self, key: &str) -> Result<Primitive> {
        let v = self.f64s(key)?;
        match v.len() {
            3 => Ok(Primitive::new(v[0], v[1], v[2])),
            4 => Ok(Primitive {
                rho: v[0],
                u: v[1],
                v: v[2],
                p: v[3],
            }),
            _ => Err(Error::InvalidInput(format!(
                "`{key}` needs rho, u, p or rho, u, v, p"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub scheme: String,
    pub n: usize,
    pub variable: String,
    #[serde(flatten)]
    pub norms: Norms,
}

#[derive(Debug, Clone, Serialize)]
pub struct EocRow {
    pub scheme: String,
    pub variable: String,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub eoc_l2: Option<f64>,
    pub eoc_linf: Option<f64>,
}

/// Counters of one scheme on one grid.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scheme: String,
    pub n: usize,
    pub steps: usize,
    pub halvings: usize,
    pub enlargements: usize,
    pub negative_q2: usize,
    pub min_rho: f64,
    pub min_p: f64,
    /// Largest entropy-inequality violation for `eta = s` and `eta = exp(s)`
    /// over first-order steps; absent when not monitored.
    pub entropy_violation: Option<[f64; 2]>,
    /// Relative change of the total mass over the run.
    pub mass_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub case: String,
    pub config: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, Option<f64>>,
    pub errors: Vec<ErrorRow>,
    pub eoc: Vec<EocRow>,
    pub runs: Vec<RunSummary>,
    pub thresholds: Vec<ThresholdResult>,
    pub passed: bool,
    pub files: Vec<String>,
    /// Not part of the reproducible content.
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied().flatten()
    }
}

#[derive(Default)]
struct Collector {
    metrics: BTreeMap<String, Option<f64>>,
    errors: Vec<ErrorRow>,
    eoc: Vec<EocRow>,
    runs: Vec<RunSummary>,
    files: Vec<String>,
}

impl Collector {
    fn put(&mut self, key: String, v: f64) {
        self.metrics
            .insert(key, if v.is_finite() { Some(v) } else { None });
    }

    fn file(&mut self, dir: &Path, name: String) -> PathBuf {
        self.files.push(name.clone());
        dir.join(name)
    }

    #[allow(clippy::too_many_arguments)]
    fn record_errors(
        &mut self,
        label: &str,
        scheme: &str,
        n: usize,
        names: &[&str],
        num: &[Vec<f64>],
        reference: &[Vec<f64>],
        vol: f64,
    ) -> Result<()> {
        for (i, var) in names.iter().enumerate() {
            let norms = error_norms(&num[i], &reference[i], vol)?;
            self.put(format!("{label}.{var}.l2"), norms.l2);
            self.put(format!("{label}.{var}.linf"), norms.linf);
            self.put(format!("{label}.{var}.rel_l2"), norms.rel_l2);
            self.put(format!("{label}.{var}.rel_linf"), norms.rel_linf);
            self.errors.push(ErrorRow {
                scheme: scheme.into(),
                n,
                variable: var.to_string(),
                norms,
            });
        }
        Ok(())
    }

    fn record_stats(
        &mut self,
        label: &str,
        scheme: &str,
        n: usize,
        stats: &RunStats,
        mass_change: f64,
    ) {
        let monitored = stats.entropy_violation[0] > f64::NEG_INFINITY;
        self.put(format!("{label}.min_rho"), stats.min_rho);
        self.put(format!("{label}.min_p"), stats.min_p);
        self.put(format!("{label}.halvings"), stats.halvings as f64);
        self.put(format!("{label}.mass_change"), mass_change);
        if monitored {
            self.put(format!("{label}.entropy_s"), stats.entropy_violation[0]);
            self.put(format!("{label}.entropy_exp"), stats.entropy_violation[1]);
        }
        self.runs.push(RunSummary {
            scheme: scheme.into(),
            n,
            steps: stats.steps,
            halvings: stats.halvings,
            enlargements: stats.enlargements,
            negative_q2: stats.negative_q2,
            min_rho: stats.min_rho,
            min_p: stats.min_p,
            entropy_violation: monitored.then_some(stats.entropy_violation),
            mass_change,
        });
    }

    /// Orders of convergence for each scheme and variable over the grids.
    fn record_eoc(&mut self, ns: &[usize]) -> Result<()> {
        if ns.len() < 2 {
            return Ok(());
        }
        let mut groups: BTreeMap<(String, String), Vec<&ErrorRow>> = BTreeMap::new();
        for r in &self.errors {
            groups
                .entry((r.scheme.clone(), r.variable.clone()))
                .or_default()
                .push(r);
        }
        let mut rows = Vec::new();
        let mut metrics = Vec::new();
        for ((scheme, var), mut list) in groups {
            list.sort_by_key(|r| r.n);
            let grid: Vec<usize> = list.iter().map(|r| r.n).collect();
            if grid.len() < 2 {
                continue;
            }
            let l2 = eoc(&list.iter().map(|r| r.norms.l2).collect::<Vec<_>>(), &grid)?;
            let li = eoc(
                &list.iter().map(|r| r.norms.linf).collect::<Vec<_>>(),
                &grid,
            )?;
            for (j, (a, b)) in l2.iter().zip(&li).enumerate() {
                rows.push(EocRow {
                    scheme: scheme.clone(),
                    variable: var.clone(),
                    n_coarse: grid[j],
                    n_fine: grid[j + 1],
                    eoc_l2: *a,
                    eoc_linf: *b,
                });
                metrics.push((format!("{scheme}.{var}.eoc.n{}", grid[j + 1]), *a));
                metrics.push((format!("{scheme}.{var}.eoc_linf.n{}", grid[j + 1]), *b));
            }
            metrics.push((format!("{scheme}.{var}.eoc"), *l2.last().unwrap()));
            metrics.push((format!("{scheme}.{var}.eoc_linf"), *li.last().unwrap()));
        }
        for (k, v) in metrics {
            self.metrics.insert(k, v);
        }
        self.eoc = rows;
        Ok(())
    }
}

fn run_label(scheme: &str, n: usize, multi: bool) -> String {
    if multi {
        format!("{scheme}.n{n}")
    } else {
        scheme.to_string()
    }
}

/// Runs one case and writes its CSVs and `report.json` into its output
/// directory.
pub fn run_case(cc: &CaseConfig) -> Result<RunReport> {
    let start = Instant::now();
    std::fs::create_dir_all(&cc.output)?;
    let mut col = Collector::default();
    let context = |e: Error| match e {
        Error::Io(io) => Error::Io(io),
        other => Error::StepFailure(format!("case {}: {other}", cc.id())),
    };
    match cc.dimension {
        1 => run_1d(cc, &mut col).map_err(context)?,
        2 => run_2d(cc, &mut col).map_err(context)?,
        d => {
            return Err(Error::InvalidInput(format!(
                "dimension must be 1 or 2, got {d}"
            )))
        }
    }
    col.record_eoc(&cc.ns)?;

    let error_rows: Vec<String> = col
        .errors
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.scheme,
                r.n,
                r.variable,
                output::cell(Some(r.norms.l2)),
                output::cell(Some(r.norms.linf)),
                output::cell(Some(r.norms.rel_l2)),
                output::cell(Some(r.norms.rel_linf))
            )
        })
        .collect();
    if !error_rows.is_empty() {
        let path = col.file(&cc.output, "errors.csv".into());
        output::write_table(
            &path,
            "scheme,n,variable,l2,linf,rel_l2,rel_linf",
            &error_rows,
        )?;
    }
    if !col.eoc.is_empty() {
        let rows: Vec<String> = col
            .eoc
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.scheme,
                    r.variable,
                    r.n_coarse,
                    r.n_fine,
                    output::cell(r.eoc_l2),
                    output::cell(r.eoc_linf)
                )
            })
            .collect();
        let path = col.file(&cc.output, "eoc.csv".into());
        output::write_table(
            &path,
            "scheme,variable,n_coarse,n_fine,eoc_l2,eoc_linf",
            &rows,
        )?;
    }

    let thresholds: Vec<ThresholdResult> = cc
        .thresholds
        .iter()
        .map(|t| {
            let value = col.metrics.get(&t.metric).copied().flatten();
            let (lower, upper) = match t.bound {
                Bound::Max(b) => (None, Some(b)),
                Bound::Min(b) => (Some(b), None),
                Bound::Range(lo, hi) => (Some(lo), Some(hi)),
            };
            ThresholdResult {
                metric: t.metric.clone(),
                lower,
                upper,
                value,
                passed: t.check(value),
            }
        })
        .collect();
    let passed = thresholds.iter().all(|t| t.passed);
    col.files.push("report.json".into());
    let report = RunReport {
        case: cc.id().to_string(),
        config: cc
            .cfg
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        metrics: col.metrics,
        errors: col.errors,
        eoc: col.eoc,
        runs: col.runs,
        thresholds,
        passed,
        files: col.files,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidInput(e.to_string()))?;
    std::fs::write(cc.output.join("report.json"), json)?;
    Ok(report)
}

/// Runs every `*.conf` file of `dir` (sorted by name). With an output
/// override, each case writes into a subdirectory named after its file.
pub fn run_suite(dir: &Path, overrides: &Overrides) -> Result<Vec<(PathBuf, Result<RunReport>)>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    files.sort();
    let pool = thread_pool()?;
    Ok(pool.install(|| {
        files
            .into_par_iter()
            .map(|path| {
                let mut o = overrides.clone();
                if let Some(root) = &overrides.output {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    o.output = Some(root.join(stem));
                }
                let report = CaseConfig::load(&path, &o).and_then(|cc| run_case(&cc));
                (path, report)
            })
            .collect()
    }))
}

/// Thread pool capped by `GRAVWELL_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GRAVWELL_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Error::InvalidInput(format!(
                "GRAVWELL_THREADS must be a positive integer, got '{v}'"
            ))
        })?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::InvalidInput(e.to_string()))
}

fn gauss_mean(x: f64, dx: f64, f: impl Fn(f64) -> Result<Conserved>) -> Result<Conserved> {
    GAUSS3.iter().try_fold(Conserved::ZERO, |acc, &(xi, w)| {
        Ok(acc + f(x + xi * dx)? * w)
    })
}

struct Setup1d {
    grid: Grid1D,
    boundary: Boundary,
    init: Vec<Conserved>,
    /// Unperturbed steady state, when the case has one.
    steady: Option<Vec<Conserved>>,
    /// Solution to compare against at the final time.
    reference: Option<Vec<Conserved>>,
}

fn potential_1d(cc: &CaseConfig) -> Result<Potential> {
    Potential::parse(cc.cfg.str("potential")?)
}

fn setup_1d(cc: &CaseConfig, n: usize) -> Result<Setup1d> {
    let gas = cc.gas;
    let dom = cc.f64s("domain")?;
    if dom.len() != 2 {
        return Err(Error::InvalidInput("1D domain needs x_min, x_max".into()));
    }
    let potential = potential_1d(cc)?;
    let bc = cc.cfg.str("bc")?;
    let periodic = bc == "periodic";
    let grid = Grid1D::new(dom[0], dom[1], n, potential, periodic)?;
    let t_final = cc.t_final;
    let cells_of =
        |f: &dyn Fn(usize) -> Result<Conserved>| grid.interior().map(f).collect::<Result<Vec<_>>>();

    match cc.id() {
        "eoc_exact" => {
            let (u0, k): (f64, f64) = (cc.cfg.get("u0")?, cc.cfg.get("k")?);
            let exact = move |x: f64, dx: f64, t: f64| {
                gauss_mean(
                    x,
                    dx,
                    |s| Ok(gas.to_conserved(&exact_unsteady(s, t, u0, k))),
                )
            };
            let init = cells_of(&|k| exact(grid.center(k), grid.dx, 0.0))?;
            let reference = cells_of(&|k| exact(grid.center(k), grid.dx, t_final))?;
            let boundary = match bc {
                "exact" => Boundary::exact(Arc::new(move |c: &GhostCell| exact(c.x, c.dx, c.t))),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "eoc_exact needs exact boundaries, got '{other}'"
                    )))
                }
            };
            Ok(Setup1d {
                grid,
                boundary,
                init,
                steady: None,
                reference: Some(reference),
            })
        }
        "hydro_phi1"
        | "hydro_phi2"
        | "moving_phi1"
        | "moving_phi2"
        | "hydro_perturbed"
        | "moving_perturbed"
        | "moving_boundary_perturbed" => {
            let eq = Equilibrium::Moving {
                triplet: cc.triplet("triplet")?,
                branch: cc.branch()?,
                v0: 0.0,
            };
            let state =
                move |phi: f64| -> Result<Conserved> { Ok(gas.to_conserved(&eq.at(phi, &gas)?)) };
            // The discrete steady state sits at the cell-averaged potential.
            let steady = cells_of(&|k| state(grid.phi[k]))?;
            let mut init = steady.clone();
            if cc.cfg.contains("amplitude") {
                let a: f64 = cc.cfg.get("amplitude")?;
                for (w, k) in init.iter_mut().zip(grid.interior()) {
                    let bump = gauss_mean(grid.center(k), grid.dx, |x| {
                        Ok(Conserved {
                            e: a * (-100.0 * (x - 0.5) * (x - 0.5)).exp() / (gas.gamma - 1.0),
                            ..Conserved::ZERO
                        })
                    })?;
                    *w += bump;
                }
            }
            let ghost: crate::fv1d::GhostFn = Arc::new(move |c: &GhostCell| state(c.phi));
            let boundary = match bc {
                "periodic" => Boundary::periodic(),
                "exact" if cc.cfg.contains("boundary_amplitude") => {
                    let amp: f64 = cc.cfg.get("boundary_amplitude")?;
                    let freq: f64 = cc.cfg.get("boundary_frequency")?;
                    Boundary {
                        left: BoundarySide::Exact(ghost.clone()),
                        right: BoundarySide::DirichletVelocity {
                            base: ghost,
                            velocity: Arc::new(move |t| amp * (2.0 * PI * freq * t).sin()),
                        },
                    }
                }
                "exact" => Boundary::exact(ghost),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unsupported boundary '{other}' for {}",
                        cc.id()
                    )))
                }
            };
            Ok(Setup1d {
                grid,
                boundary,
                init,
                reference: Some(steady.clone()),
                steady: Some(steady),
            })
        }
        "sod" | "double_rarefaction" | "stationary_shock" => {
            let (l, r) = (cc.primitive("left")?, cc.primitive("right")?);
            let x0: f64 = cc.cfg.get("x0")?;
            let ic = move |x: f64| Ok(gas.to_conserved(if x < x0 { &l } else { &r }));
            let init = cells_of(&|k| gauss_mean(grid.center(k), grid.dx, ic))?;
            let rs = ExactRiemann::new(l, r, gas)?;
            let reference = cells_of(&|k| {
                gauss_mean(grid.center(k), grid.dx, |x| {
                    Ok(gas.to_conserved(&rs.sample((x - x0) / t_final)))
                })
            })?;
            Ok(Setup1d {
                boundary: simple_boundary(bc)?,
                grid,
                init,
                steady: None,
                reference: Some(reference),
            })
        }
        "gravity_rp" => {
            let (tl, tr) = (cc.triplet("triplet_left")?, cc.triplet("triplet_right")?);
            let (x0, branch): (f64, Branch) = (cc.cfg.get("x0")?, cc.branch()?);
            let ic = move |x: f64| -> Result<Conserved> {
                let t = if x < x0 { &tl } else { &tr };
                Ok(gas.to_conserved(&moving_equilibrium(t, potential.value(x), branch, &gas)?))
            };
            let init = cells_of(&|k| gauss_mean(grid.center(k), grid.dx, ic))?;
            let n_ref: usize = cc.cfg.get("n_ref")?;
            let boundary = simple_boundary(bc)?;
            let reference = fine_hll_reference(
                dom[0],
                dom[1],
                potential,
                boundary.clone(),
                gas,
                ic,
                t_final,
                n_ref,
                n,
            )?;
            Ok(Setup1d {
                grid,
                boundary,
                init,
                steady: None,
                reference: Some(reference),
            })
        }
        other => Err(Error::InvalidInput(format!(
            "case '{other}' is not one-dimensional"
        ))),
    }
}

fn simple_boundary(bc: &str) -> Result<Boundary> {
    match bc {
        "neumann" => Ok(Boundary::neumann()),
        "periodic" => Ok(Boundary::periodic()),
        other => Err(Error::InvalidInput(format!(
            "boundary '{other}' needs an exact solution"
        ))),
    }
}

const VARS_1D: [&str; 5] = ["rho", "u", "p", "q", "E"];

fn split_1d(cells: &[Conserved], gas: &GasModel) -> Vec<Vec<f64>> {
    let mut out = (0..5)
        .map(|_| Vec::with_capacity(cells.len()))
        .collect::<Vec<_>>();
    for w in cells {
        let v = [w.rho, w.q / w.rho, gas.pressure(w), w.q, w.e];
        for (o, x) in out.iter_mut().zip(v) {
            o.push(x);
        }
    }
    out
}

fn snapshot_times(cc: &CaseConfig) -> Vec<f64> {
    (1..=cc.snapshots)
        .map(|i| cc.t_final * i as f64 / (cc.snapshots + 1) as f64)
        .collect()
}

fn run_1d(cc: &CaseConfig, col: &mut Collector) -> Result<()> {
    let gas = cc.gas;
    let multi = cc.ns.len() > 1;
    let support: Option<f64> = if cc.cfg.contains("support_radius") {
        Some(cc.cfg.get("support_radius")?)
    } else {
        None
    };
    for &n in &cc.ns {
        let setup = setup_1d(cc, n)?;
        for name in &cc.schemes {
            let scheme = cc.scheme(name)?;
            let label = run_label(name, n, multi);
            let mut sim = Simulation1d::new(
                setup.grid.clone(),
                setup.boundary.clone(),
                gas,
                scheme,
                &setup.init,
            )?;
            sim.monitor_entropy = cc.monitor_entropy;
            let tag = format!("{name}_n{n}");
            if cc.snapshots > 0 {
                let path = col.file(&cc.output, format!("snap_{tag}_0.csv"));
                output::write_1d(&path, &setup.grid, sim.cells(), None, &gas)?;
            }
            for (i, t) in snapshot_times(cc).into_iter().enumerate() {
                sim.advance_to(t)?;
                let path = col.file(&cc.output, format!("snap_{tag}_{}.csv", i + 1));
                output::write_1d(&path, &setup.grid, sim.cells(), None, &gas)?;
            }
            sim.advance_to(cc.t_final)?;
            let cells = sim.cells().to_vec();
            let path = col.file(&cc.output, format!("final_{tag}.csv"));
            output::write_1d(&path, &setup.grid, &cells, None, &gas)?;

            if let Some(reference) = &setup.reference {
                col.record_errors(
                    &label,
                    name,
                    n,
                    &VARS_1D,
                    &split_1d(&cells, &gas),
                    &split_1d(reference, &gas),
                    setup.grid.dx,
                )?;
            }
            if let Some(steady) = &setup.steady {
                let path = col.file(&cc.output, format!("diff_{tag}.csv"));
                output::write_1d(&path, &setup.grid, &cells, Some(steady), &gas)?;
                let mut all: f64 = 0.0;
                let mut outside: f64 = 0.0;
                for ((w, s), k) in cells.iter().zip(steady).zip(setup.grid.interior()) {
                    let d = (*w - *s).max_abs();
                    all = all.max(d);
                    if support.is_some_and(|r| (setup.grid.center(k) - 0.5).abs() > r) {
                        outside = outside.max(d);
                    }
                }
                col.put(format!("{label}.perturbation_max"), all);
                if support.is_some() {
                    col.put(format!("{label}.background_max"), outside);
                }
            }
            let mass = |c: &[Conserved]| c.iter().map(|w| w.rho).sum::<f64>();
            let m0 = mass(&setup.init);
            col.record_stats(&label, name, n, &sim.stats, (mass(&cells) - m0) / m0);
        }
        if let Some(reference) = &setup.reference {
            if cc.id() == "gravity_rp"
                || matches!(cc.id(), "sod" | "double_rarefaction" | "stationary_shock")
            {
                let path = col.file(&cc.output, format!("reference_n{n}.csv"));
                output::write_1d(&path, &setup.grid, reference, None, &gas)?;
            }
        }
    }
    Ok(())
}

struct Setup2d {
    grid: Grid2D,
    boundary: Boundary2d,
    init: Vec<Conserved>,
    steady: Option<Vec<Conserved>>,
    reference: Option<Vec<Conserved>>,
}

fn setup_2d(cc: &CaseConfig, n: usize) -> Result<Setup2d> {
    let gas = cc.gas;
    let dom = cc.f64s("domain")?;
    if dom.len() != 4 {
        return Err(Error::InvalidInput(
            "2D domain needs x_min, x_max, y_min, y_max".into(),
        ));
    }
    let mut potential = Potential2d::parse(cc.cfg.str("potential")?)?;
    if let Potential2d::Vortex { rc } = &mut potential {
        *rc = cc.cfg.get_or("rc", *rc)?;
    }
    let boundary = match cc.cfg.str("bc")? {
        "periodic" => Boundary2d::periodic(),
        "neumann" => Boundary2d::neumann(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unsupported 2D boundary '{other}'"
            )))
        }
    };
    let grid = Grid2D::new([dom[0], dom[1], dom[2], dom[3]], n, n, potential, &boundary)?;
    let cells_at_phi = |f: &dyn Fn(f64) -> Result<Conserved>| -> Result<Vec<Conserved>> {
        (0..grid.ny)
            .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
            .map(|(i, j)| f(grid.phi[grid.index(i, j)]))
            .collect()
    };
    match cc.id() {
        "vortex2d" => {
            let v = Vortex {
                rt: cc.cfg.get("rt")?,
                rc: cc.cfg.get("rc")?,
            };
            let init = grid.average(|x, y| gas.to_conserved(&v.state(x, y)));
            Ok(Setup2d {
                grid,
                boundary,
                reference: Some(init.clone()),
                init,
                steady: None,
            })
        }
        "steady2d" | "steady2d_perturbed" => {
            let eq = GridAlignedEquilibrium {
                axis: Axis::Y,
                triplet: cc.triplet("triplet")?,
                v0: cc.cfg.get("v0")?,
                branch: cc.branch()?,
            };
            let steady = cells_at_phi(&|phi| Ok(gas.to_conserved(&eq.at(phi, &gas)?)))?;
            let mut init = steady.clone();
            if cc.cfg.contains("amplitude") {
                let a: f64 = cc.cfg.get("amplitude")?;
                // Density pulse at fixed velocity and pressure.
                let bump = grid.average(|x, y| {
                    let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
                    Conserved {
                        rho: a * (-50.0 * r2).exp(),
                        ..Conserved::ZERO
                    }
                });
                for (w, b) in init.iter_mut().zip(bump) {
                    let p = gas.to_primitive(w);
                    *w = gas.to_conserved(&Primitive {
                        rho: p.rho + b.rho,
                        ..p
                    });
                }
            }
            Ok(Setup2d {
                grid,
                boundary,
                init,
                reference: Some(steady.clone()),
                steady: Some(steady),
            })
        }
        "implosion2d" => {
            let (inner, outer) = (cc.primitive("inner")?, cc.primitive("outer")?);
            let radius: f64 = cc.cfg.get("radius")?;
            let init = grid.average(|x, y| {
                let r = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
                gas.to_conserved(if r < radius { &inner } else { &outer })
            });
            Ok(Setup2d {
                grid,
                boundary,
                init,
                steady: None,
                reference: None,
            })
        }
        other => Err(Error::InvalidInput(format!(
            "case '{other}' is not two-dimensional"
        ))),
    }
}

const VARS_2D: [&str; 4] = ["rho", "u", "v", "p"];

fn split_2d(cells: &[Conserved], gas: &GasModel) -> Vec<Vec<f64>> {
    let mut out = (0..4)
        .map(|_| Vec::with_capacity(cells.len()))
        .collect::<Vec<_>>();
    for w in cells {
        let v = [w.rho, w.q / w.rho, w.qt / w.rho, gas.pressure(w)];
        for (o, x) in out.iter_mut().zip(v) {
            o.push(x);
        }
    }
    out
}

fn run_2d(cc: &CaseConfig, col: &mut Collector) -> Result<()> {
    let gas = cc.gas;
    let multi = cc.ns.len() > 1;
    let cfl: f64 = cc.cfg.get("cfl")?;
    let lambda: f64 = cc.cfg.get("lambda")?;
    for &n in &cc.ns {
        let setup = setup_2d(cc, n)?;
        for name in &cc.schemes {
            let method = cc.method_2d(name)?;
            let label = run_label(name, n, multi);
            let tag = format!("{name}_n{n}");
            let mut sim = Simulation2d::new(
                setup.grid.clone(),
                setup.boundary,
                gas,
                method,
                lambda,
                cfl,
                &setup.init,
            )?;
            let base = setup.steady.as_deref();
            let snap = |col: &mut Collector, sim: &Simulation2d, idx: usize| -> Result<()> {
                let cells = sim.cells();
                let path = col.file(&cc.output, format!("snap_{tag}_{idx}.csv"));
                output::write_2d(&path, &setup.grid, &cells, None, &gas)?;
                if let Some(b) = base {
                    let path = col.file(&cc.output, format!("snapdiff_{tag}_{idx}.csv"));
                    output::write_2d(&path, &setup.grid, &cells, Some(b), &gas)?;
                }
                Ok(())
            };
            if cc.snapshots > 0 {
                snap(col, &sim, 0)?;
            }
            for (i, t) in snapshot_times(cc).into_iter().enumerate() {
                sim.advance_to(t)?;
                snap(col, &sim, i + 1)?;
            }
            sim.advance_to(cc.t_final)?;
            let cells = sim.cells();
            let path = col.file(&cc.output, format!("final_{tag}.csv"));
            output::write_2d(&path, &setup.grid, &cells, None, &gas)?;
            let vol = setup.grid.dx * setup.grid.dy;
            if let Some(reference) = &setup.reference {
                col.record_errors(
                    &label,
                    name,
                    n,
                    &VARS_2D,
                    &split_2d(&cells, &gas),
                    &split_2d(reference, &gas),
                    vol,
                )?;
            }
            if let Some(steady) = &setup.steady {
                let path = col.file(&cc.output, format!("diff_{tag}.csv"));
                output::write_2d(&path, &setup.grid, &cells, Some(steady), &gas)?;
                let all = cells
                    .iter()
                    .zip(steady)
                    .map(|(w, s)| (*w - *s).max_abs())
                    .fold(0.0, f64::max);
                col.put(format!("{label}.perturbation_max"), all);
            }
            let mass = |c: &[Conserved]| c.iter().map(|w| w.rho).sum::<f64>();
            let m0 = mass(&setup.init);
            col.record_stats(&label, name, n, &sim.stats, (mass(&cells) - m0) / m0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_parse_and_check() {
        let user = Config::parse(
            "case = sod\nmax.wb1.rho.l2 = 0.5\nmin.wb1.min_rho = 0\nrange.wb1.p.l2 = 1, 2\n",
        )
        .unwrap();
        let cc = CaseConfig::from_config(&user).unwrap();
        assert_eq!(cc.thresholds.len(), 3);
        assert!(cc.thresholds[0].check(Some(0.5)));
        assert!(!cc.thresholds[0].check(Some(0.6)));
        assert!(!cc.thresholds[0].check(None));
        assert!(!cc.thresholds[2].check(Some(f64::NAN)));
        assert!(cc.thresholds[2].check(Some(1.5)));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let user = Config::parse("case = sod\nnn = 3\n").unwrap();
        assert!(CaseConfig::from_config(&user).is_err());
        let user = Config::parse("case = nowhere\n").unwrap();
        assert!(CaseConfig::from_config(&user).is_err());
    }

    #[test]
    fn overrides_replace_grid_and_schemes() {
        let o = Overrides {
            n: Some(20),
            order: Some(2),
            t_final: Some(0.01),
            output: None,
        };
        let cc = CaseConfig::builtin("sod", &o).unwrap();
        assert_eq!(cc.ns, vec![20]);
        assert_eq!(cc.schemes, vec!["wb2".to_string()]);
        assert_eq!(cc.t_final, 0.01);
        assert_eq!(cc.scheme("wb2").unwrap().order, 2);
    }

    #[test]
    fn specific_rate_coefficient_wins() {
        let cc = CaseConfig::builtin("hydro_perturbed", &Overrides::default()).unwrap();
        assert_eq!(cc.scheme("wb2").unwrap().c_theta, 1.0);
        assert_eq!(cc.scheme("wb3").unwrap().c_theta, 0.15);
    }

    #[test]
    fn two_dimensional_runs_reject_high_order() {
        let o = Overrides {
            order: Some(2),
            ..Overrides::default()
        };
        assert!(CaseConfig::builtin("steady2d", &o).is_err());
    }

    #[test]
    fn small_sod_run_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let o = Overrides {
            n: Some(20),
            t_final: Some(0.05),
            output: Some(dir.path().to_path_buf()),
            order: None,
        };
        let cc = CaseConfig::builtin("sod", &o).unwrap();
        let r = run_case(&cc).unwrap();
        assert!(r.passed);
        assert!(r.metric("wb1.rho.l2").unwrap() > 0.0);
        assert!(r.metric("wb1.entropy_s").unwrap() <= 1e-11);
        for f in &r.files {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
