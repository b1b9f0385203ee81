//! Configuration-driven runs: each command turns a [`RunConfig`] into a
//! [`ResultRecord`] and a set of CSV/JSON files. The record holds only
//! inputs and results, so identical inputs give byte-identical files;
//! wall-clock timings and cache hits go to a separate `timings.json`.

pub mod cache;
pub mod config;
pub mod export;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    dominant_root, find_roots, mu_star, table_at_radius, BifurcationTable, ContourOptions, DispersionContext,
    MuStar, MuStarOptions, Rect,
};
use crate::error::{Error, Result};
use crate::evolution::{
    decay_rate, evolve_mode, laplace_mode_solution, ModeInit, ModeState, NoForcing, RadialGrid, RateFit,
    TalbotOptions,
};
use crate::recenter::{b_from_a, boundary_derivs, mode1_translation, q_coefficient, BoundaryDerivs, CenterShift, Mode1Data, QCoefficient};
use crate::stationary::{residual_check, ModelParams, ResidualReport, StationaryProfile};

pub use cache::{Cache, CacheEntry, CachedThreshold, Lookup};
pub use config::{MuChoice, OutputFormat, RawConfig, RunConfig};
use export::{int, num, Table};

/// Version stamped into records and cache entries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "TUMORSTAB_WORKERS";

/// Environment variable overriding the default cache directory.
pub const CACHE_ENV: &str = "TUMORSTAB_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Stationary,
    Spectrum,
    Bifurcation,
    Evolve,
    Recenter,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stationary => "stationary",
            Command::Spectrum => "spectrum",
            Command::Bifurcation => "bifurcation",
            Command::Evolve => "evolve",
            Command::Recenter => "recenter",
            Command::Verify => "verify",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "stationary" => Command::Stationary,
            "spectrum" => Command::Spectrum,
            "bifurcation" => Command::Bifurcation,
            "evolve" => Command::Evolve,
            "recenter" => Command::Recenter,
            "verify" => Command::Verify,
            _ => return Err(Error::validation("command", format!("unknown command `{s}`"))),
        })
    }
}

/// Sets the size of the global worker pool from [`WORKERS_ENV`]. Returns
/// the pool size in effect.
pub fn init_workers() -> Result<usize> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::validation(WORKERS_ENV, format!("`{v}` is not a positive integer")))?;
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("worker pool already initialized");
        }
    }
    Ok(rayon::current_num_threads())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPayload {
    pub profile: StationaryProfile,
    pub residuals: ResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    pub n: usize,
    pub s: C64,
    pub residual: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPayload {
    pub mu: f64,
    pub regions: Vec<(usize, Rect)>,
    pub roots: Vec<RootRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub table: BifurcationTable,
    pub threshold: MuStar,
    /// `μ* ≤ μ_2` and `μ* < μ_1`.
    pub ordering_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPayload {
    pub points: Vec<BifurcationPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRun {
    pub n: usize,
    pub m: i64,
    pub dominant_root: C64,
    pub fit: RateFit,
    /// `|fitted rate - Re s| / |Re s|`, or the absolute difference when
    /// `Re s` is zero.
    pub rate_error: f64,
    /// Largest `|ρ_transform - ρ_step|` over the check times, relative to
    /// the largest `|ρ_step|` there.
    pub laplace_rel_diff: Option<f64>,
    pub t: Vec<f64>,
    pub rho: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolvePayload {
    pub mu: f64,
    pub cells: usize,
    pub dt: f64,
    pub modes: Vec<ModeRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecenterPayload {
    pub mu: f64,
    pub fluxes: BoundaryDerivs,
    pub q: QCoefficient,
    pub shift: CenterShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    fn holds(name: &str, ok: bool) -> Self {
        Check {
            name: name.to_string(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyPayload {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Stationary(StationaryPayload),
    Spectrum(SpectrumPayload),
    Bifurcation(BifurcationPayload),
    Evolve(EvolvePayload),
    Recenter(RecenterPayload),
    Verify(VerifyPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: Command,
    pub version: String,
    /// The configuration keys as given, after overrides.
    pub input: BTreeMap<String, String>,
    pub payload: Payload,
}

impl ResultRecord {
    /// False when a verification run found a failing check.
    pub fn succeeded(&self) -> bool {
        match &self.payload {
            Payload::Verify(v) => v.all_pass,
            _ => true,
        }
    }
}

/// Non-deterministic side information of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub workers: usize,
    /// `(stage, seconds)` in execution order.
    pub stages: Vec<(String, f64)>,
    /// `(cache key, "hit" | "miss" | "stale")`.
    pub cache: Vec<(String, String)>,
}

/// Runs commands against one configuration.
pub struct Harness {
    pub config: RunConfig,
    cache: Cache,
    timings: std::sync::Mutex<Timings>,
}

impl Harness {
    pub fn new(config: RunConfig) -> Self {
        let dir = config
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| config.out_dir.join("cache"));
        Harness {
            cache: Cache::new(dir, VERSION),
            config,
            timings: Default::default(),
        }
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    pub fn timings(&self) -> Timings {
        let mut t = self.timings.lock().expect("timings lock").clone();
        t.workers = rayon::current_num_threads();
        t
    }

    fn timed<T>(&self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        self.timings.lock().expect("timings lock").stages.push((stage.to_string(), secs));
        out
    }

    fn note_cache(&self, key: String, what: &str) {
        self.timings.lock().expect("timings lock").cache.push((key, what.to_string()));
    }

    /// Stationary radius and bifurcation table (to `n_max`) for `(β, σ̃)`,
    /// plus the threshold μ* when `with_threshold` is set; served from the
    /// cache when possible.
    pub fn parameter_point(&self, beta: f64, sigma_tilde: f64, with_threshold: bool) -> Result<CacheEntry> {
        let bc = &self.config.bifurcation;
        let key = Cache::key(beta, sigma_tilde);
        let (mut entry, status) = match self.cache.lookup(beta, sigma_tilde) {
            Lookup::Hit(e) => (Some(e), "hit"),
            Lookup::Miss => (None, "miss"),
            Lookup::Stale(_) => (None, "stale"),
        };
        let mut dirty = false;
        if entry.as_ref().map_or(true, |e| e.table.mu_n.len() + 1 < bc.n_max) {
            let radius = match &entry {
                Some(e) => e.radius,
                None => crate::stationary::solve_radius(beta, sigma_tilde)?,
            };
            let table = table_at_radius(beta, sigma_tilde, radius, bc.n_max)?;
            let threshold = entry.take().and_then(|e| e.threshold);
            entry = Some(self.cache.new_entry(table, threshold));
            dirty = true;
        }
        let mut entry = entry.expect("entry filled above");
        let fresh_threshold = entry
            .threshold
            .as_ref()
            .is_some_and(|t| t.n_max == bc.star_n_max && t.rel_tol == bc.rel_tol);
        if with_threshold && !fresh_threshold {
            let opts = MuStarOptions {
                n_max: bc.star_n_max,
                rel_tol: bc.rel_tol,
                certify_tail: true,
            };
            entry.threshold = Some(CachedThreshold {
                n_max: bc.star_n_max,
                rel_tol: bc.rel_tol,
                mu_star: mu_star(beta, sigma_tilde, &opts, &ContourOptions::default())?,
            });
            dirty = true;
        }
        self.note_cache(key, if dirty { status } else { "hit" });
        if dirty {
            self.cache.store(&entry)?;
        }
        entry.table = truncate_table(&entry.table, bc.n_max);
        Ok(entry)
    }

    /// Profile at the configured parameters, with μ resolved.
    pub fn profile(&self) -> Result<StationaryProfile> {
        let c = &self.config;
        let want_threshold = matches!(c.mu, MuChoice::OfThreshold(_));
        let entry = self.parameter_point(c.beta, c.sigma_tilde, want_threshold)?;
        let mu = match c.mu {
            MuChoice::Absolute(m) => m,
            MuChoice::OfThreshold(f) => f * entry.threshold.as_ref().expect("threshold requested").mu_star.mu_star,
        };
        StationaryProfile::with_radius(ModelParams::new(c.beta, c.sigma_tilde, mu)?, entry.radius)
    }

    pub fn run(&self, command: Command) -> Result<ResultRecord> {
        let payload = self.timed(command.name(), || match command {
            Command::Stationary => self.stationary().map(Payload::Stationary),
            Command::Spectrum => self.spectrum().map(Payload::Spectrum),
            Command::Bifurcation => self.bifurcation().map(Payload::Bifurcation),
            Command::Evolve => self.evolve().map(Payload::Evolve),
            Command::Recenter => self.recenter().map(Payload::Recenter),
            Command::Verify => self.verify().map(Payload::Verify),
        })?;
        Ok(ResultRecord {
            command,
            version: VERSION.to_string(),
            input: self.config.echo.clone(),
            payload,
        })
    }

    fn stationary(&self) -> Result<StationaryPayload> {
        let profile = self.profile()?;
        Ok(StationaryPayload {
            residuals: residual_check(&profile, 1000)?,
            profile,
        })
    }

    fn spectrum(&self) -> Result<SpectrumPayload> {
        let profile = self.profile()?;
        let depth = self.config.spectrum.depth;
        let sets = self
            .config
            .spectrum
            .modes
            .par_iter()
            .map(|&n| {
                let ctx = DispersionContext::new(n, &profile)?;
                let y = ctx.imag_bound() + 1.0;
                let region = Rect::new(-depth, ctx.real_bound().max(0.0) + 1.0, -y, y);
                find_roots(&ctx, region, &ContourOptions::default())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut roots = Vec::new();
        let mut regions = Vec::new();
        for set in sets {
            regions.push((set.n, set.region));
            roots.extend(set.roots.iter().map(|z| RootRow {
                n: set.n,
                s: z.s,
                residual: z.residual,
                multiplicity: z.multiplicity,
            }));
        }
        Ok(SpectrumPayload {
            mu: profile.params.mu,
            regions,
            roots,
        })
    }

    fn bifurcation(&self) -> Result<BifurcationPayload> {
        let bc = &self.config.bifurcation;
        let grid: Vec<(f64, f64)> = bc
            .sweep_beta
            .iter()
            .flat_map(|&b| bc.sweep_sigma.iter().map(move |&s| (b, s)))
            .collect();
        let points = grid
            .par_iter()
            .map(|&(b, s)| {
                let entry = self.parameter_point(b, s, true)?;
                let threshold = entry.threshold.expect("threshold requested").mu_star;
                let ordering_holds = threshold.mu_star <= threshold.mu_2 * (1.0 + 1e-12) && threshold.mu_star < threshold.mu_1;
                Ok(BifurcationPoint {
                    table: entry.table,
                    threshold,
                    ordering_holds,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BifurcationPayload { points })
    }

    fn evolve(&self) -> Result<EvolvePayload> {
        let ec = &self.config.evolve;
        let profile = self.profile()?;
        let grid = RadialGrid::new(profile.radius, ec.cells)?;
        let modes = ec
            .modes
            .par_iter()
            .map(|&n| run_mode(n, ec, &profile, &grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvolvePayload {
            mu: profile.params.mu,
            cells: ec.cells,
            dt: ec.dt,
            modes,
        })
    }

    fn recenter(&self) -> Result<RecenterPayload> {
        let rc = &self.config.recenter;
        let profile = self.profile()?;
        let grid = RadialGrid::new(profile.radius, rc.cells)?;
        let mut data = Mode1Data::translation(b_from_a(rc.translation), &profile, &grid);
        if rc.bump != 0.0 {
            let bump = grid.sample(|r| rc.bump * (-r * r).exp());
            for (w, v) in data.w[1].iter_mut().zip(bump) {
                *w += v;
            }
        }
        Ok(RecenterPayload {
            mu: profile.params.mu,
            fluxes: boundary_derivs(&profile, &grid)?,
            q: q_coefficient(&profile)?,
            shift: mode1_translation(&data, &profile, &grid)?,
        })
    }

    fn verify(&self) -> Result<VerifyPayload> {
        let c = &self.config;
        let profile = self.profile()?;
        let mut checks = Vec::new();

        let res = residual_check(&profile, 1000)?;
        let worst = res.nutrient.max(res.pressure).max(res.robin).max(res.curvature);
        checks.push(Check::at_most("stationary equations residual", worst, 1e-9));

        let h1 = DispersionContext::new(1, &profile)?.relative_residual(C64::new(0.0, 0.0));
        checks.push(Check::at_most("translation zero of h_1 at s = 0", h1, 1e-12));

        let entry = self.parameter_point(c.beta, c.sigma_tilde, true)?;
        let worst_mu_n = entry
            .table
            .mu_n
            .iter()
            .map(|&(n, mu_n)| -> Result<f64> {
                Ok(DispersionContext::new(n, &profile.with_mu(mu_n))?.relative_residual(C64::new(0.0, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::at_most("h_n(0) at its bifurcation value", worst_mu_n, 1e-9));
        checks.push(Check::holds("bifurcation values increase with n", entry.table.increasing));
        let t = entry.threshold.as_ref().expect("threshold requested");
        checks.push(Check::holds(
            "threshold below the first bifurcation values",
            t.mu_star.mu_star <= t.mu_star.mu_2 * (1.0 + 1e-12) && t.mu_star.mu_star < t.mu_star.mu_1,
        ));

        let q = q_coefficient(&profile)?;
        checks.push(Check::at_most(
            "recentering slope closed vs assembled",
            (q.closed - q.assembled).abs(),
            1e-8,
        ));

        let grid = RadialGrid::new(profile.radius, c.verify.cells)?;
        let fluxes = boundary_derivs(&profile, &grid)?;
        checks.push(Check::at_most(
            "degree-one boundary fluxes vs closed form",
            fluxes.max_discrepancy(),
            0.1 * grid.h() * grid.h(),
        ));

        let a = [0.3, -0.1, 0.2];
        let shift = mode1_translation(&Mode1Data::translation(b_from_a(a), &profile, &grid), &profile, &grid)?;
        let err = (0..3).map(|i| (shift.a[i] - a[i]).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("pure translation is recovered", err, 1e-10));

        let all_pass = checks.iter().all(|c| c.pass);
        Ok(VerifyPayload { checks, all_pass })
    }

    /// Writes the record, its tables and the timings into the output
    /// directory; returns the paths written.
    pub fn write_outputs(&self, record: &ResultRecord) -> Result<Vec<PathBuf>> {
        let dir = &self.config.out_dir;
        let mut written = Vec::new();
        let fmt = self.config.format;
        if fmt != OutputFormat::Csv {
            let p = dir.join("record.json");
            export::write_json(&p, record)?;
            written.push(p);
        }
        if fmt != OutputFormat::Json {
            for (name, table) in tables(&record.payload) {
                let p = dir.join(name);
                export::write_csv(&p, &table)?;
                written.push(p);
            }
        }
        let p = dir.join("timings.json");
        export::write_json(&p, &self.timings())?;
        written.push(p);
        Ok(written)
    }
}

fn truncate_table(t: &BifurcationTable, n_max: usize) -> BifurcationTable {
    let mu_n: Vec<(usize, f64)> = t.mu_n.iter().copied().filter(|&(n, _)| n <= n_max).collect();
    BifurcationTable {
        increasing: mu_n.windows(2).all(|w| w[1].1 > w[0].1),
        mu_n,
        ..t.clone()
    }
}

fn run_mode(n: usize, ec: &config::EvolveConfig, profile: &StationaryProfile, grid: &RadialGrid) -> Result<ModeRun> {
    let ctx = DispersionContext::new(n, profile)?;
    let depth = 64.0 * ((n * n) as f64 / (profile.radius * profile.radius)).max(16.0);
    let dominant = dominant_root(&ctx, depth, &ContourOptions::default())?.s;
    let rho0 = C64::new(ec.rho0, 0.0);
    let init = ModeState::new(n, ec.m, vec![C64::new(0.0, 0.0); grid.cells], rho0);
    let traj = evolve_mode(&init, &NoForcing, ec.horizon, ec.dt, profile, grid, &[])?;
    let fit = decay_rate(&traj.t, &traj.rho, ec.fit_window)?;
    let rate_error = if dominant.re != 0.0 {
        (fit.rate - dominant.re).abs() / dominant.re.abs()
    } else {
        fit.rate.abs()
    };
    let laplace_rel_diff = if ec.laplace_check {
        let steps = traj.t.len() - 1;
        let idx: Vec<usize> = (1..=10).map(|k| k * steps / 10).collect();
        let times: Vec<f64> = idx.iter().map(|&i| traj.t[i]).collect();
        let minit = ModeInit {
            rho0,
            w0: init.w.clone(),
        };
        let lap = laplace_mode_solution(n, &minit, &NoForcing, profile, grid, &times, &TalbotOptions::default())?;
        let scale = idx.iter().map(|&i| traj.rho[i].norm()).fold(0.0, f64::max);
        let diff = idx
            .iter()
            .zip(&lap)
            .map(|(&i, l)| (traj.rho[i] - l).norm())
            .fold(0.0, f64::max);
        Some(if scale > 0.0 { diff / scale } else { diff })
    } else {
        None
    };
    Ok(ModeRun {
        n,
        m: ec.m,
        dominant_root: dominant,
        fit,
        rate_error,
        laplace_rel_diff,
        t: traj.t,
        rho: traj.rho,
    })
}

/// CSV tables for a payload, by file name.
pub fn tables(payload: &Payload) -> Vec<(String, Table)> {
    match payload {
        Payload::Stationary(p) => {
            let mut t = Table::new(&["r", "sigma", "sigma_prime", "pressure"]);
            for k in 0..=100 {
                let r = p.profile.radius * k as f64 / 100.0;
                t.push(vec![
                    num(r),
                    num(p.profile.sigma(r)),
                    num(p.profile.sigma_prime(r)),
                    num(p.profile.pressure(r)),
                ]);
            }
            vec![("profile.csv".into(), t)]
        }
        Payload::Spectrum(p) => {
            let mut t = Table::new(&["n", "re_s", "im_s", "residual"]);
            for r in &p.roots {
                t.push(vec![int(r.n), num(r.s.re), num(r.s.im), num(r.residual)]);
            }
            vec![("roots.csv".into(), t)]
        }
        Payload::Bifurcation(p) => {
            let mut table = Table::new(&["beta", "sigma_tilde", "n", "mu_n"]);
            let mut thr = Table::new(&["beta", "sigma_tilde", "radius", "mu_1", "mu_2", "mu_star", "critical_mode"]);
            for pt in &p.points {
                let (b, s) = (pt.table.beta, pt.table.sigma_tilde);
                table.push(vec![num(b), num(s), int(1), num(pt.table.mu_1)]);
                for &(n, mu) in &pt.table.mu_n {
                    table.push(vec![num(b), num(s), int(n), num(mu)]);
                }
                let th = &pt.threshold;
                thr.push(vec![
                    num(b),
                    num(s),
                    num(pt.table.radius),
                    num(th.mu_1),
                    num(th.mu_2),
                    num(th.mu_star),
                    int(th.critical_mode),
                ]);
            }
            vec![("bifurcation.csv".into(), table), ("threshold.csv".into(), thr)]
        }
        Payload::Evolve(p) => {
            let mut out = Vec::new();
            let mut rates = Table::new(&["n", "m", "fitted_rate", "re_root", "im_root", "laplace_rel_diff"]);
            for mode in &p.modes {
                let mut t = Table::new(&["t", "re_rho", "im_rho", "envelope"]);
                for (ti, r) in mode.t.iter().zip(&mode.rho) {
                    t.push(vec![num(*ti), num(r.re), num(r.im), num(mode.fit.envelope(*ti))]);
                }
                out.push((format!("trajectory_n{}_m{}.csv", mode.n, mode.m), t));
                rates.push(vec![
                    int(mode.n),
                    int(mode.m),
                    num(mode.fit.rate),
                    num(mode.dominant_root.re),
                    num(mode.dominant_root.im),
                    mode.laplace_rel_diff.map(num).unwrap_or_default(),
                ]);
            }
            out.push(("rates.csv".into(), rates));
            out
        }
        Payload::Recenter(p) => {
            let mut t = Table::new(&["component", "a", "re_b", "im_b", "residual"]);
            for i in 0..3 {
                t.push(vec![
                    int(i + 1),
                    num(p.shift.a[i]),
                    num(p.shift.b[i].re),
                    num(p.shift.b[i].im),
                    num(p.shift.shifted_residuals[i]),
                ]);
            }
            vec![("shift.csv".into(), t)]
        }
        Payload::Verify(p) => {
            let mut t = Table::new(&["check", "value", "tolerance", "pass"]);
            for c in &p.checks {
                t.push(vec![format!("\"{}\"", c.name), num(c.value), num(c.tolerance), c.pass.to_string()]);
            }
            vec![("checks.csv".into(), t)]
        }
    }
}

/// Loads a configuration file, applies overrides and validates.
pub fn load_config(path: &Path, overrides: &[String], out_dir: &Path) -> Result<RunConfig> {
    let mut raw = RawConfig::load(path)?;
    for o in overrides {
        raw.set(o)?;
    }
    RunConfig::from_raw(&raw, out_dir)
}

/// Runs a command end to end and writes its outputs.
pub fn run_command(command: Command, config: RunConfig) -> Result<ResultRecord> {
    let harness = Harness::new(config);
    let record = harness.run(command)?;
    harness.write_outputs(&record)?;
    Ok(record)
}
