//! Subcommands and the jobs they run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quasisol::bifurcation::{
    energy_1d_reduced, find_omega_c, fit_asymptote_star, fit_asymptote_zero, log_law_report, mass_1d_reduced,
    slope_sign_changes, sweep, write_bifurcation, AsymptoteFit, BifurcationPoint, LogLawReport, RadialSweep,
};
use quasisol::diagnostics::RunOutcome;
use quasisol::evolve1d::{evolve_1d, perturbed_soliton_1d, write_run_1d, Run1DConfig};
use quasisol::evolver::{evolve_radial, write_run_radial, InitialData, RunRadialConfig};
use quasisol::groundstate::{continuation, ground_state_at, ContinuationPlan, GroundState, SolverControls};
use quasisol::io::{write_json, write_numeric_csv};
use quasisol::model::{omega_star, ModelParams};
use quasisol::spectral::Fourier1DGrid;

use crate::presets::{self, Scale};
use crate::report::{fit_report, RunSummary};
use crate::{exit_code, output_dir, CliError};

#[derive(Parser, Debug)]
#[command(name = "quasisol", version, about = "Solitary waves of a saturated quasi-linear Schrödinger equation")]
pub struct Cli {
    /// Flat `key = value` or JSON file of flag values; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Radial ground state at one frequency.
    Groundstate(GroundstateArgs),
    /// Mass, energy and stability labels along a frequency grid.
    Sweep(SweepArgs),
    /// 1D mass and energy from the reduced integrals.
    Mass1d(Mass1dArgs),
    /// Periodic 1D evolution of a perturbed solitary wave.
    Evolve1d(Evolve1dArgs),
    /// Radial Crank–Nicolson evolution.
    Evolver(EvolverArgs),
    /// Fit a solitary-wave frequency to the tail of a diagnostics file.
    Fit(FitArgs),
    /// Run a named experiment preset.
    Preset(PresetArgs),
}

#[derive(Args, Debug, Clone)]
pub struct NewtonArgs {
    /// Initial relaxation factor.
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    /// Factor applied to the relaxation after each accepted step (1 keeps it fixed).
    #[arg(long, default_value_t = 1.2)]
    pub mu_growth: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

impl NewtonArgs {
    fn controls(&self) -> SolverControls {
        SolverControls {
            mu: self.mu,
            tol: self.tol,
            max_iter: self.max_iter,
            mu_growth: self.mu_growth,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct GroundstateArgs {
    #[arg(long)]
    pub alpha: u32,
    #[arg(long)]
    pub dim: u32,
    #[arg(long)]
    pub omega: f64,
    /// Chebyshev degree.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Right end of the `s = r²` interval.
    #[arg(long, default_value_t = 1e3)]
    pub s0: f64,
    #[command(flatten)]
    pub newton: NewtonArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub alpha: u32,
    #[arg(long)]
    pub dim: u32,
    /// Explicit comma-separated frequencies.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub omegas: Option<Vec<f64>>,
    #[arg(long)]
    pub omega_min: Option<f64>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Number of equispaced frequencies; without bounds they fill `(0, ω*)`.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 1e3)]
    pub s0: f64,
    #[command(flatten)]
    pub newton: NewtonArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Mass1dArgs {
    #[arg(long)]
    pub alpha: u32,
    #[arg(long)]
    pub omega: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Evolve1dArgs {
    #[arg(long)]
    pub alpha: u32,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Half-period over π: the domain is `lx·[-π, π]`.
    #[arg(long, default_value_t = 30.0)]
    pub lx: f64,
    #[arg(long, default_value_t = 1024)]
    pub nx: usize,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long)]
    pub nt: usize,
    #[arg(long)]
    pub diag_stride: Option<usize>,
    /// 0 disables snapshots.
    #[arg(long, default_value_t = 0)]
    pub snapshot_stride: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub delta_bound: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Soliton,
    Gaussian,
}

#[derive(Args, Debug)]
pub struct EvolverArgs {
    #[arg(long)]
    pub alpha: u32,
    #[arg(long)]
    pub dim: u32,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 4e3)]
    pub s0: f64,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long)]
    pub nt: usize,
    #[arg(long, value_enum)]
    pub initial: InitialKind,
    /// Frequency of the solitary wave (soliton data).
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Gaussian amplitude.
    #[arg(long)]
    pub c: Option<f64>,
    /// Gaussian width in `s`.
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub diag_stride: usize,
    #[arg(long, default_value_t = 0)]
    pub snapshot_stride: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub delta_bound: f64,
    /// Newton tolerance of each time step.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 25)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// A `diagnostics.csv` written by evolve1d or evolver.
    #[arg(long)]
    pub diagnostics: PathBuf,
    #[arg(long)]
    pub alpha: u32,
    /// Also write `fit_report.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PresetArgs {
    /// Preset name; see --list.
    pub name: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long, value_enum, default_value_t = Scale::Full)]
    pub scale: Scale,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Cmd::Groundstate(a) => groundstate_cmd(a),
        Cmd::Sweep(a) => sweep_cmd(a),
        Cmd::Mass1d(a) => mass1d_cmd(a),
        Cmd::Evolve1d(a) => evolve1d_cmd(a),
        Cmd::Evolver(a) => evolver_cmd(a),
        Cmd::Fit(a) => fit_cmd(a),
        Cmd::Preset(a) => presets::preset_cmd(a),
    }
}

fn create(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError {
        code: crate::EXIT_SOLVER,
        message: format!("cannot create {}: {e}", dir.display()),
    })
}

fn groundstate_cmd(a: GroundstateArgs) -> Result<String, CliError> {
    ModelParams::new(a.alpha, a.dim, a.omega)?.require_solitary()?;
    let controls = a.newton.controls();
    controls.validate()?;
    let dir = output_dir(a.out, "groundstate");
    let gs = ground_state_at(a.alpha, a.dim, a.omega, a.n, a.s0, &controls)?;
    create(&dir)?;
    gs.write(&dir, "profile")?;
    Ok(format!(
        "groundstate alpha={} dim={} omega={}: peak={:.12} residual={:.2e} iterations={} mass={:.10e} energy={:.10e} -> {}",
        a.alpha,
        a.dim,
        a.omega,
        gs.profile.max(),
        gs.residual,
        gs.iterations,
        gs.mass()?,
        gs.energy()?,
        dir.display()
    ))
}

/// Frequency grid of a sweep from the command-line options.
pub fn sweep_grid(
    alpha: u32,
    omegas: Option<Vec<f64>>,
    lo: Option<f64>,
    hi: Option<f64>,
    points: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    if let Some(list) = omegas {
        if lo.is_some() || hi.is_some() || points.is_some() {
            return Err(CliError::usage("--omegas cannot be combined with --omega-min/--omega-max/--points"));
        }
        return Ok(list);
    }
    let Some(p) = points else {
        return Err(CliError::usage("sweep needs --omegas or --points"));
    };
    let star = omega_star(alpha);
    Ok(match (lo, hi) {
        (None, None) => (1..=p).map(|i| star * i as f64 / (p + 1) as f64).collect(),
        (lo, hi) => {
            let (lo, hi) = (lo.unwrap_or(0.0), hi.unwrap_or(star));
            if p == 1 {
                vec![lo]
            } else {
                (0..p).map(|i| lo + (hi - lo) * i as f64 / (p - 1) as f64).collect()
            }
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub points: usize,
    /// Midpoints of the grid intervals where `dM/dω` changes sign.
    pub sign_changes: Vec<f64>,
    pub omega_c: Option<f64>,
    pub fits: Vec<AsymptoteFit>,
    pub log_law: Option<LogLawReport>,
    pub failure: Option<String>,
}

fn attempt_fits(points: &[BifurcationPoint], alpha: u32, dim: u32) -> (Vec<AsymptoteFit>, Option<LogLawReport>) {
    let star = omega_star(alpha);
    let near_zero: Vec<(f64, f64)> = points.iter().filter(|p| p.omega <= 0.1 * star).map(|p| (p.omega, p.mass)).collect();
    let near_star: Vec<(f64, f64)> = points.iter().filter(|p| p.omega >= 0.7 * star).map(|p| (p.omega, p.mass)).collect();
    let mut fits = Vec::new();
    let mut log_law = None;
    if let Ok(f) = fit_asymptote_zero(&near_zero, alpha, dim) {
        fits.push(f);
    }
    if let Ok(f) = fit_asymptote_star(&near_star, alpha, dim) {
        if dim == 1 {
            log_law = Some(log_law_report(&f, alpha));
        }
        fits.push(f);
    }
    (fits, log_law)
}

/// Runs a sweep and writes `bifurcation.csv`, `fits.json` and `sweep.json`
/// into `dir`. A stopped continuation still writes the solved points.
pub fn run_sweep(
    alpha: u32,
    dim: u32,
    omegas: &[f64],
    radial: &RadialSweep,
    dir: &Path,
) -> Result<(SweepReport, Vec<BifurcationPoint>), CliError> {
    let run = sweep(alpha, dim, omegas, radial)?;
    let changes = slope_sign_changes(&run.points);
    let mids: Vec<f64> = changes
        .iter()
        .map(|&i| 0.5 * (run.points[i].omega + run.points[i + 1].omega))
        .collect();
    let omega_c = match changes.first() {
        Some(&i) if dim == 1 => {
            let lo = run.points[i.saturating_sub(1)].omega;
            let hi = run.points[(i + 2).min(run.points.len() - 1)].omega;
            find_omega_c(alpha, dim, (lo, hi), radial, 0).ok()
        }
        Some(_) => mids.first().copied(),
        None => None,
    };
    let (fits, log_law) = attempt_fits(&run.points, alpha, dim);
    create(dir)?;
    write_bifurcation(dir, &run.points, &fits)?;
    let report = SweepReport {
        points: run.points.len(),
        sign_changes: mids,
        omega_c,
        fits,
        log_law,
        failure: run.failure.as_ref().map(|(w, e)| format!("stopped at omega = {w}: {e}")),
    };
    write_json(&dir.join("sweep.json"), &report)?;
    if let Some((w, e)) = run.failure {
        return Err(CliError {
            code: exit_code(&e),
            message: format!("sweep stopped at omega = {w} after {} points: {e}", report.points),
        });
    }
    Ok((report, run.points))
}

fn sweep_cmd(a: SweepArgs) -> Result<String, CliError> {
    let omegas = sweep_grid(a.alpha, a.omegas, a.omega_min, a.omega_max, a.points)?;
    let controls = a.newton.controls();
    controls.validate()?;
    let radial = RadialSweep {
        n: a.n,
        s0: a.s0,
        controls,
    };
    let dir = output_dir(a.out, "sweep");
    let (report, _) = run_sweep(a.alpha, a.dim, &omegas, &radial, &dir)?;
    let mut line = format!(
        "sweep alpha={} dim={}: {} points, {} slope sign change(s)",
        a.alpha,
        a.dim,
        report.points,
        report.sign_changes.len()
    );
    if let Some(w) = report.omega_c {
        line.push_str(&format!(", omega_c={w:.7}"));
    }
    line.push_str(&format!(" -> {}", dir.display()));
    Ok(line)
}

#[derive(Serialize)]
struct Mass1dOut {
    alpha: u32,
    omega: f64,
    mass: f64,
    energy: f64,
}

fn mass1d_cmd(a: Mass1dArgs) -> Result<String, CliError> {
    let mass = mass_1d_reduced(a.alpha, a.omega)?;
    let energy = energy_1d_reduced(a.alpha, a.omega)?;
    if let Some(dir) = a.out {
        create(&dir)?;
        write_json(
            &dir.join("mass1d.json"),
            &Mass1dOut {
                alpha: a.alpha,
                omega: a.omega,
                mass,
                energy,
            },
        )?;
    }
    Ok(format!("mass1d alpha={} omega={}: mass={mass:.15e} energy={energy:.15e}", a.alpha, a.omega))
}

fn finish<F>(
    outcome: &RunOutcome<F>,
    alpha: u32,
    fit: bool,
    dir: &Path,
    label: &str,
) -> Result<(String, RunSummary), CliError> {
    let fitted = if fit { outcome.final_fit(alpha).ok() } else { None };
    let summary = RunSummary::from_diagnostics(&outcome.diagnostics, fitted);
    write_json(&dir.join("summary.json"), &summary)?;
    let line = format!("{label}: {summary} -> {}", dir.display());
    match &outcome.stopped {
        None => Ok((line, summary)),
        Some(e) => Err(CliError {
            code: exit_code(e),
            message: format!("{line}; stopped after {} steps: {e}", outcome.steps_taken),
        }),
    }
}

/// Runs a 1D evolution and writes its outputs into `dir`.
pub fn run_evolve1d(cfg: &Run1DConfig, dir: &Path) -> Result<(String, RunSummary), CliError> {
    cfg.validate()?;
    let grid = Arc::new(Fourier1DGrid::new(cfg.nx, cfg.lx)?);
    let initial = perturbed_soliton_1d(cfg.alpha, cfg.omega, cfg.lambda, &grid)?;
    let outcome = evolve_1d(cfg, &initial)?;
    create(dir)?;
    write_run_1d(dir, cfg, &outcome)?;
    finish(&outcome, cfg.alpha, true, dir, "evolve1d")
}

/// Runs a radial evolution and writes its outputs into `dir`.
pub fn run_radial(cfg: &RunRadialConfig, dir: &Path) -> Result<(String, RunSummary), CliError> {
    let outcome = evolve_radial(cfg)?;
    create(dir)?;
    write_run_radial(dir, cfg, &outcome)?;
    finish(&outcome, cfg.alpha, false, dir, "evolver")
}

fn evolve1d_cmd(a: Evolve1dArgs) -> Result<String, CliError> {
    let mut cfg = Run1DConfig::new(a.alpha, a.omega, a.lambda, a.lx, a.nx, a.tmax, a.nt);
    if let Some(s) = a.diag_stride {
        cfg.diag_stride = s;
    }
    cfg.snapshot_stride = a.snapshot_stride;
    cfg.delta_bound = a.delta_bound;
    let dir = output_dir(a.out, "evolve1d");
    run_evolve1d(&cfg, &dir).map(|(line, _)| line)
}

fn evolver_cmd(a: EvolverArgs) -> Result<String, CliError> {
    let initial = match a.initial {
        InitialKind::Soliton => InitialData::Soliton {
            omega: a.omega.ok_or_else(|| CliError::usage("--initial soliton requires --omega"))?,
            lambda: a.lambda,
        },
        InitialKind::Gaussian => InitialData::Gaussian {
            c: a.c.ok_or_else(|| CliError::usage("--initial gaussian requires --c"))?,
            s1: a.s1.ok_or_else(|| CliError::usage("--initial gaussian requires --s1"))?,
        },
    };
    let mut cfg = RunRadialConfig::new(a.alpha, a.dim, a.n, a.s0, a.tmax, a.nt, initial);
    cfg.diag_stride = a.diag_stride;
    cfg.snapshot_stride = a.snapshot_stride;
    cfg.delta_bound = a.delta_bound;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.validate()?;
    let dir = output_dir(a.out, "evolver");
    run_radial(&cfg, &dir).map(|(line, _)| line)
}

fn fit_cmd(a: FitArgs) -> Result<String, CliError> {
    let fit = fit_report(&a.diagnostics, a.alpha)?;
    if let Some(dir) = a.out {
        create(&dir)?;
        write_json(&dir.join("fit_report.json"), &fit)?;
    }
    Ok(format!(
        "fit alpha={}: omega={:.6} mean_linf={:.10} window=[{}, {}] samples={}",
        a.alpha, fit.omega, fit.mean_linf, fit.window.0, fit.window.1, fit.samples
    ))
}

/// Solves the radial ground states along `plan` and writes a profile for
/// each frequency in `keep` plus `groundstates.csv` (omega, peak, mass,
/// energy, residual) into `dir`.
pub fn run_groundstates(
    plan: &ContinuationPlan,
    alpha: u32,
    dim: u32,
    controls: &SolverControls,
    keep: &[f64],
    dir: &Path,
) -> Result<Vec<GroundState>, CliError> {
    let run = continuation(plan, alpha, dim, controls)?;
    create(dir)?;
    let kept: Vec<GroundState> = run
        .solutions
        .iter()
        .filter(|g| keep.iter().any(|w| (w - g.params.omega).abs() < 1e-9))
        .cloned()
        .collect();
    let mut rows = Vec::with_capacity(kept.len());
    for g in &kept {
        g.write(dir, &format!("profile_omega_{:.4}", g.params.omega))?;
        rows.push(vec![g.params.omega, g.profile.max(), g.mass()?, g.energy()?, g.residual]);
    }
    write_numeric_csv(
        &dir.join("groundstates.csv"),
        &["omega", "peak", "mass", "energy", "residual"],
        rows,
    )?;
    if let Some((w, e)) = run.failure {
        return Err(CliError {
            code: exit_code(&e),
            message: format!("continuation stopped at omega = {w}: {e}"),
        });
    }
    Ok(kept)
}
