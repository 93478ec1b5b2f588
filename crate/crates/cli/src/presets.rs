//! Named experiment presets with their expected-output checklists.
//!
//! `full` runs use the full resolutions and can take hours;
//! `desk` runs use reduced grids that finish in minutes.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use quasisol::bifurcation::RadialSweep;
use quasisol::evolve1d::Run1DConfig;
use quasisol::evolver::{InitialData, RunRadialConfig};
use quasisol::groundstate::{ContinuationPlan, SolverControls};
use quasisol::io::write_json;
use quasisol::model::omega_star;

use crate::commands::{run_evolve1d, run_groundstates, run_radial, run_sweep, PresetArgs};
use crate::report::RunSummary;
use crate::{output_dir, CliError};

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Full,
    Desk,
}

pub const NAMES: [&str; 5] = [
    "fig3-mass-energy",
    "fig7-alpha3-om022",
    "fig12-groundstates",
    "fig16-unstable-grow",
    "fig18-gauss-wide",
];

#[derive(Debug, Clone)]
pub enum Job {
    Sweep {
        alpha: u32,
        dim: u32,
        omegas: Vec<f64>,
    },
    GroundStates {
        alpha: u32,
        dim: u32,
        plan: ContinuationPlan,
        controls: SolverControls,
        keep: Vec<f64>,
    },
    Evolve1D(Run1DConfig),
    Radial(RunRadialConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    SlopeSignChanges { count: usize },
    OmegaCFound,
    FittedOmegaIn { lo: f64, hi: f64 },
    MaxDeltaBelow { bound: f64 },
    PeaksIncreasingBelowOne,
    /// Largest L∞ exceeds the initial value by this factor.
    LinfGrowsBy { factor: f64 },
    /// Trailing 10% of L∞ stays within this relative band of its mean.
    TrailingPlateau { spread: f64 },
}

impl Check {
    pub fn describe(&self) -> String {
        match self {
            Check::SlopeSignChanges { count } => format!("dM/domega changes sign exactly {count} time(s)"),
            Check::OmegaCFound => "critical frequency located".into(),
            Check::FittedOmegaIn { lo, hi } => format!("fitted omega in [{lo}, {hi}]"),
            Check::MaxDeltaBelow { bound } => format!("max delta <= {bound:e}"),
            Check::PeaksIncreasingBelowOne => "peaks increase with omega and stay below 1".into(),
            Check::LinfGrowsBy { factor } => format!("max L-inf >= {factor} x initial"),
            Check::TrailingPlateau { spread } => format!("trailing L-inf within {spread} of its mean"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub job: Job,
    pub checks: Vec<Check>,
}

/// Numbers a preset run produced, for evaluating its checklist.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Measured {
    pub sign_changes: Option<usize>,
    pub omega_c: Option<f64>,
    pub run: Option<RunSummary>,
    pub peaks: Vec<(f64, f64)>,
}

impl Check {
    pub fn holds(&self, m: &Measured) -> bool {
        match *self {
            Check::SlopeSignChanges { count } => m.sign_changes == Some(count),
            Check::OmegaCFound => m.omega_c.is_some(),
            Check::FittedOmegaIn { lo, hi } => m
                .run
                .and_then(|r| r.fitted_omega)
                .is_some_and(|w| (lo..=hi).contains(&w)),
            Check::MaxDeltaBelow { bound } => m.run.is_some_and(|r| r.max_delta <= bound),
            Check::PeaksIncreasingBelowOne => {
                !m.peaks.is_empty()
                    && m.peaks.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1)
                    && m.peaks.iter().all(|p| p.1 > 0.0 && p.1 < 1.0)
            }
            Check::LinfGrowsBy { factor } => m.run.is_some_and(|r| r.max_linf >= factor * r.initial_linf),
            Check::TrailingPlateau { spread } => m.run.is_some_and(|r| r.trailing_spread <= spread),
        }
    }
}

fn fig3() -> ExperimentPreset {
    let star = omega_star(3);
    ExperimentPreset {
        name: "fig3-mass-energy",
        description: "alpha=3, d=1: mass and energy along 500 frequencies in (0, omega*)",
        job: Job::Sweep {
            alpha: 3,
            dim: 1,
            omegas: (1..=500).map(|i| star * i as f64 / 501.0).collect(),
        },
        checks: vec![Check::SlopeSignChanges { count: 1 }, Check::OmegaCFound],
    }
}

fn fig7(scale: Scale) -> ExperimentPreset {
    let mut cfg = match scale {
        Scale::Full => Run1DConfig::new(3, 0.22, 1.001, 30.0, 4096, 10.0, 1_000_000),
        Scale::Desk => Run1DConfig::new(3, 0.22, 1.001, 30.0, 1024, 10.0, 100_000),
    };
    cfg.snapshot_stride = cfg.nt / 100;
    ExperimentPreset {
        name: "fig7-alpha3-om022",
        description: "alpha=3, d=1: solitary wave at omega=0.22 scaled by 1.001, t <= 10",
        job: Job::Evolve1D(cfg),
        checks: vec![
            Check::FittedOmegaIn { lo: 0.215, hi: 0.225 },
            Check::MaxDeltaBelow { bound: 1e-3 },
        ],
    }
}

fn fig12(scale: Scale) -> ExperimentPreset {
    let (n, s0) = match scale {
        Scale::Full => (1000, 1e4),
        Scale::Desk => (200, 1e3),
    };
    ExperimentPreset {
        name: "fig12-groundstates",
        description: "alpha=1, d=3: radial ground states for omega in {0.1, 0.2, 0.3, 0.4}",
        job: Job::GroundStates {
            alpha: 1,
            dim: 3,
            plan: ContinuationPlan::two_regime(n, s0, 1, 0.1, 0.4),
            controls: SolverControls {
                mu: 1e-2,
                mu_growth: 1.2,
                max_iter: 400,
                ..Default::default()
            },
            keep: vec![0.1, 0.2, 0.3, 0.4],
        },
        checks: vec![Check::PeaksIncreasingBelowOne],
    }
}

fn radial(scale: Scale, initial: InitialData, full_tmax: f64, desk_tmax: f64) -> RunRadialConfig {
    let mut cfg = match scale {
        // h = 2e-3 as in the t <= 20, 1e4-step runs.
        Scale::Full => RunRadialConfig::new(1, 3, 1000, 1e4, full_tmax, (full_tmax * 500.0) as usize, initial),
        Scale::Desk => RunRadialConfig::new(1, 3, 400, 4e3, desk_tmax, (desk_tmax * 100.0) as usize, initial),
    };
    cfg.diag_stride = if scale == Scale::Full { 10 } else { 1 };
    cfg.snapshot_stride = cfg.nt / 100;
    cfg
}

fn fig16(scale: Scale) -> ExperimentPreset {
    ExperimentPreset {
        name: "fig16-unstable-grow",
        description: "alpha=1, d=3: unstable-branch solitary wave at omega=0.01 scaled by 1.01",
        job: Job::Radial(radial(
            scale,
            InitialData::Soliton {
                omega: 0.01,
                lambda: 1.01,
            },
            140.0,
            20.0,
        )),
        checks: vec![
            Check::LinfGrowsBy { factor: 1.05 },
            Check::MaxDeltaBelow { bound: 1e-3 },
        ],
    }
}

fn fig18(scale: Scale) -> ExperimentPreset {
    ExperimentPreset {
        name: "fig18-gauss-wide",
        description: "alpha=1, d=3: gaussian data 0.9 exp(-s/50)",
        job: Job::Radial(radial(scale, InitialData::Gaussian { c: 0.9, s1: 50.0 }, 20.0, 10.0)),
        checks: vec![
            Check::TrailingPlateau { spread: 0.05 },
            Check::MaxDeltaBelow { bound: 1e-3 },
        ],
    }
}

pub fn preset(name: &str, scale: Scale) -> Option<ExperimentPreset> {
    Some(match name {
        "fig3-mass-energy" => fig3(),
        "fig7-alpha3-om022" => fig7(scale),
        "fig12-groundstates" => fig12(scale),
        "fig16-unstable-grow" => fig16(scale),
        "fig18-gauss-wide" => fig18(scale),
        _ => return None,
    })
}

#[derive(Serialize)]
struct CheckResult {
    #[serde(flatten)]
    check: Check,
    description: String,
    pass: bool,
}

#[derive(Serialize)]
struct PresetRecord<'a> {
    name: &'a str,
    scale: Scale,
    measured: &'a Measured,
    checks: Vec<CheckResult>,
}

/// Runs `p` into `dir`; returns the summary line and the evaluated checks.
pub fn run_preset(p: &ExperimentPreset, scale: Scale, dir: &Path) -> Result<(String, Vec<(Check, bool)>), CliError> {
    let mut measured = Measured::default();
    let line = match &p.job {
        Job::Sweep { alpha, dim, omegas } => {
            let (report, _) = run_sweep(*alpha, *dim, omegas, &RadialSweep::default(), dir)?;
            measured.sign_changes = Some(report.sign_changes.len());
            measured.omega_c = report.omega_c;
            format!(
                "{} points, {} slope sign change(s), omega_c={}",
                report.points,
                report.sign_changes.len(),
                report.omega_c.map_or("none".into(), |w| format!("{w:.7}"))
            )
        }
        Job::GroundStates {
            alpha,
            dim,
            plan,
            controls,
            keep,
        } => {
            let states = run_groundstates(plan, *alpha, *dim, controls, keep, dir)?;
            measured.peaks = states.iter().map(|g| (g.params.omega, g.profile.max())).collect();
            let peaks: Vec<String> = measured.peaks.iter().map(|(w, p)| format!("{w}:{p:.9}")).collect();
            format!("peaks {}", peaks.join(" "))
        }
        Job::Evolve1D(cfg) => {
            let (line, summary) = run_evolve1d(cfg, dir)?;
            measured.run = Some(summary);
            line
        }
        Job::Radial(cfg) => {
            let (line, summary) = run_radial(cfg, dir)?;
            measured.run = Some(summary);
            line
        }
    };
    let results: Vec<(Check, bool)> = p.checks.iter().map(|c| (*c, c.holds(&measured))).collect();
    let record = PresetRecord {
        name: p.name,
        scale,
        measured: &measured,
        checks: results
            .iter()
            .map(|(c, pass)| CheckResult {
                check: *c,
                description: c.describe(),
                pass: *pass,
            })
            .collect(),
    };
    write_json(&dir.join("checks.json"), &record)?;
    let passed = results.iter().filter(|r| r.1).count();
    Ok((
        format!("{} [{}]: {line}; checks {passed}/{} passed", p.name, match scale {
            Scale::Full => "full",
            Scale::Desk => "desk",
        }, results.len()),
        results,
    ))
}

pub fn preset_cmd(a: PresetArgs) -> Result<String, CliError> {
    if a.list {
        let lines: Vec<String> = NAMES
            .iter()
            .map(|n| format!("{n}: {}", preset(n, a.scale).expect("listed").description))
            .collect();
        return Ok(lines.join("\n"));
    }
    let Some(name) = a.name else {
        return Err(CliError::usage(format!("preset needs a name, one of: {}", NAMES.join(", "))));
    };
    let Some(p) = preset(&name, a.scale) else {
        return Err(CliError::usage(format!("unknown preset `{name}`, expected one of: {}", NAMES.join(", "))));
    };
    let dir = output_dir(a.out, p.name);
    run_preset(&p, a.scale, &dir).map(|(line, _)| line)
}
