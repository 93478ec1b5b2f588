use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quasisol_cli::report::fit_report;
use quasisol_cli::{EXIT_ACCURACY, EXIT_USAGE, OUT_ENV};

fn quasisol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasisol"))
        .args(args)
        .env_remove(OUT_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_trace(path: &Path, linf: impl Fn(usize) -> f64) {
    let mut text = String::from("t,linf,mass,energy,delta\n");
    for i in 0..=1000 {
        text.push_str(&format!("{},{},1,-1,0\n", i as f64 * 0.01, linf(i)));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn help_lists_subcommands() {
    let o = quasisol(&["--help"]);
    assert!(o.status.success());
    for cmd in ["groundstate", "sweep", "mass1d", "evolve1d", "evolver", "fit", "preset"] {
        assert!(stdout(&o).contains(cmd), "{cmd}");
    }
}

#[test]
fn mass_near_zero_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = quasisol(&["mass1d", "--alpha", "2", "--omega", "1e-6", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("mass=2.7207"));
    let j = json(&out.join("mass1d.json"));
    assert!((j["mass"].as_f64().unwrap() - 2.720_699).abs() < 1e-2);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let cases: &[&[&str]] = &[
        &["mass1d", "--alpha", "3", "--omega", "0.25"],
        &["mass1d", "--alpha", "3"],
        &["sweep", "--alpha", "3", "--dim", "1", "--points", "0"],
        &["sweep", "--alpha", "3", "--dim", "1"],
        &["sweep", "--alpha", "3", "--dim", "1", "--omegas", "0.1", "--points", "3"],
        &["evolver", "--alpha", "1", "--dim", "3", "--tmax", "1", "--nt", "10", "--initial", "gaussian", "--c", "0.9"],
        &["groundstate", "--alpha", "1", "--dim", "3", "--omega", "0.7"],
        &["preset", "no-such-preset"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = quasisol(args);
        assert_eq!(o.status.code(), Some(EXIT_USAGE), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error"), "{args:?}");
    }
    let o = quasisol(&["mass1d", "--alpha", "3"]);
    assert!(stderr(&o).contains("--omega"));
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_root = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_quasisol"))
        .args(["sweep", "--alpha", "3", "--dim", "1", "--points", "20"])
        .env(OUT_ENV, &env_root)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_root.join("sweep/bifurcation.csv").exists());
    let flag = dir.path().join("flag");
    let o = Command::new(env!("CARGO_BIN_EXE_quasisol"))
        .args(["sweep", "--alpha", "3", "--dim", "1", "--points", "20", "--out"])
        .arg(&flag)
        .env(OUT_ENV, &env_root)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag.join("bifurcation.csv").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_quasisol"))
        .args(["sweep", "--alpha", "3", "--dim", "1", "--points", "20"])
        .env_remove(OUT_ENV)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("out/sweep/sweep.json").exists());
}

#[test]
fn config_files_fill_in_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("run.conf");
    fs::write(&flat, "# sweep settings\nalpha = 3\ndim = 1\npoints = 40\n").unwrap();
    let out = dir.path().join("a");
    let o = quasisol(&["sweep", "--config", flat.to_str().unwrap(), "--points", "30", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    // The command line wins over the file.
    assert_eq!(json(&out.join("sweep.json"))["points"], 30);

    let js = dir.path().join("run.json");
    fs::write(&js, r#"{"alpha": 3, "dim": 1, "omegas": [0.05, 0.1, 0.15, 0.2]}"#).unwrap();
    let out = dir.path().join("b");
    let o = quasisol(&["sweep", "--config", js.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&out.join("sweep.json"))["points"], 4);

    fs::write(&flat, "alpha = 3\ndim = 1\nbogus = 1\n").unwrap();
    let o = quasisol(&["sweep", "--config", flat.to_str().unwrap(), "--points", "5"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn sweep_finds_turning_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = quasisol(&["sweep", "--alpha", "3", "--dim", "1", "--points", "500", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&out.join("sweep.json"));
    assert_eq!(report["sign_changes"].as_array().unwrap().len(), 1);
    assert!((report["omega_c"].as_f64().unwrap() - 0.118_126_5).abs() < 1e-6);
    assert!(report["log_law"]["slope"].as_f64().unwrap() > 0.0);
    let fits = json(&out.join("fits.json"));
    assert!(!fits["fits"].as_array().unwrap().is_empty());
    let mut rd = csv::Reader::from_path(out.join("bifurcation.csv")).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["omega", "mass", "energy", "dmass_domega", "stability"]
    );
    let labels: Vec<String> = rd.records().map(|r| r.unwrap()[4].to_string()).collect();
    assert_eq!(labels.len(), 500);
    assert!(labels.contains(&"stable".to_string()) && labels.contains(&"unstable".to_string()));
}

#[test]
fn fit_recovers_frequency_from_constant_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("diagnostics.csv");
    write_trace(&p, |_| 0.97928);
    let fit = fit_report(&p, 3).unwrap();
    assert!((fit.omega - 0.22049).abs() < 5e-6, "{}", fit.omega);
    let o = quasisol(&["fit", "--diagnostics", p.to_str().unwrap(), "--alpha", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("omega=0.2204"));
}

#[test]
fn fit_averages_oscillating_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("diagnostics.csv");
    write_trace(&p, |i| 0.9 + 0.01 * (i as f64 * 0.7).sin());
    let fit = fit_report(&p, 3).unwrap();
    let centre = 0.25 * 0.9f64.powi(6);
    assert!((fit.omega - centre).abs() < 2e-3, "{}", fit.omega);
}

#[test]
fn fit_rejects_saturated_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("diagnostics.csv");
    write_trace(&p, |_| 1.0);
    assert!(fit_report(&p, 3).is_err());
    let o = quasisol(&["fit", "--diagnostics", p.to_str().unwrap(), "--alpha", "3"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
}

#[test]
fn short_evolutions_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1");
    let o = quasisol(&[
        "evolve1d", "--alpha", "3", "--omega", "0.22", "--lambda", "1.001", "--tmax", "0.2", "--nt", "200", "--nx", "512",
        "--snapshot-stride", "100", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["diagnostics.csv", "manifest.json", "summary.json", "snapshot_00000.csv", "snapshot_00002.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(json(&out.join("summary.json"))["max_delta"].as_f64().unwrap() < 1e-6);

    let out = dir.path().join("rad");
    let o = quasisol(&[
        "evolver", "--alpha", "1", "--dim", "3", "--n", "60", "--s0", "600", "--tmax", "0.1", "--nt", "10", "--initial",
        "gaussian", "--c", "0.9", "--s1", "20", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["initial"]["kind"], "gaussian");
    assert_eq!(m["steps_taken"], 10);
}

#[test]
fn accuracy_abort_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e");
    let o = quasisol(&[
        "evolve1d", "--alpha", "3", "--omega", "0.22", "--tmax", "0.1", "--nt", "10", "--nx", "128", "--diag-stride", "1",
        "--delta-bound", "1e-300", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_ACCURACY), "{}", stderr(&o));
    // Partial results are kept.
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn groundstate_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = quasisol(&["groundstate", "--alpha", "1", "--dim", "3", "--omega", "0.1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("peak=0.8907418"));
    let mut rd = csv::Reader::from_path(out.join("profile.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["s", "r", "phi"]);
    assert_eq!(rd.records().count(), 201);
    let meta = json(&out.join("profile.json"));
    assert!(meta["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn presets_are_listed_and_run() {
    let o = quasisol(&["preset", "--list"]);
    assert!(o.status.success());
    for name in ["fig3-mass-energy", "fig7-alpha3-om022", "fig12-groundstates", "fig16-unstable-grow", "fig18-gauss-wide"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = quasisol(&["preset", "fig3-mass-energy", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("checks 2/2 passed"));
    let checks = json(&out.join("checks.json"));
    assert!(checks.as_array().is_none_or(|c| !c.is_empty()));
    assert!(out.join("bifurcation.csv").exists());
}

#[test]
fn desk_ground_state_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = quasisol(&["preset", "fig12-groundstates", "--scale", "desk", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("checks 1/1 passed"), "{}", stdout(&o));
    let omegas = quasisol::io::read_column(&out.join("groundstates.csv"), "omega").unwrap();
    assert_eq!(omegas, [0.1, 0.2, 0.3, 0.4]);
    assert!(out.join("profile_omega_0.4000.csv").exists());
}
