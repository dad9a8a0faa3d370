use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tdho_cli::Scenario;

fn presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn preset(name: &str) -> PathBuf {
    presets().join(format!("{name}.toml"))
}

fn tdho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdho")).args(args).output().unwrap()
}

fn run_json(verb: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let cfg = preset(name);
    let mut args = vec![verb, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = tdho(&args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn every_preset_round_trips() {
    let mut count = 0;
    for entry in std::fs::read_dir(presets()).unwrap() {
        let path = entry.unwrap().path();
        let s = Scenario::load(&path).unwrap();
        let again = Scenario::parse(&s.to_toml()).unwrap();
        assert_eq!(again, s, "{}", path.display());
        assert_eq!(again.to_toml(), s.to_toml());
        count += 1;
    }
    assert!(count >= 10);
}

#[test]
fn const_scenario_passes_everything() {
    let (code, report) = run_json("verify", "const", &[]);
    assert_eq!(code, 0);
    assert_eq!(report["pass"], true);
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "{check}");
    }
}

#[test]
fn flipped_delta_is_caught_by_the_residual_only() {
    let (code, report) = run_json("verify", "displaced-fault", &[]);
    assert_eq!(code, 1);
    assert_eq!(report["pass"], false);
    for check in report["checks"].as_array().unwrap() {
        let name = check["name"].as_str().unwrap();
        let expect = !name.starts_with("schrodinger_residual");
        assert_eq!(check["pass"], expect, "{check}");
    }
    let (code, _) = run_json("verify", "displaced", &[]);
    assert_eq!(code, 0);
}

#[test]
fn report_schema_is_shared() {
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    let (_, a) = run_json("verify", "const", &[]);
    let (_, b) = run_json("verify", "inverse-square", &[]);
    assert_eq!(keys(&a), keys(&b));
    assert_eq!(keys(&a["checks"][0]), keys(&b["checks"][0]));
    let names = |v: &Value| -> Vec<String> {
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["name"].as_str().unwrap().split('[').next().unwrap().to_string())
            .collect()
    };
    let (mut na, mut nb) = (names(&a), names(&b));
    na.dedup();
    nb.dedup();
    assert_eq!(na, nb);
}

#[test]
fn reports_are_bit_identical_across_runs_and_thread_counts() {
    let cfg = preset("squeezed");
    let cfg = cfg.to_str().unwrap();
    let run = |verb: &str, threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_tdho"))
            .args([verb, "--config", cfg, "--seed", "7"])
            .env("TDHO_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    for verb in ["verify", "phase"] {
        let first = run(verb, "1");
        assert_eq!(first, run(verb, "1"));
        assert_eq!(first, run(verb, "4"));
    }
}

#[test]
fn seed_changes_only_the_random_draws() {
    let (_, a) = run_json("verify", "mathieu", &["--seed", "1"]);
    let (_, b) = run_json("verify", "mathieu", &["--seed", "2"]);
    for (x, y) in a["checks"]
        .as_array()
        .unwrap()
        .iter()
        .zip(b["checks"].as_array().unwrap())
    {
        if x["name"] != "composition_law" {
            assert_eq!(x, y);
        } else {
            assert_ne!(x["value"], y["value"]);
        }
    }
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(preset("const"))
        .unwrap()
        .replace("value = 1.0", "value = 1.0\nextra = 3");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, text).unwrap();
    let out = tdho(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let text = std::fs::read_to_string(preset("const"))
        .unwrap()
        .replace("dv = 1.0", "dv = -1.0");
    std::fs::write(&bad, text).unwrap();
    let out = tdho(&["evolve", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 10: initial"), "{err}");

    let out = tdho(&["verify", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let (code, _) = run_json("verify", "const", &["--grid-n", "5"]);
    assert_eq!(code, 2);

    let out = Command::new(env!("CARGO_BIN_EXE_tdho"))
        .args(["verify", "--config", preset("const").to_str().unwrap()])
        .env("TDHO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phase_failures_are_explicit() {
    let out = tdho(&["phase", "--config", preset("quasi-periodic").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no T or 2T periodicity"));
    let out = tdho(&["phase", "--config", preset("free-particle").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phase_table_for_the_squeezed_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = tdho(&[
        "phase",
        "--config",
        preset("squeezed").to_str().unwrap(),
        "--modes",
        "0,1,2,3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table: Value = serde_json::from_slice(&std::fs::read(dir.path().join("squeezed_phase.json")).unwrap()).unwrap();
    assert_eq!(table["t_prime"].as_f64().unwrap(), std::f64::consts::PI);
    for r in table["reports"].as_array().unwrap() {
        let nu = r["n"].as_f64().unwrap() + 0.5;
        assert!((r["gamma"].as_f64().unwrap() / nu - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    }

    let (code, _) = run_json("phase", "const", &["--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let table: Value = serde_json::from_slice(&std::fs::read(dir.path().join("const_phase.json")).unwrap()).unwrap();
    for r in table["reports"].as_array().unwrap() {
        assert!(r["gamma"].as_f64().unwrap().abs() < 1e-10);
    }
}

/// `(t, x, |ψ|²)` rows of one CSV, grouped by frame.
fn read_frames(path: &Path) -> Vec<(f64, Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# scenario: "));
    assert!(lines.next().unwrap().starts_with("# mode: n = "));
    assert_eq!(lines.next().unwrap(), "t,x,re,im,abs2");
    let mut frames: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 5);
        assert_eq!(cols[4], cols[2] * cols[2] + cols[3] * cols[3]);
        match frames.last_mut() {
            Some(f) if f.0 == cols[0] => {
                f.1.push(cols[1]);
                f.2.push(cols[4]);
            }
            _ => frames.push((cols[0], vec![cols[1]], vec![cols[4]])),
        }
    }
    frames
}

fn csv_moments(full_line: bool, xs: &[f64], dens: &[f64]) -> (f64, f64, f64) {
    let h = xs[1] - xs[0];
    let n = xs.len();
    let w = |k: usize| {
        if full_line && (k == 0 || k == n - 1) {
            0.5 * h
        } else {
            h
        }
    };
    let mut m = [0.0; 3];
    for k in 0..n {
        for (p, acc) in m.iter_mut().enumerate() {
            *acc += w(k) * xs[k].powi(p as i32) * dens[k];
        }
    }
    (m[0].sqrt(), m[1] / m[0], m[2] / m[0])
}

fn evolve_round_trip(name: &str, full_line: bool) {
    let dir = tempfile::tempdir().unwrap();
    let out = tdho(&[
        "evolve",
        "--config",
        preset(name).to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join(format!("{name}_summary.json"))).unwrap()).unwrap();
    let scenario = Scenario::load(&preset(name)).unwrap();
    let modes = summary["modes"].as_array().unwrap();
    assert_eq!(modes.len(), scenario.modes.len());
    for m in modes {
        let frames = read_frames(&dir.path().join(m["file"].as_str().unwrap()));
        assert_eq!(frames.len(), scenario.time.frames);
        let rows: usize = frames.iter().map(|f| f.1.len()).sum();
        assert_eq!(rows as u64, m["rows"].as_u64().unwrap());
        for (f, lib) in frames.iter().zip(m["frames"].as_array().unwrap()) {
            let (norm, mean_x, mean_x2) = csv_moments(full_line, &f.1, &f.2);
            assert_eq!(f.0, lib["t"].as_f64().unwrap());
            assert!((norm - lib["norm"].as_f64().unwrap()).abs() < 1e-12);
            assert!((mean_x - lib["mean_x"].as_f64().unwrap()).abs() < 1e-12);
            assert!((mean_x2 - lib["mean_x2"].as_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn csv_moments_match_the_summary() {
    evolve_round_trip("mathieu", true);
    evolve_round_trip("inverse-square", false);
}

#[test]
fn const_scenario_keeps_unit_width() {
    let dir = tempfile::tempdir().unwrap();
    let out = tdho(&[
        "evolve",
        "--config",
        preset("const").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("const_summary.json")).unwrap()).unwrap();
    for rho in summary["classical"]["rho"].as_array().unwrap() {
        assert!((rho.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn invariant_verb_reports_the_spectrum() {
    let (code, report) = run_json("invariant", "inverse-square", &["--modes", "0,1,2"]);
    assert_eq!(code, 0);
    let expected: Vec<f64> = report["expected_diagonal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(expected, vec![2.5, 4.5, 6.5]);
    for m in report["matrices"].as_array().unwrap() {
        for (i, row) in m.as_array().unwrap().iter().enumerate() {
            assert!((row[i].as_f64().unwrap() - expected[i]).abs() < 1e-5);
        }
    }
}
