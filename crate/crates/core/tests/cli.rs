use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dsaddle(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dsaddle"));
    cmd.args(args).env_remove("DSADDLE_OUT").env("RUST_LOG", "error");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn indicators(a: (f64, f64), r: (f64, f64), k: (f64, f64)) -> String {
    serde_json::json!({
        "gamma_a_min": a.0, "gamma_a_max": a.1,
        "gamma_r_min": r.0, "gamma_r_max": r.1,
        "gamma_x_min": k.0, "gamma_x_max": k.1,
        "gamma_e_min": 0.0, "gamma_e_max": 0.0,
        "gamma_k_min": k.0, "gamma_k_max": k.1,
    })
    .to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bounds_for_the_figure_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let g = indicators((1.639, 1.639), (0.734, 0.734), (0.251, 0.251));
    let out = dsaddle(&["bounds", "--indicators", &g, "--variants", "E0", "--out", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let b = &doc["results"][0]["bounds"];
    assert_eq!(doc["results"][0]["variant"], "E0");
    assert!((b["neg_lo"].as_f64().unwrap() + 0.503254554435484).abs() < 1e-12);
    assert!((b["pos_lo"].as_f64().unwrap() - 0.435434175555416).abs() < 1e-12);
    assert!((b["pos_hi"].as_f64().unwrap() - 1.877337904880065).abs() < 1e-12);
    let written: Value = serde_json::from_slice(&std::fs::read(dir.path().join("bounds.json")).unwrap()).unwrap();
    assert_eq!(written, doc);
}

#[test]
fn bounds_for_unit_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let g = indicators((1.0, 1.0), (1.0, 1.0), (1.0, 1.0));
    let out = dsaddle(&["bounds", "--indicators", &g, "--out", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success());
    for r in stdout_json(&out)["results"].as_array().unwrap() {
        let b = &r["bounds"];
        for (key, want) in [("neg_lo", -1.0), ("neg_hi", -1.0), ("pos_lo", 1.0), ("pos_hi", 1.0)] {
            assert!((b[key].as_f64().unwrap() - want).abs() < 1e-12, "{key}");
        }
    }
}

#[test]
fn bounds_outside_the_regime_report_an_error_object() {
    let dir = tempfile::tempdir().unwrap();
    let g = indicators((0.5, 2.5), (0.7, 1.2), (0.3, 1.2));
    let out = dsaddle(&["bounds", "--indicators", &g, "--out", dir.path().to_str().unwrap()], &[]);
    assert!(!out.status.success());
    let doc = stdout_json(&out);
    for r in doc["results"].as_array().unwrap() {
        assert_eq!(r["error"]["kind"], "ComplexRoots");
    }
}

#[test]
fn invalid_arguments_exit_with_an_error_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dsaddle(&["pdeco", "--levels", "9", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "InvalidArgument");
}

#[test]
fn pdeco_outputs_are_reproducible_and_honour_the_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let (flag, first, second) = (dir.path().join("flag"), dir.path().join("first"), dir.path().join("second"));
    let args = ["pdeco", "--levels", "3", "--cheb-iters", "1,3", "--out", flag.to_str().unwrap()];
    let out = dsaddle(&args, &[("DSADDLE_OUT", &first)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dsaddle(&args, &[("DSADDLE_OUT", &second)]).status.success());
    assert!(!flag.exists());

    let mut names: Vec<_> = std::fs::read_dir(&first).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "pdeco_full_k3_beta1e-2.csv"));
    assert!(names.iter().any(|n| n == "pdeco_full_iterations.csv"));
    for name in &names {
        if name.to_string_lossy().ends_with(".csv") {
            assert_eq!(std::fs::read(first.join(name)).unwrap(), std::fs::read(second.join(name)).unwrap());
        }
    }
    let iters = std::fs::read_to_string(first.join("pdeco_full_iterations.csv")).unwrap();
    assert_eq!(iters.lines().next().unwrap(), "l,k3_beta1e-2,k3_beta1e-4");
    assert_eq!(iters.lines().count(), 3);
}

#[test]
fn command_line_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let cfg_out = dir.path().join("from_config");
    let flag_out = dir.path().join("from_flags");
    let doc = serde_json::json!({
        "levels": [3],
        "betas": [0.1],
        "cheb_iters": [2],
        "observation": "boundary",
        "eigens": false,
        "out": cfg_out,
    });
    std::fs::write(&cfg, doc.to_string()).unwrap();
    let out = dsaddle(&["--config", cfg.to_str().unwrap(), "pdeco", "--out", flag_out.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!cfg_out.exists());
    let iters = std::fs::read_to_string(flag_out.join("pdeco_boundary_iterations.csv")).unwrap();
    assert_eq!(iters.lines().next().unwrap(), "l,k3_beta1e-1");

    std::fs::write(&cfg, "{\"levels\": [3], \"bogus\": 1}").unwrap();
    let out = dsaddle(&["--config", cfg.to_str().unwrap(), "pdeco"], &[]);
    assert_eq!(out.status.code(), Some(2));
}
