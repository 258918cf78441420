use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lll-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

const SHELL: &str = r#"{
  "system": {"kind": "shell", "lambda": 1.0, "j_min": -2, "j_max": 5},
  "initial_data": {"kind": "two_mode", "a": [1.0, 0.0],
                   "modes": [{"level": -2, "amplitude": [0.6, 0.0]}, {"level": -1, "amplitude": [0.3, 0.2]}]},
  "integrator": {"scheme": "implicit_midpoint", "dt": 0.01, "t_end": 0.5},
  "observables": {"every": 10, "alpha": 1.0},
  "output": {"dir": "unused", "prefix": "shell"}
}"#;

#[test]
fn condensate_phase_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{
          "system": {"kind": "shell", "lambda": 2.0, "j_min": 0, "j_max": 3},
          "initial_data": {"kind": "literal", "a": [1.0, 0.0], "g": [[0,0],[0,0],[0,0],[0,0]]},
          "integrator": {"scheme": "rk4", "dt": 0.001, "t_end": 1.0},
          "observables": {"every": 250}
        }"#,
    );
    let out = dir.path().join("o");
    let o = lab(&[
        "simulate-shell",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let (header, rows) = csv_rows(&out.join("run.csv"));
    assert_eq!(
        header,
        [
            "t",
            "re_a",
            "im_a",
            "M",
            "E",
            "H",
            "xalpha",
            "front_p50",
            "front_p90"
        ]
    );
    assert_eq!(rows.len(), 5);
    for row in rows {
        let t: f64 = row[0].parse().unwrap();
        let (re, im): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!((re - (2.0 * t).cos()).abs() < 1e-10 && (im + (2.0 * t).sin()).abs() < 1e-10);
        // no non-condensate mass: fronts undefined
        assert!(row[7].is_empty() && row[8].is_empty());
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", SHELL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = lab(&[
            "simulate-shell",
            "--config",
            &cfg,
            "--out",
            d.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["shell.csv", "shell.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap()
        );
    }
    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("shell.json")).unwrap()).unwrap();
    assert_eq!(side["snapshots"].as_array().unwrap().len(), 6);
    assert_eq!(side["complete"], true);
    assert_eq!(side["snapshots"][0]["z"].as_array().unwrap().len(), 9);
    // no stray temporaries
    assert_eq!(std::fs::read_dir(&a).unwrap().count(), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let malformed = write(dir.path(), "m.json", "{ \"system\": ");
    let o = lab(&["simulate-shell", "--config", &malformed]);
    assert_eq!(o.status.code(), Some(2));

    let unknown = write(
        dir.path(),
        "u.json",
        &SHELL.replace("\"every\"", "\"evrey\""),
    );
    let o = lab(&["simulate-shell", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("evrey"), "{}", stderr(&o));

    let cfg = write(dir.path(), "s.json", SHELL);
    let o = lab(&["simulate-limit", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));

    let o = lab(&["simulate-shell"]);
    assert_eq!(o.status.code(), Some(2));

    let missing = write(
        dir.path(),
        "x.json",
        &SHELL.replace("\"level\": -1", "\"level\": 40"),
    );
    let o = lab(&[
        "simulate-shell",
        "--config",
        &missing,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = lab(&[
        "simulate-shell",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_exits_3_with_partial_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "f.json",
        r#"{
          "system": {"kind": "fock", "n": 8},
          "initial_data": {"kind": "single_shell", "a": [300.0, 0.0], "level": 2, "amplitude": [300.0, 0.0]},
          "integrator": {"scheme": "rk4", "dt": 0.5, "t_end": 100.0}
        }"#,
    );
    let out = dir.path().join("o");
    let o = lab(&[
        "simulate-fock",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(side["complete"], false);
    assert!(!side["snapshots"].as_array().unwrap().is_empty());
}

#[test]
fn asymptotics_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"asymptotics": {"lambdas": [16, 32, 64],
            "profile": {"kind": "bump", "lo": 0.5, "hi": 4.0, "amplitude": [1.0, 0.0]}}}"#,
    );
    let o = lab(&[
        "verify-asymptotics",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&dir.path().join("run_asymptotics.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let err = |c: usize| -> Vec<f64> {
        rows.iter()
            .map(|r| (r[c].parse::<f64>().unwrap() - 1.0).abs())
            .collect()
    };
    assert_eq!(rows.len(), 3);
    for c in [col("ratio2"), col("ratio4")] {
        let e = err(c);
        assert!(e[1] < e[0] && e[2] < e[1], "{e:?}");
    }
    // the third column is reported as observed, whatever its trend
    let e3 = err(col("ratio3"));
    let flag = e3[1] < e3[0] && e3[2] < e3[1];
    assert!(stdout(&o).contains(&format!("H3 {flag}")), "{}", stdout(&o));
    assert!(rows
        .iter()
        .all(|r| r[col("H1")].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn gradient_check_reports_consistency_and_paper_attribution() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", SHELL);
    let d = dir.path().to_str().unwrap();
    let o = lab(&["check-gradients", "--config", &cfg, "--out", d]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(consistent)"), "{}", stdout(&o));
    let o = lab(&[
        "check-gradients",
        "--config",
        &cfg,
        "--out",
        d,
        "--mode",
        "paper",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("coefficient ratio 2.0000"),
        "{}",
        stdout(&o)
    );
    assert!(dir.path().join("shell_gradients.csv").exists());

    let apart = write(
        dir.path(),
        "p.json",
        &SHELL.replace("\"level\": -1", "\"level\": 1"),
    );
    let o = lab(&[
        "check-gradients",
        "--config",
        &apart,
        "--out",
        d,
        "--mode",
        "paper",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("coincide"), "{}", stdout(&o));
}

#[test]
fn random_initial_data_follows_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        r#"{
          "system": {"kind": "limit", "lambda": 2.0, "rays": 2, "j_min": -1, "j_max": 2, "mode": "paper_literal"},
          "initial_data": {"kind": "random", "a": [1.0, 0.0], "amplitude": 0.3},
          "integrator": {"scheme": "rk4", "dt": 0.01, "t_end": 0.1},
          "observables": {"every": 10}
        }"#,
    );
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = lab(&[
            "simulate-limit",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("run.json")).unwrap()
    };
    let (a, b, c) = (run("7", "a"), run("7", "b"), run("8", "c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(String::from_utf8(a).unwrap().contains("paper_literal"));
}

#[test]
fn fock_gaussian_ansatz_conserves_mass() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "f.json",
        r#"{
          "system": {"kind": "fock", "n": 32},
          "initial_data": {"kind": "gaussian", "a": [0.8, 0.0], "amplitude": [0.5, 0.1],
                           "center": 2.0, "width": 0.5, "ansatz_lambda": 8},
          "integrator": {"scheme": "implicit_midpoint", "dt": 0.01, "t_end": 0.2},
          "observables": {"every": 5}
        }"#,
    );
    let out = dir.path().join("o");
    let o = lab(&[
        "simulate-fock",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv_rows(&out.join("run.csv"));
    let m: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(m.iter().all(|v| (v - m[0]).abs() < 1e-12));
    assert!(rows.iter().all(|r| !r[8].is_empty()));
}

#[test]
fn describe_lists_parameters() {
    let o = lab(&["describe"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for needle in [
        "N = 64",
        "R = 4 rays",
        "w = s ln2 / R",
        "shells j in [-2, 10]",
        "eps = ",
        "lambda = ",
        "K = 0.7916",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
    let o = lab(&["describe", "shell", "--mode", "paper"]);
    assert!(stdout(&o).contains("paper_literal") && !stdout(&o).contains("limit system"));

    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", SHELL);
    let o = lab(&["describe", "--config", &cfg]);
    assert!(stdout(&o).contains("shells j in [-2, 5]"));
    let o = lab(&["describe", "fock", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}
