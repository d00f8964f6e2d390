use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fisher-bohm"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn small_gaussians() -> Value {
    json!({
        "states": [
            {"id": "a", "family": "gaussian", "sigma": 1.0},
            {"id": "b", "family": "chirped_gaussian", "alpha": 0.5}
        ],
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 2048},
        "crlb": {"n_samples": 20, "n_trials": 1000, "seed": 5}
    })
}

#[test]
fn verify_golden_config_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("golden");
    let cfg = configs().join("golden.json");
    let o = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("bounds.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "state_id,var_x,var_p_spectral,var_p_bohm,var_pq,cov_x_pq,fisher_I,mean_Q,\
         bound_heisenberg,bound_rs,bound_cr,product,delta,residual_var_identity,\
         residual_cov_identity,masked_fraction,chain_ok"
    );
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));
    assert!(out.join("results.json").exists());
    assert!(out.join("fields_gaussian.csv").exists());
}

#[test]
fn identical_config_and_seed_give_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_gaussians());
    let outs: Vec<PathBuf> = (0..2).map(|k| dir.path().join(format!("run{k}"))).collect();
    for o in &outs {
        let r = run(&[
            "verify",
            "--config",
            &cfg,
            "--out",
            o.to_str().unwrap(),
            "--seed",
            "9",
        ]);
        assert_eq!(code(&r), 0);
    }
    let a = fs::read(outs[0].join("bounds.csv")).unwrap();
    let b = fs::read(outs[1].join("bounds.csv")).unwrap();
    assert_eq!(a, b);
    let ja: Value =
        serde_json::from_slice(&fs::read(outs[0].join("results.json")).unwrap()).unwrap();
    let jb: Value =
        serde_json::from_slice(&fs::read(outs[1].join("results.json")).unwrap()).unwrap();
    assert_eq!(ja["records"], jb["records"]);
}

#[test]
fn seed_flag_changes_the_monte_carlo_stream() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_gaussians());
    let ratio = |seed: &str| -> f64 {
        let out = dir.path().join(format!("s{seed}"));
        let r = run(&[
            "verify",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(code(&r), 0);
        let v: Value =
            serde_json::from_slice(&fs::read(out.join("results.json")).unwrap()).unwrap();
        v["records"][0]["crlb"]["outcome"]["ratio"]
            .as_f64()
            .unwrap()
    };
    assert_ne!(ratio("1"), ratio("2"));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let missing = dir.path().join("nope.json");
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            out
        ])),
        2
    );

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"states\": [").unwrap();
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            bad.to_str().unwrap(),
            "--out",
            out
        ])),
        2
    );

    let mut v = small_gaussians();
    v["states"] = json!([]);
    let empty = write_config(dir.path(), "empty.json", &v);
    let o = run(&["verify", "--config", &empty, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least one state"));

    // unknown subcommand and missing required flags are usage errors
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["evolve", "--config", &empty])), 2);

    // evolve needs a dynamics section
    let ok = write_config(dir.path(), "ok.json", &small_gaussians());
    let o = run(&["evolve", "--config", &ok, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dynamics"));
}

#[test]
fn uncovered_state_exits_3_and_others_complete() {
    let dir = TempDir::new().unwrap();
    let mut v = small_gaussians();
    v["states"]
        .as_array_mut()
        .unwrap()
        .push(json!({"id": "wide", "family": "gaussian", "sigma": 6.0}));
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("o");
    let o = run(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let mut rdr = csv::Reader::from_path(out.join("bounds.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[0][16], "true");
    assert_eq!(&rows[2][0], "wide");
    assert_eq!(&rows[2][1], "");
}

#[test]
fn identity_violation_exits_1() {
    // an absurdly strict identity tolerance turns discretization error into a
    // reported violation
    let dir = TempDir::new().unwrap();
    let mut v = small_gaussians();
    v["tolerances"] = json!({"tol_identity": 1e-300});
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("o");
    let o = run(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("VIOLATED"));
}

#[test]
fn evolve_writes_time_series() {
    let dir = TempDir::new().unwrap();
    let v = json!({
        "states": [{"id": "free", "family": "gaussian"}],
        "grid": {"x_min": -25.0, "x_max": 25.0, "n_points": 2048},
        "dynamics": {"potential": {"kind": "free"}, "dt": 0.002, "t_final": 0.5, "snapshot_stride": 25},
        "trajectories": {"n_particles": 1000, "seed": 2}
    });
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("o");
    let o = run(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(out.join("time_series.csv")).unwrap();
    assert_eq!(&rdr.headers().unwrap()[1], "t");
    assert_eq!(rdr.records().count(), 11);
    let res: Value = serde_json::from_slice(&fs::read(out.join("results.json")).unwrap()).unwrap();
    let traj = &res["records"][0]["dynamics"]["trajectories"];
    assert_eq!(traj["order_preserved"], json!(true));
}

#[test]
fn leaking_evolution_exits_3() {
    let dir = TempDir::new().unwrap();
    let v = json!({
        "states": [{"id": "fast", "family": "gaussian", "p0": 5.0}],
        "grid": {"x_min": -10.0, "x_max": 10.0, "n_points": 1024},
        "dynamics": {"potential": {"kind": "free"}, "dt": 0.005, "t_final": 3.0}
    });
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("o");
    let o = run(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("leakage"));
}

#[test]
fn sigma_sweep_writes_bounds_vs_param() {
    let dir = TempDir::new().unwrap();
    let v = json!({
        "states": [{"id": "g", "family": "gaussian"}],
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 4096}
    });
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("o");
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "states.sigma",
        "--values",
        "0.5,1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(out.join("bounds_vs_param.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let product = h.iter().position(|c| c == "product").unwrap();
    let value = h.iter().position(|c| c == "value").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, sigma) in rows.iter().zip(["0.5", "1", "2"]) {
        assert_eq!(&row[value], sigma);
        let p: f64 = row[product].parse().unwrap();
        assert!((p - 0.25).abs() < 1e-8, "{p}");
    }
    let sweep: Value = serde_json::from_slice(&fs::read(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(sweep["runs"].as_array().unwrap().len(), 3);

    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "states.sigma",
        "--values",
        "1,-1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}
