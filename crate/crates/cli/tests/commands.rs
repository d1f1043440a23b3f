use std::path::Path;
use std::process::Command;

use swarmkit::classify::Macrostate;
use swarmkit::mill::SpeedTurnBox;
use swarmkit_cli::*;

const POLYGON: &str = "[params]\ngamma = 1.0\nv = 0.3\nomega = 1.0\nn = 6\nphi = \"critical\"\n\n[sim]\nhorizon = 80.0\nseed = 3\n\n[init]\nkind = \"polygon\"\n";

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn simulate(cfg: &Path, out: &Path) -> (swarmkit::RunOutcome, String) {
    let mut buf = Vec::new();
    let o = cmd_simulate(
        &SimulateArgs {
            config: cfg,
            out,
            metrics: None,
            echo_config: None,
        },
        &mut buf,
    )
    .unwrap();
    (o, String::from_utf8(buf).unwrap())
}

#[test]
fn polygon_config_mills_and_classify_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", POLYGON);
    let traj = dir.path().join("run.traj");
    let (o, text) = simulate(&cfg, &traj);
    assert_eq!(o.label, Macrostate::M);
    assert!(text.starts_with("label = M\n"), "{text}");

    let mut buf = Vec::new();
    let again = cmd_classify(&traj, None, &mut buf).unwrap();
    assert_eq!(again.label, o.label);
    assert_eq!(String::from_utf8(buf).unwrap(), text);
    assert!(default_metrics_path(&traj).exists());
}

#[test]
fn repeated_simulation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", &POLYGON.replace("\"polygon\"", "\"random_connected\""));
    let (a, b) = (dir.path().join("a.traj"), dir.path().join("b.traj"));
    simulate(&cfg, &a);
    simulate(&cfg, &b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", POLYGON);
    let echo = dir.path().join("effective.toml");
    let mut sink = Vec::new();
    cmd_simulate(
        &SimulateArgs {
            config: &cfg,
            out: &dir.path().join("a.traj"),
            metrics: None,
            echo_config: Some(&echo),
        },
        &mut sink,
    )
    .unwrap();
    simulate(&echo, &dir.path().join("b.traj"));
    assert_eq!(
        std::fs::read(dir.path().join("a.traj")).unwrap(),
        std::fs::read(dir.path().join("b.traj")).unwrap()
    );
}

#[test]
fn truncated_trajectory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", POLYGON);
    let traj = dir.path().join("run.traj");
    simulate(&cfg, &traj);
    let text = std::fs::read_to_string(&traj).unwrap();
    let cut = write(dir.path(), "cut.traj", &text[..text.len() / 2]);
    let e = cmd_classify(&cut, None, &mut Vec::new()).unwrap_err();
    assert_eq!(error_kind(&e), "trajectory_format");
}

#[test]
fn predict_hexagon() {
    let mut buf = Vec::new();
    cmd_predict(
        &PredictArgs {
            gamma: 1.0,
            n: 6,
            ..Default::default()
        },
        &mut buf,
    )
    .unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("R_m = 1.0\n"));
}

#[test]
fn deploy_rows_round_trip_through_predict() {
    let mut buf = Vec::new();
    cmd_deploy(
        &DeployArgs {
            r_star: 3.0,
            n_min: 3,
            n_max: 12,
            k: 4,
            seed: 9,
            bounds: SpeedTurnBox::default(),
        },
        &mut buf,
    )
    .unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 40);
    for row in rows {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        let mut out = Vec::new();
        cmd_predict(
            &PredictArgs {
                gamma: f[3],
                n: f[0] as usize,
                v: Some(f[1]),
                omega: Some(f[2]),
                phi: Some(f[4]),
            },
            &mut out,
        )
        .unwrap();
        let report = String::from_utf8(out).unwrap();
        assert!(report.contains("in_pstar = true"), "{row}\n{report}");
        let rm: f64 = report.lines().find_map(|l| l.strip_prefix("R_m_exact = ")).unwrap().parse().unwrap();
        assert!((rm - 3.0).abs() < 1e-12);
    }
}

#[test]
fn sweep_writes_diagram_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "sweep.toml",
        "trials_per_cell = 1\ninit = \"polygon\"\n[x]\nparam = \"n\"\nvalues = [3, 4, 6]\n[fixed]\ngamma = 1\nv = 0.3\nomega = 1\nn = 3\nphi = \"critical\"\n[sim]\nhorizon = 40\nper_omega = true\nsamples = 80\n",
    );
    let out = dir.path().join("out");
    let d = cmd_sweep(&spec, &out, Some(1), &mut Vec::new()).unwrap();
    assert!(d.cells.iter().all(|c| c.label == Some(Macrostate::M)));
    let csv = std::fs::read_to_string(out.join("phase.csv")).unwrap();
    assert!(csv.starts_with("# swarmkit-phase-diagram v1\nix,iy,"));
    assert_eq!(csv.lines().count(), 2 + 3);
    let radius = std::fs::read_to_string(out.join("radius.csv")).unwrap();
    assert_eq!(radius.lines().count(), 2 + 3);
    assert!(std::fs::read_to_string(out.join("phase.svg")).unwrap().contains("failed run"));
    assert_eq!(
        swarmkit::io::load_sweep(&out.join("spec.toml")).unwrap(),
        swarmkit::io::load_sweep(&spec).unwrap()
    );
}

#[test]
fn replay_writes_frames() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", POLYGON);
    let traj = dir.path().join("run.traj");
    simulate(&cfg, &traj);
    let frames = cmd_replay(&traj, &dir.path().join("frames"), 4, &mut Vec::new()).unwrap();
    assert_eq!(frames.len(), 4);
    assert!(std::fs::read_to_string(&frames[0]).unwrap().starts_with("<svg"));
}

#[test]
fn binary_reports_one_line_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &POLYGON.replace("omega = 1.0", "omega = 0"));
    let out = Command::new(env!("CARGO_BIN_EXE_swarmkit"))
        .args(["simulate", cfg.to_str().unwrap(), "-o", dir.path().join("x").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error kind=config ") && err.contains("params.omega"), "{err}");

    let ok = Command::new(env!("CARGO_BIN_EXE_swarmkit"))
        .args(["predict", "--gamma", "1", "-n", "6"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().starts_with("R_m = 1.0"));
}
