//! The `ans2d` binary: exit codes, artifacts and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aniso_ns::io::manifest::RunManifest;
use aniso_ns::io::snapshot::read_snapshot;
use aniso_ns::io::{parse_config, Config};

const SMALL: &str = "\
grid.n = 16
time.t_end = 0.05
time.dt = 0.005
det.snapshot_every = 5
sde.galerkin_n = 16
ensemble.paths = 6
ensemble.levels = 8, 16
verify.samples = 20
oracle.fields = 5
";

fn ans2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ans2d")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, cfg: &str, cmd: &str, extra: &[&str]) -> Output {
    let cfg_path = dir.join("run.cfg");
    fs::write(&cfg_path, cfg).unwrap();
    let out = dir.join("out");
    let mut args = vec![cmd, "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ans2d(&args)
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn usage_errors_exit_two() {
    let o = ans2d(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("Usage"));
    assert_eq!(ans2d(&[]).status.code(), Some(2));
    assert_eq!(ans2d(&["verify", "--seed", "abc"]).status.code(), Some(2));
    assert_eq!(ans2d(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "time.dt = -1\n", "run-det", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("error[config]") && text(&o).contains("time.dt"), "{}", text(&o));
    let o = run_in(dir.path(), "grid.n3 = 4\n", "run-det", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("grid.n3"));
}

#[test]
fn oracle_check_prints_the_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "grid.n = 8\n", "oracle-check", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let line = String::from_utf8_lossy(&o.stdout).lines().find(|l| l.starts_with("max relative deviation")).unwrap().to_owned();
    let dev: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(dev <= 1e-12);
}

#[test]
fn verify_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "", "verify", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(!text(&o).contains("FAIL"));
    let m = RunManifest::read(dir.path().join("out/manifest.json")).unwrap();
    assert!(m.all_passed() && m.verdicts.len() > 10);
}

#[test]
fn manifest_lists_every_file_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), SMALL, "run-det", &["--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let out = dir.path().join("out");
    let m = RunManifest::read(out.join("manifest.json")).unwrap();
    let mut listed: Vec<String> = m.outputs.clone();
    listed.sort();
    let mut found = Vec::new();
    for e in fs::read_dir(&out).unwrap() {
        let e = e.unwrap();
        let name = e.file_name().to_string_lossy().into_owned();
        if e.path().is_dir() {
            for s in fs::read_dir(e.path()).unwrap() {
                found.push(format!("{name}/{}", s.unwrap().file_name().to_string_lossy()));
            }
        } else if name != "manifest.json" {
            found.push(name);
        }
    }
    found.sort();
    assert_eq!(listed, found);
    for f in &m.outputs {
        if f.ends_with(".ans2") {
            read_snapshot(out.join(f)).unwrap();
        } else {
            aniso_ns::io::csv::read_table(out.join(f)).unwrap();
        }
    }
    let echoed = parse_config(&m.config).unwrap();
    assert_eq!(echoed.run_seed, 5);
    assert_eq!(echoed.grid_n1, 16);
    assert_eq!(parse_config(&echoed.echo()).unwrap(), echoed);
    assert!(m.verdicts.iter().all(|v| v.passed));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["run-sde", "ensemble"] {
        let oa = run_in(a.path(), SMALL, cmd, &["--seed", "3"]);
        let ob = run_in(b.path(), SMALL, cmd, &["--seed", "3"]);
        assert_eq!(oa.status.code(), Some(0), "{}", text(&oa));
        assert_eq!(ob.status.code(), Some(0));
        let m = RunManifest::read(a.path().join("out/manifest.json")).unwrap();
        for f in &m.outputs {
            let x = fs::read(a.path().join("out").join(f)).unwrap();
            let y = fs::read(b.path().join("out").join(f)).unwrap();
            assert!(x == y, "{cmd}: {f} differs");
        }
    }
    let oc = run_in(b.path(), SMALL, "run-sde", &["--seed", "4"]);
    assert_eq!(oc.status.code(), Some(0));
    let x = fs::read(a.path().join("out/sde_diagnostics.csv")).unwrap();
    let y = fs::read(b.path().join("out/sde_diagnostics.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn gate_violation_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}noise.c = 0.45\nnoise.b =\n");
    let o = run_in(dir.path(), &cfg, "run-sde", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("error[gate]"));
    let o = run_in(dir.path(), &cfg, "run-sde", &["--force"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let m = RunManifest::read(dir.path().join("out/manifest.json")).unwrap();
    assert!(m.force && m.warnings.iter().any(|w| w.contains("gate")));
}

#[test]
fn blow_up_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "grid.n = 16\ninit.amplitude = 1e9\ntime.dt = 0.1\n", "run-det", &[]);
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    assert!(text(&o).contains("error[blow-up]"));
}

#[test]
fn uniqueness_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), SMALL, "uniqueness", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("PASS det_uniqueness") && text(&o).contains("PASS pathwise_uniqueness"));
    let out = dir.path().join("out");
    let input = out.join("uniqueness_det.csv");
    let o = ans2d(&["plot-data", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let long = fs::read_to_string(out.join("plot_uniqueness_det.csv")).unwrap();
    assert!(long.starts_with("series,t,value\n"));
    // every non-abscissa column appears as a series
    for s in ["w_sq", "c_emp", "exponent"] {
        assert!(long.lines().any(|l| l.starts_with(&format!("{s},"))));
    }
    assert!(RunManifest::read(out.join("plot_manifest.json")).unwrap().outputs == ["plot_uniqueness_det.csv"]);
    assert!(RunManifest::read(out.join("manifest.json")).unwrap().command == "uniqueness");
}

#[test]
fn default_config_round_trips() {
    let c = Config::default();
    assert_eq!(parse_config(&c.echo()).unwrap(), c);
}
