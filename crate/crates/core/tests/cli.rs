use std::fs;
use std::path::Path;
use std::process::Command;

use cutlocus::cli::{run_sweep, RunConfig, EXIT_INVALID_INPUT, EXIT_NOT_CONVERGED, EXIT_OK};

fn torus_config(out: &Path, extra: &str) -> String {
    format!(
        r#"
m = [4.0, 8.0, 16.0, 32.0, 64.0]
lambda = [0.3, 0.6]
output = "{}"
seed = 11
{extra}

[domain]
kind = "flat_unit_torus"
grid = 32

[semiconcavity]
samples = 20
rho = 0.1
max_length = 0.5
"#,
        out.display()
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutlocus"))
}

#[test]
fn sweep_rows_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml(&torus_config(dir.path(), "gradient = true")).unwrap();
    let report = run_sweep(&cfg).unwrap();
    assert_eq!(report.rows.len(), 5 * (1 + 2));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 15);
    assert_eq!(lines[0], cutlocus::cli::SWEEP_HEADER);
    assert!(report.all_converged);
    for a in &report.artifacts {
        let p = dir.path().join(a);
        assert!(p.exists(), "{a} missing");
        if a.ends_with(".csv") && a.starts_with("fields") {
            let u = cutlocus::io::read_vertex_csv(&p).unwrap();
            assert_eq!(u.len(), report.vertices);
        }
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run_report.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 15);
    for s in &report.solves {
        let g = s.gradient.as_ref().unwrap();
        assert!(g.equivalence_gap <= 5e-3f64.max(3.0 / 32.0));
    }
}

#[test]
fn identical_runs_are_bit_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        run_sweep(&RunConfig::from_toml(&torus_config(dir.path(), "")).unwrap()).unwrap();
    }
    let read = |d: &tempfile::TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "sweep.csv"), read(&b, "sweep.csv"));
    assert_eq!(read(&a, "fields_02_m16.csv"), read(&b, "fields_02_m16.csv"));
}

#[test]
fn parallel_sweep_matches_sequential() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let seq = run_sweep(&RunConfig::from_toml(&torus_config(a.path(), "")).unwrap()).unwrap();
    let par = run_sweep(&RunConfig::from_toml(&torus_config(b.path(), "parallel = true")).unwrap()).unwrap();
    for (x, y) in seq.rows.iter().zip(&par.rows) {
        assert!((x.sup_gap - y.sup_gap).abs() < 1e-7);
        assert_eq!(x.hausdorff_sym.is_some(), y.hausdorff_sym.is_some());
    }
}

#[test]
fn disk_sweep_gap_scales_like_two_over_m() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "m = [8.0, 16.0, 32.0, 64.0]\noutput = \"{}\"\nwrite_fields = false\n\n[domain]\nkind = \"disk\"\nradius = 1.0\nh = 0.04\n",
        dir.path().display()
    );
    let report = run_sweep(&RunConfig::from_toml(&text).unwrap()).unwrap();
    for r in &report.rows {
        let scaled = r.sup_gap * r.m;
        assert!((1.8..=2.2).contains(&scaled), "m = {}: {scaled}", r.m);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(&cfg_path, torus_config(&dir.path().join("ok"), "write_fields = false")).unwrap();
    let ok = bin().args(["sweep", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(
        ok.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&ok.stdout).lines().count(), 1);

    let starved = torus_config(
        &dir.path().join("starved"),
        "write_fields = false\n[obstacle_solver]\nmax_iter = 1\nactive_set = false",
    );
    fs::write(&cfg_path, starved).unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_NOT_CONVERGED));
    // the partial table is kept
    assert!(dir.path().join("starved/sweep.csv").exists());

    fs::write(&cfg_path, "m = [8.0, 4.0]\n[domain]\nkind = \"flat_unit_torus\"\n").unwrap();
    let bad = bin().args(["sweep", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INVALID_INPUT));
    let unknown = bin().arg("no-such-command").output().unwrap();
    assert_eq!(unknown.status.code(), Some(EXIT_INVALID_INPUT));
}

#[test]
fn command_line_overrides_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(&cfg_path, torus_config(&dir.path().join("a"), "write_fields = false")).unwrap();
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .args(["--m", "8,16", "--lambda", "0.3", "--output"])
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("b/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}

#[test]
fn subcommands_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = |name: &str| dir.path().join(name);
    let run = |args: &[&str], out: &Path| {
        let r = bin().args(args).arg("--output").arg(out).output().unwrap();
        assert_eq!(
            r.status.code(),
            Some(EXIT_OK),
            "{args:?}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        assert_eq!(String::from_utf8_lossy(&r.stdout).lines().count(), 1, "{args:?}");
    };
    run(
        &["mesh-info", "--surface", "unit_sphere", "--subdivisions", "3"],
        &o("info"),
    );
    run(
        &["distance", "--surface", "flat_unit_torus", "--grid", "32"],
        &o("dist"),
    );
    run(
        &[
            "solve-obstacle",
            "--surface",
            "unit_sphere",
            "--subdivisions",
            "3",
            "--m",
            "16",
        ],
        &o("obs"),
    );
    run(
        &[
            "solve-gradient",
            "--surface",
            "flat_unit_torus",
            "--grid",
            "16",
            "--m",
            "16",
        ],
        &o("grad"),
    );
    let field = o("obs").join("obstacle_u.csv");
    run(
        &[
            "extract",
            "--surface",
            "unit_sphere",
            "--subdivisions",
            "3",
            "--m",
            "16",
            "--lambda",
            "1",
            "--field",
            field.to_str().unwrap(),
        ],
        &o("ext"),
    );
    run(&["semiconcavity", "--samples", "20"], &o("semi"));
    run(&["revsurf", "--nt", "501", "--m", "10"], &o("rev"));
    run(&["euclid", "--shape", "disk", "--h", "0.1", "--m", "8"], &o("euclid"));
    for d in ["info", "dist", "obs", "grad", "ext", "semi", "rev", "euclid"] {
        assert!(fs::read_dir(o(d)).unwrap().count() > 0, "{d} wrote nothing");
    }
}
