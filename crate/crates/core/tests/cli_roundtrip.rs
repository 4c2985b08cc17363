//! End-to-end checks of the command line interface and its artifacts.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use mixedwave::analysis::study_smooth_h;
use mixedwave::cli::{cmd_run, CaseKind, RunConfig, StudyKind};

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mixedwave-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_config(out: PathBuf) -> RunConfig {
    RunConfig {
        case: CaseKind::Smooth,
        study: StudyKind::Single,
        levels: vec![4],
        n: 4,
        tau: 0.02,
        nsteps: 50,
        t_final: 1.0,
        tau_levels: vec![0.25],
        out,
        export_fields: true,
        energy_log: true,
        export_matrices: true,
        threads: 1,
        deep: false,
    }
}

#[test]
fn run_exports_fields_energy_and_matrices() {
    let out = out_dir("run");
    cmd_run(&run_config(out.clone())).unwrap();

    // VTK with one cell per triangle (n = 4 gives 96 cells).
    let fields = fs::read_to_string(out.join("fields.vtk")).unwrap();
    assert!(fields.contains("CELLS 96 384"));
    assert!(fields.contains("SCALARS pressure double 1"));
    assert!(fields.contains("VECTORS velocity double"));
    let ptilde = fs::read_to_string(out.join("ptilde.vtk")).unwrap();
    assert!(ptilde.contains("POINTS 288 double"));
    assert!(ptilde.contains("POINT_DATA 288"));

    // Energy log: constant column for f = g = 0; the smooth case also
    // carries projected error columns.
    let energy = fs::read_to_string(out.join("energy.csv")).unwrap();
    let mut lines = energy.lines();
    assert_eq!(lines.next().unwrap(), "step,time,energy,err_u,err_p");
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 51);
    let e0 = values[0];
    for e in &values {
        assert!(((e - e0) / e0).abs() < 1e-9, "energy drifted: {e} vs {e0}");
    }

    // Matrix dumps in "row col value" format.
    for name in ["ma.coo.txt", "mb.coo.txt", "d.coo.txt"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(!text.is_empty());
        for line in text.lines().take(5) {
            assert_eq!(line.split_whitespace().count(), 3);
        }
    }
}

#[test]
fn binary_runs_tiny_convergence_study() {
    let out = out_dir("bin-conv");
    let status = Command::new(env!("CARGO_BIN_EXE_mixedwave"))
        .args([
            "convergence",
            "--case",
            "smooth",
            "--study",
            "h",
            "--levels",
            "1,2",
            "--tau",
            "0.25",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("table_smooth_h.csv")).unwrap();
    assert!(csv.starts_with("param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn binary_reports_config_errors_with_exit_code_two() {
    let output = Command::new(env!("CARGO_BIN_EXE_mixedwave"))
        .args(["run", "--tau=-1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("tau"), "stderr: {stderr}");

    // Unknown config key, via file.
    let out = out_dir("badcfg");
    let cfg = out.join("bad.txt");
    fs::write(&cfg, "frequency = 3\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mixedwave"))
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("frequency"), "stderr: {stderr}");
}

#[test]
fn binary_prints_mesh_info() {
    let out = out_dir("meshinfo");
    let vtk = out.join("mesh.vtk");
    let output = Command::new(env!("CARGO_BIN_EXE_mixedwave"))
        .args(["mesh-info", "--n", "1", "--refine", "1", "--vtk"])
        .arg(&vtk)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("24 triangles"), "stdout: {stdout}");
    assert!(vtk.exists());
}

#[test]
fn coarse_table_is_insensitive_to_halving_tau() {
    // With tau far below the spatial error the leading digits of the table
    // must not depend on the time step.
    let a = study_smooth_h(&[4], 0.004, 1).unwrap();
    let b = study_smooth_h(&[4], 0.002, 1).unwrap();
    for (x, y) in [
        (a.err_u[0], b.err_u[0]),
        (a.err_p[0], b.err_p[0]),
        (a.err_pt[0], b.err_pt[0]),
    ] {
        let rel = (x - y).abs() / x;
        assert!(
            rel < 5e-4,
            "three-significant-digit agreement violated: {x} vs {y}"
        );
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_mixedwave"))
        .args(["run", "--config", "/nonexistent/path.cfg"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
