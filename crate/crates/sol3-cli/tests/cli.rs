//! End-to-end tests driving the compiled binary: output contracts,
//! determinism, exit codes, and the config file round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sol3"));
    // keep the environment from leaking into output-directory resolution
    c.env_remove("SOL3_OUT_DIR");
    c
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

#[test]
fn generate_is_deterministic_and_counts_match() {
    let run = || {
        bin()
            .args(["generate", "--family", "slant", "--theta", "pi/4", "--grid", "50x50"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical across runs");

    let text = stdout_of(&a);
    let verts = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces = text.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(verts, 2500);
    assert_eq!(faces, 49 * 49);
    for line in text.lines().filter(|l| l.starts_with("v ")) {
        for field in line.split_whitespace().skip(1) {
            let x: f64 = field.parse().unwrap();
            assert!(x.is_finite());
        }
    }
    for line in text.lines().filter(|l| l.starts_with("f ")) {
        for field in line.split_whitespace().skip(1) {
            let i: usize = field.parse().unwrap();
            assert!(i >= 1 && i <= verts, "face index {i} out of range");
        }
    }
}

#[test]
fn csv_format_has_documented_header() {
    let out = bin()
        .args(["generate", "--family", "slant", "--grid", "5x5", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.lines().next().unwrap(), "u,v,x,y,z,theta,K,H");
    assert_eq!(text.lines().count(), 1 + 25);
    // theta column is constant pi/4 for the default slant surface
    for line in text.lines().skip(1) {
        let theta: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!((theta - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }
}

#[test]
fn cylinder_defaults_to_curve_output() {
    let out = bin()
        .args(["generate", "--family", "cylinder", "--grid", "9x2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("# sol3 curve"));
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 9);
    assert!(text.lines().last().unwrap().starts_with("l 1 2"));
}

#[test]
fn verify_passes_and_fails_with_documented_exit_codes() {
    let ok = bin()
        .args(["verify", "--family", "slant", "--theta", "pi/3"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout_of(&ok);
    assert!(text.contains("pass  normal angle matches expected"));
    assert!(text.trim_end().ends_with("result: pass"));

    let bad = bin()
        .args(["verify", "--family", "slant", "--theta", "pi/3", "--perturb-z", "0.01"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout_of(&bad);
    assert!(text.contains("FAIL  normal angle matches expected"));
    assert!(text.trim_end().ends_with("result: FAIL"));
}

#[test]
fn leaf_verifies_with_zero_residuals() {
    let out = bin()
        .args(["verify", "--family", "leaf", "--x0", "2", "--tol", "1e-12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for name in [
        "normal angle matches expected",
        "tangent projection of e1 has length sin(theta)",
        "tangent projection of e1 is principal",
        "gauss curvature matches expected",
        "mean curvature matches expected",
    ] {
        let line = stdout_of(&out)
            .lines()
            .find(|l| l.contains(name))
            .unwrap_or_else(|| panic!("missing check {name}"));
        assert!(line.starts_with("pass"), "{line}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let unknown_flag = bin()
        .args(["generate", "--family", "slant", "--no-such-flag"])
        .output()
        .unwrap();
    assert_eq!(unknown_flag.status.code(), Some(2));

    let missing_family = bin().args(["generate"]).output().unwrap();
    assert_eq!(missing_family.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_family.stderr).contains("family"));

    let bad_theta = bin()
        .args(["generate", "--family", "slant", "--theta", "2"])
        .output()
        .unwrap();
    assert_eq!(bad_theta.status.code(), Some(2));

    let bad_range = bin()
        .args(["generate", "--family", "slant", "--u-range", "3:1"])
        .output()
        .unwrap();
    assert_eq!(bad_range.status.code(), Some(2));

    let dir = tmp("bad-config");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "family = \"slant\"\nspeeed = 3\n").unwrap();
    let unknown_key = bin()
        .arg("verify")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(unknown_key.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown_key.stderr).contains("speeed"));
}

#[test]
fn config_file_round_trips_and_flags_override() {
    let dir = tmp("round-trip");
    let first = dir.join("first.toml");
    let second = dir.join("second.toml");

    // emit a merged config, re-load it, emit again: fixed point after one step
    let out = bin()
        .args(["generate", "--family", "slant", "--theta", "pi/3", "--grid", "8x4"])
        .arg("--emit-config")
        .arg(&first)
        .output()
        .unwrap();
    assert!(out.status.success());
    let emitted = std::fs::read_to_string(&first).unwrap();
    let again = bin()
        .arg("generate")
        .arg("--config")
        .arg(&first)
        .arg("--emit-config")
        .arg(&second)
        .output()
        .unwrap();
    assert!(again.status.success());
    assert_eq!(emitted, std::fs::read_to_string(&second).unwrap());
    assert_eq!(out.stdout, again.stdout, "config reproduces the mesh");

    // a flag wins over the file value
    let override_run = bin()
        .arg("generate")
        .arg("--config")
        .arg(&first)
        .args(["--grid", "3x3", "--emit-config", "-", "--out", "-"])
        .output()
        .unwrap();
    assert!(override_run.status.success());
    assert!(stdout_of(&override_run).contains("grid = \"3x3\""));
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = tmp("env-out");
    let out = bin()
        .args(["generate", "--family", "slant", "--grid", "3x3", "--out", "mesh.obj"])
        .env("SOL3_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("mesh.obj")).unwrap();
    assert!(text.starts_with("# sol3 mesh family=slant"));
}

#[test]
fn euclidean_preview_writes_second_mesh() {
    let dir = tmp("preview");
    let out = bin()
        .args(["generate", "--family", "general", "--zeta", "0.3*v", "--grid", "6x6"])
        .args(["--format", "csv", "--euclidean-preview"])
        .arg("--out")
        .arg(dir.join("sweep.csv"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(std::fs::read_to_string(dir.join("sweep.csv"))
        .unwrap()
        .starts_with("u,v,x,y,z,theta,K,H"));
    let preview = std::fs::read_to_string(dir.join("sweep.csv.preview.obj")).unwrap();
    assert!(preview.starts_with("# sol3 mesh"));
    assert!(preview.lines().filter(|l| l.starts_with("v ")).count() == 36);
}

#[test]
fn figures_writes_catalogue_with_umbilical_metadata() {
    let dir = tmp("figures");
    let out = bin().arg("figures").arg("--out-dir").arg(&dir).output().unwrap();
    assert!(out.status.success());
    for tag in ["b", "c", "d", "e"] {
        for kind in ["curve", "mesh"] {
            let path = dir.join(format!("item_{tag}_{kind}.obj"));
            assert!(path.exists(), "missing {}", path.display());
        }
    }
    let manifest = std::fs::read_to_string(dir.join("figures.txt")).unwrap();
    let item_e = manifest.lines().find(|l| l.starts_with("item e")).unwrap();
    assert!(item_e.contains("umbilical"));
    assert!(item_e.contains("not geodesic"));

    // item b: the profile's height coordinate is sin(u) over [0, 4 pi]
    let curve = std::fs::read_to_string(dir.join("item_b_curve.obj")).unwrap();
    let heights: Vec<f64> = curve
        .lines()
        .filter(|l| l.starts_with("v "))
        .map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(heights.len(), 401);
    for (i, z) in heights.iter().enumerate() {
        let u = 4.0 * std::f64::consts::PI * i as f64 / 400.0;
        assert!((z - u.sin()).abs() < 1e-9, "z({u}) = {z}");
    }
}

#[test]
fn report_passes() {
    let out = bin().arg("report").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = stdout_of(&out);
    assert!(text.contains("ambient: group product is associative"));
    assert!(text.contains("minimality trichotomy"));
    assert!(text.trim_end().ends_with("result: pass"));
}
