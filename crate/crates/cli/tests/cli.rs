use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn east(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_east"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let p = dir.join("run.toml");
        fs::write(&p, text).unwrap();
        cmd.arg("--config").arg(p);
    }
    cmd.output().unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/summary.json")).unwrap()).unwrap()
}

#[test]
fn too_many_particles_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "command = \"spectrum\"\n\n[geometry]\nparticles = 9\nsites = 6\n";
    let out = east(&["spectrum"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = east(&["spectrum"], Some("[geometry]\nparticels = 4\n"), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = east(&["quench"], Some("[geometry]\nparticles = 4\n\n[evolution]\nmethod = \"rk4\"\ndt = 0.5\n"), dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));
    let out = east(&["dw"], Some("command = \"spectrum\"\n"), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dense_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = east(&["spectrum"], Some("[geometry]\nparticles = 5\n[spectrum]\ndense_cap = 100\n"), dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = "[geometry]\nparticles = 5\n[entanglement]\ncuts = [5, 8]\n";
    assert!(east(&["entanglement-scan"], Some(cfg), a.path()).status.success());
    assert!(east(&["entanglement-scan", "--threads", "1"], Some(cfg), b.path()).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "scatter.csv"));
    for n in names {
        let x = fs::read(a.path().join("out").join(&n)).unwrap();
        let y = fs::read(b.path().join("out").join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
    }
}

#[test]
fn spectrum_zero_modes_meet_the_parity_bound_at_l19() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "command = \"spectrum\"\n[geometry]\nparticles = 7\n";
    let out = east(&["spectrum"], Some(cfg), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let zm = fs::read_to_string(dir.path().join("out/zero_modes.csv")).unwrap();
    let row: Vec<f64> = zm.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(row[0] >= row[1] && row[1] > 0.0, "{zm}");
    let s = summary(dir.path());
    assert_eq!(s["result"]["dimension"], 7752);
    assert!(dir.path().join("out/dos.csv").exists());
    assert!(dir.path().join("out/spacing.svg").exists());
}

#[test]
fn quench_revives() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[geometry]\nparticles = 5\n[evolution]\nt_max = 10.0\nsamples = 1000\n\
               [[quench.initial]]\nstate = \"1100100010100\"\n[[quench.initial]]\nstate = \"1011000010100\"\namplitude = -1.0\n";
    let out = east(&["quench"], Some(cfg), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    let w = s["result"]["fidelity_angular_frequency"].as_f64().unwrap();
    assert!((w - 2.0 * 2f64.sqrt()).abs() < 1e-3, "{w}");
    assert!(dir.path().join("out/fidelity.svg").exists());
}

#[test]
fn quench_rejects_states_outside_the_sector() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[geometry]\nparticles = 5\n[[quench.initial]]\nstate = \"0110100010100\"\n";
    let out = east(&["quench"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dw_sweep_writes_per_size_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[evolution]\nt_max = 50.0\nper_decade = 16\n[dw]\nparticles = [4, 5]\n";
    let out = east(&["dw"], Some(cfg), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for l in ["L10", "L13"] {
        for f in ["trace.csv", "exponent.csv", "saturation.csv", "density.svg"] {
            assert!(dir.path().join("out").join(l).join(f).exists(), "{l}/{f}");
        }
    }
    assert!(dir.path().join("out/last_site.csv").exists());
}

#[test]
fn automaton_and_fragmentation_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = east(&["automaton"], Some("[automaton]\nsites = 60\nparticles = 20\nlayers = 2000\npgm = true\n"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/map.pgm").exists());
    let out = east(&["fragmentation"], Some("[geometry]\nparticles = 5\n"), dir.path());
    assert!(out.status.success());
    let s = summary(dir.path());
    assert_eq!(s["result"]["sector_dimension"], 273);
}
