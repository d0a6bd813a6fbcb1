use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"{"d":1,"l":1,"L":3,"beta":1,"lambda":1,"seed":3,"seeds":[3,4],"buffer":2,
"etas":[0.2,0.1,0.05],"field":{"t1":1},"dt":0.01,"t_after":0.5,
"grids":{"xi_points":40,"xi_t_max":4,"ac_modes":3}}"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn ohmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ohmlab")).args(args).output().unwrap()
}

fn run_in(tmp: &TempDir, sub: &str, out: &str, extra: &[&str]) -> Output {
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join(out);
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ohmlab(&args)
}

#[test]
fn verify_subcommand_passes_and_writes_report() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(&tmp, "verify", "v", &["--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(tmp.path().join("v/verify_report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let map = report.as_object().unwrap();
    assert!(map.len() >= 25);
    assert!(map.values().all(|c| c["pass"] == true));
    assert!(String::from_utf8_lossy(&o.stdout).contains("green_kubo"));
}

#[test]
fn drive_outputs_follow_schema() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(&tmp, "drive", "d", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let energies = std::fs::read_to_string(tmp.path().join("d/energies.csv")).unwrap();
    let mut lines = energies.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(lines.next().unwrap(), "t,eta,S,P,Ip,Id,work");
    let currents = std::fs::read_to_string(tmp.path().join("d/currents.csv")).unwrap();
    assert_eq!(currents.lines().nth(1).unwrap(), "t,eta,Jp_1,Jd_1,Jlin_1");
    let atoms = std::fs::read_to_string(tmp.path().join("d/measure_atoms.csv")).unwrap();
    assert_eq!(atoms.lines().nth(1).unwrap(), "nu,M_11");
}

#[test]
fn serial_reruns_are_bitwise_identical() {
    let tmp = TempDir::new().unwrap();
    for out in ["a", "b"] {
        let o = run_in(&tmp, "transport", out, &["--threads", "1"]);
        assert!(o.status.success());
    }
    for f in ["xi_para.csv", "summary.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn explicit_stages_are_not_closed() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(&tmp, "joule", "j", &["--stages", "measure,joule,equilibrium"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("drive"));
}

#[test]
fn invalid_config_names_the_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"d":1,"l":5,"L":3,"beta":1,"lambda":0,"seed":1}"#);
    let o = ohmlab(&["equilibrium", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("L"));
}

#[test]
fn sweep_writes_one_directory_per_seed() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(&tmp, "sweep", "s", &["--stages", "equilibrium,measure", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read_to_string(tmp.path().join("s/seed_3/bundle.json")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("s/seed_4/bundle.json")).unwrap();
    assert_ne!(a, b);
}
