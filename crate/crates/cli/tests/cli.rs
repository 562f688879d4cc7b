use std::path::Path;
use std::process::{Command, Output};

use enwidth_cli::manifest::{sha256_hex, RunManifest};

fn enwidth(args: &[&str], env_out: Option<&Path>, cwd: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_enwidth"));
    cmd.args(args).current_dir(cwd).env_remove(enwidth_cli::OUT_DIR_ENV);
    if let Some(dir) = env_out {
        cmd.env(enwidth_cli::OUT_DIR_ENV, dir);
    }
    cmd.output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let i = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = enwidth(&["spin-sigma", "--bogus"], None, dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_viscosity_inputs_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = enwidth(&["--out", "o", "viscosity-fit"], None, dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_sector_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = enwidth(&["--out", "o", "spin-sigma", "--n", "4", "--stot", "3"], None, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn bad_dataset_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "liquid,T_K,eta_Pa_s\na,900,-1\n").unwrap();
    std::fs::write(dir.path().join("m.csv"), "liquid,T_liquidus_K,eta_liquidus_Pa_s\na,1000,1\n").unwrap();
    let out = enwidth(&["--out", "o", "collapse", "--data", "d.csv", "--meta", "m.csv"], None, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn output_directory_falls_back_to_environment_then_default() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    assert!(enwidth(&["moment-compare"], Some(&env_dir), dir.path()).status.success());
    assert!(env_dir.join("moment-compare.csv").exists());
    assert!(enwidth(&["moment-compare"], None, dir.path()).status.success());
    assert!(dir.path().join(enwidth_cli::DEFAULT_OUT_DIR).join("moment-compare.csv").exists());
    let flag_dir = dir.path().join("from-flag");
    assert!(enwidth(&["--out", flag_dir.to_str().unwrap(), "moment-compare"], Some(&env_dir), dir.path())
        .status
        .success());
    assert!(flag_dir.join("moment-compare.manifest.json").exists());
}

#[test]
fn spin_sigma_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--out", "o", "spin-sigma", "--n", "4", "--stot", "2", "--m", "0", "--bz", "1", "--theta", "1.5707963"];
    assert!(enwidth(&args, None, dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/spin-sigma.csv")).unwrap();
    let sigma: f64 = column(&csv, "sigma")[0].parse().unwrap();
    assert!((sigma - 0.433013).abs() < 1e-6, "{sigma}");
}

#[test]
fn multiplicity_table_for_four_sites() {
    let dir = tempfile::tempdir().unwrap();
    assert!(enwidth(&["--out", "o", "multiplicity", "--n", "4"], None, dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/multiplicity.csv")).unwrap();
    assert_eq!(column(&csv, "stot"), ["2.0", "1.0", "0.0"]);
    assert_eq!(column(&csv, "multiplicity"), ["1", "3", "2"]);
}

#[test]
fn viscosity_fit_on_shipped_fixture_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (data, meta) = (fixture("synth.csv"), fixture("synth_meta.csv"));
    let out = enwidth(&["--out", "o", "viscosity-fit", "--data", &data, "--meta", &meta], None, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("o/viscosity-fit.csv")).unwrap();
    let abar: Vec<f64> = column(&csv, "abar").iter().map(|s| s.parse().unwrap()).collect();
    for (got, (_, want, _, _)) in abar.iter().zip(enwidth_cli::fixtures::FIXTURE_LIQUIDS) {
        assert!((got - want).abs() / want < 1e-6);
    }
    let manifest: RunManifest =
        serde_json::from_slice(&std::fs::read(dir.path().join("o/viscosity-fit.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.outputs, ["viscosity-fit.csv", "viscosity-fit.json"]);
    assert_eq!(manifest.input_digests[&data], sha256_hex(&std::fs::read(&data).unwrap()));
    assert!(!manifest.selftest);
}

#[test]
fn selftest_writes_a_status_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = enwidth(&["--selftest", "--out", "o", "smear-planck"], None, dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/smear-planck.selftest.csv")).unwrap();
    assert!(column(&csv, "status").iter().all(|s| s == "PASS"));
}
