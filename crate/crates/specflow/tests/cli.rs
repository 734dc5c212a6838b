use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use specflow::config::{Experiment, ExperimentConfig};
use specflow::error::RunError;
use specflow::forms_json::FormJson;
use specflow_core::forms::{IndexSet, Momentum, TrigPolyForm};
use specflow_core::linalg::CMat;
use specflow_core::C64;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_specflow"));
    c.env_remove("SPECFLOW_OUT");
    c
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    fs::write(&p, text).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn shipped_configs_match_builtin_defaults() {
    for e in Experiment::ALL {
        let cfg = ExperimentConfig::load(&configs_dir().join(format!("{}.json", e.name()))).unwrap();
        assert_eq!(cfg, ExperimentConfig::default_for(e), "{}", e.name());
    }
}

#[test]
fn unknown_field_is_a_config_error() {
    let text = r#"{"experiment":"winding","name":"w","n":1,"cutoff":6,"intervals":8,"hol":[3.0],"winding":[1],"colour":1}"#;
    assert!(matches!(ExperimentConfig::parse(text), Err(RunError::Config(_))));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), text);
    let o = bin().args(["winding", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    assert!(!dir.path().join("winding").exists(), "nothing written before validation");
}

#[test]
fn invalid_values_are_rejected() {
    for text in [
        r#"{"experiment":"winding","name":"w","n":3,"cutoff":6,"intervals":8,"hol":[0,0,0],"winding":[1]}"#,
        r#"{"experiment":"winding","name":"w","n":1,"cutoff":6,"intervals":8,"hol":[0,0],"winding":[1]}"#,
        r#"{"experiment":"winding","name":"w","n":1,"cutoff":6,"intervals":0,"hol":[3],"winding":[1]}"#,
        r#"{"experiment":"contact-sweep","name":"c","n":3,"cutoff":8,"intervals":8,"hol":[0,0,0],"r_sweep":[4]}"#,
        r#"{"experiment":"heat-check","name":"h","n":3,"cutoff":8,"intervals":8,"hol":[0,0,0],"heat_times":[-1]}"#,
        r#"{"experiment":"winding","name":"w","n":1,"cutoff":6,"intervals":8,"hol":[3],"winding":[1],"estimator":{"R":0.5}}"#,
    ] {
        assert!(matches!(ExperimentConfig::parse(text), Err(RunError::Config(_))), "{text}");
    }
}

#[test]
fn forms_json_roundtrip() {
    let mut f = TrigPolyForm::zero(3, 2, 2);
    let m = CMat::from_fn(2, 2, |i, j| C64::new(i as f64 - 0.5 * j as f64, 0.25 * (i + j) as f64));
    f.insert(Momentum(vec![1, -2, 0]), IndexSet::from_indices(&[0, 2]).unwrap(), m.clone()).unwrap();
    f.insert(Momentum(vec![0, 0, 3]), IndexSet::from_indices(&[1, 2]).unwrap(), m.scale_real(-2.0)).unwrap();
    let json = serde_json::to_string(&FormJson::from_form(&f)).unwrap();
    let back: FormJson = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_form().unwrap(), f);
}

#[test]
fn malformed_forms_json_is_rejected() {
    for text in [
        r#"{"n":3,"degree":1,"fiber":1,"terms":[{"k":[1,0],"I":[0],"re":[[1]],"im":[[0]]}]}"#,
        r#"{"n":3,"degree":1,"fiber":1,"terms":[{"k":[1,0,0],"I":[0,1],"re":[[1]],"im":[[0]]}]}"#,
        r#"{"n":3,"degree":1,"fiber":1,"terms":[{"k":[1,0,0],"I":[0],"re":[[1,0]],"im":[[0]]}]}"#,
    ] {
        let f: FormJson = serde_json::from_str(text).unwrap();
        assert!(f.to_form().is_err(), "{text}");
    }
}

#[test]
fn winding_run_writes_outputs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = bin().args(["winding", "--threads", "1", "--out"]).arg(&out).output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out.join("winding")
    };
    let a = run("a");
    for f in ["summary.json", "resolved-config.json", "winding.csv", "wp_m3.csv", "wp_m-3.csv"] {
        assert!(a.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(a.join("winding.csv")).unwrap();
    assert!(csv.starts_with("# winding"));
    assert_eq!(csv.lines().nth(1), Some("m,f,prediction,estimate,n"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    let fs_: Vec<i64> = summary["rows"].as_array().unwrap().iter().map(|r| r["flow"]["f"].as_i64().unwrap()).collect();
    assert_eq!(fs_, vec![-3, -2, -1, 0, 1, 2, 3]);
    let b = run("b");
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
    assert_eq!(fs::read(a.join("wp_m2.csv")).unwrap(), fs::read(b.join("wp_m2.csv")).unwrap());
}

#[test]
fn output_root_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("env");
    let flag_out = dir.path().join("flag");
    let o = bin().arg("chs-check").env("SPECFLOW_OUT", &env_out).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_out.join("chs-check/summary.json").exists());
    let o = bin().arg("chs-check").arg("--out").arg(&flag_out).env("SPECFLOW_OUT", &env_out).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(flag_out.join("chs-check/checks.csv").exists());
}

#[test]
fn seed_flag_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["chs-check", "--seed", "99", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 0);
    let cfg = ExperimentConfig::load(&dir.path().join("chs-check/resolved-config.json")).unwrap();
    assert_eq!(cfg.seed, 99);
}

#[test]
fn assertion_failure_exits_two() {
    // No crossing below r = 2, so the growth slope is undefined.
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"experiment":"contact-sweep","name":"c","n":3,"cutoff":8,"intervals":8,"hol":[0.31,-0.17,0.05],"r_sweep":[0.5,1.0,1.5]}"#;
    let cfg = write_config(dir.path(), text);
    let o = bin().args(["contact-sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("slope undefined"));
    let summary = fs::read_to_string(dir.path().join("contact-sweep/summary.json")).unwrap();
    assert!(summary.contains("\"failures\""));
}

#[test]
fn oscillation_beyond_cutoff_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"experiment":"winding","name":"w","n":1,"cutoff":2,"intervals":8,"hol":[3.0],"winding":[1],
        "osc":{"n":1,"degree":1,"fiber":1,"terms":[
            {"k":[5],"I":[0],"re":[[0.1]],"im":[[0]]},{"k":[-5],"I":[0],"re":[[-0.1]],"im":[[0]]}]}}"#;
    let cfg = write_config(dir.path(), text);
    let o = bin().args(["winding", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mismatched_experiment_and_zero_threads_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["winding", "--config"]).arg(configs_dir().join("chs-check.json")).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 4);
    let o = bin().args(["chs-check", "--threads", "0", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn certificate_errors_map_to_exit_three() {
    let e: RunError = specflow_core::Error::CutoffUnstable { cutoff: 8, drift: 1e-3 }.into();
    assert_eq!(e.exit_code(), 3);
    let e: RunError = specflow_core::Error::EndpointZeroMode { s: 0.0, lambda: 0.0, gap: 1e-3 }.into();
    assert_eq!(e.exit_code(), 4);
}
