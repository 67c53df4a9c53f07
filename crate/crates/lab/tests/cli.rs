use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use perpetuity_lab::{Command as Cmd, RunConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_perpetuity-lab"))
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run_cli(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("--config")
        .arg(config)
        .arg("--output")
        .arg(out)
        .args(extra)
        .output()
        .expect("spawn cli")
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn csv_column(path: &Path, col: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == col).expect("column");
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn solve_kappa_writes_manifest_and_scalar_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(&repo().join("configs/solve-kappa-lognormal.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS kappa_expected")), "{stdout}");
    let k = csv_column(&dir.path().join("kappa.csv"), "kappa");
    assert!((k[0] - 1.0).abs() < 1e-10);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "solve-kappa");
    assert!(m["version"].is_string() && m["core_version"].is_string());
    assert!(m["timestamp"].is_u64());
    assert_eq!(m["config"]["command"], "solve-kappa");
    assert_eq!(m["tables"][0], "kappa.csv");
}

#[test]
fn counterexample_lower_bound_increases() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(&repo().join("configs/counterexample.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("counterexample.csv")).unwrap();
    assert!(text.starts_with("n,d_n,v_n,lower_bound,off_spike_value"));
    let v = csv_column(&dir.path().join("counterexample.csv"), "v_n");
    let n = csv_column(&dir.path().join("counterexample.csv"), "n");
    let tail: Vec<f64> = v.iter().zip(&n).filter(|(_, n)| **n >= 10.0).map(|(v, _)| *v).collect();
    assert!(tail.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn empty_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("empty.json", ""), ("braces.json", "{}")] {
        let cfg = write_config(dir.path(), name, body);
        let out = run_cli(&cfg, &dir.path().join("out"), &[]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("config_invalid"));
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_and_missing_fields_are_rejected() {
    let bad = [
        r#"{"command": "solve-kappa", "modle": {}}"#,
        r#"{"command": "solve-kappa"}"#,
        r#"{"command": "simulate", "model": {"kind": "catalog", "name": "case_ii_pareto"}}"#,
        r#"{"command": "doney-check", "model": {"kind": "catalog", "name": "no_such_model"}}"#,
        r#"{"command": "build-model", "model": {"kind": "base", "base": {"family": "normal", "mu": -1, "var": 2}}}"#,
        r#"{"command": "counterexample", "sim": {"n_paths": 10, "extra": 1}}"#,
    ];
    for b in bad {
        let r = RunConfig::from_json(b).and_then(|c| perpetuity_lab::execute(&c).map(|_| ()));
        let e = r.expect_err(b);
        assert_eq!(e.code(), "config_invalid", "{b}: {e}");
    }
}

#[test]
fn failed_check_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "wrong.json",
        r#"{"command": "solve-kappa",
            "model": {"kind": "base", "base": {"family": "normal", "mu": -1.0, "var": 2.0}},
            "checks": {"kappa_expected": 1.1}}"#,
    );
    let out = run_cli(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL kappa_expected"));
}

#[test]
fn module_errors_carry_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "srt.json",
        r#"{"command": "srt-check", "model": {"kind": "catalog", "name": "case_ii_pareto"}}"#,
    );
    let out = run_cli(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("case_mismatch"));
}

const SIMULATE: &str = r#"{
  "command": "simulate",
  "model": {"kind": "catalog", "name": "case_ii_pareto"},
  "blaw": {"kind": {"kind": "uniform_signed", "lo": -1.0, "hi": 2.0}, "nu": 2.0},
  "sim": {"seed": 1, "n_paths": 50000},
  "tail": {"dump_samples": true}
}"#;

fn tables(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.json", SIMULATE);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    run_cli(&cfg, &a, &["--threads", "1"]);
    run_cli(&cfg, &b, &["--threads", "3"]);
    run_cli(&cfg, &c, &["--threads", "1", "--seed", "99"]);
    let ta = tables(&a);
    assert_eq!(ta.len(), 2);
    assert_eq!(ta, tables(&b));
    assert_ne!(ta, tables(&c));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(c.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 99);
    assert_eq!(m["config"]["sim"]["seed"], 99);
    for (_, bytes) in &ta {
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(!text.contains("manifest") && text.lines().count() > 1);
    }
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for e in fs::read_dir(repo().join("configs")).unwrap() {
        let p = e.unwrap().path();
        RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn schema_matches_config_types() {
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(repo().join("schema/run-config.schema.json")).unwrap()).unwrap();
    let commands: Vec<&str> = schema["properties"]["command"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    use Cmd::*;
    let all = [
        SolveKappa,
        BuildModel,
        Simulate,
        TailTable,
        GoldieConstant,
        RenewalCheck,
        SrtCheck,
        ImplicitCheck,
        DoneyCheck,
        SubexpCheck,
        Counterexample,
    ];
    assert_eq!(commands, all.iter().map(|c| c.name()).collect::<Vec<_>>());
    // every serialized field of a default config is declared in the schema
    let cfg = serde_json::to_value(RunConfig::new(SolveKappa)).unwrap();
    let props = &schema["properties"];
    for (key, value) in cfg.as_object().unwrap() {
        assert!(props.get(key).is_some(), "top-level {key}");
        if let Some(obj) = value.as_object() {
            for sub in obj.keys() {
                assert!(props[key]["properties"].get(sub).is_some(), "{key}.{sub}");
            }
        }
    }
}
