use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cgx::cli::{RunConfig, Overrides};
use cgx::verify::catalog;
use serde_json::Value;

fn cgx(args: &[&str]) -> Output {
    cgx_env(args, &[])
}

fn cgx_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cgx"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Report lines with wall times and runtimes removed.
fn stable(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v["wall_time"] = Value::Null;
            for r in v["records"].as_array_mut().unwrap() {
                r["runtime_ms"] = Value::Null;
            }
            v
        })
        .collect()
}

#[test]
fn help_lists_the_subcommands() {
    let o = cgx(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["eval", "position", "verify"] {
        assert!(text.contains(sub), "{text}");
    }
}

#[test]
fn list_covers_the_catalog() {
    let o = cgx(&["verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for info in catalog() {
        assert!(text.lines().any(|l| l.starts_with(info.id)), "{} missing", info.id);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(cgx(&[]).status.code(), Some(2));
    assert_eq!(cgx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cgx(&["verify", "no_such_check"]).status.code(), Some(2));
    assert_eq!(cgx(&["eval", "--body", "ball", "--quantity", "volume"]).status.code(), Some(2));
    assert_eq!(cgx(&["eval", "--body", "/no/such/file.json", "--quantity", "volume"]).status.code(), Some(2));
    assert_eq!(cgx(&["eval", "--body", "ball", "--dim", "3", "--quantity", "volume"]).status.code(), Some(0));
    assert_eq!(cgx(&["--samples", "4096", "verify", "santalo", "--n", "3"]).status.code(), Some(0));
    // a window no estimate can satisfy
    let cfg = scratch("impossible.toml");
    std::fs::write(&cfg, "samples = 4096\n[windows]\n\"santalo.product_root\" = [10.0, 20.0]\n").unwrap();
    let o = cgx(&["--config", cfg.to_str().unwrap(), "verify", "santalo", "--n", "3", "--set", "k=ball"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn malformed_body_files_report_where() {
    let path = scratch("bad_body.json");
    std::fs::write(&path, r#"{"type": "cube", "dim": 3, "half_side": -1}"#).unwrap();
    let o = cgx(&["eval", "--body", path.to_str().unwrap(), "--quantity", "volume"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn eval_prints_closed_forms() {
    let o = cgx(&["--json", "eval", "--body", "ball", "--dim", "3", "--quantity", "volume"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got = v["records"][0]["estimate"]["value"].as_f64().unwrap();
    assert!((got - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
}

#[test]
fn out_writes_jsonl_and_csv() {
    let out = scratch("santalo.jsonl");
    let _ = std::fs::remove_file(&out);
    let o = cgx(&["--samples", "4096", "--out", out.to_str().unwrap(), "verify", "santalo"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = std::fs::read_to_string(&out).unwrap();
    let reports = stable(&lines);
    assert!(!reports.is_empty());
    for r in &reports {
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["records"][0]["check_id"], "santalo");
    }
    let mut csv = csv::Reader::from_path(out.with_extension("csv")).unwrap();
    let headers = csv.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["check_id", "case", "verdict", "name", "value", "lower", "upper", "runtime_ms"]);
    assert!(csv.records().count() >= reports.len());
}

#[test]
fn flags_override_files_override_defaults() {
    let toml = scratch("run.toml");
    std::fs::write(&toml, "seed = 7\nsamples = 1000\n[t2]\n\"4\" = 2.5\n").unwrap();
    let json = scratch("run.json");
    std::fs::write(&json, r#"{"seed": 7, "samples": 1000}"#).unwrap();
    for file in [&toml, &json] {
        let cfg = RunConfig::resolve(Some(file), &Overrides::default()).unwrap();
        assert_eq!((cfg.seed, cfg.samples), (7, 1000));
        let cfg = RunConfig::resolve(Some(file), &Overrides { seed: Some(9), ..Overrides::default() }).unwrap();
        assert_eq!((cfg.seed, cfg.samples), (9, 1000));
    }
    let cfg = RunConfig::resolve(Some(&toml), &Overrides::default()).unwrap();
    assert_eq!(cfg.t2_reference(4.0), 2.5);
    assert_eq!(cfg.t2_reference(9.0), 3.0);
    let default = RunConfig::resolve(None, &Overrides::default()).unwrap();
    assert_eq!(default, RunConfig::default());
    // the output path does not change the hash
    let with_out = RunConfig { out: Some("x.jsonl".into()), ..RunConfig::default() };
    assert_eq!(with_out.hash(), default.hash());
}

#[test]
fn bad_config_files_are_usage_errors() {
    let path = scratch("typo.toml");
    std::fs::write(&path, "sed = 1\n").unwrap();
    assert!(RunConfig::resolve(Some(&path), &Overrides::default()).is_err());
    let o = cgx(&["--config", path.to_str().unwrap(), "verify", "--list"]);
    assert_eq!(o.status.code(), Some(2));
    let neg = RunConfig { tol: -1.0, ..RunConfig::default() };
    assert!(neg.validate().is_err());
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["--json", "--samples", "4096", "verify", "--suite", "smoke"];
    let one = cgx_env(&args, &[("CGX_THREADS", "1")]);
    let four = cgx_env(&args, &[("CGX_THREADS", "4")]);
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(four.status.code(), Some(0));
    assert_eq!(stable(&stdout(&one)), stable(&stdout(&four)));
}

#[test]
fn positions_print_unit_determinant_maps() {
    let o = cgx(&["--json", "position", "--body", "sheared_cube", "--dim", "3", "--kind", "john"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows: Vec<Vec<f64>> = serde_json::from_value(find_map(&v).expect("a map in the report")).unwrap();
    let m = nalgebra::DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    assert!((m.determinant() - 1.0).abs() < 1e-9);
}

fn find_map(v: &Value) -> Option<Value> {
    match v {
        Value::Object(o) => o.get("map").cloned().or_else(|| o.values().find_map(find_map)),
        Value::Array(a) => a.iter().find_map(find_map),
        _ => None,
    }
}
