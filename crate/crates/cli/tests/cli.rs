use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const KINDS: [&str; 9] = ["evolve", "davies-audit", "otto", "otto-optimize", "tricycle", "third-law-sweep", "floquet", "eth-check", "correlations"];

fn qthermo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qthermo")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_config(config: &Path, out: &Path) -> Output {
    qthermo(&["run", config.to_str().unwrap(), "--output-dir", out.to_str().unwrap()])
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

fn configs(group: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(group);
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

/// Each shipped config runs once: exit code by group, every pass config
/// certifies all checks, and every verdict follows from the stored value,
/// threshold and comparison alone.
#[test]
fn shipped_configs_honor_the_exit_code_contract() {
    let base = scratch("matrix");
    for (group, code) in [("pass", 0), ("law-failure", 2), ("config-error", 1)] {
        let files = configs(group);
        assert!(!files.is_empty(), "{group}");
        for f in files {
            let dir = base.join(f.file_stem().unwrap());
            let out = run_config(&f, &dir);
            assert_eq!(out.status.code(), Some(code), "{}: {}", f.display(), String::from_utf8_lossy(&out.stderr));
            if code == 1 {
                assert!(!dir.join("certificate.csv").exists(), "{}", f.display());
                continue;
            }
            let cert = fs::read_to_string(dir.join("certificate.csv")).unwrap();
            let mut lines = cert.lines();
            assert_eq!(lines.next(), Some("check,value,threshold,comparison,verdict"));
            let mut failures = 0;
            for row in lines {
                let c: Vec<&str> = row.split(',').collect();
                let (v, t): (f64, f64) = (c[1].parse().unwrap(), c[2].parse().unwrap());
                let ok = match c[3] {
                    "<=" => v <= t,
                    ">=" => v >= t,
                    other => panic!("comparison {other}"),
                };
                assert_eq!(c[4], if ok { "pass" } else { "fail" }, "{}: {row}", f.display());
                failures += usize::from(!ok);
            }
            assert_eq!(failures == 0, code == 0, "{}", f.display());
        }
    }
}

#[test]
fn corrupted_bath_makes_the_second_law_margin_negative() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/law-failure/evolve-corrupted-bath.json");
    let dir = scratch("corrupted");
    assert_eq!(run_config(&f, &dir).status.code(), Some(2));
    let cert = fs::read_to_string(dir.join("certificate.csv")).unwrap();
    let row = cert.lines().find(|l| l.starts_with("second_law_min_margin,")).unwrap();
    let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(v < 0.0 && row.ends_with(",fail"), "{row}");
}

#[test]
fn minimal_evolve_config_passes_and_writes_a_ledger() {
    let dir = scratch("minimal");
    let cfg = write_config(&dir, &format!(r#"{{"experiment": "evolve", "seed": 1, "output_dir": "{}"}}"#, dir.join("out").display()));
    let out = qthermo(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ledger = fs::read_to_string(dir.join("out/ledger.csv")).unwrap();
    assert!(ledger.starts_with("t,E,P,S_vn,sigma,J_b\n"));
    assert_eq!(ledger.lines().count(), 102);
}

#[test]
fn empty_and_malformed_configs_exit_with_one() {
    let dir = scratch("bad");
    for body in ["", "   \n", "{", r#"{"seed": 1}"#, r#"{"experiment": "otto", "seed": -1, "output_dir": "x"}"#] {
        let cfg = write_config(&dir, body);
        assert_eq!(run_config(&cfg, &dir.join("out")).status.code(), Some(1), "{body:?}");
    }
    assert_eq!(qthermo(&["run", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn schema_errors_name_the_key_and_line() {
    let dir = scratch("schema");
    let cfg = write_config(&dir, "{\n  \"experiment\": \"tricycle\",\n  \"seed\": 1,\n  \"output_dir\": \"x\",\n  \"model\": {\"omega_hot\": 1.0}\n}\n");
    let out = run_config(&cfg, &dir.join("out"));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(1));
    assert!(err.contains("model.omega_hot") && err.contains("line 5"), "{err}");
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let base = scratch("repeat");
    let random_evolve = r#"{"experiment": "evolve", "seed": 99, "output_dir": "x",
        "model": {"system": {"kind": "random", "dim": 4}, "initial": "random", "t_max": 20.0, "points": 41,
        "couplings": [{"operator": "random", "bath": {"label": "h", "temperature": 2.0, "form": {"kind": "ohmic", "strength": 0.05, "cutoff": 20.0}}},
                      {"operator": "random", "bath": {"label": "c", "temperature": 0.5, "form": {"kind": "ohmic", "strength": 0.05, "cutoff": 20.0}}}]}}"#;
    let mut cases: Vec<PathBuf> = vec![write_config(&base, random_evolve)];
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    for k in ["otto-optimize", "third-law-sweep", "floquet", "correlations"] {
        cases.push(manifest.join(format!("configs/pass/{k}.json")));
    }
    for cfg in cases {
        let mut snapshots = Vec::new();
        for (i, threads) in ["1", "4", "4"].iter().enumerate() {
            let dir = base.join(format!("{}-{i}", cfg.file_stem().unwrap().to_string_lossy()));
            let out = Command::new(env!("CARGO_BIN_EXE_qthermo"))
                .env("QTHERMO_THREADS", threads)
                .args(["run", cfg.to_str().unwrap(), "--output-dir", dir.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
                .unwrap()
                .map(|e| {
                    let p = e.unwrap().path();
                    (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
                })
                .collect();
            files.sort();
            snapshots.push(files);
        }
        assert!(snapshots.windows(2).all(|w| w[0] == w[1]), "{}", cfg.display());
    }
}

#[test]
fn seeds_change_random_outputs() {
    let base = scratch("seeds");
    let mut ledgers = Vec::new();
    for seed in [1, 2] {
        let body = format!(r#"{{"experiment": "correlations", "seed": {seed}, "output_dir": "x"}}"#);
        let cfg = write_config(&base, &body);
        let dir = base.join(format!("s{seed}"));
        assert!(run_config(&cfg, &dir).status.success());
        ledgers.push(fs::read(dir.join("correlations.csv")).unwrap());
    }
    assert_ne!(ledgers[0], ledgers[1]);
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_qthermo")).env("QTHERMO_THREADS", "zero").arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_enumerates_the_nine_kinds() {
    let out = qthermo(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, KINDS);
}

#[test]
fn describe_otto_shows_the_stroke_schema_with_defaults() {
    let out = qthermo(&["describe", "otto"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experiment"], "otto");
    let m = &v["model"];
    assert_eq!(m["durations"]["hot"], 3.0);
    assert_eq!(m["durations"]["expansion"], 1.0);
    assert_eq!(m["protocol"], "adiabatic");
    assert_eq!(m["machine"], "engine");
    assert_eq!(m["hot"]["form"]["kind"], "ohmic");
}

#[test]
fn described_defaults_run_and_pass() {
    let base = scratch("describe");
    for k in KINDS {
        let out = qthermo(&["describe", k]);
        assert!(out.status.success(), "{k}");
        let cfg = base.join(format!("{k}.json"));
        fs::write(&cfg, &out.stdout).unwrap();
        let run = run_config(&cfg, &base.join(k));
        assert!(run.status.success(), "{k}: {}", String::from_utf8_lossy(&run.stderr));
    }
}

#[test]
fn describe_unknown_kind_exits_with_one() {
    assert_eq!(qthermo(&["describe", "bogus"]).status.code(), Some(1));
}

#[test]
fn infinite_temperature_round_trips_through_describe() {
    let out = qthermo(&["describe", "tricycle"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["model"]["work"]["temperature"], "inf");
}
