use std::path::Path;
use std::process::{Command, Output};

use biharm_core::report::strip_header;
use biharm_core::solver::io::read_binary;
use serde_json::Value;

fn biharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharm")).args(args).env("BIHARM_WORKERS", "1").output().expect("spawn biharm")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BALL4: [&str; 11] = ["verify", "--identity", "all", "--domain", "ball", "--dim", "4", "--alpha", "0,1,2", "--pole", "exterior"];

#[test]
fn ball_exterior_campaign_passes() {
    let o = biharm(&BALL4);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["tool"], "biharm");
    assert!(v["version"].is_string());
    assert!(v["seed"].is_u64());
    let mut n = 0;
    for case in v["results"]["cases"].as_array().unwrap() {
        for r in case["reports"].as_array().unwrap() {
            let rel = r["relResidual"].as_f64().unwrap();
            assert!(rel <= 1e-7, "{}: {rel}", r["identity"]);
            assert!(r["quadError"].is_number());
            assert_eq!(r["pass"], true);
            n += 1;
        }
    }
    assert_eq!(n, 21);
}

#[test]
fn reruns_are_identical_apart_from_the_header() {
    let a = biharm(&BALL4);
    let b = biharm(&BALL4);
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(strip_header(&a).unwrap(), strip_header(&b).unwrap());
    assert!(serde_json::from_str::<Value>(&a).unwrap()["header"]["timestamp"].is_string());
}

#[test]
fn constants_table() {
    let o = biharm(&["constants", "--dims", "4..12"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0]["pUpperLipschitz"].as_f64(), Some(6.0));
    assert_eq!(rows[0]["pUpperConvex"], "inf");
    let l8 = rows[4]["lambdaN"].as_f64().unwrap();
    assert!((l8 - 5.648666).abs() < 1e-5, "{l8}");
    let text = biharm(&["constants", "--dims", "4..12", "--format", "text"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("5.648666") && text.contains("6+ε") && text.contains('∞'), "{text}");
}

#[test]
fn boundary_pole_with_alpha_above_n_is_a_usage_error() {
    let o = biharm(&["verify", "--identity", "I3_1", "--alpha", "9", "--dim", "8", "--pole", "boundary-vertex"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(code(&biharm(&["verify", "--bogus"])), 2);
    assert_eq!(code(&biharm(&["constants", "--dims", "8..4"])), 2);
    assert_eq!(code(&biharm(&["verify", "--identity", "I9_9"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"dims": [2], "unknownKey": 1}"#);
    assert_eq!(code(&biharm(&["verify", "--config", &cfg])), 2);
    assert_eq!(code(&biharm(&["verify", "--config", "/nonexistent/config.json"])), 2);
}

#[test]
fn failed_check_exits_1_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "decay.json", r#"{"fixtureTolerance": 0.0}"#);
    let out = dir.path().join("decay.json.out");
    let o = biharm(&["decay", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["config"]["fixtureTolerance"], 0.0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.json", r#"{"identities": ["I2_13"], "dims": [2], "domains": ["cube"], "alphas": [0.0], "poles": ["exterior"], "budget": {"seed": 5}}"#);
    let v = json(&biharm(&["verify", "--config", &cfg]));
    assert_eq!(v["seed"], 5);
    assert_eq!(v["results"]["cases"][0]["case"]["n"], 2);
    let v = json(&biharm(&["verify", "--config", &cfg, "--dim", "3", "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    assert_eq!(v["config"]["dims"], serde_json::json!([3]));
    assert_eq!(v["results"]["cases"][0]["case"]["n"], 3);
}

#[test]
fn csv_and_text_formats() {
    let base = ["verify", "--identity", "I2_13,I3_3", "--domain", "simplex", "--dim", "3", "--alpha", "1", "--pole", "exterior"];
    let csv = biharm(&[&base[..], &["--format", "csv"]].concat());
    assert_eq!(code(&csv), 0);
    let mut rdr = csv::Reader::from_reader(&csv.stdout[..]);
    let header = rdr.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "relResidual").expect("relResidual column");
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[col].parse::<f64>().unwrap() <= 1e-7));
    let text = biharm(&[&base[..], &["--format", "text"]].concat());
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("I3_3") && text.trim_end().ends_with("PASS"), "{text}");
}

#[test]
fn solve_writes_a_readable_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("u.bin");
    let o = biharm(&["solve", "--domain", "square", "--h", "0.0625", "--data", "cubic", "--grid-out", grid.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let g = read_binary(&mut std::fs::File::open(&grid).unwrap()).unwrap();
    assert_eq!((g.nx, g.ny), (v["results"]["nx"].as_u64().unwrap() as usize, v["results"]["ny"].as_u64().unwrap() as usize));
    let vals = v["results"]["values"].as_array().unwrap();
    assert_eq!(vals.len(), g.values.len());
    for (a, b) in vals.iter().zip(&g.values) {
        match a.as_f64() {
            Some(a) => assert_eq!(a, *b),
            None => assert!(b.is_nan()),
        }
    }
    assert!(v["results"]["rows"][0]["l2Error"].as_f64().unwrap() < 1e-3);
}
