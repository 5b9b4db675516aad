use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path, cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticyclo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("ANTICYCLO_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn validate_flagship_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate"], &dir.path().join("out"), &dir.path().join("cache"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("out/validate.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["payload"]["all_pass"], true);
}

#[test]
fn failing_hypotheses_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "d_k = -7\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["gzscan", "--config", cfg.to_str().unwrap()], &out, &dir.path().join("cache"));
    assert_eq!(o.status.code(), Some(2));
    let v = json(&out.join("validate.json"));
    assert_eq!(v["payload"]["all_pass"], false);
    assert!(!out.join("gzscan.json").exists());
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "n_max = 0\n").unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap()], &dir.path().join("out"), &dir.path().join("c"));
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"], &dir.path().join("out"), &dir.path().join("c"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn warm_table_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, cache) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("cache"));
    assert!(run(&["table"], &a, &cache).status.success());
    assert!(run(&["table"], &b, &cache).status.success());
    for f in ["valuation_table.csv", "table.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.join("valuation_table.csv")).unwrap();
    assert!(csv.starts_with("l,n,chi0,chi1,chi,x,primitive,ord,bottomed_out,mu,nu,k_exponent\n"));
    // every character against every point: 4·4 + 12·12 rows for each l
    assert_eq!(csv.lines().count(), 1 + 2 * (16 + 144));
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let (out, cache) = (dir.path().join("out"), dir.path().join("cache"));
    assert!(run(&["brandt"], &out, &cache).status.success());
    let first = fs::read(out.join("brandt.json")).unwrap();
    let records: Vec<_> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(records.len(), 1);
    let mut rec = json(&records[0]);
    rec["payload"]["mass_check"] = "17".into();
    fs::write(&records[0], serde_json::to_string(&rec).unwrap()).unwrap();
    assert!(run(&["brandt"], &out, &cache).status.success());
    assert_eq!(fs::read(out.join("brandt.json")).unwrap(), first);
    assert_eq!(json(&records[0])["payload"]["mass_check"], "0");

    fs::write(&records[0], "{ truncated").unwrap();
    assert!(run(&["brandt"], &out, &cache).status.success());
    assert_eq!(fs::read(out.join("brandt.json")).unwrap(), first);
}

#[test]
fn flagship_commands_report_expected_structure() {
    let dir = tempfile::tempdir().unwrap();
    let (out, cache) = (dir.path().join("out"), dir.path().join("cache"));
    for c in ["brandt", "eigen", "cmpoints", "mu-nu", "gzscan", "trace-check", "tower"] {
        let o = run(&[c, "--jobs", "2"], &out, &cache);
        assert!(o.status.success(), "{c}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let b = json(&out.join("brandt.json"))["payload"].clone();
    assert_eq!(b["mass_check"], "0");
    assert_eq!(b["commute"], true);
    assert_eq!(json(&out.join("eigen.json"))["payload"]["agrees_with_curve"], true);
    for r in json(&out.join("cmpoints.json"))["payload"].as_array().unwrap() {
        assert_eq!(r["simply_transitive"], true);
    }
    let mn = json(&out.join("mu-nu.json"))["payload"].clone();
    assert_eq!((mn[0]["mu"].as_u64(), mn[0]["nu"].as_u64()), (Some(2), Some(1)));
    assert_eq!((mn[1]["mu"].as_u64(), mn[1]["nu"].as_u64()), (Some(1), Some(0)));
    for r in json(&out.join("gzscan.json"))["payload"].as_array().unwrap() {
        assert_eq!(r["all_exist"], true);
    }
    let orders: Vec<u64> = json(&out.join("tower.json"))["payload"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["order"].as_u64().unwrap())
        .collect();
    assert_eq!(orders, [4, 12]);
}
