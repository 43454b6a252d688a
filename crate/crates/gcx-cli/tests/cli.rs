use std::process::Command;

use serde_json::Value;

fn gcx(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_gcx")).args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn enumerate_single_edge() {
    let dir = std::env::temp_dir().join(format!("gcx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("one.txt");
    let (code, r) = gcx(&["enumerate", "--v", "2", "--e", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["count"], 1);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gcx(&["enumerate", "--v", "x", "--e", "1"]).0, 2);
    assert_eq!(gcx(&["enumerate", "--flavor", "nope", "--v", "2", "--e", "1"]).0, 2);
    assert_eq!(gcx(&["verify", "chainmap", "aplusb", "-k", "2", "--p", "1", "--q", "1"]).0, 2);
    assert_eq!(gcx(&["enumerate", "--flavor", "fwGC", "--cap", "1", "--v", "1", "--e", "0"]).0, 2);
}

#[test]
fn tetrahedron_cohomology() {
    let (code, r) = gcx(&["cohomology", "--flavor", "GC", "-k", "2", "-b", "3"]);
    assert_eq!(code, 0);
    let h0 = r["rows"].as_array().unwrap().iter().find(|x| x["degree"] == 0).unwrap();
    assert!(h0["h"].as_u64().unwrap() >= 1);
}

#[test]
fn loop_graph_cohomology() {
    let (code, r) = gcx(&["cohomology", "--flavor", "b2GC", "-k", "2", "--i-max", "9"]);
    assert_eq!(code, 0);
    for row in r["rows"].as_array().unwrap() {
        let i = row["degree"].as_i64().unwrap() + 2;
        assert_eq!(row["h"].as_u64().unwrap(), u64::from(i.rem_euclid(4) == 1), "i={i}");
    }
}

#[test]
fn verify_exit_codes() {
    assert_eq!(gcx(&["verify", "d2", "--flavor", "dGC", "-k", "3", "--v", "4", "--e", "6"]).0, 0);
    assert_eq!(gcx(&["verify", "chainmap", "aplusb", "-k", "3"]).0, 0);
    assert_eq!(gcx(&["verify", "chainmap", "b-corrupted", "-k", "3"]).0, 1);
    assert_eq!(gcx(&["verify", "degree-bound", "-k", "3", "-b", "3"]).0, 0);
}

#[test]
fn grt_report() {
    let (code, r) = gcx(&["grt", "--emit-derivations", "--m", "2", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["alpha_closed"], true);
    assert_eq!(r["alpha_s_in_image"], false);
    assert_eq!(r["difference_in_image"], false);
    assert_eq!(r["derivations"].as_array().unwrap().len(), 2);
    let (code, p) = gcx(&["grt", "--field", "gf32003"]);
    assert_eq!(code, 0);
    assert_eq!(p["difference_in_image"], r["difference_in_image"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["enumerate", "--flavor", "dGC", "-k", "3", "--v", "4", "--e", "6"];
    let a = Command::new(env!("CARGO_BIN_EXE_gcx")).args(args).output().unwrap().stdout;
    let b = Command::new(env!("CARGO_BIN_EXE_gcx")).args(args).env("GCX_THREADS", "1").output().unwrap().stdout;
    assert_eq!(a, b);
}
