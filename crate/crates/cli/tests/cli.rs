use std::process::{Command, Output};

use serde_json::Value;

fn gtflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtflow")).args(args).env_remove("GTFLOW_CORPUS").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gt_methods_agree() {
    // λ = (3,1,0): 15 patterns by the hook-content formula, volume 3 by the product formula
    let v = json(&gtflow(&["gt", "--lambda", "3,1,0"]));
    for k in ["points_enumerated", "points_kostant", "points_lidskii", "points_weyl"] {
        assert_eq!(v[k], "15", "{k}");
    }
    for k in ["volume_product", "volume_tableaux", "volume_lidskii"] {
        assert_eq!(v[k], "3", "{k}");
    }
}

#[test]
fn gt_single_method_and_listing() {
    let v = json(&gtflow(&["gt", "--lambda", "1,0", "--method", "enumerate", "--list"]));
    assert_eq!(v["points_enumerated"], "2");
    assert_eq!(v["patterns"].as_array().unwrap().len(), 2);
    assert!(v.get("volume_product").is_none());
}

#[test]
fn kostant_methods_agree() {
    for m in ["memo", "enumerate", "lidskii"] {
        let v = json(&gtflow(&["kostant", "--fixture", "k4", "--method", m]));
        assert_eq!(v["count"], "4", "{m}");
    }
    let v = json(&gtflow(&["kostant", "--fixture", "k4", "--netflow", "2,0,0,-2"]));
    assert_eq!(v["count"], "10");
}

#[test]
fn lidskii_on_fixture() {
    let v = json(&gtflow(&["lidskii", "--fixture", "triangle"]));
    assert_eq!(v["points_binomial"], v["points_multiset"]);
}

#[test]
fn verify_gt_small_bounds_pass() {
    let out = gtflow(&["verify", "--scope", "gt", "--bounds", "n=3,lmax=3"]);
    let v = json(&out);
    assert!(!v["checks"].as_array().unwrap().is_empty());
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_flow_scope_passes() {
    let v = json(&gtflow(&["verify", "--scope", "flow"]));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["instance"] == "triangle"));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_empty_corpus_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gtflow"))
        .args(["verify", "--scope", "flow"])
        .env("GTFLOW_CORPUS", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn malformed_fixture_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("networks")).unwrap();
    let bad = dir.path().join("networks").join("broken.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gtflow"))
        .args(["verify", "--scope", "flow"])
        .env("GTFLOW_CORPUS", dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json"));
}

#[test]
fn bad_arguments_fail_before_compute() {
    assert!(!gtflow(&["gt", "--lambda", "1,3"]).status.success());
    assert!(!gtflow(&["verify", "--scope", "everything"]).status.success());
    assert!(!gtflow(&["kostant", "--fixture", "no-such-thing"]).status.success());
}

#[test]
fn g_lambda_five_parts_matches_figure_counts() {
    // vertices: C(7,2) - 2 = 19; edges: 2·C(5,2) + 2·4 = 28
    let out = gtflow(&["export", "--object", "g-lambda", "--lambda", "5,4,3,2,1"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches(" -> ").count(), 28);
    assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with('v') && !l.contains("->")).count(), 19);
}

#[test]
fn single_vertex_network_exports_one_node() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.json");
    std::fs::write(&p, r#"{"n":1,"edges":[],"netflow":[0]}"#).unwrap();
    let out = gtflow(&["export", "--object", "network", "--input", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches("[label=").count(), 1);
    assert!(!dot.contains("->"));
}

#[test]
fn unwritable_output_is_an_error() {
    let out = gtflow(&["gt", "--lambda", "1,0", "--out", "/nonexistent/dir/x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.json"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["poset2flow", "--fixture", "diamond"][..],
        &["subdivide", "--fixture", "reduction-fixture", "--format", "dot"][..],
        &["verify", "--scope", "poset", "--seed", "7"][..],
    ] {
        assert_eq!(gtflow(args).stdout, gtflow(args).stdout, "{args:?}");
    }
}

#[test]
fn poset2flow_counts_match_lattice_points() {
    let v = json(&gtflow(&["poset2flow", "--fixture", "gt-2-1-0"]));
    let labels = v["labels"].as_array().unwrap();
    assert_eq!(labels.len() as u64, v["network"]["n"].as_u64().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    std::fs::write(&p, v["network"].to_string()).unwrap();
    let k = json(&gtflow(&["kostant", "--input", p.to_str().unwrap()]));
    // GT(2,1,0) has 8 patterns
    assert_eq!(k["count"], "8");
}

#[test]
fn skew_and_subdivide_and_bijection() {
    let v = json(&gtflow(&["skew", "--lambda", "2,1", "--mu", "1,0", "--m", "3"]));
    assert_eq!(v["points"], v["kostant"]);
    let v = json(&gtflow(&["subdivide", "--fixture", "reduction-fixture"]));
    assert_eq!(v["leaf_volume_sum"], v["volume"]);
    let v = json(&gtflow(&["bijection", "--n", "3"]));
    assert!(!v.as_array().unwrap().is_empty());
    let v = json(&gtflow(&["bijection", "--fixture", "gt-2-1-0"]));
    assert!(v.as_array().unwrap().iter().all(|t| t["extension"].as_array().unwrap().len() == 6));
}
