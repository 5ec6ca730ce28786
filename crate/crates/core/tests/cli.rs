use std::path::Path;
use std::process::{Command, Output};

use interdep_route::fixtures::{chain_network, ladder_network};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interdep-route"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_json(dir: &Path, name: &str, net: &interdep_route::model::Network) -> String {
    let file = dir.join(name);
    std::fs::write(&file, net.to_doc().to_json().unwrap()).unwrap();
    file.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&cli(&["best-path"])), 1);
    assert_eq!(code(&cli(&["frobnicate"])), 1);
    assert_eq!(code(&cli(&["gen-scenario", "--assign", "closest:2"])), 1);
    assert_eq!(code(&cli(&["validate", "/nonexistent/net.json"])), 1);
    assert_eq!(code(&cli(&["--help"])), 0);
    assert_eq!(code(&cli(&["--version"])), 0);
}

#[test]
fn validate_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"supply_nodes": [{"id": "u1", "p_fail": 1.5}],
            "demand_nodes": [{"id": "a", "supplies": ["u1", "u9"]}, {"id": "b"}],
            "edges": [["a", "c"]]}"#,
    )
    .unwrap();
    let out = cli(&["validate", bad.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert!(report["violations"].as_array().unwrap().len() >= 4);

    let good = write_json(dir.path(), "good.json", &chain_network(&[&[1]], 0.1));
    assert_eq!(code(&cli(&["validate", &good])), 0);
}

#[test]
fn infeasible_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write_json(dir.path(), "chain.json", &chain_network(&[&[1], &[2]], 0.1));
    assert_eq!(code(&cli(&["best-pair", &chain])), 2);
    assert_eq!(code(&cli(&["best-pair", &chain, "--method", "ilp"])), 2);
    assert_eq!(code(&cli(&["export-lp", &chain, "--model", "max-d"])), 0);

    let ladder = write_json(
        dir.path(),
        "ladder.json",
        &ladder_network(&[&[1, 2], &[2, 3]], &[&[1, 3], &[4]], 0.1),
    );
    let out = cli(&["best-pair", &ladder, "--method", "ilp", "--budget", "2"]);
    assert_eq!(code(&out), 3);
    let out = cli(&["best-pair", &ladder, "--method", "ilp", "--json"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["solution"]["status"], "optimal");
    assert_eq!(report["solution"]["d"], 2);
}

#[test]
fn oracle_cap_is_a_budget_error() {
    let dir = tempfile::tempdir().unwrap();
    let sets: Vec<Vec<u32>> = (0..6).map(|i| vec![3 * i, 3 * i + 1, 3 * i + 2]).collect();
    let slices: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
    let net = write_json(dir.path(), "wide.json", &chain_network(&slices, 0.1));
    let path = "s,v1,v2,v3,v4,v5,v6,t";
    assert_eq!(code(&cli(&["oracle", &net, "--path", path, "--cap", "10"])), 3);
    assert_eq!(code(&cli(&["oracle", &net, "--path", path])), 0);
}

#[test]
fn file_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_json(
        dir.path(),
        "ladder.json",
        &ladder_network(&[&[1, 2], &[2, 3]], &[&[1, 3], &[4]], 0.1),
    );
    let lp = dir.path().join("model.lp");
    let out = cli(&["export-lp", &net, "--model", "min-weighted", "--out", lp.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("\\ interdep-route min-weighted model\n"));
    assert!(text.ends_with("End\n"));

    let csv = dir.path().join("trials.csv");
    let out = cli(&[
        "experiment", &net, "--methods", "indicators,bounds,best-pair-ilp", "--trials", "2", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("trial,method,"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn scenarios_follow_the_seed() {
    let args = |seed: &'static str| ["gen-scenario", "--nodes", "12", "--supplies", "6", "--seed", seed];
    let a = cli(&args("1"));
    let b = cli(&args("1"));
    let c = cli(&args("2"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["demand_nodes"].as_array().unwrap().len(), 12);
    assert_eq!(doc["supply_nodes"].as_array().unwrap().len(), 6);
}

#[test]
fn evaluation_commands_agree_on_a_chain() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_json(dir.path(), "dnf.json", &interdep_route::fixtures::dnf_network());
    let path = "s,v1,v2,v3,v4,t";
    let exact = cli(&["eval-path", &net, "--path", path, "--method", "oracle", "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&exact.stdout).unwrap();
    assert_eq!(report["exact"]["probability"], 0.5625);
    let sampled = cli(&["eval-path", &net, "--path", path, "--epsilon", "0.02", "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&sampled.stdout).unwrap();
    let value = report["estimate"]["value"].as_f64().unwrap();
    assert!((value / 0.5625 - 1.0).abs() < 0.05);
    let bounds = cli(&["bounds", &net, "--path", path, "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&bounds.stdout).unwrap();
    assert!(report["bounds"]["lower"].as_f64().unwrap() <= 0.5625);
    assert!(report["bounds"]["upper"].as_f64().unwrap() >= 0.5625);
    let ind = cli(&["indicators", &net, "--path", path, "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&ind.stdout).unwrap();
    assert_eq!(report["indicators"]["n_s_min"], 2);
}

#[test]
fn pair_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_json(
        dir.path(),
        "ladder.json",
        &ladder_network(&[&[1, 2], &[2, 3]], &[&[1, 3], &[4]], 0.01),
    );
    let out = cli(&["indicators", &net, "--pair", "s,a1,a2,t", "s,b1,b2,t", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["indicators"]["d"], 2);
    assert!(report["interval"]["lo"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&cli(&["indicators", &net])), 1);
}
