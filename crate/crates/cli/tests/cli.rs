use std::path::Path;
use std::process::{Command, Output};

fn mim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mim"))
        .args(args)
        .env("MIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line");
    serde_json::from_str(line).expect("error is JSON")
}

#[test]
fn generate_then_solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    let out = mim(&["generate", "--layers", "3", "--overlap", "0.5", "--scale-down", "25", "--seed", "3", "--out", arg(&net)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(net.exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("net.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["report"]["num_layers"], 3);

    let res = dir.path().join("res");
    for method in ["mim-reasoner", "ksn"] {
        let out = mim(&[
            "solve", "--network", arg(&net), "--method", method, "--budget", "4", "--mc", "20", "--out", arg(&res),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(res.join("solution.json")).unwrap()).unwrap();
    assert!(sol["union_seeds"].as_array().unwrap().len() <= 4);
    assert!(res.join("profit_cost.csv").exists());
    assert!(res.join("allocation.csv").exists());
    let results = std::fs::read_to_string(res.join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], "method,k,o,l,total_spread,stderr,wall_seconds");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("mim-reasoner,3,"));
    assert!(lines[2].starts_with("ksn,3,"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let res = dir.path().join("res");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "generator": {
                "layer_node_counts": [20, 30],
                "total_edges": 120,
                "overlap_percent": 0.5,
                "model_per_layer": ["IC", "LT"],
                "rng_seed": 1
            },
            "method": "isf",
            "budget": 5,
            "mc": 15,
            "output_dir": arg(&res)
        })
        .to_string(),
    )
    .unwrap();
    let out = mim(&["solve", "--config", arg(&cfg), "--budget", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(res.join("solution.json")).unwrap()).unwrap();
    assert_eq!(sol["method"], "isf");
    assert_eq!(sol["union_seeds"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_network_exits_with_io_error() {
    let out = mim(&["solve", "--network", "/nonexistent/net.txt", "--mc", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn bad_inputs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    let out = mim(&["generate", "--overlap", "1.5", "--scale-down", "25", "--out", arg(&net)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "invalid_config");
    assert!(!net.exists());

    let bad_cfg = dir.path().join("cfg.json");
    std::fs::write(&bad_cfg, r#"{"bugdet": 3}"#).unwrap();
    let out = mim(&["solve", "--config", arg(&bad_cfg)]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&net, "#multiplex k=1 n=2\n0 0 7 0.5\n").unwrap();
    let out = mim(&["solve", "--network", arg(&net)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!mim(&["frobnicate"]).status.success());
}

#[test]
fn verify_and_inspect_on_a_tiny_network() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("tiny.txt");
    std::fs::write(
        &net,
        "#multiplex k=2 n=6\n@model 1 LT\n0 0 1 0.6\n0 1 2 0.5\n0 3 4 0.7\n1 2 3\n1 4 5\n1 5 0\n@theta 1 3 0.5\n",
    )
    .unwrap();
    let res = dir.path().join("res");
    let out = mim(&["verify", "--network", arg(&net), "--budget", "2", "--mc", "10", "--out", arg(&res)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("worst") && text.contains("PASS"), "{text}");

    let tree = dir.path().join("tree.json");
    let out = mim(&[
        "inspect-pgm", "--network", arg(&net), "--seeds", "0,3", "--layers", "0,1", "--mc", "30", "--out", arg(&tree),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(v["layers"], serde_json::json!([0, 1]));
    assert!(v.get("edges").is_some());
}
