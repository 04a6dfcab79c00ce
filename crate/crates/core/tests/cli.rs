mod common;

use common::{run, Run};
use serde_json::Value;

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", r.stdout))
}

fn st(graph: &str) -> Vec<&str> {
    vec![graph, "--source", "s", "--target", "t"]
}

fn cmd<'a>(sub: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![sub];
    v.extend_from_slice(rest);
    v
}

#[test]
fn binary_matches_goldens() {
    let bad = common::check_goldens();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn every_failure_prints_error_json_and_a_diagnostic() {
    let cases: &[(&[&str], i32, &str)] = &[
        (&["validate", "invalid.json"], 2, "VALIDATION_ERROR"),
        (&["validate", "malformed.json"], 2, "PARSE_ERROR"),
        (&["validate", "no-such-file.json"], 2, "IO_ERROR"),
        (
            &["cover", "diamond.json", "--source", "s", "--target", "q"],
            2,
            "UNKNOWN_INTERFACE",
        ),
        (
            &["adapt", "lossy.json", "--source", "s", "--target", "t", "--method", "w"],
            2,
            "UNKNOWN_METHOD",
        ),
        (
            &["adapt", "lossy.json", "--source", "s", "--target", "t", "--method", "z"],
            1,
            "NOT_ADAPTABLE",
        ),
        (
            &[
                "adapt",
                "revisiting.json",
                "--source",
                "s",
                "--target",
                "t",
                "--method",
                "m",
            ],
            1,
            "DEAD_END",
        ),
        (
            &["minimize", "wide.json", "--source", "s", "--target", "t", "--exact"],
            3,
            "BUDGET_EXCEEDED",
        ),
        (&["reduce", "bad.cnf"], 2, "PARSE_ERROR"),
        (&["oracle", "bad.cnf"], 2, "PARSE_ERROR"),
    ];
    for (args, status, code) in cases {
        let r = run(args, None);
        assert_eq!(r.status, *status, "{args:?}: {}", r.stderr);
        assert_eq!(json(&r)["error"], *code, "{args:?}");
        assert!(r.stderr.starts_with("error: "), "{args:?}: {}", r.stderr);
    }
}

#[test]
fn validation_errors_list_violations() {
    let v = json(&run(&["validate", "invalid.json"], None));
    let codes: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["code"].as_str().unwrap())
        .collect();
    assert_eq!(
        codes,
        [
            "DUP_METHOD",
            "EMPTY_INTERFACE",
            "UNKNOWN_METHOD",
            "UNKNOWN_METHOD",
            "SELF_LOOP",
            "UNKNOWN_INTERFACE"
        ]
    );
    assert_eq!(v["violations"][3]["path"], "adapters[0].provides[0].requires[0]");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["minimize", "diamond.json"], None).status, 2);
    assert_eq!(run(&["frobnicate"], None).status, 2);
    assert_eq!(
        run(
            &[
                "minimize",
                "diamond.json",
                "--source",
                "s",
                "--target",
                "t",
                "--exact",
                "--greedy"
            ],
            None
        )
        .status,
        2
    );
    assert_eq!(run(&["dot", "diamond.json", "--overlay", "cover"], None).status, 2);
}

#[test]
fn validate_reads_stdin() {
    let r = run(&["validate", "-"], Some("diamond.json"));
    assert_eq!(r.status, 0);
    assert_eq!(json(&r)["valid"], true);
}

#[test]
fn cover_reports_loss_and_web() {
    let r = run(&cmd("cover", &st("lossy.json")), None);
    assert_eq!(r.status, 0);
    let v = json(&r);
    assert_eq!(v["covered"], serde_json::json!(["x", "y"]));
    assert_eq!(v["lost"], serde_json::json!(["z"]));
    assert_eq!(v["web"]["adapters"], serde_json::json!(["MT", "SM", "ST"]));

    let mut args = cmd("cover", &st("lossy.json"));
    args.push("--pruned");
    let v = json(&run(&args, None));
    assert_eq!(v["web"]["adapters"], serde_json::json!(["MT", "SM", "ST"]));
}

#[test]
fn adapt_emits_ordered_steps() {
    let mut args = cmd("adapt", &st("diamond.json"));
    args.extend(["--method", "x"]);
    let v = json(&run(&args, None));
    let steps: Vec<(&str, &str)> = v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["adapter"].as_str().unwrap(), s["method"].as_str().unwrap()))
        .collect();
    assert_eq!(steps, [("A1", "a"), ("A3", "x")]);
    assert_eq!(v["depth"], 2);
}

#[test]
fn minimize_modes() {
    let v = json(&run(&cmd("minimize", &st("shortcut.json")), None));
    assert_eq!(v["exact"], true);
    assert_eq!(v["adapter_count"], 3);
    assert_eq!(v["adapters"], serde_json::json!(["A2", "A4", "A5"]));

    let mut args = cmd("minimize", &st("wide.json"));
    args.push("--greedy");
    let v = json(&run(&args, None));
    assert_eq!(v["exact"], false);
    assert_eq!(v["adapter_count"], 30);

    let mut args = cmd("minimize", &st("shortcut.json"));
    args.extend(["--method", "x"]);
    let v = json(&run(&args, None));
    assert_eq!(v["adapters"], serde_json::json!(["A5"]));
    assert_eq!(v["target_coverage"], serde_json::json!(["x"]));

    let mut args = cmd("minimize", &st("diamond.json"));
    args.extend(["--budget", "1"]);
    assert_eq!(run(&args, None).status, 3);
}

#[test]
fn decide_prints_a_boolean() {
    let mut args = cmd("decide", &st("shortcut.json"));
    args.extend(["-K", "3"]);
    let r = run(&args, None);
    assert_eq!((r.status, r.stdout.as_str()), (0, "true\n"));
    let mut args = cmd("decide", &st("shortcut.json"));
    args.extend(["--bound", "2"]);
    let r = run(&args, None);
    assert_eq!((r.status, r.stdout.as_str()), (1, "false\n"));
}

#[test]
fn reduce_and_oracle() {
    let v = json(&run(&["reduce", "single.cnf"], None));
    assert_eq!(v["metadata"]["bound"], 5);
    assert_eq!(v["graph"]["adapters"].as_array().unwrap().len(), 10);
    assert_eq!(v["graph"]["interfaces"].as_array().unwrap().len(), 6);

    let r = run(&["reduce", "single.cnf", "--graph-only"], None);
    let g = json(&r);
    assert!(g.get("metadata").is_none());
    assert_eq!(g["adapters"].as_array().unwrap().len(), 10);

    let r = run(&["oracle", "single.cnf"], None);
    assert_eq!(r.status, 0);
    let values: Vec<bool> = json(&r)["assignment"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["value"].as_bool().unwrap())
        .collect();
    assert_eq!(values, [true, false, false]);
    assert_eq!(run(&["oracle", "unsat.cnf"], None).status, 1);
    assert_eq!(run(&["oracle", "repeated.cnf"], None).status, 1);
}

#[test]
fn reduced_graph_feeds_back_into_the_cli() {
    let dir = std::env::temp_dir().join(format!("adapter-web-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("single.json");
    std::fs::write(&path, run(&["reduce", "single.cnf", "--graph-only"], None).stdout).unwrap();
    let p = path.to_str().unwrap();
    let r = run(
        &["decide", p, "--source", "source", "--target", "target", "-K", "5"],
        None,
    );
    assert_eq!(r.stdout, "true\n");
    let r = run(
        &["decide", p, "--source", "source", "--target", "target", "-K", "4"],
        None,
    );
    assert_eq!(r.stdout, "false\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dot_output_is_graphviz() {
    let r = run(
        &[
            "dot",
            "lossy.json",
            "--overlay",
            "cover",
            "--source",
            "s",
            "--target",
            "t",
        ],
        None,
    );
    assert_eq!(r.status, 0);
    assert!(r.stdout.starts_with("digraph adapters {"));
    assert!(r.stdout.contains("lost: z"));
    assert_eq!(r.stdout.matches("color=\"blue\"").count(), 3);
}
