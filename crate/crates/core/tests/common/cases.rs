// Shared with the acceptance package.

use std::path::Path;

/// Golden name, arguments, and an optional fixture fed on stdin.
pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub stdin: Option<&'static str>,
}

const fn case(name: &'static str, args: &'static [&'static str]) -> Case {
    Case {
        name,
        args,
        stdin: None,
    }
}

pub const CASES: &[Case] = &[
    case("validate_diamond", &["validate", "diamond.json"]),
    case("validate_invalid", &["validate", "invalid.json"]),
    case("validate_malformed", &["validate", "malformed.json"]),
    case("validate_missing", &["validate", "no-such-file.json"]),
    Case {
        name: "validate_stdin",
        args: &["validate", "-"],
        stdin: Some("lossy.json"),
    },
    case(
        "cover_diamond",
        &["cover", "diamond.json", "--source", "s", "--target", "t"],
    ),
    case(
        "cover_lossy",
        &["cover", "lossy.json", "--source", "s", "--target", "t"],
    ),
    case(
        "cover_lossy_pruned",
        &["cover", "lossy.json", "--source", "s", "--target", "t", "--pruned"],
    ),
    case(
        "cover_unknown_interface",
        &["cover", "diamond.json", "--source", "s", "--target", "nope"],
    ),
    case(
        "adapt_diamond_x",
        &[
            "adapt",
            "diamond.json",
            "--source",
            "s",
            "--target",
            "t",
            "--method",
            "x",
        ],
    ),
    case(
        "adapt_lossy_y",
        &["adapt", "lossy.json", "--source", "s", "--target", "t", "--method", "y"],
    ),
    case(
        "adapt_lossy_y_fewest",
        &[
            "adapt",
            "lossy.json",
            "--source",
            "s",
            "--target",
            "t",
            "--method",
            "y",
            "--policy",
            "fewest-deps",
        ],
    ),
    case(
        "adapt_lossy_x_random",
        &[
            "adapt",
            "lossy.json",
            "--source",
            "s",
            "--target",
            "t",
            "--method",
            "x",
            "--policy",
            "random",
            "--seed",
            "7",
        ],
    ),
    case(
        "adapt_lossy_z",
        &["adapt", "lossy.json", "--source", "s", "--target", "t", "--method", "z"],
    ),
    case(
        "adapt_unknown_method",
        &["adapt", "lossy.json", "--source", "s", "--target", "t", "--method", "w"],
    ),
    case(
        "adapt_revisiting",
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
    ),
    case(
        "minimize_shortcut",
        &["minimize", "shortcut.json", "--source", "s", "--target", "t"],
    ),
    case(
        "minimize_shortcut_greedy",
        &[
            "minimize",
            "shortcut.json",
            "--source",
            "s",
            "--target",
            "t",
            "--greedy",
        ],
    ),
    case(
        "minimize_shortcut_sequential",
        &[
            "minimize",
            "shortcut.json",
            "--source",
            "s",
            "--target",
            "t",
            "--exact",
            "--sequential",
        ],
    ),
    case(
        "minimize_shortcut_method",
        &[
            "minimize",
            "shortcut.json",
            "--source",
            "s",
            "--target",
            "t",
            "--method",
            "x",
        ],
    ),
    case(
        "minimize_lossy",
        &["minimize", "lossy.json", "--source", "s", "--target", "t"],
    ),
    case(
        "minimize_wide_exact",
        &["minimize", "wide.json", "--source", "s", "--target", "t", "--exact"],
    ),
    case(
        "minimize_wide_greedy",
        &["minimize", "wide.json", "--source", "s", "--target", "t", "--greedy"],
    ),
    case(
        "decide_shortcut_k1",
        &["decide", "shortcut.json", "--source", "s", "--target", "t", "-K", "1"],
    ),
    case(
        "decide_shortcut_k2",
        &["decide", "shortcut.json", "--source", "s", "--target", "t", "-K", "2"],
    ),
    case("reduce_single", &["reduce", "single.cnf"]),
    case("reduce_single_graph", &["reduce", "single.cnf", "--graph-only"]),
    case("reduce_bad", &["reduce", "bad.cnf"]),
    case("oracle_single", &["oracle", "single.cnf"]),
    case("oracle_unsat", &["oracle", "unsat.cnf"]),
    case("oracle_repeated", &["oracle", "repeated.cnf"]),
    case("dot_diamond", &["dot", "diamond.json"]),
    case(
        "dot_lossy_cover",
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
    ),
    case(
        "dot_shortcut_exact",
        &[
            "dot",
            "shortcut.json",
            "--overlay",
            "exact",
            "--source",
            "s",
            "--target",
            "t",
        ],
    ),
    case("usage_error", &["minimize", "diamond.json"]),
];

/// Runs every case twice through `transcript` and compares against the
/// golden files in `dir`; with `UPDATE_GOLDEN` set, rewrites them instead.
/// Returns the cases that differ.
pub fn check_goldens(dir: &Path, transcript: impl Fn(&Case) -> String) -> Vec<String> {
    let bless = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut bad = Vec::new();
    for c in CASES {
        let first = transcript(c);
        let second = transcript(c);
        if first != second {
            bad.push(format!("{} (nondeterministic)", c.name));
            continue;
        }
        let path = dir.join(format!("{}.out", c.name));
        if bless {
            std::fs::write(&path, &first).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(g) if g == first => {}
            Ok(_) => bad.push(format!("{} (differs from golden)", c.name)),
            Err(_) => bad.push(format!("{} (missing golden)", c.name)),
        }
    }
    bad
}
