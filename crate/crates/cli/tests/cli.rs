use std::path::PathBuf;
use std::process::Command;

use nc_cli::{render_json, run, Outcome, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn nc(args: &[&str]) -> Outcome {
    run(std::iter::once("nc").chain(args.iter().copied()))
}

fn temp_with(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn exit_code_matrix() {
    let good = data("fano-4-5-gf3.json");
    let odd = data("fano-111-gf3.json");
    let cube = data("cube.hrep");
    let truncated = {
        let text = std::fs::read_to_string(&good).unwrap();
        temp_with(&text[..text.len() / 2])
    };
    let unbounded = temp_with("-1 0 <= 0\n0 -1 <= 0\n1 -1 <= 1\n");
    let trunc = truncated.path().to_str().unwrap();
    let unb = unbounded.path().to_str().unwrap();
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["regions", "fano", "--class", "linear-odd"], EXIT_OK),
        (vec!["regions", "vamos", "--class", "zy-outer"], EXIT_OK),
        (vec!["regions", "fano", "--class", "shannon-outer"], EXIT_USAGE),
        (vec!["regions", "nowhere", "--class", "linear"], EXIT_USAGE),
        (vec!["capacity", "vamos", "--class", "linear"], EXIT_OK),
        (vec!["capacity", "fano", "--class", "zy-outer"], EXIT_USAGE),
        (vec!["verify", &good], EXIT_OK),
        (vec!["verify", &odd], EXIT_FAILED),
        (vec!["verify", &odd, "--exhaustive"], EXIT_FAILED),
        (vec!["verify", trunc], EXIT_USAGE),
        (vec!["verify", "/nonexistent/code.json"], EXIT_USAGE),
        (vec!["verify", &good, "--exhaustive", "--guard", "100"], EXIT_USAGE),
        (vec!["achieve", "gbutterfly", "--class", "routing"], EXIT_OK),
        (vec!["achieve", "vamos", "--class", "linear"], EXIT_OK),
        (vec!["rank", "oddLRI", "--field", "2", "--dim", "3"], EXIT_OK),
        (vec!["rank", "oddLRI", "--field", "3", "--dim", "3"], EXIT_OK),
        (vec!["rank", "evenLRI", "--field", "3", "--dim", "3"], EXIT_OK),
        (vec!["rank", "evenLRI", "--field", "2", "--dim", "2", "--mode", "exhaustive"], EXIT_OK),
        (
            vec!["rank", "oddLRI", "--field", "2", "--dim", "3", "--mode", "exhaustive", "--budget", "10"],
            EXIT_USAGE,
        ),
        (vec!["rank", "oddLRI", "--field", "4", "--dim", "3"], EXIT_USAGE),
        (vec!["rank", "no-such-inequality", "--field", "2", "--dim", "3"], EXIT_USAGE),
        (vec!["transfer", "--preset", "zy"], EXIT_OK),
        (vec!["transfer", "--coeffs", "1,2,3"], EXIT_USAGE),
        (vec!["polytope", "--hrep", &cube, "vertices"], EXIT_OK),
        (vec!["polytope", "--hrep", unb, "vertices"], EXIT_FAILED),
        (vec!["polytope", "--hrep", &cube, "contains", "1", "2"], EXIT_USAGE),
        (vec!["frobnicate"], EXIT_USAGE),
    ];
    for (args, want) in cases {
        let out = nc(&args);
        assert_eq!(out.code, want, "{args:?}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn asserted_expression_file_reports_violation_as_failure() {
    // I(A;B) <= 0 is false for independent lines
    let expr = temp_with("LHS:\nI(A;B)\nRHS:\n");
    let path = expr.path().to_str().unwrap();
    let out = nc(&["rank", path, "--field", "2", "--dim", "2", "--mode", "exhaustive"]);
    assert_eq!(out.code, EXIT_FAILED, "{}{}", out.stdout, out.stderr);
    let out = nc(&["rank", path, "--field", "2", "--dim", "2", "--mode", "sample", "--samples", "200"]);
    assert_eq!(out.code, EXIT_FAILED);
}

#[test]
fn documented_examples() {
    let out = nc(&["capacity", "vamos", "--class", "linear", "--kind", "uniform"]);
    assert!(out.stdout.trim_end().ends_with("5/6"), "{}", out.stdout);
    let out = nc(&["capacity", "gbutterfly", "--class", "routing", "--kind", "uniform"]);
    assert!(out.stdout.trim_end().ends_with("1/2"));
    let out = nc(&["capacity", "gbutterfly", "--class", "coding", "--kind", "average"]);
    assert!(out.stdout.trim_end().ends_with("3/4"));

    let out = nc(&["rank", "oddLRI", "--field", "2", "--dim", "3", "--mode", "catalog"]);
    assert!(out.stdout.contains("violation with slack -1"), "{}", out.stdout);

    let out = nc(&["transfer", "--preset", "ingleton"]);
    assert!(out.stdout.contains("H(a) + 2H(b) + 2H(c) + H(d) <= 2H(w) + H(x) + H(y) + H(z)"));
    assert!(out.stdout.contains("r_a + 2r_b + 2r_c + r_d <= 5"));
    let out = nc(&["transfer", "--coeffs", "1,2,1,1,1,0,0,1,0,0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["rate_bound"], "4r_a + 4r_b + 2r_c + r_d <= 10");
    let out = nc(&["transfer", "--preset", "zy-swapped", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["reducible"], false);
    assert_eq!(v["i_cy"], "-1");

    let gb = data("gbutterfly.hrep");
    let out = nc(&["polytope", "--hrep", &gb, "vertices"]);
    assert!(out.stdout.starts_with("14 vertices"));
    let out = nc(&["polytope", "--hrep", &gb, "contains", "1", "1", "1", "1"]);
    assert_eq!(out.stdout, "false\n");
    let out = nc(&["polytope", "--hrep", &data("cube.hrep"), "vertices"]);
    assert!(out.stdout.starts_with("8 vertices"));

    let out = nc(&["regions", "fano", "--class", "linear-odd", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["inequalities"].as_array().unwrap().len(), 8);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 10);
    assert!(v["vertices"].as_array().unwrap().iter().any(|p| p == "(4/5, 4/5, 4/5)"));
    let out = nc(&["regions", "vamos", "--class", "zy-outer", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["matches_expected"].is_null());

    let out = nc(&["verify", &data("fano-111-gf3.json")]);
    assert!(out.stdout.contains("n12:c FAILS"), "{}", out.stdout);
}

#[test]
fn json_reports_round_trip() {
    let good = data("fano-4-5-gf3.json");
    let odd = data("fano-111-gf3.json");
    let gb = data("gbutterfly.hrep");
    let commands: Vec<Vec<&str>> = vec![
        vec!["regions", "gbutterfly", "--class", "coding"],
        vec!["capacity", "nonfano", "--class", "linear-even", "--kind", "average"],
        vec!["verify", &good],
        vec!["verify", &odd, "--exhaustive"],
        vec!["achieve", "fano", "--class", "linear-odd"],
        vec!["codes", "vamos"],
        vec!["rank", "evenLRI", "--field", "3", "--dim", "3"],
        vec!["rank", "ingleton", "--field", "2", "--dim", "3", "--mode", "sample", "--samples", "500"],
        vec!["transfer", "--preset", "zy"],
        vec!["polytope", "--hrep", &gb, "vertices"],
        vec!["polytope", "--hrep", &gb, "contains", "1/2", "1", "1", "0"],
    ];
    for mut args in commands {
        args.splice(1..1, ["--format", "json"]);
        let out = nc(&args);
        assert!(out.code == EXIT_OK || out.code == EXIT_FAILED, "{args:?}: {}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(render_json(&v).unwrap(), out.stdout, "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["rank", "zhang-yeung", "--field", "3", "--dim", "3", "--mode", "sample", "--seed", "9"];
    assert_eq!(nc(&args), nc(&args));
    let args = ["verify", "--format", "json", "--exhaustive"];
    let f = data("fano-111-gf3.json");
    let mut a = args.to_vec();
    a.push(&f);
    assert_eq!(nc(&a), nc(&a));
}

#[test]
fn bundled_code_files_match_export() {
    let cases = [
        ("fano-4-5-gf3.json", vec!["export", "fano", "(4/5,4/5,4/5)", "--field", "3"]),
        ("fano-111-gf2.json", vec!["export", "fano", "(1,1,1)", "--field", "2"]),
        (
            "fano-111-gf3.json",
            vec!["export", "fano", "(1,1,1)", "--field", "2", "--reinterpret", "3"],
        ),
    ];
    for (file, args) in cases {
        let out = nc(&args);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(std::fs::read_to_string(data(file)).unwrap(), out.stdout, "{file}");
    }
}

#[test]
fn exported_tables_verify() {
    let out = nc(&["export", "fano", "(1,1,1)", "--field", "2", "--table"]);
    let f = temp_with(&out.stdout);
    let out = nc(&["verify", f.path().to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("exhaustive"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_nc");
    let st = Command::new(bin)
        .args(["verify", &data("fano-111-gf3.json")])
        .env("NC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_FAILED));
    assert!(String::from_utf8_lossy(&st.stdout).contains("INVALID"));
    let st = Command::new(bin).args(["capacity"]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
    assert!(!st.stderr.is_empty());
}
