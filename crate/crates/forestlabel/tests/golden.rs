//! Command outputs compared byte for byte against `tests/golden/`.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected files.

use std::fs;
use std::path::PathBuf;

use forestlabel::cli::run;

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn data(name: &str) -> String {
    dir("data").join(name).to_string_lossy().into_owned()
}

fn run_args(args: &[String]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("forestlabel".to_string()).chain(args.iter().cloned());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn check(name: &str, args: &[&str]) {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => data(f),
            None => a.to_string(),
        })
        .collect();
    let (code, out, err) = run_args(&args);
    assert_eq!(code, 0, "{name}: {err}");
    let path = dir("golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &out).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(out, want, "{name}");
    // a second run must be byte-identical
    assert_eq!(run_args(&args).1, out, "{name} is not deterministic");
}

#[test]
fn label_single_root() {
    check("label_single_root", &["label", "--scheme", "adj-sib-kannan", "--input", "@single_root.forest"]);
}

#[test]
fn label_small_forest() {
    check("label_small_interval", &["label", "--scheme", "anc-interval", "--input", "@small.forest"]);
    check("label_small_wrapped", &["label", "--scheme", "wrap:sib-sorted", "--input", "@small.forest"]);
}

#[test]
fn stream_tree_and_graph() {
    check("stream_conn", &["stream", "--scheme", "dyn-conn", "--input", "@small.events"]);
    check("stream_deg2", &["stream", "--scheme", "dyn-deg2", "--input", "@graph.events"]);
}

#[test]
fn query_pairs() {
    check("query_pair_file", &["query", "--input", "@pair.labels"]);
}

#[test]
fn gen_families() {
    check("gen_fn_5_3", &["gen-family", "--family", "Fn", "--n", "5", "--k", "3"]);
    check("gen_fab_12_2_3", &["gen-family", "--family", "Fab", "--n", "12", "--a", "2", "--b", "3"]);
    check("gen_a2_4", &["gen-family", "--family", "A2", "--n", "4"]);
}

#[test]
fn bounds_reports() {
    check("bounds_in_10", &["bounds", "--family", "In", "--n", "10"]);
    check("bounds_fn_10", &["bounds", "--family", "Fn", "--n", "10", "--scheme", "dyn-adj-sib"]);
    check("bounds_thm7", &["bounds", "--family", "Thm7", "--n", "1296", "--x", "6"]);
    check("bounds_warmup_json", &["bounds", "--family", "Warmup", "--n", "27", "--json"]);
    check("bounds_gab_36", &["bounds", "--family", "Gab", "--n", "36"]);
}

#[test]
fn verify_line() {
    check("verify_wrapped_kannan", &["verify", "--scheme", "wrap:adj-sib-kannan", "--n", "64", "--trials", "200", "--seed", "1"]);
}
