use std::fs;

use forestlabel::cli::run;
use forestlabel::format::{parse_forest, parse_labels};
use forestlabel_core::{QueryAnswer, QueryKind};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("forestlabel").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(run_args(&["verify", "--scheme", "nope", "--n", "4", "--seed", "1"]).0, 2);
    assert_eq!(run_args(&["label", "--scheme", "anc-interval", "--input", "/no/such/file"]).0, 2);
    assert_eq!(run_args(&["frobnicate"]).0, 2);
    assert_eq!(run_args(&["bounds", "--table"]).0, 2, "table needs a seed");
    assert_eq!(run_args(&["bounds", "--family", "Fn", "--n", "1"]).0, 2);
    assert_eq!(run_args(&["verify", "--scheme", "anc-interval", "--n", "4", "--seed", "1", "--queries", "sibling"]).0, 2);
    // sibling queries cannot tell FnC's leaves apart, so certification fails
    let (code, out, err) = run_args(&["bounds", "--family", "FnC", "--n", "8", "--queries", "sibling"]);
    assert_eq!(code, 1);
    assert!(out.contains("family=FnC"));
    assert!(err.contains("without a witness"));
    assert_eq!(run_args(&["--help"]).0, 0);
}

#[test]
fn malformed_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.forest");
    fs::write(&bad, "forest n=2\na b\nb a\n").unwrap();
    let (code, _, err) = run_args(&["label", "--scheme", "anc-interval", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line"));
    let ev = dir.path().join("bad.events");
    fs::write(&ev, "events\nroot r\nremove q\n").unwrap();
    assert_eq!(run_args(&["stream", "--scheme", "dyn-conn", "--input", ev.to_str().unwrap()]).0, 2);
}

#[test]
fn whole_family_goes_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fn");
    let (code, _, err) = run_args(&["gen-family", "--family", "Fn", "--n", "6", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fs::read_dir(&out).unwrap().count(), 5);
    let (_, stdout, _) = run_args(&["gen-family", "--family", "Fn", "--n", "6"]);
    assert_eq!(stdout.matches("# member ").count(), 5);
}

#[test]
fn queries_agree_with_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let forest = dir.path().join("f.forest");
    let (_, text, _) = run_args(&["gen-family", "--family", "Gab", "--n", "12", "--a", "2", "--b", "2"]);
    fs::write(&forest, &text).unwrap();
    let file = parse_forest(&text).unwrap();
    for scheme in ["wrap:anc-interval", "wrap:adj-sib-kannan", "wrap:sib-sorted"] {
        let labels = dir.path().join(format!("{scheme}.labels").replace(':', "_"));
        let (code, _, err) = run_args(&[
            "label", "--scheme", scheme, "--input", forest.to_str().unwrap(), "--output", labels.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        let parsed = parse_labels(&fs::read_to_string(&labels).unwrap()).unwrap();
        assert_eq!(parsed.entries.len(), file.forest.len());
        for (u, _) in parsed.entries.iter().step_by(3) {
            for (v, _) in &parsed.entries {
                let (code, out, err) = run_args(&["query", "--input", labels.to_str().unwrap(), u, v]);
                assert_eq!(code, 0, "{err}");
                for line in out.lines() {
                    let (q, ans) = line.split_once('(').unwrap();
                    let q = QueryKind::parse(q).unwrap();
                    let got = line.ends_with("=true");
                    let want = file.forest.oracle(q, file.id(u).unwrap(), file.id(v).unwrap()).unwrap();
                    assert_eq!(QueryAnswer::Bool(got), want, "{scheme} {ans}");
                }
            }
        }
    }
}

#[test]
fn stream_labels_answer_like_the_final_forest() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("s.events");
    fs::write(&ev, "events\nroot r\ninsert a r\ninsert b r\ninsert c a\nremove b\nroot s\n").unwrap();
    let labels = dir.path().join("s.labels");
    run_args(&["stream", "--scheme", "dyn-triple", "--input", ev.to_str().unwrap(), "--output", labels.to_str().unwrap()]);
    let l = labels.to_str().unwrap();
    let ask = |u: &str, v: &str, q: &str| run_args(&["query", "--input", l, "--queries", q, u, v]).1;
    assert_eq!(ask("c", "a", "adjacency"), "adjacency(c,a)=true\n");
    assert_eq!(ask("c", "r", "connectivity"), "connectivity(c,r)=true\n");
    assert_eq!(ask("c", "s", "connectivity"), "connectivity(c,s)=false\n");
    assert_eq!(ask("a", "c", "sibling"), "sibling(a,c)=false\n");
}
