use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polyk::report::ReportDocument;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> PathBuf {
    root().join("corpus").join(format!("{name}.json"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn polyk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyk"))
        .args(args)
        .output()
        .expect("run polyk")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let o = polyk(args);
    (
        o.status.code().expect("exit code"),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn golden_reports_are_byte_identical() {
    for name in ["segment", "triangle", "square", "cube"] {
        let golden = std::fs::read(
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{name}.json")),
        )
        .unwrap();
        let first = polyk(&["report", p(&corpus(name)), "--json"]);
        let second = polyk(&["report", p(&corpus(name)), "--json"]);
        assert!(first.status.success());
        assert_eq!(
            first.stdout, second.stdout,
            "{name}: output differs between runs"
        );
        assert_eq!(
            first.stdout, golden,
            "{name}: output differs from golden file"
        );
    }
}

#[test]
fn json_report_round_trips() {
    for name in ["point", "segment", "cube", "rational-pentagon"] {
        let (code, out, _) = run(&["report", p(&corpus(name)), "--json"]);
        assert_eq!(code, 0);
        let doc: ReportDocument = serde_json::from_str(&out).unwrap();
        let again = doc.to_json();
        assert_eq!(again, out);
        let k = doc.ktheory.unwrap();
        assert!(k.k_algebra.vanish());
        assert!(k.k_quotient.k1.is_integers());
        assert!(doc.homology.unwrap().augmented.vanishes());
    }
}

#[test]
fn validate_exit_codes() {
    let (code, out, _) = run(&["validate", p(&corpus("triangle"))]);
    assert_eq!((code, out.trim()), (0, "valid"));

    let (code, _, err) = run(&["validate", p(&data("redundant.json"))]);
    assert_eq!(code, 1);
    assert!(err.contains("point 4"), "{err}");

    let (code, _, err) = run(&["validate", p(&data("zero-denominator.json"))]);
    assert_eq!(code, 1);
    assert!(
        err.contains("zero denominator") && err.contains("line 6"),
        "{err}"
    );

    let (code, _, err) = run(&["validate", p(&data("float.json"))]);
    assert_eq!(code, 1);
    assert!(err.contains("floating-point"), "{err}");

    let (code, _, err) = run(&["validate", "/nonexistent/polytope.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"), "{err}");
}

#[test]
fn report_sections() {
    let (code, out, _) = run(&["report", p(&corpus("segment")), "--boundary"]);
    assert_eq!(code, 0);
    assert!(out.contains("D_0 (1 x 2)") && out.contains("D_1 (2 x 1)"));
    assert!(!out.contains("homology") && !out.contains("K-theory"));

    let (_, out, _) = run(&["report", p(&corpus("cube")), "--ktheory"]);
    assert!(out.contains("K_0(A_Omega) = 0, K_1(A_Omega) = 0"));
    assert!(out.contains("K_0(A_Omega/K) = 0, K_1(A_Omega/K) = Z"));

    let (code, out, _) = run(&["report", p(&corpus("point"))]);
    assert_eq!(code, 0);
    assert!(out.contains("f-vector (f_-1..f_d): (1, 1)"));
    assert!(out.contains("augmented: H_-1 = 0, H_0 = 0"));

    let (_, out, _) = run(&["report", p(&corpus("segment")), "--json", "--boundary"]);
    let doc: ReportDocument = serde_json::from_str(&out).unwrap();
    let b = doc.boundary.unwrap();
    assert_eq!(b[0].entries, vec![vec![1, 1]]);
    assert_eq!(b[1].rows, vec!["{0}", "{1}"]);
    assert_eq!(b[1].entries[0][0], -b[1].entries[1][0]);
    assert!(doc.homology.is_none() && doc.timing.is_none());

    let (_, out, _) = run(&["report", p(&corpus("segment")), "--json", "--timing"]);
    let doc: ReportDocument = serde_json::from_str(&out).unwrap();
    assert!(doc.timing.is_some());
}

#[test]
fn injected_fault_exits_2() {
    for name in ["segment", "triangle", "cube"] {
        let (code, _, err) = run(&["report", p(&corpus(name)), "--inject-fault"]);
        assert_eq!(code, 2, "{name}");
        assert!(
            err.contains("boundary of boundary is nonzero"),
            "{name}: {err}"
        );
    }
    let (code, _, err) = run(&["report", p(&corpus("point")), "--inject-fault"]);
    assert_eq!(code, 2);
    assert!(err.contains("internal invariant violation"), "{err}");
    let (_, out, _) = run(&["report", p(&corpus("segment")), "--inject-fault", "--json"]);
    let doc: ReportDocument = serde_json::from_str(&out).unwrap();
    assert!(!doc.ktheory.unwrap().falsifications.is_empty());
}

#[test]
fn compare_exit_codes() {
    let (code, out, _) = run(&["compare", p(&corpus("square")), p(&corpus("quadrilateral"))]);
    assert_eq!(code, 0);
    assert!(out.starts_with("isomorphic: 10-face bijection"));
    assert_eq!(out.lines().count(), 11);

    let (code, out, _) = run(&["compare", p(&corpus("cube")), p(&corpus("octahedron"))]);
    assert_eq!(code, 3);
    assert!(
        out.contains("f-vector mismatch (8,12,6) ≠ (6,12,8)"),
        "{out}"
    );

    let (code, out, _) = run(&["compare", p(&corpus("cube")), p(&corpus("cube"))]);
    assert_eq!(code, 0);
    assert!(out.contains("(identity)"));

    let (code, _, _) = run(&["compare", p(&corpus("cube")), p(&data("redundant.json"))]);
    assert_eq!(code, 1);
}

#[test]
fn corpus_mode() {
    let (code, out, _) = run(&["corpus", p(&root().join("corpus")), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.len() >= 9);
    assert!(entries.iter().all(|e| e["exit"] == 0));

    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus("triangle"), dir.path().join("a.json")).unwrap();
    std::fs::copy(data("redundant.json"), dir.path().join("b.json")).unwrap();
    let (code, out, _) = run(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("b.json") && out.contains("error"));
}
