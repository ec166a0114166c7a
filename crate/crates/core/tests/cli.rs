use std::path::Path;

use dualis::cli::run;

const C4: &str = "v a\nv b\nv c\nv d\ne 1 a b\ne 2 b c\ne 3 c d\ne 4 d a\n";
const D4: &str = "v x\nv y\ne 1 x y\ne 2 x y\ne 3 x y\ne 4 x y\n";
const K4: &str = "v 0\nv 1\nv 2\nv 3\ne a 0 1\ne b 0 2\ne c 0 3\ne d 1 2\ne e 1 3\ne f 2 3\n";
const TRIANGLE: &str = "v 1\nv 2\nv 3\ne a 1 2\ne b 2 3\ne c 3 1\nrot 1: a.1 c.2\nrot 2: b.1 a.2\nrot 3: c.1 b.2\n";

fn dualis(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dualis").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn decisions_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (c4, d4, k4) = (file(dir.path(), "c4.graph", C4), file(dir.path(), "d4.graph", D4), file(dir.path(), "k4.graph", K4));
    assert_eq!(dualis(&["test-duality", &c4, &d4]), (0, "YES\n".into(), String::new()));
    assert_eq!(dualis(&["test-duality", &c4, &c4]).0, 1);
    assert_eq!(dualis(&["self-dual", &k4]), (0, "YES\n".into(), String::new()));
    assert_eq!(dualis(&["self-dual", &c4]), (1, "NO\n".into(), String::new()));

    let (code, _, err) = dualis(&["self-dual", &dir.path().join("missing").to_string_lossy()]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
    let bad = file(dir.path(), "bad.graph", "v a\ne 1 a b\n");
    let (code, _, err) = dualis(&["spqr", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.graph"));
    assert_eq!(dualis(&["enumerate-duals", &k4, "--budget", "1"]).0, 3);
    assert_eq!(dualis(&["no-such-command"]).0, 2);
    assert_eq!(dualis(&["--help"]).0, 0);
}

#[test]
fn hardness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = file(dir.path(), "inst.3p", "B 6\nA 2 2 2 2 2 2\n");
    let (g1, g2) = (dir.path().join("g1.graph"), dir.path().join("g2.graph"));
    let (code, _, err) = dualis(&["gen-3p", &inst, "--simple", "-o", g1.to_str().unwrap(), g2.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let g1 = dualis::format::parse_graph(&std::fs::read_to_string(&g1).unwrap()).unwrap().graph;
    assert!(g1.is_simple());
    assert_eq!(dualis(&["verify-3p", &inst]), (0, "YES\n".into(), String::new()));
    let no = file(dir.path(), "no.3p", "B 20\nA 6 6 6 6 7 9\n");
    assert_eq!(dualis(&["verify-3p", &no]).0, 1);
    let invalid = file(dir.path(), "invalid.3p", "B 6\nA 2 2 2 2 2 3\n");
    assert_eq!(dualis(&["verify-3p", &invalid]).0, 2);
    let (code, out, _) = dualis(&["gen-selfdual", &inst]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("v ")).count(), 17);
}

#[test]
fn triangle_outputs_are_golden() {
    let dir = tempfile::tempdir().unwrap();
    let tri = file(dir.path(), "tri.graph", TRIANGLE);
    let (code, out, _) = dualis(&["faces", &tri]);
    assert_eq!(code, 0);
    assert_eq!(out, "face f0 3: a.1 b.1 c.1\nface f1 3: a.2 c.2 b.2\n");
    let (_, dot, _) = dualis(&["dual", &tri, "--format", "dot"]);
    assert_eq!(dot, "graph dual {\n  f0;\n  f1;\n  f0 -- f1 [label=a];\n  f0 -- f1 [label=b];\n  f0 -- f1 [label=c];\n}\n");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = file(dir.path(), "k4.graph", K4);
    for args in [
        vec!["spqr", &k4, "--format", "dot"],
        vec!["dual-spqr", &k4],
        vec!["skeleton-graph", &k4, "--format", "dot"],
        vec!["embed", &k4],
        vec!["enumerate-duals", &k4],
        vec!["corpus", "--max-edges", "5", "--sample", "4", "--seed", "3"],
    ] {
        let first = dualis(&args);
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        assert_eq!(first, dualis(&args), "{args:?}");
    }
}

#[test]
fn adhesion_of_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = file(dir.path(), "tri.graph", TRIANGLE);
    let (code, out, err) = dualis(&["adhesion", &tri, "--vertex", "1", "--face", "f0"]);
    assert_eq!(code, 0, "{err}");
    let g = dualis::format::parse_graph(&out).unwrap().graph;
    assert_eq!((g.vertex_count(), g.edge_count()), (4, 6));
    assert_eq!(dualis(&["adhesion", &tri, "--vertex", "9", "--face", "f0"]).0, 2);
}
