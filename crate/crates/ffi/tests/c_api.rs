use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dualis_ffi::*;

const C4: &str = "v a\nv b\nv c\nv d\ne 1 a b\ne 2 b c\ne 3 c d\ne 4 d a\n";
const K4: &str = "v 0\nv 1\nv 2\nv 3\ne a 0 1\ne b 0 2\ne c 0 3\ne d 1 2\ne e 1 3\ne f 2 3\n";

fn parse(text: &str) -> *mut DualisGraph {
    let source = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { dualis_graph_parse(source.as_ptr(), &mut g) }, DualisStatus::Ok);
    g
}

fn last_error() -> String {
    let p = dualis_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn duality_round_trip() {
    let c4 = parse(C4);
    let mut dual = ptr::null_mut();
    let mut yes = false;
    unsafe {
        assert_eq!(dualis_graph_dual(c4, &mut dual), DualisStatus::Ok);
        assert_eq!((dualis_graph_vertex_count(dual), dualis_graph_edge_count(dual)), (2, 4));
        assert_eq!(dualis_mutual_duality(c4, dual, &mut yes), DualisStatus::Ok);
        assert!(yes);
        assert_eq!(dualis_graph_self_dual(c4, &mut yes), DualisStatus::Ok);
        assert!(!yes);
        dualis_graph_free(dual);
        dualis_graph_free(c4);
    }
    let k4 = parse(K4);
    unsafe {
        assert_eq!(dualis_graph_self_dual(k4, &mut yes), DualisStatus::Ok);
        assert!(yes);
        assert_eq!(dualis_graph_embed(k4), DualisStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(dualis_graph_write(k4, &mut text), DualisStatus::Ok);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap().matches("rot ").count(), 4);
        dualis_string_free(text);
        dualis_graph_free(k4);
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    let mut yes = false;
    unsafe {
        assert_eq!(dualis_graph_parse(ptr::null(), &mut g), DualisStatus::NullPointer);
        let bad = CString::new("q 1\n").unwrap();
        assert_eq!(dualis_graph_parse(bad.as_ptr(), &mut g), DualisStatus::Parse);
        assert!(last_error().contains("line 1"));
        assert_eq!(dualis_graph_self_dual(ptr::null(), &mut yes), DualisStatus::NullPointer);

        let path = parse("v a\nv b\nv c\ne 1 a b\ne 2 b c\n");
        assert_eq!(dualis_graph_self_dual(path, &mut yes), DualisStatus::InvalidInput);
        assert!(last_error().contains("biconnected"));
        dualis_graph_free(path);

        let k5 = parse(
            "v 0\nv 1\nv 2\nv 3\nv 4\ne a 0 1\ne b 0 2\ne c 0 3\ne d 0 4\ne e 1 2\n\
             e f 1 3\ne g 1 4\ne h 2 3\ne i 2 4\ne j 3 4\n",
        );
        assert_eq!(dualis_graph_embed(k5), DualisStatus::NotPlanar);
        dualis_graph_free(k5);
        dualis_graph_free(ptr::null_mut());
        dualis_string_free(ptr::null_mut());
    }
}

#[test]
fn hardness_entry_points() {
    let inst = CString::new("B 6\nA 2 2 2 2 2 2\n").unwrap();
    let (mut g1, mut g2) = (ptr::null_mut(), ptr::null_mut());
    let mut yes = false;
    unsafe {
        assert_eq!(dualis_gen_3partition(inst.as_ptr(), false, &mut g1, &mut g2), DualisStatus::Ok);
        assert_eq!((dualis_graph_vertex_count(g1), dualis_graph_edge_count(g1)), (15, 16));
        assert_eq!(dualis_graph_vertex_count(g2), 3);
        dualis_graph_free(g1);
        dualis_graph_free(g2);
        assert_eq!(dualis_verify_3partition(inst.as_ptr(), 1_000, &mut yes), DualisStatus::Ok);
        assert!(yes);
        assert_eq!(dualis_verify_3partition(inst.as_ptr(), 1, &mut yes), DualisStatus::Budget);
        let bad = CString::new("B 6\nA 2 2 3\n").unwrap();
        assert_eq!(dualis_gen_3partition(bad.as_ptr(), false, &mut g1, &mut g2), DualisStatus::InvalidInput);
    }
}

fn target_dir() -> PathBuf {
    match std::env::var_os("CARGO_TARGET_DIR") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"),
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/dualis.h");
    assert!(std::fs::read_to_string(&header).unwrap().contains("dualis_mutual_duality"));
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping link check");
        return;
    };
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target_dir().join(profile).join("libdualis_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link check", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke test exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
