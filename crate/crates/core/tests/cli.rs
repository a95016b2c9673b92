use std::path::{Path, PathBuf};
use std::process::Command;

use semilat::io::{emit_lat, parse};
use semilat::planar::chain;
use semilat::{covering_squares, grid, insert_fork};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn semilat(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_semilat")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn s7_text() -> String {
    let g = grid(2, 2).unwrap();
    emit_lat(&insert_fork(&g, covering_squares(&g)[0]).unwrap().diagram)
}

#[test]
fn check_con_and_conlat() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "sq.lat", &emit_lat(&grid(2, 2).unwrap()));
    let r = semilat(&["check", &sq]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("rectangular: yes"));
    assert!(r.stdout.contains("patch: yes"));
    assert!(r.stdout.contains("slim: yes"));

    let r = semilat(&["con", &sq, "0", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "con(0, 1) = {0,1} {2,3}");

    let s7 = write(dir.path(), "s7.lat", &s7_text());
    let r = semilat(&["conlat", &s7]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("Con: 5 congruences, 3 join-irreducible, all principal: yes"));
    assert_eq!(r.stdout.lines().count(), 6);
}

#[test]
fn fork_eye_and_glue_emit_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "sq.lat", &emit_lat(&grid(2, 2).unwrap()));
    let r = semilat(&["fork", &sq, "0", "2", "1", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(parse(&r.stdout).unwrap().lattice.len(), 7);

    let r = semilat(&["eye", &sq, "0", "2", "1", "3"]);
    assert_eq!(r.code, 0);
    assert_eq!(parse(&r.stdout).unwrap().lattice.len(), 5);

    let r = semilat(&["fork", &sq, "0", "1", "2", "3"]);
    assert_eq!(r.code, 2, "wrong orientation is an input error");

    for (side, n) in [("ll", 6), ("lr", 6)] {
        let r = semilat(&["glue", &sq, &sq, "--side", side]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let d = parse(&r.stdout).unwrap().diagram.unwrap();
        assert_eq!(d.len(), n);
    }
    let r = semilat(&["glue", &sq, &sq, "--side", "up"]);
    assert_eq!(r.code, 2);
}

#[test]
fn step2_and_extend() {
    let dir = tempfile::tempdir().unwrap();
    let s7 = write(dir.path(), "s7.lat", &s7_text());
    let r = semilat(&["step2", &s7]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("# ")).count(), 3);

    let out = dir.path().join("stages");
    let r = semilat(&["extend", &s7, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("Con: 5 congruences, all principal: yes"));
    assert!(r.stdout.contains("congruence-preserving: yes"));
    let names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n == "final.dot"));
    assert!(names.iter().any(|n| n == "witnesses.txt"));
    assert!(names.iter().any(|n| n.starts_with("stage_00_") && n.ends_with(".lat")));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "sq.lat", &emit_lat(&grid(2, 2).unwrap()));
    assert_eq!(semilat(&["verify", &sq]).code, 0);
    let s7 = write(dir.path(), "s7.lat", &s7_text());
    let r = semilat(&["verify", &s7]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("FAIL"));
    assert!(r.stdout.contains("condition (P): pass"));
    let c4 = write(dir.path(), "c4.lat", &emit_lat(&chain(4).unwrap()));
    let r = semilat(&["verify", &c4]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not a rectangular lattice"));
}

#[test]
fn represent_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = write(dir.path(), "c2.lat", "lattice 2\ncover 0 1\n");
    let r = semilat(&["represent", &c2]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("K1: grid(2,2), eye"));
    assert!(r.stdout.contains("all principal: yes"));

    let sq = write(dir.path(), "sq.lat", &emit_lat(&grid(2, 2).unwrap()));
    let r = semilat(&["dot", &sq, "--congruence", "0", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph"));
    assert!(r.stdout.contains("rankdir=BT"));
    assert_eq!(semilat(&["dot", &sq, "--congruence", "0", "9"]).code, 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.lat", "lattice 3\ncover 0 1\ncover 1 x\n");
    let r = semilat(&["check", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    // Two maximal elements: not a lattice.
    let poset = write(dir.path(), "v.lat", "lattice 3\ncover 0 1\ncover 0 2\n");
    assert_eq!(semilat(&["check", &poset]).code, 2);
    assert_eq!(semilat(&["check", "/nonexistent/file.lat"]).code, 2);
    assert_eq!(semilat(&["nosuchcommand"]).code, 2);
    assert_eq!(semilat(&["--help"]).code, 0);
}

#[test]
fn represent_three_element_chain_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write(dir.path(), "c3.lat", "lattice 3\ncover 0 1\ncover 1 2\n");
    let r = semilat(&["represent", &c3]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let golden = include_str!("golden/represent_c3.txt");
    assert_eq!(r.stdout, golden);
    // The emitted K really has a 3-element chain of congruences.
    let k = parse(&r.stdout[r.stdout.find("lattice ").unwrap()..]).unwrap().lattice;
    let cl = semilat::con_lattice(&k);
    assert_eq!(cl.len(), 3);
    assert!(semilat::is_all_principal(&k).all_principal);
}
