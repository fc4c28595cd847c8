use std::fs;
use std::process::{Command, Output};

fn bpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.space");
    fs::write(&broken, "bpb-space 1\nkind polytopal\nvertex 1 0\nvertex 0 1\n").unwrap();
    assert_eq!(bpb(&["modulus", broken.to_str().unwrap(), "0.5"]).status.code(), Some(2));
    assert_eq!(bpb(&["modulus", "lp:p=3,n=2", "0.5"]).status.code(), Some(3));
    assert_eq!(bpb(&["modulus", "euclidean2", "0.1", "--mesh", "1.5"]).status.code(), Some(4));
    assert_eq!(bpb(&["modulus", "linf2", "0.5"]).status.code(), Some(0));
    let bad = bpb(&["modulus", "linf2", "0.5", "--mesh", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty() && !bad.stderr.is_empty());
}

#[test]
fn corrupted_vertex_file_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l1.space");
    let dual = bpb(&["dual", "linf2", "--out", path.to_str().unwrap()]);
    assert_eq!(dual.status.code(), Some(0));
    let good = fs::read_to_string(&path).unwrap();
    assert_eq!(bpb(&["verify", "space", "--space", path.to_str().unwrap()]).status.code(), Some(0));
    fs::write(&path, good.replace("vertex 0 1\n", "vertex 0.2 1\n").replace("vertex 0 -1\n", "vertex -0.2 -1\n")).unwrap();
    let out = bpb(&["verify", "space", "--space", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL  space/declared vertices"), "{}", stdout(&out));
    // A file that does not even parse is a named failure too.
    fs::write(&path, "bpb-space 1\nkind polytopal\nvertex 1 0\n").unwrap();
    let out = bpb(&["verify", "space", "--space", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL  space/spec"));
}

#[test]
fn csv_is_byte_identical() {
    let args = ["plot", "euclidean2", "0.1..1.9", "--step", "0.2", "--budget", "20000", "--seed", "5"];
    let a = bpb(&args);
    let b = bpb(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("delta,lower,upper,reference\n"));
}

#[test]
fn records_and_dual_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec.json");
    let out = bpb(&["squareness", "diamond:eps=0.5", "--out", rec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("square basis"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(json["command"], "squareness");
    assert_eq!(json["outputs"]["defect"], 0.0);
    assert_eq!(json["spec_hash"].as_str().unwrap().len(), 64);

    let d1 = dir.path().join("d1.space");
    let d2 = dir.path().join("d2.space");
    bpb(&["dual", "diamond:eps=0.4", "--out", d1.to_str().unwrap()]);
    bpb(&["dual", d1.to_str().unwrap(), "--out", d2.to_str().unwrap()]);
    let out = bpb(&["verify", "space", "--space", d2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let sq = bpb(&["squareness", d2.to_str().unwrap(), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&sq.stdout).unwrap();
    assert!(json["outputs"]["defect"].as_f64().unwrap() < 1e-9);
}
