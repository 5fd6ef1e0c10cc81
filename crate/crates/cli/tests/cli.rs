use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn deadend(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deadend")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn spec(name: &str) -> String {
    fixture(&format!("specs/{name}.json")).display().to_string()
}

fn read(p: PathBuf) -> String {
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn ball_spheres() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["ball", "--spec", &spec("heisenberg"), "--radius", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = read(dir.path().join("spheres.csv"));
    assert!(csv.starts_with("distance,count\n0,1\n1,4\n"));
    assert!(csv.lines().last().unwrap().starts_with("10,"));
    assert!(!dir.path().join("ball.json").exists());
}

#[test]
fn ball_radius_zero_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["ball", "--spec", &spec("heisenberg"), "--radius", "0", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(dir.path().join("spheres.csv")), "distance,count\n0,1\n");
    let j: serde_json::Value = serde_json::from_str(&read(dir.path().join("ball.json"))).unwrap();
    assert_eq!(j["metadata"]["kind"], "heisenberg");
    assert_eq!(j["metadata"]["spec_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(j["sphere_counts"], serde_json::json!([1]));
}

#[test]
fn bad_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["ball", "--spec", &spec("sol_singular"), "--radius", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hyperbolic"));
    let bogus = dir.path().join("bogus.json");
    fs::write(&bogus, r#"{"kind":"klein_bottle"}"#).unwrap();
    let o = deadend(&["ball", "--spec", bogus.to_str().unwrap(), "--radius", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = deadend(&["ball", "--radius", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_deadend"))
        .args(["ball", "--spec", &spec("free2"), "--radius", "8", "--out"])
        .arg(dir.path())
        .env("DEADEND_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn depth_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["depth-scan", "--spec", &spec("z2"), "--radius", "6"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(dir.path().join("deadends.csv")), "element,distance,depth\n");

    let o = deadend(&["depth-scan", "--spec", &spec("heisenberg"), "--radius", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = read(dir.path().join("deadends.csv"));
    assert!(csv.lines().any(|l| l.starts_with("\"(0,0,5)\",10,")), "{csv}");

    let o = deadend(&["depth-scan", "--spec", &spec("z2"), "--radius", "3", "--min-depth", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(dir.path().join("deadends.csv")).lines().count(), 1 + 25);
}

#[test]
fn heis_family_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["heis-family", "--n-max", "4", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = read(dir.path().join("heis_family.csv"));
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][..3], ["3", "14", "3"]);
    assert!(rows[0][3].parse::<u64>().unwrap() >= 3);
    assert_eq!(rows[1][1], "18");
    assert!(dir.path().join("heis_family.json").exists());

    let o = deadend(&["heis-family", "--n-max", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(dir.path().join("heis_family.csv")).lines().count(), 1);
}

#[test]
fn sol_gap() {
    let dir = tempfile::tempdir().unwrap();
    let o = deadend(&["sol-gap", "--spec", &spec("sol_golden"), "--radius", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = read(dir.path().join("sol_gap.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("element,distance,norm,gap"));
    assert_eq!(lines.next(), Some("\"(0,0,0)\",0,0,0"));
    for l in lines {
        let gap: i64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap >= 0, "{l}");
    }
    let s: serde_json::Value = serde_json::from_str(&read(dir.path().join("sol_gap_summary.json"))).unwrap();
    assert_eq!(s["upper_half_holds"], true);
    assert_eq!(s["skipped"], 0);

    let o = deadend(&["sol-gap", "--spec", &spec("heisenberg"), "--radius", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = deadend(&["sol-gap", "--spec", &spec("sol_singular"), "--radius", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

fn dfa_report(dfa: &str, group: &str, dir: &Path) -> serde_json::Value {
    let path = fixture(&format!("dfa/{dfa}.json"));
    let o = deadend(&["dfa", "--dfa", path.to_str().unwrap(), "--spec", &spec(group), "--radius", "6"], dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&read(dir.join("dfa_report.json"))).unwrap()
}

#[test]
fn dfa_reports() {
    let dir = tempfile::tempdir().unwrap();
    let r = dfa_report("z2_sorted", "z2", dir.path());
    assert_eq!((r["sound"].clone(), r["max_depth"].clone(), r["bound"].clone()), (true.into(), 1.into(), 10.into()));
    let r = dfa_report("free2", "free2", dir.path());
    assert_eq!((r["sound"].clone(), r["complete"].clone()), (true.into(), true.into()));
    let r = dfa_report("z2_broken", "z2", dir.path());
    assert_eq!(r["sound"], false);
    assert_eq!(r["counterexample"], "a a-");
    assert!(r["max_depth"].is_null());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = deadend(&["depth-scan", "--spec", &spec("heisenberg"), "--radius", "10", "--format", "json"], dir);
        assert_eq!(o.status.code(), Some(0));
        let o = deadend(&["sol-gap", "--spec", &spec("sol_golden"), "--radius", "5", "--format", "json"], dir);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["deadends.csv", "deadends.json", "sol_gap.csv", "sol_gap.json", "sol_gap_summary.json"] {
        assert_eq!(read(a.path().join(f)), read(b.path().join(f)), "{f}");
    }
}

#[test]
fn other_kinds_load() {
    let dir = tempfile::tempdir().unwrap();
    for (name, r) in [("z2_weighted", "4"), ("z2_pm", "3"), ("wreath", "3"), ("free2", "3")] {
        let o = deadend(&["ball", "--spec", &spec(name), "--radius", r], dir.path());
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
