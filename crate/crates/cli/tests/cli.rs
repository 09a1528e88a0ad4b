//! Exit-code and report contract of the binary: 0 constructed and verified,
//! 2 verification failed, 1 usage or IO error.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let k = DIR_SEQ.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "edgesep-cli-{}-{tag}-{k}",
        std::process::id()
    ));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgesep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_then_separate_constructs_and_verifies() {
    let dir = scratch_dir("separate");
    let host = dir.join("host.txt");
    let gen = run(&["gen", "complete", "24", "--out", host.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0), "gen must succeed");

    let stem = dir.join("fam");
    let sep = run(&[
        "separate",
        "--pattern",
        "k3",
        "--graph",
        host.to_str().unwrap(),
        "--out",
        stem.to_str().unwrap(),
    ]);
    let report = stdout_of(&sep);
    assert_eq!(sep.status.code(), Some(0), "separate must verify: {report}");
    assert!(
        report.contains("separation=pass"),
        "report must confirm separation: {report}"
    );
    assert!(
        report.contains("fallback=false"),
        "a complete host this large runs the full construction: {report}"
    );
}

#[test]
fn knn_system_stays_within_twelve_members() {
    let dir = scratch_dir("knn");
    let stem = dir.join("k8");
    let out = run(&["bipartite", "knn", "8", "--out", stem.to_str().unwrap()]);
    let report = stdout_of(&out);
    assert_eq!(out.status.code(), Some(0), "knn must verify: {report}");
    let members: usize = report
        .lines()
        .find_map(|l| l.strip_prefix("members="))
        .expect("report carries a members line")
        .parse()
        .expect("members is a count");
    assert!(members <= 12, "side 8 needs at most 12 members, got {members}");
}

fn drop_one_member(family: &Path) {
    let text = std::fs::read_to_string(family).expect("family file");
    let mut lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    let count: usize = header[2].parse().expect("member count");
    let new_header = format!("{} {} {}", header[0], header[1], count - 1);
    lines.remove(1);
    let mut body = new_header;
    for l in &lines[1..] {
        body.push('\n');
        body.push_str(l);
    }
    body.push('\n');
    std::fs::write(family, body).expect("rewrite family");
}

#[test]
fn verify_fails_with_exit_two_after_member_deletion() {
    let dir = scratch_dir("tamper");
    let stem = dir.join("k8");
    let built = run(&["bipartite", "knn", "8", "--out", stem.to_str().unwrap()]);
    assert_eq!(built.status.code(), Some(0));
    let family = dir.join("k8.family.txt");
    let host = dir.join("k8.host.txt");

    let before = run(&[
        "verify",
        family.to_str().unwrap(),
        "--graph",
        host.to_str().unwrap(),
    ]);
    assert_eq!(before.status.code(), Some(0), "untouched family verifies");

    drop_one_member(&family);
    let after = run(&[
        "verify",
        family.to_str().unwrap(),
        "--graph",
        host.to_str().unwrap(),
    ]);
    let report = stdout_of(&after);
    assert_eq!(
        after.status.code(),
        Some(2),
        "a deleted member must fail verification: {report}"
    );
    assert!(
        report.contains("separation=fail"),
        "the report names the failure: {report}"
    );
}

#[test]
fn usage_and_io_errors_exit_one() {
    let usage = run(&["gen", "complete"]);
    assert_eq!(usage.status.code(), Some(1), "missing argument is a usage error");

    let missing = run(&["decompose", "--graph", "/nonexistent/host.txt"]);
    assert_eq!(missing.status.code(), Some(1), "unreadable input is an IO error");
}

#[test]
fn seeded_commands_reproduce_identical_artifacts() {
    let dir = scratch_dir("seeded");
    let a = dir.join("a");
    let b = dir.join("b");
    for stem in [&a, &b] {
        let out = run(&[
            "blowup-sep",
            "--pattern",
            "k3",
            "3",
            "--seed",
            "7",
            "--out",
            stem.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let fam_a = std::fs::read(dir.join("a.family.txt")).unwrap();
    let fam_b = std::fs::read(dir.join("b.family.txt")).unwrap();
    assert_eq!(fam_a, fam_b, "identical seeds must give identical family files");
}
