use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn slhash(args: &[&str]) -> Output {
    run_with_stdin(args, b"")
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_slhash"))
        .args(args)
        .env_remove("SLHASH_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn slhash");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slhash-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn hashes_trit_literal() {
    let o = slhash(&["hash", "--n", "3", "--p", "11", "--trits", "13213"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0103010b0a030601020308010a");
}

#[test]
fn empty_stdin_gives_identity() {
    let o = slhash(&["hash", "--p", "11"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0103010b010000000100000001");
}

#[test]
fn matrix_output() {
    let o = slhash(&["hash", "--p", "11", "--trits", "", "--format", "matrix"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "3 11\n1 0 0\n0 1 0\n0 0 1\n");
}

#[test]
fn hashing_is_deterministic() {
    let data = b"the quick brown fox";
    let a = run_with_stdin(&["hash"], data);
    let b = run_with_stdin(&["hash"], data);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let c = run_with_stdin(&["hash"], b"the quick brown fix");
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn parallel_matches_serial() {
    let data: Vec<u8> = (0..5000u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
    let serial = run_with_stdin(&["hash", "--p", "1000003"], &data);
    for workers in ["2", "4"] {
        let par = run_with_stdin(&["hash", "--p", "1000003", "--parallel", workers, "--min-segment", "16"], &data);
        assert!(par.status.success(), "{}", stderr(&par));
        assert_eq!(stdout(&serial), stdout(&par));
    }
}

#[test]
fn hashes_files_with_labels() {
    let f = scratch("input.bin", "abc");
    let o = slhash(&["hash", "--p", "11", f.to_str().unwrap()]);
    assert!(o.status.success());
    let from_stdin = run_with_stdin(&["hash", "--p", "11"], b"abc");
    let line = stdout(&o);
    let (hex, label) = line.trim().split_once("  ").unwrap();
    assert_eq!(hex, stdout(&from_stdin).trim());
    assert!(label.ends_with("input.bin"));
}

#[test]
fn bad_congruence_exits_2() {
    let o = slhash(&["params", "validate", "--p", "11", "--a", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a ≡ 1 (mod 3)"), "{}", stderr(&o));
}

#[test]
fn composite_modulus_exits_2() {
    let o = slhash(&["params", "validate", "--p", "15"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(slhash(&["hash", "--bogus"]).status.code(), Some(1));
    assert_eq!(slhash(&["hash", "--p", "eleven"]).status.code(), Some(1));
    assert_eq!(slhash(&[]).status.code(), Some(1));
}

#[test]
fn bad_trit_exits_2() {
    let o = slhash(&["hash", "--p", "11", "--trits", "1204"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_3() {
    let o = slhash(&["analyze", "mixing", "--p", "11", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = slhash(&["attack", "palindrome", "--p", "11", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_slhash"))
        .args(["analyze", "mixing", "--p", "3", "--kmax", "1"])
        .env("SLHASH_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = scratch("params.conf", "# small field\np = 11\nn = 3\n");
    let o = slhash(&["--config", cfg.to_str().unwrap(), "hash", "--trits", "13213"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0103010b0a030601020308010a");
    // flags win over the file
    let o = slhash(&["--config", cfg.to_str().unwrap(), "hash", "--p", "13", "--trits", "13213"]);
    assert_ne!(stdout(&o).trim(), "0103010b0a030601020308010a");
    let bad = scratch("bad.conf", "colour = blue\n");
    assert_eq!(slhash(&["--config", bad.to_str().unwrap(), "hash"]).status.code(), Some(1));
}

#[test]
fn tails_csv_has_nine_rows() {
    let o = slhash(&["analyze", "tails"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines.iter().filter(|l| l.contains(",bad,")).count(), 3);
}

#[test]
fn girth_reports_bound_and_measurement() {
    let o = slhash(&["analyze", "girth", "--p", "11", "--radius", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["3", "11", "160"]);
    let girth: usize = row[4].parse().unwrap();
    assert!(girth >= row[3].parse::<usize>().unwrap());
}

#[test]
fn mixing_csv_decreases_to_uniform() {
    let o = slhash(&["analyze", "mixing", "--p", "3", "--kmax", "60"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let last: Vec<f64> = out.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 60.0);
    assert!(last[1] < 1e-3);
}

#[test]
fn attack_game_is_reproducible() {
    let args = ["analyze", "attack", "--p", "3", "--k", "30", "--trials", "2000", "--seed", "9"];
    let a = slhash(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&slhash(&args)));
}

#[test]
fn verify_accepts_and_rejects() {
    // A^1 B^0 = A
    let word = scratch("word.txt", "# k l\n1 0\n");
    let a = scratch("a.txt", "3 11\n1 5 8\n0 1 5\n0 0 1\n");
    let o = slhash(&[
        "attack", "verify", "--p", "11", "--word", word.to_str().unwrap(), "--target", a.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).starts_with("true"));
    let id = scratch("id.txt", "3 11\n1 0 0\n0 1 0\n0 0 1\n");
    let o = slhash(&[
        "attack", "verify", "--p", "11", "--word", word.to_str().unwrap(), "--target", id.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("false"));
}

#[test]
fn emit_em_writes_system() {
    let id = scratch("em-target.txt", "3 11\n1 0 0\n0 1 0\n0 0 1\n");
    let o = slhash(&["attack", "emit-em", "--p", "11", "--m", "2", "--target", id.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("em n=3 p=11 m=2"));
    assert_eq!(out.lines().filter(|l| l.contains(" : ") || l.ends_with(":")).count(), 9);
}

#[test]
fn palindrome_density_at_p5() {
    let o = slhash(&["attack", "palindrome", "--p", "5", "--mode", "bilinear", "--density"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("SL,120,372000,"));
    assert!(out.contains("GL,480,1488000,"));
}

#[test]
fn diameter_of_sl3_f3() {
    let o = slhash(&["analyze", "diameter", "--p", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["3", "3", "5616", "true"]);
    assert!(row[4].parse::<usize>().unwrap() > 0);
}
