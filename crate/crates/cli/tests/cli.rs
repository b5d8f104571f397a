use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_alphabase"));
    c.env_remove("ALPHABASE_PRECISION");
    c
}

static NEXT: AtomicUsize = AtomicUsize::new(0);

fn system_file(json: &str) -> PathBuf {
    let n = NEXT.fetch_add(1, Ordering::SeqCst);
    let path = std::env::temp_dir().join(format!("alphabase-cli-{}-{n}.json", std::process::id()));
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

const GOLDEN: &str = r#"{"digits": [0, 1], "bases": ["(1+sqrt(5))/2", "(1+sqrt(5))/2"]}"#;

#[test]
fn check_reports_bounds_and_regularity() {
    let f = system_file(r#"{"digits": ["0", "1"], "bases": ["3/2", "9/5"]}"#);
    let out = run(&["check", f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "lambda"), "0");
    assert_eq!(field(&text, "Lambda"), "5/4");
    assert_eq!(field(&text, "regular"), "true");

    let f = system_file(r#"{"digits": [0, 1], "bases": [3, 3]}"#);
    let text = stdout(&run(&["check", f.to_str().unwrap()]));
    assert_eq!(field(&text, "semi-regular"), "true");
    assert_eq!(field(&text, "regular"), "false");
}

#[test]
fn golden_greedy_expansion_of_one() {
    let f = system_file(GOLDEN);
    let out = run(&["expand", f.to_str().unwrap(), "--x", "1", "--digits", "8"]);
    let text = stdout(&out);
    assert_eq!(field(&text, "sequence"), "110^inf");
    assert_eq!(field(&text, "residual"), "0");
}

#[test]
fn classical_expansion_of_one_matches_alpha() {
    for (m, q) in [(1, "19/10"), (2, "12/5"), (3, "7/2")] {
        let digits: Vec<String> = (0..=m).map(|d| d.to_string()).collect();
        let bases = vec![format!("\"{q}\""); m + 1];
        let f = system_file(&format!(r#"{{"digits": [{}], "bases": [{}]}}"#, digits.join(","), bases.join(",")));
        let path = f.to_str().unwrap();
        let expanded = stdout(&run(&["expand", path, "--x", "1", "--kind", "quasi-greedy", "--digits", "24"]));
        let alphas = stdout(&run(&["alphas", path, "--digits", "24"]));
        for j in 0..m {
            assert_eq!(field(&alphas, &format!("alpha^{j}")), field(&expanded, "sequence"), "M = {m}");
        }
    }
}

#[test]
fn thresholds_for_binary_alphabet() {
    let text = stdout(&run(&["thresholds", "--M", "1"]));
    assert!(field(&text, "q_GR").starts_with("[1.6180339887"));
    assert!(field(&text, "q_KL").starts_with("[1.7872316501"));
    assert_eq!(field(&text, "alpha_GR"), "(10)^inf");
    assert!(field(&text, "alpha_KL").starts_with("11010011"));
    let text = stdout(&run(&["thresholds", "--M", "2"]));
    assert_eq!(field(&text, "q_GR"), "2");
    assert!(field(&text, "alpha_KL").starts_with("21020121"));
}

#[test]
fn precision_flag_and_environment() {
    let wide = stdout(&run(&["thresholds", "--M", "3"]));
    let narrow = stdout(&bin().args(["thresholds", "--M", "3"]).env("ALPHABASE_PRECISION", "64").output().unwrap());
    let flag = stdout(&run(&["--precision", "64", "thresholds", "--M", "3"]));
    assert_eq!(narrow, flag);
    assert!(field(&narrow, "q_GR").len() < field(&wide, "q_GR").len());
    assert!(field(&narrow, "q_GR").starts_with("[2.7320508075"));
}

#[test]
fn scan_matches_threshold_inequalities() {
    let out = run(&["scan", "--digits", "0,1", "--q0", "1.1:2.0:10", "--q1", "1.1:2.0:10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q0,q1,class"));
    let one = BigRational::from_integer(1.into());
    let mut cells = 0;
    for line in lines {
        let parts: Vec<&str> = line.split(',').collect();
        let q0: BigRational = parts[0].parse().unwrap();
        let q1: BigRational = parts[1].parse().unwrap();
        let infinite = q0 > &one + q1.recip() && q1 > &one + q0.recip();
        assert_eq!(parts[2], if infinite { "Infinite" } else { "TrivialOnly" }, "{line}");
        cells += 1;
    }
    assert_eq!(cells, 100);
}

#[test]
fn scan_writes_csv_file() {
    let path = std::env::temp_dir().join(format!("alphabase-scan-{}.csv", std::process::id()));
    let out = run(&["scan", "--digits", "-1/2,1", "--q0", "1.5:2:2", "--q1", "1.5:2:2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.contains("2,2,Infinite"));
    assert!(csv.contains("3/2,3/2,TrivialOnly"));
}

#[test]
fn oracle_reports_extremal_agreement() {
    let f = system_file(r#"{"digits": [0, 1], "bases": [2, 2]}"#);
    let text = stdout(&run(&["oracle", f.to_str().unwrap(), "--x", "1/2", "--depth", "3"]));
    assert_eq!(field(&text, "survivors"), "2");
    assert!(text.contains("  011\n  100\n"));
    assert_eq!(text.matches(" agrees").count(), 4);
}

#[test]
fn classify_prints_evidence() {
    let f = system_file(r#"{"digits": [0, 1], "bases": [1.9, 1.9]}"#);
    let text = stdout(&run(&["classify", f.to_str().unwrap()]));
    assert_eq!(field(&text, "class"), "Continuum");
    assert!(text.contains("α^0"));
}

#[test]
fn validation_and_uniqueness() {
    let f = system_file(r#"{"digits": [0, 1], "bases": [2, 2]}"#);
    let path = f.to_str().unwrap();
    let text = stdout(&run(&["validate", path, "--seq", "10^inf", "--kind", "greedy"]));
    assert_eq!(text.trim(), "Valid");
    let text = stdout(&run(&["validate", path, "--seq", "01^inf", "--kind", "greedy"]));
    assert_eq!(text.trim(), "Invalid at position 1");
    let text = stdout(&run(&["unique", path, "--x", "1/3"]));
    assert_eq!(text.trim(), "Unique");
}

#[test]
fn exit_codes() {
    let binary = system_file(r#"{"digits": [0, 1], "bases": [2, 2]}"#);
    let path = binary.to_str().unwrap();
    let missing = system_file(r#"{"digits": [0, 1]}"#);
    assert_eq!(run(&["check", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["expand", path, "--x", "1/0"]).status.code(), Some(2));
    assert_eq!(run(&["expand", path, "--x", "1", "--kind", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["expand", path, "--x", "2"]).status.code(), Some(3));
    let wide = system_file(r#"{"digits": [0, 1], "bases": [3, 3]}"#);
    assert_eq!(run(&["classify", wide.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(
        run(&["scan", "--digits", "0,1", "--q0", "0.5:2:3", "--q1", "1.5:2:3"]).status.code(),
        Some(3)
    );
    let golden = system_file(GOLDEN);
    assert_eq!(run(&["oracle", golden.to_str().unwrap(), "--x", "1"]).status.code(), Some(3));

    let lenient = run(&["validate", path, "--seq", "0101…"]);
    assert_eq!(lenient.status.code(), Some(0));
    assert_eq!(stdout(&lenient).trim(), "Undetermined at depth 64");
    assert_eq!(run(&["--strict", "validate", path, "--seq", "0101…"]).status.code(), Some(4));
}

#[test]
fn output_is_deterministic() {
    let f = system_file(r#"{"digits": [-1, 0, 1], "bases": ["5/2", "2", "9/4"]}"#);
    let path = f.to_str().unwrap();
    for args in [
        vec!["alphas", path, "--digits", "40"],
        vec!["classify", path],
        vec!["oracle", path, "--x", "1/7", "--depth", "6", "--census"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
    let a = run(&["scan", "--digits", "0,1", "--q0", "1.2:2:7", "--q1", "1.2:2:7"]);
    let b = run(&["scan", "--digits", "0,1", "--q0", "1.2:2:7", "--q1", "1.2:2:7"]);
    assert_eq!(a.stdout, b.stdout);
}
