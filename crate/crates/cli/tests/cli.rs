use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn bialg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bialg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn sections(text: &str) -> Vec<&str> {
    text.lines().filter(|l| l.starts_with("== ")).collect()
}

#[test]
fn subcommands_run_their_stage_sets() {
    let w = fixture("example_w.toml");
    let w = w.to_str().unwrap();
    let expect = [
        ("verify", vec!["verify-coalgebras", "verify-free-bialgebra", "verify-lift"]),
        ("relations", vec!["relations", "coideal-check"]),
        ("antipode", vec!["antipode"]),
        ("closure", vec!["closure", "hopf-check"]),
    ];
    for (cmd, stages) in expect {
        let out = bialg(&[cmd, "--input", w]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stdout(&out));
        let text = stdout(&out);
        let got: Vec<String> = sections(&text).iter().map(|s| s[3..].split(':').next().unwrap().to_string()).collect();
        assert_eq!(got, stages, "{cmd}");
    }
}

#[test]
fn stage_flag_selects_one_section() {
    let out =
        bialg(&["report", "--input", fixture("example_w.toml").to_str().unwrap(), "--stages", "verify-coalgebras"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(sections(&text), vec!["== verify-coalgebras: PASS =="]);
    assert!(text.contains("stages not requested: verify-free-bialgebra, verify-lift"));
}

#[test]
fn overrides_appear_in_every_claim() {
    let out = bialg(&[
        "relations",
        "--input",
        fixture("trivial.toml").to_str().unwrap(),
        "--truncation",
        "4",
        "--max-degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("truncation N = 4, degree bound d = 1"));
    assert!(text.contains("degree 1 kernel: dim 2 of 3 (N = 4: 2, N = 5: 2; stable) [N = 4, d = 1]"), "{text}");
    assert!(!text.contains("degree 2 kernel"));
}

#[test]
fn emit_writes_a_reusable_document() {
    let dir = std::env::temp_dir().join(format!("bialg-emit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let emitted = dir.join("w.toml");
    let out =
        bialg(&["report", "--input", fixture("example_w.toml").to_str().unwrap(), "--emit", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&emitted).unwrap();
    assert!(text.contains("[results.closure]"));
    assert!(text.contains("[[results.relations.degree_1]]"));
    let again = bialg(&["report", "--input", emitted.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_with_two() {
    let missing = bialg(&["report", "--input", "/nonexistent/doc.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_stage =
        bialg(&["report", "--input", fixture("example_w.toml").to_str().unwrap(), "--stages", "closure,nope"]);
    assert_eq!(bad_stage.status.code(), Some(2));
    let zero = bialg(&["report", "--input", fixture("example_w.toml").to_str().unwrap(), "--max-degree", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    let parse = bialg(&["verify", "--input", fixture("failing/parse_error.toml").to_str().unwrap()]);
    let err = String::from_utf8(parse.stderr).unwrap();
    assert!(err.contains("line 9, column 5"), "{err}");
}

#[test]
fn failed_precondition_skips_dependents() {
    let out = bialg(&["report", "--input", fixture("failing/missing_diag_pairs.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("== antipode: FAILED-PRECONDITION =="));
    assert!(text.contains("== closure: SKIPPED (antipode did not pass) =="));
    assert!(text.contains("== hopf-check: SKIPPED (closure did not pass) =="));
    assert!(text.contains("== relations: PASS =="));
}

#[test]
fn general_solver_runs_on_request() {
    let out = bialg(&["antipode", "--input", fixture("example_w.toml").to_str().unwrap()]);
    assert!(stdout(&out).contains("method: triangular"));
    let doc = std::fs::read_to_string(fixture("example_w.toml")).unwrap() + "antipode = \"general\"\n";
    let dir = std::env::temp_dir().join(format!("bialg-general-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.toml");
    std::fs::write(&path, doc).unwrap();
    let out = bialg(&["antipode", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("method: general, solution unique in the operator algebra: true"), "{text}");
    assert!(text.contains("Y(l[2,1]) = -l[2,1]"));
    std::fs::remove_dir_all(&dir).unwrap();
}
