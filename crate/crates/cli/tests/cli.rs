use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(rel)
}

fn program(name: &str) -> String {
    corpus(&format!("programs/{name}.dcbpv")).display().to_string()
}

fn source(name: &str) -> String {
    corpus(&format!("source/{name}.dtt")).display().to_string()
}

fn dcbpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcbpv"))
        .args(args)
        .env("DCBPV_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = dcbpv(&a);
    (code(&o), serde_json::from_str(&stdout(&o)).expect("valid JSON"))
}

#[test]
fn check_prints_the_type() {
    let o = dcbpv(&["check", &program("id"), "--variant", "minus"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "OK: F Unit");
}

#[test]
fn run_state_program() {
    let o = dcbpv(&["run", &program("state")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "Returned (2,()) | printed ε | state s1 | 4 steps");
}

#[test]
fn cbv_into_minus_is_rejected() {
    let o = dcbpv(&["translate", &source("src_pair"), "--strategy", "cbv", "--variant", "minus"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("CbvNeedsPlus"));
    let (c, j) = json(&["translate", &source("src_pair"), "--strategy", "cbv", "--variant", "minus"]);
    assert_eq!(c, 1);
    assert_eq!(j["error"]["kind"], "CbvNeedsPlus");
}

#[test]
fn dependent_source_under_cbn_minus_is_rejected() {
    let o = dcbpv(&["translate", &source("src_dep_bool"), "--strategy", "cbn", "--variant", "minus"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("DependentElimNeedsPlus"));
}

fn translate_and_run(src: &str, strategy: &str, variant: &str) -> Value {
    let o = dcbpv(&["translate", &source(src), "--strategy", strategy, "--variant", variant]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(format!("{src}_{strategy}_{variant}.dcbpv"));
    std::fs::write(&path, stdout(&o)).unwrap();
    let path = path.display().to_string();
    assert_eq!(code(&dcbpv(&["check", &path])), 0);
    let (c, j) = json(&["run", &path]);
    assert_eq!(c, 0);
    j["outcomes"][0].clone()
}

#[test]
fn translated_programs_reparse_and_run() {
    assert_eq!(translate_and_run("src_print_twice", "cbv", "plus")["printed"], "a");
    assert_eq!(translate_and_run("src_print_twice", "cbn", "minus")["printed"], "aa");
    assert_eq!(translate_and_run("src_dep_bool", "cbv", "plus")["kind"], "Returned");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&dcbpv(&["run", &program("diverge"), "--fuel", "100"])), 2);
    assert_eq!(code(&dcbpv(&["run", &program("error_halt")])), 3);
    assert_eq!(code(&dcbpv(&["run", &program("id"), "--bogus"])), 4);
    assert_eq!(code(&dcbpv(&["run", &program("id"), "--scheduler", "sometimes"])), 4);
    assert_eq!(code(&dcbpv(&["check", "/nonexistent.dcbpv"])), 1);
    assert_eq!(code(&dcbpv(&["--help"])), 0);
}

#[test]
fn diverge_reports_fuel() {
    let (c, j) = json(&["run", &program("diverge"), "--fuel", "100"]);
    assert_eq!(c, 2);
    assert_eq!(j["outcomes"][0]["kind"], "FuelExhausted");
    assert_eq!(j["outcomes"][0]["steps"], 100);
}

#[test]
fn shrinking_can_be_disabled() {
    assert_eq!(code(&dcbpv(&["check", &program("shrink_print")])), 0);
    let (c, j) = json(&["check", &program("shrink_print"), "--no-shrink"]);
    assert_eq!(c, 1);
    assert_eq!(j["ok"], false);
}

#[test]
fn variant_flag_overrides_pragma() {
    let (c, j) = json(&["check", &program("shrink_choose")]);
    assert_eq!((c, j["variant"].as_str()), (0, Some("plus")));
    let (c, _) = json(&["check", &program("shrink_choose"), "--variant", "minus"]);
    assert_eq!(c, 1);
}

#[test]
fn trace_lines() {
    let o = dcbpv(&["trace", &program("state")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("0: START ⟨"));
    assert!(lines[1].starts_with("1: TO-PUSH ⟨write s1 return ()"));
    assert!(lines[2].starts_with("2: WRITE ⟨"));
    assert!(lines[3].starts_with("3: RETURN-POP ⟨"));
    assert!(lines[4].starts_with("4: READ ⟨return (2, ()), nil, ε, s1⟩"));
    assert_eq!(lines[5], "Returned (2,()) | printed ε | state s1 | 4 steps");
}

#[test]
fn schedulers() {
    let p = program("choose_two");
    let first = stdout(&dcbpv(&["run", &p]));
    assert!(first.starts_with("Returned (1,())"));
    assert!(stdout(&dcbpv(&["run", &p, "--scheduler", "fixed:2"])).starts_with("Returned (2,())"));
    let all = stdout(&dcbpv(&["run", &p, "--scheduler", "all"]));
    assert_eq!(all.lines().count(), 2);
    let short = dcbpv(&["run", &p, "--scheduler", "fixed:"]);
    assert_eq!(code(&short), 1);
    for seed in 0..4 {
        let a = stdout(&dcbpv(&["run", &p, "--scheduler", &format!("seeded:{seed}")]));
        let b = stdout(&dcbpv(&["run", &p, "--scheduler", &format!("seeded:{seed}")]));
        assert_eq!(a, b);
    }
}

#[test]
fn interactive_scheduler_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dcbpv"))
        .args(["run", &program("choose_two"), "--scheduler", "interactive"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"7\n2\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    let prompts = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(prompts.matches("choice 1 of 2?").count(), 2);
    assert!(stdout(&o).starts_with("Returned (2,())"));
}

#[test]
fn color_follows_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_dcbpv"))
            .args(["check", &program("id")])
            .env("DCBPV_COLOR", v)
            .output()
            .unwrap()
    };
    assert!(stdout(&run("1")).contains("\x1b[32m"));
    assert!(!stdout(&run("0")).contains('\x1b'));
}

#[test]
fn explain_lists_rewrites() {
    let (c, j) = json(&["check", &program("id"), "--explain"]);
    assert_eq!(c, 0);
    assert_eq!(j["normal_form"], "return ()");
    assert_eq!(j["rewrites"][0]["rule"], "app-beta");
}

#[test]
fn text_and_json_agree_on_the_corpus() {
    let dir = corpus("programs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path().display().to_string();
        let text = dcbpv(&["run", &path, "--fuel", "500"]);
        let (c, j) = json(&["run", &path, "--fuel", "500"]);
        assert_eq!(code(&text), c, "{path}");
        let line = stdout(&text);
        let o = &j["outcomes"][0];
        assert!(line.contains(&format!("| {} steps", o["steps"])), "{path}: {line}");
        assert!(line.starts_with(o["kind"].as_str().unwrap()), "{path}: {line}");
        n += 1;
    }
    assert!(n >= 40);
}

#[test]
fn model_check_theory() {
    let (c, j) = json(&["model-check", "--theory", "--max-base", "2", "--max-errors", "1"]);
    assert_eq!(c, 0);
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20 * 2 * 2);
    assert!(rows.iter().all(|r| r["equal"] == true && r["instantiations"].as_u64().unwrap() > 0));
}

#[test]
fn model_check_file() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("laws.dcbpv");
    std::fs::write(
        &path,
        "effects { errors { e }; enable error }\n\
         law good (v : Bool) : F Bool = return v to x. return x == return v;\n\
         law bad () : F Unit = (error e : F Unit) to x. return () == return ();\n",
    )
    .unwrap();
    let p = path.display().to_string();
    let o = dcbpv(&["model-check", &p]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("good") && l.ends_with("Equal")));
    assert!(out.lines().any(|l| l.starts_with("bad") && l.contains("Counterexample")), "{out}");
}
