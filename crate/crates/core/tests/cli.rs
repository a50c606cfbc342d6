use std::path::PathBuf;
use std::process::{Command, Output};

fn grammar(file: &str) -> String {
    format!("{}/grammars/{file}", env!("CARGO_MANIFEST_DIR"))
}

fn ggroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggroup")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ggroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn generate_prints_sentences() {
    let o = ggroup(&["generate", &grammar("english.gg"), "s(j,l)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "john saw louise\n");
}

#[test]
fn parse_prints_readings() {
    let o = ggroup(&["parse", &grammar("english.gg"), "every man saw some woman"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ev(m,#x1,sm(w,#x2,s(#x1,#x2)))\nsm(w,#x1,ev(m,#x2,s(#x2,#x1)))\n");
}

#[test]
fn no_result_exits_one() {
    let o = ggroup(&["parse", &grammar("english.gg"), "john louise"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "");
}

#[test]
fn input_errors_exit_two_with_positions() {
    let o = ggroup(&["generate", &grammar("english.gg"), "s(j,"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("input:1:"), "{}", stderr(&o));

    let o = ggroup(&["generate", &grammar("english.gg"), "s(j,X)"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ggroup(&["parse", &grammar("english.gg"), "john swam"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("swam"));

    let bad = scratch("bad.gg", "phon a .\nrelator f(A a^-1 .\n");
    let o = ggroup(&["generate", bad.to_str().unwrap(), "f(a)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.gg:2:"), "{}", stderr(&o));

    let o = ggroup(&["generate", "/nonexistent/g.gg", "s"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ggroup(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn truncation_exits_three() {
    let o = ggroup(&["generate", &grammar("cfg_often.gg"), "s", "--max-results", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(stderr(&o).contains("truncated"));
}

#[test]
fn traces_are_printed_and_replayable() {
    let o = ggroup(&["generate", &grammar("english.gg"), "ev(m,#x,r(#x))", "--trace", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("every man ran"));
    let trace: String = lines.map(|l| format!("{}\n", l.trim_start())).collect();
    assert!(trace.starts_with("direction generate\n"));
    let path = scratch("ev.trace", &trace);
    let o = ggroup(&["replay", &grammar("english.gg"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("ok:"));

    let tampered = trace.replace("end every man ran", "end every man saw");
    let path = scratch("ev-bad.trace", &tampered);
    let o = ggroup(&["replay", &grammar("english.gg"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid:"));
}

#[test]
fn json_output() {
    let o = ggroup(&["parse", &grammar("english.gg"), "john ran", "--format", "json", "--trace", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"][0]["value"], "r(j)");
    assert_eq!(v["results"][0]["derivation"]["direction"], "parse");
    assert_eq!(v["truncated"], false);

    let trace = serde_json::to_string(&v["results"][0]["derivation"]).unwrap();
    let path = scratch("ran.json", &trace);
    let o = ggroup(&["replay", &grammar("english.gg"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn check_reports_reversibility() {
    let o = ggroup(&["check", &grammar("english.gg")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("inherently reversible"));
    let o = ggroup(&["check", &grammar("cfg_often.gg")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("criterion not met"));
    assert!(stdout(&o).contains("vp -> often vp"));
}

#[test]
fn reduce_words() {
    let o = ggroup(&["reduce", "a b b^-1 c c^-1 a^-1 d"]);
    assert_eq!(stdout(&o), "d\n");
    let o = ggroup(&["reduce", "x x^-1"]);
    assert_eq!(stdout(&o), "1\n");
    let o = ggroup(&["reduce", "s(j,l) louise^-1 louise saw^-1", "--grammar", &grammar("english.gg")]);
    assert_eq!(stdout(&o), "s(j,l) saw^-1\n");
    let o = ggroup(&["reduce", "a^-"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn logic_programs_match_the_oracle() {
    let o = ggroup(&["logic", &grammar("programs/path.pl")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("MATCH (9 facts)"));
}

#[test]
fn logic_bound_truncates() {
    let p = scratch("loop.pl", "n(z) .\nn(s(X)) :- n(X) .\n");
    let o = ggroup(&["logic", p.to_str().unwrap(), "--bound", "4", "--max-results", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zero_limits_are_rejected() {
    let o = ggroup(&["generate", &grammar("english.gg"), "s(j,l)", "--max-states", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
