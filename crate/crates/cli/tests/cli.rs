use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).to_string_lossy().into_owned()
}

fn acat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acat")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("acat-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn run_counts_traces() {
    let o = acat(&["run", "--program", &corpus("example1.async"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["count"], 1);
    assert_eq!(j["file_correct"], true);
    let o = acat(&["run", "--program", &corpus("example2.async"), "--json"]);
    assert_eq!(stdout_json(&o)["count"], 4);
}

#[test]
fn run_is_deterministic() {
    let a = acat(&["run", "--program", &corpus("example2.async"), "--dump", "--json"]);
    let b = acat(&["run", "--program", &corpus("example2.async"), "--dump", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn run_reports_file_violation() {
    let p = scratch("bad.async", "m() { write(\"a\"); return } { m() }");
    let o = acat(&["run", "--program", &p, "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = stdout_json(&o);
    assert!(j["traces"][0]["violation_position"].is_u64());
}

#[test]
fn calltree_of_prefix() {
    let o = acat(&["calltree", "--program", &corpus("example2.async"), "--until", "ret(2)", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(j["schedule"], serde_json::json!(["(m3,4)", "(m4,5)"]));
    let o = acat(&["calltree", "--program", &corpus("example2.async"), "--items", "5", "--json"]);
    assert_eq!(stdout_json(&o)["vertices"], serde_json::json!(["(init,0)"]));
    let o = acat(&["calltree", "--program", &corpus("example2.async"), "--items", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_member() {
    let t = scratch(
        "t.json",
        r#"[{"kind":"state","bindings":{}},{"kind":"event","tag":"open","file":"a"},{"kind":"state","bindings":{}}]"#,
    );
    let o = acat(&["check-member", "--trace", &t, "--formula", "~ open(f) ~", "--val", "f=\"a\""]);
    assert_eq!(o.status.code(), Some(0));
    let o = acat(&["check-member", "--trace", &t, "--formula", "~[open(f)]", "--val", "f=\"a\""]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn adhere_and_mutation() {
    let o = acat(&["adhere", "--program", &corpus("example1.async"), "--contracts", &corpus("example1.cat")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let src = std::fs::read_to_string(corpus("example1.async")).unwrap().replace("!closeF();", "");
    let p = scratch("noclose.async", &src);
    let o = acat(&["adhere", "--program", &p, "--contracts", &corpus("example1.cat"), "--procedure", "operate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_case_study() {
    let o = acat(&["verify", "--program", &corpus("example1.async"), "--contracts", &corpus("example1.cat"), "--cross-check", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["accepted"], true);
    assert_eq!(j["proofs"].as_array().unwrap().len(), 4);
    assert_eq!(j["cross_check"]["adherent"], true);
}

#[test]
fn verify_mutated_contract_is_unproved() {
    let cat = std::fs::read_to_string(corpus("example1.cat")).unwrap().replace("internal: close(f) ~[open(f)];", "internal: ~;");
    let c = scratch("weak.cat", &cat);
    let o = acat(&["verify", "--program", &corpus("example1.async"), "--contracts", &c, "--procedure", "do"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("first open leaf: [final]"));
}

#[test]
fn verify_errors() {
    let o = acat(&["verify", "--program", &corpus("example1.async"), "--contracts", &corpus("example1.cat"), "--procedure", "nope"]);
    assert_eq!(o.status.code(), Some(3));
    let o = acat(&["verify", "--program", "/nonexistent.async", "--contracts", &corpus("example1.cat")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn subtype_and_max() {
    let cat = scratch(
        "chain.cat",
        "contract m { assume: ~; pre: [true] obs(file as f); internal: ~[close(f)]; post: [true]; continue: ~; }\n\
         contract m { assume: ~; pre: [true] obs(file as f); internal: ~; post: [true]; continue: ~; }",
    );
    assert_eq!(acat(&["subtype", "--contracts", &cat, "0", "0"]).status.code(), Some(0));
    let o = acat(&["subtype", "--contracts", &cat, "0", "1", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["condition"], "L2");
    let o = acat(&["max-contracts", "--contracts", &cat, "--json"]);
    assert_eq!(stdout_json(&o)["m"], serde_json::json!([1]));
}

#[test]
fn env_overrides_bounds() {
    let o = Command::new(env!("CARGO_BIN_EXE_acat"))
        .args(["run", "--program", &corpus("example2.async")])
        .env("ACAT_MAX_TRACES", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_round_trip() {
    let o = acat(&["parse", &corpus("example1.async")]);
    assert_eq!(o.status.code(), Some(0));
    let again = scratch("pp.async", &String::from_utf8_lossy(&o.stdout));
    let o2 = acat(&["parse", &again]);
    assert_eq!(o.stdout, o2.stdout);
    assert_eq!(acat(&["parse", &corpus("example1.cat"), "--json"]).status.code(), Some(0));
}
