use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const GOLDEN: &str = r#"{"p":3,"f":1,"a":["9"],"b":["3"],"c":["1"],
  "filt":[{"type":"F0","k1":1,"k2":2,"x1":"0","x2":0,"x2p":0}]}"#;

fn phimod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phimod")).args(args).output().expect("binary runs")
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_wa_golden_is_byte_exact() {
    let g = file(GOLDEN);
    let out = phimod(&["check-wa", "--in", path(&g)]);
    assert_eq!(out.status.code(), Some(0));
    let expected = concat!(
        r#"{"admissible":true,"admissible_submodules":["D0","D1","D2","D01","D02","D12"],"balanced":true,"#,
        r#""irreducible":false,"slack":{"D0":"equality","D01":"equality","D02":"equality","D1":"equality","#,
        r#""D12":"equality","D2":"equality"}}"#,
        "\n"
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn check_wa_oracle_and_literal_variant() {
    let g = file(GOLDEN);
    let out = phimod(&["check-wa", "--in", path(&g), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mismatch"], Value::Bool(false));

    // v(Nm) = (0,1,1) with one F1 embedding, x2 = 1: the literal reading
    // of the D0 inequality disagrees with the oracle.
    let f1 = file(r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["6"],"filt":[{"type":"F1","k":1,"x2":1,"x2p":0}]}"#);
    let out = phimod(&["check-wa", "--in", path(&f1), "--oracle", "--variant", "literal-d0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["mismatch"], Value::Bool(true));
    let out = phimod(&["check-wa", "--in", path(&f1), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invalid_inputs_exit_1() {
    let cases = [
        r#"{"p":3,"f":1,"a":["1"],"b":["1"],"c":["3"],"filt":[{"type":"F3"}]}"#,
        r#"{"p":4,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#,
        r#"{"p":3,"f":2,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#,
        r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F1","k":1,"x2":2,"x2p":0}]}"#,
        r#"{"p":3,"f":1,"a":["1/0"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#,
        r#"{"p":3,"f":1,"a":["0"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#,
        r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F0","k1":2,"k2":2,"x1":"0","x2":0,"x2p":0}]}"#,
        r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"extra":1}"#,
        "not json",
    ];
    for text in cases {
        let f = file(text);
        let out = phimod(&["validate", "--in", path(&f)]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{text}");
    }
    assert_eq!(phimod(&["validate", "--in", "/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn usage() {
    assert_eq!(phimod(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(phimod(&["selftest", "--n", "0"]).status.code(), Some(1));
    assert_eq!(phimod(&["--help"]).status.code(), Some(0));
}

#[test]
fn iso_with_witness_and_oracle() {
    let m = r#"{"p":3,"f":1,"a":["9"],"b":["3"],"c":["1"],"filt":[{"type":"F0","k1":1,"k2":2,"x1":"X","x2":1,"x2p":1}]}"#;
    let l = file(&m.replace('X', "5"));
    let r = file(&m.replace('X', "5"));
    let s = file(&m.replace('X', "7"));
    let out = phimod(&["iso", "--left", path(&l), "--right", path(&r), "--witness", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["isomorphic"], Value::Bool(true));
    assert_eq!(v["oracle_agrees"], Value::Bool(true));
    assert_eq!(v["witness"]["valid"], Value::Bool(true));

    let out = phimod(&["iso", "--left", path(&l), "--right", path(&s), "--witness", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["isomorphic"], Value::Bool(false));
    assert_eq!(v["witness"], Value::Null);
    assert_eq!(v["oracle_agrees"], Value::Bool(true));
}

#[test]
fn normalize_pivot_example() {
    let raw = file(
        r#"{"p":3,"f":1,"a":["2"],"b":["5"],"c":["7"],
            "raw_filtration":[{"k1":1,"k2":2,"u":["1","2","3"],"v":["0","1","4"],"lambda":"1","mu":"1"}]}"#,
    );
    let out = phimod(&["normalize", "--in", path(&raw)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["representable"], Value::Bool(true));
    assert_eq!(v["permutation"], serde_json::json!([0, 1, 2]));
    let filt = &v["module"]["filt"][0];
    assert_eq!(filt["x1"], "-12/5");
    assert_eq!((filt["x2"].as_u64(), filt["x2p"].as_u64()), (Some(1), Some(1)));
    assert_eq!(v["rescaling"], serde_json::json!([["-4/5"], ["1"], ["4"]]));
}

#[test]
fn normalize_not_representable_exits_2() {
    let raw = file(
        r#"{"p":3,"f":2,"a":["2","1"],"b":["5","1"],"c":["7","1"],
            "raw_filtration":[{"k1":1,"k2":1,"u":["0","0","1"],"v":["1","0","0"]},
                              {"k1":1,"k2":1,"u":["1","0","0"],"v":["0","1","0"]}]}"#,
    );
    let out = phimod(&["normalize", "--in", path(&raw)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["representable"], Value::Bool(false));
}

#[test]
fn monodromy_commands() {
    let fro = file(r#"{"p":3,"f":2,"a":["1","1"],"b":["3","3"],"c":["27","3"],"monodromy":{"12":"1"}}"#);
    let out = phimod(&["monodromy", "--in", path(&fro), "--positions"]);
    assert_eq!(json(&out)["eligible"], serde_json::json!(["12", "23"]));

    let out = phimod(&["monodromy", "--in", path(&fro)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["matrix"][0][1], serde_json::json!(["1", "1"]));
    assert_eq!(v["validation"]["valid"], Value::Bool(true));

    let out = phimod(&["monodromy", "--in", path(&fro), "--entries", r#"{"12":"2","23":"1/3"}"#]);
    assert_eq!(out.status.code(), Some(0));

    for bad in [r#"{"13":"1"}"#, r#"{"12":"1","21":"1"}"#, r#"{"44":"1"}"#, "{"] {
        let out = phimod(&["monodromy", "--in", path(&fro), "--entries", bad]);
        assert_eq!(out.status.code(), Some(1), "{bad}");
    }
}

#[test]
fn generate_is_deterministic() {
    let a = phimod(&["generate", "--seed", "9", "--n", "3", "--target", "admissible"]);
    let b = phimod(&["generate", "--seed", "9", "--n", "3", "--target", "admissible"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let docs = json(&a);
    assert_eq!(docs.as_array().unwrap().len(), 3);

    // Each generated document is accepted and admissible.
    let one = file(&docs[1].to_string());
    assert_eq!(json(&phimod(&["check-wa", "--in", path(&one)]))["admissible"], Value::Bool(true));

    let out = phimod(&["generate", "--target", "irreducible", "--type-weights", "0,0,0,1", "--max-retries", "20"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("20"));
}

#[test]
fn selftest_runs() {
    let out = phimod(&["selftest", "--n", "30", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], Value::Bool(true));

    let out = phimod(&["selftest", "--n", "30", "--seed", "4", "--variant", "literal-d0"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let c = &v["counterexamples"][0];
    assert_eq!(c["property"], "weak_admissibility");
    assert!(c["instance"]["filt"].as_array().unwrap().iter().any(|e| e["type"] == "F1"));
}
