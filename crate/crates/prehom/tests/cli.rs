use std::path::Path;
use std::process::{Command, Output};

use prehom::commands;
use prehom::format::{form_to_json, parse_form, AnyForm};
use prehom_core::representatives::{make_rep, RepName};
use serde_json::Value;

fn prehom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prehom")).args(args).output().expect("binary runs")
}

fn prehom_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prehom"))
        .args(args)
        .env("PREHOM_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, v: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v).unwrap();
    p.to_str().unwrap().to_string()
}

const REPS: [(&str, Option<i64>, Option<usize>); 8] = [
    ("case1_w", None, None),
    ("case1_w1", None, None),
    ("case1_walpha", Some(2), None),
    ("case1_walpha", Some(-1), None),
    ("case2_w", None, None),
    ("case2_wprime", None, None),
    ("case2_w1", None, None),
    ("case3_w", None, Some(3)),
];

#[test]
fn rep_matches_library_and_round_trips() {
    for (tag, d, n) in REPS {
        let mut args = vec!["rep".to_string(), tag.to_string()];
        if let Some(d) = d {
            args.push(format!("--d={d}"));
        }
        if let Some(n) = n {
            args.extend(["--n".into(), n.to_string()]);
        }
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = json_of(&prehom(&argv));
        let lib = form_to_json(&make_rep(RepName::parse(tag, d, n).unwrap()).unwrap(), None);
        assert_eq!(out, lib, "{tag}");
        let again = parse_form(&out.to_string()).unwrap().to_json();
        assert_eq!(again, out, "{tag}");
    }
}

#[test]
fn invariant_and_stab_are_thin_wrappers() {
    let dir = tempfile::tempdir().unwrap();
    for (tag, d, n) in REPS {
        let x = make_rep(RepName::parse(tag, d, n).unwrap()).unwrap();
        let text = form_to_json(&x, None).to_string();
        let f = write(dir.path(), "x.json", &text);
        let any = AnyForm::Rational(x);
        assert_eq!(json_of(&prehom(&["invariant", &f])), commands::invariant(&any).unwrap(), "{tag}");
        assert_eq!(json_of(&prehom(&["classify", &f])), commands::classify(&any, 100_000, 1e-12).unwrap(), "{tag}");
    }
    let w = write(dir.path(), "w.json", &form_to_json(&make_rep(RepName::Case2W).unwrap(), None).to_string());
    assert_eq!(json_of(&prehom(&["stab", &w]))["dimension"], 14);
    assert_eq!(json_of(&prehom(&["fixed", &w]))["dimension"], 1);
}

#[test]
fn invariant_golden_values() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"dim":6,"degree":3,"scalar":"rational","coeffs":{"1,2,3":"1","4,5,6":"1"}}"#);
    let v = json_of(&prehom(&["invariant", &w]));
    assert_eq!(v["case"], 1);
    assert_eq!(v["delta"], "1");
    let w7 = write(dir.path(), "w7.json", &json_of(&prehom(&["rep", "case2_w"])).to_string());
    let v = json_of(&prehom(&["invariant", &w7]));
    assert_eq!(v["delta"], "6");
    assert_eq!(v["q_gram"][0][0], "-6");
    assert_eq!(v["q_gram"][1][4], "3");
    let f = write(dir.path(), "f.json", r#"{"dim":4,"degree":2,"scalar":"float","coeffs":{"1,3":1.0,"2,4":2.5}}"#);
    assert_eq!(json_of(&prehom(&["invariant", &f]))["pfaffian"], -2.5);
}

#[test]
fn parse_errors_are_distinct_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"dim":6,"degree":3,"coeffs":{"2,1,3":"1"}}"#, "indices not strictly increasing"),
        (r#"{"dim":6,"degree":3,"coeffs":{"1,2,3":"1/0"}}"#, "zero denominator"),
        (r#"{"dim":6,"degree":3,"coeffs":{"1,2,3":"1"}"#, "malformed JSON"),
        (r#"{"dim":6,"degree":3,"coeffs":{"1,2,x":"1"}}"#, "bad index tuple"),
    ];
    for (text, msg) in cases {
        let f = write(dir.path(), "bad.json", text);
        let o = prehom(&["invariant", &f]);
        assert_eq!(o.status.code(), Some(1));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(msg), "{err}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(prehom(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(prehom(&["rep", "case1_w", "--unknown"]).status.code(), Some(2));
    assert_eq!(prehom(&["octonion", "c-form", "--algebra", "sedenion"]).status.code(), Some(2));
    assert_eq!(prehom(&["rep", "case1_walpha"]).status.code(), Some(1));
}

#[test]
fn octonion_commands() {
    let c = json_of(&prehom(&["octonion", "c-form", "--algebra", "split"]));
    assert_eq!(c["coeffs"]["2,3,4"], "1/2");
    assert_eq!(c["coeffs"].as_object().unwrap().len(), 5);
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", &json_of(&prehom(&["rep", "case2_w"])).to_string());
    let t = json_of(&prehom(&["octonion", "table", &w]));
    assert_eq!(t["checks"]["norm_multiplicative"], true);
    assert_eq!(t["checks"]["alternative"], true);
    assert_eq!(t["checks"]["norm_definite"], false);
    let w1 = write(dir.path(), "w1.json", &json_of(&prehom(&["rep", "case2_w1"])).to_string());
    assert_eq!(json_of(&prehom(&["octonion", "table", &w1]))["checks"]["norm_definite"], true);
    let bad = write(dir.path(), "p.json", &json_of(&prehom(&["rep", "case2_wprime"])).to_string());
    assert_eq!(prehom(&["octonion", "table", &bad]).status.code(), Some(1));
}

#[test]
fn perturb_cli() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"values":{"1,2":0.25,"1,3":-0.5,"2,3":0.75}}"#);
    let v = json_of(&prehom(&["perturb", "3", &t, "--epsilon", "0.01", "--n", "2"]));
    assert_eq!(v["certificate"]["holds"], true);
    assert_eq!(v["certificate"]["orbit"], "case3_nondegenerate");
    assert_eq!(v["form"]["coeffs"]["1,2"], 0.25);

    let vals: Vec<String> = prehom_core::perturb::constrained_indices(prehom_core::FormShape::Case1)
        .iter()
        .enumerate()
        .map(|(k, i)| format!("\"{}\": {}", prehom::format::index_key(i), (k as f64 - 4.5) / 10.0))
        .collect();
    let t1 = write(dir.path(), "t1.json", &format!("{{\"values\": {{{}}}}}", vals.join(",")));
    for (sign, orbit) in [("+", "case1_positive"), ("-", "case1_negative")] {
        let v = json_of(&prehom(&["perturb", "1", &t1, "--epsilon", "0.1", "--sign", sign]));
        assert_eq!(v["certificate"]["orbit"], orbit);
        assert!(v["certificate"]["deviation"].as_f64().unwrap() < 0.1);
    }
    assert_eq!(prehom(&["perturb", "3", &t, "--epsilon", "0.01"]).status.code(), Some(1));
}

#[test]
fn approximate_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        r#"{"dim":4,"degree":2,"scalar":"float","coeffs":{"1,3":1.0,"2,4":1.4142135623730951,"1,4":0.7320508075688772}}"#,
    );
    let t = write(dir.path(), "t.json", r#"{"values":{"1,2":0.3,"1,3":-0.6,"2,3":0.9}}"#);
    let args = ["approximate", &x, &t, "--epsilon", "1e-9", "--depth", "4", "--beam", "16", "--seed", "11"];
    let one = prehom_env(&args, "1");
    let four = prehom_env(&args, "4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v = json_of(&one);
    let trace: Vec<f64> = v["trace"]["best_so_far"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(trace.len(), 5);
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(v["basis"].as_array().unwrap().len(), 4);
    assert_eq!(v["seed"], 11);
    assert!(v["trace"]["note"].as_str().unwrap().contains("not a convergence rate"));
}

#[test]
fn verify_reports_every_row() {
    let o = prehom(&["verify"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let failed = rows.iter().filter(|r| r["pass"] == false).count();
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 1 }));
    let q = rows.iter().find(|r| r["name"] == "Q_w").unwrap();
    assert_eq!(q["pass"], true);
    assert!(rows.iter().any(|r| r["name"] == "fixed-space case1 dim = 2" && r["pass"] == true));
    let pretty = prehom(&["--pretty", "verify"]);
    assert!(String::from_utf8_lossy(&pretty.stdout).lines().any(|l| l.starts_with("PASS  Q_w ")));
}
