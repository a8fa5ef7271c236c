//! End-to-end runs of the command-line binary.

use std::process::{Command, Output};

use tame_density::symbolic::json::fracpoly_from_json;
use tame_density::symbolic::{rat_int, Exp, FracPoly, UPoly, Var};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tame-density"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compute_prints_both_notations_and_value() {
    let o = run(&["compute", "--sigma", "e1f2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("rho = (q^2 - q + 1)/(2*(q^2 + q + 1))"),
        "{text}"
    );
    assert!(text.contains("sigma (e,f pairs): e1f2"));
    assert!(text.contains("sigma (f^e): (2^1)"));
}

#[test]
fn verify_degree_two_passes() {
    let o = run(&["verify", "--degree-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("sum_rho = 1: PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn oracle_matches_ramified_quadratic() {
    let o = run(&["oracle", "--sigma", "e2f1", "-p", "5", "--cmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("a(c=1) p=5 b=[0]: oracle = 4/5, engine = 4/5, match: true"),
        "{text}"
    );
    assert!(text.contains("a(c=3) p=5 b=[0]: oracle = 4/25, engine = 4/25, match: true"));
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_eq!(
        run(&["compute", "--sigma", "e1f1,x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--sigma", "e2f1@e1f2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--sigma", "e3f1", "-p", "3"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["compute", "--sigma", "e1f1", "-p", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "oracle",
        "--sigma",
        "e1f1,e1f1",
        "-p",
        "3",
        "--cmax",
        "2",
        "--samples",
        "20000",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let t1 = run(&["table", "--degree-max", "3", "--format", "csv", "-p", "5"]);
    let t2 = run(&["table", "--degree-max", "3", "--format", "csv", "-p", "5"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn json_values_round_trip() {
    let o = run(&["compute", "--sigma", "e1f1,e1f2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rec = &doc["records"][0];
    assert_eq!(rec["quantity"], "rho");
    let f = fracpoly_from_json(&rec["value"]).unwrap();
    let num = UPoly::x_pow(Exp::from_integer(4), rat_int(1)).add(&UPoly::one());
    let den = (0..5).fold(UPoly::zero(), |acc, k| {
        acc.add(&UPoly::x_pow(Exp::from_integer(k), rat_int(2)))
    });
    assert_eq!(f, FracPoly::from_ratio(Var::Q, num, den).unwrap());
}

#[test]
fn csv_schema_and_emit() {
    let dir = std::env::temp_dir().join(format!("tame-density-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let o = run(&[
        "table",
        "--degree-max",
        "2",
        "--format",
        "csv",
        "--emit",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sigma,e_base,f_base,quantity,value_numerator,value_denominator")
    );
    assert!(text.contains("\"e1f1,e1f1\",1,1,rho,1,2"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn conjecture_reports_symmetry_over_a_relative_base() {
    let o = run(&["conjecture", "--base", "e2f1", "--degree-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("bivariate_symmetry: PASS"));
    assert!(text.contains("base: e2f1"));
}
