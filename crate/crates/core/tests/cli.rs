use std::process::{Command, Output};

use serde_json::Value;
use strange_qmf::cyclotomic::{Cyclotomic, CyclotomicJson};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strange-qmf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn strange_text_output() {
    let o = run(&["strange", "--component", "1", "--x", "1/3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3 - 2*z3\n4.0000 - 1.7321i\n");
}

#[test]
fn strange_trivial_point() {
    let o = run(&["strange", "--component", "F", "--x", "0/1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("1"));
}

#[test]
fn strange_domain_violation_exits_2_with_reason() {
    let o = run(&["strange", "--component", "1", "--x", "1/2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["error"], "OutsideDomain");
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn strange_singular_denominator_exits_3() {
    let o = run(&["strange", "--component", "2", "--x", "4/3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn strange_json_round_trips() {
    let o = run(&["strange", "--component", "1", "--x", "-2/7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let cj: CyclotomicJson = serde_json::from_value(v["value"].clone()).unwrap();
    let parsed = Cyclotomic::from_json(&cj).unwrap();
    let printed: Cyclotomic = v["exact"].as_str().unwrap().parse().unwrap();
    assert_eq!(parsed, printed);
    assert_eq!(parsed.to_json(), cj);
}

#[test]
fn table_csv_has_header_and_rows() {
    let o = run(&["table", "--k", "3,5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let h = r.headers().unwrap().clone();
    assert_eq!(&h[0], "k");
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][1], "3 - 2*z3");
    let diff: f64 = rows[0][6].parse().unwrap();
    assert!(diff < 5e-3);
}

#[test]
fn table_rejects_even_k() {
    let o = run(&["table", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_inversion_range() {
    let o = run(&["verify", "inversion", "--k", "3..15", "odd"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS inversion x=1/3"));
}

#[test]
fn verify_h_transform_single_point() {
    let o = run(&["verify", "H-transform", "--z", "0.3+0.7i", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let r = &v["items"][0]["data"]["residuals"];
    assert!(r["translation"].as_f64().unwrap() < 1e-20);
    assert!(r["inversion"].as_f64().unwrap() < 1e-20);
}

#[test]
fn verify_meanzero_list() {
    let o = run(&["verify", "meanzero", "--L", "1", "--k", "3,5,7,9,11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("28/28 passed\n"));
}

#[test]
fn verify_eta_id_and_gauss() {
    assert_eq!(run(&["verify", "eta-id", "--points", "4"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "gauss", "--c-max", "32"]).status.code(), Some(0));
}

#[test]
fn verify_quantum_reports_rows() {
    let o = run(&["verify", "quantum", "--x", "1/3,1/2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["total"], 12);
}

#[test]
fn failing_numeric_check_exits_4() {
    // The printed H10 factor pattern does not follow the expansion.
    let o = run(&[
        "verify", "asymptotics", "--L", "2", "--form", "as-printed", "--t0", "0.0125", "--levels", "3",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn integral_json() {
    let o = run(&["integral", "--kind", "fstar", "--x", "1/3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let re = v["value"][0].as_f64().unwrap();
    let im = v["value"][1].as_f64().unwrap();
    assert!((re - 4.0).abs() < 1e-3 && (im + 3f64.sqrt()).abs() < 1e-3);
}

#[test]
fn lvalue_and_gauss() {
    let o = run(&["lvalue", "--L", "1", "--x", "1/3", "--n", "1"]);
    assert_eq!(stdout(&o).lines().next(), Some("L(-1) = -3/4 + 1/2*z3"));
    let o = run(&["gauss", "--a", "1", "--c", "4"]);
    assert_eq!(stdout(&o).lines().next(), Some("2 + 2*z4"));
    let o = run(&["gauss", "--a", "1", "--c", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn series_output() {
    let o = run(&["series", "--name", "theta1", "--trunc", "10"]);
    assert_eq!(stdout(&o), "1 - 2*q + 2*q^4 - 2*q^9 + O(q^10)\n");
    let o = run(&["series", "--name", "f10", "--half-derivative", "--trunc", "30", "--format", "csv"]);
    assert_eq!(stdout(&o), "exponent,coeff,sqrt_of\n1,1,1\n9,3,1\n25,5,1\n");
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("qmf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    let out = dir.join("out.json");
    std::fs::write(&cfg, "format = json\ntrunc = 5\n").unwrap();
    let o = run(&[
        "series",
        "--name",
        "theta1",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["series"]["trunc"], "5");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_independent_of_jobs() {
    let a = run(&["verify", "inversion", "--k", "3..9", "--jobs", "1", "--trunc", "12"]);
    let b = run(&["verify", "inversion", "--k", "3..9", "--jobs", "4", "--trunc", "12"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["table", "--k", "3,5", "--jobs", "1", "--format", "csv"]);
    let b = run(&["table", "--k", "3,5", "--jobs", "3", "--format", "csv"]);
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(run(&["strange", "--component", "7", "--x", "1/3"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
}
