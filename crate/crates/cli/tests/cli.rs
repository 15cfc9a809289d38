use std::io::Write;
use std::process::{Command, Output};

fn hoass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoass")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn diff_of_down_two_is_the_printed_formula() {
    let o = hoass(&["diff", "dn2(1,2)"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "+1 dn1(b2(1,2))\n-1 lt2(1,2)\n+1 rt2(1,2)\n-1 w2(dn1(1),rt1(2))\n-1 w2(lt1(1),dn1(2))\n"
    );
    let three = hoass(&["diff", "dn3(1,2,3)"]);
    assert_eq!(stdout(&three).lines().count(), 12);
}

#[test]
fn output_is_deterministic() {
    let a = hoass(&["diff", "w2(dn1(1), dn2(2, 3))"]);
    let b = hoass(&["diff", "w2(dn1(1),dn2(2,3))"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(hoass(&["diff", "b2(1,2)"]).stdout, b"0\n");
}

#[test]
fn parse_errors_exit_with_two() {
    let o = hoass(&["diff", "w2(b2(1,2),dn1(3))"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hoass(&["diff", "dn2(1,"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
    assert_eq!(hoass(&["strata", "--space", "moon", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn d2_checks_pass() {
    for fam in ["b", "w", "lt", "rt", "sq"] {
        assert!(hoass(&["d2", "--family", fam, "--max-arity", "5"]).status.success(), "{fam}");
    }
    let o = hoass(&["d2", "--family", "dn", "--max-arity", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok")).count(), 4);
    assert_eq!(hoass(&["d2", "--family", "dn", "--max-arity", "40"]).status.code(), Some(2));
}

#[test]
fn cohomology_table_and_json() {
    let o = hoass(&["cohomology", "--arity", "2", "--profile", "mixed", "--operad", "hoinf"]);
    assert_eq!(stdout(&o), "{0: 1}\n");
    let o = hoass(&["cohomology", "--arity", "2", "--profile", "mixed", "--operad", "hoinf", "--emit", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["basis"]["-1"].as_array().unwrap().len(), 7);
    assert_eq!(v["boundary"]["-2"]["rows"], 7);
    assert_eq!(hoass(&["cohomology", "--arity", "9"]).status.code(), Some(2));
}

#[test]
fn strata_listing() {
    let o = hoass(&["strata", "--space", "conf", "--n", "3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 13);
    assert!(text.ends_with("count: 12\n"));
    let dot = stdout(&hoass(&["strata", "--space", "c", "--n", "3", "--dot"]));
    assert_eq!(dot.matches("digraph").count(), 2);
}

fn structure_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

const EXTERIOR: &str = r#"{
    "V": [{"name": "1", "degree": 0}, {"name": "e", "degree": 1}],
    "W": [{"name": "1", "degree": 0}, {"name": "e", "degree": 1}],
    "mV": {"2": ["1", "0", "0", "1", "0", "1", "0", "0"]},
    "mW": {"2": ["1", "0", "0", "1", "0", "1", "0", "0"]},
    "f": {"1": ["1", "0", "0", "1"]},
    "g": {"1": ["1", "0", "0", "1"]},
    "h": {"1": ["0", "0", "1", "0"], "2": ["0", "0", "0", "0", "0", "0", "1", "0"]}
}"#;

#[test]
fn ainfty_check_exit_codes() {
    let good = structure_file(EXTERIOR);
    let o = hoass(&["ainfty-check", good.path().to_str().unwrap(), "--nmax", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 5);

    // g₂(e, e) = e breaks the homotopy relation at weight 2
    let bad = structure_file(&EXTERIOR.replace(
        r#""g": {"1": ["1", "0", "0", "1"]}"#,
        r#""g": {"1": ["1", "0", "0", "1"], "2": ["0", "0", "0", "0", "0", "0", "0", "1"]}"#,
    ));
    let o = hoass(&["ainfty-check", bad.path().to_str().unwrap(), "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL homotopy (h) at n=2"));

    let broken = structure_file("{ not json");
    assert_eq!(hoass(&["ainfty-check", broken.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(hoass(&["ainfty-check", "/nonexistent/structure.json"]).status.code(), Some(2));
}

#[test]
fn sign_solver_report() {
    let o = hoass(&["signs", "solve", "--max-arity", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("unique: true"));
    assert!(text.contains("n=2 collapse(k=0,l=2) +1"));
    assert_eq!(o.stdout, hoass(&["signs", "solve", "--max-arity", "5"]).stdout);
    let json = hoass(&["signs", "solve", "--max-arity", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["unique"], true);
    assert_eq!(v["table"]["down"]["2"]["collapse(k=0,l=2)"], 1);
    assert_eq!(v["arities"][1]["discrepancies"].as_array().unwrap().len(), 0);
    assert_eq!(hoass(&["signs", "solve", "--max-arity", "1"]).status.code(), Some(2));
}
