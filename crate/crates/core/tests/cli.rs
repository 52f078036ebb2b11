//! Exit codes and output of the binary.

use std::process::{Command, Output};

fn kpcalc(args: &[&str], depth: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kpcalc"));
    cmd.args(args).env_remove("KPCALC_DEPTH");
    if let Some(d) = depth {
        cmd.env("KPCALC_DEPTH", d);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verified_table_exits_zero() {
    let o = kpcalc(&["verify", "--table", "pov"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("10/10 verified"));
}

#[test]
fn mismatch_exits_one() {
    let o = kpcalc(&["verify", "--table", "pov", "--map", "ns-literal"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    for (args, depth) in [
        (vec!["verify", "--table", "pov", "--depth", "1"], None),
        (vec!["verify", "--table", "pov"], Some("1")),
        (vec!["verify", "--table", "pov"], Some("eight")),
        (vec!["verify", "--table", "nope"], None),
        (vec!["verify", "--criterion", "10"], None),
        (vec!["verify"], None),
        (vec!["flow", "--family", "X(1,2)", "--k", "2"], None),
        (vec!["parse", "(("], None),
        (vec!["no-such-command"], None),
    ] {
        let o = kpcalc(&args, depth);
        assert_eq!(o.status.code(), Some(2), "{args:?} with depth {depth:?}");
    }
    let o = kpcalc(&["verify", "--table", "pov"], Some("1"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("KPCALC_DEPTH"));
}

#[test]
fn json_output_is_stable() {
    let a = stdout(&kpcalc(&["verify", "--table", "l12", "--json"], None));
    let b = stdout(&kpcalc(&["verify", "--table", "l12", "--json"], None));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v.is_array());
}

#[test]
fn flow_miura_conformal_and_parse_print_results() {
    let o = kpcalc(&["flow", "--family", "K12", "--k", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("q: 2*v1*q' + q''"));

    let o = kpcalc(&["miura", "--n", "3", "--m", "1"], None);
    assert!(stdout(&o).contains("u1 = b1 - a3 - a2 - a1"));
    let o = kpcalc(&["miura", "--target", "1,2"], None);
    assert!(stdout(&o).contains("K(1,2): n = 3, m = 1"));
    let o = kpcalc(&["miura", "diag", "--n", "3", "--m", "1"], None);
    assert!(stdout(&o).contains("D = diag(2, -1/2, 2, -1/2)"));

    let o = kpcalc(&["conformal", "--context", "extv2"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = kpcalc(
        &[
            "conformal",
            "--context",
            "extv2",
            "--field",
            "r",
            "--spin",
            "1",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));

    let o = kpcalc(&["parse", "u'*v"], None);
    assert!(stdout(&o).contains("modulo total derivatives: -u*v'"));
}
