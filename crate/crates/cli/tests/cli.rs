//! End-to-end checks of the `ecl` binary: exit codes, certificate files and
//! byte-stable output. Set `UPDATE_GOLDEN=1` to rewrite `tests/golden/`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn ecl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecl")).args(args).output().expect("run ecl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn success_exits_zero() {
    let out = ecl(&["solve", "--system", "x1*E(x1) - 1", "--box", "[0, 1]"]);
    assert_eq!(code(&out), 0);
    // The omega constant is 0.56714329040978387299...
    assert!(stdout(&out).contains("[0.56714329040978387, 0.56714329040978388]"), "{}", stdout(&out));
}

#[test]
fn negative_results_exit_one() {
    let cases: [&[&str]; 3] = [
        &["solve", "--system", "x1^2 + 1", "--box", "[-2, 2]"],
        &["ecl-op", "--op", "inv", "--a", "x1", "--a-box", "[-1, 1]"],
        &["chain-check", "--graph", &data("broken_chain.graph")],
    ];
    for args in cases {
        assert_eq!(code(&ecl(args)), 1, "{args:?}");
    }
    let refuted = scratch("refuted.inst");
    let src = std::fs::read_to_string(data("desk.inst")).unwrap().replace("c2 < 1 & c2*E(c2) = 1", "c2 > 1");
    std::fs::write(&refuted, src).unwrap();
    let out = ecl(&["embed-search", "--instance", refuted.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("no-ray           2"), "{}", stdout(&out));
}

#[test]
fn input_errors_exit_two() {
    let bad_certs = scratch("bad.certs");
    std::fs::write(&bad_certs, "begin certificate\nbox: [1, \nend certificate\n").unwrap();
    let cases: [&[&str]; 5] = [
        &["parse", "--term", "x1 +"],
        &["solve", "--system", "x1 - 1", "--box", "[0, 1]", "--bogus"],
        &["solve", "--system", "x1 - 1", "--box", "[1, 0"],
        &["verify", "--certs", bad_certs.to_str().unwrap()],
        &["solve", "--box", "[0, 1]"],
    ];
    for args in cases {
        let out = ecl(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn exhausted_budget_exits_three() {
    // A double root cannot be certified; the budget runs out first.
    let out = ecl(&["solve", "--system", "x1^2", "--box", "[-1, 1]", "--max-splits", "20"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn certificates_round_trip_and_tampering_is_caught() {
    let path = scratch("omega.certs");
    let out = ecl(&["solve", "--system", "x1*E(x1) - 1", "--box", "[0, 1]", "--certs", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&ecl(&["verify", "--certs", path.to_str().unwrap()])), 0);

    // Move the box to [0.75, 1], which holds no root.
    let text = std::fs::read_to_string(&path).unwrap();
    let line = text.lines().find(|l| l.starts_with("box:")).unwrap();
    let tampered = text.replace(line, "box: [3p-2, 1p0]");
    let bad = scratch("omega-tampered.certs");
    std::fs::write(&bad, tampered).unwrap();
    let out = ecl(&["verify", "--certs", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
}

#[test]
fn sequential_and_parallel_agree() {
    let args = ["solve", "--system", "x1^2 + x2^2 - 4; x2 - E(x1) + 2", "--box", "[-3, 3]; [-3, 3]", "--format", "structured"];
    let par = ecl(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let seq = ecl(&seq_args);
    assert_eq!(code(&par), 0);
    assert_eq!(par.stdout, seq.stdout);
}

fn golden(name: &str, args: &[&str]) {
    let out = ecl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout(&out), String::from_utf8(expected).unwrap(), "{name}");
}

#[test]
fn golden_outputs() {
    let desk = data("desk.inst");
    let chain = data("chain.graph");
    golden("parse", &["parse", "--term", "2*x1*E(x1) + E(x1 + 1)*x1", "--format", "structured"]);
    golden("diff", &["diff", "--term", "x1*E(x1^2)", "--var", "x1", "--format", "structured"]);
    golden("jacobian", &["jacobian", "--system", "E(y) - x1; x1*E(x1) - 1", "--format", "structured"]);
    golden("augment", &["augment", "--system", "x1*E(x1) - 1", "--format", "structured"]);
    golden("solve_exp_roots", &["solve", "--system", "E(x1) - x1 - 2", "--box", "[-3, 3]", "--format", "structured"]);
    golden(
        "ecl_op_add",
        &["ecl-op", "--op", "add", "--a", "x1 - E(1)", "--a-box", "[0, 4]", "--b", "x1*E(x1) - 1", "--b-box", "[0, 1]", "--format", "structured"],
    );
    golden("ecl_op_log", &["ecl-op", "--op", "log", "--a", "x1 - E(1)", "--a-box", "[0, 4]", "--format", "structured"]);
    golden("ecl_enum", &["ecl-enum", "--box", "[0, 3]", "--max-tower", "1", "--monomials", "2", "--list", "--format", "structured"]);
    golden("embed_search", &["embed-search", "--instance", &desk, "--depth", "2", "--format", "structured"]);
    golden("embed_diagram", &["embed-search", "--instance", &desk, "--depth", "2", "--diagram", "--format", "structured"]);
    golden("chain_check", &["chain-check", "--graph", &chain, "--format", "structured"]);
}
