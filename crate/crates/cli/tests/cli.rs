use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ltvc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltvc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Temp dir holding A.sys, B.sys and C.sys from the demo.
fn workspace() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = ltvc(dir.path(), &["demo", "section6", "--systems-dir", "."]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir
}

fn machine_value<'a>(text: &'a str, key: &str) -> &'a str {
    let block = text.split("[result]\n").nth(1).expect("machine block");
    block
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{block}"))
}

#[test]
fn demo_report() {
    let dir = TempDir::new().unwrap();
    let o = ltvc(dir.path(), &["demo", "section6", "--out", "report.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report, stdout(&o));
    let h_ab: f64 = machine_value(&report, "h_ab.1_0").parse().unwrap();
    let h_ac: f64 = machine_value(&report, "h_ac.1_0").parse().unwrap();
    // closed forms at (t, t0) = (1, 0): e^-1 (1 - 1/sqrt 2) / 2 and e^-1 (1 - 8) / 6
    let e = (-1.0f64).exp();
    assert!(
        (h_ab - e * (1.0 - 0.5f64.sqrt()) / 2.0).abs() < 1e-9,
        "{h_ab}"
    );
    assert!((h_ac + 0.4291926).abs() < 1e-6, "{h_ac}");
    assert!((h_ac + 7.0 * e / 6.0).abs() < 1e-9);
    assert!(report.contains("(A,C) (k1,k0) = (-1,3)"));
    assert_eq!(machine_value(&report, "ac.const.k1"), "-1");
    assert_eq!(machine_value(&report, "ac.const.k0"), "3");
    assert_eq!(machine_value(&report, "transitive"), "true");
}

#[test]
fn check_worked_pair() {
    let dir = workspace();
    let o = ltvc(dir.path(), &["check", "A.sys", "B.sys", "--tol", "1e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("(k1,k0) = (2,1)\n"), "{out}");
    assert_eq!(machine_value(&out, "verdict"), "commutative");
}

#[test]
fn synthesized_partner_checks_out() {
    let dir = workspace();
    let o = ltvc(
        dir.path(),
        &[
            "synth",
            "first-order",
            "A.sys",
            "--k1",
            "2",
            "--k0",
            "1",
            "--out",
            "B2.sys",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        ltvc(dir.path(), &["check", "A.sys", "B2.sys"])
            .status
            .code(),
        Some(0)
    );

    let o = ltvc(
        dir.path(),
        &[
            "synth",
            "second-from-first",
            "A.sys",
            "--l1",
            "1.5",
            "--l0",
            "-2",
            "--free",
            "0.25",
            "--out",
            "X.sys",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for args in [
        &[
            "synth",
            "first-from-second",
            "X.sys",
            "--k1",
            "-1",
            "--k0",
            "0.5",
            "--out",
            "Y.sys",
        ][..],
        &[
            "synth",
            "second-order",
            "X.sys",
            "--k2",
            "0.5",
            "--k1",
            "1",
            "--k0",
            "-1",
            "--out",
            "Z.sys",
        ][..],
    ] {
        assert_eq!(ltvc(dir.path(), args).status.code(), Some(0));
    }
    for pair in [["A.sys", "X.sys"], ["X.sys", "Y.sys"], ["Z.sys", "X.sys"]] {
        let o = ltvc(dir.path(), &["check", pair[0], pair[1]]);
        assert_eq!(o.status.code(), Some(0), "{pair:?}\n{}", stdout(&o));
    }
    let o = ltvc(dir.path(), &["transitivity", "A.sys", "X.sys", "Y.sys"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(machine_value(&stdout(&o), "shape"), "1-2-1");
}

#[test]
fn negative_verdicts_exit_one() {
    let dir = workspace();
    let p = dir.path().join("P.sys");
    std::fs::write(
        &p,
        "order = 1\ncoeff.1 = \"t + 1\"\ncoeff.0 = \"2.5*t + 5\"\nt0 = 0\ndomain = [-0.9, 10]\n",
    )
    .unwrap();
    let o = ltvc(dir.path(), &["check", "A.sys", "P.sys"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(machine_value(&stdout(&o), "verdict"), "not-commutative");
    assert_eq!(
        ltvc(dir.path(), &["cascade", "A.sys", "P.sys", "--out", "d.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ltvc(dir.path(), &["transitivity", "A.sys", "P.sys", "C.sys"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn unrelaxed_pairs_need_matching_initial_state() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, c1: &str, c0: &str| {
        let text = format!("order = 1\ncoeff.1 = \"{c1}\"\ncoeff.0 = \"{c0}\"\nt0 = 0\nic = [1]\ndomain = [0, 10]\n");
        std::fs::write(dir.path().join(name), text).unwrap();
    };
    // k1 = 2 with k0 = 1 - k1 = -1 keeps commutativity under y(0) = 1; k0 = 1 does not
    write("A.sys", "t + 1", "t + 2");
    write("B.sys", "2*(t + 1)", "2*(t + 2) - 1");
    write("C.sys", "2*(t + 1)", "2*(t + 2) + 1");
    let o = ltvc(dir.path(), &["check", "A.sys", "B.sys"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        machine_value(&stdout(&o), "unrelaxed"),
        "unrelaxed-commutative"
    );
    let o = ltvc(dir.path(), &["check", "A.sys", "C.sys"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert_eq!(
        machine_value(&stdout(&o), "unrelaxed"),
        "not-unrelaxed-commutative"
    );
}

#[test]
fn input_errors_exit_two() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("bad.sys"),
        "order = 1\ncoeff.1 = \"t +* 1\"\ncoeff.0 = \"1\"\n",
    )
    .unwrap();
    let o = ltvc(dir.path(), &["check", "A.sys", "bad.sys"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2") && err.contains("byte 3"), "{err}");

    assert_eq!(
        ltvc(dir.path(), &["check", "A.sys", "nope.sys"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ltvc(dir.path(), &["check", "A.sys"]).status.code(), Some(2));
    assert_eq!(ltvc(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        ltvc(
            dir.path(),
            &["synth", "first-order", "A.sys", "--k1", "0", "--k0", "1"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        ltvc(dir.path(), &["impulse", "A.sys", "--points", "1"])
            .status
            .code(),
        Some(2)
    );
    // outside the domain of A
    assert_eq!(
        ltvc(dir.path(), &["impulse", "A.sys", "--tau", "-5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_output_is_reproducible() {
    let dir = workspace();
    let runs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|i| {
            let (imp, cas) = (format!("h{i}.csv"), format!("d{i}.csv"));
            let o = ltvc(
                dir.path(),
                &[
                    "impulse", "B.sys", "--tau", "0", "--tau", "0.5", "--out", &imp,
                ],
            );
            assert_eq!(o.status.code(), Some(0));
            let o = ltvc(dir.path(), &["cascade", "A.sys", "B.sys", "--out", &cas]);
            assert_eq!(o.status.code(), Some(0));
            (
                std::fs::read(dir.path().join(imp)).unwrap(),
                std::fs::read(dir.path().join(cas)).unwrap(),
            )
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let imp = String::from_utf8(runs[0].0.clone()).unwrap();
    let mut lines = imp.lines();
    assert_eq!(lines.next(), Some("tau,t,h"));
    assert_eq!(lines.count(), 2 * 101);
    let cas = String::from_utf8(runs[0].1.clone()).unwrap();
    assert!(cas.starts_with("t0,t,h_ab,h_ba,defect\n"));
    // 17 significant digits: one leading digit and sixteen decimals
    let row: Vec<&str> = cas.lines().nth(21).unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    let mantissa = row[2].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').len(), 18, "{}", row[2]);
    let h_ab: f64 = row[2].parse().unwrap();
    assert!((h_ab - 0.053874696829998936).abs() < 1e-9);

    // stdout and --out carry the same bytes
    let o = ltvc(
        dir.path(),
        &["impulse", "B.sys", "--tau", "0", "--tau", "0.5"],
    );
    assert_eq!(o.stdout, runs[0].0);
}

#[test]
fn impulse_methods_agree() {
    let dir = workspace();
    let ode = ltvc(dir.path(), &["impulse", "A.sys", "--method", "ode"]);
    let closed = ltvc(dir.path(), &["impulse", "A.sys", "--method", "closed-form"]);
    let rows = |o: &Output| -> Vec<f64> {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let (x, y) = (rows(&ode), rows(&closed));
    assert_eq!(x.len(), 101);
    for (p, q) in x.iter().zip(&y) {
        assert!((p - q).abs() <= 1e-6 * q.abs(), "{p} vs {q}");
    }
}

#[test]
fn writes_leave_no_temporaries() {
    let dir = workspace();
    ltvc(dir.path(), &["cascade", "A.sys", "B.sys", "--out", "d.csv"]);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["A.sys", "B.sys", "C.sys", "d.csv"]);
}

#[test]
fn every_subcommand_has_help() {
    let dir = TempDir::new().unwrap();
    let cases: &[(&[&str], &[&str])] = &[
        (
            &[],
            &[
                "check",
                "impulse",
                "cascade",
                "synth",
                "transitivity",
                "demo",
            ],
        ),
        (
            &["check"],
            &[
                "--t0",
                "--tol",
                "--points",
                "--t-start",
                "--t-end",
                "--ode-tol",
                "--out",
                "--csv",
            ],
        ),
        (&["impulse"], &["--tau", "--method", "--points", "--out"]),
        (&["cascade"], &["--t0", "--tol", "--points", "--out"]),
        (
            &["synth"],
            &[
                "first-order",
                "first-from-second",
                "second-order",
                "second-from-first",
            ],
        ),
        (&["synth", "first-order"], &["--k1", "--k0", "--out"]),
        (&["synth", "first-from-second"], &["--k1", "--k0", "--out"]),
        (
            &["synth", "second-order"],
            &["--k2", "--k1", "--k0", "--out"],
        ),
        (
            &["synth", "second-from-first"],
            &["--l1", "--l0", "--free", "--out"],
        ),
        (&["transitivity"], &["--tol", "--points", "--out"]),
        (&["demo"], &["section6"]),
        (
            &["demo", "section6"],
            &["--out", "--systems-dir", "--tol", "--ode-tol"],
        ),
    ];
    for (cmd, expected) in cases {
        let mut args = cmd.to_vec();
        args.push("--help");
        let o = ltvc(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let text = stdout(&o);
        for e in *expected {
            assert!(text.contains(e), "{args:?} help lacks {e}\n{text}");
        }
    }
}
