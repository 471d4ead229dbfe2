use std::process::Command;

fn hotelling(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hotelling"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Column `name` of a CSV document, parsed as numbers.
fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

#[test]
fn payoff_examples() {
    let (code, out, _) = hotelling(&["payoff", "--variant", "lf", "--r", "0.5", "--positions", "0.5"]);
    assert_eq!(code, 0);
    // The hinterland 1/2 on each side is worth 1/2 − r/8.
    assert_close(&column(&out, "payoff"), &[0.875], 1e-12);

    let (_, out, _) = hotelling(&["payoff", "--positions", "0.25", "0.25", "0.75", "0.75"]);
    assert_close(&column(&out, "payoff"), &[0.25; 4], 1e-12);

    let (code, out, _) = hotelling(&[
        "payoff", "--variant", "pf", "--r", "0.5", "--positions", "0.5", "0.5", "0.5", "--oracles",
    ]);
    assert_eq!(code, 0);
    assert_close(&column(&out, "payoff"), &[0.3125, 0.25, 0.3125], 1e-12);
    assert_close(&column(&out, "enumeration"), &[0.3125, 0.25, 0.3125], 1e-12);
}

#[test]
fn payoff_montecarlo_needs_a_seed() {
    let base = ["payoff", "--variant", "lf", "--r", "0.3", "--positions", "0.2", "0.7"];
    let (code, _, err) = hotelling(&[&base[..], &["--samples", "1000"]].concat());
    assert_eq!(code, 1);
    assert!(err.contains("--seed"));
    let with_seed = [&base[..], &["--samples", "200000", "--seed", "3"]].concat();
    let (code, first, _) = hotelling(&with_seed);
    assert_eq!(code, 0);
    let (_, second, _) = hotelling(&with_seed);
    assert_eq!(first, second);
    for z in column(&first, "mc_z") {
        assert!(z < 4.0);
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["payoff", "--variant", "lf", "--positions", "0.5"][..],
        &["payoff", "--variant", "classic", "--r", "0.5", "--positions", "0.5"],
        &["verify", "--positions", "0.2", "0.2", "0.2"],
        &["verify", "--variant", "lf", "--r", "0.5", "--positions", "0.5", "--segment", "0", "2"],
        &["construct", "--n", "3"],
        &["sweep", "--n", "3"],
        &["dynamics", "--n", "3"],
        &["frobnicate"],
    ] {
        let (code, _, err) = hotelling(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = hotelling(&["verify", "--positions", "0.25", "0.25", "0.75", "0.75"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["nash"]["verdict"], true);
    assert_eq!(report["conditions"]["equilibrium"], true);

    let (code, out, err) = hotelling(&["verify", "--positions", "0.2", "0.5", "0.8"]);
    assert_eq!(code, 2);
    assert!(err.contains("not an equilibrium"));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(report["nash"]["max_gain"].as_f64().unwrap() > 0.1);
}

#[test]
fn constructed_equilibria_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let lf = |r| vec!["--variant", "lf", "--r", r];
    let cases: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["--n", "1"], vec![]),
        (vec!["--n", "2"], vec![]),
        (vec!["--n", "4"], vec![]),
        (vec!["--n", "5", "--segment", "-2", "3"], vec![]),
        (vec!["--n", "6", "--family-param", "0.14"], vec![]),
        ([lf("0.5"), vec!["--n", "1"]].concat(), lf("0.5")),
        ([lf("0.3"), vec!["--n", "4"]].concat(), lf("0.3")),
        ([lf("0.9"), vec!["--n", "5"]].concat(), lf("0.9")),
        ([lf("0.5"), vec!["--n", "6", "--family-param", "0.15"]].concat(), lf("0.5")),
        ([lf("0.5"), vec!["--n", "8", "--family-param", "0.1"]].concat(), lf("0.5")),
        (
            vec!["--variant", "pf", "--r", "0.5", "--n", "2"],
            vec!["--variant", "pf", "--r", "0.5"],
        ),
    ];
    for (k, (construct, game)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{k}.json"));
        let path = path.to_str().unwrap();
        let (code, _, err) = hotelling(&[&["construct", "--out", path][..], construct].concat());
        assert_eq!(code, 0, "{construct:?}: {err}");
        let (code, _, err) = hotelling(&[&["verify", "--config", path][..], game].concat());
        assert_eq!(code, 0, "{construct:?}: {err}");
    }
}

#[test]
fn appendix_interior_deviator_payoff() {
    let (code, out, _) = hotelling(&["appendix-a", "--r", "0.5", "--y", "0.35"]);
    assert_eq!(code, 0);
    let x = 1.0 / (2.0 + 3.5f64.sqrt());
    for p in column(&out, "payoff_deviator") {
        assert!((p - (0.5 - x)).abs() < 1e-11);
    }
    let (code, _, err) = hotelling(&["appendixA", "--r", "0.5", "--y", &format!("{}", x - 1e-9)]);
    assert_eq!(code, 0);
    assert!(err.contains("smallest margin"));
}

#[test]
fn sweep_passes_the_four_server_root() {
    let (code, out, _) = hotelling(&["sweep", "--n", "4"]);
    assert_eq!(code, 0);
    let rs = column(&out, "r");
    let xs = column(&out, "x");
    let k = rs.iter().position(|r| (r - 0.5).abs() < 1e-12).unwrap();
    assert!((xs[k] - 0.2583426).abs() < 1e-7);
    assert_close(&column(&out, "classic_x")[..1], &[0.25], 0.0);
}

#[test]
fn dynamics_is_reproducible() {
    let args = ["dynamics", "--variant", "pf", "--r", "0.4", "--n", "4", "--seed", "9", "--max-iters", "200"];
    let (code, first, _) = hotelling(&args);
    assert_eq!(code, 0);
    assert_eq!(first, hotelling(&args).1);
    let last: serde_json::Value = serde_json::from_str(first.lines().last().unwrap()).unwrap();
    assert_ne!(last["outcome"], "equilibrium");
}

#[test]
fn probe_reports_no_equilibrium() {
    let (code, out, _) = hotelling(&["probe", "--n", "3", "--r", "0.25", "--resolution", "30"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["equilibria_found"], 0);
    assert_eq!(report["witnesses"].as_array().unwrap().len(), 10);
}
