use std::path::Path;
use std::process::{Command, Output};

fn pcfcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcfcalc"))
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

fn csv_column(text: &str, col: usize) -> Vec<String> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().to_string())
        .collect()
}

#[test]
fn tables_accept_listed_misprints_only() {
    let o = pcfcalc(&["tables", "--fractal", "sg3", "--digits", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("level-3 Sierpinski gasket"));
    assert!(text.contains("-124.6844211"));
    assert!(stderr(&o).contains("sg3: 58/60 printed cells match"));

    let strict = pcfcalc(&["tables", "--fractal", "sg3", "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(stderr(&strict).contains("gamma[2]"));
}

#[test]
fn sg4_tables_check_gamma_against_alpha() {
    let o = pcfcalc(&["tables", "--fractal", "sg4", "-J", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("gamma_j = 4 alpha_(j+1) holds for j < 12"));
}

#[test]
fn all_tables_as_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables");
    let o = pcfcalc(&[
        "tables",
        "--all",
        "--format",
        "csv",
        "-J",
        "8",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["sg", "sg3", "hg", "sg4", "ratios"] {
        assert!(out.join(format!("{name}.csv")).is_file(), "{name}");
    }
    let sg = std::fs::read_to_string(out.join("sg.csv")).unwrap();
    assert_eq!(sg.lines().count(), 10);
    assert!(sg.lines().nth(2).unwrap().starts_with("1,1/6,"));
    let ratios = std::fs::read_to_string(out.join("ratios.csv")).unwrap();
    assert_eq!(
        ratios.lines().next().unwrap(),
        "j,hg_alpha,hg_beta,sg3_alpha,sg3_beta,sg4_beta"
    );
}

#[test]
fn verify_reports_json() {
    let o = pcfcalc(&[
        "verify",
        "iterated",
        "--fractal",
        "hg",
        "-n",
        "2",
        "-m",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"][0]["fractal"], "hg");
    assert!(v["checks"][0]["checked"].as_u64().unwrap() > 0);
}

#[test]
fn verify_every_suite_on_sg() {
    let o = pcfcalc(&[
        "verify",
        "all",
        "--fractal",
        "sg",
        "--draws",
        "2",
        "-J",
        "6",
        "--format",
        "text",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for suite in [
        "one-step ",
        "one-step-easy",
        "iterated",
        "neighbor-identity",
        "nonvanishing",
        "dual-route",
        "duality",
    ] {
        assert!(text.contains(&format!("PASS {suite}")), "{suite}");
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_runs_are_reproducible() {
    let args = [
        "verify",
        "one-step",
        "--fractal",
        "sg3",
        "-n",
        "2",
        "-m",
        "2",
        "--seed",
        "7",
        "--draws",
        "3",
    ];
    let a = pcfcalc(&args);
    let b = pcfcalc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dual_route_needs_a_known_recursion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.toml");
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/fractals/sg.toml"),
    )
    .unwrap()
    .replacen("name = \"sg\"", "name = \"custom\"", 1);
    std::fs::write(&path, text).unwrap();
    let o = pcfcalc(&["verify", "dual-route", "--fractal", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let ok = pcfcalc(&[
        "verify",
        "duality",
        "--fractal",
        path.to_str().unwrap(),
        "-J",
        "4",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn laplacian_convergence_csv() {
    let o = pcfcalc(&[
        "converge",
        "laplacian",
        "--fractal",
        "sg",
        "-n",
        "1",
        "-m",
        "1..6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("m,sup_error_exact,sup_error_decimal,ratio_decimal\n"));
    let errors: Vec<f64> = csv_column(&text, 2)
        .iter()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 6);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(csv_column(&text, 3).last().unwrap(), "2.000000000e-1");
}

#[test]
fn tangent_convergence_decreases() {
    let o = pcfcalc(&[
        "converge",
        "tangent",
        "--fractal",
        "sg",
        "-n",
        "1",
        "--vertex",
        "0/1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let errors: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["sup_error_decimal"].as_str().unwrap().parse().unwrap())
        .collect();
    assert!(errors.len() >= 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn same_order_multiharmonic_has_zero_error() {
    let o = pcfcalc(&[
        "converge",
        "laplacian",
        "--fractal",
        "sg4",
        "--fn",
        "multiharmonic:2",
        "-n",
        "2",
        "-m",
        "1..3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let exact = csv_column(&stdout(&o), 1);
    assert!(!exact.is_empty() && exact.iter().all(|x| x == "0"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "fractal = \"sg\"\nlevels = \"1..3\"\nformat = \"json\"\n",
    )
    .unwrap();
    let o = pcfcalc(&["converge", "laplacian", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    let o = pcfcalc(&[
        "converge",
        "laplacian",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "-m",
        "2",
    ]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["tables", "--fractal", "sg", "-J", "65"],
        vec!["tables", "--fractal", "sg", "--all"],
        vec!["tables", "--fractal", "nope"],
        vec!["tables"],
        vec!["converge", "laplacian", "--fractal", "hg", "-m", "1..9"],
        vec!["converge", "tangent", "--fractal", "sg", "--vertex", "/0"],
        vec!["converge", "laplacian", "--fractal", "sg", "-m", "0..2"],
        vec!["verify", "unknown-suite", "--fractal", "sg"],
    ] {
        let o = pcfcalc(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "fractl = \"sg\"\n").unwrap();
    let o = pcfcalc(&["tables", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
