use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rbloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbloss"))
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

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn list_has_34_rows_with_six_flags() {
    let o = rbloss(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 35);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 9, "{l}");
        assert!(cols[3..].iter().all(|f| *f == "0" || *f == "1"));
    }

    let convex = stdout(&rbloss(&["list", "--convex"]));
    let n = lines[1..].iter().filter(|l| l.split(',').nth(4) == Some("1")).count();
    assert_eq!(convex.lines().count() - 1, n);
    assert!(convex.lines().skip(1).all(|l| l.split(',').nth(4) == Some("1")));
}

#[test]
fn log_pinball_curve_has_its_minimum_at_log_y() {
    let l3 = 3f64.ln();
    let (from, to) = (format!("{}", l3 - 1.0), format!("{}", l3 + 1.0));
    let o = rbloss(&[
        "curve",
        "log-pinball:tau=0.1/exp/c=0",
        "--from",
        &from,
        "--to",
        &to,
        "--points",
        "201",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("t,loss"));
    let pts = rows(&out);
    let (imin, min) = pts
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r[1]))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert_eq!(imin, 100);
    assert!((pts[imin][0] - l3).abs() < 1e-12);
    assert!(min.abs() < 1e-12);
    // the two arms rise at different rates
    assert!((pts[0][1] - pts[200][1]).abs() > 0.1);
}

#[test]
fn ratio_symmetric_curve_pairs_r_with_its_reciprocal() {
    for r in [0.2f64, 0.5, 0.9, 3.0] {
        let value = |x: f64| {
            let s = format!("{x}");
            let o = rbloss(&["curve", "log-ratio-sym", "--from", &s, "--to", &s, "--points", "1"]);
            assert!(o.status.success());
            rows(&stdout(&o))[0][1]
        };
        let (a, b) = (value(r), value(1.0 / r));
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "r = {r}: {a} vs {b}");
    }
}

#[test]
fn zero_points_gives_header_only() {
    let o = rbloss(&["curve", "lpre", "--points", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "r,ell\n");
    let o = rbloss(&["curve", "lpre/exp/c=0", "--points", "0"]);
    assert_eq!(stdout(&o), "t,loss\n");
}

#[test]
fn usage_errors_exit_2() {
    let o = rbloss(&["curve", "no-such-loss"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown loss id"));

    let o = rbloss(&["verify", "--loss", "no-such-loss/exp/c=0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown loss id"));

    let o = rbloss(&["curve", "lpre/exp/c=oops"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"));

    assert_eq!(rbloss(&["curve", "lpre", "--from", "-1"]).status.code(), Some(2));
    assert_eq!(rbloss(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rbloss(&["verify"]).status.code(), Some(2));
    assert_eq!(rbloss(&["metric", "--kind", "bogus", "--data", "x", "--pred", "y"]).status.code(), Some(2));
}

#[test]
fn verify_table2_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t2.json");
    let o = rbloss(&["verify", "--table2", "--out", p(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["spec_version"], "1");
    assert_eq!(v["summary"]["reports"], 34);
    assert_eq!(v["summary"]["unexplained_mismatches"], 0);

    let o = rbloss(&["verify", "--table2", "--out", "-"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(
        out.lines().next(),
        Some("subject,property,expected,verdict,witness_r_or_t,witness_value,grid_id")
    );
    assert_eq!(out.lines().count(), 1 + 34 * 6);
}

#[test]
fn verify_single_loss_against_the_table() {
    let o = rbloss(&["verify", "--loss", "squared-log/exp/c=0", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["reports"][0]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["expected"].is_boolean()));
}

#[test]
fn gen_is_deterministic_and_fit_is_exact_on_noise_free_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let args = ["gen", "--n", "40", "--d", "3", "--sigma", "0", "--seed", "11"];
    let o = rbloss(&[&args[..], &["--out", p(&data)]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().next(), Some("x1,x2,x3,y"));
    assert_eq!(text.lines().count(), 41);
    assert_eq!(stdout(&rbloss(&[&args[..], &["--out", "-"]].concat())), text);

    let fit = dir.path().join("fit.json");
    let o = rbloss(&["fit", "--loss", "lpre/exp/c=0", "--data", p(&data), "--reg", "0", "--out", p(&fit)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&fit).unwrap()).unwrap();
    assert_eq!(v["spec_version"], "1");
    let final_risk = v["final_risk"].as_f64().unwrap();
    assert!(final_risk < 1e-12, "{final_risk}");

    let o = rbloss(&["risk", "--loss", "lpre/exp/c=0", "--data", p(&data), "--model", p(&fit)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let risk: f64 = out.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(risk, final_risk);
}

#[test]
fn metric_reads_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let pred = dir.path().join("pred.csv");
    fs::write(&data, "x1,y\n0,1\n0,2\n0,4\n").unwrap();
    fs::write(&pred, "p\n2\n2\n2\n").unwrap();
    let o = rbloss(&["metric", "--kind", "abs_rel", "--data", p(&data), "--pred", p(&pred)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-15);

    fs::write(&data, "x1,y\n0,2\n0,2\n").unwrap();
    fs::write(&pred, "p\n1\n3\n").unwrap();
    let o = rbloss(&["metric", "--kind", "rae", "--data", p(&data), "--pred", p(&pred)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("RAE is undefined"));
}

#[test]
fn build_emits_the_power_certificate() {
    let o = rbloss(&["build", "--aux", "pow:alpha=2", "--symmetrize", "--certify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("r,certificate"));
    let pts = rows(&out);
    assert!(pts.len() > 100);
    for r in pts {
        assert!((r[1] - 4.0 * r[0]).abs() <= 1e-8 * (1.0 + r[1].abs()), "{r:?}");
    }

    let o = rbloss(&["build", "--aux", "g-log1p"]);
    assert!(o.status.success());
    for r in rows(&stdout(&o)) {
        assert!((r[1] - r[0].ln_1p()).abs() < 1e-8, "{r:?}");
    }
}
