//! `rbloss`: batch front end for the ratio-based loss toolkit.
//!
//! Exit status: 0 on success, 1 when a verification disagrees with the
//! tables (or a certificate goes negative), 2 on usage and input errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rbloss_core::builder::working_grid;
use rbloss_core::io::{read_dataset, read_predictions, write_dataset};
use rbloss_core::num::{fmt_sig17, linspace};
use rbloss_core::verifier::{
    expected_table3, verify_loss, verify_table2, verify_table3, write_csv, write_json, Table3Link,
};
use rbloss_core::{
    convexity_certificate, empirical_risk, fit, generate_multiplicative, metric, symmetrize,
    AuxFunction, Direction, Error, FitOptions, LinearModel, LinkFunction, LinkKind, LossId,
    LossParams, LossSpec, MetricKind, PropertyReport, RepresentingFunction, SPEC_VERSION,
};

#[derive(Parser)]
#[command(name = "rbloss", version, about = "Ratio-based loss toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the catalog with parameter names and declared properties.
    List {
        /// Only rows declared convex.
        #[arg(long)]
        convex: bool,
    },
    /// Sample ℓ(r) for a bare id, or L(y, t) for a full loss spec.
    Curve(CurveArgs),
    /// Re-derive property tables numerically.
    Verify(VerifyArgs),
    /// Draw a dataset from the multiplicative-noise model.
    Gen(GenArgs),
    /// Fit a linear-in-link model by empirical risk minimization.
    Fit(FitArgs),
    /// Empirical risk of a fitted model.
    Risk(RiskArgs),
    /// Evaluate a regression metric on predictions.
    Metric(MetricArgs),
    /// Build a representing function from an auxiliary preset.
    Build(BuildArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// `<ell-id>[:k=v,...]` or `<ell-id>[:k=v,...]/<link>[:a=..,b=..]/c=<val>[/inverse]`.
    spec: String,
    /// Lower end of the range (r for ℓ, t for L).
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Upper end of the range.
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Fixed output for curves of L.
    #[arg(long, default_value_t = 3.0)]
    y: f64,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    table2: bool,
    #[arg(long)]
    table3: bool,
    /// Verify one assembled loss.
    #[arg(long)]
    loss: Option<String>,
    /// Report path; `.json` selects JSON, anything else CSV; `-` is stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Overrides the format chosen from the file name.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "exp")]
    link: String,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    loss: String,
    #[arg(long)]
    data: String,
    /// Weight of the penalty ‖w‖².
    #[arg(long, default_value_t = 0.0)]
    reg: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct RiskArgs {
    #[arg(long)]
    loss: String,
    #[arg(long)]
    data: String,
    /// JSON written by `fit`, or a bare `{"w": [...], "b0": ...}` object.
    #[arg(long)]
    model: String,
}

#[derive(Args)]
struct MetricArgs {
    /// One of abs_rel, lrmse, mean_log10, rae.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    data: String,
    /// Headed CSV whose first column holds the predictions.
    #[arg(long)]
    pred: String,
}

#[derive(Args)]
struct BuildArgs {
    /// pow:alpha=<x>, log1p, asinh-sqrt, const, g-log1p or g-asinh-sqrt.
    #[arg(long)]
    aux: String,
    /// Emit ℓ(r) = ℓ̃(r) + ℓ̃(1/r) − 2ℓ̃(1) instead of ℓ̃.
    #[arg(long)]
    symmetrize: bool,
    /// Emit the certificate ℓ̃'(r) + rℓ̃''(r) instead of values.
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value = "-")]
    out: String,
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.cmd {
        Cmd::List { convex } => cmd_list(convex),
        Cmd::Curve(a) => cmd_curve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Risk(a) => cmd_risk(a),
        Cmd::Metric(a) => cmd_metric(a),
        Cmd::Build(a) => cmd_build(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("rbloss: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("rbloss: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open_out(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(path)?))
    })
}

fn open_in(path: &str) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn cmd_list(convex: bool) -> CmdResult {
    let mut out = open_out("-")?;
    writeln!(
        out,
        "number,id,params,ratio_symmetric,convex,continuous,locally_lipschitz,globally_lipschitz,differentiable"
    )?;
    for id in LossId::ALL {
        let flags = id.declared().as_array();
        if convex && !flags[1] {
            continue;
        }
        let cols: Vec<&str> = flags.iter().map(|&f| flag(f)).collect();
        writeln!(
            out,
            "{},{},{},{}",
            id.number(),
            id,
            id.param_names().join(";"),
            cols.join(",")
        )?;
    }
    out.flush()?;
    Ok(())
}

fn sample_range(from: f64, to: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(Failure::Usage("range ends must be finite".into()));
    }
    if points > 1 && !(from < to) {
        return Err(Failure::Usage(format!("empty range [{from}, {to}]")));
    }
    Ok(match points {
        0 => Vec::new(),
        1 => vec![from],
        n => linspace(from, to, n),
    })
}

fn cmd_curve(a: CurveArgs) -> CmdResult {
    let mut out = open_out(&a.out)?;
    if a.spec.contains('/') {
        let loss = LossSpec::parse(&a.spec)?.build()?;
        loss.check_y(a.y)?;
        let ts = sample_range(a.from.unwrap_or(-2.0), a.to.unwrap_or(4.0), a.points)?;
        writeln!(out, "t,loss")?;
        for t in ts {
            writeln!(out, "{},{}", fmt_sig17(t), fmt_sig17(loss.eval(a.y, t)?))?;
        }
    } else {
        let ell = LossSpec::parse(&a.spec)?.ell()?;
        let (from, to) = (a.from.unwrap_or(0.05), a.to.unwrap_or(20.0));
        if !(from > 0.0) {
            return Err(Failure::Usage(format!("r range must lie in (0, inf), got from = {from}")));
        }
        writeln!(out, "r,ell")?;
        for r in sample_range(from, to, a.points)? {
            writeln!(out, "{},{}", fmt_sig17(r), fmt_sig17(ell.value(r)))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Table flags apply to `--loss` only for the table's own links, default
/// parameters and the standard quotient.
fn table_flags(spec: &LossSpec) -> Option<[bool; 5]> {
    if spec.direction != Direction::Standard || spec.params != LossParams::defaults(spec.id) {
        return None;
    }
    let link = Table3Link::ALL.into_iter().find(|l| l.link() == spec.link)?;
    Some(expected_table3(spec.id, link, spec.c))
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    if !a.table2 && !a.table3 && a.loss.is_none() {
        return Err(Failure::Usage(
            "nothing to verify: pass --table2, --table3 or --loss <spec>".into(),
        ));
    }
    let single = match &a.loss {
        Some(s) => {
            let spec = LossSpec::parse(s)?;
            Some((spec.build()?, table_flags(&spec)))
        }
        None => None,
    };
    let mut reports: Vec<PropertyReport> = Vec::new();
    let mut summary = Vec::new();
    let mut tally = |name: &str, rs: Vec<PropertyReport>, reports: &mut Vec<PropertyReport>| {
        let checks: usize = rs.iter().map(|r| r.checks.len()).sum();
        let bad: usize = rs.iter().map(|r| r.unexplained_mismatches()).sum();
        summary.push((name.to_string(), rs.len(), checks, bad));
        reports.extend(rs);
    };
    if a.table2 {
        tally("table2", verify_table2(), &mut reports);
    }
    if a.table3 {
        tally("table3", verify_table3(), &mut reports);
    }
    if let Some((loss, flags)) = single {
        tally("loss", vec![verify_loss(&loss, flags)], &mut reports);
    }

    let json = match a.format.as_deref() {
        Some(f) => f == "json",
        None => Path::new(&a.out).extension().is_some_and(|e| e == "json"),
    };
    let mut out = open_out(&a.out)?;
    if json {
        write_json(&reports, &mut out)?;
    } else {
        write_csv(&reports, &mut out)?;
    }
    out.flush()?;

    let mut total_bad = 0;
    for (name, rows, checks, bad) in &summary {
        eprintln!("{name}: {rows} subjects, {checks} checks, {bad} unexplained mismatches");
        total_bad += bad;
    }
    for r in &reports {
        for c in r.checks.iter().filter(|c| c.is_unexplained_mismatch()) {
            eprintln!(
                "  mismatch {} {}: expected {}, got {} (witness {:?}, value {})",
                r.subject,
                c.property,
                c.expected.map_or("-", flag),
                c.verdict,
                c.witness,
                c.witness_value
            );
        }
    }
    if total_bad > 0 {
        return Err(Failure::Mismatch(format!("{total_bad} unexplained mismatches")));
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let kind: LinkKind = a.link.parse()?;
    let dflt = LinkFunction::with_default_interval(kind);
    let link = LinkFunction::new(kind, a.a.unwrap_or(dflt.a()), a.b.unwrap_or(dflt.b()))?;
    let data = generate_multiplicative(a.n, &LinearModel::reference(a.d), &link, a.sigma, a.seed)?;
    let mut out = open_out(&a.out)?;
    write_dataset(&data, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_fit(a: FitArgs) -> CmdResult {
    let spec = LossSpec::parse(&a.loss)?;
    let loss = spec.build()?;
    let data = read_dataset(open_in(&a.data)?)?;
    let opts = FitOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        init: None,
    };
    let res = match fit(&loss, &data, a.reg, &opts) {
        Ok(r) => r,
        Err(Error::StepCollapse(r)) => {
            eprintln!("rbloss: warning: line search collapsed, reporting the last iterate");
            *r
        }
        Err(e) => return Err(e.into()),
    };
    let doc = serde_json::json!({
        "spec_version": SPEC_VERSION,
        "loss": spec.to_string(),
        "reg": a.reg,
        "n": data.n(),
        "model": res.model,
        "final_risk": res.final_risk,
        "converged": res.converged,
        "iterations": res.risk_trace.last().map_or(0, |t| t.0),
        "grad_norm": res.grad_norm,
        "risk_trace": res.risk_trace,
    });
    let mut out = open_out(&a.out)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(Error::from)?;
    writeln!(out)?;
    out.flush()?;
    eprintln!(
        "final_risk={} converged={} iterations={}",
        fmt_sig17(res.final_risk),
        res.converged,
        doc["iterations"]
    );
    Ok(())
}

fn read_model(path: &str) -> Result<LinearModel, Failure> {
    let v: serde_json::Value = serde_json::from_reader(open_in(path)?).map_err(Error::from)?;
    let m = v.get("model").cloned().unwrap_or(v);
    Ok(serde_json::from_value(m).map_err(Error::from)?)
}

fn cmd_risk(a: RiskArgs) -> CmdResult {
    let spec = LossSpec::parse(&a.loss)?;
    let loss = spec.build()?;
    let data = read_dataset(open_in(&a.data)?)?;
    let model = read_model(&a.model)?;
    let r = empirical_risk(&loss, &data, &model)?;
    let mut out = open_out("-")?;
    writeln!(out, "loss,n,risk")?;
    writeln!(out, "{spec},{},{}", data.n(), fmt_sig17(r))?;
    out.flush()?;
    Ok(())
}

fn cmd_metric(a: MetricArgs) -> CmdResult {
    let kind: MetricKind = a.kind.parse()?;
    let data = read_dataset(open_in(&a.data)?)?;
    let pred = read_predictions(open_in(&a.pred)?)?;
    let v = metric(kind, &data, &pred)?;
    let mut out = open_out("-")?;
    writeln!(out, "metric,value")?;
    writeln!(out, "{kind},{}", fmt_sig17(v))?;
    out.flush()?;
    Ok(())
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let aux = AuxFunction::preset(&a.aux)?;
    if a.symmetrize && a.certify {
        symmetrize(aux.clone())?;
    }
    let grid = working_grid();
    let mut out = open_out(&a.out)?;
    let mut negative = None;
    if a.certify {
        let cert = convexity_certificate(&aux, &grid);
        writeln!(out, "r,certificate")?;
        for (&r, &c) in grid.iter().zip(&cert) {
            writeln!(out, "{},{}", fmt_sig17(r), fmt_sig17(c))?;
            if !(c >= -1e-10) && negative.is_none() {
                negative = Some((r, c));
            }
        }
    } else if a.symmetrize {
        let ell = symmetrize(aux)?.into_ell();
        writeln!(out, "r,ell")?;
        for &r in &grid {
            writeln!(out, "{},{}", fmt_sig17(r), fmt_sig17(ell.value(r)))?;
        }
    } else {
        writeln!(out, "r,aux")?;
        for &r in &grid {
            writeln!(out, "{},{}", fmt_sig17(r), fmt_sig17(aux.value(r)))?;
        }
    }
    out.flush()?;
    if let Some((r, c)) = negative {
        let what = if a.symmetrize { "symmetrized loss" } else { "certificate" };
        return Err(Failure::Mismatch(format!(
            "{what} is not certified convex: certificate {c} at r = {r}"
        )));
    }
    Ok(())
}
