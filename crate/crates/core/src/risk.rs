//! Empirical and regularized risk of linear-in-link predictors, relative
//! error metrics, synthetic multiplicative-noise data and a descent fitter.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::RatioLoss;
use crate::catalog::Side;
use crate::error::{Error, Result};
use crate::link::{LinkFunction, LinkKind};
use crate::num::{linspace, logspace};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Dataset("at least one row is required".into()));
        }
        if x.len() != y.len() {
            return Err(Error::Dataset(format!(
                "{} feature rows but {} outputs",
                x.len(),
                y.len()
            )));
        }
        let d = x[0].len();
        for (i, (row, &yi)) in x.iter().zip(&y).enumerate() {
            if row.len() != d {
                return Err(Error::Dataset(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            if !(yi.is_finite() && row.iter().all(|v| v.is_finite())) {
                return Err(Error::Dataset(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(Dataset { x, y })
    }

    /// Outputs only, no features.
    pub fn from_outputs(y: Vec<f64>) -> Result<Self> {
        Self::new(vec![Vec::new(); y.len()], y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x[0].len()
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Every output lies inside the link's open interval.
    pub fn check_range(&self, link: &LinkFunction) -> Result<()> {
        for (i, &y) in self.y.iter().enumerate() {
            if !link.contains(y) {
                return Err(Error::Row {
                    row: i,
                    source: Box::new(Error::OutputOutOfRange {
                        y,
                        a: link.a(),
                        b: link.b(),
                    }),
                });
            }
        }
        Ok(())
    }

    /// A copy with every output multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Dataset {
            x: self.x.clone(),
            y: self.y.iter().map(|y| y * k).collect(),
        }
    }
}

/// `t = w·x + b0`, fed through the link of the loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b0: f64,
}

impl LinearModel {
    pub fn zeros(d: usize) -> Self {
        LinearModel {
            w: vec![0.0; d],
            b0: 0.0,
        }
    }

    /// The default data-generating model: `w_j = (−1)^j / (j + 1)`, `b0 = 0.5`.
    pub fn reference(d: usize) -> Self {
        LinearModel {
            w: (0..d)
                .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / (j + 1) as f64)
                .collect(),
            b0: 0.5,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b0
    }

    pub fn penalty(&self) -> f64 {
        self.w.iter().map(|w| w * w).sum()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.w.len() == d {
            Ok(())
        } else {
            Err(Error::Dataset(format!(
                "model has {} weights but the data has {d} features",
                self.w.len()
            )))
        }
    }

    fn to_vec(&self) -> Vec<f64> {
        let mut v = self.w.clone();
        v.push(self.b0);
        v
    }

    fn from_slice(v: &[f64]) -> Self {
        let (w, b0) = v.split_at(v.len() - 1);
        LinearModel {
            w: w.to_vec(),
            b0: b0[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: LinearModel,
    /// `(iteration, objective)`; the objective is the regularized risk and
    /// equals the empirical risk when the penalty weight is 0.
    pub risk_trace: Vec<(usize, f64)>,
    pub converged: bool,
    /// Empirical risk of the final model.
    pub final_risk: f64,
    pub grad_norm: f64,
}

fn per_row<T: Send>(
    data: &Dataset,
    f: &LinearModel,
    op: impl Fn(f64, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    f.check_dim(data.d())?;
    (0..data.n())
        .into_par_iter()
        .map(|i| {
            let t = f.score(&data.x[i]);
            op(data.y[i], t).map_err(|e| Error::Row {
                row: i,
                source: Box::new(e),
            })
        })
        .collect()
}

/// `(1/n) Σ L(xᵢ, yᵢ, f(xᵢ))`, summed in row order.
pub fn empirical_risk(loss: &RatioLoss, data: &Dataset, f: &LinearModel) -> Result<f64> {
    let rows = per_row(data, f, |y, t| loss.eval(y, t))?;
    Ok(rows.iter().sum::<f64>() / data.n() as f64)
}

/// Empirical risk plus `λ‖w‖²`.
pub fn regularized_risk(
    loss: &RatioLoss,
    data: &Dataset,
    f: &LinearModel,
    lambda_reg: f64,
) -> Result<f64> {
    if !(lambda_reg >= 0.0) {
        return Err(Error::param("reg", "lambda_reg >= 0"));
    }
    Ok(empirical_risk(loss, data, f)? + lambda_reg * f.penalty())
}

/// Gradient of the regularized risk in `(w, b0)`, using the right
/// derivative in `t` at kinks.
pub fn risk_gradient(
    loss: &RatioLoss,
    data: &Dataset,
    f: &LinearModel,
    lambda_reg: f64,
) -> Result<LinearModel> {
    let rows = per_row(data, f, |y, t| loss.deriv_t(y, t, Side::Right))?;
    let n = data.n() as f64;
    let mut g = LinearModel::zeros(data.d());
    for (xi, di) in data.x.iter().zip(&rows) {
        for (gj, xj) in g.w.iter_mut().zip(xi) {
            *gj += di * xj;
        }
        g.b0 += di;
    }
    for (gj, wj) in g.w.iter_mut().zip(&f.w) {
        *gj = *gj / n + 2.0 * lambda_reg * wj;
    }
    g.b0 /= n;
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskAtZero {
    pub value: f64,
    /// `m = (u(0) + c)/c`, when the bound applies.
    pub m: Option<f64>,
    /// Estimated Lipschitz constant of `ℓ` on `(0, m]`.
    pub lipschitz_0m: Option<f64>,
    /// `|ℓ|_{[0,m],1} (u(0)/c + 2)`.
    pub bound: Option<f64>,
}

impl RiskAtZero {
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.value <= b * (1.0 + 1e-12))
    }
}

/// Whether `ℓ` extends continuously to 0 with a bounded derivative there.
pub fn continuable_at_zero(loss: &RatioLoss) -> bool {
    let ell = loss.ell();
    let v = ell.value(1e-12);
    let s1 = ell.slope(1e-12, Side::Right);
    let s2 = ell.slope(1e-9, Side::Right);
    v.is_finite() && s1.is_finite() && (s1 - s2).abs() <= 1e-3 * (1.0 + s2.abs())
}

/// Empirical risk of `f ≡ 0`; with `c > 0` and `ℓ` continuable at 0 the
/// bound `|ℓ|_{[0,m],1}(u(0)/c + 2)` is reported alongside.
pub fn risk_at_zero(loss: &RatioLoss, data: &Dataset) -> Result<RiskAtZero> {
    let value = empirical_risk(loss, data, &LinearModel::zeros(data.d()))?;
    let c = loss.c();
    if !(c > 0.0 && continuable_at_zero(loss)) {
        return Ok(RiskAtZero {
            value,
            m: None,
            lipschitz_0m: None,
            bound: None,
        });
    }
    let u0 = loss.link().eval(0.0);
    let m = (u0 + c) / c;
    let ell = loss.ell();
    let mut pts = linspace(1e-12, m, 4001);
    pts.extend(logspace(1e-12, m, 401));
    pts.extend(ell.breakpoints().into_iter().filter(|&k| k <= m));
    let lip = pts
        .iter()
        .flat_map(|&r| [ell.slope(r, Side::Left), ell.slope(r, Side::Right)])
        .map(f64::abs)
        .fold(0.0, f64::max);
    Ok(RiskAtZero {
        value,
        m: Some(m),
        lipschitz_0m: Some(lip),
        bound: Some(lip * (u0 / c + 2.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    AbsRel,
    Lrmse,
    MeanLog10,
    Rae,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::AbsRel,
        MetricKind::Lrmse,
        MetricKind::MeanLog10,
        MetricKind::Rae,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::AbsRel => "abs_rel",
            MetricKind::Lrmse => "lrmse",
            MetricKind::MeanLog10 => "mean_log10",
            MetricKind::Rae => "rae",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::param("metric", format!("unknown metric `{s}`")))
    }
}

pub fn metric(kind: MetricKind, data: &Dataset, pred: &[f64]) -> Result<f64> {
    let y = data.y();
    if pred.len() != y.len() {
        return Err(Error::Dataset(format!(
            "{} predictions for {} rows",
            pred.len(),
            y.len()
        )));
    }
    for (i, (&p, &yi)) in pred.iter().zip(y).enumerate() {
        if !(p > 0.0 && p.is_finite() && yi > 0.0) {
            return Err(Error::Row {
                row: i,
                source: Box::new(Error::Dataset(format!(
                    "metrics need positive values, got y = {yi}, prediction = {p}"
                ))),
            });
        }
    }
    let n = y.len() as f64;
    let pairs = pred.iter().zip(y);
    Ok(match kind {
        MetricKind::AbsRel => pairs.map(|(p, y)| (p - y).abs() / y).sum::<f64>() / n,
        MetricKind::Lrmse => (pairs.map(|(p, y)| (p.ln() - y.ln()).powi(2)).sum::<f64>() / n).sqrt(),
        MetricKind::MeanLog10 => pairs.map(|(p, y)| (p.log10() - y.log10()).abs()).sum::<f64>() / n,
        MetricKind::Rae => {
            let mean = y.iter().sum::<f64>() / n;
            if y.iter().all(|&v| v == mean) {
                return Err(Error::RaeUndefined);
            }
            let num: f64 = pairs.map(|(p, y)| (y - p).abs()).sum();
            let den: f64 = y.iter().map(|v| (v - mean).abs()).sum();
            num / den
        }
    })
}

/// Draws `x ~ U[−1, 1]^d` and `y = u(w·x + b0) · exp(σ z)`, `z ~ N(0, 1)`,
/// redrawing a row whenever `y` leaves the open interval of the link.
pub fn generate_multiplicative(
    n: usize,
    truth: &LinearModel,
    link: &LinkFunction,
    sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Dataset("n must be >= 1".into()));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", "sigma >= 0"));
    }
    let d = truth.w.len();
    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let mut tries = 0;
        loop {
            let x: Vec<f64> = (0..d).map(|_| rng.symmetric()).collect();
            let z = rng.normal();
            let y = link.eval(truth.score(&x)) * (sigma * z).exp();
            if link.contains(y) && y > link.lower_clamp() && y < link.upper_clamp() {
                xs.push(x);
                ys.push(y);
                break;
            }
            tries += 1;
            if tries >= 10_000 {
                return Err(Error::Dataset(
                    "could not draw a row inside the output interval".into(),
                ));
            }
        }
    }
    Dataset::new(xs, ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting model; `None` uses the default initialization.
    pub init: Option<LinearModel>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 10_000,
            init: None,
        }
    }
}

/// `w = 0` and an intercept that puts the initial predictions at the
/// geometric mean of `y − a` for the exponential links, 0 otherwise.
pub fn default_init(loss: &RatioLoss, data: &Dataset) -> LinearModel {
    let link = loss.link();
    let mean_log =
        || data.y.iter().map(|y| (y - link.a()).ln()).sum::<f64>() / data.n() as f64;
    let b0 = match link.kind() {
        LinkKind::Exp => mean_log(),
        LinkKind::NegExp => -mean_log(),
        _ => 0.0,
    };
    LinearModel {
        w: vec![0.0; data.d()],
        b0,
    }
}

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;
/// Consecutive accepted steps without a resolvable decrease before the
/// descent stops at the rounding floor of the objective.
const STALL_LIMIT: usize = 50;

/// Gradient descent with Armijo backtracking (halving) on the regularized risk.
///
/// Stops when the max-norm of the gradient drops below `tol` (`converged`),
/// after `max_iter` iterations, or once the objective stops decreasing at
/// its rounding floor; the last two report `converged = false`.
pub fn fit(
    loss: &RatioLoss,
    data: &Dataset,
    lambda_reg: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    if !(lambda_reg >= 0.0 && lambda_reg.is_finite()) {
        return Err(Error::param("reg", "lambda_reg >= 0"));
    }
    data.check_range(loss.link())?;
    let mut model = opts.init.clone().unwrap_or_else(|| default_init(loss, data));
    model.check_dim(data.d())?;
    let objective = |m: &LinearModel| regularized_risk(loss, data, m, lambda_reg);

    let mut obj = objective(&model)?;
    if !obj.is_finite() {
        return Err(Error::NonFiniteRisk(obj));
    }
    let mut trace = vec![(0, obj)];
    let mut step = 1.0;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut stalled = 0;

    for iter in 1..=opts.max_iter {
        let g = risk_gradient(loss, data, &model, lambda_reg)?.to_vec();
        grad_norm = g.iter().fold(0.0, |m, v| f64::max(m, v.abs()));
        if grad_norm < opts.tol {
            converged = true;
            break;
        }
        let g2: f64 = g.iter().map(|v| v * v).sum();
        let theta = model.to_vec();
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial: Vec<f64> = theta.iter().zip(&g).map(|(p, d)| p - step * d).collect();
            let cand = LinearModel::from_slice(&trial);
            if let Ok(v) = objective(&cand) {
                if v.is_finite() && v <= obj - ARMIJO_C1 * step * g2 {
                    accepted = Some((cand, v));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((m, v)) => {
                if obj - v <= 4.0 * f64::EPSILON * obj.abs() {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                model = m;
                obj = v;
                trace.push((iter, obj));
                step *= 2.0;
                if stalled >= STALL_LIMIT {
                    break;
                }
            }
            None => {
                let final_risk = empirical_risk(loss, data, &model)?;
                return Err(Error::StepCollapse(Box::new(FitResult {
                    model,
                    risk_trace: trace,
                    converged: false,
                    final_risk,
                    grad_norm,
                })));
            }
        }
    }
    let final_risk = empirical_risk(loss, data, &model)?;
    Ok(FitResult {
        model,
        risk_trace: trace,
        converged,
        final_risk,
        grad_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CatalogFunction, LossId, LossParams};
    use approx::assert_relative_eq;

    fn exp_loss(id: LossId, c: f64) -> RatioLoss {
        RatioLoss::standard(
            CatalogFunction::with_defaults(id).into_ell(),
            LinkFunction::exp(0.0).unwrap(),
            c,
        )
        .unwrap()
    }

    #[test]
    fn empirical_risk_examples() {
        let l = exp_loss(LossId::Lpre, 0.0);
        let d = Dataset::new(vec![vec![0.7]], vec![3.0]).unwrap();
        let exact = LinearModel {
            w: vec![0.0],
            b0: 3f64.ln(),
        };
        assert!(empirical_risk(&l, &d, &exact).unwrap().abs() < 1e-15);
        let d2 = Dataset::from_outputs(vec![2.0, 8.0]).unwrap();
        let f = LinearModel {
            w: vec![],
            b0: 4f64.ln(),
        };
        assert_relative_eq!(empirical_risk(&l, &d2, &f).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn regularized_risk_examples() {
        let l = exp_loss(LossId::Lpre, 0.0);
        let d = Dataset::new(vec![vec![1.0, 0.0]], vec![std::f64::consts::E.powf(2.0)]).unwrap();
        let f = LinearModel {
            w: vec![2.0, 0.0],
            b0: 0.0,
        };
        assert!(empirical_risk(&l, &d, &f).unwrap().abs() < 1e-14);
        assert_relative_eq!(regularized_risk(&l, &d, &f, 1.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(
            regularized_risk(&l, &d, &f, 0.0).unwrap(),
            empirical_risk(&l, &d, &f).unwrap()
        );
        assert!(regularized_risk(&l, &d, &f, -1.0).is_err());
    }

    #[test]
    fn row_errors_carry_the_index() {
        let l = exp_loss(LossId::Lpre, 0.0);
        let d = Dataset::from_outputs(vec![1.0, -2.0]).unwrap();
        match empirical_risk(&l, &d, &LinearModel::zeros(0)) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn risk_at_zero_examples() {
        let l = exp_loss(LossId::AbsRel, 1.0);
        let d = Dataset::from_outputs(vec![3.0]).unwrap();
        let r = risk_at_zero(&l, &d).unwrap();
        assert_relative_eq!(r.value, 0.5, epsilon = 1e-15);
        assert!(r.within_bound().unwrap());
        assert_relative_eq!(r.m.unwrap(), 2.0);
        let d1 = Dataset::from_outputs(vec![1.0, 1.0]).unwrap();
        assert_eq!(risk_at_zero(&l, &d1).unwrap().value, 0.0);
        // lpre blows up at 0, so no bound is reported
        let lp = exp_loss(LossId::Lpre, 1.0);
        assert!(risk_at_zero(&lp, &d).unwrap().bound.is_none());
    }

    #[test]
    fn metric_examples() {
        let d = Dataset::from_outputs(vec![1.0, 100.0]).unwrap();
        assert_relative_eq!(
            metric(MetricKind::MeanLog10, &d, &[10.0, 10.0]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        for k in [MetricKind::AbsRel, MetricKind::Lrmse, MetricKind::MeanLog10] {
            assert_eq!(metric(k, &d, &[1.0, 100.0]).unwrap(), 0.0);
        }
        let c = Dataset::from_outputs(vec![2.0, 2.0, 2.0]).unwrap();
        assert!(matches!(
            metric(MetricKind::Rae, &c, &[1.0, 2.0, 3.0]),
            Err(Error::RaeUndefined)
        ));
        assert_relative_eq!(metric(MetricKind::Rae, &d, &[1.0, 100.0]).unwrap(), 0.0);
        assert!(metric(MetricKind::AbsRel, &d, &[1.0]).is_err());
        assert!(metric(MetricKind::AbsRel, &d, &[1.0, 0.0]).is_err());
        assert_eq!("rae".parse::<MetricKind>().unwrap(), MetricKind::Rae);
    }

    #[test]
    fn generator_is_deterministic_and_noise_free_when_asked() {
        let link = LinkFunction::exp(0.0).unwrap();
        let truth = LinearModel::reference(3);
        let a = generate_multiplicative(50, &truth, &link, 0.0, 7).unwrap();
        for (x, y) in a.x().iter().zip(a.y()) {
            assert_eq!(*y, link.eval(truth.score(x)));
        }
        let b = generate_multiplicative(50, &truth, &link, 0.3, 7).unwrap();
        let c = generate_multiplicative(50, &truth, &link, 0.3, 7).unwrap();
        assert_eq!(b, c);
        let lg = LinkFunction::logistic(0.0, 1.0).unwrap();
        let d = generate_multiplicative(200, &truth, &lg, 1.0, 3).unwrap();
        assert!(d.y().iter().all(|&y| y > 0.0 && y < 1.0));
    }

    #[test]
    fn noise_mean_is_centred() {
        let link = LinkFunction::exp(0.0).unwrap();
        let truth = LinearModel::reference(2);
        let sigma = 0.4;
        let n = 1000;
        let d = generate_multiplicative(n, &truth, &link, sigma, 11).unwrap();
        let mean = d
            .x()
            .iter()
            .zip(d.y())
            .map(|(x, y)| y.ln() - truth.score(x))
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() <= 3.0 * sigma / (n as f64).sqrt());
    }

    #[test]
    fn intercept_only_fits() {
        let d = Dataset::from_outputs(vec![2.0, 8.0]).unwrap();
        let start = FitOptions {
            init: Some(LinearModel { w: vec![], b0: -1.0 }),
            ..FitOptions::default()
        };
        let sq = fit(&exp_loss(LossId::SquaredLog, 0.0), &d, 0.0, &start).unwrap();
        assert!(sq.converged);
        assert_relative_eq!(sq.model.b0, 4f64.ln(), epsilon = 1e-8);
        let pin = RatioLoss::standard(
            CatalogFunction::new(
                LossId::LogPinball,
                LossParams {
                    tau: 0.5,
                    ..LossParams::defaults(LossId::LogPinball)
                },
            )
            .unwrap()
            .into_ell(),
            LinkFunction::exp(0.0).unwrap(),
            0.0,
        )
        .unwrap();
        let p = fit(&pin, &d, 0.0, &FitOptions::default()).unwrap();
        assert!(p.model.b0 >= 2f64.ln() && p.model.b0 <= 8f64.ln());
    }

    #[test]
    fn trace_is_monotone_and_errors_are_reported() {
        let link = LinkFunction::exp(0.0).unwrap();
        let d = generate_multiplicative(100, &LinearModel::reference(2), &link, 0.2, 5).unwrap();
        let r = fit(&exp_loss(LossId::Lpre, 0.0), &d, 0.01, &FitOptions::default()).unwrap();
        assert!(r.converged);
        for w in r.risk_trace.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
        let bad = FitOptions {
            init: Some(LinearModel {
                w: vec![0.0, 0.0],
                b0: 800.0,
            }),
            ..FitOptions::default()
        };
        assert!(matches!(
            fit(&exp_loss(LossId::Lpre, 0.0), &d, 0.0, &bad),
            Err(Error::NonFiniteRisk(_)) | Err(Error::Row { .. })
        ));
    }

    #[test]
    fn stops_at_the_rounding_floor() {
        let link = LinkFunction::exp(0.0).unwrap();
        let data = generate_multiplicative(30, &LinearModel::reference(2), &link, 0.4, 3).unwrap();
        let opts = FitOptions {
            tol: 0.0,
            max_iter: 1_000_000,
            init: None,
        };
        let r = fit(&exp_loss(LossId::SquaredLog, 0.0), &data, 0.0, &opts).unwrap();
        assert!(!r.converged);
        assert!(r.risk_trace.len() < 10_000);
        assert!(r.grad_norm < 1e-6);
    }
}
