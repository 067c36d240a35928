//! Closed-form Lipschitz bounds for assembled losses compared against a
//! brute-force slope estimate, and the Nemitski spot check.

use serde::{Deserialize, Serialize};

use crate::assembly::{Direction, RatioLoss};
use crate::catalog::{CatalogFunction, LossId, RepresentingFunction, Side};
use crate::error::{Error, Result};
use crate::link::{LinkFunction, LinkKind};
use crate::num::{linspace, logspace};

use super::checks::{check_lipschitz, y_window, LipschitzMode, Target};

/// Which bound is being compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "lemma")]
pub enum LemmaKind {
    /// `|L|₁ ≤ |ℓ|₁ |u|₁ / (a + c)`.
    General,
    /// `|L|₁ ≤ |ℓ|_{I,1} |u|₁ / (a + c)` with `I = ((a+c)/(b+c), (b+c)/(a+c))`;
    /// for `Y = (0, 1)` this is `|ℓ|_{I,1} |u|₁ / c`.
    Interval,
    /// `|L|₁ ≤ 2M` for `ℓ` built from a generator with `|g| ≤ M`, exp link,
    /// `c = 0`.
    Generator { m: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub lemma: LemmaKind,
    pub subject: String,
    pub bound: f64,
    pub estimate: f64,
    pub witness_t: f64,
    pub witness_y: f64,
    /// `|ℓ|₁` or `|ℓ|_{I,1}`, where the bound uses one.
    pub ell_constant: Option<f64>,
    pub link_constant: Option<f64>,
    /// `estimate ≤ bound + 1e-6`.
    pub within: bool,
}

fn hyp(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

fn max_abs_slope(ell: &dyn RepresentingFunction, rs: impl IntoIterator<Item = f64>) -> f64 {
    rs.into_iter()
        .map(|r| ell.slope(r, Side::Left).abs().max(ell.slope(r, Side::Right).abs()))
        .fold(0.0, |m, s| if s.is_nan() { f64::INFINITY } else { m.max(s) })
}

/// `|ℓ|₁`: closed form where the catalog has one, otherwise the largest
/// one-sided slope on `[1e-8, 1e8]` once the widening-window check agrees
/// that `ℓ` is globally Lipschitz.
fn ell_global_constant(ell: &dyn RepresentingFunction) -> Result<f64> {
    if let Some(k) = ell.catalog().and_then(CatalogFunction::lipschitz_constant) {
        return Ok(k);
    }
    let check = check_lipschitz(Target::Ell(ell), LipschitzMode::Global);
    if !check.holds() {
        return Err(hyp(format!("{} is not globally Lipschitz", ell.label())));
    }
    let mut rs = logspace(1e-8, 1e8, 160_001);
    rs.extend(ell.breakpoints());
    Ok(max_abs_slope(ell, rs).max(check.estimate.unwrap_or(0.0)))
}

/// `|ℓ|_{I,1}` on the closed interval `[lo, hi]`.
fn ell_interval_constant(ell: &dyn RepresentingFunction, lo: f64, hi: f64) -> Result<f64> {
    let mut rs = logspace(lo, hi, 200_001);
    rs.extend(ell.breakpoints().into_iter().filter(|r| (lo..=hi).contains(r)));
    let k = max_abs_slope(ell, rs);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(hyp(format!("{} is not Lipschitz on [{lo}, {hi}]", ell.label())))
    }
}

/// Largest `|∂L/∂t|` over `t ∈ [-30, 30]` and a widening set of outputs,
/// from both one-sided analytic slopes and consecutive difference quotients.
fn sup_slope(loss: &RatioLoss) -> (f64, f64, f64) {
    let ts = linspace(-30.0, 30.0, 6001);
    let mut best = (0.0f64, f64::NAN, f64::NAN);
    for y in y_window(loss.link(), 8) {
        let vals: Vec<f64> = ts.iter().map(|&t| loss.value(y, t)).collect();
        for (i, &t) in ts.iter().enumerate() {
            let mut s = loss
                .slope_t(y, t, Side::Left)
                .abs()
                .max(loss.slope_t(y, t, Side::Right).abs());
            if i + 1 < ts.len() {
                s = s.max(((vals[i + 1] - vals[i]) / (ts[i + 1] - t)).abs());
            }
            if s.is_nan() {
                s = f64::INFINITY;
            }
            if s > best.0 {
                best = (s, t, y);
            }
        }
    }
    best
}

pub fn check_lipschitz_bound_lemmas(loss: &RatioLoss, lemma: LemmaKind) -> Result<LemmaRecord> {
    if loss.direction() != Direction::Standard {
        return Err(hyp("the bounds are stated for the standard quotient"));
    }
    let link = loss.link();
    let (a, b, c) = (link.a(), link.b(), loss.c());
    let ell = loss.ell().as_ref();

    let (bound, ell_k, link_k) = match lemma {
        LemmaKind::General | LemmaKind::Interval => {
            if !(a + c > 0.0) {
                return Err(hyp(format!("a + c = {} must be positive", a + c)));
            }
            let lu = link
                .lipschitz_constant()
                .ok_or_else(|| hyp(format!("link {} is not globally Lipschitz", link.label())))?;
            let lk = if lemma == LemmaKind::General {
                ell_global_constant(ell)?
            } else {
                if !b.is_finite() {
                    return Err(hyp("the interval bound needs b < inf"));
                }
                ell_interval_constant(ell, (a + c) / (b + c), (b + c) / (a + c))?
            };
            (lk * lu / (a + c), Some(lk), Some(lu))
        }
        LemmaKind::Generator { m } => {
            if link.kind() != LinkKind::Exp || a != 0.0 {
                return Err(hyp("the generator bound needs u = exp onto (0, inf)"));
            }
            if c != 0.0 {
                return Err(hyp("the generator bound needs c = 0"));
            }
            if !(m >= 0.0 && m.is_finite()) {
                return Err(hyp(format!("M = {m} must be finite and >= 0")));
            }
            (2.0 * m, None, None)
        }
    };

    let (estimate, t, y) = sup_slope(loss);
    Ok(LemmaRecord {
        lemma,
        subject: loss.label(),
        bound,
        estimate,
        witness_t: t,
        witness_y: y,
        ell_constant: ell_k,
        link_constant: link_k,
        within: estimate <= bound + 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NemitskiRecord {
    pub subject: String,
    pub holds: bool,
    /// Largest `L - bound` seen; non-positive when the bound holds.
    pub worst_excess: f64,
    pub witness_t: f64,
    pub witness_y: f64,
}

/// `L(x, y, t) ≤ (u(|t|) + c)/(a + c) + 1` for `ℓ = abs-rel` on the probe grid.
pub fn nemitski_spot_check(link: LinkFunction, c: f64) -> Result<NemitskiRecord> {
    if !link.is_increasing() {
        return Err(hyp("the spot check needs an increasing link"));
    }
    if !(link.a() + c > 0.0) {
        return Err(hyp(format!("a + c = {} must be positive", link.a() + c)));
    }
    let loss = RatioLoss::standard(CatalogFunction::with_defaults(LossId::AbsRel).into_ell(), link, c)?;
    let mut worst = (f64::NEG_INFINITY, f64::NAN, f64::NAN);
    for y in y_window(&link, 8) {
        for t in linspace(-20.0, 20.0, 801) {
            let bound = (link.eval(t.abs()) + c) / (link.a() + c) + 1.0;
            let excess = loss.value(y, t) - bound * (1.0 + 1e-12);
            if excess > worst.0 {
                worst = (excess, t, y);
            }
        }
    }
    Ok(NemitskiRecord {
        subject: loss.label(),
        holds: worst.0 <= 0.0,
        worst_excess: worst.0,
        witness_t: worst.1,
        witness_y: worst.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_rel(link: LinkFunction, c: f64) -> RatioLoss {
        RatioLoss::standard(CatalogFunction::with_defaults(LossId::AbsRel).into_ell(), link, c).unwrap()
    }

    #[test]
    fn interval_bound_for_abs_rel() {
        let l = abs_rel(LinkFunction::logistic(0.0, 1.0).unwrap(), 1.0);
        let rec = check_lipschitz_bound_lemmas(&l, LemmaKind::Interval).unwrap();
        assert!((rec.bound - 0.25).abs() < 1e-12);
        assert!(rec.within, "{rec:?}");
        assert!(rec.estimate > 0.2);
    }

    #[test]
    fn hypothesis_violations() {
        let l = abs_rel(LinkFunction::logistic(0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            check_lipschitz_bound_lemmas(&l, LemmaKind::General),
            Err(Error::Hypothesis(_))
        ));
        let l = abs_rel(LinkFunction::exp(0.0).unwrap(), 0.5);
        assert!(check_lipschitz_bound_lemmas(&l, LemmaKind::General).is_err());
        assert!(check_lipschitz_bound_lemmas(&l, LemmaKind::Generator { m: 1.0 }).is_err());
        assert!(nemitski_spot_check(LinkFunction::exp(0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn nemitski_bound_holds() {
        for (link, c) in [
            (LinkFunction::exp(0.0).unwrap(), 0.5),
            (LinkFunction::exp(1.0).unwrap(), 0.0),
            (LinkFunction::logistic(0.0, 1.0).unwrap(), 0.25),
        ] {
            let rec = nemitski_spot_check(link, c).unwrap();
            assert!(rec.holds, "{rec:?}");
        }
    }
}
