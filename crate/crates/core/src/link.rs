//! Monotone surjective links `u: ℝ → (a, b)`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    /// `exp(t) + a` on `(a, ∞)`
    Exp,
    /// `exp(-t) + a` on `(a, ∞)`, decreasing
    NegExp,
    /// `(b - a) / (1 + exp(-t)) + a`
    Logistic,
    /// `(b - a)(1/2 + atan(t)/π) + a`
    Arctan,
    /// `(b - a) exp(-exp(-t)) + a`
    Gumbel,
}

impl LinkKind {
    pub const ALL: [LinkKind; 5] = [
        LinkKind::Exp,
        LinkKind::NegExp,
        LinkKind::Logistic,
        LinkKind::Arctan,
        LinkKind::Gumbel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Exp => "exp",
            LinkKind::NegExp => "neg-exp",
            LinkKind::Logistic => "logistic",
            LinkKind::Arctan => "arctan",
            LinkKind::Gumbel => "gumbel",
        }
    }

    pub fn needs_finite_b(self) -> bool {
        !matches!(self, LinkKind::Exp | LinkKind::NegExp)
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LinkKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidLink(format!("unknown link kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkFunction {
    kind: LinkKind,
    a: f64,
    b: f64,
}

impl LinkFunction {
    pub fn new(kind: LinkKind, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidLink(format!(
                "{kind}: lower endpoint a = {a} must be finite and >= 0"
            )));
        }
        if kind.needs_finite_b() {
            if !(b.is_finite() && b > a) {
                return Err(Error::InvalidLink(format!(
                    "{kind}: upper endpoint b = {b} must be finite and > a"
                )));
            }
        } else if b != f64::INFINITY {
            return Err(Error::InvalidLink(format!(
                "{kind}: upper endpoint must be +inf, got {b}"
            )));
        }
        Ok(LinkFunction { kind, a, b })
    }

    /// `exp(t) + a` on `(a, ∞)`.
    pub fn exp(a: f64) -> Result<Self> {
        Self::new(LinkKind::Exp, a, f64::INFINITY)
    }

    /// Logistic link onto `(a, b)`.
    pub fn logistic(a: f64, b: f64) -> Result<Self> {
        Self::new(LinkKind::Logistic, a, b)
    }

    /// The default interval for `kind`: `(0, ∞)` for the exponential links,
    /// `(0, 1)` otherwise.
    pub fn with_default_interval(kind: LinkKind) -> Self {
        let b = if kind.needs_finite_b() {
            1.0
        } else {
            f64::INFINITY
        };
        LinkFunction { kind, a: 0.0, b }
    }

    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_increasing(&self) -> bool {
        self.kind != LinkKind::NegExp
    }

    /// Smallest value `eval` returns.
    pub fn lower_clamp(&self) -> f64 {
        if self.a == 0.0 {
            1e-300
        } else {
            self.a * (1.0 + 2.0 * f64::EPSILON)
        }
    }

    /// Largest value `eval` returns.
    pub fn upper_clamp(&self) -> f64 {
        if self.b.is_finite() {
            self.b - 1e-15 * (self.b - self.a)
        } else {
            f64::MAX
        }
    }

    /// `u(t)`, kept strictly inside `(a, b)`.
    pub fn eval(&self, t: f64) -> f64 {
        let (a, w) = (self.a, self.b - self.a);
        let v = match self.kind {
            LinkKind::Exp => t.exp() + a,
            LinkKind::NegExp => (-t).exp() + a,
            LinkKind::Logistic => w * sigmoid(t) + a,
            LinkKind::Arctan => w * (0.5 + t.atan() / PI) + a,
            LinkKind::Gumbel => w * (-(-t).exp()).exp() + a,
        };
        v.clamp(self.lower_clamp(), self.upper_clamp())
    }

    /// `u'(t)`.
    pub fn deriv(&self, t: f64) -> f64 {
        let w = self.b - self.a;
        match self.kind {
            LinkKind::Exp => t.exp(),
            LinkKind::NegExp => -(-t).exp(),
            LinkKind::Logistic => {
                let e = (-t.abs()).exp();
                w * e / ((1.0 + e) * (1.0 + e))
            }
            LinkKind::Arctan => w / (PI * (1.0 + t * t)),
            LinkKind::Gumbel => w * (-t - (-t).exp()).exp(),
        }
    }

    /// Global Lipschitz constant `|u|₁` where it is finite.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        let w = self.b - self.a;
        match self.kind {
            LinkKind::Exp | LinkKind::NegExp => None,
            LinkKind::Logistic => Some(w / 4.0),
            LinkKind::Arctan => Some(w / PI),
            LinkKind::Gumbel => Some(w / E),
        }
    }

    /// `u⁻¹(y)` for `y ∈ (a, b)`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y > self.a && y < self.b) {
            return Err(Error::OutputOutOfRange {
                y,
                a: self.a,
                b: self.b,
            });
        }
        let p = (y - self.a) / (self.b - self.a);
        Ok(match self.kind {
            LinkKind::Exp => (y - self.a).ln(),
            LinkKind::NegExp => -(y - self.a).ln(),
            LinkKind::Logistic => p.ln() - (-p).ln_1p(),
            LinkKind::Arctan => (PI * (p - 0.5)).tan(),
            LinkKind::Gumbel => -(-p.ln()).ln(),
        })
    }

    /// Whether `y` lies in the open interval `(a, b)`.
    pub fn contains(&self, y: f64) -> bool {
        y > self.a && y < self.b
    }

    pub fn label(&self) -> String {
        if self.b.is_finite() {
            format!("{}:a={},b={}", self.kind, self.a, self.b)
        } else {
            format!("{}:a={}", self.kind, self.a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::linspace;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn all_links() -> Vec<LinkFunction> {
        vec![
            LinkFunction::new(LinkKind::Exp, 0.0, f64::INFINITY).unwrap(),
            LinkFunction::new(LinkKind::NegExp, 0.5, f64::INFINITY).unwrap(),
            LinkFunction::new(LinkKind::Logistic, 0.0, 1.0).unwrap(),
            LinkFunction::new(LinkKind::Arctan, 1.0, 3.0).unwrap(),
            LinkFunction::new(LinkKind::Gumbel, 0.0, 2.0).unwrap(),
        ]
    }

    #[test]
    fn worked_values() {
        let lg = LinkFunction::logistic(0.0, 1.0).unwrap();
        assert_eq!(lg.eval(0.0), 0.5);
        assert_relative_eq!(LinkFunction::exp(0.0).unwrap().eval(3f64.ln()), 3.0, epsilon = 1e-15);
        let at = LinkFunction::new(LinkKind::Arctan, 0.0, 1.0).unwrap();
        assert_eq!(at.eval(0.0), 0.5);
    }

    #[test]
    fn worked_derivatives() {
        assert_eq!(LinkFunction::exp(0.0).unwrap().deriv(0.0), 1.0);
        assert_eq!(LinkFunction::logistic(0.0, 1.0).unwrap().deriv(0.0), 0.25);
        let ne = LinkFunction::new(LinkKind::NegExp, 0.0, f64::INFINITY).unwrap();
        assert_eq!(ne.deriv(0.0), -1.0);
    }

    #[test]
    fn construction_rules() {
        assert!(LinkFunction::new(LinkKind::Exp, 0.0, 5.0).is_err());
        assert!(LinkFunction::new(LinkKind::Logistic, 0.0, f64::INFINITY).is_err());
        assert!(LinkFunction::new(LinkKind::Gumbel, 2.0, 1.0).is_err());
        assert!(LinkFunction::new(LinkKind::Arctan, -1.0, 1.0).is_err());
        assert!("probit".parse::<LinkKind>().is_err());
        for k in LinkKind::ALL {
            assert_eq!(k.as_str().parse::<LinkKind>().unwrap(), k);
        }
    }

    #[test]
    fn surjectivity_proxy() {
        for u in all_links() {
            let (lo, hi) = if u.is_increasing() {
                (u.eval(-40.0), u.eval(40.0))
            } else {
                (u.eval(40.0), u.eval(-40.0))
            };
            let w = u.b() - u.a();
            // arctan approaches its endpoints like 1/(π t)
            let tol = if u.kind() == LinkKind::Arctan {
                w / (PI * 40.0)
            } else {
                1e-6 * w.min(1.0)
            };
            assert!(lo - u.a() <= tol, "{u:?} lower {lo}");
            if u.b().is_finite() {
                assert!(u.b() - hi <= tol, "{u:?} upper {hi}");
            } else {
                assert!(hi > 1e10);
            }
        }
    }

    #[test]
    fn values_stay_strictly_inside() {
        for u in all_links() {
            for t in [-1e4, -800.0, -40.0, 0.0, 40.0, 800.0, 1e4] {
                let v = u.eval(t);
                assert!(v > u.a() && v < u.b(), "{u:?} t={t} v={v}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for u in all_links() {
            for t in linspace(-20.0, 20.0, 81) {
                let h = 1e-5 * t.abs().max(1.0);
                let fd = (u.eval(t + h) - u.eval(t - h)) / (2.0 * h);
                let d = u.deriv(t);
                // rounding of u itself limits the difference quotient
                let noise = 1e-14 * (1.0 + u.eval(t).abs()) / h;
                assert!((fd - d).abs() <= 1e-6 * d.abs() + noise, "{u:?} t={t}");
            }
        }
    }

    #[test]
    fn logistic_slope_bound() {
        let u = LinkFunction::logistic(0.0, 1.0).unwrap();
        for t in linspace(-30.0, 30.0, 601) {
            assert!(u.deriv(t) <= 0.25);
        }
    }

    #[test]
    fn inverse_round_trip() {
        for u in all_links() {
            for t in linspace(-3.0, 3.0, 13) {
                assert_relative_eq!(u.inverse(u.eval(t)).unwrap(), t, epsilon = 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        // the Gumbel lower tail underflows below t ≈ -6.6 and the logistic
        // saturates in double precision above t ≈ 36
        fn strictly_monotone(t in -6.0f64..20.0, dt in 1e-3f64..1.0) {
            for u in all_links() {
                let (v0, v1) = (u.eval(t), u.eval(t + dt));
                if u.is_increasing() {
                    prop_assert!(v1 > v0);
                } else {
                    prop_assert!(v1 < v0);
                }
            }
        }
    }
}
