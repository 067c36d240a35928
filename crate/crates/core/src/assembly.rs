//! Assembled losses `L(x, y, t) = ℓ((u(t) + c) / (y + c))` and the
//! change of variables to distance-based form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{Ell, RepresentingFunction, Side};
use crate::error::{Error, Result};
use crate::link::LinkFunction;
use crate::num::linspace;

/// Which quotient is fed to `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `(u(t) + c) / (y + c)`
    Standard,
    /// `(y + c) / (u(t) + c)`
    Inverse,
}

#[derive(Debug, Clone)]
pub struct RatioLoss {
    ell: Ell,
    link: LinkFunction,
    c: f64,
    direction: Direction,
}

impl RatioLoss {
    pub fn new(ell: Ell, link: LinkFunction, c: f64, direction: Direction) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::param("c", format!("c = {c} must be finite and >= 0")));
        }
        Ok(RatioLoss {
            ell,
            link,
            c,
            direction,
        })
    }

    pub fn standard(ell: Ell, link: LinkFunction, c: f64) -> Result<Self> {
        Self::new(ell, link, c, Direction::Standard)
    }

    pub fn ell(&self) -> &Ell {
        &self.ell
    }

    pub fn link(&self) -> &LinkFunction {
        &self.link
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Strictly ratio-based: `c = 0`.
    pub fn is_strict(&self) -> bool {
        self.c == 0.0
    }

    /// The Lipschitz lemmas need `a + c > 0`.
    pub fn lipschitz_claims_enabled(&self) -> bool {
        self.link.a() + self.c > 0.0
    }

    pub fn check_y(&self, y: f64) -> Result<()> {
        if self.link.contains(y) {
            Ok(())
        } else {
            Err(Error::OutputOutOfRange {
                y,
                a: self.link.a(),
                b: self.link.b(),
            })
        }
    }

    /// The argument passed to `ℓ`.
    pub fn quotient(&self, y: f64, t: f64) -> f64 {
        let u = self.link.eval(t) + self.c;
        let v = y + self.c;
        match self.direction {
            Direction::Standard => u / v,
            Direction::Inverse => v / u,
        }
    }

    /// `L(y, t)` without range checks; may be non-finite far out.
    pub fn value(&self, y: f64, t: f64) -> f64 {
        let q = self.quotient(y, t);
        if q > 0.0 && q.is_finite() {
            self.ell.value(q)
        } else {
            f64::NAN
        }
    }

    pub fn eval(&self, y: f64, t: f64) -> Result<f64> {
        self.check_y(y)?;
        if !t.is_finite() {
            return Err(Error::NonFinitePrediction(t));
        }
        self.ell.eval(self.quotient(y, t))
    }

    /// `L(x, y, t)`; `x` is accepted for signature fidelity and ignored.
    pub fn eval_xyt(&self, _x: &[f64], y: f64, t: f64) -> Result<f64> {
        self.eval(y, t)
    }

    /// The side of `ℓ` that corresponds to `side` in `t`.
    fn ell_side(&self, side: Side) -> Side {
        let increasing = self.link.is_increasing() == (self.direction == Direction::Standard);
        if increasing {
            side
        } else {
            side.flipped()
        }
    }

    /// Chain-rule `∂L/∂t` without range checks.
    pub fn slope_t(&self, y: f64, t: f64, side: Side) -> f64 {
        let u = self.link.eval(t) + self.c;
        let du = self.link.deriv(t);
        let v = y + self.c;
        let s = self.ell_side(side);
        match self.direction {
            Direction::Standard => self.ell.slope(u / v, s) * du / v,
            Direction::Inverse => {
                let p = v / u;
                -self.ell.slope(p, s) * p * du / u
            }
        }
    }

    /// `∂L/∂t`. With [`Side::Central`] this errors at kinks of `ℓ`; the
    /// one-sided variants refer to the side in `t`.
    pub fn deriv_t(&self, y: f64, t: f64, side: Side) -> Result<f64> {
        self.check_y(y)?;
        if !t.is_finite() {
            return Err(Error::NonFinitePrediction(t));
        }
        let u = self.link.eval(t) + self.c;
        let du = self.link.deriv(t);
        let v = y + self.c;
        let s = self.ell_side(side);
        Ok(match self.direction {
            Direction::Standard => self.ell.deriv(u / v, s)? * du / v,
            Direction::Inverse => {
                let p = v / u;
                -self.ell.deriv(p, s)? * p * du / u
            }
        })
    }

    pub fn to_distance_form(&self) -> DistanceBridge {
        DistanceBridge {
            psi: DistanceFunction::from_ell(self.ell.clone(), self.direction),
            link: self.link,
            c: self.c,
        }
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}/{}/c={}", self.ell.label(), self.link.label(), self.c);
        if self.direction == Direction::Inverse {
            s.push_str("/inverse");
        }
        s
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SidedFn = Arc<dyn Fn(f64, Side) -> f64 + Send + Sync>;

/// A distance representing function `ψ: ℝ → [0, ∞)` with `ψ(0) = 0`.
#[derive(Clone)]
pub struct DistanceFunction {
    label: String,
    psi: ScalarFn,
    dpsi: SidedFn,
    kinks: Vec<f64>,
}

impl fmt::Debug for DistanceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceFunction")
            .field("label", &self.label)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl DistanceFunction {
    pub fn new(
        label: impl Into<String>,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64, Side) -> f64 + Send + Sync + 'static,
        kinks: Vec<f64>,
    ) -> Self {
        DistanceFunction {
            label: label.into(),
            psi: Arc::new(psi),
            dpsi: Arc::new(dpsi),
            kinks,
        }
    }

    /// `ψ(d) = d²`
    pub fn squared() -> Self {
        Self::new("squared", |d| d * d, |d, _| 2.0 * d, Vec::new())
    }

    /// `ψ(d) = |d|`
    pub fn absolute() -> Self {
        Self::new(
            "absolute",
            f64::abs,
            |d, side| {
                if d > 0.0 || (d == 0.0 && side != Side::Left) {
                    1.0
                } else {
                    -1.0
                }
            },
            vec![0.0],
        )
    }

    /// `ψ ≡ 0`
    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_, _| 0.0, Vec::new())
    }

    /// `ψ(d) = 2 log(1 + e^{-d}) + d - 2 log 2`
    pub fn logistic() -> Self {
        Self::new(
            "logistic",
            |d| {
                // log(1 + e^{-d}) = max(-d, 0) + log1p(e^{-|d|})
                2.0 * ((-d).max(0.0) + (-d.abs()).exp().ln_1p()) + d
                    - 2.0 * std::f64::consts::LN_2
            },
            |d, _| 1.0 - 2.0 * crate::num::sigmoid(-d),
            Vec::new(),
        )
    }

    /// `ψ = ℓ ∘ exp` (or `ℓ ∘ exp(-·)` for the inverse quotient).
    pub fn from_ell(ell: Ell, direction: Direction) -> Self {
        let sign = match direction {
            Direction::Standard => 1.0,
            Direction::Inverse => -1.0,
        };
        let kinks = ell.kinks().iter().map(|k| sign * k.ln()).collect();
        let e1 = ell.clone();
        let e2 = ell.clone();
        DistanceFunction {
            label: format!("{}∘exp", ell.label()),
            psi: Arc::new(move |d| e1.value((sign * d).exp())),
            dpsi: Arc::new(move |d, side| {
                let r = (sign * d).exp();
                let s = if sign > 0.0 { side } else { side.flipped() };
                sign * r * e2.slope(r, s)
            }),
            kinks,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, d: f64) -> f64 {
        (self.psi)(d)
    }

    pub fn slope(&self, d: f64, side: Side) -> f64 {
        (self.dpsi)(d, side)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
}

/// `L(x, y, t) = ψ(ỹ − t̃)` with `ỹ = −log(y + c)` and `t̃ = −log(u(t) + c)`.
#[derive(Debug, Clone)]
pub struct DistanceBridge {
    pub psi: DistanceFunction,
    pub link: LinkFunction,
    pub c: f64,
}

impl DistanceBridge {
    pub fn y_tilde(&self, y: f64) -> f64 {
        -(y + self.c).ln()
    }

    pub fn t_tilde(&self, t: f64) -> f64 {
        -(self.link.eval(t) + self.c).ln()
    }

    pub fn eval(&self, y: f64, t: f64) -> f64 {
        self.psi.value(self.y_tilde(y) - self.t_tilde(t))
    }
}

/// `ℓ = ψ ∘ log`.
#[derive(Debug, Clone)]
pub struct FromDistance {
    psi: DistanceFunction,
}

impl RepresentingFunction for FromDistance {
    fn label(&self) -> String {
        format!("{}∘log", self.psi.label())
    }

    fn value(&self, r: f64) -> f64 {
        self.psi.value(r.ln())
    }

    fn slope(&self, r: f64, side: Side) -> f64 {
        self.psi.slope(r.ln(), side) / r
    }

    fn kinks(&self) -> Vec<f64> {
        self.psi.kinks().iter().map(|d| d.exp()).collect()
    }
}

/// Builds `ℓ = ψ ∘ log`, checking `ψ(0) = 0` and `ψ ≥ 0` on `[-50, 50]`.
pub fn from_distance_form(psi: DistanceFunction) -> Result<Ell> {
    let at0 = psi.value(0.0);
    if !(at0.abs() <= 1e-12) {
        return Err(Error::Contract(format!(
            "psi(0) = {at0}, expected 0 within 1e-12"
        )));
    }
    for d in linspace(-50.0, 50.0, 1001) {
        let v = psi.value(d);
        if v < -1e-12 || v.is_nan() {
            return Err(Error::Contract(format!("psi({d}) = {v} is negative")));
        }
    }
    Ok(Arc::new(FromDistance { psi }))
}
