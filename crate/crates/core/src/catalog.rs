//! Representing functions `ℓ: (0, ∞) → [0, ∞)` with `ℓ(1) = 0`.
//!
//! Every catalog entry carries a closed-form value, an analytic first
//! derivative (one-sided at kinks), the list of points where its formula
//! changes, and the property flags it is known to have.
//!
//! Piecewise entries use the boundary convention `r ≤ α⁻¹ | α⁻¹ < r < α | α ≤ r`
//! (and its seven-piece analogue for the three-parameter Hampel entry).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::logcosh;

/// Which one-sided derivative to return at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Central,
}

impl Side {
    /// The side seen from the other end of a decreasing reparametrisation.
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Central => Side::Central,
        }
    }
}

/// The six properties a representing function (or assembled loss) may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredProperties {
    pub ratio_symmetric: bool,
    pub convex: bool,
    pub continuous: bool,
    pub locally_lipschitz: bool,
    pub globally_lipschitz: bool,
    pub differentiable: bool,
}

impl DeclaredProperties {
    const fn row(flags: [bool; 6]) -> Self {
        DeclaredProperties {
            ratio_symmetric: flags[0],
            convex: flags[1],
            continuous: flags[2],
            locally_lipschitz: flags[3],
            globally_lipschitz: flags[4],
            differentiable: flags[5],
        }
    }

    pub fn as_array(&self) -> [bool; 6] {
        [
            self.ratio_symmetric,
            self.convex,
            self.continuous,
            self.locally_lipschitz,
            self.globally_lipschitz,
            self.differentiable,
        ]
    }
}

/// A scalar function of the ratio between prediction and observation.
///
/// Implementors provide the unchecked maps; [`eval`](Self::eval) and
/// [`deriv`](Self::deriv) add the domain and kink checks.
pub trait RepresentingFunction: Send + Sync + fmt::Debug {
    /// Human-readable identifier, including parameters where relevant.
    fn label(&self) -> String;

    /// `ℓ(r)` for `r > 0`; callers guarantee the domain.
    fn value(&self, r: f64) -> f64;

    /// One-sided derivative of `ℓ` at `r`. For [`Side::Central`] at a
    /// smooth point either piece may be used.
    fn slope(&self, r: f64, side: Side) -> f64;

    /// Points where `ℓ` is not differentiable.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Every point where the defining formula changes (kinks included).
    fn breakpoints(&self) -> Vec<f64> {
        self.kinks()
    }

    /// Known properties, when they are known in advance.
    fn declared(&self) -> Option<DeclaredProperties> {
        None
    }

    /// Downcast hook for catalog entries.
    fn catalog(&self) -> Option<&CatalogFunction> {
        None
    }

    fn eval(&self, r: f64) -> Result<f64> {
        check_domain(r)?;
        Ok(self.value(r))
    }

    fn deriv(&self, r: f64, side: Side) -> Result<f64> {
        check_domain(r)?;
        if side == Side::Central && self.kinks().iter().any(|&k| is_at(r, k)) {
            return Err(Error::Kink(r));
        }
        Ok(self.slope(r, side))
    }
}

/// Shared handle to any representing function.
pub type Ell = Arc<dyn RepresentingFunction>;

fn check_domain(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(r))
    }
}

pub(crate) fn is_at(r: f64, k: f64) -> bool {
    (r - k).abs() <= 1e-12 * k.abs().max(1e-300)
}

/// True when the derivative at `r` must be taken from the piece left of `bp`.
#[inline]
fn left_of(r: f64, bp: f64, side: Side) -> bool {
    match side {
        Side::Left => r <= bp,
        Side::Right | Side::Central => r < bp,
    }
}

macro_rules! loss_ids {
    ($($variant:ident => $name:literal, [$($p:literal),*], $flags:expr;)*) => {
        /// Identifier of a catalog entry; the string form is stable.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum LossId { $($variant),* }

        impl LossId {
            pub const ALL: &'static [LossId] = &[$(LossId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(LossId::$variant => $name),* }
            }

            /// Names of the parameters this entry reads from [`LossParams`].
            pub fn param_names(self) -> &'static [&'static str] {
                match self { $(LossId::$variant => &[$($p),*]),* }
            }

            /// Property flags of the published property table for this entry.
            pub fn declared(self) -> DeclaredProperties {
                match self { $(LossId::$variant => DeclaredProperties::row($flags)),* }
            }
        }
    };
}

const T: bool = true;
const F: bool = false;

// flags: ratio-symmetric, convex, continuous, locally Lipschitz, globally Lipschitz, differentiable
loss_ids! {
    LogRatioSym => "log-ratio-sym", [], [T, F, T, T, F, T];
    SqrtLog => "sqrt-log", [], [T, F, T, T, F, T];
    SquaredLog => "squared-log", [], [T, F, T, T, F, T];
    AbsLog => "abs-log", [], [T, F, T, T, F, F];
    HuberLog => "huber-log", ["alpha"], [T, F, T, T, F, T];
    LogCoshRel => "log-cosh-rel", [], [F, T, T, T, T, T];
    CoshLog => "cosh-log", [], [T, T, T, T, F, T];
    LogCoshLog => "log-cosh-log", [], [T, F, T, T, F, T];
    MaxLoss => "max-loss", [], [T, T, T, T, F, F];
    LogPinball => "log-pinball", ["tau"], [F, F, T, T, F, F];
    AbsRel => "abs-rel", [], [F, T, T, T, T, F];
    SquaredRel => "squared-rel", [], [F, T, T, T, F, T];
    HuberRel => "huber-rel", ["alpha"], [F, T, T, T, T, T];
    InvAbsRel => "inv-abs-rel", [], [F, F, T, T, F, F];
    InvSqRel => "inv-sq-rel", [], [F, F, T, T, F, T];
    HuberInv => "huber-inv", ["alpha"], [F, F, T, T, F, T];
    Lare => "lare", [], [T, F, T, T, F, F];
    SmoothLare => "smooth-lare", [], [T, T, T, T, F, T];
    HuberLare => "huber-lare", ["alpha"], [T, F, T, T, F, T];
    Lpre => "lpre", [], [T, T, T, T, F, T];
    GreSq => "gre-sq", [], [T, T, T, T, F, T];
    GreNorm => "gre-norm", [], [T, F, T, T, F, F];
    GreSqrt => "gre-sqrt", [], [T, F, T, F, F, F];
    GreExp => "gre-exp", [], [F, F, T, T, F, F];
    InsensMax => "insens-max", ["epsilon"], [T, T, T, T, F, F];
    InsensLpre => "insens-lpre", ["epsilon"], [T, T, T, T, F, F];
    RobustMax => "robust-max", ["alpha", "epsilon"], [T, F, T, T, T, F];
    RobustLpre => "robust-lpre", ["alpha", "epsilon"], [T, F, T, T, T, F];
    FlatLcl => "flat-lcl", ["lambda", "b"], [T, F, T, T, F, T];
    HampelLare3 => "hampel-lare-3", ["alpha", "beta", "gamma"], [T, F, T, T, T, T];
    HampelLare2 => "hampel-lare-2", ["alpha", "beta"], [T, F, T, T, T, T];
    WeightedMax => "weighted-max", ["tau"], [F, T, T, T, F, F];
    WeightedLpre => "weighted-lpre", ["tau"], [F, T, T, T, F, T];
    WeightedSmoothLare => "weighted-smooth-lare", ["tau"], [F, T, T, T, F, T];
}

impl LossId {
    /// 1-based position in the catalog.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn is_parametric(self) -> bool {
        !self.param_names().is_empty()
    }
}

impl fmt::Display for LossId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLossId(s.to_string()))
    }
}

/// Parameters of the parametric catalog entries. Each entry reads only the
/// fields listed by [`LossId::param_names`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub b: f64,
}

impl LossParams {
    /// Default parameter draw for `id` (α=3, β=5, γ=8, ε=0.2, λ=b=1; τ=0.1
    /// for the pinball entry and τ=2 for the weighted entries).
    pub fn defaults(id: LossId) -> Self {
        let tau = match id {
            LossId::LogPinball => 0.1,
            LossId::WeightedMax | LossId::WeightedLpre | LossId::WeightedSmoothLare => 2.0,
            _ => 0.5,
        };
        LossParams {
            alpha: 3.0,
            beta: 5.0,
            gamma: 8.0,
            tau,
            epsilon: 0.2,
            lambda: 1.0,
            b: 1.0,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "tau" => self.tau,
            "epsilon" => self.epsilon,
            "lambda" => self.lambda,
            "b" => self.b,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "tau" => &mut self.tau,
            "epsilon" => &mut self.epsilon,
            "lambda" => &mut self.lambda,
            "b" => &mut self.b,
            _ => return false,
        };
        *slot = value;
        true
    }

    fn validate(&self, id: LossId) -> Result<()> {
        let name = id.as_str();
        for p in id.param_names() {
            let v = self.get(p).unwrap_or(f64::NAN);
            if !v.is_finite() {
                return Err(Error::param(name, format!("{p} must be finite")));
            }
        }
        let ensure = |ok: bool, rule: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::param(name, rule))
            }
        };
        use LossId::*;
        match id {
            HuberLog | HuberRel | HuberInv | HuberLare => ensure(self.alpha > 1.0, "alpha > 1"),
            LogPinball => ensure(self.tau > 0.0 && self.tau < 1.0, "tau in (0, 1)"),
            WeightedMax | WeightedLpre | WeightedSmoothLare => ensure(self.tau > 0.0, "tau > 0"),
            InsensMax | InsensLpre => ensure(
                self.epsilon > 0.0 && self.epsilon < 1.0,
                "epsilon in (0, 1)",
            ),
            RobustMax | RobustLpre => {
                ensure(self.epsilon >= 0.0, "epsilon >= 0")?;
                ensure(self.alpha > 1.0 + self.epsilon, "alpha > 1 + epsilon")
            }
            FlatLcl => {
                ensure(self.lambda > 0.0, "lambda > 0")?;
                ensure(self.b > 0.0, "b > 0")
            }
            HampelLare3 => ensure(
                1.0 < self.alpha && self.alpha < self.beta && self.beta < self.gamma,
                "1 < alpha < beta < gamma",
            ),
            HampelLare2 => ensure(
                1.0 < self.alpha && self.alpha < self.beta,
                "1 < alpha < beta",
            ),
            _ => Ok(()),
        }
    }
}

/// A validated catalog entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogFunction {
    id: LossId,
    params: LossParams,
}

impl CatalogFunction {
    /// Validates parameters eagerly; evaluation never re-checks them.
    pub fn new(id: LossId, params: LossParams) -> Result<Self> {
        params.validate(id)?;
        Ok(CatalogFunction { id, params })
    }

    pub fn with_defaults(id: LossId) -> Self {
        Self::new(id, LossParams::defaults(id)).expect("default parameters are valid")
    }

    pub fn id(&self) -> LossId {
        self.id
    }

    pub fn params(&self) -> &LossParams {
        &self.params
    }

    pub fn into_ell(self) -> Ell {
        Arc::new(self)
    }

    /// Table flag for ratio-symmetry; the numeric check lives in the verifier.
    pub fn is_ratio_symmetric_analytic(&self) -> bool {
        self.id.declared().ratio_symmetric
    }

    /// Closed-form global Lipschitz constant of `ℓ` on `(0, ∞)`, for the
    /// entries that have one.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        let a = self.params.alpha;
        use LossId::*;
        match self.id {
            AbsRel | LogCoshRel => Some(1.0),
            HuberRel => Some(2.0 * (a - 1.0)),
            RobustMax => Some(a * a),
            RobustLpre => Some(a * a - 1.0),
            _ => None,
        }
    }

    fn insens_lpre_roots(eps: f64) -> (f64, f64) {
        let m = 2.0 + eps;
        let disc = (eps * (4.0 + eps)).sqrt();
        let hi = (m + disc) / 2.0;
        (1.0 / hi, hi)
    }

    fn hampel3_consts(&self) -> (f64, f64, f64, f64, f64) {
        let LossParams {
            alpha, beta, gamma, ..
        } = self.params;
        let sa = alpha - 1.0 / alpha;
        let sb = beta - 1.0 / beta;
        let sg = gamma - 1.0 / gamma;
        let k = (alpha * alpha - 1.0) * beta * gamma
            / (alpha * (beta * gamma + 1.0) * (beta - gamma));
        (k, sa, sb, sg, k * (sb * sb - sg * sg) - sa * sa)
    }

    fn hampel2_consts(&self) -> (f64, f64, f64) {
        let LossParams { alpha, beta, .. } = self.params;
        let sa = alpha - 1.0 / alpha;
        let sb = beta - 1.0 / beta;
        let k = (alpha * alpha - 1.0) / ((alpha - beta) * (alpha * beta + 1.0));
        (k, sa, k * (beta * beta - 1.0) * (sa - sb))
    }
}

fn lpre(r: f64) -> f64 {
    let d = r - 1.0;
    d * d / r
}

fn max_rel(r: f64) -> f64 {
    if r >= 1.0 {
        r - 1.0
    } else {
        1.0 / r - 1.0
    }
}

impl RepresentingFunction for CatalogFunction {
    fn label(&self) -> String {
        let mut s = self.id.as_str().to_string();
        let names = self.id.param_names();
        if !names.is_empty() {
            s.push(':');
            let parts: Vec<String> = names
                .iter()
                .map(|n| format!("{n}={}", self.params.get(n).unwrap_or(f64::NAN)))
                .collect();
            s.push_str(&parts.join(","));
        }
        s
    }

    fn value(&self, r: f64) -> f64 {
        let p = &self.params;
        let (alpha, tau, eps) = (p.alpha, p.tau, p.epsilon);
        let ia = 1.0 / alpha;
        use LossId::*;
        match self.id {
            LogRatioSym => 2.0 * r.ln_1p() - r.ln() - 4f64.ln(),
            SqrtLog => {
                let s = r.sqrt();
                s.asinh() + (1.0 / s).asinh() - 2.0 * 1f64.asinh()
            }
            SquaredLog => r.ln().powi(2),
            AbsLog => r.ln().abs(),
            HuberLog => {
                let la = alpha.ln();
                let lr = r.ln();
                if r <= ia {
                    -la * (2.0 * lr + la)
                } else if r < alpha {
                    lr * lr
                } else {
                    la * (2.0 * lr - la)
                }
            }
            LogCoshRel => logcosh(r - 1.0),
            CoshLog => (r - 1.0).powi(2) / (2.0 * r),
            LogCoshLog => logcosh(r.ln()),
            MaxLoss => max_rel(r),
            LogPinball => {
                let lr = r.ln();
                (tau * lr).max(-(1.0 - tau) * lr)
            }
            AbsRel => (r - 1.0).abs(),
            SquaredRel => (r - 1.0).powi(2),
            HuberRel => {
                if r <= ia {
                    2.0 * (ia - 1.0) * (r - 1.0) - (1.0 - ia).powi(2)
                } else if r < alpha {
                    (r - 1.0).powi(2)
                } else {
                    2.0 * (alpha - 1.0) * (r - 1.0) - (alpha - 1.0).powi(2)
                }
            }
            InvAbsRel => (1.0 / r - 1.0).abs(),
            InvSqRel => (1.0 / r - 1.0).powi(2),
            HuberInv => {
                let v = 1.0 / r - 1.0;
                if r <= ia {
                    2.0 * (alpha - 1.0) * v - (alpha - 1.0).powi(2)
                } else if r < alpha {
                    v * v
                } else {
                    2.0 * (ia - 1.0) * v - (1.0 - ia).powi(2)
                }
            }
            Lare => (r - 1.0 / r).abs(),
            SmoothLare => (r - 1.0 / r).powi(2),
            HuberLare => {
                let sa = alpha - ia;
                let k = 2.0 * (alpha * alpha - 1.0) / alpha;
                let s = r - 1.0 / r;
                if r <= ia {
                    -k * s - sa * sa
                } else if r < alpha {
                    s * s
                } else {
                    k * s - sa * sa
                }
            }
            Lpre => lpre(r),
            GreSq => (1.0 - r).powi(2) + (1.0 / r - 1.0).powi(2),
            GreNorm => (1.0 - r).hypot(1.0 / r - 1.0),
            GreSqrt => ((1.0 - r).abs() + (1.0 / r - 1.0).abs()).sqrt(),
            GreExp => (1.0 - r).abs() + (1.0 / r - 1.0).abs().exp_m1(),
            InsensMax => (max_rel(r) - eps).max(0.0),
            InsensLpre => (lpre(r) - eps).max(0.0),
            RobustMax => {
                if r > ia && r < alpha {
                    (max_rel(r) - eps).max(0.0)
                } else {
                    alpha - 1.0 - eps
                }
            }
            RobustLpre => {
                if r > ia && r < alpha {
                    (lpre(r) - eps).max(0.0)
                } else {
                    ia + alpha - 2.0 - eps
                }
            }
            FlatLcl => {
                let v = p.b * logcosh(r.ln());
                v / (1.0 + v) / p.lambda
            }
            HampelLare3 => {
                let (k, sa, sb, sg, outer) = self.hampel3_consts();
                let (beta, gamma) = (p.beta, p.gamma);
                let s = r - 1.0 / r;
                let lin = 2.0 * (alpha * alpha - 1.0) / alpha;
                if r <= 1.0 / gamma {
                    outer
                } else if r <= 1.0 / beta {
                    k * ((-s - sg).powi(2) + sb * sb - sg * sg) - sa * sa
                } else if r <= ia {
                    lin * (-s) - sa * sa
                } else if r < alpha {
                    s * s
                } else if r < beta {
                    lin * s - sa * sa
                } else if r < gamma {
                    k * ((s - sg).powi(2) + sb * sb - sg * sg) - sa * sa
                } else {
                    outer
                }
            }
            HampelLare2 => {
                let (k, _sa, outer) = self.hampel2_consts();
                let beta = p.beta;
                let s = r - 1.0 / r;
                let c0 = (beta * beta - 1.0) * (alpha * alpha - 1.0) / alpha;
                let c1 = 2.0 * (beta * beta - 1.0);
                if r <= 1.0 / beta {
                    outer
                } else if r <= ia {
                    k * (beta * s * s + c1 * s + c0)
                } else if r < alpha {
                    s * s
                } else if r < beta {
                    k * (beta * s * s - c1 * s + c0)
                } else {
                    outer
                }
            }
            WeightedMax => {
                if r < 1.0 {
                    max_rel(r) / tau
                } else {
                    tau * max_rel(r)
                }
            }
            WeightedLpre => {
                if r < 1.0 {
                    lpre(r) / tau
                } else {
                    tau * lpre(r)
                }
            }
            WeightedSmoothLare => {
                let v = (r - 1.0 / r).powi(2);
                if r < 1.0 {
                    v / tau
                } else {
                    tau * v
                }
            }
        }
    }

    fn slope(&self, r: f64, side: Side) -> f64 {
        let p = &self.params;
        let (alpha, tau, eps) = (p.alpha, p.tau, p.epsilon);
        let ia = 1.0 / alpha;
        let r2 = r * r;
        // d/dr (r - 1/r)
        let ds = 1.0 + 1.0 / r2;
        let below_one = left_of(r, 1.0, side);
        use LossId::*;
        match self.id {
            LogRatioSym => 2.0 / (1.0 + r) - 1.0 / r,
            SqrtLog => (r.sqrt() - 1.0) / (2.0 * r * (1.0 + r).sqrt()),
            SquaredLog => 2.0 * r.ln() / r,
            AbsLog => {
                if below_one {
                    -1.0 / r
                } else {
                    1.0 / r
                }
            }
            HuberLog => {
                let la = alpha.ln();
                if left_of(r, ia, side) {
                    -2.0 * la / r
                } else if left_of(r, alpha, side) {
                    2.0 * r.ln() / r
                } else {
                    2.0 * la / r
                }
            }
            LogCoshRel => (r - 1.0).tanh(),
            CoshLog => 0.5 * (1.0 - 1.0 / r2),
            LogCoshLog => r.ln().tanh() / r,
            MaxLoss => {
                if below_one {
                    -1.0 / r2
                } else {
                    1.0
                }
            }
            LogPinball => {
                if below_one {
                    -(1.0 - tau) / r
                } else {
                    tau / r
                }
            }
            AbsRel => {
                if below_one {
                    -1.0
                } else {
                    1.0
                }
            }
            SquaredRel => 2.0 * (r - 1.0),
            HuberRel => {
                if left_of(r, ia, side) {
                    2.0 * (ia - 1.0)
                } else if left_of(r, alpha, side) {
                    2.0 * (r - 1.0)
                } else {
                    2.0 * (alpha - 1.0)
                }
            }
            InvAbsRel => {
                if below_one {
                    -1.0 / r2
                } else {
                    1.0 / r2
                }
            }
            InvSqRel => -2.0 * (1.0 / r - 1.0) / r2,
            HuberInv => {
                if left_of(r, ia, side) {
                    -2.0 * (alpha - 1.0) / r2
                } else if left_of(r, alpha, side) {
                    -2.0 * (1.0 / r - 1.0) / r2
                } else {
                    -2.0 * (ia - 1.0) / r2
                }
            }
            Lare => {
                if below_one {
                    -ds
                } else {
                    ds
                }
            }
            SmoothLare => 2.0 * (r - 1.0 / r) * ds,
            HuberLare => {
                let k = 2.0 * (alpha * alpha - 1.0) / alpha;
                if left_of(r, ia, side) {
                    -k * ds
                } else if left_of(r, alpha, side) {
                    2.0 * (r - 1.0 / r) * ds
                } else {
                    k * ds
                }
            }
            Lpre => 1.0 - 1.0 / r2,
            GreSq => 2.0 * (r - 1.0) - 2.0 * (1.0 / r - 1.0) / r2,
            GreNorm => {
                if r == 1.0 {
                    if side == Side::Left {
                        -std::f64::consts::SQRT_2
                    } else {
                        std::f64::consts::SQRT_2
                    }
                } else {
                    ((r - 1.0) - (1.0 / r - 1.0) / r2) / self.value(r)
                }
            }
            GreSqrt => {
                let sign = if below_one { -1.0 } else { 1.0 };
                if r == 1.0 {
                    sign * f64::INFINITY
                } else {
                    sign * ds / (2.0 * self.value(r))
                }
            }
            GreExp => {
                if below_one {
                    -1.0 - (1.0 / r - 1.0).exp() / r2
                } else {
                    1.0 + (1.0 - 1.0 / r).exp() / r2
                }
            }
            InsensMax => {
                let (lo, hi) = (1.0 / (1.0 + eps), 1.0 + eps);
                if left_of(r, lo, side) {
                    -1.0 / r2
                } else if left_of(r, hi, side) {
                    0.0
                } else {
                    1.0
                }
            }
            InsensLpre => {
                let (lo, hi) = Self::insens_lpre_roots(eps);
                if left_of(r, lo, side) || !left_of(r, hi, side) {
                    1.0 - 1.0 / r2
                } else {
                    0.0
                }
            }
            RobustMax => {
                let (lo, hi) = (1.0 / (1.0 + eps), 1.0 + eps);
                if left_of(r, ia, side) || !left_of(r, alpha, side) {
                    0.0
                } else if left_of(r, lo, side) {
                    -1.0 / r2
                } else if left_of(r, hi, side) {
                    if eps == 0.0 {
                        // lo == hi == 1: already handled by the branches above
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    1.0
                }
            }
            RobustLpre => {
                let (lo, hi) = Self::insens_lpre_roots(eps);
                if left_of(r, ia, side) || !left_of(r, alpha, side) {
                    0.0
                } else if left_of(r, lo, side) || !left_of(r, hi, side) {
                    1.0 - 1.0 / r2
                } else {
                    0.0
                }
            }
            FlatLcl => {
                let v = 1.0 + p.b * logcosh(r.ln());
                p.b * r.ln().tanh() / r / (v * v) / p.lambda
            }
            HampelLare3 => {
                let (k, _sa, _sb, sg, _outer) = self.hampel3_consts();
                let (beta, gamma) = (p.beta, p.gamma);
                let s = r - 1.0 / r;
                let lin = 2.0 * (alpha * alpha - 1.0) / alpha;
                if left_of(r, 1.0 / gamma, side) {
                    0.0
                } else if left_of(r, 1.0 / beta, side) {
                    2.0 * k * (s + sg) * ds
                } else if left_of(r, ia, side) {
                    -lin * ds
                } else if left_of(r, alpha, side) {
                    2.0 * s * ds
                } else if left_of(r, beta, side) {
                    lin * ds
                } else if left_of(r, gamma, side) {
                    2.0 * k * (s - sg) * ds
                } else {
                    0.0
                }
            }
            HampelLare2 => {
                let (k, _sa, _outer) = self.hampel2_consts();
                let beta = p.beta;
                let s = r - 1.0 / r;
                let c1 = 2.0 * (beta * beta - 1.0);
                if left_of(r, 1.0 / beta, side) {
                    0.0
                } else if left_of(r, ia, side) {
                    k * (2.0 * beta * s + c1) * ds
                } else if left_of(r, alpha, side) {
                    2.0 * s * ds
                } else if left_of(r, beta, side) {
                    k * (2.0 * beta * s - c1) * ds
                } else {
                    0.0
                }
            }
            WeightedMax => {
                if below_one {
                    -1.0 / (tau * r2)
                } else {
                    tau
                }
            }
            WeightedLpre => {
                let d = 1.0 - 1.0 / r2;
                if below_one {
                    d / tau
                } else {
                    tau * d
                }
            }
            WeightedSmoothLare => {
                let d = 2.0 * (r - 1.0 / r) * ds;
                if below_one {
                    d / tau
                } else {
                    tau * d
                }
            }
        }
    }

    fn kinks(&self) -> Vec<f64> {
        let p = &self.params;
        let (alpha, eps) = (p.alpha, p.epsilon);
        use LossId::*;
        match self.id {
            AbsLog | MaxLoss | LogPinball | AbsRel | InvAbsRel | Lare | GreNorm | GreSqrt
            | GreExp | WeightedMax => vec![1.0],
            InsensMax => vec![1.0 / (1.0 + eps), 1.0 + eps],
            InsensLpre => {
                let (lo, hi) = Self::insens_lpre_roots(eps);
                vec![lo, hi]
            }
            RobustMax => {
                let mut k = vec![1.0 / alpha, alpha];
                if eps == 0.0 {
                    k.push(1.0);
                } else {
                    k.extend([1.0 / (1.0 + eps), 1.0 + eps]);
                }
                k.sort_by(f64::total_cmp);
                k
            }
            RobustLpre => {
                let mut k = vec![1.0 / alpha, alpha];
                if eps == 0.0 {
                    k.push(1.0);
                } else {
                    let (lo, hi) = Self::insens_lpre_roots(eps);
                    k.extend([lo, hi]);
                }
                k.sort_by(f64::total_cmp);
                k
            }
            _ => Vec::new(),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let p = &self.params;
        let alpha = p.alpha;
        use LossId::*;
        let mut b = match self.id {
            HuberLog | HuberRel | HuberInv | HuberLare => vec![1.0 / alpha, alpha],
            HampelLare3 => vec![
                1.0 / p.gamma,
                1.0 / p.beta,
                1.0 / alpha,
                alpha,
                p.beta,
                p.gamma,
            ],
            HampelLare2 => vec![1.0 / p.beta, 1.0 / alpha, alpha, p.beta],
            WeightedLpre | WeightedSmoothLare => vec![1.0],
            _ => Vec::new(),
        };
        b.extend(self.kinks());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn declared(&self) -> Option<DeclaredProperties> {
        Some(self.id.declared())
    }

    fn catalog(&self) -> Option<&CatalogFunction> {
        Some(self)
    }
}

/// The constant zero function, the only loss that is both ratio- and
/// distance-based.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroLoss;

impl RepresentingFunction for ZeroLoss {
    fn label(&self) -> String {
        "zero".into()
    }
    fn value(&self, _r: f64) -> f64 {
        0.0
    }
    fn slope(&self, _r: f64, _side: Side) -> f64 {
        0.0
    }
    fn declared(&self) -> Option<DeclaredProperties> {
        Some(DeclaredProperties::row([T; 6]))
    }
}
