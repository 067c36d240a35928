//! Constructions of convex and bounded representing functions: symmetrizing
//! an auxiliary `ℓ̃`, building `ℓ̃` from an increasing generator `g`, and
//! flattening.

use std::fmt;
use std::sync::Arc;

use crate::catalog::{Ell, RepresentingFunction, Side};
use crate::error::{Error, Result};
use crate::num::logspace;
use crate::quadrature::integrate;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default working grid: 2001 log-uniform points on `[1e-3, 1e3]`.
pub fn working_grid() -> Vec<f64> {
    logspace(1e-3, 1e3, 2001)
}

/// Step used when `ℓ̃''` is not available analytically.
pub fn fd_step(r: f64) -> f64 {
    1e-5 * r.max(1.0)
}

/// An auxiliary function `ℓ̃: (0, ∞) → [0, ∞)` with its first two derivatives.
#[derive(Clone)]
pub struct AuxFunction {
    label: String,
    value: ScalarFn,
    deriv: ScalarFn,
    deriv2: Option<ScalarFn>,
    certificate: Option<ScalarFn>,
}

impl fmt::Debug for AuxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuxFunction")
            .field("label", &self.label)
            .field("analytic_deriv2", &self.deriv2.is_some())
            .finish()
    }
}

impl AuxFunction {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv2: Option<ScalarFn>,
    ) -> Self {
        AuxFunction {
            label: label.into(),
            value: Arc::new(value),
            deriv: Arc::new(deriv),
            deriv2,
            certificate: None,
        }
    }

    /// `ℓ̃(r) = r^α`
    pub fn power(alpha: f64) -> Self {
        Self::new(
            format!("pow:alpha={alpha}"),
            move |r| r.powf(alpha),
            move |r| alpha * r.powf(alpha - 1.0),
            Some(Arc::new(move |r| alpha * (alpha - 1.0) * r.powf(alpha - 2.0))),
        )
    }

    /// `ℓ̃(r) = log(1 + r)`
    pub fn log1p() -> Self {
        Self::new(
            "log1p",
            f64::ln_1p,
            |r| 1.0 / (1.0 + r),
            Some(Arc::new(|r| -1.0 / ((1.0 + r) * (1.0 + r)))),
        )
    }

    /// `ℓ̃(r) = log(√r + √(1 + r)) = asinh(√r)`
    pub fn asinh_sqrt() -> Self {
        Self::new(
            "asinh-sqrt",
            |r| r.sqrt().asinh(),
            |r| 0.5 / (r * (1.0 + r)).sqrt(),
            Some(Arc::new(|r| {
                -(1.0 + 2.0 * r) / (4.0 * (r * (1.0 + r)).powf(1.5))
            })),
        )
    }

    /// `ℓ̃ ≡ k`
    pub fn constant(k: f64) -> Self {
        Self::new(
            format!("const:{k}"),
            move |_| k,
            |_| 0.0,
            Some(Arc::new(|_| 0.0)),
        )
    }

    /// Looks up a named preset: `pow:alpha=<x>`, `log1p`, `asinh-sqrt`,
    /// `const`, or one of the generator presets `g-log1p`, `g-asinh-sqrt`.
    pub fn preset(name: &str) -> Result<Self> {
        let (head, args) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let unknown = || Error::param("aux", format!("unknown preset `{name}`"));
        match (head, args) {
            ("pow", Some(a)) => {
                let alpha = a
                    .strip_prefix("alpha=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| Error::param("aux", "pow needs alpha=<value >= 0>"))?;
                Ok(Self::power(alpha))
            }
            ("log1p", None) => Ok(Self::log1p()),
            ("asinh-sqrt", None) => Ok(Self::asinh_sqrt()),
            ("const", None) => Ok(Self::constant(1.0)),
            ("g-log1p", None) => build_from_generator(&GeneratorG::log1p()),
            ("g-asinh-sqrt", None) => build_from_generator(&GeneratorG::asinh_sqrt()),
            _ => Err(unknown()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        (self.deriv)(r)
    }

    pub fn has_analytic_deriv2(&self) -> bool {
        self.deriv2.is_some()
    }

    /// `ℓ̃''(r)`, by central differences of `ℓ̃'` when no closed form exists.
    pub fn deriv2(&self, r: f64) -> f64 {
        match &self.deriv2 {
            Some(d2) => d2(r),
            None => {
                let h = fd_step(r).min(0.5 * r);
                (self.deriv(r + h) - self.deriv(r - h)) / (2.0 * h)
            }
        }
    }

    /// `ℓ̃'(r) + r ℓ̃''(r)`.
    pub fn certificate(&self, r: f64) -> f64 {
        match &self.certificate {
            Some(c) => c(r),
            None => self.deriv(r) + r * self.deriv2(r),
        }
    }
}

/// Per-point values of `ℓ̃'(r) + r ℓ̃''(r)`.
pub fn convexity_certificate(f: &AuxFunction, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&r| f.certificate(r)).collect()
}

/// `ℓ(r) = ℓ̃(r) + ℓ̃(1/r) − 2ℓ̃(1)`.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    aux: AuxFunction,
    at_one: f64,
    certified: bool,
    min_certificate: (f64, f64),
}

impl Symmetrized {
    pub fn aux(&self) -> &AuxFunction {
        &self.aux
    }

    /// Certificate was `≥ −1e-10` on the whole working grid.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// `(r, value)` of the smallest certificate value on the working grid.
    pub fn min_certificate(&self) -> (f64, f64) {
        self.min_certificate
    }

    pub fn into_ell(self) -> Ell {
        Arc::new(self)
    }
}

impl RepresentingFunction for Symmetrized {
    fn label(&self) -> String {
        format!("sym({})", self.aux.label())
    }

    fn value(&self, r: f64) -> f64 {
        self.aux.value(r) + self.aux.value(1.0 / r) - 2.0 * self.at_one
    }

    fn slope(&self, r: f64, _side: Side) -> f64 {
        self.aux.deriv(r) - self.aux.deriv(1.0 / r) / (r * r)
    }
}

pub fn symmetrize(f: AuxFunction) -> Result<Symmetrized> {
    let grid = working_grid();
    let cert = convexity_certificate(&f, &grid);
    let (mut at, mut min) = (f64::NAN, f64::INFINITY);
    for (&r, &c) in grid.iter().zip(&cert) {
        if c < min || c.is_nan() {
            at = r;
            min = c;
        }
    }
    let certified = min >= -1e-10;
    let s = Symmetrized {
        at_one: f.value(1.0),
        aux: f,
        certified,
        min_certificate: (at, min),
    };
    for &r in &grid {
        let v = s.value(r);
        if !(v >= -1e-10 * (1.0 + s.aux.value(r).abs())) {
            return Err(Error::Contract(format!(
                "symmetrized value at r = {r} is {v} < 0"
            )));
        }
    }
    Ok(s)
}

/// An increasing generator `g` for `ℓ̃(r) = C + ∫_{r0}^r g(t)/t dt`.
#[derive(Clone)]
pub struct GeneratorG {
    pub label: String,
    pub g: ScalarFn,
    pub g_deriv: ScalarFn,
    pub r0: f64,
    pub c: f64,
    /// `|g| ≤ M` everywhere.
    pub bound_m: Option<f64>,
}

impl fmt::Debug for GeneratorG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorG")
            .field("label", &self.label)
            .field("r0", &self.r0)
            .field("c", &self.c)
            .field("bound_m", &self.bound_m)
            .finish()
    }
}

impl GeneratorG {
    pub fn new(
        label: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r0: f64,
        c: f64,
        bound_m: Option<f64>,
    ) -> Self {
        GeneratorG {
            label: label.into(),
            g: Arc::new(g),
            g_deriv: Arc::new(g_deriv),
            r0,
            c,
            bound_m,
        }
    }

    /// `g(t) = t/(t+1)`, giving `ℓ̃ = log(1 + r)`; `0 ≤ g ≤ 1`.
    pub fn log1p() -> Self {
        Self::new(
            "g-log1p",
            |t| t / (t + 1.0),
            |t| 1.0 / ((t + 1.0) * (t + 1.0)),
            0.0,
            0.0,
            Some(1.0),
        )
    }

    /// `g(t) = √t / (2√(1+t))`, giving `ℓ̃ = log(√r + √(1+r))`; `0 ≤ g ≤ 1/2`.
    pub fn asinh_sqrt() -> Self {
        Self::new(
            "g-asinh-sqrt",
            |t| 0.5 * (t / (1.0 + t)).sqrt(),
            |t| 0.25 / (t.sqrt() * (1.0 + t).powf(1.5)),
            0.0,
            0.0,
            Some(0.5),
        )
    }

    /// `g ≡ 0`.
    pub fn zero(c: f64) -> Self {
        Self::new("g-zero", |_| 0.0, |_| 0.0, 1.0, c, Some(0.0))
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    /// Checks `g` is non-decreasing on the working grid.
    pub fn check_monotone(&self) -> Result<()> {
        let grid = working_grid();
        let mut prev = (grid[0], self.g(grid[0]));
        for &r in &grid[1..] {
            let v = self.g(r);
            if !(v >= prev.1 - 1e-14 * (1.0 + prev.1.abs())) {
                return Err(Error::NonMonotoneGenerator {
                    at: r,
                    value: v,
                    prev_at: prev.0,
                    prev: prev.1,
                });
            }
            prev = (r, v);
        }
        Ok(())
    }

    /// Checks `|g| ≤ M` on the working grid, returning `M`.
    pub fn check_bound(&self) -> Result<f64> {
        let m = self
            .bound_m
            .ok_or_else(|| Error::Hypothesis(format!("{}: no bound M given", self.label)))?;
        for r in working_grid() {
            let v = self.g(r);
            if !(v.abs() <= m * (1.0 + 1e-12)) {
                return Err(Error::Hypothesis(format!(
                    "{}: |g({r})| = {} exceeds M = {m}",
                    self.label,
                    v.abs()
                )));
            }
        }
        Ok(m)
    }
}

const QUAD_TOL: f64 = 1e-10;

/// `∫_0^{s} g(e^σ) dσ = ∫_1^{e^s} g(t)/t dt`.
fn log_integral(g: &ScalarFn, s: f64) -> Result<f64> {
    Ok(integrate(|x| g(x.exp()), 0.0, s, QUAD_TOL)?.value)
}

/// `∫_{r0}^{1} g(t)/t dt`, with `(−∞, 0]` mapped onto `[0, 1)` when `r0 = 0`.
fn integral_from_r0(gen: &GeneratorG) -> Result<f64> {
    let g = &gen.g;
    if gen.r0 > 0.0 {
        return log_integral(g, gen.r0.ln()).map(|v| -v);
    }
    let tail = g((-700.0f64).exp());
    if !(tail.abs() <= 1e-12) {
        return Err(Error::DivergentIntegral {
            r0: gen.r0,
            detail: format!("g(t) does not vanish as t -> 0 (g(e^-700) = {tail:e})"),
        });
    }
    // σ = −x/(1−x), dσ = dx/(1−x)²
    let q = integrate(
        |x| {
            let w = 1.0 - x;
            g((-x / w).exp()) / (w * w)
        },
        0.0,
        1.0,
        QUAD_TOL,
    )
    .map_err(|e| match e {
        Error::DivergentIntegral { detail, .. } => Error::DivergentIntegral { r0: 0.0, detail },
        other => other,
    })?;
    Ok(q.value)
}

/// `ℓ̃(r) = C + ∫_{r0}^r g(t)/t dt` by adaptive quadrature in `s = log t`.
pub fn build_from_generator(gen: &GeneratorG) -> Result<AuxFunction> {
    if !(gen.r0 >= 0.0 && gen.r0.is_finite() && gen.c.is_finite()) {
        return Err(Error::param(&gen.label, "r0 >= 0 and C finite"));
    }
    gen.check_monotone()?;
    let base = gen.c + integral_from_r0(gen)?;

    let g = gen.g.clone();
    let value = move |r: f64| {
        // Panels converge for every r on the working grid once the r0 part
        // has converged; NaN marks a failure further out.
        base + log_integral(&g, r.ln()).unwrap_or(f64::NAN)
    };
    let (g1, g2, g3) = (gen.g.clone(), gen.g.clone(), gen.g_deriv.clone());
    let g4 = gen.g_deriv.clone();
    let aux = AuxFunction {
        label: gen.label.clone(),
        value: Arc::new(value),
        deriv: Arc::new(move |r| g1(r) / r),
        deriv2: Some(Arc::new(move |r| (g3(r) * r - g2(r)) / (r * r))),
        certificate: Some(Arc::new(move |r| g4(r))),
    };
    for r in logspace(1e-3, 1e3, 41) {
        let v = aux.value(r);
        if !(v.is_finite() && v >= -1e-10) {
            return Err(Error::Contract(format!(
                "{}: built function is {v} at r = {r}",
                gen.label
            )));
        }
    }
    Ok(aux)
}

/// `ℓ̂ = (1/λ) · bℓ / (1 + bℓ)`, bounded by `1/λ`.
#[derive(Debug, Clone)]
pub struct Flattened {
    inner: Ell,
    lambda: f64,
    b: f64,
}

pub fn flatten(f: Ell, lambda: f64, b: f64) -> Result<Flattened> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("flatten", "lambda > 0"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::param("flatten", "b > 0"));
    }
    Ok(Flattened {
        inner: f,
        lambda,
        b,
    })
}

impl Flattened {
    pub fn into_ell(self) -> Ell {
        Arc::new(self)
    }
}

impl RepresentingFunction for Flattened {
    fn label(&self) -> String {
        format!(
            "flat({};lambda={},b={})",
            self.inner.label(),
            self.lambda,
            self.b
        )
    }

    fn value(&self, r: f64) -> f64 {
        let v = self.b * self.inner.value(r);
        if v == f64::INFINITY {
            1.0 / self.lambda
        } else {
            v / (1.0 + v) / self.lambda
        }
    }

    fn slope(&self, r: f64, side: Side) -> f64 {
        let v = self.b * self.inner.value(r);
        if v == f64::INFINITY {
            return 0.0;
        }
        let d = 1.0 + v;
        self.b * self.inner.slope(r, side) / (d * d) / self.lambda
    }

    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}
