//! Individual property checks on fixed probe grids.

use crate::assembly::{Direction, RatioLoss};
use crate::catalog::RepresentingFunction;
use crate::link::LinkFunction;
use crate::num::{linspace, logspace};

use super::{Check, Property, Verdict};

/// What is being checked: `ℓ` as a function of `r`, or `L` as a function
/// of `t` over a set of outputs `y`.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Ell(&'a dyn RepresentingFunction),
    Loss(&'a RatioLoss),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMode {
    Local,
    Global,
}

const Y_DEFAULT: [f64; 5] = [0.1, 0.5, 1.0, 3.0, 7.0];

/// `{0.1, 0.5, 1, 3, 7} ∩ (a, b)`, padded with interior points of a
/// bounded interval when fewer than three survive.
pub fn default_y_set(link: &LinkFunction) -> Vec<f64> {
    let mut ys: Vec<f64> = Y_DEFAULT.iter().copied().filter(|&y| link.contains(y)).collect();
    if ys.len() < 3 && link.b().is_finite() {
        let (a, b) = (link.a(), link.b());
        ys.extend([0.1, 0.5, 0.9].map(|s| a + (b - a) * s));
        ys.retain(|&y| link.contains(y));
        ys.sort_by(f64::total_cmp);
        ys.dedup_by(|p, q| (*p - *q).abs() <= 1e-12 * q.abs().max(1.0));
    }
    ys
}

/// Outputs for the widening-`y` windows: log-spaced towards every open end
/// of `(a, b)` down to relative distance `10^-k`.
pub(crate) fn y_window(link: &LinkFunction, k: u32) -> Vec<f64> {
    let (a, b) = (link.a(), link.b());
    let mut ys = default_y_set(link);
    if b.is_infinite() {
        let lo = if a > 0.0 { a * (1.0 + 10f64.powi(-(k as i32))) } else { 10f64.powi(-(k as i32)) };
        let hi = a.max(1.0) * 10f64.powi(k as i32);
        ys.extend(logspace(lo, hi, 4 * k as usize + 1));
    } else {
        let w = b - a;
        for j in 1..=2 * k {
            ys.push(a + w * 10f64.powf(-(j as f64) / 2.0));
        }
        for j in 1..=2 * k.min(12) {
            ys.push(b - w * 10f64.powf(-(j as f64) / 2.0));
        }
    }
    ys.retain(|&y| link.contains(y));
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys
}

/// `t` values where the quotient of `loss` at output `y` equals one of `rs`.
fn mapped_points(loss: &RatioLoss, rs: &[f64], y: f64) -> Vec<f64> {
    let c = loss.c();
    rs.iter()
        .filter_map(|&r| {
            let u = match loss.direction() {
                Direction::Standard => r * (y + c) - c,
                Direction::Inverse => (y + c) / r - c,
            };
            if loss.link().contains(u) {
                loss.link().inverse(u).ok().filter(|t| t.is_finite())
            } else {
                None
            }
        })
        .collect()
}

fn with_one(mut v: Vec<f64>) -> Vec<f64> {
    v.push(1.0);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Largest score seen so far and where it was attained.
#[derive(Debug, Clone, Copy)]
struct Worst {
    score: f64,
    x: f64,
    y: Option<f64>,
    value: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            score: f64::NEG_INFINITY,
            x: f64::NAN,
            y: None,
            value: f64::NAN,
        }
    }

    fn offer(&mut self, score: f64, x: f64, y: Option<f64>, value: f64) {
        if score > self.score {
            *self = Worst { score, x, y, value };
        }
    }

    fn apply(&self, check: &mut Check) {
        if self.x.is_finite() {
            check.witness = Some(self.x);
        }
        check.witness_y = self.y;
        check.witness_value = self.value;
    }
}

pub fn check_ratio_symmetry(ell: &dyn RepresentingFunction) -> Check {
    let mut worst = Worst::new();
    let mut ok = true;
    for r in logspace(1e-3, 1e3, 2001) {
        let v = ell.value(r);
        let w = ell.value(1.0 / r);
        let d = (v - w).abs();
        let tol = 1e-9 * (1.0 + v.abs());
        let score = if d.is_finite() { d / tol } else { f64::INFINITY };
        if !(score <= 1.0) {
            ok = false;
        }
        worst.offer(score, r, None, d);
    }
    let mut c = Check::new(Property::RatioSymmetry, Verdict::from_bool(ok), "r-log2001");
    worst.apply(&mut c);
    c
}

/// Score of a second difference: above 1 means a curvature violation.
fn convexity_score(fm: f64, f0: f64, fp: f64, h: f64) -> Option<(f64, f64)> {
    if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
        return None;
    }
    let d = (fp - 2.0 * f0 + fm) / (h * h);
    let round = 64.0 * f64::EPSILON * (fp.abs() + 2.0 * f0.abs() + fm.abs()) / (h * h);
    let tol = 1e-7 * f0.abs().max(1.0) + round;
    // overflow in the difference itself says nothing about curvature
    (d.is_finite() && tol.is_finite()).then_some((-d / tol, d))
}

pub fn check_convexity(target: Target<'_>) -> Check {
    let mut worst = Worst::new();
    let grid_id;
    match target {
        Target::Ell(ell) => {
            grid_id = "r-log4001";
            for r in logspace(1e-3, 1e3, 4001) {
                let h = 1e-3 * r;
                let vals = (ell.value(r - h), ell.value(r), ell.value(r + h));
                if let Some((s, d)) = convexity_score(vals.0, vals.1, vals.2, h) {
                    worst.offer(s, r, None, d);
                }
            }
        }
        Target::Loss(loss) => {
            grid_id = "t-lin4001";
            let h = 1e-3;
            for y in default_y_set(loss.link()) {
                for t in linspace(-10.0, 10.0, 4001) {
                    let vals = (loss.value(y, t - h), loss.value(y, t), loss.value(y, t + h));
                    if let Some((s, d)) = convexity_score(vals.0, vals.1, vals.2, h) {
                        worst.offer(s, t, Some(y), d);
                    }
                }
            }
        }
    }
    let ok = worst.score <= 1.0 || worst.score == f64::NEG_INFINITY;
    let mut c = Check::new(Property::Convex, Verdict::from_bool(ok), grid_id);
    worst.apply(&mut c);
    c
}

/// Jump size `J(δ)` ratio test at `x`; returns the score (above 1 means a
/// discontinuity) and `J(1e-8)`.
fn continuity_score(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> Option<(f64, f64)> {
    let f0 = f(x);
    if !f0.is_finite() {
        return None;
    }
    let jump = |d: f64| (f(x + d * scale) - f(x - d * scale)).abs();
    let (j6, j8) = (jump(1e-6), jump(1e-8));
    if !j8.is_finite() {
        return Some((f64::INFINITY, j8));
    }
    let allowed = (1e-7 * (1.0 + f0.abs())).max(0.5 * j6);
    Some((j8 / allowed, j8))
}

pub fn check_continuity(target: Target<'_>) -> Check {
    let mut worst = Worst::new();
    let grid_id;
    match target {
        Target::Ell(ell) => {
            grid_id = "r-log201+breakpoints";
            let mut xs = logspace(1e-3, 1e3, 201);
            xs.extend(with_one(ell.breakpoints()));
            for r in xs {
                if let Some((s, j)) = continuity_score(|x| ell.value(x), r, r) {
                    worst.offer(s, r, None, j);
                }
            }
        }
        Target::Loss(loss) => {
            grid_id = "t-lin201+breakpoints";
            let bps = with_one(loss.ell().breakpoints());
            for y in default_y_set(loss.link()) {
                let mut ts = linspace(-10.0, 10.0, 201);
                ts.extend(mapped_points(loss, &bps, y));
                for t in ts {
                    if let Some((s, j)) = continuity_score(|x| loss.value(y, x), t, 1.0) {
                        worst.offer(s, t, Some(y), j);
                    }
                }
            }
        }
    }
    let ok = !(worst.score > 1.0);
    let mut c = Check::new(Property::Continuous, Verdict::from_bool(ok), grid_id);
    worst.apply(&mut c);
    c
}

/// Left/right difference-quotient mismatch at `x` with step `h`.
fn kink_score(f: impl Fn(f64) -> f64, x: f64, h: f64) -> Option<(f64, f64)> {
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
        return None;
    }
    let dl = (f0 - fm) / h;
    let dr = (fp - f0) / h;
    let mismatch = (dr - dl).abs();
    if !mismatch.is_finite() {
        return None;
    }
    Some((mismatch / (1e-3 * (1.0 + dl.abs().max(dr.abs()))), mismatch))
}

pub fn check_differentiability(target: Target<'_>) -> Check {
    let mut worst = Worst::new();
    let grid_id;
    match target {
        Target::Ell(ell) => {
            grid_id = "r-log2001+breakpoints";
            let mut xs = logspace(1e-3, 1e3, 2001);
            xs.extend(ell.breakpoints());
            for r in xs {
                if let Some((s, m)) = kink_score(|x| ell.value(x), r, 1e-6 * r) {
                    worst.offer(s, r, None, m);
                }
            }
        }
        Target::Loss(loss) => {
            grid_id = "t-lin4001+breakpoints";
            let bps = loss.ell().breakpoints();
            for y in default_y_set(loss.link()) {
                let mut ts = linspace(-10.0, 10.0, 4001);
                ts.extend(mapped_points(loss, &bps, y));
                for t in ts {
                    if let Some((s, m)) = kink_score(|x| loss.value(y, x), t, 1e-6) {
                        worst.offer(s, t, Some(y), m);
                    }
                }
            }
        }
    }
    let ok = !(worst.score > 1.0);
    let mut c = Check::new(Property::Differentiable, Verdict::from_bool(ok), grid_id);
    worst.apply(&mut c);
    c
}

/// One-sided slope magnitude at `x` for relative step `d` (absolute when
/// `scale` is 1).
fn one_sided_slope(f: &impl Fn(f64) -> f64, x: f64, d: f64, scale: f64) -> f64 {
    let (xp, xm) = (x + d * scale, x - d * scale);
    let f0 = f(x);
    ((f(xp) - f0) / (xp - x)).abs().max(((f0 - f(xm)) / (x - xm)).abs())
}

/// Slope refinement at a suspected kink: the estimate and whether it keeps
/// growing as the step shrinks.
fn refine(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> (f64, bool) {
    let e6 = one_sided_slope(&f, x, 1e-6, scale);
    let e8 = one_sided_slope(&f, x, 1e-8, scale);
    if !(e6.is_finite() && e8.is_finite()) {
        return (f64::INFINITY, true);
    }
    let noise = 1e-5 * (1.0 + f(x).abs()) / scale;
    (e6.max(e8), e8 > 1.5 * e6 + noise)
}

/// Supremum of consecutive difference quotients; infinite when any value
/// is non-finite.
fn sup_quotient(f: impl Fn(f64) -> f64, xs: &[f64]) -> (f64, usize) {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = (0.0, 0);
    for i in 0..xs.len().saturating_sub(1) {
        let q = ((vals[i + 1] - vals[i]) / (xs[i + 1] - xs[i])).abs();
        if !q.is_finite() {
            return (f64::INFINITY, i);
        }
        if q > best.0 {
            best = (q, i);
        }
    }
    (best.0, best.1)
}

fn stabilized(windows: &[f64]) -> bool {
    match windows {
        [.., prev, last] => {
            prev.is_finite() && last.is_finite() && (last - prev).abs() <= 0.05 * prev + 1e-12
        }
        _ => false,
    }
}

struct Sup {
    value: f64,
    t: f64,
    y: f64,
}

/// Supremum of `|ΔL/Δt|` over `ts × ys`, refined around the maximiser.
fn loss_sup(loss: &RatioLoss, ts: &[f64], ys: &[f64]) -> Sup {
    let mut best = Sup {
        value: 0.0,
        t: f64::NAN,
        y: f64::NAN,
    };
    let mut at = 0;
    for &y in ys {
        let (e, i) = sup_quotient(|t| loss.value(y, t), ts);
        if e > best.value || (e.is_infinite() && best.value.is_finite()) {
            best = Sup {
                value: e,
                t: ts[i],
                y,
            };
            at = i;
        }
        if e.is_infinite() {
            return best;
        }
    }
    if best.t.is_finite() && ts.len() > 2 {
        let lo = ts[at.saturating_sub(1)];
        let hi = ts[(at + 2).min(ts.len() - 1)];
        let fine = linspace(lo, hi, 201);
        let (e, i) = sup_quotient(|t| loss.value(best.y, t), &fine);
        if e > best.value {
            best.value = e;
            best.t = fine[i];
        }
    }
    best
}

/// Slope divergence at the images of the breakpoints of `ℓ`.
fn loss_kinks_diverge(loss: &RatioLoss, t_max: f64) -> Option<(f64, f64)> {
    let bps = with_one(loss.ell().breakpoints());
    for y in default_y_set(loss.link()) {
        for t in mapped_points(loss, &bps, y) {
            if t.abs() <= t_max && refine(|x| loss.value(y, x), t, 1.0).1 {
                return Some((t, y));
            }
        }
    }
    None
}

pub fn check_lipschitz(target: Target<'_>, mode: LipschitzMode) -> Check {
    let property = match mode {
        LipschitzMode::Local => Property::LocallyLipschitz,
        LipschitzMode::Global => Property::GloballyLipschitz,
    };
    match target {
        Target::Ell(ell) => ell_lipschitz(ell, mode, property),
        Target::Loss(loss) => loss_lipschitz(loss, mode, property),
    }
}

fn ell_lipschitz(ell: &dyn RepresentingFunction, mode: LipschitzMode, property: Property) -> Check {
    let f = |x: f64| ell.value(x);
    let candidates = with_one(ell.breakpoints());
    let mut divergent_at = Vec::new();
    let mut kink_slope: Vec<(f64, f64)> = Vec::new();
    for &x in &candidates {
        let (e, div) = refine(f, x, x);
        if div {
            divergent_at.push(x);
        }
        kink_slope.push((x, e));
    }

    let window_est = |lo: f64, hi: f64, n: usize| {
        let xs = logspace(lo, hi, n);
        let (mut e, i) = sup_quotient(f, &xs);
        let mut at = xs[i];
        for &(x, ek) in &kink_slope {
            if (lo..=hi).contains(&x) && ek > e {
                e = ek;
                at = x;
            }
        }
        (e, at)
    };

    let mut c;
    match mode {
        LipschitzMode::Local => {
            let (e, at) = window_est(0.1, 10.0, 4001);
            let divergent = divergent_at.iter().copied().find(|x| (0.1..=10.0).contains(x));
            let ok = e.is_finite() && divergent.is_none();
            c = Check::new(property, Verdict::from_bool(ok), "r-log4001[0.1,10]+kinks");
            c.estimate = Some(e);
            c.witness = Some(divergent.unwrap_or(at));
            c.witness_value = e;
        }
        LipschitzMode::Global => {
            let windows: Vec<(f64, f64)> = [1i32, 2, 4, 8]
                .iter()
                .map(|&k| window_est(10f64.powi(-k), 10f64.powi(k), 400 * k as usize + 1))
                .collect();
            let est: Vec<f64> = windows.iter().map(|w| w.0).collect();
            let divergent = divergent_at.first().copied();
            let ok = divergent.is_none() && stabilized(&est);
            c = Check::new(property, Verdict::from_bool(ok), "r-log-windows[1e-K,1e+K],K=1,2,4,8");
            let last = windows[windows.len() - 1];
            c.estimate = Some(last.0);
            c.witness = Some(divergent.unwrap_or(last.1));
            c.witness_value = last.0;
            c.windows = est;
        }
    }
    c
}

fn loss_lipschitz(loss: &RatioLoss, mode: LipschitzMode, property: Property) -> Check {
    let (plan, grid_id, t_kink): (Vec<(f64, u32)>, &str, f64) = match mode {
        LipschitzMode::Local => (
            vec![(10.0, 2), (10.0, 4), (10.0, 8), (10.0, 16)],
            "t-lin2001[-10,10]x y-windows K=2,4,8,16",
            10.0,
        ),
        LipschitzMode::Global => (
            vec![(10.0, 2), (20.0, 4), (40.0, 8), (80.0, 16)],
            "t-lin2001[-W,W],W=10,20,40,80 x y-windows K=2,4,8,16",
            f64::INFINITY,
        ),
    };
    let mut est = Vec::with_capacity(plan.len());
    let mut last = None;
    for (w, k) in plan {
        let ts = linspace(-w, w, 2001);
        let s = loss_sup(loss, &ts, &y_window(loss.link(), k));
        est.push(s.value);
        let stop = s.value.is_infinite();
        last = Some(s);
        if stop {
            break;
        }
    }
    let last = last.expect("non-empty plan");
    let divergent = loss_kinks_diverge(loss, t_kink);
    let ok = divergent.is_none() && est.len() == 4 && stabilized(&est);
    let mut c = Check::new(property, Verdict::from_bool(ok), grid_id);
    c.estimate = Some(last.value);
    c.witness_value = last.value;
    match divergent {
        Some((t, y)) => {
            c.witness = Some(t);
            c.witness_y = Some(y);
        }
        None => {
            c.witness = last.t.is_finite().then_some(last.t);
            c.witness_y = last.y.is_finite().then_some(last.y);
        }
    }
    c.windows = est;
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CatalogFunction, LossId};
    use crate::link::LinkFunction;

    fn ell(id: LossId) -> CatalogFunction {
        CatalogFunction::with_defaults(id)
    }

    fn loss(id: LossId, link: LinkFunction, c: f64) -> RatioLoss {
        RatioLoss::standard(ell(id).into_ell(), link, c).unwrap()
    }

    #[test]
    fn symmetry_examples() {
        assert!(check_ratio_symmetry(&ell(LossId::Lare)).holds());
        let c = check_ratio_symmetry(&ell(LossId::GreExp));
        assert!(!c.holds());
        assert!(c.witness.is_some());
    }

    #[test]
    fn convexity_examples() {
        assert!(check_convexity(Target::Ell(&ell(LossId::Lpre))).holds());
        let exp = LinkFunction::exp(0.0).unwrap();
        let logi = LinkFunction::logistic(0.0, 1.0).unwrap();
        assert!(check_convexity(Target::Loss(&loss(LossId::Lpre, exp, 0.0))).holds());
        assert!(!check_convexity(Target::Loss(&loss(LossId::Lpre, logi, 0.5))).holds());
        let c = check_convexity(Target::Loss(&loss(LossId::AbsRel, exp, 0.0)));
        assert!(!c.holds());
        let (t, y) = (c.witness.unwrap(), c.witness_y.unwrap());
        let l = loss(LossId::AbsRel, exp, 0.0);
        let d = l.value(y, t + 1e-3) - 2.0 * l.value(y, t) + l.value(y, t - 1e-3);
        assert!(d < 0.0);
    }

    #[test]
    fn lipschitz_examples() {
        let c = check_lipschitz(Target::Ell(&ell(LossId::AbsRel)), LipschitzMode::Global);
        assert!(c.holds());
        // quotients of |r - 1| near r = 1e-8 carry rounding of order 1e-6
        assert!((c.estimate.unwrap() - 1.0).abs() < 1e-5, "{c:?}");
        let sq = ell(LossId::SquaredLog);
        assert!(check_lipschitz(Target::Ell(&sq), LipschitzMode::Local).holds());
        assert!(!check_lipschitz(Target::Ell(&sq), LipschitzMode::Global).holds());
        let sqrt = ell(LossId::GreSqrt);
        assert!(!check_lipschitz(Target::Ell(&sqrt), LipschitzMode::Local).holds());

        let exp = LinkFunction::exp(0.0).unwrap();
        let l = loss(LossId::LogRatioSym, exp, 0.0);
        let c = check_lipschitz(Target::Loss(&l), LipschitzMode::Global);
        assert!(c.holds());
        assert!(c.estimate.unwrap() <= 2.0 + 1e-6);
        assert_eq!(c.windows.len(), 4);
    }

    #[test]
    fn differentiability_examples() {
        assert!(!check_differentiability(Target::Ell(&ell(LossId::MaxLoss))).holds());
        assert!(check_differentiability(Target::Ell(&ell(LossId::HuberRel))).holds());
        assert!(check_differentiability(Target::Ell(&ell(LossId::SmoothLare))).holds());
    }

    #[test]
    fn continuity_detects_a_jump() {
        #[derive(Debug)]
        struct Step;
        impl RepresentingFunction for Step {
            fn label(&self) -> String {
                "step".into()
            }
            fn value(&self, r: f64) -> f64 {
                if r < 2.0 {
                    (r - 1.0).abs()
                } else {
                    5.0
                }
            }
            fn slope(&self, _r: f64, _s: crate::catalog::Side) -> f64 {
                0.0
            }
            fn breakpoints(&self) -> Vec<f64> {
                vec![2.0]
            }
        }
        let c = check_continuity(Target::Ell(&Step));
        assert!(!c.holds());
        assert_eq!(c.witness, Some(2.0));
        assert!(check_continuity(Target::Ell(&ell(LossId::GreSqrt))).holds());
    }

    #[test]
    fn y_sets_stay_inside_the_interval() {
        let logi = LinkFunction::logistic(0.0, 1.0).unwrap();
        let ys = default_y_set(&logi);
        assert!(ys.len() >= 3);
        for k in [2, 16] {
            for y in y_window(&logi, k) {
                assert!(y > 0.0 && y < 1.0);
            }
        }
        let exp = LinkFunction::exp(0.0).unwrap();
        let w = y_window(&exp, 16);
        assert!(w[0] <= 1e-16 && *w.last().unwrap() >= 1e16);
    }
}
