use proptest::prelude::*;

use rbloss_core::num::{linspace, logspace};
use rbloss_core::verifier::{check_convexity, expected_table3, second_draw, Table3Link, Target};
use rbloss_core::{
    empirical_risk, flatten, generate_multiplicative, risk_at_zero, symmetrize, AuxFunction,
    CatalogFunction, Direction, LinearModel, LinkFunction, LossId, LossParams, RatioLoss,
    RepresentingFunction, Side,
};

fn draws(id: LossId) -> Vec<CatalogFunction> {
    let mut out = vec![CatalogFunction::with_defaults(id)];
    if let Some(p) = second_draw(id) {
        out.push(CatalogFunction::new(id, p).unwrap());
    }
    out
}

fn exp_link() -> LinkFunction {
    LinkFunction::exp(0.0).unwrap()
}

fn smooth_ids() -> Vec<LossId> {
    LossId::ALL.iter().copied().filter(|id| id.declared().differentiable).collect()
}

#[test]
fn every_entry_vanishes_at_one() {
    for &id in LossId::ALL {
        for f in draws(id) {
            assert!(f.value(1.0).abs() <= 1e-12, "{}: {}", f.label(), f.value(1.0));
        }
    }
}

#[test]
fn flagged_entries_are_ratio_symmetric() {
    for &id in LossId::ALL.iter().filter(|id| id.declared().ratio_symmetric) {
        for f in draws(id) {
            for r in logspace(1e-3, 1e3, 601) {
                let (a, b) = (f.value(r), f.value(1.0 / r));
                assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{} at {r}: {a} vs {b}", f.label());
            }
        }
    }
}

/// Best Richardson-extrapolated central difference over `h ∈ {1e-4, ..., 1e-7}·r`.
fn richardson_error(f: &dyn RepresentingFunction, r: f64, d: f64) -> f64 {
    let central = |h: f64| (f.value(r + h) - f.value(r - h)) / (2.0 * h);
    [1e-4, 1e-5, 1e-6, 1e-7]
        .iter()
        .map(|&k| {
            let h = k * r;
            let est = (4.0 * central(h / 2.0) - central(h)) / 3.0;
            (est - d).abs() / d.abs().max(1e-6)
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ell_derivative_matches_richardson(lr in -3.0f64..3.0, pick in 0usize..20) {
        let ids = smooth_ids();
        let f = CatalogFunction::with_defaults(ids[pick % ids.len()]);
        let r = 10f64.powf(lr);
        let d = f.slope(r, Side::Central);
        let e = richardson_error(&f, r, d);
        prop_assert!(e <= 1e-6, "{} at r = {r}: slope {d}, rel err {e}", f.label());
    }

    #[test]
    fn symmetrized_presets_are_symmetric_and_nonnegative(alpha in 0.05f64..3.0) {
        let ell = symmetrize(AuxFunction::power(alpha)).unwrap().into_ell();
        for r in logspace(1e-3, 1e3, 201) {
            let (a, b) = (ell.value(r), ell.value(1.0 / r));
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            prop_assert!(a >= -1e-12);
        }
    }

    #[test]
    fn certified_outputs_give_convex_losses(alpha in 0.1f64..2.5) {
        let sym = symmetrize(AuxFunction::power(alpha)).unwrap();
        prop_assert!(sym.is_certified());
        let loss = RatioLoss::standard(sym.into_ell(), exp_link(), 0.0).unwrap();
        let h = 1e-3;
        for y in [0.1, 1.0, 7.0] {
            for t in linspace(-10.0, 10.0, 401) {
                let (m, c, p) = (loss.value(y, t - h), loss.value(y, t), loss.value(y, t + h));
                let second = m - 2.0 * c + p;
                prop_assert!(second >= -1e-7 * (1.0 + c.abs()), "alpha {alpha}, y {y}, t {t}: {second}");
            }
        }
    }

    #[test]
    fn empirical_risk_is_convex_along_lines(
        pick in 0usize..15,
        seed in 0u64..1000,
        w in prop::collection::vec(-1.0f64..1.0, 3),
        dir in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let convex: Vec<LossId> = LossId::ALL
            .iter()
            .copied()
            .filter(|&id| expected_table3(id, Table3Link::Exp, 0.0)[0])
            .collect();
        let id = convex[pick % convex.len()];
        let loss = RatioLoss::standard(CatalogFunction::with_defaults(id).into_ell(), exp_link(), 0.0).unwrap();
        let data = generate_multiplicative(25, &LinearModel::reference(3), &exp_link(), 0.3, seed).unwrap();
        let at = |s: f64| {
            let m = LinearModel {
                w: w.iter().zip(&dir).map(|(a, d)| a + s * d).collect(),
                b0: 0.5 + s * dir[3],
            };
            empirical_risk(&loss, &data, &m).unwrap()
        };
        let h = 0.05;
        for s in linspace(-1.0, 1.0, 41) {
            let (a, b, c) = (at(s - h), at(s), at(s + h));
            prop_assert!(a - 2.0 * b + c >= -1e-10 * (1.0 + b.abs()), "{id} at s = {s}");
        }
    }

    #[test]
    fn risk_at_zero_respects_its_bound(c in 0.05f64..3.0, seed in 0u64..1000, pick in 0usize..34) {
        let id = LossId::ALL[pick];
        let link = LinkFunction::logistic(0.0, 1.0).unwrap();
        let loss = RatioLoss::standard(CatalogFunction::with_defaults(id).into_ell(), link, c).unwrap();
        let data = generate_multiplicative(20, &LinearModel::reference(2), &link, 0.2, seed).unwrap();
        let r = risk_at_zero(&loss, &data).unwrap();
        if let Some(ok) = r.within_bound() {
            prop_assert!(ok, "{}: {r:?}", loss.label());
        }
    }
}

#[test]
fn max_loss_on_the_unit_interval_is_not_convex() {
    let link = LinkFunction::logistic(0.0, 1.0).unwrap();
    for c in [0.0, 0.1, 0.5, 2.0] {
        let loss =
            RatioLoss::standard(CatalogFunction::with_defaults(LossId::MaxLoss).into_ell(), link, c).unwrap();
        let ch = check_convexity(Target::Loss(&loss));
        assert!(!ch.holds(), "c = {c}: {ch:?}");
        let (t, y) = (ch.witness.unwrap(), ch.witness_y.unwrap());
        let h = 1e-3;
        let second = loss.value(y, t - h) - 2.0 * loss.value(y, t) + loss.value(y, t + h);
        assert!(second < 0.0, "witness t = {t}, y = {y} does not re-check");
    }
}

#[test]
fn flatten_loses_convexity_and_the_verifier_notices() {
    let lpre = CatalogFunction::with_defaults(LossId::Lpre);
    assert!(check_convexity(Target::Ell(&lpre)).holds());
    let flat = flatten(lpre.into_ell(), 1.0, 0.5).unwrap().into_ell();
    assert!(!check_convexity(Target::Ell(flat.as_ref())).holds());
}

#[test]
fn symmetric_entries_ignore_the_quotient_direction() {
    let link = exp_link();
    for &id in LossId::ALL.iter().filter(|id| id.declared().ratio_symmetric) {
        let ell = CatalogFunction::with_defaults(id).into_ell();
        let s = RatioLoss::new(ell.clone(), link, 0.5, Direction::Standard).unwrap();
        let i = RatioLoss::new(ell, link, 0.5, Direction::Inverse).unwrap();
        for y in [0.3, 1.0, 4.0] {
            for t in linspace(-2.0, 3.0, 21) {
                let (a, b) = (s.value(y, t), i.value(y, t));
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{id}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn parameter_draws_are_valid() {
    for &id in LossId::ALL {
        assert_eq!(second_draw(id).is_some(), id.is_parametric(), "{id}");
        assert!(CatalogFunction::new(id, LossParams::defaults(id)).is_ok());
    }
}
