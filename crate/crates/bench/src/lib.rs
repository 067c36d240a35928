//! Fixtures shared by the criterion benches.

use rbloss_core::{
    generate_multiplicative, Dataset, LinearModel, LinkFunction, LossId, LossSpec, RatioLoss,
};

/// `lpre/exp:a=0/c=0` and friends, built from their text form.
pub fn loss(spec: &str) -> RatioLoss {
    LossSpec::parse(spec)
        .and_then(|s| s.build())
        .expect("bench spec parses")
}

/// A reproducible multiplicative-noise dataset with `n` rows and `d` features.
pub fn dataset(n: usize, d: usize) -> Dataset {
    let link = LinkFunction::exp(0.0).expect("exp link");
    generate_multiplicative(n, &LinearModel::reference(d), &link, 0.2, 7).expect("generated")
}

pub fn smooth_ids() -> impl Iterator<Item = LossId> {
    [LossId::Lpre, LossId::SquaredLog, LossId::SmoothLare, LossId::LogCoshLog].into_iter()
}
