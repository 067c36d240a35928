//! Ratio-based loss functions `L(x, y, t) = ℓ((u(t) + c) / (y + c))`:
//! a catalog of representing functions and links, convexity constructions,
//! a numerical property verifier, and empirical risk minimization.

pub mod assembly;
pub mod builder;
pub mod catalog;
pub mod error;
pub mod io;
pub mod link;
pub mod lossspec;
pub mod num;
pub mod quadrature;
pub mod risk;
pub mod rng;
pub mod verifier;

pub use assembly::{from_distance_form, Direction, DistanceBridge, DistanceFunction, RatioLoss};
pub use builder::{
    build_from_generator, convexity_certificate, flatten, symmetrize, AuxFunction, Flattened,
    GeneratorG, Symmetrized,
};
pub use catalog::{
    CatalogFunction, DeclaredProperties, Ell, LossId, LossParams, RepresentingFunction, Side,
    ZeroLoss,
};
pub use error::{Error, Result};
pub use link::{LinkFunction, LinkKind};
pub use lossspec::LossSpec;
pub use risk::{
    empirical_risk, fit, generate_multiplicative, metric, regularized_risk, risk_at_zero, Dataset,
    FitOptions, FitResult, LinearModel, MetricKind, RiskAtZero,
};
pub use verifier::{PropertyReport, Verdict};

/// Version tag written into every JSON report.
pub const SPEC_VERSION: &str = "1";
