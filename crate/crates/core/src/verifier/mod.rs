//! Numerical re-derivation of the property tables for `ℓ` and for the
//! assembled loss `L`, plus the Lipschitz-constant lemma comparisons.
//!
//! Every check is a pure function of its subject and the fixed default
//! grids, so reports are bit-identical across runs.

mod checks;
mod lemmas;
mod report;
mod tables;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assembly::Direction;
use crate::catalog::LossId;

pub use checks::{
    check_continuity, check_convexity, check_differentiability, check_lipschitz,
    check_ratio_symmetry, default_y_set, LipschitzMode, Target,
};
pub use lemmas::{
    check_lipschitz_bound_lemmas, nemitski_spot_check, LemmaKind, LemmaRecord, NemitskiRecord,
};
pub use report::{write_csv, write_json, CSV_HEADER};
pub use tables::{
    expected_table3, second_draw, verify_loss, verify_table2, verify_table3, verify_table3_cell,
    Table3Link,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    RatioSymmetry,
    Convex,
    Continuous,
    LocallyLipschitz,
    GloballyLipschitz,
    Differentiable,
}

impl Property {
    /// Column order of the table for `ℓ`.
    pub const ELL: [Property; 6] = [
        Property::RatioSymmetry,
        Property::Convex,
        Property::Continuous,
        Property::LocallyLipschitz,
        Property::GloballyLipschitz,
        Property::Differentiable,
    ];

    /// Column order of the table for `L`.
    pub const LOSS: [Property; 5] = [
        Property::Convex,
        Property::Continuous,
        Property::LocallyLipschitz,
        Property::GloballyLipschitz,
        Property::Differentiable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::RatioSymmetry => "ratio-symmetry",
            Property::Convex => "convex",
            Property::Continuous => "continuous",
            Property::LocallyLipschitz => "locally-lipschitz",
            Property::GloballyLipschitz => "globally-lipschitz",
            Property::Differentiable => "differentiable",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one property check with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub property: Property,
    pub verdict: Verdict,
    /// Published property flag for this subject, when there is one.
    pub expected: Option<bool>,
    /// Worst point found: `r` for `ℓ`, `t` for `L`.
    pub witness: Option<f64>,
    /// Output `y` at the worst point (checks of `L` only).
    pub witness_y: Option<f64>,
    /// The measured quantity at the witness (second difference, mismatch,
    /// slope estimate, ...).
    pub witness_value: f64,
    /// Estimated Lipschitz constant, when the check produces one.
    pub estimate: Option<f64>,
    /// Per-window estimates of the widening-window Lipschitz checks.
    pub windows: Vec<f64>,
    pub grid_id: String,
    /// Named reason when the verdict is known to differ from the table.
    pub deviation: Option<String>,
}

impl Check {
    pub(crate) fn new(property: Property, verdict: Verdict, grid_id: impl Into<String>) -> Self {
        Check {
            property,
            verdict,
            expected: None,
            witness: None,
            witness_y: None,
            witness_value: 0.0,
            estimate: None,
            windows: Vec::new(),
            grid_id: grid_id.into(),
            deviation: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Disagrees with the table flag.
    pub fn is_mismatch(&self) -> bool {
        match self.expected {
            Some(e) => self.verdict != Verdict::from_bool(e),
            None => false,
        }
    }

    /// Disagrees with the table flag without a documented reason.
    pub fn is_unexplained_mismatch(&self) -> bool {
        self.is_mismatch() && self.deviation.is_none()
    }
}

/// What a report is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub ell: String,
    pub id: Option<LossId>,
    pub link: Option<String>,
    pub c: Option<f64>,
    pub direction: Option<Direction>,
}

impl Subject {
    pub fn ell(label: impl Into<String>, id: Option<LossId>) -> Self {
        Subject {
            ell: label.into(),
            id,
            link: None,
            c: None,
            direction: None,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ell)?;
        if let Some(link) = &self.link {
            write!(f, "/{link}")?;
        }
        if let Some(c) = self.c {
            write!(f, "/c={c}")?;
        }
        if self.direction == Some(Direction::Inverse) {
            f.write_str("/inverse")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub subject: Subject,
    pub checks: Vec<Check>,
    /// Human-readable description of every grid referenced by `grid_id`.
    pub grids: Vec<String>,
}

impl PropertyReport {
    pub fn check(&self, p: Property) -> Option<&Check> {
        self.checks.iter().find(|c| c.property == p)
    }

    pub fn verdict(&self, p: Property) -> Option<Verdict> {
        self.check(p).map(|c| c.verdict)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.is_mismatch())
    }

    pub fn unexplained_mismatches(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.is_unexplained_mismatch())
            .count()
    }

    /// Sort key: catalog number first, then link, `c` and direction.
    pub(crate) fn sort_key(&self) -> (usize, String, u64, bool) {
        (
            self.subject.id.map_or(usize::MAX, |i| i.number()),
            self.subject.link.clone().unwrap_or_default(),
            self.subject.c.unwrap_or(-1.0).to_bits(),
            self.subject.direction == Some(Direction::Inverse),
        )
    }
}

pub(crate) fn sort_reports(reports: &mut [PropertyReport]) {
    reports.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(&kb.0)
            .then_with(|| ka.1.cmp(&kb.1))
            .then_with(|| {
                f64::from_bits(ka.2)
                    .total_cmp(&f64::from_bits(kb.2))
            })
            .then_with(|| ka.3.cmp(&kb.3))
            .then_with(|| a.subject.ell.cmp(&b.subject.ell))
    });
}
