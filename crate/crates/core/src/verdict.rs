use serde::{Deserialize, Serialize};

use crate::VIOLATION_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Entangled,
    Npt,
    GmeWitnessed,
    NotFullySeparable,
    Inconclusive,
}

/// Outcome of one inequality test. `violated` is true exactly when
/// `margin = lhs - rhs` exceeds the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
    pub classification: Classification,
    /// Conclusion drawn if the bound is exceeded, kept so the verdict can be
    /// re-judged at another tolerance.
    #[serde(default = "inconclusive")]
    pub on_violation: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CriterionVerdict {
    /// `on_violation` is the conclusion drawn when the bound is exceeded.
    pub fn new(criterion: &str, lhs: f64, rhs: f64, on_violation: Classification) -> Self {
        Self::with_tolerance(criterion, lhs, rhs, on_violation, VIOLATION_TOL)
    }

    pub fn with_tolerance(
        criterion: &str,
        lhs: f64,
        rhs: f64,
        on_violation: Classification,
        tol: f64,
    ) -> Self {
        let margin = lhs - rhs;
        let violated = margin > tol;
        Self {
            criterion: criterion.to_string(),
            lhs,
            rhs,
            margin,
            violated,
            classification: if violated {
                on_violation
            } else {
                Classification::Inconclusive
            },
            on_violation,
            note: None,
        }
    }

    /// Same comparison judged with tolerance `tol`.
    pub fn rejudged(&self, tol: f64) -> Self {
        let mut v = Self::with_tolerance(&self.criterion, self.lhs, self.rhs, self.on_violation, tol);
        v.note = self.note.clone();
        v
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn inconclusive() -> Classification {
    Classification::Inconclusive
}
