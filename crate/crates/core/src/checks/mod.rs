//! Empirical checks of the regularity estimates on discrete fields, and the
//! closed-form constants used in the reduction-of-oscillation argument.

mod constants;
mod harnack;
mod positivity;

use std::collections::BTreeMap;

pub use constants::{
    dnl_constants_ledger, p_constants_ledger, theta, ProofConstants, DEFAULT_ALPHA, DEFAULT_M_EXPAND, DEFAULT_NU,
};
pub use harnack::{check_integral_harnack_dnl, check_integral_harnack_p};
pub use positivity::{
    check_critical_mass_dnl, check_expansion_positivity_dnl, check_expansion_positivity_p, classify_alternative,
    Alternative, AlternativeMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl Verdict {
    pub fn from_flags(hypothesis: bool, conclusion: bool) -> Self {
        match (hypothesis, conclusion) {
            (false, _) => Verdict::HypothesisNotMet,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisNotMet => "hypothesis_not_met",
        }
    }
}

/// Outcome of one check, carrying every number needed to re-derive it.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check_name: String,
    pub hypothesis_satisfied: bool,
    pub conclusion_satisfied: bool,
    pub measured_constants: BTreeMap<String, f64>,
    /// Relative change of the headline constant against a coarser grid.
    pub refinement_stability: Option<f64>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn new(
        check_name: &str,
        hypothesis_satisfied: bool,
        conclusion_satisfied: bool,
        measured: impl IntoIterator<Item = (&'static str, f64)>,
    ) -> Self {
        CheckReport {
            check_name: check_name.to_string(),
            hypothesis_satisfied,
            conclusion_satisfied,
            measured_constants: measured.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            refinement_stability: None,
            verdict: Verdict::from_flags(hypothesis_satisfied, conclusion_satisfied),
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.measured_constants.get(name).copied()
    }

    /// Records `|this - coarse| / |coarse|` for the named constant.
    pub fn with_refinement_against(mut self, coarse: &CheckReport, name: &str) -> Self {
        if let (Some(a), Some(b)) = (self.constant(name), coarse.constant(name)) {
            self.refinement_stability = Some(relative_change(a, b));
        }
        self
    }
}

/// Distance from `B_radius(center)` to the edge of the computational cube.
pub(crate) fn interior_margin(grid: &crate::model::Grid, center: &[f64], radius: f64) -> f64 {
    center
        .iter()
        .map(|c| grid.domain_half_width - c.abs() - radius)
        .fold(f64::INFINITY, f64::min)
}

/// `|a - b| / |b|`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_requires_both_flags() {
        assert_eq!(Verdict::from_flags(true, true), Verdict::Pass);
        assert_eq!(Verdict::from_flags(true, false), Verdict::Fail);
        assert_eq!(Verdict::from_flags(false, true), Verdict::HypothesisNotMet);
    }

    #[test]
    fn refinement_change_recorded() {
        let a = CheckReport::new("x", true, true, [("g", 1.1)]);
        let b = CheckReport::new("x", true, true, [("g", 1.0)]);
        let r = a.with_refinement_against(&b, "g").refinement_stability.unwrap();
        assert!((r - 0.1).abs() < 1e-12);
    }
}
