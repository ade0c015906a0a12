//! Auditable results of a single inequality evaluation.

use std::fmt;

use serde::{Serialize, Serializer};

/// Slack rule used across the crate: `lhs ≤ bound + 1e-8·max(1, bound)`.
pub const SLACK: f64 = 1e-8;

/// Right-hand sides below this are treated as zero when forming ratios.
pub const DEGENERATE_RHS: f64 = 1e-14;

pub fn within_slack(lhs: f64, bound: f64) -> bool {
    lhs <= bound + SLACK * bound.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    HolderSelfTest,
    PowerContraction,
    PowerExpansion,
    AlphaLipschitz,
    CommutatorUp,
    CommutatorDown,
    AnticommutatorUp,
    AnticommutatorDown,
    JensenChain,
    SelfadjointCommutator,
    MainTheorem,
}

impl LemmaId {
    pub const SUITE: [LemmaId; 10] = [
        LemmaId::PowerContraction,
        LemmaId::PowerExpansion,
        LemmaId::AlphaLipschitz,
        LemmaId::CommutatorUp,
        LemmaId::CommutatorDown,
        LemmaId::AnticommutatorUp,
        LemmaId::AnticommutatorDown,
        LemmaId::JensenChain,
        LemmaId::SelfadjointCommutator,
        LemmaId::MainTheorem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::HolderSelfTest => "holder_self_test",
            LemmaId::PowerContraction => "power_contraction",
            LemmaId::PowerExpansion => "power_expansion",
            LemmaId::AlphaLipschitz => "alpha_lipschitz",
            LemmaId::CommutatorUp => "commutator_up",
            LemmaId::CommutatorDown => "commutator_down",
            LemmaId::AnticommutatorUp => "anticommutator_up",
            LemmaId::AnticommutatorDown => "anticommutator_down",
            LemmaId::JensenChain => "jensen_chain",
            LemmaId::SelfadjointCommutator => "selfadjoint_commutator",
            LemmaId::MainTheorem => "main_theorem",
        }
    }

    pub fn from_name(s: &str) -> Option<LemmaId> {
        Self::SUITE.into_iter().chain([LemmaId::HolderSelfTest]).find(|l| l.name() == s)
    }

    /// Whether the inequality carries a constant stated in closed form.
    pub fn has_explicit_constant(self) -> bool {
        matches!(
            self,
            LemmaId::HolderSelfTest
                | LemmaId::PowerContraction
                | LemmaId::PowerExpansion
                | LemmaId::AlphaLipschitz
                | LemmaId::CommutatorUp
                | LemmaId::CommutatorDown
                | LemmaId::JensenChain
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constant {
    Explicit(f64),
    /// Not known in closed form; judged against a configured cap.
    Empirical,
}

impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Constant::Explicit(c) => s.serialize_f64(*c),
            Constant::Empirical => s.serialize_str("empirical"),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Explicit(c) => write!(f, "{c:.17e}"),
            Constant::Empirical => f.write_str("empirical"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedDegenerate,
    /// The evaluation itself failed (see `error`).
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::SkippedDegenerate => "skipped_degenerate",
            Verdict::Error => "error",
        }
    }
}

/// Exponents the check was evaluated at (unused ones are `None`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CheckParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
}

/// Where a randomized instance came from; enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub base_seed: u64,
    pub cell: usize,
    pub trial: usize,
    pub trial_seed: u64,
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub lemma: LemmaId,
    pub params: CheckParams,
    pub digest: Option<InputDigest>,
    pub lhs: f64,
    /// Right side without the constant.
    pub rhs_structural: f64,
    pub constant: Constant,
    pub ratio: Option<f64>,
    pub verdict: Verdict,
    /// Residual of an auxiliary identity checked alongside, if any.
    pub identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    /// Judges an explicit-constant inequality `lhs ≤ constant·rhs` with the
    /// slack rule. The ratio is only formed for non-degenerate right sides.
    pub fn explicit(lemma: LemmaId, params: CheckParams, lhs: f64, rhs: f64, constant: f64) -> Self {
        let verdict = if within_slack(lhs, constant * rhs) { Verdict::Pass } else { Verdict::Fail };
        CheckRecord {
            lemma,
            params,
            digest: None,
            lhs,
            rhs_structural: rhs,
            constant: Constant::Explicit(constant),
            ratio: ratio(lhs, rhs),
            verdict,
            identity_residual: None,
            error: None,
        }
    }

    /// Records an inequality whose constant is unknown; passes iff the ratio
    /// stays below `cap`.
    pub fn empirical(lemma: LemmaId, params: CheckParams, lhs: f64, rhs: f64, cap: f64) -> Self {
        let ratio = ratio(lhs, rhs);
        let verdict = match ratio {
            None => Verdict::SkippedDegenerate,
            Some(r) if r.is_finite() && r <= cap => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        CheckRecord {
            lemma,
            params,
            digest: None,
            lhs,
            rhs_structural: rhs,
            constant: Constant::Empirical,
            ratio,
            verdict,
            identity_residual: None,
            error: None,
        }
    }

    pub fn skipped(lemma: LemmaId, params: CheckParams, lhs: f64, rhs: f64, constant: Constant) -> Self {
        CheckRecord {
            lemma,
            params,
            digest: None,
            lhs,
            rhs_structural: rhs,
            constant,
            ratio: None,
            verdict: Verdict::SkippedDegenerate,
            identity_residual: None,
            error: None,
        }
    }

    /// A trial whose evaluation raised `err`; carries no numbers.
    pub fn errored(lemma: LemmaId, params: CheckParams, constant: Constant, err: &crate::Error) -> Self {
        CheckRecord {
            lemma,
            params,
            digest: None,
            lhs: f64::NAN,
            rhs_structural: f64::NAN,
            constant,
            ratio: None,
            verdict: Verdict::Error,
            identity_residual: None,
            error: Some(err.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn with_digest(mut self, digest: InputDigest) -> Self {
        self.digest = Some(digest);
        self
    }
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > DEGENERATE_RHS).then(|| lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_rule() {
        assert!(within_slack(1.0 + 5e-9, 1.0));
        assert!(!within_slack(1.0 + 2e-8, 1.0));
        assert!(within_slack(5e-9, 0.0));
        assert!(within_slack(100.0 + 5e-7, 100.0));
    }

    #[test]
    fn zero_over_zero_passes_explicit() {
        let r = CheckRecord::explicit(LemmaId::PowerContraction, CheckParams::default(), 0.0, 0.0, 1.0);
        assert!(r.passed());
        assert_eq!(r.ratio, None);
    }

    #[test]
    fn empirical_degenerate_is_skipped() {
        let r = CheckRecord::empirical(LemmaId::AnticommutatorUp, CheckParams::default(), 0.0, 0.0, 64.0);
        assert_eq!(r.verdict, Verdict::SkippedDegenerate);
        let r = CheckRecord::empirical(LemmaId::AnticommutatorUp, CheckParams::default(), 100.0, 1.0, 64.0);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn names_roundtrip() {
        for l in LemmaId::SUITE {
            assert_eq!(LemmaId::from_name(l.name()), Some(l));
        }
        assert_eq!(LemmaId::from_name("nope"), None);
    }
}
