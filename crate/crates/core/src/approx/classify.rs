//! Admissibility classification of a distance set.
//!
//! With the four-values verdict and the countable/closed/zero-limit traits in
//! hand, the classification is a pure table: failing the four-values
//! condition is always inadmissible; with 0 as a limit the set must be
//! closed to carry the full space (a countable non-closed set still carries
//! the countable universal space); without 0 as a limit countability is
//! exactly what is needed.

use crate::fourvalues::{check, Outcome, Verdict};
use crate::sets::{DistanceSet, SetTraits};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassVerdict {
    /// A homogeneous, separable, complete space with exactly this distance
    /// set exists (and embeds every separable space over it).
    UrysohnAdmissible,
    /// Only the countable universal space exists; its completion overshoots
    /// the set.
    CountableUniversalOnly,
    /// No universal space has this distance set.
    Inadmissible,
    /// The four-values decision was not exact; no definitive verdict.
    Unknown,
}

impl ClassVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassVerdict::UrysohnAdmissible => "UrysohnAdmissible",
            ClassVerdict::CountableUniversalOnly => "CountableUniversalOnly",
            ClassVerdict::Inadmissible => "Inadmissible",
            ClassVerdict::Unknown => "Unknown",
        }
    }
}

/// The verdict with everything it was derived from.
#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: ClassVerdict,
    pub fourvalues: Verdict,
    pub traits: SetTraits,
    pub because: String,
}

/// Classifies the set per the admissibility table.
pub fn classify(set: &DistanceSet) -> Classification {
    let fourvalues = check(set);
    let traits = set.traits();
    let (verdict, because) = match fourvalues.outcome {
        Outcome::Fails => (
            ClassVerdict::Inadmissible,
            "the four-values condition fails".to_string(),
        ),
        Outcome::Unknown => (
            ClassVerdict::Unknown,
            "the four-values decision was not exact for this representation".to_string(),
        ),
        Outcome::Holds => {
            if traits.zero_limit {
                if traits.closed {
                    (
                        ClassVerdict::UrysohnAdmissible,
                        "four-values holds, 0 is a limit, and the set is closed".to_string(),
                    )
                } else if traits.countable {
                    (
                        ClassVerdict::CountableUniversalOnly,
                        "four-values holds with 0 as a limit, but the set is countable and not \
                         closed: the completion of the countable universal space acquires new \
                         distances"
                            .to_string(),
                    )
                } else {
                    (
                        ClassVerdict::Inadmissible,
                        "0 is a limit but the set is neither closed nor countable".to_string(),
                    )
                }
            } else if traits.countable {
                (
                    ClassVerdict::UrysohnAdmissible,
                    "four-values holds, 0 is isolated, and the set is countable: the countable \
                     universal space is already complete"
                        .to_string(),
                )
            } else {
                (
                    ClassVerdict::Inadmissible,
                    "an uncountable set without 0 as a limit cannot carry a separable space"
                        .to_string(),
                )
            }
        }
    };
    Classification {
        verdict,
        fourvalues,
        traits,
        because,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> Classification {
        classify(&DistanceSet::parse(s).unwrap())
    }

    #[test]
    fn interval_families_are_admissible() {
        assert_eq!(class("[0,1]").verdict, ClassVerdict::UrysohnAdmissible);
        assert_eq!(class("[0,inf)").verdict, ClassVerdict::UrysohnAdmissible);
    }

    #[test]
    fn finite_sets_are_admissible_when_four_values_holds() {
        assert_eq!(class("{0,1,2,3}").verdict, ClassVerdict::UrysohnAdmissible);
        assert_eq!(class("omega(9)").verdict, ClassVerdict::UrysohnAdmissible);
        // ... and inadmissible when it fails.
        assert_eq!(class("{0,1/2,1,2}").verdict, ClassVerdict::Inadmissible);
    }

    #[test]
    fn rationals_of_the_unit_interval_are_countable_only() {
        let c = class("rationals[0,1]");
        assert_eq!(c.verdict, ClassVerdict::CountableUniversalOnly);
        assert!(c.traits.countable && !c.traits.closed && c.traits.zero_limit);
    }

    #[test]
    fn detached_point_families() {
        assert_eq!(class("[0,1] u {2}").verdict, ClassVerdict::Inadmissible);
        assert_eq!(
            class("rationals[0,1) u {2}").verdict,
            ClassVerdict::CountableUniversalOnly
        );
    }

    #[test]
    fn open_sets_with_zero_limit_need_closure_or_countability() {
        // Uncountable, not closed, zero limit: nothing fits.
        assert_eq!(class("[0,1)").verdict, ClassVerdict::Inadmissible);
        // Countable sum closures without 0 as a limit are fine.
        assert_eq!(class("sumclosed(1; inf)").verdict, ClassVerdict::UrysohnAdmissible);
    }

    #[test]
    fn verdict_is_a_pure_function_of_the_reasons() {
        for expr in [
            "[0,1]",
            "[0,inf)",
            "{0,1,2,3}",
            "rationals[0,1]",
            "[0,1] u {2}",
            "[0,1] u [3,4] u [8,inf)",
            "sumclosed(1/2; 10)",
            "[0,1)",
        ] {
            let c = class(expr);
            let expect = match (
                c.fourvalues.outcome,
                c.traits.zero_limit,
                c.traits.closed,
                c.traits.countable,
            ) {
                (Outcome::Fails, _, _, _) => ClassVerdict::Inadmissible,
                (Outcome::Unknown, _, _, _) => ClassVerdict::Unknown,
                (Outcome::Holds, true, true, _) => ClassVerdict::UrysohnAdmissible,
                (Outcome::Holds, true, false, true) => ClassVerdict::CountableUniversalOnly,
                (Outcome::Holds, true, false, false) => ClassVerdict::Inadmissible,
                (Outcome::Holds, false, _, true) => ClassVerdict::UrysohnAdmissible,
                (Outcome::Holds, false, _, false) => ClassVerdict::Inadmissible,
            };
            assert_eq!(c.verdict, expect, "{expr}");
        }
    }
}
