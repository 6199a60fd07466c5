//! The expected-verdict catalog: named distance sets with their four-values
//! and classification expectations, checked against the deciders.

use urysohn::approx::{classify, ClassVerdict};
use urysohn::fourvalues::{check, Outcome};
use urysohn::sets::DistanceSet;

pub struct Fixture {
    pub name: &'static str,
    pub expr: &'static str,
    pub expect_fourvalues: Outcome,
    pub expect_verdict: ClassVerdict,
    pub note: Option<&'static str>,
}

const DYADIC: &str = "{0} u [1/2,255/16] u [1/8,255/64] u [1/32,255/256] u [1/128,255/1024] u [1/512,255/4096] u [1/2048,255/16384]";

pub fn catalog() -> Vec<Fixture> {
    use ClassVerdict::*;
    use Outcome::*;
    vec![
        Fixture {
            name: "omega-12",
            expr: "omega(12)",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "unit-interval",
            expr: "[0,1]",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "nonneg-ray",
            expr: "[0,inf)",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "unit-with-detached-point",
            expr: "[0,1] u {2}",
            expect_fourvalues: Fails,
            expect_verdict: Inadmissible,
            note: None,
        },
        Fixture {
            name: "rationals-below-one-with-two",
            expr: "rationals[0,1) u {2}",
            expect_fourvalues: Holds,
            expect_verdict: CountableUniversalOnly,
            note: None,
        },
        Fixture {
            name: "rationals-unit-interval",
            expr: "rationals[0,1]",
            expect_fourvalues: Holds,
            expect_verdict: CountableUniversalOnly,
            note: None,
        },
        Fixture {
            name: "dyadic-window-truncation",
            expr: DYADIC,
            expect_fourvalues: Holds,
            // The truncation loses 0 as a limit while staying uncountable.
            expect_verdict: Inadmissible,
            note: Some("truncating the window family isolates 0"),
        },
        Fixture {
            name: "three-gap-ray-9",
            expr: "[0,1] u [3,4] u [9,inf)",
            expect_fourvalues: Fails,
            expect_verdict: Inadmissible,
            note: Some("documented deviation from the stated table; see README"),
        },
        Fixture {
            name: "three-gap-ray-8-open",
            expr: "[0,1] u [3,4] u (8,inf)",
            expect_fourvalues: Fails,
            expect_verdict: Inadmissible,
            note: Some("documented deviation from the stated table; see README"),
        },
        Fixture {
            name: "three-gap-ray-8",
            expr: "[0,1] u [3,4] u [8,inf)",
            expect_fourvalues: Fails,
            expect_verdict: Inadmissible,
            note: None,
        },
        Fixture {
            name: "sum-closed-integers",
            expr: "sumclosed(1; inf)",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "sum-closed-window",
            expr: "sumclosed(1/3,1/2; 2)",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "failing-four-point",
            expr: "{0,1/2,1,2}",
            expect_fourvalues: Fails,
            expect_verdict: Inadmissible,
            note: None,
        },
        Fixture {
            name: "scaled-omega-sevenths",
            expr: "{0, 1/7, 2/7, 3/7, 4/7, 5/7}",
            expect_fourvalues: Holds,
            expect_verdict: UrysohnAdmissible,
            note: None,
        },
        Fixture {
            name: "half-open-unit",
            expr: "[0,1)",
            expect_fourvalues: Holds,
            expect_verdict: Inadmissible,
            note: Some("uncountable but not closed"),
        },
    ]
}

pub fn check_fixture(f: &Fixture) -> (Outcome, ClassVerdict, bool) {
    let set = DistanceSet::parse(f.expr).expect("catalog expressions parse");
    let c = classify(&set);
    let fv = check(&set);
    let pass = fv.outcome == f.expect_fourvalues && c.verdict == f.expect_verdict;
    (fv.outcome, c.verdict, pass)
}

/// Runs the (filtered) catalog; returns report lines and overall pass.
pub fn run_catalog(filter: &str) -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    let mut total = 0u32;
    let mut passed = 0u32;
    for f in catalog() {
        if !f.name.contains(filter) {
            continue;
        }
        total += 1;
        let (got_fv, got_verdict, pass) = check_fixture(&f);
        if pass {
            passed += 1;
        }
        let mut line = format!(
            "fixture={} expect4v={} got4v={} expectverdict={} gotverdict={} status={}",
            f.name,
            f.expect_fourvalues.as_str(),
            got_fv.as_str(),
            f.expect_verdict.as_str(),
            got_verdict.as_str(),
            if pass { "pass" } else { "fail" }
        );
        if let Some(note) = f.note {
            line.push_str(&format!(" note={note}"));
        }
        lines.push(line);
    }
    lines.push(format!(
        "fixtures=total:{total} pass:{passed} fail:{}",
        total - passed
    ));
    (lines, passed == total)
}
