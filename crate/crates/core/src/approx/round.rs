//! Rounding a space's distances into a dense subset while preserving
//! metricity.
//!
//! Values are split three ways: isolated points of the set stay fixed,
//! values with right accumulation are nudged up, and right-gapped
//! non-isolated values are nudged down. Offsets shrink by factors of three
//! along each list (up-offsets along increasing values, down-offsets along
//! decreasing values) and start below a third of the smallest positive
//! triangle slack, which makes every metric triple of input values map to a
//! metric triple.

use super::ApproxError;
use crate::rat::{Rat, XRat};
use crate::sets::DistanceSet;
use crate::space::{is_metric_triple, FiniteMetricSpace};
use std::collections::BTreeMap;

/// The computed rounding: the slack bound and the three value classes with
/// their images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingPlan {
    /// One third of the smallest positive triangle slack among the input
    /// values; infinite when no triple has positive slack.
    pub delta: XRat,
    /// Isolated values, mapped to themselves.
    pub fixed: Vec<Rat>,
    /// Right-accumulating values with their raised images.
    pub raised: Vec<(Rat, Rat)>,
    /// Right-gapped non-isolated values with their lowered images.
    pub lowered: Vec<(Rat, Rat)>,
    /// The full map, including 0 -> 0.
    pub map: BTreeMap<Rat, Rat>,
}

impl RoundingPlan {
    pub fn image(&self, v: &Rat) -> &Rat {
        &self.map[v]
    }
}

fn is_isolated(set: &DistanceSet, v: &Rat) -> bool {
    match set {
        DistanceSet::Finite(_) | DistanceSet::Omega(_) | DistanceSet::SumClosure { .. } => {
            set.contains(v)
        }
        DistanceSet::Intervals(_) | DistanceSet::Rationals(_) => {
            set.isolated_points().contains(v)
        }
    }
}

/// Picks an element of `dense` strictly inside the open window, validating
/// that it also belongs to `set`.
fn pick_open(
    dense: &DistanceSet,
    set: &DistanceSet,
    lo: &Rat,
    hi: &Rat,
    what: &str,
) -> Result<Rat, ApproxError> {
    let v = dense
        .pick_in(lo, false, &XRat::Finite(hi.clone()), false)
        .map_err(|_| {
            ApproxError::HypothesisViolated(format!(
                "no element of the dense subset in ({lo}, {hi}) while rounding {what}"
            ))
        })?;
    if !set.contains(&v) {
        return Err(ApproxError::HypothesisViolated(format!(
            "dense pick {v} is not in the base set"
        )));
    }
    Ok(v)
}

/// Rounds every distance of `a` into the dense subset, keeping the table
/// metric and every entry within `eps` of the original.
pub fn round_distances(
    a: &FiniteMetricSpace,
    set: &DistanceSet,
    dense: &DistanceSet,
    eps: &Rat,
) -> Result<(RoundingPlan, FiniteMetricSpace), ApproxError> {
    assert!(eps.is_positive());
    let dist_vals: Vec<Rat> = a
        .dist_set()
        .into_iter()
        .filter(|v| v.is_positive())
        .collect();
    for v in &dist_vals {
        if !set.contains(v) {
            return Err(ApproxError::PreconditionGap(format!(
                "distance {v} lies outside the set"
            )));
        }
    }

    // One third of the smallest positive triangle slack.
    let mut slack: Option<Rat> = None;
    for x in &dist_vals {
        for y in &dist_vals {
            for z in &dist_vals {
                let sum = x + y;
                if *z < sum {
                    let s = &sum - z;
                    slack = Some(match slack {
                        Some(cur) => cur.min(s),
                        None => s,
                    });
                }
            }
        }
    }
    let delta = match &slack {
        Some(s) => XRat::Finite(s / &Rat::from_int(3)),
        None => XRat::Infinity,
    };
    let first_bound = match &delta {
        XRat::Finite(d) => d.clone().min(eps.clone()),
        XRat::Infinity => eps.clone(),
    };

    let mut fixed = Vec::new();
    let mut raising = Vec::new(); // ascending
    let mut lowering = Vec::new(); // will sort descending
    for v in &dist_vals {
        if is_isolated(set, v) {
            fixed.push(v.clone());
        } else if set.right_gap_witness(v).is_none() {
            raising.push(v.clone());
        } else {
            lowering.push(v.clone());
        }
    }
    lowering.sort_by(|a, b| b.cmp(a));

    let mut map: BTreeMap<Rat, Rat> = BTreeMap::new();
    map.insert(Rat::zero(), Rat::zero());
    for v in &fixed {
        if !dense.contains(v) {
            return Err(ApproxError::HypothesisViolated(format!(
                "dense subset misses the isolated value {v}"
            )));
        }
        map.insert(v.clone(), v.clone());
    }
    let mut raised = Vec::new();
    let mut bound = first_bound.clone();
    for e in &raising {
        let img = pick_open(dense, set, e, &(e + &bound), "an accumulating value")?;
        let offset = &img - e;
        debug_assert!(offset.is_positive() && offset < bound);
        raised.push((e.clone(), img.clone()));
        map.insert(e.clone(), img);
        bound = &offset / &Rat::from_int(3);
    }
    let mut lowered = Vec::new();
    let mut bound = match raised.last() {
        Some((e, img)) => &(img - e) / &Rat::from_int(3),
        None => first_bound,
    };
    for k in &lowering {
        let img = pick_open(dense, set, &(k - &bound), k, "a right-gapped value")?;
        let offset = k - &img;
        debug_assert!(offset.is_positive() && offset < bound);
        lowered.push((k.clone(), img.clone()));
        map.insert(k.clone(), img);
        bound = &offset / &Rat::from_int(3);
    }

    // Exhaustive check: metric triples of input values map to metric
    // triples; this is asserted rather than trusted.
    let mut all_vals = dist_vals.clone();
    all_vals.push(Rat::zero());
    for x in &all_vals {
        for y in &all_vals {
            for z in &all_vals {
                if is_metric_triple(x, y, z) && !is_metric_triple(&map[x], &map[y], &map[z]) {
                    return Err(ApproxError::HypothesisViolated(format!(
                        "rounding broke the metric triple ({x},{y},{z})"
                    )));
                }
            }
        }
    }

    let n = a.len();
    let mut table = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                table[i][j] = map[a.dist(i, j)].clone();
            }
        }
    }
    let b = FiniteMetricSpace::from_table(&table).map_err(|e| {
        ApproxError::HypothesisViolated(format!("rounded table is not metric: {e}"))
    })?;
    for v in &dist_vals {
        let diff = (v - &map[v]).abs();
        assert!(diff < *eps, "entry perturbation {diff} reached eps");
    }
    Ok((
        RoundingPlan {
            delta,
            fixed,
            raised,
            lowered,
            map,
        },
        b,
    ))
}
