//! Approximation machinery over a distance set: perturbation thresholds and
//! joins of nearby spaces, rounding of distance tables into dense subsets,
//! approximate-embedding tests against the completion, and the admissibility
//! classifier.

pub mod classify;
pub mod embed;
pub mod round;

pub use classify::{classify, ClassVerdict, Classification};
pub use embed::{approx_embedding, EmbeddingOutcome, ImpossibilityCert, WitnessSpace};
pub use round::{round_distances, RoundingPlan};

use crate::amalgam::{amalgamate, AmalgamError, SharedMap};
use crate::rat::{Rat, XRat};
use crate::sets::DistanceSet;
use crate::space::FiniteMetricSpace;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("the set has no element in (0, {threshold})")]
    NoSmallElement { threshold: Rat },
    #[error("precondition violated: {0}")]
    PreconditionGap(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
}

/// A descending tolerance chain inside the set: `links[0] < links[1] < ...`,
/// each link more than twice the previous, topped strictly below both the
/// join bound and the minimum-distance floor. `links[0]` is the perturbation
/// threshold guaranteeing joins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaChain {
    pub links: Vec<Rat>,
}

impl GammaChain {
    pub fn gamma(&self) -> &Rat {
        &self.links[0]
    }

    /// Re-checks the chain invariants against a set and bounds.
    pub fn validate(&self, set: &DistanceSet, m: usize, r: &Rat, h: &Rat) -> Result<(), String> {
        if self.links.len() != m {
            return Err(format!("chain length {} != {m}", self.links.len()));
        }
        let bound = h.clone().min(r.clone());
        let top = self.links.last().unwrap();
        if !(top < &bound) {
            return Err(format!("top link {top} not below min(h,r)={bound}"));
        }
        for w in self.links.windows(2) {
            if !(&(&w[0] + &w[0]) < &w[1]) {
                return Err(format!("link {} not less than half of {}", w[0], w[1]));
            }
        }
        for l in &self.links {
            if !l.is_positive() || !set.contains(l) {
                return Err(format!("link {l} not a positive element of the set"));
            }
        }
        Ok(())
    }
}

/// Picks a positive set element strictly below `bound`, preferring `bound/2`.
fn below(set: &DistanceSet, bound: &Rat) -> Result<Rat, ApproxError> {
    let half = bound / &Rat::from_int(2);
    if set.contains(&half) {
        return Ok(half);
    }
    set.pick_in(&Rat::zero(), false, &XRat::Finite(bound.clone()), false)
        .map_err(|_| ApproxError::NoSmallElement {
            threshold: bound.clone(),
        })
}

/// Picks a positive set element strictly below half of `x`, preferring `x/3`.
fn halve(set: &DistanceSet, x: &Rat) -> Result<Rat, ApproxError> {
    let third = x / &Rat::from_int(3);
    if set.contains(&third) {
        return Ok(third);
    }
    let half = x / &Rat::from_int(2);
    set.pick_in(&Rat::zero(), false, &XRat::Finite(half.clone()), false)
        .map_err(|_| ApproxError::NoSmallElement { threshold: half })
}

/// The perturbation threshold for joining two m-point spaces within `h` at
/// minimum distance `r`: builds the chain `links[m-1] < min(h,r)`,
/// `2 links[i] < links[i+1]`, all inside the set, and returns it.
pub fn gamma(set: &DistanceSet, m: usize, r: &Rat, h: &Rat) -> Result<GammaChain, ApproxError> {
    assert!(m >= 1, "gamma needs at least one point");
    assert!(r.is_positive() && h.is_positive());
    let bound = h.clone().min(r.clone());
    let mut links = vec![below(set, &bound)?];
    for _ in 1..m {
        let next = halve(set, links.last().unwrap())?;
        links.push(next);
    }
    links.reverse();
    Ok(GammaChain { links })
}

/// Audit row for one level of the join induction: the prefix pair bound `l`,
/// the perturbation bound `k`, the level distance, and the smallest distance
/// in the new point's rows. `l + k <= level <= row_min` at every level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTraceRow {
    pub level: usize,
    pub prefix_bound: Rat,
    pub perturbation_bound: Rat,
    pub level_distance: Rat,
    pub row_min: Rat,
}

/// A join of two equinumerous spaces: paired points sit strictly within the
/// requested bound.
#[derive(Debug, Clone)]
pub struct JoinResult {
    pub space: FiniteMetricSpace,
    pub a_map: Vec<usize>,
    pub b_map: Vec<usize>,
    pub chain: GammaChain,
    pub trace: Vec<JoinTraceRow>,
}

/// Joins two m-point spaces whose tables differ entrywise by less than the
/// chain threshold, producing a space over the set in which the i-th pair is
/// at distance `chain.links[i] < h`.
///
/// `pairing[i]` is the point of `b` paired with point `i` of `a`; all
/// distances of both spaces must lie in the set and be at least `r`.
pub fn h_join(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    pairing: &[usize],
    h: &Rat,
    r: &Rat,
    set: &DistanceSet,
) -> Result<JoinResult, ApproxError> {
    let m = a.len();
    if b.len() != m || m == 0 {
        return Err(ApproxError::PreconditionGap(format!(
            "spaces must be equinumerous and nonempty: {m} vs {}",
            b.len()
        )));
    }
    {
        let mut seen = vec![false; m];
        for &j in pairing {
            if j >= m || seen[j] {
                return Err(ApproxError::PreconditionGap(
                    "pairing must be a bijection".to_string(),
                ));
            }
            seen[j] = true;
        }
        if pairing.len() != m {
            return Err(ApproxError::PreconditionGap(
                "pairing must cover every point".to_string(),
            ));
        }
    }
    for (space, name) in [(a, "first"), (b, "second")] {
        for i in 0..m {
            for j in (i + 1)..m {
                let d = space.dist(i, j);
                if d < r {
                    return Err(ApproxError::PreconditionGap(format!(
                        "{name} space has distance {d} below the floor {r}"
                    )));
                }
                if !set.contains(d) {
                    return Err(ApproxError::PreconditionGap(format!(
                        "{name} space has distance {d} outside the set"
                    )));
                }
            }
        }
    }
    let chain = gamma(set, m, r, h)?;
    let g = chain.gamma();
    for i in 0..m {
        for j in (i + 1)..m {
            let gap = (a.dist(i, j) - b.dist(pairing[i], pairing[j])).abs();
            if !(&gap < g) {
                return Err(ApproxError::PreconditionGap(format!(
                    "entrywise perturbation {gap} at pair ({i},{j}) is not below gamma={g}"
                )));
            }
        }
    }

    // Work with b reordered so the pairing is by index.
    let b_seq: Vec<usize> = pairing.to_vec();
    let b_ord = b.restrict(&b_seq);

    // Joint space; indices: a-points and b-points interleaved by
    // construction order. Track where each lives.
    let mut a_idx: Vec<usize> = vec![0; m];
    let mut b_idx: Vec<usize> = vec![0; m];
    let mut joint = FiniteMetricSpace::from_table(&[
        vec![Rat::zero(), chain.links[0].clone()],
        vec![chain.links[0].clone(), Rat::zero()],
    ])
    .expect("a positive edge is metric");
    a_idx[0] = 0;
    b_idx[0] = 1;
    let mut trace = Vec::new();

    for i in 1..m {
        // Attach a_i: its distances to earlier a-points come from a; the
        // crossings to earlier b-points are chosen canonically.
        let a_pref = a.restrict(&(0..=i).collect::<Vec<_>>());
        let shared = SharedMap::new(
            &a_pref,
            &joint,
            (0..i).map(|j| (j, a_idx[j])),
        )?;
        let res = amalgamate(&a_pref, &joint, &shared, set)?;
        a_idx[i] = res.a_map[i];
        joint = res.space;

        // Attach b_i through an extended prefix carrying the pinned pair
        // distance to a_i.
        let bp = i + 1; // index of the virtual a_i point in the extended prefix
        let mut table = vec![vec![Rat::zero(); i + 2]; i + 2];
        for x in 0..=i {
            for y in 0..=i {
                table[x][y] = b_ord.dist(x, y).clone();
            }
        }
        for x in 0..i {
            let v = joint.dist(a_idx[i], b_idx[x]).clone();
            table[x][bp] = v.clone();
            table[bp][x] = v;
        }
        table[i][bp] = chain.links[i].clone();
        table[bp][i] = chain.links[i].clone();
        let b_pref = FiniteMetricSpace::from_table(&table).map_err(|e| {
            ApproxError::HypothesisViolated(format!(
                "pinned pair distance breaks the prefix: {e}"
            ))
        })?;
        let shared = SharedMap::new(
            &b_pref,
            &joint,
            (0..i)
                .map(|j| (j, b_idx[j]))
                .chain(std::iter::once((bp, a_idx[i]))),
        )?;
        let res = amalgamate(&b_pref, &joint, &shared, set)?;
        b_idx[i] = res.a_map[i];
        joint = res.space;

        // Audit the induction bounds at this level.
        let mut row_min: Option<Rat> = None;
        for j in 0..i {
            for d in [a.dist(i, j), b_ord.dist(i, j)] {
                row_min = Some(match row_min {
                    Some(mm) => mm.min(d.clone()),
                    None => d.clone(),
                });
            }
        }
        let row_min = row_min.unwrap();
        let row = JoinTraceRow {
            level: i,
            prefix_bound: chain.links[i - 1].clone(),
            perturbation_bound: chain.links[0].clone(),
            level_distance: chain.links[i].clone(),
            row_min: row_min.clone(),
        };
        assert!(
            &(&row.prefix_bound + &row.perturbation_bound) <= &row.level_distance
                && row.level_distance <= row_min,
            "join induction bound failed at level {i}"
        );
        trace.push(row);
    }

    // Strict pair bound.
    for i in 0..m {
        assert!(joint.dist(a_idx[i], b_idx[i]) < h, "pair {i} not within {h}");
    }
    let b_map: Vec<usize> = {
        // b_idx is indexed by position in the pairing order; invert back to
        // b's own indices.
        let mut map = vec![0; m];
        for (pos, &orig) in b_seq.iter().enumerate() {
            map[orig] = b_idx[pos];
        }
        map
    };
    Ok(JoinResult {
        space: joint,
        a_map: a_idx,
        b_map,
        chain,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn set(s: &str) -> DistanceSet {
        DistanceSet::parse(s).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let chain = gamma(&set("[0,1]"), 2, &rat(1, 2), &rat(1, 4)).unwrap();
        assert_eq!(chain.links, vec![rat(1, 24), rat(1, 8)]);
        assert_eq!(chain.gamma(), &rat(1, 24));
        chain
            .validate(&set("[0,1]"), 2, &rat(1, 2), &rat(1, 4))
            .unwrap();

        // Chain of length one: just the top pick.
        let chain = gamma(&set("[0,1]"), 1, &rat(1, 2), &rat(1, 4)).unwrap();
        assert_eq!(chain.links, vec![rat(1, 8)]);

        // No positive element below the threshold.
        assert!(matches!(
            gamma(&set("{0,1,2}"), 2, &int(1), &rat(1, 2)),
            Err(ApproxError::NoSmallElement { .. })
        ));
    }

    #[test]
    fn gamma_prefers_thirds_when_halving() {
        // Over the rationals of [0,1] the halving rule lands exactly on x/3.
        let chain = gamma(&set("rationals[0,1]"), 3, &int(1), &rat(1, 2)).unwrap();
        assert_eq!(chain.links, vec![rat(1, 36), rat(1, 12), rat(1, 4)]);
    }

    #[test]
    fn joining_two_points() {
        let a = FiniteMetricSpace::point();
        let b = FiniteMetricSpace::point();
        let r = h_join(&a, &b, &[0], &rat(1, 4), &int(1), &set("[0,1]")).unwrap();
        assert_eq!(r.space.len(), 2);
        assert!(r.space.dist(0, 1) < &rat(1, 4));
    }

    #[test]
    fn joining_two_edges() {
        let a = FiniteMetricSpace::edge(int(1));
        let b = FiniteMetricSpace::edge(int(1));
        let r = h_join(&a, &b, &[0, 1], &rat(1, 4), &rat(1, 2), &set("[0,1]")).unwrap();
        assert_eq!(r.space.len(), 4);
        // Pair distances follow the chain; crossings stay near 1.
        assert_eq!(r.space.dist(r.a_map[0], r.b_map[0]), &rat(1, 24));
        assert_eq!(r.space.dist(r.a_map[1], r.b_map[1]), &rat(1, 8));
        assert_eq!(r.space.dist(r.a_map[0], r.b_map[1]), &int(1));
        assert!(r.space.dist(r.a_map[0], r.b_map[0]) < &rat(1, 4));
        // Originals embed unchanged.
        assert_eq!(r.space.restrict(&r.a_map), a);
        assert_eq!(r.space.restrict(&r.b_map), b);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn joining_perturbed_edges() {
        // The second edge differs by gamma/2 and still joins within h.
        let rset = set("[0,1]");
        let chain = gamma(&rset, 2, &rat(1, 2), &rat(1, 4)).unwrap();
        let half_gamma = chain.gamma() / &int(2);
        let a = FiniteMetricSpace::edge(int(1));
        let b = FiniteMetricSpace::edge(&int(1) - &half_gamma);
        let r = h_join(&a, &b, &[0, 1], &rat(1, 4), &rat(1, 2), &rset).unwrap();
        for i in 0..2 {
            assert!(r.space.dist(r.a_map[i], r.b_map[i]) < &rat(1, 4));
        }
        for v in r.space.dist_set() {
            assert!(rset.contains(&v));
        }
    }

    #[test]
    fn join_rejects_oversized_perturbations() {
        let a = FiniteMetricSpace::edge(int(1));
        let b = FiniteMetricSpace::edge(rat(3, 4));
        let err = h_join(&a, &b, &[0, 1], &rat(1, 4), &rat(1, 2), &set("[0,1]")).unwrap_err();
        assert!(matches!(err, ApproxError::PreconditionGap(_)));
    }

    #[test]
    fn join_respects_nontrivial_pairings() {
        // Pair a's points with b's in reverse order.
        let a = FiniteMetricSpace::from_upper_triangle(2, &[int(1)]).unwrap();
        let b = FiniteMetricSpace::from_upper_triangle(2, &[int(1)]).unwrap();
        let r = h_join(&a, &b, &[1, 0], &rat(1, 4), &rat(1, 2), &set("[0,1]")).unwrap();
        assert!(r.space.dist(r.a_map[0], r.b_map[1]) < &rat(1, 4));
        assert!(r.space.dist(r.a_map[1], r.b_map[0]) < &rat(1, 4));
    }
}
