//! Constructive amalgamation of finite metric spaces over a distance set:
//! the feasible interval for a single cross pair, iterated one-point
//! amalgamation with canonical (or caller-supplied) choices, and a
//! brute-force enumeration oracle.

use crate::rat::{Rat, XRat};
use crate::sets::DistanceSet;
use crate::space::FiniteMetricSpace;
use thiserror::Error;

/// The exact closed interval of feasible distances between the two new
/// points when amalgamating two triangles over a shared edge, with
/// `a, b` the distances from the first new point to the shared pair and
/// `d, c` the distances from the second new point to the same pair (in that
/// order): `[max(|a-d|, |b-c|), min(a+d, b+c)]`.
pub fn feasible_interval(a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> (Rat, Rat) {
    let u = (a - d).abs().max((b - c).abs());
    let l = (a + d).min(b + c);
    (u, l)
}

/// An identification of some points of the first space with points of the
/// second, validated to be a partial bijection on which the two distance
/// tables agree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SharedMap {
    pairs: Vec<(usize, usize)>,
}

impl SharedMap {
    pub fn empty() -> SharedMap {
        SharedMap::default()
    }

    pub fn new(
        a: &FiniteMetricSpace,
        b: &FiniteMetricSpace,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<SharedMap, AmalgamError> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        for &(i, j) in &pairs {
            if i >= a.len() || j >= b.len() {
                return Err(AmalgamError::OutOfRange { a_point: i, b_point: j });
            }
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            for &(i2, j2) in &pairs[k + 1..] {
                if i == i2 || j == j2 {
                    return Err(AmalgamError::NotBijective { a_point: i2, b_point: j2 });
                }
                if a.dist(i, i2) != b.dist(j, j2) {
                    return Err(AmalgamError::SharedMismatch {
                        a_pair: (i, i2),
                        b_pair: (j, j2),
                    });
                }
            }
        }
        Ok(SharedMap { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn image_of(&self, a_point: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(i, _)| i == a_point).map(|&(_, j)| j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("shared map point out of range: ({a_point},{b_point})")]
    OutOfRange { a_point: usize, b_point: usize },
    #[error("shared map is not a partial bijection at ({a_point},{b_point})")]
    NotBijective { a_point: usize, b_point: usize },
    #[error("shared parts disagree: d_A{a_pair:?} != d_B{b_pair:?}")]
    SharedMismatch {
        a_pair: (usize, usize),
        b_pair: (usize, usize),
    },
    #[error("distance {value} of the {side} space is not in the distance set")]
    DistanceOutsideSet { side: &'static str, value: Rat },
    #[error("expected exactly one point outside the shared part, found {found}")]
    NotOnePoint { found: usize },
    #[error(
        "no admissible distance for the pair (A:{a_point}, C:{c_point}): the set misses [{lo}, {hi}]"
    )]
    EmptyChoiceInterval {
        a_point: usize,
        c_point: usize,
        lo: Rat,
        hi: XRat,
    },
    #[error("{pairs} cross pairs exceed the enumeration cap {cap}")]
    CapExceeded { pairs: usize, cap: usize },
}

/// One chosen cross distance, with the interval it was picked from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceRecord {
    /// Point of the first space being attached.
    pub a_point: usize,
    /// Index in the result space of the partner point.
    pub c_point: usize,
    /// Feasible interval over all already-placed points.
    pub lo: Rat,
    pub hi: XRat,
    pub picked: Rat,
    /// True when 0 lay in the interval, i.e. the two points had identical
    /// distance profiles at choice time and could have been identified.
    pub identifiable: bool,
}

/// A completed amalgam: the joint space, the two embeddings, and the chosen
/// cross distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamResult {
    pub space: FiniteMetricSpace,
    /// A-point index -> result index.
    pub a_map: Vec<usize>,
    /// B-point index -> result index.
    pub b_map: Vec<usize>,
    pub choices: Vec<ChoiceRecord>,
}

impl AmalgamResult {
    /// True when some choice could have identified two points.
    pub fn identifiable(&self) -> bool {
        self.choices.iter().any(|c| c.identifiable)
    }
}

fn check_distances_in_set(
    space: &FiniteMetricSpace,
    set: &DistanceSet,
    side: &'static str,
) -> Result<(), AmalgamError> {
    for v in space.dist_set() {
        if !set.contains(&v) {
            return Err(AmalgamError::DistanceOutsideSet { side, value: v });
        }
    }
    Ok(())
}

/// Glues `a` onto `b` over the shared part, attaching the points of
/// `a` outside the shared part one at a time in ascending index order. Each
/// unknown cross distance is chosen canonically (minimal element or minimal
/// denominator, never 0) from the set's intersection with the feasible
/// interval computed over all already-placed points.
///
/// Succeeds for every instance whose distances lie in a set satisfying the
/// four-values condition; an `EmptyChoiceInterval` error therefore signals a
/// precondition breach.
pub fn amalgamate(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    shared: &SharedMap,
    set: &DistanceSet,
) -> Result<AmalgamResult, AmalgamError> {
    amalgamate_with_picker(a, b, shared, set, &mut |_, _| None)
}

/// As [`amalgamate`], but requires exactly one point of `a` outside the
/// shared part.
pub fn amalgamate_point(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    shared: &SharedMap,
    set: &DistanceSet,
) -> Result<AmalgamResult, AmalgamError> {
    let outside = a.len() - shared.len();
    if outside != 1 {
        return Err(AmalgamError::NotOnePoint { found: outside });
    }
    amalgamate(a, b, shared, set)
}

/// Amalgamation with a caller-supplied distance picker. For each unknown
/// pair the picker sees the feasible interval and may return any nonzero
/// element of the set inside it; returning `None` falls back to the
/// canonical choice. Used by the builder to vary constructions by seed.
pub fn amalgamate_with_picker(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    shared: &SharedMap,
    set: &DistanceSet,
    picker: &mut dyn FnMut(&Rat, &XRat) -> Option<Rat>,
) -> Result<AmalgamResult, AmalgamError> {
    // Re-validate the shared map against these spaces.
    let shared = SharedMap::new(a, b, shared.pairs.iter().copied())?;
    check_distances_in_set(a, set, "first")?;
    check_distances_in_set(b, set, "second")?;

    let mut a_map: Vec<Option<usize>> = vec![None; a.len()];
    for &(i, j) in shared.pairs() {
        a_map[i] = Some(j);
    }
    let b_map: Vec<usize> = (0..b.len()).collect();

    // The growing result table, seeded with B. rows[i][j] for j <= i.
    let mut n = b.len();
    let mut table: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| b.dist(i, j).clone()).collect())
        .collect();
    // For each result point, the A-point it realizes (if any).
    let mut a_origin: Vec<Option<usize>> = vec![None; n];
    for &(i, j) in shared.pairs() {
        a_origin[j] = Some(i);
    }

    let mut choices = Vec::new();
    for p in 0..a.len() {
        if a_map[p].is_some() {
            continue;
        }
        let new_idx = n;
        // Distances from the new point to every existing point; known where
        // the existing point realizes an A-point, chosen otherwise.
        let mut dists: Vec<Option<Rat>> = (0..n)
            .map(|q| a_origin[q].map(|ap| a.dist(p, ap).clone()))
            .collect();
        for q in 0..n {
            if dists[q].is_some() {
                continue;
            }
            let mut lo = Rat::zero();
            let mut hi = XRat::Infinity;
            for (v, dv) in dists.iter().enumerate() {
                if v == q {
                    continue;
                }
                if let Some(dpv) = dv {
                    let dqv = &table[q.max(v)][q.min(v)];
                    lo = lo.max((dpv - dqv).abs());
                    let sum = dpv + dqv;
                    if XRat::Finite(sum.clone()) < hi {
                        hi = XRat::Finite(sum);
                    }
                }
            }
            let identifiable = lo.is_zero();
            let picked = match picker(&lo, &hi) {
                Some(v) => {
                    debug_assert!(v.is_positive() && set.contains(&v));
                    v
                }
                None => {
                    let cand = set
                        .pick_in(&lo, true, &hi, true)
                        .map_err(|_| AmalgamError::EmptyChoiceInterval {
                            a_point: p,
                            c_point: q,
                            lo: lo.clone(),
                            hi: hi.clone(),
                        })?;
                    if cand.is_zero() {
                        // 0 would identify the points; take the canonical
                        // nonzero element instead.
                        set.pick_in(&lo, false, &hi, true).map_err(|_| {
                            AmalgamError::EmptyChoiceInterval {
                                a_point: p,
                                c_point: q,
                                lo: lo.clone(),
                                hi: hi.clone(),
                            }
                        })?
                    } else {
                        cand
                    }
                }
            };
            choices.push(ChoiceRecord {
                a_point: p,
                c_point: q,
                lo,
                hi,
                picked: picked.clone(),
                identifiable,
            });
            dists[q] = Some(picked);
        }
        // Commit the new row.
        let row: Vec<Rat> = dists.into_iter().map(Option::unwrap).collect();
        for (q, v) in row.iter().enumerate() {
            table[q].push(v.clone());
        }
        let mut full_row = row;
        full_row.push(Rat::zero());
        table.push(full_row);
        a_map[p] = Some(new_idx);
        a_origin.push(Some(p));
        n += 1;
    }

    let space = FiniteMetricSpace::from_table(&table)
        .expect("interval choices keep the amalgam metric");
    Ok(AmalgamResult {
        space,
        a_map: a_map.into_iter().map(Option::unwrap).collect(),
        b_map,
        choices,
    })
}

/// Default cap on the number of unknown cross pairs in the enumeration
/// oracle.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// Brute-force oracle: every metric completion of the instance whose cross
/// distances are drawn from the given finite list of positive values.
pub fn enumerate_amalgams(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    shared: &SharedMap,
    values: &[Rat],
    cap: usize,
) -> Result<Vec<AmalgamResult>, AmalgamError> {
    let shared = SharedMap::new(a, b, shared.pairs.iter().copied())?;
    let a_outside: Vec<usize> = (0..a.len())
        .filter(|&i| shared.image_of(i).is_none())
        .collect();
    let b_shared: Vec<bool> = {
        let mut used = vec![false; b.len()];
        for &(_, j) in shared.pairs() {
            used[j] = true;
        }
        used
    };
    let b_outside: Vec<usize> = (0..b.len()).filter(|&j| !b_shared[j]).collect();
    let pairs: Vec<(usize, usize)> = a_outside
        .iter()
        .flat_map(|&p| b_outside.iter().map(move |&q| (p, q)))
        .collect();
    if pairs.len() > cap {
        return Err(AmalgamError::CapExceeded {
            pairs: pairs.len(),
            cap,
        });
    }
    let candidates: Vec<Rat> = values.iter().filter(|v| v.is_positive()).cloned().collect();

    // Result index layout: B first, then A-outside in ascending order.
    let a_map: Vec<usize> = (0..a.len())
        .map(|i| match shared.image_of(i) {
            Some(j) => j,
            None => b.len() + a_outside.iter().position(|&p| p == i).unwrap(),
        })
        .collect();
    let b_map: Vec<usize> = (0..b.len()).collect();
    let n = b.len() + a_outside.len();

    let mut base = vec![vec![Rat::zero(); n]; n];
    for i in 0..b.len() {
        for j in 0..b.len() {
            base[i][j] = b.dist(i, j).clone();
        }
    }
    for (ai, &ci) in a_map.iter().enumerate() {
        for (aj, &cj) in a_map.iter().enumerate() {
            base[ci][cj] = a.dist(ai, aj).clone();
        }
    }

    let mut results = Vec::new();
    let mut assignment = vec![0usize; pairs.len()];
    if pairs.is_empty() {
        if let Ok(space) = FiniteMetricSpace::from_table(&base) {
            results.push(AmalgamResult {
                space,
                a_map,
                b_map,
                choices: Vec::new(),
            });
        }
        return Ok(results);
    }
    if candidates.is_empty() {
        return Ok(results);
    }
    loop {
        let mut table = base.clone();
        for (k, &(p, q)) in pairs.iter().enumerate() {
            let v = candidates[assignment[k]].clone();
            let (ci, cj) = (a_map[p], q);
            table[ci][cj] = v.clone();
            table[cj][ci] = v;
        }
        if let Ok(space) = FiniteMetricSpace::from_table(&table) {
            let choices = pairs
                .iter()
                .zip(&assignment)
                .map(|(&(p, q), &k)| ChoiceRecord {
                    a_point: p,
                    c_point: q,
                    lo: candidates[k].clone(),
                    hi: XRat::Finite(candidates[k].clone()),
                    picked: candidates[k].clone(),
                    identifiable: false,
                })
                .collect();
            results.push(AmalgamResult {
                space,
                a_map: a_map.clone(),
                b_map: b_map.clone(),
                choices,
            });
        }
        // Advance the odometer.
        let mut k = 0;
        loop {
            assignment[k] += 1;
            if assignment[k] < candidates.len() {
                break;
            }
            assignment[k] = 0;
            k += 1;
            if k == pairs.len() {
                return Ok(results);
            }
        }
    }
}
