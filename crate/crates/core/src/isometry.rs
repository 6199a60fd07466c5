//! Partial isometries and a brute-force embedding search.
//!
//! The backtracking search here is deliberately unclever: it is the oracle
//! that the builder and the age-comparison tests are checked against, so it
//! must be obviously correct rather than fast. A hard cap on the source size
//! keeps accidental blowups loud.

use crate::space::FiniteMetricSpace;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap on the source size of [`find_isometry`].
pub const DEFAULT_ISOMETRY_CAP: usize = 8;

/// An injective distance-preserving partial map between point indices of two
/// spaces. The spaces themselves are passed to the operations; the map alone
/// is stored so that values stay freely shareable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialIsometry {
    map: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsometryError {
    #[error("map is not injective: {0} and {1} share an image")]
    NotInjective(usize, usize),
    #[error("point index {0} out of range")]
    OutOfRange(usize),
    #[error("distances disagree on source pair ({0},{1})")]
    NotDistancePreserving(usize, usize),
    #[error("source has {size} points, exceeding the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

impl PartialIsometry {
    pub fn empty() -> PartialIsometry {
        PartialIsometry::default()
    }

    pub fn identity(points: impl IntoIterator<Item = usize>) -> PartialIsometry {
        PartialIsometry {
            map: points.into_iter().map(|p| (p, p)).collect(),
        }
    }

    /// Validates the pairs against the two spaces.
    pub fn new(
        source: &FiniteMetricSpace,
        target: &FiniteMetricSpace,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<PartialIsometry, IsometryError> {
        let mut map = BTreeMap::new();
        let mut used: BTreeMap<usize, usize> = BTreeMap::new();
        for (s, t) in pairs {
            if s >= source.len() || t >= target.len() {
                return Err(IsometryError::OutOfRange(s.max(t)));
            }
            if let Some(&prev) = used.get(&t) {
                if prev != s {
                    return Err(IsometryError::NotInjective(prev, s));
                }
            }
            used.insert(t, s);
            map.insert(s, t);
        }
        let f = PartialIsometry { map };
        f.check_preserving(source, target)?;
        Ok(f)
    }

    fn check_preserving(
        &self,
        source: &FiniteMetricSpace,
        target: &FiniteMetricSpace,
    ) -> Result<(), IsometryError> {
        let dom: Vec<usize> = self.map.keys().copied().collect();
        for (a, &i) in dom.iter().enumerate() {
            for &j in &dom[a + 1..] {
                if source.dist(i, j) != target.dist(self.map[&i], self.map[&j]) {
                    return Err(IsometryError::NotDistancePreserving(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, source_point: usize) -> Option<usize> {
        self.map.get(&source_point).copied()
    }

    pub fn dom(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn range(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.values().copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&s, &t)| (s, t))
    }

    pub fn insert(&mut self, source_point: usize, target_point: usize) {
        self.map.insert(source_point, target_point);
    }
}

/// Searches for a total injective distance-preserving map of `source` into
/// `target` extending `seed`. Returns `None` only after exhausting the whole
/// search space, so a `None` is a certificate of non-embeddability.
pub fn find_isometry(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    seed: &PartialIsometry,
    cap: usize,
) -> Result<Option<PartialIsometry>, IsometryError> {
    if source.len() > cap {
        return Err(IsometryError::CapExceeded {
            size: source.len(),
            cap,
        });
    }
    for (s, t) in seed.pairs() {
        if s >= source.len() {
            return Err(IsometryError::OutOfRange(s));
        }
        if t >= target.len() {
            return Err(IsometryError::OutOfRange(t));
        }
    }
    seed.check_preserving(source, target)?;
    let mut assigned: Vec<Option<usize>> = vec![None; source.len()];
    let mut used = vec![false; target.len()];
    for (s, t) in seed.pairs() {
        if used[t] {
            // Seed maps two source points to one target point.
            return Err(IsometryError::NotInjective(s, t));
        }
        assigned[s] = Some(t);
        used[t] = true;
    }
    let todo: Vec<usize> = (0..source.len()).filter(|&i| assigned[i].is_none()).collect();
    if search(source, target, &todo, 0, &mut assigned, &mut used) {
        let map = assigned
            .iter()
            .enumerate()
            .map(|(s, t)| (s, t.unwrap()))
            .collect();
        Ok(Some(PartialIsometry { map }))
    } else {
        Ok(None)
    }
}

fn search(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    todo: &[usize],
    depth: usize,
    assigned: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == todo.len() {
        return true;
    }
    let s = todo[depth];
    'cand: for t in 0..target.len() {
        if used[t] {
            continue;
        }
        for (i, a) in assigned.iter().enumerate() {
            if let Some(ti) = a {
                if source.dist(s, i) != target.dist(t, *ti) {
                    continue 'cand;
                }
            }
        }
        assigned[s] = Some(t);
        used[t] = true;
        if search(source, target, todo, depth + 1, assigned, used) {
            return true;
        }
        assigned[s] = None;
        used[t] = false;
    }
    false
}

/// Convenience wrapper using [`DEFAULT_ISOMETRY_CAP`].
pub fn embeds(source: &FiniteMetricSpace, target: &FiniteMetricSpace) -> bool {
    find_isometry(source, target, &PartialIsometry::empty(), DEFAULT_ISOMETRY_CAP)
        .map(|r| r.is_some())
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use crate::space::FiniteMetricSpace;

    fn triangle(a: i64, b: i64, c: i64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_upper_triangle(3, &[int(a), int(b), int(c)]).unwrap()
    }

    #[test]
    fn identity_extends() {
        let m = triangle(1, 1, 1);
        let seed = PartialIsometry::identity([0]);
        let f = find_isometry(&m, &m, &seed, 8).unwrap().unwrap();
        assert_eq!(f.get(0), Some(0));
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn different_scales_do_not_embed() {
        let a = triangle(1, 1, 1);
        let b = triangle(2, 2, 2);
        assert!(find_isometry(&a, &b, &PartialIsometry::empty(), 8)
            .unwrap()
            .is_none());
    }

    #[test]
    fn relabeled_triangle_is_found_and_matches_exhaustive_search() {
        // d(0,1)=1, d(0,2)=2, d(1,2)=3 versus its relabeling by the
        // permutation 0->2, 1->1, 2->0.
        let a = triangle(1, 2, 3);
        let b = triangle(3, 2, 1);
        let f = find_isometry(&a, &b, &PartialIsometry::empty(), 8)
            .unwrap()
            .unwrap();
        // Exhaustive 3! oracle: collect all distance-preserving bijections.
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let valid: Vec<[usize; 3]> = perms
            .into_iter()
            .filter(|p| {
                (0..3).all(|i| (i + 1..3).all(|j| a.dist(i, j) == b.dist(p[i], p[j])))
            })
            .collect();
        assert!(!valid.is_empty());
        let found = [f.get(0).unwrap(), f.get(1).unwrap(), f.get(2).unwrap()];
        assert!(valid.contains(&found));
    }

    #[test]
    fn cap_is_enforced() {
        let m = triangle(1, 1, 1);
        assert!(matches!(
            find_isometry(&m, &m, &PartialIsometry::empty(), 2),
            Err(IsometryError::CapExceeded { .. })
        ));
    }

    #[test]
    fn invalid_seed_is_rejected() {
        let a = triangle(1, 2, 3);
        let b = triangle(1, 2, 3);
        let bad = PartialIsometry::new(&a, &b, [(0, 0), (1, 2)]);
        assert!(matches!(bad, Err(IsometryError::NotDistancePreserving(_, _))));
    }
}
