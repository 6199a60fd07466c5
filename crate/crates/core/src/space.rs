//! Finite metric spaces over exact rationals, type functions, and the
//! plain-text space file format.

use crate::rat::Rat;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Returns true iff the three nonnegative values can be the side lengths of a
/// (possibly degenerate) triangle: `|a-b| <= c <= a+b`.
///
/// Negative input is a caller bug and is rejected by assertion.
pub fn is_metric_triple(a: &Rat, b: &Rat, c: &Rat) -> bool {
    assert!(
        !a.is_negative() && !b.is_negative() && !c.is_negative(),
        "is_metric_triple: negative input"
    );
    let diff = (a - b).abs();
    let sum = a + b;
    diff <= *c && *c <= sum
}

/// A single invariant violation found while validating a distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    NegativeDistance { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    ZeroOffDiagonal { i: usize, j: usize },
    Asymmetry { i: usize, j: usize },
    TriangleViolation { i: usize, j: usize, k: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => {
                write!(f, "table is not square: {rows} rows, row of width {cols}")
            }
            Violation::NegativeDistance { i, j } => write!(f, "d({i},{j}) is negative"),
            Violation::NonzeroDiagonal { i } => write!(f, "d({i},{i}) is nonzero"),
            Violation::ZeroOffDiagonal { i, j } => write!(f, "d({i},{j}) is zero for {i} != {j}"),
            Violation::Asymmetry { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            Violation::TriangleViolation { i, j, k } => {
                write!(f, "triangle inequality fails on points ({i},{j},{k})")
            }
        }
    }
}

/// Validation failure carrying every violation found, not just the first.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SpaceError {
    pub violations: Vec<Violation>,
}

impl std::fmt::Display for SpaceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid metric space ({} violations):", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// A finite metric space with an exact symmetric rational distance table.
///
/// Point identity is index-based; labels are cosmetic only. The empty space
/// is a legal value. All instances are immutable after construction and every
/// public constructor enforces the metric axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    n: usize,
    labels: Option<Vec<String>>,
    // Full symmetric n*n table; diagonal is zero.
    d: Vec<Rat>,
}

impl FiniteMetricSpace {
    /// The empty metric space.
    pub fn empty() -> FiniteMetricSpace {
        FiniteMetricSpace {
            n: 0,
            labels: None,
            d: Vec::new(),
        }
    }

    /// A single point.
    pub fn point() -> FiniteMetricSpace {
        FiniteMetricSpace {
            n: 1,
            labels: None,
            d: vec![Rat::zero()],
        }
    }

    /// Two points at the given positive distance.
    pub fn edge(d: Rat) -> FiniteMetricSpace {
        assert!(d.is_positive());
        FiniteMetricSpace {
            n: 2,
            labels: None,
            d: vec![Rat::zero(), d.clone(), d, Rat::zero()],
        }
    }

    /// Validates a full square table and returns the space iff every
    /// invariant holds; otherwise reports every violation found.
    pub fn from_table(table: &[Vec<Rat>]) -> Result<FiniteMetricSpace, SpaceError> {
        let n = table.len();
        let mut violations = Vec::new();
        for row in table {
            if row.len() != n {
                violations.push(Violation::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
                return Err(SpaceError { violations });
            }
        }
        for i in 0..n {
            if !table[i][i].is_zero() {
                violations.push(Violation::NonzeroDiagonal { i });
            }
            for j in (i + 1)..n {
                if table[i][j].is_negative() {
                    violations.push(Violation::NegativeDistance { i, j });
                } else if table[i][j].is_zero() {
                    violations.push(Violation::ZeroOffDiagonal { i, j });
                }
                if table[i][j] != table[j][i] {
                    violations.push(Violation::Asymmetry { i, j });
                }
            }
        }
        if violations.is_empty() {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        if !is_metric_triple(&table[i][j], &table[i][k], &table[j][k]) {
                            violations.push(Violation::TriangleViolation { i, j, k });
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(SpaceError { violations });
        }
        let mut d = Vec::with_capacity(n * n);
        for row in table {
            d.extend(row.iter().cloned());
        }
        Ok(FiniteMetricSpace { n, labels: None, d })
    }

    /// Builds a space from the strict upper triangle in row-major order:
    /// `d(0,1), d(0,2), ..., d(0,n-1), d(1,2), ...`.
    pub fn from_upper_triangle(n: usize, entries: &[Rat]) -> Result<FiniteMetricSpace, SpaceError> {
        assert_eq!(entries.len(), n * (n.saturating_sub(1)) / 2, "entry count mismatch");
        let mut table = vec![vec![Rat::zero(); n]; n];
        let mut it = entries.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap().clone();
                table[i][j] = v.clone();
                table[j][i] = v;
            }
        }
        FiniteMetricSpace::from_table(&table)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> FiniteMetricSpace {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Distance between points `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        assert!(i < self.n && j < self.n, "point index out of range");
        &self.d[i * self.n + j]
    }

    /// The induced subspace on the given distinct points, in the given order.
    pub fn restrict(&self, points: &[usize]) -> FiniteMetricSpace {
        for &p in points {
            assert!(p < self.n, "restrict: point index {p} out of range");
        }
        let mut seen = vec![false; self.n];
        for &p in points {
            assert!(!seen[p], "restrict: duplicate point index {p}");
            seen[p] = true;
        }
        let m = points.len();
        let mut d = Vec::with_capacity(m * m);
        for &i in points {
            for &j in points {
                d.push(self.dist(i, j).clone());
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| points.iter().map(|&p| ls[p].clone()).collect());
        FiniteMetricSpace { n: m, labels, d }
    }

    /// Sorted distinct values attained by the distance function, including 0
    /// whenever the space is nonempty.
    pub fn dist_set(&self) -> Vec<Rat> {
        let mut vals: Vec<Rat> = Vec::new();
        if self.n > 0 {
            vals.push(Rat::zero());
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                vals.push(self.dist(i, j).clone());
            }
        }
        vals.sort();
        vals.dedup();
        vals
    }

    /// Extends the space by one point whose distances to the existing points
    /// are prescribed. The caller must have checked metricity; used by the
    /// constructive operations after their interval checks.
    pub(crate) fn extend_unchecked(&self, dists: &[Rat]) -> FiniteMetricSpace {
        assert_eq!(dists.len(), self.n);
        let n = self.n + 1;
        let mut d = vec![Rat::zero(); n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                d[i * n + j] = self.d[i * self.n + j].clone();
            }
        }
        for (i, v) in dists.iter().enumerate() {
            debug_assert!(v.is_positive());
            d[i * n + (n - 1)] = v.clone();
            d[(n - 1) * n + i] = v.clone();
        }
        FiniteMetricSpace { n, labels: None, d }
    }

    /// Serializes to the plain-text exchange format:
    /// line 1 `n=<count>`, then `d <i> <j> = <p>/<q>` for i<j in row-major
    /// order, rationals in lowest terms.
    pub fn to_file_format(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n={}", self.n).unwrap();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                writeln!(out, "d {} {} = {}", i, j, self.dist(i, j).frac()).unwrap();
            }
        }
        out
    }

    /// Parses the exchange format. `#` starts a comment; entries may appear
    /// in any order but each unordered pair must appear exactly once.
    pub fn from_file_format(text: &str) -> Result<FiniteMetricSpace, SpaceFileError> {
        let mut n: Option<usize> = None;
        let mut entries: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| SpaceFileError {
                line: lineno + 1,
                message: msg,
            };
            if let Some(rest) = line.strip_prefix("n=") {
                if n.is_some() {
                    return Err(err("duplicate n= line".into()));
                }
                n = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad point count `{rest}`")))?,
                );
            } else if let Some(rest) = line.strip_prefix("d ") {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `d <i> <j> = <p>/<q>`".into()))?;
                let mut idx = lhs.split_whitespace();
                let i: usize = idx
                    .next()
                    .ok_or_else(|| err("missing first index".into()))?
                    .parse()
                    .map_err(|_| err("bad first index".into()))?;
                let j: usize = idx
                    .next()
                    .ok_or_else(|| err("missing second index".into()))?
                    .parse()
                    .map_err(|_| err("bad second index".into()))?;
                if idx.next().is_some() {
                    return Err(err("trailing tokens before `=`".into()));
                }
                if i >= j {
                    return Err(err(format!("indices must satisfy i<j, got {i} {j}")));
                }
                let v: Rat = rhs
                    .trim()
                    .parse()
                    .map_err(|e: crate::rat::ParseRatError| err(e.to_string()))?;
                if entries.insert((i, j), v).is_some() {
                    return Err(err(format!("duplicate entry for pair ({i},{j})")));
                }
            } else {
                return Err(err(format!("unrecognized line `{line}`")));
            }
        }
        let n = n.ok_or(SpaceFileError {
            line: 0,
            message: "missing n= line".into(),
        })?;
        let expected = n * n.saturating_sub(1) / 2;
        if entries.len() != expected {
            return Err(SpaceFileError {
                line: 0,
                message: format!("expected {expected} distance entries, found {}", entries.len()),
            });
        }
        let mut table = vec![vec![Rat::zero(); n]; n];
        for ((i, j), v) in entries {
            if j >= n {
                return Err(SpaceFileError {
                    line: 0,
                    message: format!("pair ({i},{j}) out of range for n={n}"),
                });
            }
            table[i][j] = v.clone();
            table[j][i] = v;
        }
        FiniteMetricSpace::from_table(&table).map_err(|e| SpaceFileError {
            line: 0,
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("space file error (line {line}): {message}")]
pub struct SpaceFileError {
    pub line: usize,
    pub message: String,
}

/// A partial assignment of prospective distances from a hypothetical new
/// point to points of a host space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeFunction {
    values: BTreeMap<usize, Rat>,
}

impl TypeFunction {
    /// Builds a type function; all prescribed distances must be positive.
    pub fn new(assignments: impl IntoIterator<Item = (usize, Rat)>) -> TypeFunction {
        let values: BTreeMap<usize, Rat> = assignments.into_iter().collect();
        for v in values.values() {
            assert!(v.is_positive(), "type function values must be positive");
        }
        TypeFunction { values }
    }

    pub fn dom(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn dom_vec(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    pub fn value(&self, point: usize) -> Option<&Rat> {
        self.values.get(&point)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.values.iter().map(|(&k, v)| (k, v))
    }

    /// Sorted distinct prescribed values.
    pub fn dist_set(&self) -> Vec<Rat> {
        let mut vals: Vec<Rat> = self.values.values().cloned().collect();
        vals.sort();
        vals.dedup();
        vals
    }
}

/// Failure of the two-sided extension condition on a pair of domain points.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("prescribed distances at points {x} and {y} do not extend the space metrically")]
pub struct NotMetricType {
    pub x: usize,
    pub y: usize,
}

/// The space obtained from `restrict(host, dom(t))` by adding one new point
/// at the prescribed distances; the new point has the last index.
///
/// Succeeds iff `|t(x)-t(y)| <= d(x,y) <= t(x)+t(y)` for all pairs in the
/// domain, which is exactly when the extension is metric.
pub fn span_space(host: &FiniteMetricSpace, t: &TypeFunction) -> Result<FiniteMetricSpace, NotMetricType> {
    let dom = t.dom_vec();
    for (a, &x) in dom.iter().enumerate() {
        for &y in &dom[a + 1..] {
            if !is_metric_triple(t.value(x).unwrap(), t.value(y).unwrap(), host.dist(x, y)) {
                return Err(NotMetricType { x, y });
            }
        }
    }
    let base = host.restrict(&dom);
    let dists: Vec<Rat> = dom.iter().map(|&x| t.value(x).unwrap().clone()).collect();
    Ok(base.extend_unchecked(&dists))
}

/// All points of the host outside `dom(t)` realizing the type exactly.
pub fn typeset(host: &FiniteMetricSpace, t: &TypeFunction) -> Vec<usize> {
    (0..host.len())
        .filter(|&y| t.value(y).is_none() && t.iter().all(|(x, v)| host.dist(y, x) == v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn triangle(a: Rat, b: Rat, c: Rat) -> FiniteMetricSpace {
        // d(0,1)=a, d(0,2)=b, d(1,2)=c
        FiniteMetricSpace::from_upper_triangle(3, &[a, b, c]).unwrap()
    }

    #[test]
    fn metric_triple_examples() {
        assert!(is_metric_triple(&int(1), &int(1), &int(1)));
        assert!(!is_metric_triple(&int(2), &int(1), &rat(1, 2)));
        assert!(is_metric_triple(&int(8), &int(9), &int(1)));
    }

    #[test]
    #[should_panic(expected = "negative input")]
    fn metric_triple_rejects_negative() {
        is_metric_triple(&int(-1), &int(1), &int(1));
    }

    #[test]
    fn validate_equilateral() {
        let m = triangle(int(1), int(1), int(1));
        assert_eq!(m.len(), 3);
        assert_eq!(m.dist_set(), vec![int(0), int(1)]);
    }

    #[test]
    fn validate_reports_triangle_violation() {
        let err = FiniteMetricSpace::from_upper_triangle(3, &[int(2), int(1), rat(1, 2)])
            .unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::TriangleViolation { i: 0, j: 1, k: 2 }]
        );
    }

    #[test]
    fn validate_names_the_bad_entry_in_a_4_point_table() {
        // All distances 1 except d(1,3)=3.
        let err = FiniteMetricSpace::from_upper_triangle(
            4,
            &[int(1), int(1), int(1), int(1), int(3), int(1)],
        )
        .unwrap_err();
        assert!(err
            .violations
            .iter()
            .all(|v| matches!(v, Violation::TriangleViolation { .. })));
        assert!(err
            .violations
            .contains(&Violation::TriangleViolation { i: 0, j: 1, k: 3 }));
    }

    #[test]
    fn validate_rejects_zero_and_asymmetry() {
        let table = vec![
            vec![int(0), int(0)],
            vec![int(0), int(0)],
        ];
        let err = FiniteMetricSpace::from_table(&table).unwrap_err();
        assert_eq!(err.violations, vec![Violation::ZeroOffDiagonal { i: 0, j: 1 }]);

        let table = vec![
            vec![int(0), int(1)],
            vec![int(2), int(0)],
        ];
        let err = FiniteMetricSpace::from_table(&table).unwrap_err();
        assert_eq!(err.violations, vec![Violation::Asymmetry { i: 0, j: 1 }]);
    }

    #[test]
    fn restrict_projects_the_table() {
        let m = FiniteMetricSpace::from_upper_triangle(
            4,
            &[int(1), int(2), int(3), int(1), int(2), int(1)],
        )
        .unwrap();
        assert_eq!(m.restrict(&[]), FiniteMetricSpace::empty());
        assert_eq!(m.restrict(&[2]).len(), 1);
        let sub = m.restrict(&[0, 1, 3]);
        assert_eq!(sub.dist(0, 1), &int(1));
        assert_eq!(sub.dist(0, 2), &int(3));
        assert_eq!(sub.dist(1, 2), &int(2));
        // Composition: restricting twice equals restricting once.
        let all: Vec<usize> = (0..m.len()).collect();
        assert_eq!(m.restrict(&all), m);
        assert_eq!(m.restrict(&[0, 1, 3]).restrict(&[0, 2]), m.restrict(&[0, 3]));
    }

    #[test]
    fn dist_set_examples() {
        assert!(FiniteMetricSpace::empty().dist_set().is_empty());
        let path = triangle(int(1), int(3), int(2));
        assert_eq!(path.dist_set(), vec![int(0), int(1), int(2), int(3)]);
    }

    #[test]
    fn span_space_examples() {
        let m = FiniteMetricSpace::point();
        let t = TypeFunction::new([(0, int(1))]);
        let s = span_space(&m, &t).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), &int(1));

        let edge = FiniteMetricSpace::edge(int(1));
        let t = TypeFunction::new([(0, int(1)), (1, int(1))]);
        let s = span_space(&edge, &t).unwrap();
        assert_eq!(s.dist_set(), vec![int(0), int(1)]);

        let edge2 = FiniteMetricSpace::edge(int(2));
        let t = TypeFunction::new([(0, rat(1, 2)), (1, rat(1, 2))]);
        assert_eq!(span_space(&edge2, &t).unwrap_err(), NotMetricType { x: 0, y: 1 });
    }

    #[test]
    fn typeset_examples() {
        let m = triangle(int(1), int(1), int(1));
        let t = TypeFunction::new([(0, int(1))]);
        assert_eq!(typeset(&m, &t), vec![1, 2]);

        let t = TypeFunction::new([(0, int(5))]);
        assert_eq!(typeset(&m, &t), Vec::<usize>::new());

        let t = TypeFunction::new([(0, int(1)), (1, int(1)), (2, int(1))]);
        assert_eq!(typeset(&m, &t), Vec::<usize>::new());
    }

    #[test]
    fn file_format_roundtrip() {
        let m = FiniteMetricSpace::from_upper_triangle(
            4,
            &[int(1), int(2), int(3), int(1), int(2), int(1)],
        )
        .unwrap();
        let text = m.to_file_format();
        assert!(text.starts_with("n=4\nd 0 1 = 1/1\n"));
        let back = FiniteMetricSpace::from_file_format(&text).unwrap();
        assert_eq!(m, back);
        // Comments and blank lines are ignored.
        let with_comments = format!("# header\n{text}\n# trailing\n");
        assert_eq!(FiniteMetricSpace::from_file_format(&with_comments).unwrap(), m);
    }

    #[test]
    fn file_format_errors() {
        assert!(FiniteMetricSpace::from_file_format("d 0 1 = 1/1\n").is_err());
        assert!(FiniteMetricSpace::from_file_format("n=2\nd 1 0 = 1/1\n").is_err());
        assert!(FiniteMetricSpace::from_file_format("n=2\n").is_err());
        assert!(
            FiniteMetricSpace::from_file_format("n=2\nd 0 1 = 1/1\nd 0 1 = 1/1\n").is_err()
        );
    }
}
