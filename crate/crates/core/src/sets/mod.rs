//! Candidate distance sets: representations, order/topology queries, grids,
//! dense enumerations and canonical element picks.
//!
//! A [`DistanceSet`] is one of finitely many symbolic representations of a
//! subset of the nonnegative reals containing 0. Everything downstream (the
//! four-values decision, amalgamation, the builders) works against this
//! interface, so all queries here are exact and symbolic; nothing is sampled.

pub mod parse;

use crate::rat::{int, Rat, XRat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use thiserror::Error;

/// One component of an interval union: either a nondegenerate interval with
/// open/closed ends (the right end may be +∞) or a single point (`lo == hi`,
/// both ends closed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rat,
    lo_closed: bool,
    hi: XRat,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rat, lo_closed: bool, hi: XRat, hi_closed: bool) -> Result<Interval, SetError> {
        if lo.is_negative() {
            return Err(SetError::NegativeValue);
        }
        match &hi {
            XRat::Infinity => {
                if hi_closed {
                    return Err(SetError::EmptyInterval);
                }
            }
            XRat::Finite(h) => {
                if *h < lo || (*h == lo && !(lo_closed && hi_closed)) {
                    return Err(SetError::EmptyInterval);
                }
            }
        }
        Ok(Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        })
    }

    pub fn point(v: Rat) -> Interval {
        Interval {
            hi: XRat::Finite(v.clone()),
            lo: v,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Interval {
        Interval::new(lo, true, XRat::Finite(hi), true).expect("nonempty closed interval")
    }

    pub fn ray(lo: Rat, lo_closed: bool) -> Interval {
        Interval {
            lo,
            lo_closed,
            hi: XRat::Infinity,
            hi_closed: false,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(&self.hi, XRat::Finite(h) if *h == self.lo)
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi(&self) -> &XRat {
        &self.hi
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn contains(&self, q: &Rat) -> bool {
        let above = if self.lo_closed {
            *q >= self.lo
        } else {
            *q > self.lo
        };
        let below = match &self.hi {
            XRat::Infinity => true,
            XRat::Finite(h) => {
                if self.hi_closed {
                    *q <= *h
                } else {
                    *q < *h
                }
            }
        };
        above && below
    }

    fn render(&self) -> String {
        if self.is_point() {
            return format!("{{{}}}", self.lo);
        }
        format!(
            "{}{},{}{}",
            if self.lo_closed { "[" } else { "(" },
            self.lo,
            self.hi,
            if self.hi_closed { "]" } else { ")" }
        )
    }
}

/// A symbolic subset of the nonnegative reals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceSet {
    /// A finite set of rationals, sorted and distinct.
    Finite(Vec<Rat>),
    /// A union of intervals over the reals: sorted, pairwise disjoint, not
    /// mergeable. At least one component is nondegenerate.
    Intervals(Vec<Interval>),
    /// The rational points of an interval union (countable, dense in the
    /// union). Same component invariants as `Intervals`.
    Rationals(Vec<Interval>),
    /// The integer segment {0, 1, ..., n-1}.
    Omega(u64),
    /// The additive closure of the generators together with 0, intersected
    /// with [0,cap] (or [0,cap) when `cap_included` is false; all of
    /// [0,infinity) when the cap is infinite).
    SumClosure {
        generators: Vec<Rat>,
        cap: XRat,
        cap_included: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("the set does not contain 0")]
    ZeroMissing,
    #[error("empty interval")]
    EmptyInterval,
    #[error("negative values are not allowed")]
    NegativeValue,
    #[error("unsupported union: {0}")]
    UnsupportedUnion(String),
}

/// The three predicates the admissibility classification depends on, each
/// with a short derivation note.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetTraits {
    pub countable: bool,
    pub countable_note: String,
    pub closed: bool,
    pub closed_note: String,
    pub zero_limit: bool,
    pub zero_limit_note: String,
}

/// Certificate that a requested range contains no element of the set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("empty intersection: {note}")]
pub struct EmptyRange {
    pub note: String,
}

/// Exact bounds of a nonempty intersection of the set with a window,
/// tracking whether each bound is attained by an element of the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowBounds {
    pub inf: Rat,
    pub inf_attained: bool,
    pub sup: XRat,
    pub sup_attained: bool,
}

fn normalize_components(mut comps: Vec<Interval>) -> Vec<Interval> {
    comps.sort_by(|a, b| {
        a.lo.cmp(&b.lo)
            .then_with(|| b.lo_closed.cmp(&a.lo_closed))
            .then_with(|| a.hi.cmp(&b.hi))
    });
    let mut merged: Vec<Interval> = Vec::new();
    for iv in comps {
        if let Some(last) = merged.last_mut() {
            let touches = match &last.hi {
                XRat::Infinity => true,
                XRat::Finite(h) => {
                    iv.lo < *h || (iv.lo == *h && (last.hi_closed || iv.lo_closed))
                }
            };
            if touches {
                let keep_last = match (&last.hi, &iv.hi) {
                    (XRat::Infinity, _) => true,
                    (_, XRat::Infinity) => false,
                    (XRat::Finite(a), XRat::Finite(b)) => {
                        a > b || (a == b && (last.hi_closed || !iv.hi_closed))
                    }
                };
                if !keep_last {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                }
                continue;
            }
        }
        merged.push(iv);
    }
    merged
}

/// Intersection of normalized components with the window given by generalized
/// bounds (`None` hi bound = unbounded).
fn intersect_components(
    comps: &[Interval],
    lo: &Rat,
    lo_closed: bool,
    hi: &XRat,
    hi_closed: bool,
) -> Vec<Interval> {
    let mut out = Vec::new();
    for c in comps {
        // New lower bound: the tighter of c.lo and lo.
        let (nlo, nlo_closed) = if c.lo > *lo {
            (c.lo.clone(), c.lo_closed)
        } else if c.lo < *lo {
            (lo.clone(), lo_closed)
        } else {
            (c.lo.clone(), c.lo_closed && lo_closed)
        };
        let (nhi, nhi_closed) = match (&c.hi, hi) {
            (XRat::Infinity, XRat::Infinity) => (XRat::Infinity, false),
            (XRat::Infinity, XRat::Finite(h)) => (XRat::Finite(h.clone()), hi_closed),
            (XRat::Finite(ch), XRat::Infinity) => (XRat::Finite(ch.clone()), c.hi_closed),
            (XRat::Finite(ch), XRat::Finite(h)) => {
                if ch < h {
                    (XRat::Finite(ch.clone()), c.hi_closed)
                } else if ch > h {
                    (XRat::Finite(h.clone()), hi_closed)
                } else {
                    (XRat::Finite(ch.clone()), c.hi_closed && hi_closed)
                }
            }
        };
        let ok = match &nhi {
            XRat::Infinity => true,
            XRat::Finite(h) => *h > nlo || (*h == nlo && nlo_closed && nhi_closed),
        };
        if ok {
            out.push(Interval {
                lo: nlo,
                lo_closed: nlo_closed,
                hi: nhi,
                hi_closed: nhi_closed,
            });
        }
    }
    out
}

/// Smallest-numerator integer `p` with `p/d` inside the component, if any.
fn least_numerator_in(c: &Interval, d: &BigInt) -> Option<BigInt> {
    let dr = Rat::from_bigint_ratio(d.clone(), BigInt::one());
    let lo_scaled = &c.lo * &dr;
    let mut p = lo_scaled.ceil_int();
    if !c.lo_closed && Rat::from_bigint_ratio(p.clone(), d.clone()) == c.lo {
        p += 1;
    }
    let cand = Rat::from_bigint_ratio(p.clone(), d.clone());
    match &c.hi {
        XRat::Infinity => Some(p),
        XRat::Finite(h) => {
            if cand < *h || (cand == *h && c.hi_closed) {
                Some(p)
            } else {
                None
            }
        }
    }
}

/// Canonical rational in a union of components: minimal denominator, then
/// minimal numerator, computed per component in continued-fraction time.
fn min_denominator_rational(comps: &[Interval]) -> Rat {
    assert!(!comps.is_empty());
    let mut best: Option<Rat> = None;
    for c in comps {
        let hi = match &c.hi {
            XRat::Finite(h) => Some((h, !c.hi_closed)),
            XRat::Infinity => None,
        };
        let cand = crate::rat::simplest_in(&c.lo, !c.lo_closed, hi)
            .expect("normalized components are nonempty");
        let better = match &best {
            None => true,
            Some(b) => {
                (cand.denom(), cand.numer()) < (b.denom(), b.numer())
            }
        };
        if better {
            best = Some(cand);
        }
    }
    best.unwrap()
}

/// Residue-class table for a sum closure: `table[r]` is the least reachable
/// value of the integerized lattice congruent to `r` mod the smallest
/// generator, or `None` when unreachable.
struct SumLattice {
    /// Common denominator: every element of the closure is `k / scale`.
    scale: BigInt,
    gens: Vec<u64>,
    min_gen: u64,
    table: Vec<Option<u64>>,
}

impl SumLattice {
    fn build(generators: &[Rat]) -> SumLattice {
        let mut scale = BigInt::one();
        for g in generators {
            scale = scale.lcm(g.denom());
        }
        let mut gens: Vec<u64> = generators
            .iter()
            .map(|g| {
                (g * &Rat::from_bigint_ratio(scale.clone(), BigInt::one()))
                    .numer()
                    .to_u64()
                    .expect("sum-closure generator too large for the lattice")
            })
            .collect();
        gens.sort_unstable();
        gens.dedup();
        let min_gen = gens[0];
        assert!(min_gen > 0);
        assert!(
            min_gen <= 4_000_000,
            "sum-closure lattice too fine for residue analysis"
        );
        // Dijkstra over residues mod min_gen; edge r -> (r+g) mod m of weight g.
        let m = min_gen as usize;
        let mut table: Vec<Option<u64>> = vec![None; m];
        table[0] = Some(0);
        let mut heap: BinaryHeap<std::cmp::Reverse<(u64, usize)>> = BinaryHeap::new();
        heap.push(std::cmp::Reverse((0, 0)));
        while let Some(std::cmp::Reverse((v, r))) = heap.pop() {
            if table[r] != Some(v) {
                continue;
            }
            for &g in &gens {
                let nv = v + g;
                let nr = (nv % min_gen) as usize;
                if table[nr].map_or(true, |old| nv < old) {
                    table[nr] = Some(nv);
                    heap.push(std::cmp::Reverse((nv, nr)));
                }
            }
        }
        SumLattice {
            scale,
            gens,
            min_gen,
            table,
        }
    }

    /// Integerized value of a rational, if it lies on the lattice.
    fn lattice_value(&self, q: &Rat) -> Option<u64> {
        let scaled = q * &Rat::from_bigint_ratio(self.scale.clone(), BigInt::one());
        if !scaled.is_integer() || scaled.is_negative() {
            return None;
        }
        scaled.numer().to_u64()
    }

    fn reachable(&self, k: u64) -> bool {
        match self.table[(k % self.min_gen) as usize] {
            Some(least) => k >= least,
            None => false,
        }
    }

    /// Least reachable lattice value `>= k`.
    fn least_at_or_above(&self, k: u64) -> Option<u64> {
        let mut best: Option<u64> = None;
        for r in 0..self.min_gen as usize {
            if let Some(least) = self.table[r] {
                let v = if least >= k {
                    least
                } else {
                    least + (k - least).div_ceil(self.min_gen) * self.min_gen
                };
                best = Some(best.map_or(v, |b: u64| b.min(v)));
            }
        }
        best
    }

    fn to_rat(&self, k: u64) -> Rat {
        Rat::from_bigint_ratio(BigInt::from(k), self.scale.clone())
    }

    /// Ascending enumeration of reachable values, bounded by count.
    fn enumerate(&self, limit_value: Option<u64>, limit_count: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        let mut heap: BinaryHeap<std::cmp::Reverse<u64>> = BinaryHeap::new();
        heap.push(std::cmp::Reverse(0));
        seen.insert(0);
        while let Some(std::cmp::Reverse(v)) = heap.pop() {
            if let Some(lim) = limit_value {
                if v > lim {
                    break;
                }
            }
            out.push(v);
            if out.len() >= limit_count {
                break;
            }
            for &g in &self.gens {
                let nv = v + g;
                if limit_value.map_or(true, |lim| nv <= lim) && seen.insert(nv) {
                    heap.push(std::cmp::Reverse(nv));
                }
            }
        }
        out
    }
}

impl DistanceSet {
    /// A finite set; must contain 0.
    pub fn finite(values: impl IntoIterator<Item = Rat>) -> Result<DistanceSet, SetError> {
        let mut vals: Vec<Rat> = values.into_iter().collect();
        if vals.iter().any(|v| v.is_negative()) {
            return Err(SetError::NegativeValue);
        }
        vals.sort();
        vals.dedup();
        if vals.first() != Some(&Rat::zero()) {
            return Err(SetError::ZeroMissing);
        }
        Ok(DistanceSet::Finite(vals))
    }

    /// An interval union over the reals; must contain 0. Degenerate
    /// components are allowed and an all-degenerate union collapses to a
    /// finite set.
    pub fn intervals(comps: Vec<Interval>) -> Result<DistanceSet, SetError> {
        let comps = normalize_components(comps);
        let set = if comps.iter().all(|c| c.is_point()) {
            DistanceSet::Finite(comps.into_iter().map(|c| c.lo).collect())
        } else {
            DistanceSet::Intervals(comps)
        };
        if !set.contains(&Rat::zero()) {
            return Err(SetError::ZeroMissing);
        }
        Ok(set)
    }

    /// The rational points of an interval union; must contain 0.
    pub fn rationals(comps: Vec<Interval>) -> Result<DistanceSet, SetError> {
        let comps = normalize_components(comps);
        let set = if comps.iter().all(|c| c.is_point()) {
            DistanceSet::Finite(comps.into_iter().map(|c| c.lo).collect())
        } else {
            DistanceSet::Rationals(comps)
        };
        if !set.contains(&Rat::zero()) {
            return Err(SetError::ZeroMissing);
        }
        Ok(set)
    }

    pub fn omega(n: u64) -> Result<DistanceSet, SetError> {
        if n == 0 {
            return Err(SetError::ZeroMissing);
        }
        Ok(DistanceSet::Omega(n))
    }

    pub fn sum_closure(
        generators: Vec<Rat>,
        cap: XRat,
        cap_included: bool,
    ) -> Result<DistanceSet, SetError> {
        if generators.is_empty() || generators.iter().any(|g| !g.is_positive()) {
            return Err(SetError::NegativeValue);
        }
        if let XRat::Finite(c) = &cap {
            if c.is_negative() || (c.is_zero() && !cap_included) {
                return Err(SetError::EmptyInterval);
            }
        }
        Ok(DistanceSet::SumClosure {
            generators,
            cap,
            cap_included,
        })
    }

    /// Parses the set-expression grammar; see the crate docs for the syntax.
    pub fn parse(text: &str) -> Result<DistanceSet, SetError> {
        parse::parse_setexpr(text)
    }

    /// Exact membership. `q` must be nonnegative.
    pub fn contains(&self, q: &Rat) -> bool {
        assert!(!q.is_negative(), "membership query on a negative value");
        match self {
            DistanceSet::Finite(vals) => vals.binary_search(q).is_ok(),
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                comps.iter().any(|c| c.contains(q))
            }
            DistanceSet::Omega(n) => {
                q.is_integer() && q.numer() < &BigInt::from(*n)
            }
            DistanceSet::SumClosure {
                generators,
                cap,
                cap_included,
            } => {
                match cap {
                    XRat::Finite(c) => {
                        if *q > *c || (*q == *c && !cap_included) {
                            return false;
                        }
                    }
                    XRat::Infinity => {}
                }
                let lattice = SumLattice::build(generators);
                match lattice.lattice_value(q) {
                    Some(k) => lattice.reachable(k),
                    None => false,
                }
            }
        }
    }

    /// Canonical element of the intersection with `[lo, hi]`, or a
    /// certificate that the intersection is empty.
    ///
    /// Canonical means: least element for finite representations; the
    /// minimal-denominator (then minimal-numerator) rational for interval
    /// representations; the least reachable sum for sum closures.
    pub fn range_pick(&self, lo: &Rat, hi: &Rat) -> Result<Rat, EmptyRange> {
        assert!(lo <= hi);
        self.pick_in(lo, true, &XRat::Finite(hi.clone()), true)
    }

    /// Generalized canonical pick with open/closed window bounds.
    pub fn pick_in(
        &self,
        lo: &Rat,
        lo_closed: bool,
        hi: &XRat,
        hi_closed: bool,
    ) -> Result<Rat, EmptyRange> {
        let lo = if lo.is_negative() { Rat::zero() } else { lo.clone() };
        let empty = |note: String| EmptyRange { note };
        let window = |v: &Rat| -> bool {
            let above = if lo_closed { *v >= lo } else { *v > lo };
            let below = match hi {
                XRat::Infinity => true,
                XRat::Finite(h) => {
                    if hi_closed {
                        *v <= *h
                    } else {
                        *v < *h
                    }
                }
            };
            above && below
        };
        match self {
            DistanceSet::Finite(vals) => vals
                .iter()
                .find(|v| window(v))
                .cloned()
                .ok_or_else(|| empty(format!("no element of the finite set lies in the range"))),
            DistanceSet::Omega(n) => {
                let mut k = lo.ceil_int();
                if k.is_negative() {
                    k = BigInt::zero();
                }
                if !lo_closed && Rat::from_bigint_ratio(k.clone(), BigInt::one()) == lo {
                    k += 1;
                }
                let cand = Rat::from_bigint_ratio(k.clone(), BigInt::one());
                if k < BigInt::from(*n) && window(&cand) {
                    Ok(cand)
                } else {
                    Err(empty(format!("no integer below {n} lies in the range")))
                }
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let within = intersect_components(comps, &lo, lo_closed, hi, hi_closed);
                if within.is_empty() {
                    Err(empty(
                        "the range falls in the gaps of the interval union".to_string(),
                    ))
                } else {
                    Ok(min_denominator_rational(&within))
                }
            }
            DistanceSet::SumClosure {
                generators,
                cap,
                cap_included,
            } => {
                let lattice = SumLattice::build(generators);
                let scale_rat = Rat::from_bigint_ratio(lattice.scale.clone(), BigInt::one());
                let lo_scaled = &lo * &scale_rat;
                let mut k_lo = lo_scaled.ceil_int();
                if k_lo.is_negative() {
                    k_lo = BigInt::zero();
                }
                if !lo_closed && Rat::from_bigint_ratio(k_lo.clone(), lattice.scale.clone()) == lo {
                    k_lo += 1;
                }
                let k_lo = match k_lo.to_u64() {
                    Some(k) => k,
                    None => return Err(empty("range beyond the lattice bound".into())),
                };
                match lattice.least_at_or_above(k_lo) {
                    Some(k) => {
                        let v = lattice.to_rat(k);
                        let below_cap = match cap {
                            XRat::Infinity => true,
                            XRat::Finite(c) => v < *c || (v == *c && *cap_included),
                        };
                        if below_cap && window(&v) {
                            Ok(v)
                        } else {
                            Err(empty("no reachable sum lies in the range".into()))
                        }
                    }
                    None => Err(empty("no reachable sum lies in the range".into())),
                }
            }
        }
    }

    /// Exact bounds of the intersection with an open/closed window, or `None`
    /// when the intersection is empty. Attainedness distinguishes a supremum
    /// approached from a supremum achieved by an element of the set.
    pub fn range_bounds(
        &self,
        lo: &Rat,
        lo_closed: bool,
        hi: &XRat,
        hi_closed: bool,
    ) -> Option<WindowBounds> {
        match self {
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let within = intersect_components(comps, lo, lo_closed, hi, hi_closed);
                let first = within.first()?;
                let last = within.last().unwrap();
                Some(WindowBounds {
                    inf: first.lo.clone(),
                    inf_attained: first.lo_closed,
                    sup: last.hi.clone(),
                    sup_attained: last.hi_closed,
                })
            }
            _ => {
                // Discrete representations: both bounds are attained elements.
                let least = self.pick_in(lo, lo_closed, hi, hi_closed).ok()?;
                let sup = self.max_in(lo, lo_closed, hi, hi_closed)?;
                Some(WindowBounds {
                    inf: least,
                    inf_attained: true,
                    sup: XRat::Finite(sup),
                    sup_attained: true,
                })
            }
        }
    }

    /// Greatest element of a discrete representation within the window.
    fn max_in(&self, lo: &Rat, lo_closed: bool, hi: &XRat, hi_closed: bool) -> Option<Rat> {
        let window = |v: &Rat| -> bool {
            let above = if lo_closed { v >= lo } else { v > lo };
            let below = match hi {
                XRat::Infinity => true,
                XRat::Finite(h) => {
                    if hi_closed {
                        v <= h
                    } else {
                        v < h
                    }
                }
            };
            above && below
        };
        match self {
            DistanceSet::Finite(vals) => vals.iter().rev().find(|v| window(v)).cloned(),
            DistanceSet::Omega(n) => {
                let top = int(*n as i64 - 1);
                let mut k = match hi {
                    XRat::Infinity => top.clone(),
                    XRat::Finite(h) => {
                        let mut k = h.floor_int();
                        if !hi_closed && Rat::from_bigint_ratio(k.clone(), BigInt::one()) == *h {
                            k -= 1;
                        }
                        Rat::from_bigint_ratio(k, BigInt::one())
                    }
                };
                if k > top {
                    k = top;
                }
                if window(&k) {
                    Some(k)
                } else {
                    None
                }
            }
            DistanceSet::SumClosure {
                generators,
                cap,
                cap_included,
            } => {
                // Walk the lattice downward from the window top.
                let lattice = SumLattice::build(generators);
                let top = match (hi, cap) {
                    (XRat::Infinity, XRat::Infinity) => return None, // unbounded above
                    (XRat::Infinity, XRat::Finite(c)) => (c.clone(), *cap_included),
                    (XRat::Finite(h), XRat::Infinity) => (h.clone(), hi_closed),
                    (XRat::Finite(h), XRat::Finite(c)) => {
                        if h < c {
                            (h.clone(), hi_closed)
                        } else if c < h {
                            (c.clone(), *cap_included)
                        } else {
                            (h.clone(), hi_closed && *cap_included)
                        }
                    }
                };
                let scale_rat = Rat::from_bigint_ratio(lattice.scale.clone(), BigInt::one());
                let mut k = (&top.0 * &scale_rat).floor_int();
                if !top.1 && Rat::from_bigint_ratio(k.clone(), lattice.scale.clone()) == top.0 {
                    k -= 1;
                }
                let mut k = k.to_u64()?;
                loop {
                    if lattice.reachable(k) {
                        let v = lattice.to_rat(k);
                        return if window(&v) { Some(v) } else { None };
                    }
                    if k == 0 {
                        return None;
                    }
                    k -= 1;
                }
            }
            DistanceSet::Intervals(_) | DistanceSet::Rationals(_) => unreachable!(),
        }
    }

    /// The closure of the set in the reals, as a representation.
    pub fn closure(&self) -> DistanceSet {
        match self {
            DistanceSet::Finite(_) | DistanceSet::Omega(_) | DistanceSet::SumClosure { .. } => {
                // Finite sets are closed; sum closures over positive rational
                // generators are uniformly discrete, hence closed.
                self.clone()
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let closed: Vec<Interval> = comps
                    .iter()
                    .map(|c| Interval {
                        lo: c.lo.clone(),
                        lo_closed: true,
                        hi: c.hi.clone(),
                        hi_closed: !c.hi.is_infinite(),
                    })
                    .collect();
                let comps = normalize_components(closed);
                if comps.iter().all(|c| c.is_point()) {
                    DistanceSet::Finite(comps.into_iter().map(|c| c.lo).collect())
                } else {
                    DistanceSet::Intervals(comps)
                }
            }
        }
    }

    /// The elements with a right gap: every `x` in the result admits a
    /// rational `eps > 0` with `(x, x+eps)` disjoint from the set.
    pub fn right_gap_points(&self) -> DistanceSet {
        match self {
            DistanceSet::Finite(vals) => DistanceSet::Finite(vals.clone()),
            DistanceSet::Omega(n) => DistanceSet::Omega(*n),
            DistanceSet::SumClosure { cap, .. } => {
                // Uniformly discrete: every element has a right gap. Bounded
                // caps are enumerated; the unbounded closure is returned as
                // itself (exact).
                match cap {
                    XRat::Infinity => self.clone(),
                    XRat::Finite(_) => DistanceSet::Finite(self.enumerate_all()),
                }
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                // Attained right endpoints and point components; rationals are
                // dense in their components, so the gaps agree with the
                // underlying union's.
                let mut vals = Vec::new();
                for c in comps {
                    if let XRat::Finite(h) = &c.hi {
                        if c.hi_closed {
                            vals.push(h.clone());
                        }
                    }
                }
                vals.sort();
                vals.dedup();
                DistanceSet::Finite(vals)
            }
        }
    }

    /// A rational witness for the right gap at `x`: some `eps > 0` with
    /// `(x, x+eps)` disjoint from the set. `None` when `x` has no right gap.
    pub fn right_gap_witness(&self, x: &Rat) -> Option<Rat> {
        if !self.contains(x) {
            return None;
        }
        match self {
            DistanceSet::Finite(vals) => {
                match vals.iter().find(|v| *v > x) {
                    Some(next) => Some(next - x),
                    None => Some(Rat::one()),
                }
            }
            DistanceSet::Omega(_) => Some(Rat::one()),
            DistanceSet::SumClosure { generators, .. } => {
                // Gaps are at least one lattice step wide.
                let lattice = SumLattice::build(generators);
                let step = Rat::from_bigint_ratio(BigInt::one(), lattice.scale.clone());
                let next = x + &step;
                if self.contains(&next) {
                    None
                } else {
                    Some(step)
                }
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                // x must be an attained right endpoint of a component.
                for (i, c) in comps.iter().enumerate() {
                    if let XRat::Finite(h) = &c.hi {
                        if c.hi_closed && h == x {
                            let eps = match comps.get(i + 1) {
                                Some(next) => &next.lo - x,
                                None => Rat::one(),
                            };
                            debug_assert!(eps.is_positive());
                            return Some(eps);
                        }
                    }
                    if c.contains(x) {
                        return None;
                    }
                }
                None
            }
        }
    }

    /// The isolated points of the set.
    pub fn isolated_points(&self) -> DistanceSet {
        match self {
            DistanceSet::Finite(_) | DistanceSet::Omega(_) | DistanceSet::SumClosure { .. } => {
                self.right_gap_points()
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let vals: Vec<Rat> = comps
                    .iter()
                    .filter(|c| c.is_point())
                    .map(|c| c.lo.clone())
                    .collect();
                DistanceSet::Finite(vals)
            }
        }
    }

    /// True iff 0 is an accumulation point of the set: every `(0, eps)`
    /// meets the set.
    pub fn has_zero_limit(&self) -> bool {
        match self {
            DistanceSet::Finite(_) | DistanceSet::Omega(_) => false,
            DistanceSet::SumClosure { .. } => false, // min generator > 0
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => comps
                .first()
                .map(|c| c.lo.is_zero() && !c.is_point())
                .unwrap_or(false),
        }
    }

    /// The countable/closed/zero-limit triple with derivation notes.
    pub fn traits(&self) -> SetTraits {
        let zl = self.has_zero_limit();
        let zero_limit_note = if zl {
            "the component at 0 is nondegenerate".to_string()
        } else {
            "a positive lower bound separates 0 from the rest".to_string()
        };
        match self {
            DistanceSet::Finite(vals) => SetTraits {
                countable: true,
                countable_note: format!("finite set of {} values", vals.len()),
                closed: true,
                closed_note: "finite sets are closed".to_string(),
                zero_limit: zl,
                zero_limit_note,
            },
            DistanceSet::Omega(n) => SetTraits {
                countable: true,
                countable_note: format!("integer segment of length {n}"),
                closed: true,
                closed_note: "discrete integer segment".to_string(),
                zero_limit: zl,
                zero_limit_note,
            },
            DistanceSet::SumClosure { .. } => SetTraits {
                countable: true,
                countable_note: "sums over finitely many generators".to_string(),
                closed: true,
                closed_note: "uniformly discrete lattice subset".to_string(),
                zero_limit: zl,
                zero_limit_note,
            },
            DistanceSet::Intervals(comps) => {
                let closed = comps
                    .iter()
                    .all(|c| c.lo_closed && (c.hi.is_infinite() || c.hi_closed));
                SetTraits {
                    countable: false,
                    countable_note: "contains a nondegenerate real interval".to_string(),
                    closed,
                    closed_note: if closed {
                        "every finite endpoint is attained".to_string()
                    } else {
                        "an open endpoint is a missing limit point".to_string()
                    },
                    zero_limit: zl,
                    zero_limit_note,
                }
            }
            DistanceSet::Rationals(_) => SetTraits {
                countable: true,
                countable_note: "rational points only".to_string(),
                closed: false,
                closed_note: "dense in a nondegenerate interval but not complete".to_string(),
                zero_limit: zl,
                zero_limit_note,
            },
        }
    }

    /// All elements of the intersection with `[0, cap]` whose lowest-terms
    /// denominator is at most `max_denominator`.
    pub fn grid(&self, max_denominator: u64, cap: &Rat) -> Vec<Rat> {
        assert!(max_denominator >= 1);
        let mut out: BTreeSet<Rat> = BTreeSet::new();
        match self {
            DistanceSet::Finite(vals) => {
                for v in vals {
                    if v <= cap && v.denom() <= &BigInt::from(max_denominator) {
                        out.insert(v.clone());
                    }
                }
            }
            DistanceSet::Omega(n) => {
                let top = cap.floor_int().min(BigInt::from(*n) - 1);
                let mut k = BigInt::zero();
                while k <= top {
                    out.insert(Rat::from_bigint_ratio(k.clone(), BigInt::one()));
                    k += 1;
                }
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let capped =
                    intersect_components(comps, &Rat::zero(), true, &XRat::Finite(cap.clone()), true);
                for d in 1..=max_denominator {
                    let dr = int(d as i64);
                    for c in &capped {
                        if let Some(mut p) = least_numerator_in(c, &BigInt::from(d)) {
                            loop {
                                let v = Rat::from_bigint_ratio(p.clone(), BigInt::from(d));
                                if !c.contains(&v) {
                                    break;
                                }
                                out.insert(v);
                                p += 1;
                            }
                        }
                        let _ = &dr;
                    }
                }
            }
            DistanceSet::SumClosure {
                generators,
                cap: set_cap,
                cap_included,
            } => {
                let lattice = SumLattice::build(generators);
                let top = match set_cap {
                    XRat::Infinity => cap.clone(),
                    XRat::Finite(c) => cap.clone().min(c.clone()),
                };
                let scale_rat = Rat::from_bigint_ratio(lattice.scale.clone(), BigInt::one());
                if let Some(k_top) = (&top * &scale_rat).floor_int().to_u64() {
                    for k in lattice.enumerate(Some(k_top), 2_000_000) {
                        let v = lattice.to_rat(k);
                        if let XRat::Finite(c) = set_cap {
                            if v == *c && !cap_included {
                                continue;
                            }
                        }
                        if v.denom() <= &BigInt::from(max_denominator) {
                            out.insert(v);
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// A deterministic enumeration of a countable dense subset, containing
    /// every attained endpoint and isolated point, truncated at `budget`.
    ///
    /// Interval unions are enumerated endpoint-first and then by escalating
    /// denominator (numerators ascending); representations that are already
    /// countable enumerate themselves. A bounded swap-closure audit pass runs
    /// at the end and appends any missing canonical swap values, so that the
    /// emitted prefix is closed under the quadruple-swap demands its own
    /// elements generate.
    pub fn dense_subset(&self, budget: usize) -> Vec<Rat> {
        let mut out: Vec<Rat> = Vec::new();
        let mut seen: BTreeSet<Rat> = BTreeSet::new();
        let push = |v: Rat, out: &mut Vec<Rat>, seen: &mut BTreeSet<Rat>| -> bool {
            if seen.insert(v.clone()) {
                out.push(v);
            }
            out.len() >= budget
        };
        match self {
            DistanceSet::Finite(vals) => {
                for v in vals {
                    if push(v.clone(), &mut out, &mut seen) {
                        break;
                    }
                }
            }
            DistanceSet::Omega(n) => {
                for k in 0..*n {
                    if push(int(k as i64), &mut out, &mut seen) {
                        break;
                    }
                }
            }
            DistanceSet::SumClosure { generators, cap, cap_included } => {
                let lattice = SumLattice::build(generators);
                let scale_rat = Rat::from_bigint_ratio(lattice.scale.clone(), BigInt::one());
                let k_top = match cap {
                    XRat::Infinity => None,
                    XRat::Finite(c) => (c * &scale_rat).floor_int().to_u64(),
                };
                for k in lattice.enumerate(k_top, budget + 1) {
                    let v = lattice.to_rat(k);
                    if let XRat::Finite(c) = cap {
                        if v == *c && !cap_included {
                            continue;
                        }
                    }
                    if push(v, &mut out, &mut seen) {
                        break;
                    }
                }
            }
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                // Phase 1: attained endpoints and point components, ascending.
                let mut firsts: Vec<Rat> = Vec::new();
                for c in comps {
                    if c.lo_closed {
                        firsts.push(c.lo.clone());
                    }
                    if let XRat::Finite(h) = &c.hi {
                        if c.hi_closed {
                            firsts.push(h.clone());
                        }
                    }
                }
                firsts.sort();
                firsts.dedup();
                let mut done = false;
                for v in firsts {
                    if push(v, &mut out, &mut seen) {
                        done = true;
                        break;
                    }
                }
                // Phase 2: escalate (value window, denominator); within one
                // round, order by (denominator, numerator).
                let unbounded = comps.iter().any(|c| c.hi.is_infinite());
                let mut round: u64 = 1;
                while !done {
                    let window_top = XRat::Finite(int(round as i64));
                    let capped = intersect_components(comps, &Rat::zero(), true, &window_top, true);
                    let mut emitted_this_round = false;
                    for d in 1..=round {
                        for c in &capped {
                            if let Some(mut p) = least_numerator_in(c, &BigInt::from(d)) {
                                loop {
                                    let v = Rat::from_bigint_ratio(p.clone(), BigInt::from(d));
                                    if !c.contains(&v) {
                                        break;
                                    }
                                    p += 1;
                                    if v.denom() == &BigInt::from(d) && !seen.contains(&v) {
                                        emitted_this_round = true;
                                        if push(v, &mut out, &mut seen) {
                                            done = true;
                                            break;
                                        }
                                    }
                                }
                            }
                            if done {
                                break;
                            }
                        }
                        if done {
                            break;
                        }
                    }
                    round += 1;
                    if !unbounded && !emitted_this_round && round > 4 {
                        // Bounded unions run out of fresh denominators only at
                        // the budget; this guards degenerate unions of points.
                        if out.len() >= seen.len() && round > budget as u64 + 4 {
                            break;
                        }
                    }
                    if round > budget as u64 + 4 {
                        break;
                    }
                }
            }
        }
        self.swap_close(&mut out, budget);
        out.truncate(budget);
        out
    }

    /// Bounded swap-closure audit: for quadruples drawn from the prefix that
    /// admit a linking element in the prefix, ensure a canonical swap value is
    /// present, appending it if missing.
    fn swap_close(&self, out: &mut Vec<Rat>, budget: usize) {
        let w = out.len().min(10);
        let prefix: Vec<Rat> = out[..w].to_vec();
        let in_prefix = |v: &Rat| prefix.iter().any(|p| p == v);
        for a in &prefix {
            for b in &prefix {
                for c in &prefix {
                    for d in &prefix {
                        if out.len() >= budget {
                            return;
                        }
                        if a < b || a < c || a < d {
                            continue;
                        }
                        // Linking element window.
                        let x_lo = (a - b).abs().max((c - d).abs());
                        let x_hi = (a + b).min(c + d);
                        if x_lo > x_hi {
                            continue;
                        }
                        if prefix.iter().all(|x| *x < x_lo || *x > x_hi) {
                            continue;
                        }
                        let u = (a - d).abs().max((b - c).abs());
                        let l = (a + d).min(b + c);
                        if let Ok(y) = self.range_pick(&u, &l) {
                            if !in_prefix(&y) && !out.contains(&y) {
                                out.push(y);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Enumerates every element of a provably finite representation.
    /// Panics on infinite representations.
    pub fn enumerate_all(&self) -> Vec<Rat> {
        match self {
            DistanceSet::Finite(vals) => vals.clone(),
            DistanceSet::Omega(n) => (0..*n).map(|k| int(k as i64)).collect(),
            DistanceSet::SumClosure {
                generators,
                cap: XRat::Finite(c),
                cap_included,
            } => {
                let lattice = SumLattice::build(generators);
                let scale_rat = Rat::from_bigint_ratio(lattice.scale.clone(), BigInt::one());
                let k_top = (c * &scale_rat)
                    .floor_int()
                    .to_u64()
                    .expect("cap too large to enumerate");
                lattice
                    .enumerate(Some(k_top), 2_000_000)
                    .into_iter()
                    .map(|k| lattice.to_rat(k))
                    .filter(|v| *v < *c || (*v == *c && *cap_included))
                    .collect()
            }
            _ => panic!("enumerate_all on an infinite representation"),
        }
    }

    /// True when the representation denotes a finite set.
    pub fn is_finite_representation(&self) -> bool {
        matches!(
            self,
            DistanceSet::Finite(_)
                | DistanceSet::Omega(_)
                | DistanceSet::SumClosure {
                    cap: XRat::Finite(_),
                    ..
                }
        )
    }

    /// The maximal open gaps of the set inside `[0, +inf)`: intervals between
    /// consecutive components (and above the last bounded component). Only
    /// meaningful for interval-union representations; finite and discrete
    /// representations expose their gaps through `right_gap_points`.
    pub fn interval_gaps(&self) -> Vec<(XRat, bool, XRat, bool)> {
        // Each gap is (lo, lo_in_set, hi, hi_in_set): the gap is the open-ish
        // region strictly between; a bound belongs to the gap iff the bound
        // value is NOT in the set.
        match self {
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let mut gaps = Vec::new();
                for w in comps.windows(2) {
                    let a = &w[0];
                    let b = &w[1];
                    if let XRat::Finite(h) = &a.hi {
                        gaps.push((
                            XRat::Finite(h.clone()),
                            a.hi_closed,
                            XRat::Finite(b.lo.clone()),
                            b.lo_closed,
                        ));
                    }
                }
                if let Some(last) = comps.last() {
                    if let XRat::Finite(h) = &last.hi {
                        gaps.push((
                            XRat::Finite(h.clone()),
                            last.hi_closed,
                            XRat::Infinity,
                            false,
                        ));
                    }
                }
                gaps
            }
            _ => Vec::new(),
        }
    }

    /// Largest finite scalar mentioned by the representation; used to derive
    /// sampling caps.
    pub fn largest_finite_scalar(&self) -> Rat {
        match self {
            DistanceSet::Finite(vals) => vals.last().cloned().unwrap_or_else(Rat::zero),
            DistanceSet::Omega(n) => int((*n as i64) - 1),
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => {
                let mut best = Rat::zero();
                for c in comps {
                    best = best.max(c.lo.clone());
                    if let XRat::Finite(h) = &c.hi {
                        best = best.max(h.clone());
                    }
                }
                best
            }
            DistanceSet::SumClosure {
                generators, cap, ..
            } => {
                let mut best = Rat::zero();
                for g in generators {
                    best = best.max(g.clone());
                }
                if let XRat::Finite(c) = cap {
                    best = best.max(c.clone());
                }
                best
            }
        }
    }

    /// Components of interval-union representations.
    pub fn components(&self) -> Option<&[Interval]> {
        match self {
            DistanceSet::Intervals(comps) | DistanceSet::Rationals(comps) => Some(comps),
            _ => None,
        }
    }
}

impl fmt::Display for DistanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceSet::Finite(vals) => {
                write!(f, "{{")?;
                for (i, v) in vals.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
            DistanceSet::Intervals(comps) => {
                let parts: Vec<String> = comps.iter().map(|c| c.render()).collect();
                write!(f, "{}", parts.join(" u "))
            }
            DistanceSet::Rationals(comps) => {
                let parts: Vec<String> = comps
                    .iter()
                    .map(|c| {
                        if c.is_point() {
                            c.render()
                        } else {
                            format!("rationals{}", c.render())
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" u "))
            }
            DistanceSet::Omega(n) => write!(f, "omega({n})"),
            DistanceSet::SumClosure {
                generators, cap, ..
            } => {
                let gens: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                write!(f, "sumclosed({}; {})", gens.join(","), cap)
            }
        }
    }
}
