//! Exact linear-arithmetic decision for the interval-union failure search.
//!
//! A potential failure of the four-values condition over an interval union is
//! a conjunction of rational linear constraints once (i) every variable is
//! pinned to a component, (ii) the sign cases of the absolute values and the
//! min/max selections are fixed, and (iii) the empty-intersection requirement
//! is expanded as "the swap interval sits inside one gap of the union". Each
//! such cell is decided exactly by Fourier-Motzkin elimination; a feasible
//! cell yields a rational witness by back-substitution.

use crate::rat::{Rat, XRat};
use crate::sets::Interval;
use std::collections::BTreeSet;

pub const NVARS: usize = 5; // a, b, c, d, x

/// `sum(coeffs[i] * v[i]) <= rhs`, or `<` when strict.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub strict: bool,
}

impl Row {
    fn new(pairs: &[(usize, i64)], rhs: Rat, strict: bool) -> Row {
        let mut coeffs = vec![Rat::zero(); NVARS];
        for &(v, c) in pairs {
            coeffs[v] = &coeffs[v] + &Rat::from_int(c);
        }
        Row { coeffs, rhs, strict }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// A constant row is violated iff `0 <= rhs` (or `< rhs`) fails.
    fn constant_violated(&self) -> bool {
        self.rhs.is_negative() || (self.rhs.is_zero() && self.strict)
    }

    fn normalized(mut self) -> Row {
        if let Some(first) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let scale = first.abs();
            for c in &mut self.coeffs {
                *c = &*c / &scale;
            }
            self.rhs = &self.rhs / &scale;
        }
        self
    }
}

/// Eliminates `var` by combining positive and negative rows. Constant rows
/// are checked on the fly; returns `None` as soon as infeasibility is proven.
fn eliminate(rows: &[Row], var: usize) -> Option<Vec<Row>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut rest: BTreeSet<Row> = BTreeSet::new();
    for r in rows {
        if r.coeffs[var].is_positive() {
            pos.push(r);
        } else if r.coeffs[var].is_negative() {
            neg.push(r);
        } else if r.is_constant() {
            if r.constant_violated() {
                return None;
            }
        } else {
            rest.insert(r.clone().normalized());
        }
    }
    for p in &pos {
        for n in &neg {
            // p: cp*x + P <= rp (cp > 0); n: cn*x + N <= rn (cn < 0).
            // Combine with weights |cn| and cp to cancel x.
            let wp = n.coeffs[var].abs();
            let wn = p.coeffs[var].clone();
            let mut coeffs = Vec::with_capacity(NVARS);
            for i in 0..NVARS {
                coeffs.push(&(&p.coeffs[i] * &wp) + &(&n.coeffs[i] * &wn));
            }
            debug_assert!(coeffs[var].is_zero());
            let row = Row {
                coeffs,
                rhs: &(&p.rhs * &wp) + &(&n.rhs * &wn),
                strict: p.strict || n.strict,
            }
            .normalized();
            if row.is_constant() {
                if row.constant_violated() {
                    return None;
                }
            } else {
                rest.insert(row);
            }
        }
    }
    Some(rest.into_iter().collect())
}

/// Minimal-denominator (then minimal-numerator) rational within generalized
/// bounds. `lo`/`hi` may be absent (unbounded); bound flags say whether the
/// bound itself is admissible. Any nonempty rational range yields a value.
pub fn min_denominator_in(lo: Option<(&Rat, bool)>, hi: Option<(&Rat, bool)>) -> Option<Rat> {
    if let (Some((l, lc)), Some((h, hc))) = (lo, hi) {
        if l > h || (l == h && !(lc && hc)) {
            return None;
        }
    }
    // Prefer 0 whenever it is admissible.
    let zero = Rat::zero();
    let zero_ok = match (lo, hi) {
        (None, None) => true,
        (Some((l, lc)), None) => l.is_negative() || (l.is_zero() && lc),
        (None, Some((h, hc))) => h.is_positive() || (h.is_zero() && hc),
        (Some((l, lc)), Some((h, hc))) => {
            (l.is_negative() || (l.is_zero() && lc)) && (h.is_positive() || (h.is_zero() && hc))
        }
    };
    if zero_ok {
        return Some(zero);
    }
    match lo {
        Some((l, lc)) if !l.is_negative() => {
            crate::rat::simplest_in(l, !lc, hi.map(|(h, hc)| (h, !hc)))
        }
        _ => {
            // Entirely below zero: mirror the range and negate.
            let (h, hc) = hi.expect("a range without bounds admits 0");
            debug_assert!(h.is_negative() || (h.is_zero() && !hc));
            let m_lo = -h;
            let m_hi = lo.map(|(l, lc)| (-l, !lc));
            let v = crate::rat::simplest_in(&m_lo, !hc, m_hi.as_ref().map(|(b, s)| (b, *s)))?;
            Some(-v)
        }
    }
}

/// Decides feasibility of the system, optionally extracting a rational
/// solution with small denominators.
pub fn solve(rows: Vec<Row>) -> Option<Vec<Rat>> {
    // Keep the system at every level for back-substitution. Variables are
    // eliminated from the highest index down.
    let mut levels: Vec<Vec<Row>> = Vec::with_capacity(NVARS + 1);
    levels.push(rows);
    for var in (0..NVARS).rev() {
        let next = eliminate(levels.last().unwrap(), var)?;
        levels.push(next);
    }
    // levels[k] has variables 0..NVARS-k alive; levels[NVARS] is constant-free
    // and feasible. Assign variables in ascending index order.
    let mut solution: Vec<Rat> = Vec::with_capacity(NVARS);
    for var in 0..NVARS {
        let system = &levels[NVARS - var - 1];
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for r in system {
            let c = &r.coeffs[var];
            if c.is_zero() {
                continue;
            }
            // All variables with index < var are fixed; indices > var have
            // been eliminated at this level.
            let mut rest = r.rhs.clone();
            for (i, s) in solution.iter().enumerate() {
                rest = &rest - &(&r.coeffs[i] * s);
            }
            let bound = &rest / c;
            if c.is_positive() {
                // var <= bound (strict?)
                let tighter = match &hi {
                    None => true,
                    Some((h, hc)) => bound < *h || (bound == *h && *hc && r.strict),
                };
                if tighter {
                    hi = Some((bound, !r.strict));
                }
            } else {
                // var >= bound
                let tighter = match &lo {
                    None => true,
                    Some((l, lc)) => bound > *l || (bound == *l && *lc && r.strict),
                };
                if tighter {
                    lo = Some((bound, !r.strict));
                }
            }
        }
        let v = min_denominator_in(
            lo.as_ref().map(|(l, c)| (l, *c)),
            hi.as_ref().map(|(h, c)| (h, *c)),
        )
        .expect("feasible system must admit back-substitution");
        solution.push(v);
    }
    Some(solution)
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const X: usize = 4;

/// Sign case for |c - d| in the linking-element constraint.
#[derive(Clone, Copy, PartialEq, Eq)]
enum CdCase {
    CGeD,
    DGeC,
}

/// Which expression attains u = max(a-d, |b-c|).
#[derive(Clone, Copy, PartialEq, Eq)]
enum UCase {
    AminusD,
    BminusC,
    CminusB,
}

/// Which expression attains l = min(a+d, b+c).
#[derive(Clone, Copy, PartialEq, Eq)]
enum LCase {
    AplusD,
    BplusC,
}

/// The linear expression (as coefficient pairs) of u and l under a case.
fn u_expr(case: UCase) -> Vec<(usize, i64)> {
    match case {
        UCase::AminusD => vec![(A, 1), (D, -1)],
        UCase::BminusC => vec![(B, 1), (C, -1)],
        UCase::CminusB => vec![(C, 1), (B, -1)],
    }
}

fn l_expr(case: LCase) -> Vec<(usize, i64)> {
    match case {
        LCase::AplusD => vec![(A, 1), (D, 1)],
        LCase::BplusC => vec![(B, 1), (C, 1)],
    }
}

fn negate(pairs: &[(usize, i64)]) -> Vec<(usize, i64)> {
    pairs.iter().map(|&(v, c)| (v, -c)).collect()
}

/// Cheap per-variable bound propagation to discard obviously dead cells
/// before running the eliminator.
fn plausible(rows: &[Row], bounds: &[(Rat, Option<Rat>)]) -> bool {
    for r in rows {
        // Minimal possible LHS.
        let mut min = Rat::zero();
        let mut unbounded = false;
        for (i, c) in r.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_positive() {
                min = &min + &(c * &bounds[i].0);
            } else {
                match &bounds[i].1 {
                    Some(hi) => min = &min + &(c * hi),
                    None => {
                        unbounded = true;
                        break;
                    }
                }
            }
        }
        if !unbounded && min > r.rhs {
            return false;
        }
    }
    true
}

/// A feasible failure cell, solved: the five witness values.
pub struct CellSolution {
    pub values: [Rat; NVARS],
    pub gap_note: String,
}

/// Searches every failure cell of the union; returns a solved cell if the
/// four-values condition fails, `None` if every cell is infeasible (the
/// condition holds). `cell_budget` guards against blowups on unions with very
/// many components.
pub fn find_failure(comps: &[Interval], gaps: &[(XRat, bool, XRat, bool)], cell_budget: usize)
    -> Result<Option<CellSolution>, usize>
{
    if gaps.is_empty() {
        return Ok(None);
    }
    let ncomp = comps.len();
    let total_cells = ncomp
        .checked_pow(5)
        .and_then(|c| c.checked_mul(gaps.len() * 12))
        .unwrap_or(usize::MAX);
    if total_cells > cell_budget {
        return Err(total_cells);
    }

    let comp_bounds: Vec<(Rat, Option<Rat>)> = comps
        .iter()
        .map(|c| {
            let hi = match c.hi() {
                XRat::Finite(h) => Some(h.clone()),
                XRat::Infinity => None,
            };
            (c.lo().clone(), hi)
        })
        .collect();

    let mut assignment = [0usize; NVARS];
    let mut best: Option<CellSolution> = None;
    search_components(
        comps,
        &comp_bounds,
        gaps,
        0,
        &mut assignment,
        &mut best,
    );
    Ok(best)
}

fn search_components(
    comps: &[Interval],
    comp_bounds: &[(Rat, Option<Rat>)],
    gaps: &[(XRat, bool, XRat, bool)],
    var: usize,
    assignment: &mut [usize; NVARS],
    best: &mut Option<CellSolution>,
) {
    if best.is_some() {
        return;
    }
    if var == NVARS {
        try_cases(comps, comp_bounds, gaps, assignment, best);
        return;
    }
    for comp in 0..comps.len() {
        assignment[var] = comp;
        // a is the maximum: prune component choices whose ranges cannot
        // satisfy var <= a.
        if var != A {
            let (a_lo, a_hi) = &comp_bounds[assignment[A]];
            let (v_lo, _v_hi) = &comp_bounds[comp];
            let _ = a_lo;
            if let Some(a_hi) = a_hi {
                if v_lo > a_hi {
                    continue;
                }
            }
        }
        search_components(comps, comp_bounds, gaps, var + 1, assignment, best);
        if best.is_some() {
            return;
        }
    }
}

fn try_cases(
    comps: &[Interval],
    comp_bounds: &[(Rat, Option<Rat>)],
    gaps: &[(XRat, bool, XRat, bool)],
    assignment: &[usize; NVARS],
    best: &mut Option<CellSolution>,
) {
    let mut base: Vec<Row> = Vec::new();
    // Component membership.
    let var_bounds: Vec<(Rat, Option<Rat>)> = (0..NVARS)
        .map(|v| comp_bounds[assignment[v]].clone())
        .collect();
    for v in 0..NVARS {
        let c = &comps[assignment[v]];
        base.push(Row::new(&[(v, -1)], -c.lo().clone(), !c.lo_closed()));
        if let XRat::Finite(h) = c.hi() {
            base.push(Row::new(&[(v, 1)], h.clone(), !c.hi_closed()));
        }
    }
    // a >= b, c, d.
    for v in [B, C, D] {
        base.push(Row::new(&[(v, 1), (A, -1)], Rat::zero(), false));
    }
    // Linking element: x >= a-b, x <= a+b, x <= c+d.
    base.push(Row::new(&[(A, 1), (B, -1), (X, -1)], Rat::zero(), false));
    base.push(Row::new(&[(X, 1), (A, -1), (B, -1)], Rat::zero(), false));
    base.push(Row::new(&[(X, 1), (C, -1), (D, -1)], Rat::zero(), false));

    for cd in [CdCase::CGeD, CdCase::DGeC] {
        let mut rows_cd = base.clone();
        match cd {
            CdCase::CGeD => {
                rows_cd.push(Row::new(&[(D, 1), (C, -1)], Rat::zero(), false));
                rows_cd.push(Row::new(&[(C, 1), (D, -1), (X, -1)], Rat::zero(), false));
            }
            CdCase::DGeC => {
                rows_cd.push(Row::new(&[(C, 1), (D, -1)], Rat::zero(), false));
                rows_cd.push(Row::new(&[(D, 1), (C, -1), (X, -1)], Rat::zero(), false));
            }
        }
        for ucase in [UCase::AminusD, UCase::BminusC, UCase::CminusB] {
            let mut rows_u = rows_cd.clone();
            let u = u_expr(ucase);
            match ucase {
                UCase::AminusD => {
                    // a-d >= b-c and a-d >= c-b.
                    rows_u.push(Row::new(&[(B, 1), (C, -1), (A, -1), (D, 1)], Rat::zero(), false));
                    rows_u.push(Row::new(&[(C, 1), (B, -1), (A, -1), (D, 1)], Rat::zero(), false));
                }
                UCase::BminusC => {
                    rows_u.push(Row::new(&[(C, 1), (B, -1)], Rat::zero(), false));
                    rows_u.push(Row::new(&[(A, 1), (D, -1), (B, -1), (C, 1)], Rat::zero(), false));
                }
                UCase::CminusB => {
                    rows_u.push(Row::new(&[(B, 1), (C, -1)], Rat::zero(), false));
                    rows_u.push(Row::new(&[(A, 1), (D, -1), (C, -1), (B, 1)], Rat::zero(), false));
                }
            }
            for lcase in [LCase::AplusD, LCase::BplusC] {
                let mut rows_l = rows_u.clone();
                let l = l_expr(lcase);
                match lcase {
                    LCase::AplusD => rows_l.push(Row::new(
                        &[(A, 1), (D, 1), (B, -1), (C, -1)],
                        Rat::zero(),
                        false,
                    )),
                    LCase::BplusC => rows_l.push(Row::new(
                        &[(B, 1), (C, 1), (A, -1), (D, -1)],
                        Rat::zero(),
                        false,
                    )),
                }
                for (gi, (glo, glo_in_set, ghi, ghi_in_set)) in gaps.iter().enumerate() {
                    let mut rows = rows_l.clone();
                    // u above the gap floor: glo - u <= 0 (strict when the
                    // floor value itself belongs to the set).
                    if let XRat::Finite(e) = glo {
                        rows.push(Row::new(&negate(&u), -e.clone(), *glo_in_set));
                    }
                    // l below the gap ceiling.
                    if let XRat::Finite(s) = ghi {
                        rows.push(Row::new(&l, s.clone(), *ghi_in_set));
                    }
                    if !plausible(&rows, &var_bounds) {
                        continue;
                    }
                    if let Some(values) = solve(rows) {
                        let values: [Rat; NVARS] = values.try_into().unwrap();
                        let gap_note = format!(
                            "the swap interval lies in the gap ({}, {}) of the set",
                            glo, ghi
                        );
                        let _ = gi;
                        *best = Some(CellSolution { values, gap_note });
                        return;
                    }
                }
            }
        }
    }
}
