//! Incremental construction of finite approximations of the countable
//! universal space over a distance set.
//!
//! The builder grows a space one realization at a time. A fair schedule
//! enumerates type functions over the points built so far with values drawn
//! from an enumeration of the set; every type function over every stage is
//! eventually scheduled. A type whose realization already exists is logged
//! and skipped; otherwise the span of the type is amalgamated onto the space,
//! with the free cross distances chosen by a seeded picker so that different
//! seeds grow different (but age-equal) spaces.

use crate::amalgam::{amalgamate_with_picker, AmalgamError, SharedMap};
use crate::fourvalues::check;
use crate::isometry::PartialIsometry;
use crate::rat::{Rat, XRat};
use crate::sets::DistanceSet;
use crate::space::{span_space, typeset, FiniteMetricSpace, TypeFunction};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("the distance set fails the four-values condition: {0}")]
    SetFailsFourValues(String),
    #[error("type function is not restricted: {0}")]
    NotRestricted(String),
    #[error("no admissible distance during realization: {0}")]
    Amalgam(#[from] AmalgamError),
    #[error("type function not realized within the budget of {budget} attempts")]
    Unrealized { budget: usize },
    #[error("size cap exceeded: {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("point index {0} out of range")]
    OutOfRange(usize),
}

/// What happened at one stage of the build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    /// A new point was added at the given index.
    Realized(usize),
    /// The type already had a realization at the given index.
    Skipped(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub stage: u64,
    pub dom: Vec<usize>,
    pub values: Vec<Rat>,
    pub action: Action,
}

impl LogEntry {
    /// One line in the exchange format:
    /// `stage=<k> type=<dom>:<values> action=realized|skipped point=<idx>`.
    pub fn render(&self) -> String {
        let dom: Vec<String> = self.dom.iter().map(|d| d.to_string()).collect();
        let vals: Vec<String> = self.values.iter().map(|v| v.frac()).collect();
        let (action, point) = match self.action {
            Action::Realized(p) => ("realized", p),
            Action::Skipped(p) => ("skipped", p),
        };
        format!(
            "stage={} type={}:{} action={} point={}",
            self.stage,
            dom.join(","),
            vals.join(","),
            action,
            point
        )
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub seed: u64,
    /// Number of enumeration elements attached for infinite sets.
    pub value_budget: usize,
    /// Record skipped stages in the log (disable for very long runs).
    pub log_skips: bool,
    /// Fast-lane bound on scheduled domain sizes; larger domains arrive
    /// through the slow lane.
    pub small_dom_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> BuildOptions {
        BuildOptions {
            seed: 1,
            value_budget: 24,
            log_skips: true,
            small_dom_cap: 3,
        }
    }
}

/// A scheduled candidate: domain point indices plus indices into the value
/// enumeration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    dom: Vec<usize>,
    vals: Vec<usize>,
}

/// The growing approximation.
pub struct BuildState {
    set: DistanceSet,
    values: Vec<Rat>,
    space: FiniteMetricSpace,
    stage: u64,
    tick: u64,
    points_admitted: usize,
    values_admitted: usize,
    queue: VecDeque<Candidate>,
    slow_scheduled: BTreeSet<Candidate>,
    rng: ChaCha8Rng,
    log: Vec<LogEntry>,
    opts: BuildOptions,
}

/// Base number of enumeration values admitted at the first tick.
const VALUE_BASE: usize = 2;

/// Starts a build: verifies the four-values precondition, attaches a value
/// enumeration, seeds the space with a single point, and runs `stages`
/// schedule steps.
pub fn build(set: &DistanceSet, stages: u64, seed: u64) -> Result<BuildState, BuildError> {
    let opts = BuildOptions {
        seed,
        ..BuildOptions::default()
    };
    let mut st = BuildState::new(set, opts)?;
    st.run(stages)?;
    Ok(st)
}

impl BuildState {
    pub fn new(set: &DistanceSet, opts: BuildOptions) -> Result<BuildState, BuildError> {
        let verdict = check(set);
        if !verdict.holds() {
            let detail = match &verdict.witness {
                Some(w) => format!(
                    "witness x={} quadruple=({},{},{},{}) gap=[{},{}]",
                    w.x.frac(),
                    w.quad.a.frac(),
                    w.quad.b.frac(),
                    w.quad.c.frac(),
                    w.quad.d.frac(),
                    w.gap_lo.frac(),
                    w.gap_hi.frac()
                ),
                None => verdict.note.clone(),
            };
            return Err(BuildError::SetFailsFourValues(detail));
        }
        let values: Vec<Rat> = if set.is_finite_representation() {
            set.enumerate_all()
                .into_iter()
                .filter(|v| v.is_positive())
                .collect()
        } else {
            set.dense_subset(opts.value_budget + 1)
                .into_iter()
                .filter(|v| v.is_positive())
                .take(opts.value_budget)
                .collect()
        };
        Ok(BuildState {
            set: set.clone(),
            values,
            space: FiniteMetricSpace::point(),
            stage: 0,
            tick: 0,
            points_admitted: 0,
            values_admitted: 0,
            queue: VecDeque::new(),
            slow_scheduled: BTreeSet::new(),
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            log: Vec::new(),
            opts,
        })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn set(&self) -> &DistanceSet {
        &self.set
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Processes up to `stages` schedule steps. Stops early only if the
    /// schedule is exhausted, which cannot happen while new points keep
    /// being admitted.
    pub fn run(&mut self, stages: u64) -> Result<(), BuildError> {
        let target = self.stage + stages;
        while self.stage < target {
            if self.queue.is_empty() && !self.refill() {
                break;
            }
            let cand = match self.queue.pop_front() {
                Some(c) => c,
                None => break,
            };
            let t = self.candidate_type(&cand);
            if span_space(&self.space, &t).is_err() {
                // Not a metric extension; not a type function worth a stage.
                continue;
            }
            self.process(&t)?;
        }
        Ok(())
    }

    fn candidate_type(&self, cand: &Candidate) -> TypeFunction {
        TypeFunction::new(
            cand.dom
                .iter()
                .zip(&cand.vals)
                .map(|(&p, &v)| (p, self.values[v].clone())),
        )
    }

    /// Admits pending points/values and generates their candidates; ticks
    /// forward until the queue is nonempty. Returns false when the schedule
    /// cannot produce anything new.
    fn refill(&mut self) -> bool {
        let mut idle_ticks = 0u32;
        while self.queue.is_empty() {
            self.tick += 1;
            idle_ticks += 1;
            let mut batch: Vec<Candidate> = Vec::new();

            // Value admissions: tuples whose maximal index is new, over the
            // points admitted so far.
            let value_target = (VALUE_BASE + self.tick as usize).min(self.values.len());
            while self.values_admitted < value_target {
                let k = self.values_admitted;
                self.gen_for_new_value(k, &mut batch);
                self.values_admitted += 1;
            }

            // Point admissions: domains whose maximal point is new, with all
            // admitted values.
            let point_target = (self.tick as usize).min(self.space.len());
            while self.points_admitted < point_target {
                let p = self.points_admitted;
                self.gen_for_new_point(p, &mut batch);
                self.points_admitted += 1;
            }

            // Slow lane at powers of two: domains larger than the fast-lane
            // cap over a slowly growing prefix.
            if self.tick.is_power_of_two() {
                self.gen_slow_lane(&mut batch);
            }

            batch.sort_by(|a, b| {
                (a.dom.len(), &a.dom, &a.vals).cmp(&(b.dom.len(), &b.dom, &b.vals))
            });
            self.queue.extend(batch);

            if self.queue.is_empty() {
                let more_points = self.points_admitted < self.space.len();
                let more_values = self.values_admitted < self.values.len();
                if !more_points && !more_values {
                    // Jump to the next slow-lane tick; give up once the slow
                    // lane has covered everything reachable.
                    let next = (self.tick + 1).next_power_of_two();
                    if next.ilog2() as usize
                        > self.space.len().max(self.values.len()) + self.opts.small_dom_cap + 2
                        || idle_ticks > 64
                    {
                        return false;
                    }
                    self.tick = next - 1;
                }
            }
        }
        true
    }

    fn admitted_value_indices(&self) -> std::ops::Range<usize> {
        0..self.values_admitted
    }

    /// All domains containing `p` within `0..=p`, of size at most the fast
    /// cap, with every admitted value tuple.
    fn gen_for_new_point(&self, p: usize, batch: &mut Vec<Candidate>) {
        let cap = self.opts.small_dom_cap;
        let mut doms: Vec<Vec<usize>> = Vec::new();
        let rest: Vec<usize> = (0..p).collect();
        for k in 0..cap.min(rest.len() + 1) {
            for mut pick in combinations(&rest, k) {
                pick.push(p);
                doms.push(pick);
            }
        }
        for dom in doms {
            self.push_value_tuples(&dom, self.admitted_value_indices().end, None, batch);
        }
    }

    /// All tuples whose maximal value index is `k`, over already-admitted
    /// domains.
    fn gen_for_new_value(&self, k: usize, batch: &mut Vec<Candidate>) {
        let cap = self.opts.small_dom_cap;
        let pts: Vec<usize> = (0..self.points_admitted).collect();
        for size in 1..=cap.min(pts.len()) {
            for dom in combinations(&pts, size) {
                self.push_value_tuples(&dom, k + 1, Some(k), batch);
            }
        }
    }

    /// Emits (dom, value tuple) candidates; when `must_contain` is set, only
    /// tuples containing that value index.
    fn push_value_tuples(
        &self,
        dom: &[usize],
        value_bound: usize,
        must_contain: Option<usize>,
        batch: &mut Vec<Candidate>,
    ) {
        let k = dom.len();
        if value_bound == 0 {
            return;
        }
        let mut tuple = vec![0usize; k];
        loop {
            let admissible = match must_contain {
                Some(m) => tuple.iter().any(|&v| v == m),
                None => true,
            };
            if admissible {
                batch.push(Candidate {
                    dom: dom.to_vec(),
                    vals: tuple.clone(),
                });
            }
            let mut i = 0;
            loop {
                tuple[i] += 1;
                if tuple[i] < value_bound {
                    break;
                }
                tuple[i] = 0;
                i += 1;
                if i == k {
                    return;
                }
            }
        }
    }

    fn gen_slow_lane(&mut self, batch: &mut Vec<Candidate>) {
        let q = (self.tick.ilog2() as usize).max(1);
        let pts: Vec<usize> = (0..q.min(self.space.len())).collect();
        let vbound = q.min(self.values.len());
        let cap = self.opts.small_dom_cap;
        for size in (cap + 1)..=q.min(pts.len()) {
            for dom in combinations(&pts, size) {
                let mut tuple = vec![0usize; size];
                loop {
                    let cand = Candidate {
                        dom: dom.clone(),
                        vals: tuple.clone(),
                    };
                    if !self.slow_scheduled.contains(&cand) {
                        self.slow_scheduled.insert(cand.clone());
                        batch.push(cand);
                    }
                    let mut i = 0;
                    loop {
                        tuple[i] += 1;
                        if tuple[i] < vbound {
                            break;
                        }
                        tuple[i] = 0;
                        i += 1;
                        if i == size {
                            break;
                        }
                    }
                    if i == size {
                        break;
                    }
                }
            }
        }
    }

    /// Realizes one restricted type function (or logs a skip when already
    /// realized) and advances the stage counter.
    fn process(&mut self, t: &TypeFunction) -> Result<Action, BuildError> {
        self.stage += 1;
        let present = typeset(&self.space, t);
        let action = if let Some(&w) = present.first() {
            Action::Skipped(w)
        } else {
            let new_point = self.realize_now(t)?;
            Action::Realized(new_point)
        };
        if self.opts.log_skips || matches!(action, Action::Realized(_)) {
            self.log.push(LogEntry {
                stage: self.stage,
                dom: t.dom_vec(),
                values: t.dom().map(|p| t.value(p).unwrap().clone()).collect(),
                action: action.clone(),
            });
        }
        Ok(action)
    }

    /// Adds one point realizing the type, choosing free cross distances by
    /// seed from the value enumeration (canonical fallback).
    fn realize_now(&mut self, t: &TypeFunction) -> Result<usize, BuildError> {
        let span = span_space(&self.space, t)
            .map_err(|e| BuildError::NotRestricted(e.to_string()))?;
        let dom = t.dom_vec();
        // The span lists the domain first and the new point last.
        let shared = SharedMap::new(
            &span,
            &self.space,
            dom.iter().enumerate().map(|(i, &p)| (i, p)),
        )?;
        let values = self.values.clone();
        let rng = &mut self.rng;
        let mut picker = |lo: &Rat, hi: &XRat| -> Option<Rat> {
            let choices: Vec<&Rat> = values
                .iter()
                .filter(|v| {
                    v.is_positive()
                        && **v >= *lo
                        && match hi {
                            XRat::Infinity => true,
                            XRat::Finite(h) => **v <= *h,
                        }
                })
                .collect();
            if choices.is_empty() {
                None
            } else {
                Some(choices[rng.random_range(0..choices.len())].clone())
            }
        };
        let result = amalgamate_with_picker(&span, &self.space, &shared, &self.set, &mut picker)?;
        let new_index = result.a_map[dom.len()];
        self.space = result.space;
        Ok(new_index)
    }

    /// Validates that a type function is restricted (metric span, values in
    /// the set) and realizes it immediately, outside the schedule.
    pub fn realize_type(&mut self, t: &TypeFunction) -> Result<Action, BuildError> {
        for (p, v) in t.iter() {
            if p >= self.space.len() {
                return Err(BuildError::OutOfRange(p));
            }
            if !self.set.contains(v) {
                return Err(BuildError::NotRestricted(format!(
                    "value {v} is not in the distance set"
                )));
            }
        }
        if let Err(e) = span_space(&self.space, t) {
            return Err(BuildError::NotRestricted(e.to_string()));
        }
        self.process(t)
    }

    /// Extends a partial isometry of the space into itself by one point:
    /// realizes the transported type if necessary.
    pub fn extend_isometry(
        &mut self,
        f: &PartialIsometry,
        target_point: usize,
        budget: usize,
    ) -> Result<PartialIsometry, BuildError> {
        if target_point >= self.space.len() {
            return Err(BuildError::OutOfRange(target_point));
        }
        assert!(
            f.get(target_point).is_none(),
            "target point already in the domain"
        );
        let transported = TypeFunction::new(f.pairs().map(|(s, img)| {
            (img, self.space.dist(target_point, s).clone())
        }));
        for _ in 0..budget.max(1) {
            let used: BTreeSet<usize> = f.range().collect();
            let witnesses = typeset(&self.space, &transported);
            if let Some(&w) = witnesses.iter().find(|w| !used.contains(w)) {
                let mut g = f.clone();
                g.insert(target_point, w);
                return Ok(g);
            }
            self.realize_type(&transported)?;
        }
        Err(BuildError::Unrealized { budget })
    }

    /// Enumerates every restricted type function with domain size at most
    /// `domain_cap` and values in `value_set`, reporting realized/pending.
    pub fn audit_extension(&self, domain_cap: usize, value_set: &[Rat]) -> AuditReport {
        audit_space(&self.space, domain_cap, value_set)
    }

    /// Lines of the build log in the exchange format.
    pub fn render_log(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            out.push_str(&e.render());
            out.push('\n');
        }
        out
    }
}

/// Outcome of an extension audit.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub domain_cap: usize,
    pub total: u64,
    pub realized: u64,
    /// First few pending types, as (domain, values).
    pub pending: Vec<(Vec<usize>, Vec<Rat>)>,
    pub pending_total: u64,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.pending_total == 0
    }
}

const PENDING_SAMPLE: usize = 32;

/// Extension audit against an arbitrary space.
pub fn audit_space(space: &FiniteMetricSpace, domain_cap: usize, value_set: &[Rat]) -> AuditReport {
    let n = space.len();
    // Intern distances and candidate values into small ids.
    let mut vals: Vec<Rat> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            vals.push(space.dist(i, j).clone());
        }
    }
    vals.extend(value_set.iter().cloned());
    vals.sort();
    vals.dedup();
    let id_of = |v: &Rat| -> u32 { vals.binary_search(v).unwrap() as u32 };
    let mut ids = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ids[i * n + j] = id_of(space.dist(i, j));
            }
        }
    }
    let value_ids: Vec<u32> = value_set.iter().map(|v| id_of(v)).collect();
    // Pairwise metric compatibility: values (va, vb) across a domain pair at
    // distance g iff |va-vb| <= g <= va+vb.
    let mut pair_ok = vec![false; vals.len() * value_set.len() * value_set.len()];
    let stride = value_set.len();
    for (gi, g) in vals.iter().enumerate() {
        for (ai, va) in value_set.iter().enumerate() {
            for (bi, vb) in value_set.iter().enumerate() {
                let ok = (va - vb).abs() <= *g && *g <= va + vb;
                pair_ok[(gi * stride + ai) * stride + bi] = ok;
            }
        }
    }

    let mut total = 0u64;
    let mut realized = 0u64;
    let mut pending_total = 0u64;
    let mut pending = Vec::new();
    let points: Vec<usize> = (0..n).collect();
    for k in 1..=domain_cap.min(n) {
        for dom in combinations(&points, k) {
            // Witnessed value-id patterns over this domain.
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            for y in 0..n {
                if dom.contains(&y) {
                    continue;
                }
                seen.insert(dom.iter().map(|&s| ids[y * n + s]).collect());
            }
            // All metric value tuples.
            let mut tuple = vec![0usize; k];
            'tuples: loop {
                let mut metric = true;
                'pairs: for ai in 0..k {
                    for bi in (ai + 1)..k {
                        let g = ids[dom[ai] * n + dom[bi]] as usize;
                        if !pair_ok[(g * stride + tuple[ai]) * stride + tuple[bi]] {
                            metric = false;
                            break 'pairs;
                        }
                    }
                }
                if metric {
                    total += 1;
                    let pattern: Vec<u32> = tuple.iter().map(|&v| value_ids[v]).collect();
                    if seen.contains(&pattern) {
                        realized += 1;
                    } else {
                        pending_total += 1;
                        if pending.len() < PENDING_SAMPLE {
                            pending.push((
                                dom.clone(),
                                tuple.iter().map(|&v| value_set[v].clone()).collect(),
                            ));
                        }
                    }
                }
                let mut i = 0;
                loop {
                    tuple[i] += 1;
                    if tuple[i] < value_set.len() {
                        break;
                    }
                    tuple[i] = 0;
                    i += 1;
                    if i == k {
                        break 'tuples;
                    }
                }
            }
        }
    }
    AuditReport {
        domain_cap,
        total,
        realized,
        pending,
        pending_total,
    }
}

/// Default cap for [`ages_equal`].
pub const DEFAULT_AGE_CAP: usize = 5;

/// True iff every subspace of at most `size_cap` points of each space embeds
/// isometrically in the other. Decided by comparing canonical forms of all
/// small subspaces, which is exact for exact distances.
pub fn ages_equal(
    m: &FiniteMetricSpace,
    n: &FiniteMetricSpace,
    size_cap: usize,
) -> Result<bool, BuildError> {
    if size_cap > DEFAULT_AGE_CAP {
        return Err(BuildError::CapExceeded {
            size: size_cap,
            cap: DEFAULT_AGE_CAP,
        });
    }
    for k in 1..=size_cap {
        if subspace_types(m, k) != subspace_types(n, k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical forms (lexicographically minimal flattened distance tables over
/// all relabelings) of all k-point subspaces.
fn subspace_types(space: &FiniteMetricSpace, k: usize) -> BTreeSet<Vec<Rat>> {
    let mut out = BTreeSet::new();
    let points: Vec<usize> = (0..space.len()).collect();
    let perms = permutations(k);
    for subset in combinations(&points, k) {
        let mut best: Option<Vec<Rat>> = None;
        for perm in &perms {
            let mut flat = Vec::with_capacity(k * (k - 1) / 2);
            for i in 0..k {
                for j in (i + 1)..k {
                    flat.push(space.dist(subset[perm[i]], subset[perm[j]]).clone());
                }
            }
            if best.as_ref().map(|b| flat < *b).unwrap_or(true) {
                best = Some(flat);
            }
        }
        out.insert(best.unwrap());
    }
    out
}

/// All k-element subsets of `items`, in lexicographic order.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, current, out);
        if k % 2 == 0 {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

/// Grows a random space with all distances in the set by iterated one-point
/// extension with seeded choices; total for any set satisfying the
/// four-values condition.
pub fn random_space(set: &DistanceSet, points: usize, seed: u64) -> FiniteMetricSpace {
    random_space_with_floor(set, points, None, seed)
}

/// As [`random_space`], but keeps every distance at least `floor` when given.
pub fn random_space_with_floor(
    set: &DistanceSet,
    points: usize,
    floor: Option<&Rat>,
    seed: u64,
) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut space = if points == 0 {
        FiniteMetricSpace::empty()
    } else {
        FiniteMetricSpace::point()
    };
    // Candidate values to sample from; canonical picks fill any holes.
    let cap = &set.largest_finite_scalar() + &Rat::from_int(1);
    let mut pool = set.grid(6, &cap);
    if pool.len() < 3 {
        pool = set.grid(12, &cap);
    }
    while space.len() < points {
        let point = FiniteMetricSpace::point();
        let mut picker = |lo: &Rat, hi: &XRat| -> Option<Rat> {
            let lo = match floor {
                Some(f) if f > lo => f.clone(),
                _ => lo.clone(),
            };
            let choices: Vec<&Rat> = pool
                .iter()
                .filter(|v| {
                    v.is_positive()
                        && **v >= lo
                        && match hi {
                            XRat::Infinity => true,
                            XRat::Finite(h) => **v <= *h,
                        }
                })
                .collect();
            if choices.is_empty() {
                // Fall back to a canonical element above the floor.
                set.pick_in(&lo, true, hi, true).ok().filter(|v| v.is_positive())
            } else {
                Some(choices[rng.random_range(0..choices.len())].clone())
            }
        };
        let result =
            amalgamate_with_picker(&point, &space, &SharedMap::empty(), set, &mut picker)
                .expect("sets satisfying the four-values condition never strand an extension");
        space = result.space;
    }
    space
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{find_isometry, PartialIsometry};
    use crate::rat::{int, rat};

    fn set(s: &str) -> DistanceSet {
        DistanceSet::parse(s).unwrap()
    }

    #[test]
    fn simplex_growth_over_two_distances() {
        // Over {0,1} the only types are all-1, so the build grows a simplex.
        let st = build(&set("{0,1}"), 12, 1).unwrap();
        assert!(st.space().len() >= 4);
        assert_eq!(st.space().dist_set(), vec![int(0), int(1)]);
        // After enough stages the audit passes at domain cap 3.
        let report = st.audit_extension(3, &[int(1)]);
        assert!(report.pass(), "pending: {:?}", report.pending);
    }

    #[test]
    fn refuses_sets_failing_four_values() {
        let err = match build(&set("{0, 1/2, 1, 2}"), 5, 1) {
            Err(e) => e,
            Ok(_) => panic!("build should refuse the failing set"),
        };
        assert!(matches!(err, BuildError::SetFailsFourValues(_)));
    }

    #[test]
    fn realize_type_examples() {
        let mut st = BuildState::new(&set("{0,1}"), BuildOptions::default()).unwrap();
        // Single point; realize the distance-1 type.
        let t = TypeFunction::new([(0, int(1))]);
        assert!(matches!(st.realize_type(&t).unwrap(), Action::Realized(1)));
        assert_eq!(st.space().len(), 2);
        // The edge realizes (1,1) into a triangle.
        let t = TypeFunction::new([(0, int(1)), (1, int(1))]);
        assert!(matches!(st.realize_type(&t).unwrap(), Action::Realized(2)));
        assert_eq!(st.space().dist_set(), vec![int(0), int(1)]);
        // Re-realizing is a skip.
        let t = TypeFunction::new([(0, int(1))]);
        assert!(matches!(st.realize_type(&t).unwrap(), Action::Skipped(_)));
    }

    #[test]
    fn realize_type_rejects_unrestricted() {
        let mut st = BuildState::new(&set("{0, 1/2, 1, 3/2}"), BuildOptions::default()).unwrap();
        let t = TypeFunction::new([(0, rat(3, 2))]);
        st.realize_type(&t).unwrap();
        // Both prescribed distances are too short to span the 3/2 edge.
        let t = TypeFunction::new([(0, rat(1, 2)), (1, rat(1, 2))]);
        assert!(matches!(
            st.realize_type(&t).unwrap_err(),
            BuildError::NotRestricted(_)
        ));
        // Values outside the set are rejected.
        let t = TypeFunction::new([(0, int(7))]);
        assert!(matches!(
            st.realize_type(&t).unwrap_err(),
            BuildError::NotRestricted(_)
        ));
    }

    #[test]
    fn build_realizes_all_triangles_over_three_values() {
        let r = set("{0,1,2}");
        let st = build(&r, 4_000, 1).unwrap();
        let m = st.space();
        assert_eq!(m.dist_set(), vec![int(0), int(1), int(2)]);
        // All four metric triangles over {1,2} embed.
        for tri in [
            [int(1), int(1), int(1)],
            [int(1), int(1), int(2)],
            [int(1), int(2), int(2)],
            [int(2), int(2), int(2)],
        ] {
            let t = FiniteMetricSpace::from_upper_triangle(3, &tri).unwrap();
            assert!(
                find_isometry(&t, m, &PartialIsometry::empty(), 8)
                    .unwrap()
                    .is_some(),
                "triangle {tri:?} missing"
            );
        }
    }

    #[test]
    fn builds_are_deterministic_per_seed() {
        let r = set("{0,1,2}");
        let a = build(&r, 500, 9).unwrap();
        let b = build(&r, 500, 9).unwrap();
        assert_eq!(a.space().to_file_format(), b.space().to_file_format());
        let c = build(&r, 500, 10).unwrap();
        // Different seeds usually pick differently somewhere.
        assert_ne!(a.space().to_file_format(), c.space().to_file_format());
    }

    #[test]
    fn distances_stay_in_the_set_and_grow_monotonically() {
        let r = set("[0,1]");
        let mut st = BuildState::new(&r, BuildOptions { seed: 3, ..Default::default() })
            .unwrap();
        let mut prev = st.space().clone();
        for _ in 0..6 {
            st.run(20).unwrap();
            let m = st.space();
            for v in m.dist_set() {
                assert!(r.contains(&v));
            }
            // Earlier distances never change.
            let idx: Vec<usize> = (0..prev.len()).collect();
            assert_eq!(&m.restrict(&idx), &prev);
            prev = m.clone();
        }
        assert!(prev.len() > 3);
    }

    #[test]
    fn log_lines_render_in_exchange_format() {
        let st = build(&set("{0,1}"), 3, 1).unwrap();
        let log = st.render_log();
        let first = log.lines().next().unwrap();
        assert!(
            first.starts_with("stage=1 type=0:1/1 action="),
            "unexpected line: {first}"
        );
    }

    #[test]
    fn fairness_small_types_scheduled_early() {
        // Every type over the first two points with the first value is
        // processed (realized or skipped) within a small stage budget.
        let st = build(&set("{0,1,2}"), 200, 1).unwrap();
        let mut wanted: BTreeSet<(Vec<usize>, Vec<Rat>)> = BTreeSet::new();
        for dom in [vec![0usize], vec![1], vec![0, 1]] {
            let k = dom.len();
            // value tuples over {1} (the first enumeration element):
            wanted.insert((dom, vec![int(1); k]));
        }
        let logged: BTreeSet<(Vec<usize>, Vec<Rat>)> = st
            .log()
            .iter()
            .map(|e| (e.dom.clone(), e.values.clone()))
            .collect();
        for w in wanted {
            assert!(logged.contains(&w), "type {w:?} never scheduled");
        }
    }

    #[test]
    fn realization_soundness_from_log() {
        let st = build(&set("{0,1,2}"), 300, 2).unwrap();
        for e in st.log() {
            if let Action::Realized(p) = e.action {
                for (x, v) in e.dom.iter().zip(&e.values) {
                    assert_eq!(st.space().dist(p, *x), v);
                }
            }
        }
    }

    #[test]
    fn audit_detects_pending_types_mid_build() {
        let r = set("{0,1,2}");
        let st = build(&r, 2, 1).unwrap();
        let report = st.audit_extension(2, &[int(1), int(2)]);
        assert!(!report.pass());
        assert!(report.pending_total > 0);
        assert!(!report.pending.is_empty());
        // Vacuous pass at cap 0.
        let vac = st.audit_extension(0, &[int(1), int(2)]);
        assert!(vac.pass());
        assert_eq!(vac.total, 0);
    }

    #[test]
    fn extend_isometry_on_simplex() {
        let mut st = build(&set("{0,1}"), 20, 1).unwrap();
        assert!(st.space().len() >= 4);
        // Swap two points; extend to a third.
        let f = PartialIsometry::new(st.space(), st.space(), [(0, 1), (1, 0)]).unwrap();
        let g = st.extend_isometry(&f, 2, 4).unwrap();
        let img = g.get(2).unwrap();
        assert!(img != 0 && img != 1);
        // Identity extension.
        let id = PartialIsometry::identity([0]);
        let g = st.extend_isometry(&id, 1, 4).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn ages_equal_across_seeds() {
        let r = set("{0,1,2}");
        let a = build(&r, 3_000, 1).unwrap();
        let b = build(&r, 3_000, 2).unwrap();
        assert_ne!(a.space().to_file_format(), b.space().to_file_format());
        assert!(ages_equal(a.space(), b.space(), 4).unwrap());
    }

    #[test]
    fn ages_differ_across_sets() {
        let a = build(&set("{0,1,2}"), 800, 1).unwrap();
        let b = build(&set("{0,1,3}"), 800, 1).unwrap();
        assert!(!ages_equal(a.space(), b.space(), 3).unwrap());
        assert!(matches!(
            ages_equal(a.space(), b.space(), 9),
            Err(BuildError::CapExceeded { .. })
        ));
    }

    #[test]
    fn ages_equal_matches_embedding_oracle_on_small_spaces() {
        let a = random_space(&set("{0,1,2}"), 6, 11);
        let b = random_space(&set("{0,1,2}"), 6, 12);
        let by_types = ages_equal(&a, &b, 3).unwrap();
        // Oracle: every 3-subspace of one embeds into the other.
        let pts_a: Vec<usize> = (0..a.len()).collect();
        let pts_b: Vec<usize> = (0..b.len()).collect();
        let mut by_oracle = true;
        for s in combinations(&pts_a, 3) {
            let sub = a.restrict(&s);
            if find_isometry(&sub, &b, &PartialIsometry::empty(), 8).unwrap().is_none() {
                by_oracle = false;
            }
        }
        for s in combinations(&pts_b, 3) {
            let sub = b.restrict(&s);
            if find_isometry(&sub, &a, &PartialIsometry::empty(), 8).unwrap().is_none() {
                by_oracle = false;
            }
        }
        assert_eq!(by_types, by_oracle);
    }

    #[test]
    fn random_spaces_validate_and_respect_floors() {
        let r = set("[0,1]");
        let m = random_space_with_floor(&r, 6, Some(&rat(1, 2)), 5);
        assert_eq!(m.len(), 6);
        for i in 0..m.len() {
            for j in (i + 1)..m.len() {
                assert!(m.dist(i, j) >= &rat(1, 2));
                assert!(r.contains(m.dist(i, j)));
            }
        }
    }

    #[test]
    fn infinite_sets_draw_values_from_the_dense_enumeration() {
        let r = set("[0,1]");
        let st = build(&r, 60, 4).unwrap();
        assert!(st.space().len() > 2);
        for v in st.space().dist_set() {
            assert!(r.contains(&v));
        }
    }
}
