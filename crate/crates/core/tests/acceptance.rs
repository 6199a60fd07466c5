//! Acceptance suite: one criterion per function, run sequentially, one
//! pass/fail line each. Wall-clock budgets are enforced in optimized builds
//! and reported (not enforced) in debug builds.
//!
//! Run with `cargo test --release -p urysohn --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urysohn::amalgam::{amalgamate, enumerate_amalgams, feasible_interval, SharedMap};
use urysohn::approx::{
    approx_embedding, classify, gamma, h_join, round_distances, ClassVerdict, EmbeddingOutcome,
    ImpossibilityCert,
};
use urysohn::fourvalues::{check, check_finite, falsify, leads_to, Outcome, Quadruple};
use urysohn::fraisse::{
    ages_equal, build, random_space, random_space_with_floor, BuildOptions, BuildState,
};
use urysohn::isometry::{find_isometry, PartialIsometry};
use urysohn::rat::{int, rat, Rat};
use urysohn::sets::DistanceSet;
use urysohn::space::{is_metric_triple, FiniteMetricSpace};

fn set(s: &str) -> DistanceSet {
    DistanceSet::parse(s).unwrap()
}

struct Criterion {
    number: u32,
    title: &'static str,
    budget: Duration,
    run: fn(),
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        Criterion {
            number: 1,
            title: "integer segments hold through n=12",
            budget: Duration::from_secs(5),
            run: criterion_01,
        },
        Criterion {
            number: 2,
            title: "unit interval with detached point: exact gap witness and falsifier agreement",
            budget: Duration::from_secs(10),
            run: criterion_02,
        },
        Criterion {
            number: 3,
            title: "three-gap ray family verdicts per the stated table",
            budget: Duration::from_secs(30),
            run: criterion_03,
        },
        Criterion {
            number: 4,
            title: "dyadic window family: exact decision holds, falsifier finds nothing",
            budget: Duration::from_secs(60),
            run: criterion_04,
        },
        Criterion {
            number: 5,
            title: "one-new-pair feasible interval is exact on 1000 random instances",
            budget: Duration::from_secs(30),
            run: criterion_05,
        },
        Criterion {
            number: 6,
            title: "amalgamation is total over passing sets and empty over failing witnesses",
            budget: Duration::from_secs(60),
            run: criterion_06,
        },
        Criterion {
            number: 7,
            title: "builder saturation over {0,1,2}: audit, triangles, ages, extensions",
            budget: Duration::from_secs(120),
            run: criterion_07,
        },
        Criterion {
            number: 8,
            title: "distance rounding: 500 random spaces stay metric within tolerance",
            budget: Duration::from_secs(60),
            run: criterion_08,
        },
        Criterion {
            number: 9,
            title: "approximate embedding against the completion: certificate and witness",
            budget: Duration::from_secs(10),
            run: criterion_09,
        },
        Criterion {
            number: 10,
            title: "classifier table on the catalog sets",
            budget: Duration::from_secs(30),
            run: criterion_10,
        },
        Criterion {
            number: 11,
            title: "tolerance chains and joins: 200 random parameter draws",
            budget: Duration::from_secs(60),
            run: criterion_11,
        },
    ];

    let timing_enforced = cfg!(not(debug_assertions));
    if !timing_enforced {
        println!("# debug build: wall-clock budgets reported but not enforced");
    }
    let prev_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        let timed_out = timing_enforced && elapsed > c.budget;
        match (&outcome, timed_out) {
            (Ok(()), false) => {
                println!(
                    "criterion {:02} PASS ({:.2}s) {}",
                    c.number,
                    elapsed.as_secs_f64(),
                    c.title
                );
            }
            (Ok(()), true) => {
                failures += 1;
                println!(
                    "criterion {:02} FAIL ({:.2}s, over the {:.0}s budget) {}",
                    c.number,
                    elapsed.as_secs_f64(),
                    c.budget.as_secs_f64(),
                    c.title
                );
            }
            (Err(payload), _) => {
                failures += 1;
                let msg = payload
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| payload.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!(
                    "criterion {:02} FAIL ({:.2}s) {} :: {}",
                    c.number,
                    elapsed.as_secs_f64(),
                    c.title,
                    msg
                );
            }
        }
    }
    std::panic::set_hook(prev_hook);
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

fn criterion_01() {
    for n in 1..=12u64 {
        let verdict = check(&DistanceSet::omega(n).unwrap());
        assert_eq!(verdict.outcome, Outcome::Holds, "omega({n})");
    }
}

fn criterion_02() {
    let r = set("[0,1] u {2}");
    let exact = check(&r);
    assert_eq!(exact.outcome, Outcome::Fails);
    let w = exact.witness.expect("failing verdicts carry witnesses");
    w.validate(&r).unwrap();
    assert_eq!(
        (w.gap_lo.clone(), w.gap_hi.clone()),
        (rat(3, 2), rat(3, 2)),
        "the forced swap interval is the single point 3/2"
    );
    // Grid falsifier at denominator <= 4, seed 1, agrees on the same hole.
    let sampled = falsify(&r, 100_000, 4, &int(4), 1);
    assert_eq!(sampled.outcome, Outcome::Fails);
    let sw = sampled.witness.unwrap();
    sw.validate(&r).unwrap();
    assert!(
        sw.gap_lo > int(1) && sw.gap_hi < int(2),
        "sampled witness must force a value in the gap (1,2)"
    );
}

fn criterion_03() {
    // The stated expected-verdict table for the family. The first two rows
    // are refuted by the exact decider with machine-validated witnesses
    // (cross-checked below and by the independent falsifier in the unit
    // suites); they are asserted as stated and fail by design. See the
    // project notes on this documented discrepancy.
    let table = [
        ("[0,1] u [3,4] u [9,inf)", Outcome::Holds),
        ("[0,1] u [3,4] u (8,inf)", Outcome::Holds),
        ("[0,1] u [3,4] u [8,inf)", Outcome::Fails),
    ];
    let mut mismatches = Vec::new();
    for (expr, expect) in table {
        let r = set(expr);
        let verdict = check(&r);
        if let Some(w) = &verdict.witness {
            w.validate(&r).unwrap();
        }
        if verdict.outcome != expect {
            let w = verdict.witness.as_ref().unwrap();
            mismatches.push(format!(
                "{expr}: decided {} (expected {}), witness x={} quad=({},{},{},{}) gap=[{},{}]",
                verdict.outcome.as_str(),
                expect.as_str(),
                w.x,
                w.quad.a,
                w.quad.b,
                w.quad.c,
                w.quad.d,
                w.gap_lo,
                w.gap_hi
            ));
        }
    }
    // The fails row must carry a machine-validated witness in the (4,8) gap.
    let r = set("[0,1] u [3,4] u [8,inf)");
    let v = check(&r);
    assert_eq!(v.outcome, Outcome::Fails);
    let w = v.witness.unwrap();
    w.validate(&r).unwrap();
    assert!(w.gap_lo > int(4) && w.gap_hi < int(8));
    assert!(
        mismatches.is_empty(),
        "stated table refuted: {}",
        mismatches.join(" | ")
    );
}

fn criterion_04() {
    let dyadic = "{0} u [1/2,255/16] u [1/8,255/64] u [1/32,255/256] u [1/128,255/1024] \
                  u [1/512,255/4096] u [1/2048,255/16384]";
    let r = set(dyadic);
    let exact = check(&r);
    assert_eq!(exact.outcome, Outcome::Holds, "exact decision");
    let sampled = falsify(&r, 1_000_000, 64, &int(1), 1);
    assert_eq!(sampled.outcome, Outcome::Unknown, "falsifier must find nothing");
    assert!(sampled.note.starts_with("none-found"));
}

fn criterion_05() {
    // Candidate pool: denominators up to 6, values up to 3.
    let mut pool: Vec<Rat> = Vec::new();
    for q in 1..=6i64 {
        for p in 0..=(3 * q) {
            pool.push(rat(p, q));
        }
    }
    pool.sort();
    pool.dedup();
    let positive: Vec<Rat> = pool.iter().filter(|v| v.is_positive()).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 1000 {
        let pick = |rng: &mut ChaCha8Rng| positive[rng.random_range(0..positive.len())].clone();
        let (x, a, b, c, d) = (
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
        );
        if !is_metric_triple(&a, &b, &x) || !is_metric_triple(&c, &d, &x) {
            continue;
        }
        done += 1;
        let ta = FiniteMetricSpace::from_upper_triangle(3, &[a.clone(), b.clone(), x.clone()])
            .unwrap();
        let tb = FiniteMetricSpace::from_upper_triangle(3, &[d.clone(), c.clone(), x.clone()])
            .unwrap();
        let (u, l) = feasible_interval(&a, &b, &c, &d);
        assert!(u <= l, "the interval is nonempty whenever the triangles exist");
        let shared = SharedMap::new(&ta, &tb, [(1, 1), (2, 2)]).unwrap();
        let completions = enumerate_amalgams(&ta, &tb, &shared, &pool, 6).unwrap();
        let attained: Vec<Rat> = completions
            .iter()
            .map(|r| r.space.dist(r.a_map[0], r.b_map[0]).clone())
            .collect();
        let expected: Vec<Rat> = pool
            .iter()
            .filter(|y| y.is_positive() && **y >= u && **y <= l)
            .cloned()
            .collect();
        assert_eq!(attained, expected, "instance (x={x}, a={a}, b={b}, c={c}, d={d})");
    }
}

/// Random finite sets containing 0 with a handful of small rationals.
fn random_finite_set(rng: &mut ChaCha8Rng) -> Vec<Rat> {
    let size = rng.random_range(2..=7);
    let mut vals = vec![Rat::zero()];
    for _ in 0..size {
        let q = rng.random_range(1..=4i64);
        let p = rng.random_range(1..=(4 * q));
        vals.push(rat(p, q));
    }
    vals.sort();
    vals.dedup();
    vals
}

fn criterion_06() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Totality: 1000 instances over passing sets.
    let mut passing: Vec<DistanceSet> = Vec::new();
    // Structured families always pass; rejection sampling adds variety.
    for k in 2..=8i64 {
        let g = rat(1, k);
        let vals: Vec<Rat> = (0..=k).map(|i| &int(i) * &g).collect();
        passing.push(DistanceSet::finite(vals).unwrap());
    }
    let mut attempts = 0;
    while passing.len() < 40 && attempts < 4000 {
        attempts += 1;
        let vals = random_finite_set(&mut rng);
        if check_finite(&vals).holds() {
            passing.push(DistanceSet::finite(vals).unwrap());
        }
    }
    assert!(passing.len() >= 20, "not enough passing sets sampled");
    for trial in 0..1000u64 {
        let r = &passing[(trial as usize) % passing.len()];
        let n = rng.random_range(3..=7);
        let c = random_space(r, n, 6_000 + trial);
        let pts: Vec<usize> = (0..n).collect();
        // Two overlapping subsets.
        let asz = rng.random_range(1..=n);
        let bsz = rng.random_range(1..=n);
        let mut sa = pts.clone();
        let mut sb = pts.clone();
        for _ in 0..(n - asz) {
            sa.remove(rng.random_range(0..sa.len()));
        }
        for _ in 0..(n - bsz) {
            sb.remove(rng.random_range(0..sb.len()));
        }
        let a = c.restrict(&sa);
        let b = c.restrict(&sb);
        let shared_pairs: Vec<(usize, usize)> = sa
            .iter()
            .enumerate()
            .filter_map(|(ia, p)| sb.iter().position(|q| q == p).map(|ib| (ia, ib)))
            .collect();
        let shared = SharedMap::new(&a, &b, shared_pairs).unwrap();
        let result = amalgamate(&a, &b, &shared, r)
            .unwrap_or_else(|e| panic!("amalgamation must succeed over a passing set: {e}"));
        assert_eq!(&result.space.restrict(&result.a_map), &a);
        assert_eq!(&result.space.restrict(&result.b_map), &b);
        for v in result.space.dist_set() {
            assert!(r.contains(&v), "distance {v} escaped the set");
        }
    }

    // Failing sets: the witness-derived instance has no completion.
    let mut failing = 0;
    let mut attempts = 0;
    while failing < 100 && attempts < 20_000 {
        attempts += 1;
        let vals = random_finite_set(&mut rng);
        let verdict = check_finite(&vals);
        if verdict.holds() {
            continue;
        }
        failing += 1;
        let w = verdict.witness.unwrap();
        for v in [&w.x, &w.quad.a, &w.quad.b, &w.quad.c, &w.quad.d] {
            assert!(v.is_positive(), "failing witnesses have positive entries");
        }
        let ta = FiniteMetricSpace::from_upper_triangle(
            3,
            &[w.quad.a.clone(), w.quad.b.clone(), w.x.clone()],
        )
        .unwrap();
        let tb = FiniteMetricSpace::from_upper_triangle(
            3,
            &[w.quad.d.clone(), w.quad.c.clone(), w.x.clone()],
        )
        .unwrap();
        let shared = SharedMap::new(&ta, &tb, [(1, 1), (2, 2)]).unwrap();
        let completions = enumerate_amalgams(&ta, &tb, &shared, &vals, 6).unwrap();
        assert!(
            completions.is_empty(),
            "witness-derived instance must have no completion over the set"
        );
    }
    assert_eq!(failing, 100, "not enough failing sets sampled");
}

fn criterion_07() {
    let r = set("{0,1,2}");
    let vals = [int(1), int(2)];
    let mut st = BuildState::new(
        &r,
        BuildOptions {
            seed: 1,
            log_skips: false,
            ..Default::default()
        },
    )
    .unwrap();
    let mut passed_at = None;
    while st.stage() < 1_600_000 {
        st.run(100_000).unwrap();
        if st.audit_extension(3, &vals).pass() {
            passed_at = Some(st.stage());
            break;
        }
    }
    let passed_at = passed_at.expect("extension audit must pass within the stage budget");
    assert!(passed_at > 0);

    // All four metric triangles over {1,2} embed.
    for tri in [
        [int(1), int(1), int(1)],
        [int(1), int(1), int(2)],
        [int(1), int(2), int(2)],
        [int(2), int(2), int(2)],
    ] {
        let t = FiniteMetricSpace::from_upper_triangle(3, &tri).unwrap();
        assert!(
            find_isometry(&t, st.space(), &PartialIsometry::empty(), 8)
                .unwrap()
                .is_some(),
            "triangle {tri:?} must embed"
        );
    }

    // Independent builds with different seeds agree on small ages.
    let a = build(&r, 3_000, 1).unwrap();
    let b = build(&r, 3_000, 2).unwrap();
    assert!(ages_equal(a.space(), b.space(), 4).unwrap());

    // 100 random partial isometries on <= 3 points extend by one point.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut extended = 0;
    while extended < 100 {
        let n = st.space().len();
        let k = rng.random_range(1..=3usize);
        let mut sources: Vec<usize> = Vec::new();
        while sources.len() < k {
            let p = rng.random_range(0..n);
            if !sources.contains(&p) {
                sources.push(p);
            }
        }
        // Find a matching target tuple by rejection.
        let mut pairs: Option<Vec<(usize, usize)>> = None;
        'search: for _ in 0..2000 {
            let mut targets: Vec<usize> = Vec::new();
            while targets.len() < k {
                let q = rng.random_range(0..n);
                if !targets.contains(&q) {
                    targets.push(q);
                }
            }
            for i in 0..k {
                for j in (i + 1)..k {
                    if st.space().dist(sources[i], sources[j])
                        != st.space().dist(targets[i], targets[j])
                    {
                        continue 'search;
                    }
                }
            }
            pairs = Some(sources.iter().copied().zip(targets).collect());
            break;
        }
        let pairs = match pairs {
            Some(p) => p,
            None => continue,
        };
        let f = PartialIsometry::new(st.space(), st.space(), pairs).unwrap();
        let target = loop {
            let t = rng.random_range(0..n);
            if f.get(t).is_none() {
                break t;
            }
        };
        let g = st.extend_isometry(&f, target, 4).unwrap();
        assert_eq!(g.len(), f.len() + 1);
        extended += 1;
    }
}

fn criterion_08() {
    let r = set("[0,1]");
    let dense = set("rationals[0,1]");
    let eps = rat(1, 10);
    for trial in 0..500u64 {
        let n = 2 + (trial as usize % 4); // 2..=5 points
        let a = random_space(&r, n, 8_000 + trial);
        let (plan, b) = round_distances(&a, &r, &dense, &eps).unwrap();
        assert_eq!(b.len(), a.len());
        for i in 0..n {
            for j in (i + 1)..n {
                let img = b.dist(i, j);
                assert!(dense.contains(img), "image {img} not in the dense subset");
                assert!((a.dist(i, j) - img).abs() < eps);
            }
        }
        // The triple claim, checked triple-by-triple on the value map.
        let mut vals: Vec<Rat> = a.dist_set();
        vals.retain(|v| v.is_positive());
        let mut with_zero = vals.clone();
        with_zero.push(Rat::zero());
        for x in &with_zero {
            for y in &with_zero {
                for z in &with_zero {
                    if is_metric_triple(x, y, z) {
                        assert!(
                            is_metric_triple(plan.image(x), plan.image(y), plan.image(z)),
                            "triple ({x},{y},{z}) broke"
                        );
                    }
                }
            }
        }
    }
}

fn criterion_09() {
    let r = set("rationals[0,1) u {2}");
    let eps = rat(1, 4);
    let tall = FiniteMetricSpace::from_upper_triangle(3, &[int(2), int(1), int(1)]).unwrap();
    match approx_embedding(&tall, &r, &eps, 20_000) {
        EmbeddingOutcome::Impossible(cert) => {
            cert.validate(&tall, &r, &eps).unwrap();
            assert!(matches!(cert, ImpossibilityCert::TriangleGap { .. }));
        }
        other => panic!("tall isosceles must be impossible, got {other:?}"),
    }
    let wide = FiniteMetricSpace::from_upper_triangle(3, &[int(2), int(2), int(1)]).unwrap();
    match approx_embedding(&wide, &r, &eps, 20_000) {
        EmbeddingOutcome::Witness(w) => {
            // Validated: metric by construction; distances in the set within
            // tolerance.
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let v = w.space.dist(i, j);
                    assert!(r.contains(v));
                    assert!((v - wide.dist(i, j)).abs() < eps);
                }
            }
        }
        other => panic!("wide isosceles must admit a witness, got {other:?}"),
    }
}

fn criterion_10() {
    let table = [
        ("[0,1]", ClassVerdict::UrysohnAdmissible),
        ("[0,inf)", ClassVerdict::UrysohnAdmissible),
        ("{0,1,2,3}", ClassVerdict::UrysohnAdmissible),
        ("rationals[0,1]", ClassVerdict::CountableUniversalOnly),
        ("[0,1] u {2}", ClassVerdict::Inadmissible),
        ("[0,1] u [3,4] u [8,inf)", ClassVerdict::Inadmissible),
    ];
    for (expr, expect) in table {
        let c = classify(&set(expr));
        assert_eq!(c.verdict, expect, "{expr}");
    }
}

fn criterion_11() {
    let r = set("[0,1]");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200u64 {
        let m = rng.random_range(1..=4usize);
        let h = rat(rng.random_range(1..=8), 8);
        let floor = rat(rng.random_range(1..=4), 8);
        let chain = gamma(&r, m, &floor, &h).unwrap();
        chain.validate(&r, m, &floor, &h).unwrap();

        let a = random_space_with_floor(&r, m, Some(&floor), 11_000 + trial);
        // Perturb within gamma when a valid perturbation is found quickly;
        // otherwise join the space with itself.
        let g = chain.gamma();
        let mut b = a.clone();
        'attempts: for attempt in 0..8 {
            let mut table = vec![vec![Rat::zero(); m]; m];
            for i in 0..m {
                for j in (i + 1)..m {
                    let sign = if rng.random_range(0..2) == 0 { 1 } else { -1 };
                    let nudge = &(&(g / &int(4)) * &rat(sign, 1))
                        * &rat(rng.random_range(0..=2), 2);
                    let v = a.dist(i, j) + &nudge;
                    table[i][j] = v.clone();
                    table[j][i] = v;
                }
            }
            let ok = FiniteMetricSpace::from_table(&table);
            if let Ok(cand) = ok {
                let good = (0..m).all(|i| {
                    ((i + 1)..m).all(|j| {
                        cand.dist(i, j) >= &floor && r.contains(cand.dist(i, j))
                    })
                });
                if good {
                    b = cand;
                    break 'attempts;
                }
            }
            let _ = attempt;
        }
        let pairing: Vec<usize> = (0..m).collect();
        let joined = h_join(&a, &b, &pairing, &h, &floor, &r).unwrap();
        for i in 0..m {
            assert!(
                joined.space.dist(joined.a_map[i], joined.b_map[i]) < &h,
                "pair {i} must sit strictly within h"
            );
        }
        for v in joined.space.dist_set() {
            assert!(r.contains(&v));
        }
        // The audited induction bounds hold at every level.
        for row in &joined.trace {
            assert!(&(&row.prefix_bound + &row.perturbation_bound) <= &row.level_distance);
            assert!(row.level_distance <= row.row_min);
        }
    }
}

// Re-exercise the linked-quadruple sanity used across criteria: witnesses of
// the exact deciders remain valid under the falsifier's validation path.
#[allow(dead_code)]
fn cross_check_witness(expr: &str) {
    let r = set(expr);
    let v = check(&r);
    if let Some(w) = v.witness {
        assert!(leads_to(&w.x, &w.quad));
        assert_eq!(
            urysohn::fourvalues::swap_interval(&w.quad),
            (w.gap_lo.clone(), w.gap_hi.clone())
        );
        assert!(matches!(
            Quadruple::new(w.quad.a, w.quad.b, w.quad.c, w.quad.d),
            Quadruple { .. }
        ));
    }
}
