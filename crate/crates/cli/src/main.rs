//! Command-line front end: parse distance-set expressions and space files,
//! dispatch to the library, and emit stable machine-readable reports.
//!
//! Exit codes: 0 for definitive positive verdicts and successful
//! constructions, 1 for definitive negative verdicts, 2 for unknown, 64 for
//! usage errors.

mod fixtures;

use clap::{Parser, Subcommand};
use std::fs;
use std::process::ExitCode;
use urysohn::amalgam::{self, SharedMap};
use urysohn::approx::{self, ClassVerdict, EmbeddingOutcome, ImpossibilityCert};
use urysohn::fourvalues::{self, Outcome};
use urysohn::fraisse::{BuildOptions, BuildState};
use urysohn::rat::Rat;
use urysohn::sets::DistanceSet;
use urysohn::space::FiniteMetricSpace;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "urysohn",
    about = "Distance-set admissibility decisions and constructions over exact rationals",
    version
)]
struct Cli {
    /// Print only machine-readable lines (suppress `#` prose).
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the four-values condition for a distance set.
    Check4v {
        /// Distance-set expression, e.g. "[0,1] u {2}".
        set: String,
        /// Run the seeded falsifier instead of the exact decision.
        #[arg(long)]
        samples: Option<u64>,
        /// Falsifier grid denominator bound.
        #[arg(long, default_value_t = 4)]
        denom: u64,
        /// Falsifier grid value cap (default derived from the set).
        #[arg(long)]
        cap: Option<Rat>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Classify a distance set per the admissibility table.
    Classify { set: String },
    /// Amalgamate two spaces over a shared part, with distances in a set.
    Amalgamate {
        a: String,
        b: String,
        /// Shared points as "i:j,..." (A-index to B-index).
        #[arg(long, default_value = "")]
        shared: String,
        #[arg(long)]
        set: String,
    },
    /// Grow a finite approximation of the universal space over a set.
    Build {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 64)]
        stages: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build and then audit the extension property.
    Audit {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 256)]
        stages: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        domain_cap: usize,
        /// Comma-separated type values (defaults to a prefix of the set's
        /// value enumeration).
        #[arg(long)]
        values: Option<String>,
    },
    /// Join two equinumerous spaces with paired points within a bound.
    Hjoin {
        a: String,
        b: String,
        #[arg(long)]
        set: String,
        /// Pair bound.
        #[arg(long)]
        h: Rat,
        /// Minimum-distance floor the inputs respect.
        #[arg(long)]
        r: Rat,
        /// Pairing as "i:j,..." (defaults to index order).
        #[arg(long, default_value = "")]
        pairing: String,
    },
    /// Round a space's distances into a dense subset of the set.
    Hatmap {
        a: String,
        #[arg(long)]
        set: String,
        /// Dense subset (defaults to the rational points of the set).
        #[arg(long)]
        dense: Option<String>,
        #[arg(long)]
        eps: Rat,
    },
    /// Search for a perturbed copy with distances in the set.
    Agetest {
        a: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        eps: Rat,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
    },
    /// Run the expected-verdict catalog.
    Fixtures {
        /// Only fixtures whose name contains this substring.
        #[arg(long, default_value = "")]
        filter: String,
    },
}

struct Report {
    machine_only: bool,
    lines: Vec<String>,
}

impl Report {
    fn new(machine_only: bool) -> Report {
        Report {
            machine_only,
            lines: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn prose(&mut self, s: impl std::fmt::Display) {
        if !self.machine_only {
            self.lines.push(format!("# {s}"));
        }
    }

    fn print(self) {
        use std::io::Write;
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        for l in self.lines {
            // A closed pipe downstream is not an error worth reporting.
            if writeln!(out, "{l}").is_err() {
                return;
            }
        }
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn parse_set(expr: &str) -> Result<DistanceSet, String> {
    DistanceSet::parse(expr).map_err(|e| format!("in set expression `{expr}`: {e}"))
}

fn read_space(path: &str) -> Result<FiniteMetricSpace, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
    FiniteMetricSpace::from_file_format(&text).map_err(|e| format!("in `{path}`: {e}"))
}

fn parse_pairs(spec: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let (i, j) = tok
            .split_once(':')
            .ok_or_else(|| format!("bad pair `{tok}`: expected `i:j`"))?;
        let i = i.trim().parse::<usize>().map_err(|_| format!("bad index `{i}`"))?;
        let j = j.trim().parse::<usize>().map_err(|_| format!("bad index `{j}`"))?;
        out.push((i, j));
    }
    Ok(out)
}

fn verdict_lines(report: &mut Report, v: &fourvalues::Verdict, seed: Option<u64>) {
    report.line(format!("fourvalues={}", v.outcome.as_str()));
    report.line(format!("method={}", v.method.as_str()));
    if let Some(seed) = seed {
        report.line(format!("seed={seed}"));
    }
    if let Some(w) = &v.witness {
        report.line(format!(
            "witness={};{};{};{};{}",
            w.x.frac(),
            w.quad.a.frac(),
            w.quad.b.frac(),
            w.quad.c.frac(),
            w.quad.d.frac()
        ));
        report.line(format!("gap=[{},{}]", w.gap_lo.frac(), w.gap_hi.frac()));
    }
    report.prose(&v.note);
}

fn run(cli: Cli) -> Result<(Report, u8), String> {
    let mut report = Report::new(cli.machine);
    let code = match cli.cmd {
        Cmd::Check4v {
            set,
            samples,
            denom,
            cap,
            seed,
        } => {
            let r = parse_set(&set)?;
            let verdict = match samples {
                Some(samples) => {
                    let cap = cap.unwrap_or_else(|| {
                        &(&Rat::from_int(2) * &r.largest_finite_scalar()) + &Rat::from_int(1)
                    });
                    fourvalues::falsify(&r, samples, denom, &cap, seed)
                }
                None => fourvalues::check(&r),
            };
            verdict_lines(&mut report, &verdict, Some(seed));
            match verdict.outcome {
                Outcome::Holds => 0,
                Outcome::Fails => EXIT_NEGATIVE,
                Outcome::Unknown => EXIT_UNKNOWN,
            }
        }
        Cmd::Classify { set } => {
            let r = parse_set(&set)?;
            let c = approx::classify(&r);
            report.line(format!("verdict={}", c.verdict.as_str()));
            report.line(format!(
                "fourvalues={} because={}",
                c.fourvalues.outcome.as_str(),
                c.fourvalues.note
            ));
            if let Some(w) = &c.fourvalues.witness {
                report.line(format!(
                    "witness={};{};{};{};{}",
                    w.x.frac(),
                    w.quad.a.frac(),
                    w.quad.b.frac(),
                    w.quad.c.frac(),
                    w.quad.d.frac()
                ));
                report.line(format!("gap=[{},{}]", w.gap_lo.frac(), w.gap_hi.frac()));
            }
            report.line(format!(
                "closed={} because={}",
                c.traits.closed, c.traits.closed_note
            ));
            report.line(format!(
                "countable={} because={}",
                c.traits.countable, c.traits.countable_note
            ));
            report.line(format!(
                "zero_limit={} because={}",
                c.traits.zero_limit, c.traits.zero_limit_note
            ));
            report.prose(&c.because);
            match c.verdict {
                ClassVerdict::Inadmissible => EXIT_NEGATIVE,
                ClassVerdict::Unknown => EXIT_UNKNOWN,
                _ => 0,
            }
        }
        Cmd::Amalgamate { a, b, shared, set } => {
            let sa = read_space(&a)?;
            let sb = read_space(&b)?;
            let r = parse_set(&set)?;
            let pairs = parse_pairs(&shared)?;
            let shared =
                SharedMap::new(&sa, &sb, pairs).map_err(|e| format!("bad shared map: {e}"))?;
            match amalgam::amalgamate(&sa, &sb, &shared, &r) {
                Ok(result) => {
                    report.line(result.space.to_file_format().trim_end().to_string());
                    for (i, c) in result.a_map.iter().enumerate() {
                        report.line(format!("# embedding A: {i}->{c}"));
                    }
                    for (j, c) in result.b_map.iter().enumerate() {
                        report.line(format!("# embedding B: {j}->{c}"));
                    }
                    if result.identifiable() {
                        report.line("# identifiable: a cross pair admitted distance 0".to_string());
                    }
                    0
                }
                Err(amalgam::AmalgamError::EmptyChoiceInterval { a_point, c_point, lo, hi }) => {
                    report.line("amalgamate=impossible".to_string());
                    report.line(format!(
                        "empty_interval=A:{a_point};C:{c_point};[{},{}]",
                        lo.frac(),
                        hi.frac()
                    ));
                    report.prose("the set misses the feasible interval for a cross pair");
                    EXIT_NEGATIVE
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        Cmd::Build { set, stages, seed } => {
            let r = parse_set(&set)?;
            let st = urysohn::fraisse::build(&r, stages, seed)
                .map_err(|e| format!("build failed: {e}"))?;
            report.line(format!("seed={seed}"));
            report.line(format!("stages={}", st.stage()));
            for entry in st.log() {
                report.line(entry.render());
            }
            report.line(st.space().to_file_format().trim_end().to_string());
            0
        }
        Cmd::Audit {
            set,
            stages,
            seed,
            domain_cap,
            values,
        } => {
            let r = parse_set(&set)?;
            let mut opts = BuildOptions::default();
            opts.seed = seed;
            opts.log_skips = false;
            let mut st =
                BuildState::new(&r, opts).map_err(|e| format!("build failed: {e}"))?;
            st.run(stages).map_err(|e| format!("build failed: {e}"))?;
            let value_set: Vec<Rat> = match values {
                Some(spec) => spec
                    .split(',')
                    .map(|t| t.trim().parse::<Rat>().map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?,
                None => st.values().iter().take(6).cloned().collect(),
            };
            for v in &value_set {
                if !r.contains(v) {
                    return Err(format!("audit value {v} is not in the set"));
                }
            }
            let audit = st.audit_extension(domain_cap, &value_set);
            report.line(format!("seed={seed}"));
            report.line(format!("stages={}", st.stage()));
            report.line(format!("points={}", st.space().len()));
            report.line(format!(
                "audit={} total={} realized={} pending={}",
                if audit.pass() { "pass" } else { "fail" },
                audit.total,
                audit.realized,
                audit.pending_total
            ));
            for (dom, vals) in &audit.pending {
                let dom: Vec<String> = dom.iter().map(|d| d.to_string()).collect();
                let vals: Vec<String> = vals.iter().map(|v| v.frac()).collect();
                report.line(format!("pending={}:{}", dom.join(","), vals.join(",")));
            }
            if audit.pass() {
                0
            } else {
                EXIT_NEGATIVE
            }
        }
        Cmd::Hjoin {
            a,
            b,
            set,
            h,
            r,
            pairing,
        } => {
            let sa = read_space(&a)?;
            let sb = read_space(&b)?;
            let dset = parse_set(&set)?;
            let pairing: Vec<usize> = if pairing.trim().is_empty() {
                (0..sa.len()).collect()
            } else {
                let pairs = parse_pairs(&pairing)?;
                let mut map = vec![usize::MAX; sa.len()];
                for (i, j) in pairs {
                    if i >= sa.len() {
                        return Err(format!("pairing index {i} out of range"));
                    }
                    map[i] = j;
                }
                if map.iter().any(|&j| j == usize::MAX) {
                    return Err("pairing must cover every point".to_string());
                }
                map
            };
            let joined = approx::h_join(&sa, &sb, &pairing, &h, &r, &dset)
                .map_err(|e| format!("join failed: {e}"))?;
            report.line(joined.space.to_file_format().trim_end().to_string());
            for i in 0..sa.len() {
                report.line(format!(
                    "# pair {i}: A->{} B->{} dist={}",
                    joined.a_map[i],
                    joined.b_map[pairing[i]],
                    joined
                        .space
                        .dist(joined.a_map[i], joined.b_map[pairing[i]])
                        .frac()
                ));
            }
            report.line(format!("# gamma={}", joined.chain.gamma().frac()));
            for row in &joined.trace {
                report.line(format!(
                    "# level={} l={} k={} h={} rowmin={}",
                    row.level,
                    row.prefix_bound.frac(),
                    row.perturbation_bound.frac(),
                    row.level_distance.frac(),
                    row.row_min.frac()
                ));
            }
            0
        }
        Cmd::Hatmap { a, set, dense, eps } => {
            let sa = read_space(&a)?;
            let r = parse_set(&set)?;
            let dense = match dense {
                Some(expr) => parse_set(&expr)?,
                None => default_dense(&r),
            };
            let (plan, b) = approx::round_distances(&sa, &r, &dense, &eps)
                .map_err(|e| format!("rounding failed: {e}"))?;
            report.line(format!("delta={}", plan.delta.frac()));
            let fixed: Vec<String> = plan.fixed.iter().map(|v| v.frac()).collect();
            report.line(format!("fixed={}", fixed.join(",")));
            let raised: Vec<String> = plan
                .raised
                .iter()
                .map(|(v, img)| format!("{}->{}", v.frac(), img.frac()))
                .collect();
            report.line(format!("raised={}", raised.join(",")));
            let lowered: Vec<String> = plan
                .lowered
                .iter()
                .map(|(v, img)| format!("{}->{}", v.frac(), img.frac()))
                .collect();
            report.line(format!("lowered={}", lowered.join(",")));
            report.line(b.to_file_format().trim_end().to_string());
            0
        }
        Cmd::Agetest { a, set, eps, budget } => {
            let sa = read_space(&a)?;
            let r = parse_set(&set)?;
            match approx::approx_embedding(&sa, &r, &eps, budget) {
                EmbeddingOutcome::Witness(w) => {
                    report.line("agetest=witness".to_string());
                    report.line(w.space.to_file_format().trim_end().to_string());
                    0
                }
                EmbeddingOutcome::Impossible(cert) => {
                    report.line("agetest=impossible".to_string());
                    match &cert {
                        ImpossibilityCert::EmptyEdgeWindow { i, j, target, lo, hi } => {
                            report.line(format!(
                                "empty_window=edge:{i},{j};target={};window=({},{})",
                                target.frac(),
                                lo.frac(),
                                hi.frac()
                            ));
                        }
                        ImpossibilityCert::TriangleGap {
                            long_edge,
                            long_bounds,
                            short_edges,
                            short_bounds,
                        } => {
                            report.line(format!(
                                "triangle=long:{},{};shorts:{},{}|{},{}",
                                long_edge.0,
                                long_edge.1,
                                short_edges[0].0,
                                short_edges[0].1,
                                short_edges[1].0,
                                short_edges[1].1
                            ));
                            report.line(format!(
                                "bounds=long_inf={} attained={};short_sups={},{} attained={},{}",
                                long_bounds.inf.frac(),
                                long_bounds.inf_attained,
                                short_bounds[0].sup.frac(),
                                short_bounds[1].sup.frac(),
                                short_bounds[0].sup_attained,
                                short_bounds[1].sup_attained
                            ));
                        }
                    }
                    report.prose("no perturbed copy exists within the tolerance");
                    EXIT_NEGATIVE
                }
                EmbeddingOutcome::Unknown { explored } => {
                    report.line("agetest=unknown".to_string());
                    report.line(format!("explored={explored}"));
                    EXIT_UNKNOWN
                }
            }
        }
        Cmd::Fixtures { filter } => {
            let (lines, all_pass) = fixtures::run_catalog(&filter);
            for l in lines {
                report.line(l);
            }
            if all_pass {
                0
            } else {
                EXIT_NEGATIVE
            }
        }
    };
    Ok((report, code))
}

/// The default dense subset for rounding: the rational points of interval
/// representations; countable representations are already dense in
/// themselves.
fn default_dense(set: &DistanceSet) -> DistanceSet {
    match set {
        DistanceSet::Intervals(comps) => {
            DistanceSet::rationals(comps.clone()).expect("same components stay valid")
        }
        other => other.clone(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok((report, code)) => {
            report.print();
            ExitCode::from(code)
        }
        Err(msg) => usage_error(msg),
    }
}
