//! `latinlab`: command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 size-guard refusal, 3 a check
//! that came back negative (unsatisfiable pattern, false verdict).

mod emit;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use latinlab::census::{self, Guard};
use latinlab::expander::{self, Digraph, ExpanderMode, Walk};
use latinlab::lab;
use latinlab::plr;
use latinlab::sampler::{self, Method, SamplerConfig};
use latinlab::subsquares::{self, Reading};
use latinlab::{Edge, Error, LatinRectangle, PartialLatinRectangle};

use emit::{big, rational, table, Format, Output};

#[derive(Parser, Debug)]
#[command(name = "latinlab", version, about = "Random Latin rectangles: census, sampling, subsquares and digraph checks")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Lift the exhaustive-enumeration size guard.
    #[arg(long, global = true)]
    guard_override: bool,
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "LATINLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count k x n Latin rectangles, optionally those extending a pattern.
    Census(CensusArgs),
    /// Draw random Latin rectangles as .plr blocks.
    Sample(SampleArgs),
    /// Count Latin subsquares of a rectangle.
    Subsquares(SubsquareArgs),
    /// Diagnostics on the auxiliary digraph of one row.
    Digraph(DigraphArgs),
    /// Monte Carlo estimate of the probability that a pattern appears.
    Estimate(EstimateArgs),
    /// Exact finite checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Count only rectangles containing this .plr pattern.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    /// Counted extension, exactly uniform.
    Exact,
    /// Uniform index into the enumerated support.
    Enumeration,
    /// Switch chain restarted for every sample.
    Mcmc,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            MethodArg::Exact => Method::ExactCountedExtension,
            MethodArg::Enumeration => Method::ExactEnumeration,
            MethodArg::Mcmc => Method::SwitchMcmc,
        }
    }
}

#[derive(Args, Debug)]
struct SamplerArgs {
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Switch steps per sample (default 100 k n ln n).
    #[arg(long)]
    burn_in: Option<u64>,
    /// Longest switch cycle, in columns (default n).
    #[arg(long)]
    max_half_length: Option<usize>,
}

impl SamplerArgs {
    fn config(&self, k: usize, n: usize, seed: u64) -> SamplerConfig {
        let mut cfg = SamplerConfig::new(self.method.method(), k, n, seed);
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if let Some(l) = self.max_half_length {
            cfg.max_half_length = l;
        }
        cfg
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Args, Debug)]
struct SubsquareArgs {
    /// A complete rectangle in .plr format.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    order: usize,
    /// Count order-r subarrays using at most this many symbols.
    #[arg(long)]
    max_symbols: Option<usize>,
    /// List every counted subarray.
    #[arg(long)]
    witnesses: bool,
    /// Whether counted subarrays must be repetition-free in rows and columns.
    #[arg(long, value_enum, default_value = "repetition-free")]
    reading: ReadingArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReadingArg {
    RepetitionFree,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DigraphCheck {
    Expander,
    Degrees,
    Paths,
    Cycles,
    Walk,
}

#[derive(Args, Debug)]
struct DigraphArgs {
    /// A complete rectangle in .plr format.
    #[arg(long)]
    input: PathBuf,
    /// Row whose matching defines the digraph (1-based).
    #[arg(long)]
    row: usize,
    /// Columns whose row entries form the excluded sub-matching, e.g. 1,3,4.
    #[arg(long, value_delimiter = ',')]
    exclude_cols: Vec<usize>,
    #[arg(long, value_enum)]
    check: DigraphCheck,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Density for the almost-regularity check (default (n - k)/n).
    #[arg(long)]
    delta: Option<f64>,
    /// Regularity slack.
    #[arg(long, default_value_t = 0.1)]
    f: f64,
    /// Sample this many subsets instead of checking all of them.
    #[arg(long)]
    budget: Option<u64>,
    /// Start symbol for paths, cycles and walks.
    #[arg(long)]
    from: Option<usize>,
    /// End symbol for paths.
    #[arg(long)]
    to: Option<usize>,
    /// Path or cycle length in arcs.
    #[arg(long)]
    length: Option<usize>,
    /// Walk steps.
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Pattern in .plr format.
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Tolerance of the reference window ((1 -+ e)/n)^l.
    #[arg(long, default_value_t = lab::DEFAULT_EPSILON)]
    epsilon: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyCheck {
    RestrictionIdentity,
    SwitchPartition,
    SingleEntry,
    SwitchRatios,
    SubsquareExpectation,
    SubsquareBound,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: VerifyCheck,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Subsquare order m.
    #[arg(long)]
    order: Option<usize>,
    /// Partial matching tuple for the switch checks, in .plr format.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Sparsity C of sampled tuples.
    #[arg(long, default_value_t = 1)]
    sparsity: usize,
    /// Number of sampled tuples.
    #[arg(long, default_value_t = 4)]
    family: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = lab::DEFAULT_EPSILON)]
    epsilon: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeGuardExceeded { .. } | Error::TooLargeForExact { .. } | Error::PathGuardExceeded { .. } => 2,
            Error::Unsatisfiable => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Run = Result<Outcome, Failure>;

/// Output plus whether the subcommand's check succeeded.
struct Outcome {
    output: Output,
    ok: bool,
}

impl From<Output> for Outcome {
    fn from(output: Output) -> Self {
        Outcome { output, ok: true }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn read_partial(path: &Path) -> Result<PartialLatinRectangle, Failure> {
    plr::parse(&read(path)?).map_err(with_path(path))
}

fn read_rectangle(path: &Path) -> Result<LatinRectangle, Failure> {
    plr::parse_rectangle(&read(path)?).map_err(with_path(path))
}

fn guard(cli: &Cli) -> Guard {
    if cli.guard_override {
        Guard::Override
    } else {
        Guard::Enforce
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| invalid(format!("--{flag} is required for this check")))
}

fn rows_json(l: &LatinRectangle) -> Value {
    json!(l.rows())
}

fn census_cmd(cli: &Cli, a: &CensusArgs) -> Run {
    let pattern = a.pattern.as_deref().map(read_partial).transpose()?;
    let r = census::census(a.k, a.n, pattern.as_ref(), guard(cli))?;
    let constrained = r.constrained.as_ref().map(big);
    Ok(Output {
        json: json!({"k": r.k, "n": r.n, "total": big(&r.total), "constrained": constrained}),
        csv: table(
            vec!["k", "n", "total", "constrained"],
            vec![vec![r.k.to_string(), r.n.to_string(), r.total.to_string(), constrained.unwrap_or_default()]],
        ),
        text: match &r.constrained {
            Some(c) => format!("total {}\nconstrained {c}\n", r.total),
            None => format!("{}\n", r.total),
        },
    }
    .into())
}

fn sample_cmd(cli: &Cli, a: &SampleArgs) -> Run {
    let cfg = a.sampler.config(a.k, a.n, cli.seed);
    let s = sampler::build_sampler(a.k, a.n, &cfg, guard(cli))?;
    let draws = sampler::sample_many(s.as_ref(), a.count, cli.seed);
    let text = draws.iter().map(plr::format_rectangle).collect::<Vec<_>>().join("\n");
    let csv_rows = draws
        .iter()
        .enumerate()
        .flat_map(|(i, l)| {
            (0..l.k()).map(move |r| {
                let mut row = vec![(i + 1).to_string(), (r + 1).to_string()];
                row.extend(l.row(r).iter().map(|s| s.to_string()));
                row
            })
        })
        .collect();
    let mut header = vec!["sample".to_string(), "row".to_string()];
    header.extend((1..=a.n).map(|c| format!("c{c}")));
    Ok(Output {
        json: json!({
            "k": a.k,
            "n": a.n,
            "method": cfg.method.tag(),
            "burn_in": cfg.burn_in,
            "samples": draws.iter().map(rows_json).collect::<Vec<_>>(),
        }),
        csv: table(header, csv_rows),
        text,
    }
    .into())
}

fn subsquares_cmd(a: &SubsquareArgs) -> Run {
    let l = read_rectangle(&a.input)?;
    let cap = a.max_symbols.unwrap_or(a.order);
    let reading = match a.reading {
        ReadingArg::RepetitionFree => Reading::RepetitionFree,
        ReadingArg::Any => Reading::Any,
    };
    let c = subsquares::subsquare_census(&l, a.order, cap, reading, a.witnesses)?;
    let witnesses = c.witnesses.as_ref().map(|w| serde_json::to_value(w).expect("plain data"));
    let csv_rows = match &c.witnesses {
        Some(ws) => ws
            .iter()
            .map(|w| {
                let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                vec![c.order.to_string(), c.cap.to_string(), join(&w.rows), join(&w.cols), join(&w.symbols)]
            })
            .collect(),
        None => vec![vec![c.order.to_string(), c.cap.to_string(), c.count.to_string()]],
    };
    let header = if c.witnesses.is_some() {
        vec!["order", "cap", "rows", "cols", "symbols"]
    } else {
        vec!["order", "cap", "count"]
    };
    let mut json = json!({"order": c.order, "cap": c.cap, "count": big(&c.count)});
    if let Some(w) = witnesses {
        json["witnesses"] = w;
    }
    Ok(Output { json, csv: table(header, csv_rows), text: format!("{}\n", c.count) }.into())
}

fn vertex_of(d: &Digraph, symbol: usize, flag: &str) -> Result<usize, Failure> {
    d.labels()
        .iter()
        .position(|&s| s == symbol)
        .ok_or_else(|| invalid(format!("--{flag} {symbol} is not a vertex of the digraph")))
}

fn digraph_cmd(cli: &Cli, a: &DigraphArgs) -> Run {
    let l = read_rectangle(&a.input)?;
    if a.row == 0 || a.row > l.k() {
        return Err(invalid(format!("--row {} outside 1..={}", a.row, l.k())));
    }
    let j = a.row - 1;
    let mut m = Vec::new();
    for &c in &a.exclude_cols {
        if c == 0 || c > l.n() {
            return Err(invalid(format!("--exclude-cols entry {c} outside 1..={}", l.n())));
        }
        m.push(Edge::new(c - 1, l.get(j, c - 1)));
    }
    let d = expander::build_auxiliary_digraph(&l.to_matchings(), j, &m)?;
    let mut json = json!({"row": a.row, "vertices": d.labels(), "arcs": d.arcs().count()});
    let (header, rows, text, ok);
    match a.check {
        DigraphCheck::Expander => {
            let mode = match a.budget {
                Some(budget) => ExpanderMode::Sampled { budget, seed: cli.seed },
                None => ExpanderMode::Exact,
            };
            let v = expander::is_robust_outexpander(&d, a.nu, a.tau, mode)?;
            json["check"] = json!("expander");
            json["nu"] = json!(a.nu);
            json["tau"] = json!(a.tau);
            json["verdict"] = json!(v.holds);
            json["exhaustive"] = json!(v.exhaustive);
            json["subsets_checked"] = json!(v.subsets_checked);
            json["witness"] = json!(v.witness);
            json["note"] = json!(v.note);
            let w = v.witness.as_ref().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            header = vec!["nu", "tau", "verdict", "exhaustive", "subsets_checked", "witness"];
            rows = vec![vec![
                a.nu.to_string(),
                a.tau.to_string(),
                v.holds.to_string(),
                v.exhaustive.to_string(),
                v.subsets_checked.to_string(),
                w.clone().unwrap_or_default(),
            ]];
            text = match &w {
                Some(w) => format!("false ({})\nwitness {w}\n", v.note),
                None => format!("true ({})\n", v.note),
            };
            ok = v.holds;
        }
        DigraphCheck::Degrees => {
            let r = expander::degree_report(&d);
            let delta = a.delta.unwrap_or((l.n() - l.k()) as f64 / l.n() as f64);
            let regular = expander::almost_regular_check(&d, delta, a.f);
            json["check"] = json!("degrees");
            json["degrees"] = serde_json::to_value(r).expect("plain data");
            json["delta"] = json!(delta);
            json["f"] = json!(a.f);
            json["almost_regular"] = json!(regular);
            header = vec!["vertices", "min_out", "max_out", "min_in", "max_in", "delta", "f", "almost_regular"];
            rows = vec![vec![
                r.vertices.to_string(),
                r.min_out.to_string(),
                r.max_out.to_string(),
                r.min_in.to_string(),
                r.max_in.to_string(),
                delta.to_string(),
                a.f.to_string(),
                regular.to_string(),
            ]];
            text = format!(
                "vertices {}\nout-degree {}..{}\nin-degree {}..{}\nalmost regular {regular}\n",
                r.vertices, r.min_out, r.max_out, r.min_in, r.max_in
            );
            ok = regular;
        }
        DigraphCheck::Paths | DigraphCheck::Cycles => {
            let from = vertex_of(&d, need(a.from, "from")?, "from")?;
            let length = need(a.length, "length")?;
            let (count, to) = if a.check == DigraphCheck::Paths {
                let to = vertex_of(&d, need(a.to, "to")?, "to")?;
                (expander::count_paths(&d, from, to, length)?, Some(d.labels()[to]))
            } else {
                (expander::count_cycles_through(&d, from, length)?, None)
            };
            json["check"] = json!(if to.is_some() { "paths" } else { "cycles" });
            json["from"] = json!(d.labels()[from]);
            json["to"] = json!(to);
            json["length"] = json!(length);
            json["count"] = json!(big(&count));
            header = vec!["from", "to", "length", "count"];
            rows = vec![vec![
                d.labels()[from].to_string(),
                to.map(|t| t.to_string()).unwrap_or_default(),
                length.to_string(),
                count.to_string(),
            ]];
            text = format!("{count}\n");
            ok = true;
        }
        DigraphCheck::Walk => {
            let from = vertex_of(&d, need(a.from, "from")?, "from")?;
            let walk = Walk::new(&d, a.nu)?;
            let reports = walk.series(from, a.steps)?;
            let last = reports.last().expect("t = 0 is always reported");
            json["check"] = json!("walk");
            json["from"] = json!(d.labels()[from]);
            json["sub_sample"] = json!(walk.sub_sample());
            json["stationary"] = json!(last.stationary.as_ref().map(|s| s.iter().map(rational).collect::<Vec<_>>()));
            json["alpha"] = json!(last.alpha.as_ref().map(rational));
            json["beta"] = json!(last.beta.as_ref().map(rational));
            json["threshold"] = json!(last.threshold);
            json["positive_transitions"] = json!(last.positive_transitions);
            json["steps"] = json!(reports
                .iter()
                .map(|r| json!({
                    "t": r.t,
                    "distribution": r.distribution.iter().map(rational).collect::<Vec<_>>(),
                    "within_envelope": r.within_envelope,
                    "within_envelope_t": r.within_envelope_t,
                }))
                .collect::<Vec<_>>());
            header = vec!["t", "vertex", "probability", "stationary", "within_envelope", "within_envelope_t"];
            let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
            let names = d.labels();
            rows = reports
                .iter()
                .flat_map(|r| {
                    r.distribution.iter().enumerate().map(move |(i, p)| {
                        vec![
                            r.t.to_string(),
                            names[i].to_string(),
                            p.to_string(),
                            r.stationary.as_ref().map(|s| s[i].to_string()).unwrap_or_default(),
                            opt(r.within_envelope),
                            opt(r.within_envelope_t),
                        ]
                    })
                })
                .collect();
            let dist: Vec<String> = last.distribution.iter().map(|p| p.to_string()).collect();
            text = format!("t = {}: {}\n", last.t, dist.join(" "));
            ok = reports.iter().all(|r| r.within_envelope != Some(false) && r.within_envelope_t != Some(false));
        }
    }
    Ok(Outcome { output: Output { json, csv: table(header, rows), text }, ok })
}

fn estimate_row(r: &lab::EstimateReport) -> Vec<String> {
    let (num, den) = match &r.exact {
        Some(q) => (q.numer().to_string(), q.denom().to_string()),
        None => (String::new(), String::new()),
    };
    vec![
        r.n.to_string(),
        r.entries.to_string(),
        r.samples.to_string(),
        r.hits.to_string(),
        r.estimate.to_string(),
        r.ci_low.to_string(),
        r.ci_high.to_string(),
        r.reference_low.to_string(),
        r.reference_high.to_string(),
        num,
        den,
        r.seed.to_string(),
        r.method.tag().to_string(),
    ]
}

const ESTIMATE_HEADER: [&str; 13] = [
    "n",
    "entries",
    "samples",
    "hits",
    "estimate",
    "ci_low",
    "ci_high",
    "reference_low",
    "reference_high",
    "exact_num",
    "exact_den",
    "seed",
    "method",
];

fn estimate_cmd(cli: &Cli, a: &EstimateArgs) -> Run {
    let p = read_partial(&a.pattern)?;
    let cfg = a.sampler.config(p.k(), p.n(), cli.seed);
    let r = lab::estimate_containment(&p, &cfg, a.samples, a.epsilon, guard(cli))?;
    let json = json!({
        "k": p.k(),
        "n": r.n,
        "entries": r.entries,
        "samples": big(&r.samples),
        "hits": big(&r.hits),
        "estimate": r.estimate,
        "ci_low": r.ci_low,
        "ci_high": r.ci_high,
        "epsilon": r.epsilon,
        "reference_low": r.reference_low,
        "reference_high": r.reference_high,
        "reference_label": lab::ASYMPTOTIC_LABEL,
        "ci_meets_reference": r.ci_meets_reference(),
        "exact": r.exact.as_ref().map(rational),
        "ci_covers_exact": r.ci_covers_exact(),
        "method": r.method.tag(),
    });
    let text = format!(
        "estimate {:.6} [{:.6}, {:.6}] from {} / {}\nreference [{:.6}, {:.6}] ({})\n{}",
        r.estimate,
        r.ci_low,
        r.ci_high,
        r.hits,
        r.samples,
        r.reference_low,
        r.reference_high,
        lab::ASYMPTOTIC_LABEL,
        r.exact.as_ref().map(|q| format!("exact {q}\n")).unwrap_or_default()
    );
    Ok(Output { json, csv: table(ESTIMATE_HEADER.to_vec(), vec![estimate_row(&r)]), text }.into())
}

fn verify_cmd(cli: &Cli, a: &VerifyArgs) -> Run {
    let g = guard(cli);
    match a.check {
        VerifyCheck::RestrictionIdentity => {
            let (n, k, m) = (need(a.n, "n")?, need(a.k, "k")?, need(a.order, "order")?);
            let r = lab::verify_restriction_identity(n, m, k, g)?;
            let json = json!({
                "check": "restriction-identity",
                "n": n, "m": m, "k": k,
                "squares": big(&r.squares),
                "mean_full": rational(&r.mean_full),
                "mean_restricted": rational(&r.mean_restricted),
                "lhs": rational(&r.lhs),
                "rhs": rational(&r.rhs),
                "holds": r.holds,
            });
            let row = vec![
                n.to_string(),
                m.to_string(),
                k.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.holds.to_string(),
            ];
            let text = format!("{} {} {}\n", r.lhs, if r.holds { "==" } else { "!=" }, r.rhs);
            Ok(Outcome {
                output: Output { json, csv: table(vec!["n", "m", "k", "lhs", "rhs", "holds"], vec![row]), text },
                ok: r.holds,
            })
        }
        VerifyCheck::SwitchPartition => {
            let tuple = match &a.pattern {
                Some(path) => read_partial(path)?,
                None => PartialLatinRectangle::empty(need(a.k, "k")?, need(a.n, "n")?)?,
            };
            let (k, n) = (tuple.k(), tuple.n());
            let m = tuple.to_matchings();
            let mut rows = Vec::new();
            let mut edges = Vec::new();
            let mut all = true;
            for col in 0..n {
                for symbol in 1..=n as u8 {
                    let e = Edge::new(col, symbol);
                    if m.owner_of(e).is_some() {
                        continue;
                    }
                    let s = census::switch_classes(&m, e, g)?;
                    let holds = s.partition_holds();
                    all &= holds;
                    edges.push(json!({
                        "col": col + 1,
                        "symbol": symbol,
                        "a": s.a.iter().map(big).collect::<Vec<_>>(),
                        "b": big(&s.b),
                        "total": big(&s.total),
                        "holds": holds,
                    }));
                    for (j, aj) in s.a.iter().enumerate() {
                        rows.push(vec![
                            (col + 1).to_string(),
                            symbol.to_string(),
                            (j + 1).to_string(),
                            aj.to_string(),
                            s.b.to_string(),
                            s.total.to_string(),
                            holds.to_string(),
                        ]);
                    }
                }
            }
            let text = format!("{} edges, partition {}\n", edges.len(), if all { "holds" } else { "FAILS" });
            let json = json!({"check": "switch-partition", "k": k, "n": n, "edges": edges, "holds": all});
            Ok(Outcome {
                output: Output {
                    json,
                    csv: table(vec!["col", "symbol", "row", "a", "b", "total", "partition_holds"], rows),
                    text,
                },
                ok: all,
            })
        }
        VerifyCheck::SingleEntry => {
            let (k, n) = (need(a.k, "k")?, need(a.n, "n")?);
            g.check(k, n)?;
            let want = num_rational::BigRational::new(1.into(), (n as u64).into());
            let mut rows = Vec::new();
            let mut all = true;
            for r in 0..k {
                for c in 0..n {
                    for s in 1..=n as u8 {
                        let p = PartialLatinRectangle::from_entries(k, n, [(r, c, s)])?;
                        let pr = census::exact_containment_probability(&p, g)?;
                        all &= pr == want;
                        rows.push(vec![(r + 1).to_string(), (c + 1).to_string(), s.to_string(), pr.to_string()]);
                    }
                }
            }
            let json = json!({
                "check": "single-entry",
                "k": k,
                "n": n,
                "expected": rational(&want),
                "checked": rows.len(),
                "confirmed": all,
            });
            let text = if all {
                format!("every single entry has probability exactly {want} ({} checked)\n", rows.len())
            } else {
                "some single entry differs from 1/n\n".to_string()
            };
            Ok(Outcome {
                output: Output { json, csv: table(vec!["row", "col", "symbol", "probability"], rows), text },
                ok: all,
            })
        }
        VerifyCheck::SwitchRatios => {
            let (k, n) = (need(a.k, "k")?, need(a.n, "n")?);
            let s = lab::switching_ratio_sweep(k, n, a.sparsity, a.family, cli.seed, g)?;
            let rows: Vec<Vec<String>> = s
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.tuple.to_string(),
                        r.fill.to_string(),
                        (r.edge.col + 1).to_string(),
                        r.edge.symbol.to_string(),
                        (r.row + 1).to_string(),
                        r.a.to_string(),
                        r.b.to_string(),
                        r.ratio.to_string(),
                        r.partition_holds.to_string(),
                    ]
                })
                .collect();
            let json = json!({
                "check": "switch-ratios",
                "k": k,
                "n": n,
                "sparsity": a.sparsity,
                "tuples": s.tuples.iter().map(plr::format_partial).collect::<Vec<_>>(),
                "rows": s.rows.iter().map(|r| json!({
                    "tuple": r.tuple,
                    "col": r.edge.col + 1,
                    "symbol": r.edge.symbol,
                    "row": r.row + 1,
                    "a": big(&r.a),
                    "b": big(&r.b),
                    "ratio": rational(&r.ratio),
                    "partition_holds": r.partition_holds,
                })).collect::<Vec<_>>(),
                "degenerate": s.degenerate,
                "min": s.min.as_ref().map(rational),
                "max": s.max.as_ref().map(rational),
                "mean": s.mean,
                "label": s.label,
            });
            let show = |q: &Option<num_rational::BigRational>| q.as_ref().map(|q| q.to_string()).unwrap_or("-".into());
            let text = format!(
                "{} rows, ratio min {} max {} mean {} ({})\n",
                s.rows.len(),
                show(&s.min),
                show(&s.max),
                s.mean.map(|m| format!("{m:.6}")).unwrap_or("-".into()),
                s.label
            );
            Ok(Outcome {
                output: Output {
                    json,
                    csv: table(vec!["tuple", "fill", "col", "symbol", "row", "a", "b", "ratio", "partition_holds"], rows),
                    text,
                },
                ok: s.partition_holds(),
            })
        }
        VerifyCheck::SubsquareExpectation => {
            let (k, n, m) = (need(a.k, "k")?, need(a.n, "n")?, need(a.order, "order")?);
            let cfg = a.sampler.config(k, n, cli.seed);
            let r = lab::subsquare_expectation_experiment(n, k, m, a.samples, &cfg, a.epsilon, g)?;
            let (wl, wh) = r.window.map(|(l, h)| (Some(l), Some(h))).unwrap_or((None, None));
            let json = json!({
                "check": "subsquare-expectation",
                "n": n, "k": k, "m": m,
                "samples": r.samples,
                "method": r.method.tag(),
                "mean": r.mean,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "exact_mean": r.exact_mean.as_ref().map(rational),
                "window_low": wl,
                "window_high": wh,
                "epsilon": r.epsilon,
                "label": r.label,
            });
            let opt = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
            let row = vec![
                n.to_string(),
                k.to_string(),
                m.to_string(),
                r.samples.to_string(),
                r.mean.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
                r.exact_mean.as_ref().map(|q| q.to_string()).unwrap_or_default(),
                opt(wl),
                opt(wh),
            ];
            let text = format!(
                "mean {:.6} [{:.6}, {:.6}]{}\n",
                r.mean,
                r.ci_low,
                r.ci_high,
                r.exact_mean.as_ref().map(|q| format!(", exact {q}")).unwrap_or_default()
            );
            let header =
                vec!["n", "k", "m", "samples", "mean", "ci_low", "ci_high", "exact_mean", "window_low", "window_high"];
            Ok(Output { json, csv: table(header, vec![row]), text }.into())
        }
        VerifyCheck::SubsquareBound => {
            let n = need(a.n, "n")?;
            let top = subsquares::three_quarter_power_floor(n as u64) as usize;
            let mut rows = Vec::new();
            for m in 2..=top.max(2) {
                rows.push(vec![n.to_string(), m.to_string(), subsquares::ln_subsquare_bound(n as f64, m)?.to_string()]);
            }
            let decreasing = subsquares::subsquare_bound_decreasing(n as u64)?;
            let json = json!({
                "check": "subsquare-bound",
                "n": n,
                "m_max": top,
                "decreasing": decreasing,
                "ln_bound_at_3": subsquares::ln_subsquare_bound(n as f64, 3)?,
            });
            Ok(Outcome {
                output: Output {
                    json,
                    csv: table(vec!["n", "m", "ln_bound"], rows),
                    text: format!("decreasing over 2..={top}: {decreasing}\n"),
                },
                ok: decreasing,
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Census(_) => "census",
        Command::Sample(_) => "sample",
        Command::Subsquares(_) => "subsquares",
        Command::Digraph(_) => "digraph",
        Command::Estimate(_) => "estimate",
        Command::Verify(_) => "verify",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("latinlab: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Census(a) => census_cmd(&cli, a),
        Command::Sample(a) => sample_cmd(&cli, a),
        Command::Subsquares(a) => subsquares_cmd(a),
        Command::Digraph(a) => digraph_cmd(&cli, a),
        Command::Estimate(a) => estimate_cmd(&cli, a),
        Command::Verify(a) => verify_cmd(&cli, a),
    };
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    match result {
        Ok(outcome) => {
            let meta = json!({"seed": cli.seed, "version": env!("CARGO_PKG_VERSION"), "command": command_name(&cli.command)});
            if let Err(e) = outcome.output.write(format, meta) {
                eprintln!("latinlab: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.ok { 0 } else { 3 })
        }
        Err(f) => {
            eprintln!("latinlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
