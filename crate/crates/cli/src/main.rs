mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use c5census::census::{
    dangerous_pair_probability, edges_for_density, exact_census, exponent_curve, monte_carlo_census, CensusError, CensusMode, CensusResult,
    CurveMode, PairKind,
};
use c5census::entropy::{h_exponent, h_minus_r, r_rate, subgraph_exponent};
use c5census::generators::{gnm_sample_with, gnp_sample_with, plan_bipartite, plan_complement_high, plan_kpartite, GenerateError};
use c5census::graph::{parse_graph, parse_graphs};
use c5census::homsets::{hom, hom_distribution_experiment, p3_packing_trichotomy, HomError, PackingOutcome};
use c5census::recognizers::{
    components_in, find_induced_c5, find_induced_p3, generalised_split_witness, perfect_obstruction, ClassPredicate, RecognizeError,
};
use c5census::rng::substream;
use c5census::types::{extract_type, TypeParams};
use c5census::{Graph, Partition, VertexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

const SCHEMA_VERSION: u32 = 1;
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)");

#[derive(Parser)]
#[command(name = "c5census", version = VERSION, about = "Censuses and structure experiments for induced-C5-free graphs")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// File of key=value lines mirrored to flags; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count labeled graphs with n vertices and m edges in a class.
    Census(CensusArgs),
    /// Entropy exponents over a density grid, or census exponents over n.
    Curve(CurveArgs),
    /// Sample graphs from the split constructions or G(n, m) / G(n, p).
    #[command(alias = "sample")]
    Generate(GenerateArgs),
    /// Decide class membership of the graphs in a file.
    Recognize(RecognizeArgs),
    /// P3 / anti-P3 packing or homogeneous set certificate.
    Packing(GraphInput),
    /// Largest clique or independent set.
    Hom(GraphInput),
    /// Distribution of hom(G) over G(n, m), overall and among induced-C5-free samples.
    Homdist(HomdistArgs),
    /// Coloured type of a graph with respect to a partition.
    Typecheck(TypecheckArgs),
    /// Exact induced-C5 probability for a dangerous pair.
    DangerousPair(DangerArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Class {
    All,
    C5free,
    Perfect,
    Gensplit,
    Cluster,
}

impl Class {
    fn predicate(self) -> ClassPredicate {
        match self {
            Class::All => ClassPredicate::AllGraphs,
            Class::C5free => ClassPredicate::InducedC5Free,
            Class::Perfect => ClassPredicate::Perfect,
            Class::Gensplit => ClassPredicate::GeneralisedSplit,
            Class::Cluster => ClassPredicate::ClusterGraph,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Mc,
}

#[derive(Args, Serialize)]
struct CensusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "c", required_unless_present = "c")]
    m: Option<usize>,
    /// Edge density; m = round(c * C(n,2)), ties to even.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum, default_value = "c5free")]
    class: Class,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run exact censuses beyond the subset budget.
    #[arg(long)]
    force: bool,
    /// Write the JSON document here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also write a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CurveArgs {
    /// Vertex counts; when given, one census per (n, c).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Densities; default is the grid i/(points+1).
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    #[arg(long, default_value_t = 99)]
    points: usize,
    #[arg(long, value_enum, default_value = "c5free")]
    class: Class,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    force: bool,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Bipartite,
    Kpartite,
    High,
    Gnm,
    Gnp,
}

#[derive(Args, Serialize)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, required_unless_present = "p")]
    m: Option<usize>,
    /// Edge probability for `--kind gnp`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Write the graphs here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GraphInput {
    /// Graph file in the text format (standard input when omitted or `-`).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Serialize)]
struct RecognizeArgs {
    #[arg(long, value_enum)]
    class: Class,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    witness: bool,
}

#[derive(Args, Serialize)]
struct HomdistArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the histogram as CSV here instead of JSON to standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TypecheckArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    d: f64,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    eps_sub: f64,
    #[arg(long, default_value_t = 2)]
    k_sub: usize,
    #[arg(long, default_value_t = 0.25)]
    mu_proxy: f64,
    #[arg(long, default_value_t = 64)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Side {
    P3,
    AntiP3,
}

impl From<Side> for PairKind {
    fn from(s: Side) -> Self {
        match s {
            Side::P3 => PairKind::P3,
            Side::AntiP3 => PairKind::AntiP3,
        }
    }
}

#[derive(Args, Serialize)]
struct DangerArgs {
    /// Omit both kinds to report all four combinations.
    #[arg(long, value_enum)]
    kind1: Option<Side>,
    #[arg(long, value_enum)]
    kind2: Option<Side>,
    /// Edge probabilities as decimals or fractions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1/2")]
    p: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Input(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Input(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Input(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            CensusError::TooManyVertices(_)
            | CensusError::TooManyEdges { .. }
            | CensusError::NoSamples
            | CensusError::ProbabilityOutOfRange(_)
            | CensusError::Entropy(_)
            | CensusError::Recognize(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<RecognizeError> for Failure {
    fn from(e: RecognizeError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<HomError> for Failure {
    fn from(e: HomError) -> Self {
        match e {
            HomError::NoCertificate { .. } => Failure::Runtime(e.to_string()),
            HomError::TooFewVertices(_) => Failure::Input(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

#[derive(Serialize)]
struct Envelope<'a, P: Serialize, R: Serialize> {
    schema_version: u32,
    tool_version: &'static str,
    command: &'a str,
    params: &'a P,
    seed: Option<u64>,
    threads: usize,
    wall_time_s: f64,
    result: R,
}

struct Run {
    command: &'static str,
    threads: usize,
    started: Instant,
}

impl Run {
    fn document<P: Serialize, R: Serialize>(&self, params: &P, seed: Option<u64>, result: R) -> String {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: self.command,
            params,
            seed,
            threads: self.threads,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            result,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("serializable");
        s.push('\n');
        s
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: Option<&PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(|e| Failure::Input(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn read_graphs(path: Option<&PathBuf>) -> Result<Vec<Graph>, Failure> {
    let graphs = parse_graphs(&read_text(path)?).map_err(|e| Failure::Input(format!("invalid graph file: {e}")))?;
    if graphs.is_empty() {
        return Err(Failure::Input("invalid graph file: no graph found".into()));
    }
    Ok(graphs)
}

fn labels(s: VertexSet) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn list(vs: &[usize]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct CensusPayload<'a> {
    n: usize,
    m: usize,
    class: &'a str,
    count_str: String,
    total_str: String,
    log2_count: Option<f64>,
    exponent: Option<f64>,
    fraction: f64,
    #[serde(flatten)]
    mode: &'a CensusMode,
    wall_time_s: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn payload(r: &CensusResult) -> CensusPayload<'_> {
    CensusPayload {
        n: r.n,
        m: r.m,
        class: &r.predicate,
        count_str: r.count.to_string(),
        total_str: r.total.to_string(),
        log2_count: finite(r.log2_count),
        exponent: finite(r.exponent),
        fraction: r.fraction(),
        mode: &r.mode,
        wall_time_s: r.wall_time_s,
    }
}

fn census(run: &Run, a: &CensusArgs) -> Outcome {
    let m = match (a.m, a.c) {
        (Some(m), _) => m,
        (None, Some(c)) => edges_for_density(a.n, c).map_err(|e| Failure::Usage(e.to_string()))?,
        (None, None) => return Err(Failure::Usage("one of --m or --c is required".into())),
    };
    let pred = a.class.predicate();
    let (r, seed) = match a.mode {
        Mode::Exact => (exact_census(a.n, m, &pred, a.force)?, None),
        Mode::Mc => (monte_carlo_census(a.n, m, &pred, a.samples, a.seed)?, Some(a.seed)),
    };
    emit(a.json.as_ref(), &run.document(a, seed, payload(&r)))?;
    if let Some(path) = &a.csv {
        let text = format!(
            "n,m,class,count,total,log2_count,exponent\n{},{},{},{},{},{},{}\n",
            r.n, r.m, r.predicate, r.count, r.total, r.log2_count, r.exponent
        );
        emit(Some(path), &text)?;
    }
    Ok(0)
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn curve(a: &CurveArgs) -> Outcome {
    let cs: Vec<f64> = if a.c.is_empty() { (1..=a.points).map(|i| i as f64 / (a.points + 1) as f64).collect() } else { a.c.clone() };
    let mut out = String::new();
    if a.n.is_empty() {
        out.push_str("c,h,r,h_minus_r,subgraph_r3\n");
        for &c in &cs {
            let usage = |e: c5census::entropy::EntropyError| Failure::Usage(e.to_string());
            let h = h_exponent(c).map_err(usage)?;
            let r = r_rate(c).map_err(usage)?;
            let hr = h_minus_r(c).map_err(usage)?;
            let s3 = subgraph_exponent(3, c).map_err(usage)?.value;
            writeln!(out, "{},{},{},{},{}", sig17(c), sig17(h), sig17(r), sig17(hr), sig17(s3)).unwrap();
        }
    } else {
        let mode = match a.mode {
            Mode::Exact => CurveMode::Exact { force: a.force },
            Mode::Mc => CurveMode::MonteCarlo { samples: a.samples, seed: a.seed },
        };
        let rows = exponent_curve(&a.n, &cs, &a.class.predicate(), mode)?;
        out.push_str("n,c,m,h,count,total,log2_count,exponent\n");
        for row in rows {
            let r = &row.result;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.n,
                sig17(row.c),
                r.m,
                sig17(row.h),
                r.count,
                r.total,
                sig17(r.log2_count),
                sig17(r.exponent)
            )
            .unwrap();
        }
    }
    emit(a.csv.as_ref(), &out)?;
    Ok(0)
}

fn generate(a: &GenerateArgs) -> Outcome {
    let edges = || a.m.ok_or_else(|| Failure::Usage(format!("--m is required for --kind {:?}", a.kind).to_lowercase()));
    let plan = match a.kind {
        Kind::Bipartite => Some(plan_bipartite(a.n, edges()?)?),
        Kind::Kpartite => Some(plan_kpartite(a.n, edges()?)?),
        Kind::High => Some(plan_complement_high(a.n, edges()?)?),
        Kind::Gnm | Kind::Gnp => None,
    };
    let m = a.m;
    let p = match a.kind {
        Kind::Gnp => Some(a.p.ok_or_else(|| Failure::Usage("--p is required for --kind gnp".into()))?),
        _ => None,
    };
    if matches!(a.kind, Kind::Gnm) {
        edges()?;
    }
    let graphs: Vec<Graph> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(a.seed, i);
            match (&plan, m, p) {
                (Some(plan), _, _) => plan.sample(&mut rng),
                (None, _, Some(p)) => gnp_sample_with(a.n, p, &mut rng),
                (None, Some(m), None) => gnm_sample_with(a.n, m, &mut rng),
                (None, None, None) => unreachable!("checked above"),
            }
        })
        .collect::<Result<_, _>>()?;
    let text: Vec<String> = graphs.iter().map(Graph::to_text).collect();
    emit(a.out.as_ref(), &text.join("\n"))?;
    Ok(0)
}

fn recognize_one(g: &Graph, class: Class, witness: bool, out: &mut String) -> Result<bool, Failure> {
    let member = match class {
        Class::All => true,
        Class::C5free => match find_induced_c5(g) {
            None => true,
            Some(c) => {
                out.push_str("contains induced C5\n");
                if witness {
                    writeln!(out, "{}", list(&c)).unwrap();
                }
                false
            }
        },
        Class::Perfect => match perfect_obstruction(g)? {
            None => true,
            Some(hole) => {
                let what = if hole.in_complement { "odd antihole" } else { "odd hole" };
                writeln!(out, "contains induced {what} of length {}", hole.cycle.len()).unwrap();
                if witness {
                    writeln!(out, "{}", list(&hole.cycle)).unwrap();
                }
                false
            }
        },
        Class::Gensplit => match generalised_split_witness(g)? {
            Some(w) => {
                if witness {
                    if w.complemented {
                        out.push_str("complement\n");
                    }
                    for b in w.blocks() {
                        writeln!(out, "{}", labels(b)).unwrap();
                    }
                }
                true
            }
            None => {
                out.push_str("not a generalised split graph\n");
                false
            }
        },
        Class::Cluster => match find_induced_p3(g) {
            None => {
                if witness {
                    for b in components_in(g, g.vertices()) {
                        writeln!(out, "{}", labels(b)).unwrap();
                    }
                }
                true
            }
            Some(p) => {
                out.push_str("contains induced P3\n");
                if witness {
                    writeln!(out, "{}", list(&p)).unwrap();
                }
                false
            }
        },
    };
    if member {
        writeln!(out, "{}: yes", format!("{:?}", class).to_lowercase()).unwrap();
    }
    Ok(member)
}

fn recognize(a: &RecognizeArgs) -> Outcome {
    let graphs = read_graphs(a.input.as_ref())?;
    let mut out = String::new();
    let mut all = true;
    for (i, g) in graphs.iter().enumerate() {
        if graphs.len() > 1 {
            writeln!(out, "graph {i}").unwrap();
        }
        all &= recognize_one(g, a.class, a.witness, &mut out)?;
    }
    print!("{out}");
    Ok(u8::from(!all))
}

fn packing(run: &Run, a: &GraphInput) -> Outcome {
    let graphs = read_graphs(a.input.as_ref())?;
    let certs = graphs.iter().map(p3_packing_trichotomy).collect::<Result<Vec<_>, _>>()?;
    if a.json {
        let text = if certs.len() == 1 { run.document(a, None, &certs[0]) } else { run.document(a, None, &certs) };
        print!("{text}");
        return Ok(0);
    }
    let mut out = String::new();
    for cert in &certs {
        writeln!(out, "n {} target {} source {}", cert.n, cert.target, serde_json::to_value(cert.source).unwrap().as_str().unwrap())
            .unwrap();
        match &cert.outcome {
            PackingOutcome::P3Packing { triples } | PackingOutcome::AntiP3Packing { triples } => {
                let what = if matches!(cert.outcome, PackingOutcome::P3Packing { .. }) { "P3" } else { "anti-P3" };
                writeln!(out, "{what} packing of {} triples", triples.len()).unwrap();
                for t in triples {
                    writeln!(out, "{}", list(t)).unwrap();
                }
            }
            PackingOutcome::HomogeneousSet { set, kind } => {
                writeln!(out, "homogeneous set ({}) of size {}", serde_json::to_value(kind).unwrap().as_str().unwrap_or("set"), set.len())
                    .unwrap();
                writeln!(out, "{}", labels(*set)).unwrap();
            }
        }
    }
    print!("{out}");
    Ok(0)
}

fn hom_cmd(run: &Run, a: &GraphInput) -> Outcome {
    let graphs = read_graphs(a.input.as_ref())?;
    let reports: Vec<_> = graphs.iter().map(hom).collect();
    if a.json {
        let text = if reports.len() == 1 { run.document(a, None, &reports[0]) } else { run.document(a, None, &reports) };
        print!("{text}");
        return Ok(0);
    }
    let mut out = String::new();
    for r in &reports {
        writeln!(out, "hom {} clique_number {} independence_number {}", r.hom, r.clique_number, r.independence_number).unwrap();
        writeln!(out, "{}", labels(r.witness)).unwrap();
    }
    print!("{out}");
    Ok(0)
}

fn homdist(run: &Run, a: &HomdistArgs) -> Outcome {
    let d = hom_distribution_experiment(a.n, a.m, a.samples, a.seed)?;
    match &a.csv {
        Some(path) => {
            let mut out = String::from("hom,overall,conditioned\n");
            for h in 0..d.overall.len().max(d.conditioned.len()) {
                let get = |v: &[u64]| v.get(h).copied().unwrap_or(0);
                writeln!(out, "{h},{},{}", get(&d.overall), get(&d.conditioned)).unwrap();
            }
            emit(Some(path), &out)?;
        }
        None => {
            #[derive(Serialize)]
            struct Summary<'a> {
                #[serde(flatten)]
                distribution: &'a c5census::homsets::HomDistribution,
                overall_mean: f64,
                conditioned_mean: Option<f64>,
                acceptance_rate: f64,
            }
            let s = Summary {
                distribution: &d,
                overall_mean: d.overall_mean(),
                conditioned_mean: finite(d.conditioned_mean()),
                acceptance_rate: d.acceptance_rate(),
            };
            print!("{}", run.document(a, Some(a.seed), s));
        }
    }
    Ok(0)
}

fn typecheck(run: &Run, a: &TypecheckArgs) -> Outcome {
    let g = parse_graph(&read_text(a.graph.as_ref())?).map_err(|e| Failure::Input(format!("invalid graph file: {e}")))?;
    let text = read_text(Some(&a.partition))?;
    let p = Partition::parse(g.n(), &text).map_err(|e| Failure::Input(format!("invalid partition file: {e}")))?;
    let params =
        TypeParams { eps: a.eps, eps_sub: a.eps_sub, d: a.d, k_sub: a.k_sub, mu_proxy: a.mu_proxy, trials: a.trials, seed: a.seed };
    let t = extract_type(&g, &p, &params).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.json {
        #[derive(Serialize)]
        struct Typed<'a> {
            #[serde(flatten)]
            extraction: &'a c5census::types::TypeExtraction,
            grey_triangle: Option<[usize; 3]>,
        }
        let typed = Typed { extraction: &t, grey_triangle: t.coloured.find_grey_triangle() };
        print!("{}", run.document(a, Some(a.seed), typed));
        return Ok(0);
    }
    let r = &t.coloured;
    let mut out = format!("k {}\nvcol {}\n", r.k(), r.vertex_colours().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    for ((i, j), col) in r.edges() {
        writeln!(out, "{i} {j} {}", col.as_str()).unwrap();
    }
    match r.find_grey_triangle() {
        Some(tri) => writeln!(out, "grey triangle {}", list(&tri)).unwrap(),
        None => out.push_str("no grey triangle\n"),
    }
    print!("{out}");
    Ok(0)
}

fn parse_probability(s: &str) -> Result<BigRational, Failure> {
    let bad = || Failure::Usage(format!("bad probability {s:?}; use a decimal or a fraction a/b"));
    let s = s.trim();
    let text = match s.split_once('.') {
        Some((int, frac)) if !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()) && int.bytes().all(|b| b.is_ascii_digit()) => {
            format!("{int}{frac}/1{}", "0".repeat(frac.len()))
        }
        Some(_) => return Err(bad()),
        None => s.to_string(),
    };
    BigRational::from_str(&text).map_err(|_| bad())
}

fn dangerous_pair(run: &Run, a: &DangerArgs) -> Outcome {
    let kinds: Vec<(PairKind, PairKind)> = match (a.kind1, a.kind2) {
        (None, None) => PairKind::ALL.iter().flat_map(|&k| PairKind::ALL.map(|l| (k, l))).collect(),
        (Some(k), Some(l)) => vec![(k.into(), l.into())],
        _ => return Err(Failure::Usage("give both --kind1 and --kind2, or neither".into())),
    };
    let ps = a.p.iter().map(|s| parse_probability(s)).collect::<Result<Vec<_>, _>>()?;
    let mut results = Vec::new();
    for p in &ps {
        for &(k, l) in &kinds {
            results.push(dangerous_pair_probability(k, l, p)?);
        }
    }
    if a.json {
        print!("{}", run.document(a, None, &results));
        return Ok(0);
    }
    let mut out = String::from("kind1,kind2,p,q_exact,lower_bound,q\n");
    for r in &results {
        let q = r.q_exact.to_f64().unwrap_or(f64::NAN);
        writeln!(out, "{:?},{:?},{},{},{},{}", r.kind1, r.kind2, r.p, r.q_exact, r.lower_bound, sig17(q)).unwrap();
    }
    print!("{out}");
    Ok(0)
}

fn dispatch(cli: Cli) -> Outcome {
    let threads = match cli.threads {
        Some(0) => return Err(Failure::Usage("--threads must be positive".into())),
        Some(t) => {
            rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Runtime(e.to_string()))?;
            t
        }
        None => rayon::current_num_threads(),
    };
    let command = match &cli.command {
        Command::Census(_) => "census",
        Command::Curve(_) => "curve",
        Command::Generate(_) => "generate",
        Command::Recognize(_) => "recognize",
        Command::Packing(_) => "packing",
        Command::Hom(_) => "hom",
        Command::Homdist(_) => "homdist",
        Command::Typecheck(_) => "typecheck",
        Command::DangerousPair(_) => "dangerous-pair",
    };
    let run = Run { command, threads, started: Instant::now() };
    match &cli.command {
        Command::Census(a) => census(&run, a),
        Command::Curve(a) => curve(a),
        Command::Generate(a) => generate(a),
        Command::Recognize(a) => recognize(a),
        Command::Packing(a) => packing(&run, a),
        Command::Hom(a) => hom_cmd(&run, a),
        Command::Homdist(a) => homdist(&run, a),
        Command::Typecheck(a) => typecheck(&run, a),
        Command::DangerousPair(a) => dangerous_pair(&run, a),
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
