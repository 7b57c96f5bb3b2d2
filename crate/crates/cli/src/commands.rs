//! Argument parsing and the `solve`, `compare` and `verify` subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use flipcc::baselines::{acn_exact_expectation, acn_pivot, brute_force_opt, DEFAULT_ORACLE_LIMIT};
use flipcc::flip::{iterated_flipping, two_round, FlipSchedule, PipelineTrace};
use flipcc::generators::{axis_clustering, axis_slices};
use flipcc::pivot::{verify_pivot_lemma, verify_special_bound};
use flipcc::precluster::{precluster, read_atoms, validate_good_instance, AtomStrategy, PreclusteredInstance};
use flipcc::rng::{self, Rng};
use flipcc::sampled::{
    cost_moves, cost_stays, est_cost_moves, est_cost_stays, faster_local_search, SampleConfig, Threshold, Q,
};
use flipcc::search::{LocalSearch, SearchCall, SearchEngine, DEFAULT_EXHAUSTIVE_LIMIT};
use flipcc::verify::{check_prop_ls, check_size_lemmas};
use flipcc::{total_cost, Clustering, Cost, Graph, WeightFn};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng as _;
use rayon::prelude::*;

use crate::instance::{self, Instance};
use crate::report::{run_rows, suite_rows, RunReport, SuiteReport, TraceStep, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "flipcc", version, about = "Correlation clustering by local search with weight flips")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one algorithm on one instance.
    Solve(SolveArgs),
    /// Run acn, two-round, iterated and faster side by side.
    Compare(CompareArgs),
    /// Randomized checks of the structural lemmas; exits nonzero on violations.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThresholdArg {
    SixOverEta,
    SixOverEtaSq,
    TwelveOverEtaSq,
    Zero,
}

impl From<ThresholdArg> for Threshold {
    fn from(t: ThresholdArg) -> Self {
        match t {
            ThresholdArg::SixOverEta => Threshold::SixOverEta,
            ThresholdArg::SixOverEtaSq => Threshold::SixOverEtaSq,
            ThresholdArg::TwelveOverEtaSq => Threshold::TwelveOverEtaSq,
            ThresholdArg::Zero => Threshold::Custom(0, 1),
        }
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Generated instance, e.g. `hamming:3,5,5:2`, `planted:5,20,0.9,0.05:1`,
    /// `cliques:3,4,5`, `gnp:50,0.3:7` or `file:graph.txt`.
    #[arg(long = "gen")]
    pub generate: Option<String>,
    /// Graph file: header `n m`, then one edge `u v` per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[command(flatten)]
    pub source: Source,
    /// Comma-separated engines (`exhaustive`, `sampled`, `fixed:<axis>-slices`);
    /// a list runs stage `i` with entry `i`, the last entry repeating.
    /// Defaults to exhaustive up to 16 vertices and sampled above.
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Improvement threshold. Defaults to 0 for the sampled search and to
    /// eps^13/8 for iterated flipping over a preclustering.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub eta: usize,
    /// Weight increment per flip, a multiple of 0.5.
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Rounds of iterated flipping.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Atoms file (one atom per line); computed from the agreement graph otherwise.
    #[arg(long)]
    pub atoms: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ThresholdArg::SixOverEta)]
    pub threshold: ThresholdArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// `acn`, `two-round`, `iterated`, `faster`, `fixed:<axis>-slices` or `opt`.
    #[arg(long, default_value = "iterated")]
    pub alg: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write the clustering, one cluster per line, to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    PropLs,
    Pivot,
    Estimators,
    SizeLemmas,
    TwoRound,
    Acn,
    All,
}

impl Suite {
    const EACH: [Suite; 6] =
        [Suite::PropLs, Suite::Pivot, Suite::Estimators, Suite::SizeLemmas, Suite::TwoRound, Suite::Acn];

    fn name(self) -> &'static str {
        match self {
            Suite::PropLs => "prop-ls",
            Suite::Pivot => "pivot",
            Suite::Estimators => "estimators",
            Suite::SizeLemmas => "size-lemmas",
            Suite::TwoRound => "two-round",
            Suite::Acn => "acn",
            Suite::All => "all",
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Thread pool sized by `CC_THREADS` when set, rayon's default otherwise.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(s) = std::env::var("CC_THREADS") {
        let n: usize = s.trim().parse().with_context(|| format!("CC_THREADS={s:?} is not a count"))?;
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Runs a parsed command; the returned code becomes the process exit status.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<i32> {
    let pool = thread_pool()?;
    match cli.command {
        Command::Solve(a) => {
            let ctx = Setup::build(&a.solver)?;
            let report = solve_one(&ctx, &a.alg)?;
            if let Some(path) = &a.out {
                let c = Clustering::from_clusters(ctx.inst.graph.n(), &report.clusters)?;
                std::fs::write(path, c.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            match a.solver.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
                Format::Text => {
                    write!(out, "{}", run_rows(std::slice::from_ref(&report)))?;
                    for t in &report.trace {
                        writeln!(out, "  {} {}", t.label, Cost::from_halves(t.cost_halves))?;
                    }
                }
            }
            Ok(0)
        }
        Command::Compare(a) => {
            let ctx = Setup::build(&a.solver)?;
            let algs = ["acn", "two-round", "iterated", "faster"];
            let reports: Vec<RunReport> =
                pool.install(|| algs.par_iter().map(|alg| solve_one(&ctx, alg)).collect::<Result<_>>())?;
            match a.solver.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?,
                Format::Text => write!(out, "{}", run_rows(&reports))?,
            }
            Ok(0)
        }
        Command::Verify(a) => {
            let suites: Vec<Suite> = if a.suite == Suite::All { Suite::EACH.to_vec() } else { vec![a.suite] };
            let reports: Vec<SuiteReport> = pool.install(|| {
                suites.iter().map(|&s| run_suite(s, a.trials, a.seed)).collect::<Result<_>>()
            })?;
            match a.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?,
                Format::Text => write!(out, "{}", suite_rows(&reports))?,
            }
            Ok(if reports.iter().any(|r| r.failed > 0) { 1 } else { 0 })
        }
    }
}

/// Everything a solver needs, built once per invocation.
struct Setup {
    inst: Instance,
    args: SolverArgs,
    beta: Cost,
    pc: Option<Arc<PreclusteredInstance>>,
}

impl Setup {
    fn build(args: &SolverArgs) -> Result<Setup> {
        let inst = match (&args.source.generate, &args.source.input) {
            (Some(d), _) => instance::generate(d)?,
            (None, Some(p)) => instance::load(p)?,
            (None, None) => bail!("one of --gen or --input is required"),
        };
        let beta = Cost::from_f64(args.beta)?;
        let strategy = match &args.atoms {
            Some(p) => AtomStrategy::Given(read_atoms(instance::open(p)?)?),
            None => AtomStrategy::default(),
        };
        let pc = if args.atoms.is_some() || needs_sampled(args, inst.graph.n()) {
            Some(Arc::new(precluster(&inst.graph, args.epsilon, &strategy)?))
        } else {
            None
        };
        Ok(Setup { inst, args: args.clone(), beta, pc })
    }

    fn sample_config(&self) -> SampleConfig {
        let mut c = SampleConfig::new(self.args.eta);
        c.gamma = self.args.gamma.unwrap_or(0.0);
        c.threshold = self.args.threshold.into();
        c
    }

    fn pc(&self) -> Result<Arc<PreclusteredInstance>> {
        match &self.pc {
            Some(pc) => Ok(pc.clone()),
            None => Ok(Arc::new(precluster(&self.inst.graph, self.args.epsilon, &AtomStrategy::default())?)),
        }
    }

    fn engine(&self) -> Result<SearchEngine> {
        let spec = match &self.args.engine {
            Some(s) => s.clone(),
            None if self.inst.graph.n() <= DEFAULT_EXHAUSTIVE_LIMIT => "exhaustive".into(),
            None => "sampled".into(),
        };
        let mut stages = Vec::new();
        for part in spec.split(',') {
            stages.push(match part.trim() {
                "exhaustive" => SearchEngine::exhaustive(),
                "sampled" => SearchEngine::Sampled { pc: self.pc()?, config: self.sample_config() },
                p => match p.strip_prefix("fixed:") {
                    Some(axis) => SearchEngine::FixedFamily { family: axis_slices(self.dims()?, parse_axis(axis)?)? },
                    None => bail!("unknown engine {p:?}"),
                },
            });
        }
        Ok(if stages.len() == 1 { stages.pop().unwrap() } else { SearchEngine::Staged(stages) })
    }

    fn dims(&self) -> Result<&[usize]> {
        self.inst.dims.as_deref().ok_or_else(|| anyhow!("axis slices need a hamming instance"))
    }

    fn params(&self, alg: &str) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        let a = &self.args;
        match alg {
            "two-round" | "iterated" => {
                p.insert("engine".into(), self.engine().map(|e| e.name()).unwrap_or_default());
            }
            _ => {}
        }
        if alg == "iterated" {
            p.insert("k".into(), a.k.to_string());
            p.insert("beta".into(), self.beta.to_string());
        }
        if alg == "faster" || (alg != "acn" && self.pc.is_some()) {
            p.insert("epsilon".into(), a.epsilon.to_string());
            p.insert("eta".into(), a.eta.to_string());
            p.insert("threshold".into(), format!("{:?}", a.threshold).to_lowercase());
            if let Some(g) = a.gamma {
                p.insert("gamma".into(), g.to_string());
            }
        }
        p
    }
}

fn needs_sampled(args: &SolverArgs, n: usize) -> bool {
    match &args.engine {
        Some(s) => s.split(',').any(|p| p.trim() == "sampled"),
        None => n > DEFAULT_EXHAUSTIVE_LIMIT,
    }
}

fn parse_axis(s: &str) -> Result<usize> {
    let name = s.strip_suffix("-slices").unwrap_or(s);
    Ok(match name {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        other => other.parse().map_err(|_| anyhow!("unknown axis {other:?}"))?,
    })
}

fn with_trace(mut report: RunReport, trace: &PipelineTrace) -> RunReport {
    report.trace = trace
        .solutions
        .iter()
        .map(|e| TraceStep { label: e.label.clone(), cost_halves: e.cost.halves() })
        .collect();
    report
}

fn solve_one(ctx: &Setup, alg: &str) -> Result<RunReport> {
    let g = &ctx.inst.graph;
    let unit = WeightFn::unit();
    let seed = ctx.args.seed;
    let started = Instant::now();
    let mut trace = None;
    let clustering = match alg {
        "acn" => acn_pivot(g, &mut rng::stream(seed, 0)),
        "two-round" => {
            let t = two_round(g, &ctx.engine()?, seed)?;
            let best = t.best().ok_or_else(|| anyhow!("empty trace"))?.clustering.clone();
            trace = Some(t);
            best
        }
        "iterated" => {
            let mut schedule = FlipSchedule::new(ctx.engine()?)
                .with_k(ctx.args.k)
                .with_beta(ctx.beta)
                .with_epsilon(ctx.args.epsilon);
            if ctx.pc.is_some() {
                schedule = schedule.with_gamma(ctx.args.gamma.unwrap_or(ctx.args.epsilon.powi(13) / 8.0));
            }
            let t = iterated_flipping(g, &schedule, ctx.pc.as_deref(), seed)?;
            let best = t.best().ok_or_else(|| anyhow!("empty trace"))?.clustering.clone();
            trace = Some(t);
            best
        }
        "faster" => faster_local_search(g, &*ctx.pc()?, &unit, &ctx.sample_config(), seed)?.clustering,
        "opt" => brute_force_opt(g, &unit, DEFAULT_ORACLE_LIMIT)?.clustering,
        other => match other.strip_prefix("fixed:") {
            Some(axis) => axis_clustering(ctx.dims()?, parse_axis(axis)?)?,
            None => bail!("unknown algorithm {other:?}"),
        },
    };
    let cost = total_cost(g, &unit, &clustering)?;
    let ms = started.elapsed().as_millis() as u64;
    let report = RunReport::new(alg, ctx.params(alg), seed, &ctx.inst.descriptor, &clustering, cost, ms);
    Ok(match trace {
        Some(t) => with_trace(report, &t),
        None => report,
    })
}

fn random_graph(r: &mut Rng, n: usize) -> Graph {
    let p = r.gen_range(0.2..0.8);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| r.gen_bool(p)).collect();
    Graph::from_edges(n, edges).expect("generated edges are valid")
}

fn random_clustering(r: &mut Rng, n: usize) -> Clustering {
    let k = r.gen_range(1..=n.max(1));
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
    Clustering::from_labels(&labels)
}

fn random_weights(r: &mut Rng, n: usize) -> WeightFn {
    let mut w = WeightFn::unit();
    for _ in 0..r.gen_range(0..=2) {
        w = w.with_layer(&random_clustering(r, n), Cost::from_halves(1)).expect("sizes match");
    }
    w
}

fn halves_q(c: Cost) -> Q {
    Q::new(c.halves() as i128, 2)
}

/// All `|set|^len` sequences over `set`.
fn tuples(set: &[usize], len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                set.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

/// One randomized trial; `Ok(false)` is a violation.
fn trial(suite: Suite, r: &mut Rng) -> Result<bool> {
    let unit = WeightFn::unit();
    Ok(match suite {
        Suite::PropLs => {
            let n = r.gen_range(3..=9);
            let g = random_graph(r, n);
            let ls = SearchEngine::exhaustive().optimize(&g, &unit, &Clustering::singletons(n), SearchCall::default())?;
            (0..20).all(|_| check_prop_ls(&g, &unit, &ls, &random_clustering(r, n)).map(|p| p.all_hold()).unwrap_or(false))
        }
        Suite::Pivot => {
            let n = r.gen_range(2..=30);
            let g = random_graph(r, n);
            let cs: Vec<Clustering> = (0..3).map(|_| random_clustering(r, n)).collect();
            let w = random_weights(r, n);
            verify_pivot_lemma(&g, &cs[0], &cs[1], &cs[2])?.holds()
                && verify_special_bound(&g, &w, &cs[0], &cs[1], &cs[2])?.holds()
        }
        Suite::Estimators => {
            let n = r.gen_range(2..=6);
            let g = random_graph(r, n);
            let c = random_clustering(r, n);
            let w = random_weights(r, n);
            let v = r.gen_range(0..n);
            let mut k: Vec<usize> = (0..n).filter(|&u| u != v && r.gen_bool(0.5)).take(3).collect();
            k.push(v);
            k.sort_unstable();
            let stays = halves_q(cost_stays(&g, &w, &c, &k, v)?);
            let moves = halves_q(cost_moves(&g, &w, &c, &k, v)?);
            let len = r.gen_range(1..=3);
            let all = tuples(&k, len);
            let (mut s, mut m) = (Q::zero(), Q::zero());
            for t in &all {
                s += est_cost_stays(&g, &w, &c, t, k.len(), v)?;
                m += est_cost_moves(&g, &w, &c, t, k.len(), v)?;
            }
            let count = Q::from(all.len() as i128);
            s / count == stays && m / count == moves
        }
        Suite::SizeLemmas => {
            let n = r.gen_range(5..=60);
            let g = random_graph(r, n);
            let pc = precluster(&g, 0.1, &AtomStrategy::default())?;
            let good = validate_good_instance(&g, &pc)?;
            good.condition1() && good.condition2() && check_size_lemmas(&g, &pc)?.holds()
        }
        Suite::TwoRound => {
            let n = r.gen_range(3..=8);
            let g = random_graph(r, n);
            let opt = brute_force_opt(&g, &unit, DEFAULT_ORACLE_LIMIT)?.cost;
            let best = two_round(&g, &SearchEngine::exhaustive(), r.gen())?.best_cost();
            8 * best.halves() <= 15 * opt.halves()
        }
        Suite::Acn => {
            let n = r.gen_range(1..=6);
            let g = random_graph(r, n);
            let opt = brute_force_opt(&g, &unit, DEFAULT_ORACLE_LIMIT)?.cost;
            // E[cost] <= 3 opt
            acn_exact_expectation(&g)? <= BigRational::new((3 * opt.halves()).into(), 2.into())
        }
        Suite::All => unreachable!("expanded by the caller"),
    })
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteReport> {
    let started = Instant::now();
    let results: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| trial(suite, &mut rng::stream(seed, i as u64)))
        .collect::<Result<_>>()?;
    let failures: Vec<usize> = results.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i).collect();
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        suite: suite.name().into(),
        seed,
        trials,
        passed: trials - failures.len(),
        failed: failures.len(),
        failures: failures.into_iter().take(20).collect(),
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}
