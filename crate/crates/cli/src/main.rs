//! `kwise`: construct, check, analyze and search maximal k-wise intersecting
//! families.
//!
//! Exit codes: 0 ok, 1 a requested predicate failed, 2 bad input, 3 the
//! search budget ran out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kwise::constructions::{generalized_linked_size, linked_cubes_size, series_of_cubes_size};
use kwise::disjointness::{dichotomy_threshold, dp_with_workers, entropy_bound_holds};
use kwise::intersecting::random_intersecting_family;
use kwise::parallel::with_workers;
use kwise::search::{append_ledger_row, SearchStatus, DEFAULT_NODE_BUDGET};
use kwise::{
    addable_sets, build_disjointness_graph, clique_count, dichotomy_check, dp, entropy_bound, even_lift,
    generalized_linked, is_k_wise_intersecting, is_maximal, linked_cubes, min_maximal_size, observation1_certificate,
    principal_star, saturate, series_of_cubes, stability_distance, GroundSet, KParameter, Partition, SearchConfig,
    SearchMode, SetFamily, SubsetMask,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kwise", version, about = "Maximal k-wise intersecting families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family and write it as a family file.
    Construct(ConstructArgs),
    /// Check k-wise intersection, maximality and upward closure.
    Check(CheckArgs),
    /// Disjoint pairs, cliques, entropy, certificates and distances.
    Analyze(AnalyzeArgs),
    /// Compute f(n, k) and its minimizers.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    LinkedCubes,
    Series,
    Generalized,
    EvenLift,
    Star,
    RandomMaximal,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long = "type", value_enum)]
    kind: Construction,
    #[arg(long)]
    n: Option<u32>,
    /// The set S for linked cubes, as `1,2,3`; balanced by default.
    #[arg(long)]
    s: Option<String>,
    /// Number of blocks for series; k for even-lift and random-maximal.
    #[arg(long)]
    k: Option<u32>,
    /// Number of blocks for generalized linked cubes.
    #[arg(long)]
    l: Option<u32>,
    /// Explicit partition, as `1,2;3,4;5,6`.
    #[arg(long)]
    blocks: Option<String>,
    /// Input family for even-lift.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Element of the principal star.
    #[arg(long, default_value_t = 1)]
    element: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random draws before saturating.
    #[arg(long, default_value_t = 8)]
    draws: usize,
    /// Output family file; the family goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Predicate {
    KWise,
    Maximal,
    UpwardClosed,
}

#[derive(clap::Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: u32,
    /// Predicates that must hold for exit code 0.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Predicate::KWise, Predicate::Maximal])]
    require: Vec<Predicate>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Dp,
    Cliques,
    Entropy,
    Certificate,
    Dichotomy,
    Stability,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    #[arg(value_enum)]
    analysis: Analysis,
    #[arg(long)]
    input: PathBuf,
    /// Clique size.
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// The balanced set Y for the dichotomy, as `1,2,3`.
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Where to write the certificate itself.
    #[arg(long)]
    certificate_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    BranchAndBound,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Report one canonical family per isomorphism class.
    #[arg(long)]
    symmetry: bool,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 2)]
    split_depth: u32,
    /// Search tree node budget.
    #[arg(long, env = "KWISE_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV ledger to append a result row to.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

/// A failed run with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn bad_input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<kwise::Error> for Failure {
    fn from(e: kwise::Error) -> Self {
        let code = match e {
            kwise::Error::NotIntersecting { .. } | kwise::Error::NotMaximal { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct(args) => construct(&args),
        Command::Check(args) => check(&args),
        Command::Analyze(args) => analyze(&args),
        Command::Search(args) => search(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_elements(text: &str) -> Result<Vec<u32>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::bad_input(format!("not an element: {t:?}"))))
        .collect()
}

fn parse_blocks(ground: GroundSet, text: &str) -> Result<Partition, Failure> {
    let blocks = text.split(';').map(parse_elements).collect::<Result<Vec<_>, _>>()?;
    Ok(Partition::from_element_lists(ground, &blocks)?)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::bad_input(format!("--{flag} is required here")))
}

fn k_param(k: u32) -> Result<KParameter, Failure> {
    Ok(KParameter::new(k)?)
}

fn load(path: &Path) -> Result<SetFamily, Failure> {
    SetFamily::load(path).map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))
}

fn emit(report: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("JSON values serialize");
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))?;
    }
    println!("{text}");
    Ok(())
}

fn construct(args: &ConstructArgs) -> Outcome {
    let ground = || -> Result<GroundSet, Failure> { Ok(GroundSet::new(require(args.n, "n")?)?) };
    let (family, predicted): (SetFamily, Option<u64>) = match args.kind {
        Construction::LinkedCubes => {
            let ground = ground()?;
            let s = match &args.s {
                Some(text) => ground.subset(&parse_elements(text)?)?,
                None => SubsetMask::from_bits((1u32 << (ground.n() / 2)) - 1),
            };
            (linked_cubes(ground, s)?, Some(linked_cubes_size(ground.n(), s.len())))
        }
        Construction::Series => {
            let ground = ground()?;
            let p = match (&args.blocks, args.k) {
                (Some(text), _) => parse_blocks(ground, text)?,
                (None, Some(k)) => Partition::balanced(ground, k)?,
                (None, None) => return Err(Failure::bad_input("series needs --k or --blocks")),
            };
            let parts = p.len() as u64;
            let predicted = if p.is_balanced() {
                series_of_cubes_size(ground.n(), p.len() as u32)
            } else {
                None
            };
            let exact = p.blocks().iter().map(|b| 1u64 << b.len()).sum::<u64>() + 1 - parts;
            (series_of_cubes(&p), predicted.or(Some(exact)))
        }
        Construction::Generalized => {
            let ground = ground()?;
            let p = match (&args.blocks, args.l) {
                (Some(text), _) => parse_blocks(ground, text)?,
                (None, Some(l)) => Partition::balanced(ground, l)?,
                (None, None) => return Err(Failure::bad_input("generalized needs --l or --blocks")),
            };
            (generalized_linked(&p)?, Some(generalized_linked_size(&p)))
        }
        Construction::EvenLift => {
            let fprime = load(&require(args.input.clone(), "input")?)?;
            let k = k_param(args.k.unwrap_or(4))?;
            let lifted = even_lift(&fprime, k).map_err(|e| match e {
                kwise::Error::NotMaximal { .. } | kwise::Error::NotIntersecting { .. } => {
                    Failure::bad_input(format!("input is not maximal {}-wise intersecting: {e}", k.get() - 1))
                }
                other => other.into(),
            })?;
            (lifted, Some(fprime.len() as u64 + 1))
        }
        Construction::Star => {
            let ground = ground()?;
            (principal_star(ground, args.element)?, Some(1u64 << (ground.n() - 1)))
        }
        Construction::RandomMaximal => {
            let ground = ground()?;
            let k = k_param(require(args.k, "k")?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let seed = random_intersecting_family(ground, k, args.draws, &mut rng);
            (saturate(&seed, k)?, None)
        }
    };
    let summary = json!({ "n": family.n(), "size": family.len(), "predicted": predicted });
    match &args.out {
        Some(path) => {
            family.save(path).map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            println!("{}", family.to_json());
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

fn check(args: &CheckArgs) -> Outcome {
    let family = load(&args.input)?;
    let k = k_param(args.k)?;
    let k_wise = is_k_wise_intersecting(&family, k);
    let maximal = k_wise && is_maximal(&family, k);
    let upward_closed = family.is_upward_closed();
    let addable = if k_wise { Some(addable_sets(&family, k)?) } else { None };
    let report = json!({
        "k": k.get(),
        "size": family.len(),
        "k_wise": k_wise,
        "maximal": maximal,
        "upward_closed": upward_closed,
        "addable_count": addable.as_ref().map(SetFamily::len),
        "first_addable": addable.as_ref().and_then(|a| a.members().first()).map(|m| m.elements()),
    });
    emit(&report, args.out.as_deref())?;
    let holds = |p: &Predicate| match p {
        Predicate::KWise => k_wise,
        Predicate::Maximal => maximal,
        Predicate::UpwardClosed => upward_closed,
    };
    Ok(if args.require.iter().all(holds) { 0 } else { 1 })
}

fn analyze(args: &AnalyzeArgs) -> Outcome {
    let family = load(&args.input)?;
    let n = family.n();
    let report = match args.analysis {
        Analysis::Dp => {
            let value = match args.workers {
                Some(w) => dp_with_workers(&family, w)?,
                None => dp(&family),
            };
            json!({ "size": family.len(), "dp": value, "contains_empty_set": family.contains_empty_set() })
        }
        Analysis::Cliques => {
            let graph = build_disjointness_graph(&family);
            let count = with_workers(args.workers, || clique_count(&graph, args.r))??;
            json!({
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "r": args.r,
                "cliques": count,
            })
        }
        Analysis::Entropy => {
            let bound = entropy_bound(&family)?;
            json!({
                "size": family.len(),
                "entropy_bound": bound,
                "two_to_bound": bound.exp2(),
                "holds": entropy_bound_holds(&family)?,
            })
        }
        Analysis::Certificate => {
            let cert = with_workers(args.workers, || observation1_certificate(&family))??;
            let valid = cert.validate(&family).is_ok();
            if let Some(path) = &args.certificate_out {
                std::fs::write(path, cert.to_json())
                    .map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))?;
            }
            let missing = (1u64 << n) - family.len() as u64;
            json!({
                "entries": cert.len(),
                "validates": valid,
                "complement_size": missing,
                "dp_of_complements": dp(&family.complement_family()),
            })
        }
        Analysis::Dichotomy => {
            let y = family.ground().subset(&parse_elements(&require(args.y.clone(), "y")?)?)?;
            let t = dichotomy_check(&family, y)?;
            let threshold = dichotomy_threshold(n);
            json!({ "y": y.elements(), "t": t, "threshold": threshold, "dichotomy": t == 0 || t >= threshold })
        }
        Analysis::Stability => {
            let (s, distance) = stability_distance(&family)?;
            json!({ "s": s.elements(), "distance": distance })
        }
    };
    emit(&report, args.out.as_deref())?;
    Ok(0)
}

fn search(args: &SearchArgs) -> Outcome {
    let k = k_param(args.k)?;
    let config = SearchConfig {
        mode: match args.mode {
            Mode::Exhaustive => SearchMode::Exhaustive,
            Mode::BranchAndBound => SearchMode::BranchAndBound,
        },
        symmetry: args.symmetry,
        workers: args.workers,
        split_depth: args.split_depth,
        node_budget: args.budget,
    };
    let report = min_maximal_size(args.n, k, &config)?;
    let text = report.to_json();
    if let Some(path) = &args.out {
        std::fs::write(path, &text).map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))?;
    }
    println!("{text}");
    if let Some(path) = &args.ledger {
        append_ledger_row(path, &report)?;
    }
    Ok(match report.status {
        SearchStatus::Exact => 0,
        SearchStatus::BoundOnly => 3,
    })
}
