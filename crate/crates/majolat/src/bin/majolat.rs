//! Command-line front end: compute lattice objects, verify inequality
//! batches, search for counterexamples, evaluate batch files.
//!
//! Exit codes: 0 success, 1 a universal inequality failed verification,
//! 2 usage error, 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use majolat::verify::{batch_verify, check_one, write_csv, BatchConfig, InequalityId, Report};
use majolat::{
    kl, renyi, search_counterexample, shannon, tsallis, w_phi, write_witnesses, Alpha, Backend,
    Distribution, Error, SearchDirection, SearchFunctional, SearchRelation, SearchSpec,
};

#[derive(Parser)]
#[command(name = "majolat", version, about = "Majorization lattice toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one lattice object or functional; prints JSON.
    #[command(subcommand)]
    Compute(ComputeCmd),
    /// Verify one inequality on sampled pairs; writes CSV and a JSON summary.
    Verify(VerifyArgs),
    /// Search incomparable pairs for inequality violations.
    Search(SearchArgs),
    /// Evaluate inequalities on pairs read from a JSONL batch file.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Float,
    Rational,
}

#[derive(Args)]
struct PairInput {
    /// First distribution, a JSON array (the rational backend also accepts
    /// "num/den" strings).
    #[arg(long)]
    p: Option<String>,
    /// Second distribution.
    #[arg(long)]
    q: Option<String>,
    /// JSONL file with one distribution per line; the first two lines
    /// stand in for --p and --q.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Float)]
    backend: BackendChoice,
    /// Absolute tolerance for the float backend.
    #[arg(long, default_value_t = Backend::<f64>::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum ComputeCmd {
    /// Greatest common majorized distribution p ∧ q.
    Meet(PairInput),
    /// Least common majorizer p ∨ q.
    Join(PairInput),
    /// Sorted concatenation p ⊕ q (total mass 2).
    Directsum(PairInput),
    /// Sorted pairwise products p ⊗ q.
    Tensor(PairInput),
    /// Shannon/Rényi/Tsallis entropy of one distribution.
    Entropy(EntropyArgs),
    /// KL divergence or the order-α Bregman divergence of a pair.
    Divergence(DivergenceArgs),
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long, value_enum)]
    kind: EntropyKind,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Entropy order; required for renyi and tsallis.
    #[arg(long)]
    alpha: Option<f64>,
    /// Entropies are float-only; `rational` is rejected.
    #[arg(long, value_enum, default_value_t = BackendChoice::Float)]
    backend: BackendChoice,
    #[arg(long, default_value_t = Backend::<f64>::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyKind {
    Shannon,
    Renyi,
    Tsallis,
}

#[derive(Args)]
struct DivergenceArgs {
    #[arg(long, value_enum)]
    kind: DivergenceKind,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Order for wphi.
    #[arg(long)]
    alpha: Option<f64>,
    /// Divergences are float-only; `rational` is rejected.
    #[arg(long, value_enum, default_value_t = BackendChoice::Float)]
    backend: BackendChoice,
    #[arg(long, default_value_t = Backend::<f64>::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivergenceKind {
    Kl,
    Wphi,
}

#[derive(Args)]
struct VerifyArgs {
    /// Inequality id (Thm1, Thm2, Lem2, Cor1_supermod, ..., DistanceTriangle).
    #[arg(long)]
    id: String,
    /// Dimension of the sampled distributions.
    #[arg(long)]
    d: usize,
    /// Number of sampled pairs (triples for DistanceTriangle).
    #[arg(long)]
    count: usize,
    /// RNG seed; falls back to MAJOLAT_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated α grid; defaults depend on the id.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Float)]
    backend: BackendChoice,
    #[arg(long, default_value_t = Backend::<f64>::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Denominator of the rational sampling grid.
    #[arg(long, default_value_t = 3600)]
    denominator: u64,
    /// Cap on worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the per-pair CSV report here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON summary here (also printed to stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Functional whose lattice gap is scanned (shannon, tsallis, renyi).
    #[arg(long)]
    functional: String,
    /// Relation: supermod or subadd.
    #[arg(long, default_value = "supermod")]
    relation: String,
    /// Comma-separated α values to scan.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Comma-separated dimensions to cycle through.
    #[arg(long, value_delimiter = ',', default_values_t = [3usize, 4, 5, 6])]
    d: Vec<usize>,
    /// Sample budget per (α, direction).
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    /// RNG seed; falls back to MAJOLAT_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Gap magnitude that counts as a hit.
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    /// negative, positive, or both.
    #[arg(long, default_value = "both")]
    direction: String,
    /// Append found witnesses to this JSONL file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSONL file with one distribution per line; consecutive lines pair up.
    #[arg(long)]
    input: PathBuf,
    /// CSV report destination.
    #[arg(long)]
    output: PathBuf,
    /// Inequality ids to evaluate (default: every pairwise id).
    #[arg(long, value_delimiter = ',')]
    ids: Vec<String>,
    /// α grid for the ids that take one.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = Backend::<f64>::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Write the JSON summary here (also printed to stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn resolve_seed(seed: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("MAJOLAT_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("MAJOLAT_SEED={v:?} is not a valid seed"))),
        Err(_) => {
            Err(Error::Parse("a seed is required: pass --seed or set MAJOLAT_SEED".into()))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Compute(cmd) => run_compute(cmd).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => run_verify(args),
        Command::Search(args) => run_search(args).map(|()| ExitCode::SUCCESS),
        Command::Report(args) => run_report(args),
    }
}

fn read_jsonl_values(path: &Path) -> Result<Vec<serde_json::Value>, Error> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(format!("bad JSONL line: {e}"))))
        .collect()
}

/// Inline --p/--q, or the first two lines of --file.
fn load_pair_json(
    p: &Option<String>,
    q: &Option<String>,
    file: &Option<PathBuf>,
) -> Result<(serde_json::Value, serde_json::Value), Error> {
    match (p, q, file) {
        (Some(p), Some(q), None) => {
            let pv = serde_json::from_str(p).map_err(|e| Error::Parse(format!("--p: {e}")))?;
            let qv = serde_json::from_str(q).map_err(|e| Error::Parse(format!("--q: {e}")))?;
            Ok((pv, qv))
        }
        (None, None, Some(path)) => {
            let lines = read_jsonl_values(path)?;
            if lines.len() < 2 {
                return Err(Error::Parse(format!(
                    "{} holds {} distribution(s); need two",
                    path.display(),
                    lines.len()
                )));
            }
            Ok((lines[0].clone(), lines[1].clone()))
        }
        _ => Err(Error::Parse("pass --p and --q, or --file alone".into())),
    }
}

fn load_single_json(p: &Option<String>, file: &Option<PathBuf>) -> Result<serde_json::Value, Error> {
    match (p, file) {
        (Some(p), None) => serde_json::from_str(p).map_err(|e| Error::Parse(format!("--p: {e}"))),
        (None, Some(path)) => {
            let lines = read_jsonl_values(path)?;
            lines
                .into_iter()
                .next()
                .ok_or_else(|| Error::Parse(format!("{} holds no distributions", path.display())))
        }
        _ => Err(Error::Parse("pass --p, or --file alone".into())),
    }
}

fn run_compute(cmd: ComputeCmd) -> Result<(), Error> {
    match cmd {
        ComputeCmd::Meet(input) => {
            binary_lattice_op(&input, |p, q| majolat::meet(p, q).to_json(), |p, q| {
                majolat::meet(p, q).to_json()
            })
        }
        ComputeCmd::Join(input) => {
            binary_lattice_op(&input, |p, q| majolat::join(p, q).to_json(), |p, q| {
                majolat::join(p, q).to_json()
            })
        }
        ComputeCmd::Tensor(input) => {
            binary_lattice_op(&input, |p, q| p.tensor(q).to_json(), |p, q| p.tensor(q).to_json())
        }
        ComputeCmd::Directsum(input) => binary_lattice_op(
            &input,
            |p, q| p.direct_sum(q).to_json(),
            |p, q| p.direct_sum(q).to_json(),
        ),
        ComputeCmd::Entropy(args) => {
            reject_rational(args.backend, "entropy")?;
            let v = load_single_json(&args.p, &args.file)?;
            let be = Backend::with_tolerance(args.tolerance);
            let p = Distribution::<f64>::from_json(&v, &be)?;
            let alpha = parse_alpha_for(args.alpha, matches!(args.kind, EntropyKind::Shannon))?;
            let value = match args.kind {
                EntropyKind::Shannon => shannon(p.values()),
                EntropyKind::Renyi => renyi(p.values(), alpha),
                EntropyKind::Tsallis => tsallis(p.values(), alpha),
            };
            print_scalar(value);
            Ok(())
        }
        ComputeCmd::Divergence(args) => {
            reject_rational(args.backend, "divergence")?;
            let (pv, qv) = load_pair_json(&args.p, &args.q, &args.file)?;
            let be = Backend::with_tolerance(args.tolerance);
            let p = Distribution::<f64>::from_json(&pv, &be)?;
            let q = Distribution::<f64>::from_json(&qv, &be)?;
            let value = match args.kind {
                DivergenceKind::Kl => kl(p.values(), q.values()),
                DivergenceKind::Wphi => {
                    let alpha = parse_alpha_for(args.alpha, false)?;
                    w_phi(p.values(), q.values(), alpha)
                }
            };
            print_scalar(value);
            Ok(())
        }
    }
}

fn parse_alpha_for(alpha: Option<f64>, optional: bool) -> Result<Alpha, Error> {
    match alpha {
        Some(a) => Alpha::new(a),
        None if optional => Alpha::new(1.0),
        None => Err(Error::Parse("this kind needs --alpha".into())),
    }
}

fn reject_rational(backend: BackendChoice, what: &str) -> Result<(), Error> {
    if backend == BackendChoice::Rational {
        return Err(Error::Parse(format!(
            "{what} needs logarithms; the rational backend covers only \
             meet/join/directsum/tensor and the majorization checks"
        )));
    }
    Ok(())
}

fn binary_lattice_op(
    input: &PairInput,
    float_op: impl Fn(&Distribution<f64>, &Distribution<f64>) -> serde_json::Value,
    exact_op: impl Fn(&Distribution<BigRational>, &Distribution<BigRational>) -> serde_json::Value,
) -> Result<(), Error> {
    let (pv, qv) = load_pair_json(&input.p, &input.q, &input.file)?;
    let out = match input.backend {
        BackendChoice::Float => {
            let be = Backend::with_tolerance(input.tolerance);
            let p = Distribution::<f64>::from_json(&pv, &be)?;
            let q = Distribution::<f64>::from_json(&qv, &be)?;
            float_op(&p, &q)
        }
        BackendChoice::Rational => {
            let be = Backend::exact();
            let p = Distribution::<BigRational>::from_json(&pv, &be)?;
            let q = Distribution::<BigRational>::from_json(&qv, &be)?;
            exact_op(&p, &q)
        }
    };
    println!("{out}");
    Ok(())
}

fn print_scalar(value: f64) {
    if value.is_finite() {
        println!("{}", serde_json::json!(value));
    } else {
        println!("inf");
    }
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let id: InequalityId = args.id.parse()?;
    let seed = resolve_seed(args.seed)?;
    let mut cfg = BatchConfig::new(id, args.d, args.count, seed);
    cfg.alphas = args.alpha;
    cfg.tolerance = args.tolerance;
    cfg.rational = args.backend == BackendChoice::Rational;
    cfg.grid_denominator = args.denominator;

    let (reports, summary) = match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Parse(format!("--threads {n}: {e}")))?;
            pool.install(|| batch_verify(&cfg))?
        }
        None => batch_verify(&cfg)?,
    };

    if let Some(path) = &args.csv {
        let mut file = std::fs::File::create(path)?;
        write_csv(&mut file, &reports)?;
    }
    let summary_json =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(path) = &args.summary {
        std::fs::write(path, format!("{summary_json}\n"))?;
    }
    println!("{summary_json}");
    Ok(if summary.failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_search(args: SearchArgs) -> Result<(), Error> {
    let functional: SearchFunctional = args.functional.parse()?;
    let relation: SearchRelation = args.relation.parse()?;
    let seed = resolve_seed(args.seed)?;
    let directions: Vec<SearchDirection> = match args.direction.to_ascii_lowercase().as_str() {
        "negative" => vec![SearchDirection::Negative],
        "positive" => vec![SearchDirection::Positive],
        "both" => vec![SearchDirection::Negative, SearchDirection::Positive],
        other => return Err(Error::Parse(format!("unknown direction {other:?}"))),
    };

    let mut found = Vec::new();
    let mut outcomes = Vec::new();
    for &alpha in &args.alpha {
        for &direction in &directions {
            let spec = SearchSpec {
                functional,
                relation,
                direction,
                alpha: Alpha::new(alpha)?,
                dims: args.d.clone(),
                budget: args.budget,
                seed,
                threshold: args.threshold,
            };
            let outcome = search_counterexample(&spec);
            let dir = match direction {
                SearchDirection::Negative => "negative",
                SearchDirection::Positive => "positive",
            };
            outcomes.push(serde_json::json!({
                "functional": functional.as_str(),
                "relation": relation.as_str(),
                "alpha": alpha,
                "direction": dir,
                "tries": outcome.tries,
                "found": outcome.witness.is_some(),
                "witness": outcome.witness.as_ref().map(|w| serde_json::json!({
                    "alpha": w.alpha, "d": w.d, "p": w.p, "q": w.q, "gap": w.gap,
                })),
                "extreme_gap": outcome.extreme.as_ref().map(|w| w.gap),
            }));
            if let Some(w) = outcome.witness {
                found.push(w);
            }
        }
    }

    if let Some(path) = &args.out {
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        write_witnesses(&mut file, &found)?;
        file.flush()?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Array(outcomes))
            .map_err(|e| Error::Parse(e.to_string()))?
    );
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<ExitCode, Error> {
    let be = Backend::with_tolerance(args.tolerance);
    let values = read_jsonl_values(&args.input)?;
    if values.len() < 2 {
        return Err(Error::Parse(format!(
            "{} holds {} distribution(s); need at least one pair",
            args.input.display(),
            values.len()
        )));
    }
    let dists: Vec<Distribution<f64>> =
        values.iter().map(|v| Distribution::from_json(v, &be)).collect::<Result<_, _>>()?;

    let ids: Vec<InequalityId> = if args.ids.is_empty() {
        InequalityId::ALL
            .into_iter()
            .filter(|id| *id != InequalityId::DistanceTriangle)
            .collect()
    } else {
        let parsed: Result<Vec<InequalityId>, Error> = args.ids.iter().map(|s| s.parse()).collect();
        let parsed = parsed?;
        if parsed.contains(&InequalityId::DistanceTriangle) {
            return Err(Error::Parse(
                "DistanceTriangle needs sampled triples; use `verify --id DistanceTriangle`".into(),
            ));
        }
        parsed
    };

    let mut reports: Vec<Report> = Vec::new();
    for pair in dists.chunks_exact(2) {
        let (p, q) = (&pair[0], &pair[1]);
        for &id in &ids {
            let alphas: Vec<Option<f64>> = if !id.takes_alpha() {
                vec![None]
            } else if args.alpha.is_empty() {
                let grid = id.default_alphas();
                if grid.is_empty() {
                    vec![None]
                } else {
                    grid.into_iter().map(Some).collect()
                }
            } else {
                args.alpha
                    .iter()
                    .copied()
                    .filter(|&a| id.validate_alpha(a).is_ok())
                    .map(Some)
                    .collect()
            };
            for a in alphas {
                let alpha = a.map(Alpha::new).transpose()?;
                reports.push(check_one(id, p, q, alpha, &be)?);
            }
        }
    }

    let mut file = std::fs::File::create(&args.output)?;
    write_csv(&mut file, &reports)?;

    let passed = reports.iter().filter(|r| r.passed).count();
    let summary = serde_json::json!({
        "input": args.input.display().to_string(),
        "pairs": dists.len() / 2,
        "rows": reports.len(),
        "passed": passed,
        "failed": reports.len() - passed,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(path) = &args.summary {
        std::fs::write(path, format!("{text}\n"))?;
    }
    println!("{text}");
    Ok(if passed == reports.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
