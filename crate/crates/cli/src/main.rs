use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use projmotif::driver::{benchmark, run, BenchConfig, RunConfig, DEFAULT_Q};
use projmotif::oracle::{median_string, naive_mfp, DEFAULT_MEDIAN_LIMIT, DEFAULT_NAIVE_LIMIT};
use projmotif::projection::{Backend, ProjectionPlan, DEFAULT_THRESHOLD_FLOOR};
use projmotif::refine::DEFAULT_MAX_ITERS;
use projmotif::seqcore::{generate_planted, parse_fasta, to_fasta, Alphabet, SequenceSet};
use projmotif::Error;

#[derive(Parser)]
#[command(
    name = "projmotif",
    version,
    about = "Planted (l,d)-motif discovery by random projection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a FASTA file for an (l,d) motif.
    Find(FindArgs),
    /// Generate a planted instance: FASTA plus a truth JSON sidecar.
    Gen(GenArgs),
    /// Solve a small FASTA input exactly.
    Oracle(OracleArgs),
    /// Compare the projection search against the exact solvers on planted instances.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long)]
    d: usize,
    /// Projection width (default l - d - 1).
    #[arg(long)]
    k: Option<usize>,
    /// Bucket threshold (default max(floor, ceil(2x / 4^k))).
    #[arg(long)]
    s: Option<usize>,
    /// Number of trials (default from q).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_Q)]
    q: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_FLOOR)]
    s_floor: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "PROJMOTIF_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_em_iters: usize,
    /// Run all m trials even after a perfect alignment is found.
    #[arg(long)]
    no_early_stop: bool,
}

#[derive(clap::Args)]
struct FindArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    l: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Project every trial onto these 1-based columns (comma separated).
    #[arg(long, value_delimiter = ',')]
    plan: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write wall_ms as 0 so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    t: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// FASTA output path; the truth file goes next to it as <stem>.truth.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum, default_value_t = Method::Naive)]
    method: Method,
    /// Largest search space to attempt.
    #[arg(long)]
    limit: Option<u128>,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 3)]
    t: usize,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    l: usize,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Dense,
    Grouped,
    Auto,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Naive,
    Median,
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NoEnrichedBuckets { .. }) => 3,
            Failure::Core(
                Error::EmptyInput
                | Error::UnknownSymbol { .. }
                | Error::RecordWithoutSequence(_)
                | Error::MissingHeader(_),
            )
            | Failure::Io(_) => 4,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => e.fmt(f),
            Failure::Io(msg) => f.write_str(msg),
        }
    }
}

fn read_fasta(path: &Path) -> Result<SequenceSet, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_fasta(&text, &Alphabet::dna())?)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

impl SearchArgs {
    fn config(&self, l: usize) -> RunConfig {
        let mut cfg = RunConfig::new(l, self.d);
        cfg.k = self.k;
        cfg.s = self.s;
        cfg.m = self.m;
        cfg.q = self.q;
        cfg.threshold_floor = self.s_floor;
        cfg.seed = self.seed;
        cfg.workers = self.workers;
        cfg.backend = match self.backend {
            BackendArg::Dense => Backend::Dense,
            BackendArg::Grouped => Backend::Grouped,
            BackendArg::Auto => Backend::Auto,
        };
        cfg.max_em_iters = self.max_em_iters;
        cfg.early_stop = !self.no_early_stop;
        cfg
    }
}

fn find(args: FindArgs) -> Result<(), Failure> {
    let seqs = read_fasta(&args.input)?;
    let mut cfg = args.search.config(args.l);
    if let Some(kept) = args.plan {
        cfg.plan = Some(ProjectionPlan::new(args.l, kept)?);
    }
    let result = run(&cfg, &seqs)?;
    match args.format {
        Format::Json => println!("{}", result.to_json(!args.no_timing)),
        Format::Tsv => print!("{}", result.to_tsv(!args.no_timing)),
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let inst = generate_planted(args.t, args.n, args.l, args.d, args.seed)?;
    write(&args.out, &to_fasta(&inst.sequences))?;
    let truth = args.out.with_extension("truth.json");
    let json = serde_json::to_string_pretty(&inst.truth()).expect("plain data serializes");
    write(&truth, &(json + "\n"))?;
    eprintln!("wrote {} and {}", args.out.display(), truth.display());
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), Failure> {
    let seqs = read_fasta(&args.input)?;
    let json = match args.method {
        Method::Naive => {
            let sol = naive_mfp(&seqs, args.l, args.limit.unwrap_or(DEFAULT_NAIVE_LIMIT))?;
            serde_json::to_string_pretty(&sol)
        }
        Method::Median => {
            let sol = median_string(&seqs, args.l, args.limit.unwrap_or(DEFAULT_MEDIAN_LIMIT))?;
            serde_json::to_string_pretty(&sol)
        }
    };
    println!("{}", json.expect("plain data serializes"));
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut cfg = BenchConfig::new(
        args.instances,
        args.t,
        args.n,
        args.l,
        args.search.d,
        args.search.seed,
    );
    let mut run_cfg = args.search.config(args.l);
    if run_cfg.s.is_none() {
        run_cfg.s = cfg.run.s;
    }
    cfg.run = run_cfg;
    print!("{}", benchmark(&cfg)?.to_tsv());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Find(a) => find(a),
        Command::Gen(a) => gen(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
