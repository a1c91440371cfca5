use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use coph_cli::plot::render_svg;
use coph_cli::runner::Plan;
use coph_cli::{ConfigError, ExperimentConfig};
use coph_core::vectors::{ingest_texts, read_corpus, read_vectors_csv, write_vectors_csv};
use coph_core::{estimate_jaccard, MinHasher, OphHasher, Permutation, Scheme, Sketch, TheoryConfig, VarianceReport};

#[derive(Parser)]
#[command(
    name = "coph",
    version,
    about = "Minwise hashing experiments: MinHash, C-MinHash, densified OPH and C-OPH"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config-driven comparison and write TrialStats CSV.
    Run(RunArgs),
    /// Closed-form variances of C-OPH and ReDen for one (D, K, a, f).
    Theory(TheoryArgs),
    /// Turn a corpus into term vectors over documents.
    Ingest(IngestArgs),
    /// Sketch one term vector.
    Sketch(SketchArgs),
    /// Estimate Jaccard similarity from two sketch files.
    Estimate { first: PathBuf, second: PathBuf },
    /// Draw a seeded permutation and save it.
    Perm(PermArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output; overrides `out` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot of MSE against J.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Evaluate closed forms even when K² > D or f > (K−1)D/K.
    #[arg(long)]
    override_theory_hypotheses: bool,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    bins: usize,
    /// Intersection size a.
    #[arg(short = 'a', long = "intersection")]
    a: usize,
    /// Union size f.
    #[arg(short = 'f', long = "union")]
    f: usize,
    /// Also print exact rational variances.
    #[arg(long)]
    exact: bool,
    /// Cross-check against exhaustive enumeration when the instance is small.
    #[arg(long)]
    oracle: bool,
    /// Monte Carlo trials per scheme (0 skips).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print CSV instead of aligned text.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    override_theory_hypotheses: bool,
}

#[derive(Args)]
struct IngestArgs {
    /// A file with one document per line, or a directory with one document per file.
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SketchArgs {
    /// Term vectors written by `coph ingest`.
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long)]
    term: String,
    #[arg(long, default_value = "coph-sigma-pi")]
    scheme: String,
    /// Bin count K (OPH schemes).
    #[arg(long)]
    bins: Option<usize>,
    /// Sketch length M; defaults to K.
    #[arg(long)]
    hashes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PermArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let plan = Plan::new(&cfg, args.override_theory_hypotheses)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(ConfigError::Invalid {
                key: "jobs",
                msg: "need at least one worker".into(),
            }
            .into());
        }
        pool = pool.num_threads(jobs);
    }
    let output = pool.build()?.install(|| plan.execute())?;
    write_text(args.out.as_deref().or(cfg.out.as_deref()), &output.stats_csv())?;
    if let Some(path) = args.plot.as_deref().or(cfg.plot.as_deref()) {
        write_text(Some(path), &render_svg(&output.rows))?;
    }
    if let Some(path) = &cfg.theory_out {
        write_text(Some(path), &output.theory_csv())?;
    }
    Ok(())
}

fn theory(args: TheoryArgs) -> anyhow::Result<()> {
    let cfg = TheoryConfig::with_override(args.dim, args.bins, args.a, args.f, args.override_theory_hypotheses)?;
    let mut report = VarianceReport::compute(cfg)?;
    if args.exact {
        report = report.with_exact()?;
    }
    if args.oracle {
        report = report.with_oracle()?;
    }
    if args.trials > 0 {
        report = report.with_monte_carlo(args.trials, args.seed)?;
    }
    if args.csv {
        print!("{}\n{}", coph_core::theory::REPORT_CSV_HEADER, report.to_csv());
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn ingest(args: IngestArgs) -> anyhow::Result<()> {
    let docs = read_corpus(&args.corpus).with_context(|| format!("reading {}", args.corpus.display()))?;
    let n = docs.len();
    let vectors = ingest_texts(docs)?;
    let mut buf = Vec::new();
    write_vectors_csv(&mut buf, &vectors)?;
    write_text(args.out.as_deref(), std::str::from_utf8(&buf)?)?;
    eprintln!("{} terms over {n} documents", vectors.len());
    Ok(())
}

fn sketch(args: SketchArgs) -> anyhow::Result<()> {
    let file = File::open(&args.vectors).with_context(|| format!("opening {}", args.vectors.display()))?;
    let vectors = read_vectors_csv(file)?;
    let Some(v) = vectors.get(&args.term.to_lowercase()) else {
        bail!("term {:?} not found in {}", args.term, args.vectors.display());
    };
    let scheme: Scheme = args.scheme.parse()?;
    let sketch = match scheme {
        Scheme::Oph(s) => {
            let bins = args.bins.context("OPH schemes need --bins")?;
            OphHasher::from_seed(s, v.dim(), bins, args.hashes.unwrap_or(bins), args.seed)?.sketch(v)?
        }
        mh => {
            let hashes = args.hashes.or(args.bins).context("MinHash schemes need --hashes")?;
            MinHasher::from_seed(mh.minhash(hashes).expect("minhash scheme"), v.dim(), args.seed)?.sketch(v)?
        }
    };
    let mut w = create(&args.out)?;
    sketch.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn read_sketch(path: &Path) -> anyhow::Result<Sketch> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    Ok(Sketch::read_from(&mut r)?)
}

fn perm(args: PermArgs) -> anyhow::Result<()> {
    let p = Permutation::from_seed(args.dim, args.seed)?;
    let mut w = create(&args.out)?;
    p.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Config and hypothesis problems exit with 2, everything else with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err.downcast_ref::<ConfigError>().is_some()
        || matches!(
            err.downcast_ref::<coph_core::Error>(),
            Some(
                coph_core::Error::Hypothesis(_)
                    | coph_core::Error::InvalidParameter(_)
                    | coph_core::Error::InfeasibleProfile { .. }
            )
        );
    if validation {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Theory(a) => theory(a),
        Command::Ingest(a) => ingest(a),
        Command::Sketch(a) => sketch(a),
        Command::Estimate { first, second } => (|| {
            let j = estimate_jaccard(&read_sketch(&first)?, &read_sketch(&second)?)?;
            println!("{j}");
            Ok(())
        })(),
        Command::Perm(a) => perm(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
