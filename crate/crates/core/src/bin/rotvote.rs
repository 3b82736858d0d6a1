use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rotvote::bench::{
    extract_corpus, highlighted_rows, read_report, run_grid, write_outputs, write_report, write_svg, ReportFormat,
    RunConfig, PAPER_DECIMALS, REPORT_DECIMALS,
};
use rotvote::datasets::{write_synthetic_corpus, ProtocolMode};
use rotvote::Error;

#[derive(Parser)]
#[command(name = "rotvote", version, about = "Rotation-voting benchmark for classical image classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Paper,
    Holdout,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    protocol: Option<Protocol>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Corpus root, overriding the config.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic glyph corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        #[arg(long, default_value_t = 48)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fill the feature cache for every image and variant.
    Extract {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Run the full grid and write reports, plot and audit files.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print metrics with two decimals.
        #[arg(long)]
        paper_precision: bool,
    },
    /// Re-emit a results CSV as CSV or markdown.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        paper_precision: bool,
    },
    /// Plot the highlighted rows of a results CSV as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(args: &ConfigArgs) -> rotvote::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(p) = args.protocol {
        cfg.protocol.mode = match p {
            Protocol::Paper => ProtocolMode::Paper,
            Protocol::Holdout => ProtocolMode::Holdout,
        };
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    if let Some(corpus) = &args.corpus {
        cfg.corpus = corpus.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn decimals(paper_precision: bool) -> usize {
    if paper_precision {
        PAPER_DECIMALS
    } else {
        REPORT_DECIMALS
    }
}

fn execute(command: Command) -> rotvote::Result<bool> {
    match command {
        Command::Synth {
            out,
            per_class,
            size,
            seed,
        } => {
            let corpus = write_synthetic_corpus(&out, per_class, size, seed)?;
            println!("wrote {} images to {}", corpus.len(), out.display());
        }
        Command::Extract { cfg, cache_dir } => {
            let mut cfg = load_config(&cfg)?;
            if cache_dir.is_some() {
                cfg.cache_dir = cache_dir;
            }
            let n = extract_corpus(&cfg)?;
            println!("computed {n} descriptor vectors");
        }
        Command::Run {
            cfg,
            out,
            paper_precision,
        } => {
            let mut cfg = load_config(&cfg)?;
            if let Some(out) = out {
                cfg.output = out;
            }
            let outcome = run_grid(&cfg)?;
            write_outputs(&cfg.output, &cfg, &outcome, decimals(paper_precision))?;
            println!(
                "{} rows written to {}",
                outcome.rows.len(),
                cfg.output.display()
            );
            for f in &outcome.failures {
                eprintln!("failed: {} / {} / {}: {}", f.descriptor, f.classifier, f.samples, f.error);
            }
            return Ok(outcome.is_complete());
        }
        Command::Report {
            input,
            format,
            out,
            paper_precision,
        } => {
            let rows: Vec<_> = read_report(&input)?.into_iter().map(|r| r.row).collect();
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Markdown => ReportFormat::Markdown,
            };
            write_report(&out, &rows, format, decimals(paper_precision))?;
        }
        Command::Plot { input, out } => {
            let rows: Vec<_> = read_report(&input)?.into_iter().map(|r| r.row).collect();
            write_svg(&out, &highlighted_rows(&rows))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
