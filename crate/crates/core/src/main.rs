use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contact_analogy::cli::{
    cmd_bench, cmd_gen_suite, cmd_match, cmd_select_tool, error_json, exit_code, write_bench_csv, MatchReport, Overrides,
    EXIT_NO_CANDIDATES,
};
use contact_analogy::{Error, Result};

#[derive(Parser)]
#[command(name = "contact-analogy", version, about = "Find analogous contact points on new tools and objects")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Match a scene's first target against its demonstration.
    Match(MatchArgs),
    /// Choose the best tool among a scene's targets.
    SelectTool(MatchArgs),
    /// Generate a seeded hook/disk suite.
    GenSuite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every scene of a suite and summarize.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        /// CSV path (default: <suite>/bench.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Write overlay and similarity images to the output directory.
    #[arg(long)]
    viz: bool,
    /// Output directory for report.json and images (report goes to stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct Tuning {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    patch: Option<usize>,
    #[arg(long)]
    topk: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated observation scales, e.g. "5,10,15".
    #[arg(long, value_delimiter = ',')]
    pyramid: Option<Vec<f64>>,
    /// Use built-in shape descriptors instead of feature files.
    #[arg(long)]
    fallback_features: bool,
    #[arg(long)]
    max_sim_candidates: Option<usize>,
    /// Fail instead of returning an unverified top candidate.
    #[arg(long)]
    no_fallback_select: bool,
}

impl From<Tuning> for Overrides {
    fn from(t: Tuning) -> Self {
        Overrides {
            lambda: t.lambda,
            patch: t.patch,
            topk: t.topk,
            alpha: t.alpha,
            delta: t.delta,
            pyramid: t.pyramid,
            fallback_features: t.fallback_features,
            max_sim_candidates: t.max_sim_candidates,
            no_fallback_select: t.no_fallback_select,
        }
    }
}

fn emit(report: &MatchReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            report.write(dir.join("report.json"))
        }
        None => {
            println!("{}", report.to_json());
            Ok(())
        }
    }
}

fn run_match(args: MatchArgs, select: bool) -> Result<()> {
    let viz_dir = args.viz.then(|| args.out.clone().unwrap_or_else(|| PathBuf::from("viz")));
    let overrides = Overrides::from(args.tuning);
    let report = if select {
        cmd_select_tool(&args.scene, &overrides, viz_dir.as_deref())?
    } else {
        cmd_match(&args.scene, &overrides, viz_dir.as_deref())?
    };
    emit(&report, args.out.as_deref())
}

fn run_bench(suite: PathBuf, out: Option<PathBuf>, tuning: Tuning) -> Result<()> {
    let summary = cmd_bench(&suite, &Overrides::from(tuning))?;
    let csv = out.unwrap_or_else(|| suite.join("bench.csv"));
    write_bench_csv(&summary.rows, &csv)?;
    println!("scenes: {}", summary.scenes);
    println!("success rate: {:.1}% ({}/{})", 100.0 * summary.success_rate, summary.successes, summary.scenes);
    println!("mean verification runs per success: {:.2}", summary.mean_runs_per_success);
    println!("mean wall-clock per scene: {:.3} s", summary.mean_seconds);
    println!("csv: {}", csv.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONTACT_ANALOGY_LOG", "error")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let is_bench = matches!(cli.command, Command::Bench { .. });
    let outcome = match cli.command {
        Command::Match(args) => run_match(args, false),
        Command::SelectTool(args) => run_match(args, true),
        Command::GenSuite { seed, count, out } => cmd_gen_suite(seed, count, &out).map(|m| {
            println!("wrote {} scenes to {}", m.count, out.display());
        }),
        Command::Bench { suite, out, tuning } => run_bench(suite, out, tuning),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if is_bench { EXIT_NO_CANDIDATES } else { exit_code(&e) };
            eprintln!("{}", error_json(&e, code));
            ExitCode::from(code as u8)
        }
    }
}
