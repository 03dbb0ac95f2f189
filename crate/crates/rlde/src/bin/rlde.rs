//! Command-line entry point: offline training, per-problem design, single
//! runs, fingerprint inspection, full experiments, and report building.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on i/o errors.

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rlde::bbob::{make_instance, suite_split};
use rlde::de::{run_de, DEConfig};
use rlde::ela::{assemble_state, feature_names};
use rlde::error::Error;
use rlde::harness::{
    build_report, log_checkpoints, records_from_csv, records_to_csv, render_report_text,
    run_experiment, trajectories_to_csv, write_text, Algorithm, ALGORITHM_NAMES,
};
use rlde::madqn::AgentConfig;
use rlde::meta::{
    checkpoint_hash, design_for, load_checkpoint, save_checkpoint, train, TrainedAgent,
};
use rlde::rng::derived_rng;

#[derive(Parser)]
#[command(name = "rlde", version, about = "Differential evolution designed per problem by a trained agent")]
struct Cli {
    /// Master seed for every derived generator.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Problem dimension.
    #[arg(long, global = true, default_value_t = 10)]
    dim: usize,

    /// Evaluation budget per run (defaults to 2000 * dim).
    #[arg(long, global = true)]
    max_fes: Option<usize>,

    /// Repetitions per (algorithm, function) cell.
    #[arg(long, global = true, default_value_t = 31)]
    runs: usize,

    /// JSON file with optional "agent" and "de" sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent over the 18 training functions.
    Train(TrainArgs),
    /// Print the configuration a trained agent designs for a problem.
    Design(DesignArgs),
    /// Execute one configured DE run on a problem.
    Run(RunArgs),
    /// Print a problem's 62-value fingerprint as CSV.
    Features(ProblemArgs),
    /// Run the full experiment grid and write records plus a report.
    Eval(EvalArgs),
    /// Rebuild a report from stored records.
    Compare(CompareArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Meta-level learning steps.
    #[arg(long, default_value_t = 10_000)]
    meta_steps: usize,
    /// Base-level budget per meta step (defaults to --max-fes).
    #[arg(long)]
    base_max_fes: Option<usize>,
    /// Where to write the checkpoint (defaults to <out>/agent.ckpt).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Benchmark function id in 1..=24.
    #[arg(long)]
    function: u8,
    /// Instance seed (defaults to the function id).
    #[arg(long)]
    instance_seed: Option<u64>,
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Trained agent checkpoint.
    #[arg(long)]
    checkpoint: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Design the configuration with this checkpoint instead of using the
    /// "de" section of --config (or the canonical baseline).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Comma-separated algorithms out of rlde, de, rs.
    #[arg(long, default_value = "rlde,de,rs")]
    algorithms: String,
    /// Trained agent checkpoint (required when rlde is evaluated).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Comma-separated function ids (defaults to the six test functions).
    #[arg(long)]
    functions: Option<String>,
    /// Record zero runtimes so repeated invocations are byte-identical.
    #[arg(long)]
    fixed_time: bool,
    /// Use the uncentered literal Z normalization inside the indicator.
    #[arg(long)]
    literal_z: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// records.csv produced by eval.
    #[arg(long)]
    records: PathBuf,
    /// Reference algorithm for marks and the indicator.
    #[arg(long, default_value = "rlde")]
    reference: String,
    #[arg(long)]
    literal_z: bool,
}

/// Optional file-backed overrides.
#[derive(Deserialize, Default)]
struct FileConfig {
    agent: Option<AgentConfig>,
    de: Option<DEConfig>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Error> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse("config file", e.to_string()))
}

fn ensure_out_dir(out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn load_agent(path: &Path) -> Result<(TrainedAgent, String), Error> {
    Ok((load_checkpoint(path)?, checkpoint_hash(path)?))
}

fn parse_function_ids(spec: &str) -> Result<Vec<u8>, Error> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|_| Error::config(format!("bad function id '{s}'")))
        })
        .collect()
}

fn run_cli(cli: Cli) -> Result<(), Error> {
    let max_fes = cli.max_fes.unwrap_or(2000 * cli.dim);
    let file_config = load_file_config(cli.config.as_deref())?;

    match cli.command {
        Command::Train(args) => {
            ensure_out_dir(&cli.out)?;
            let agent_config = file_config.agent.unwrap_or_default();
            let base_max_fes = args.base_max_fes.unwrap_or(max_fes);
            eprintln!(
                "training: dim={} meta_steps={} base_max_fes={} seed={}",
                cli.dim, args.meta_steps, base_max_fes, cli.seed
            );
            let (agent, log) = train(
                &agent_config,
                &suite_split(),
                cli.dim,
                args.meta_steps,
                base_max_fes,
                cli.seed,
            )?;
            let ckpt = args.checkpoint.unwrap_or_else(|| cli.out.join("agent.ckpt"));
            save_checkpoint(&agent, &ckpt)?;
            write_text(&cli.out.join("training_log.csv"), &log.to_csv())?;
            eprintln!(
                "trained {} steps in {:.1}s; checkpoint at {}",
                log.steps.len(),
                log.wall_time,
                ckpt.display()
            );
        }
        Command::Design(args) => {
            let (agent, _) = load_agent(&args.checkpoint)?;
            let instance = make_instance(
                args.problem.function,
                cli.dim,
                args.problem.instance_seed.unwrap_or(u64::from(args.problem.function)),
            )?;
            let mut rng = derived_rng(&[cli.seed, u64::from(instance.function_id)], "design");
            let config = design_for(&agent, &instance, &mut rng);
            println!(
                "{}",
                serde_json::to_string_pretty(&config)
                    .map_err(|e| Error::parse("design output", e.to_string()))?
            );
        }
        Command::Run(args) => {
            ensure_out_dir(&cli.out)?;
            let instance = make_instance(
                args.problem.function,
                cli.dim,
                args.problem.instance_seed.unwrap_or(u64::from(args.problem.function)),
            )?;
            let config = if let Some(ckpt) = &args.checkpoint {
                let (agent, _) = load_agent(ckpt)?;
                let mut rng = derived_rng(&[cli.seed, u64::from(instance.function_id)], "design");
                design_for(&agent, &instance, &mut rng)
            } else if let Some(de) = file_config.de {
                de.validate()?;
                de
            } else {
                rlde::harness::canonical_de_config()
            };
            let checkpoints = log_checkpoints(max_fes);
            let mut rng =
                derived_rng(&[cli.seed, u64::from(instance.function_id)], "single_run");
            let result = run_de(&config, &instance, max_fes, &checkpoints, &mut rng)?;
            let final_gap = rlde::bbob::gap(&instance, result.best_f);
            let mut csv = String::from("fes,gap\n");
            for (fes, f) in &result.trajectory {
                csv.push_str(&format!("{},{}\n", fes, rlde::bbob::gap(&instance, *f)));
            }
            let path = cli.out.join(format!("run_f{}.csv", instance.function_id));
            write_text(&path, &csv)?;
            println!(
                "f{} best_f={} gap={} fes={} trajectory={}",
                instance.function_id,
                result.best_f,
                final_gap,
                result.fes_used,
                path.display()
            );
        }
        Command::Features(args) => {
            let instance = make_instance(
                args.function,
                cli.dim,
                args.instance_seed.unwrap_or(u64::from(args.function)),
            )?;
            let mut rng = derived_rng(&[cli.seed, u64::from(instance.function_id)], "ela");
            let features = assemble_state(&instance, &mut rng);
            println!("{}", feature_names().join(","));
            println!(
                "{}",
                features.values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
            );
        }
        Command::Eval(args) => {
            ensure_out_dir(&cli.out)?;
            let mut algorithms = Vec::new();
            for name in args.algorithms.split(',').map(str::trim) {
                match name {
                    "rlde" => {
                        let ckpt = args.checkpoint.as_deref().ok_or_else(|| {
                            Error::config("evaluating rlde needs --checkpoint".to_string())
                        })?;
                        let (agent, hash) = load_agent(ckpt)?;
                        algorithms.push(Algorithm::designed(agent, hash));
                    }
                    "de" => algorithms.push(Algorithm::canonical_de()),
                    "rs" => algorithms.push(Algorithm::random_search()),
                    other => {
                        return Err(Error::config(format!(
                            "unknown algorithm '{other}'; valid names: {}",
                            ALGORITHM_NAMES.join(", ")
                        )))
                    }
                }
            }
            let functions = match &args.functions {
                Some(spec) => parse_function_ids(spec)?,
                None => suite_split().test_ids.into_iter().collect(),
            };
            eprintln!(
                "evaluating {} algorithms on {:?} (dim={}, runs={}, max_fes={})",
                algorithms.len(),
                functions,
                cli.dim,
                cli.runs,
                max_fes
            );
            let records = run_experiment(
                &algorithms,
                &functions,
                cli.dim,
                cli.runs,
                max_fes,
                cli.seed,
                args.fixed_time,
            )?;
            write_text(&cli.out.join("records.csv"), &records_to_csv(&records))?;
            write_text(&cli.out.join("trajectories.csv"), &trajectories_to_csv(&records))?;
            let reference =
                if algorithms.iter().any(|a| a.name == "rlde") { "rlde" } else { "de" };
            let report = build_report(&records, reference, args.literal_z)?;
            write_text(
                &cli.out.join("report.json"),
                &serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::parse("report", e.to_string()))?,
            )?;
            let text = render_report_text(&report);
            write_text(&cli.out.join("report.txt"), &text)?;
            print!("{text}");
        }
        Command::Compare(args) => {
            let text = std::fs::read_to_string(&args.records)
                .map_err(|e| Error::io(&args.records, e))?;
            let records = records_from_csv(&text)?;
            let report = build_report(&records, &args.reference, args.literal_z)?;
            print!("{}", render_report_text(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
