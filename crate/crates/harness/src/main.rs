use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use morl_envs::EnvKind;
use morl_harness::{
    build_report, check_compatible, dynamic_demo, evaluate, execute, is_conditioned_id, load_config,
    parse_partial_config, read_records, render_scatter_svg, write_demo_csv, write_records, write_report_csv,
    write_report_markdown, write_scatter_csv, CheckpointActor, RunConfig,
};
use morl_metrics::SolutionSet;
use morl_nn::PolicyCheckpoint;
use morl_ppo::{train, write_metrics_csv, AlgorithmVariant};

/// Multi-objective PPO training, evaluation and reporting.
#[derive(Parser)]
#[command(name = "morl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file whose sections override the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one algorithm variant and save its checkpoint and training log.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        env: Option<EnvKind>,
        #[arg(long, default_value = "moppo")]
        variant: AlgorithmVariant,
        /// Overrides train.total_steps.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Evaluate a checkpoint on the weight lattice and write its record.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Defaults to the checkpoint's training environment.
        #[arg(long)]
        env: Option<EnvKind>,
        /// Lattice size target.
        #[arg(long)]
        weights: Option<usize>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long, value_name = "BOOL")]
        deterministic_eval: Option<bool>,
    },
    /// Score one or more record files and print the report table.
    Report {
        #[command(flatten)]
        common: Common,
        /// Environment whose objective names label the table.
        #[arg(long)]
        env: Option<EnvKind>,
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
    /// Export per-objective return-versus-weight scatters.
    Scatter {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        env: Option<EnvKind>,
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
    /// Run one episode with the conditioning weight switched on a schedule.
    Demo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        env: Option<EnvKind>,
        #[arg(long, value_name = "BOOL")]
        deterministic_eval: Option<bool>,
    },
    /// Execute the pipeline declared in a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides run.out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides train.seed, eval.seed and demo.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn sections(common: &Common, env: Option<EnvKind>) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_partial_config(&text).with_context(|| format!("loading {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(kind) = env {
        config.env.kind = kind;
    }
    if let Some(seed) = common.seed {
        config.train.seed = seed;
        config.eval.seed = seed;
        config.demo.seed = seed;
    }
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn load_checkpoint(path: &Path) -> Result<PolicyCheckpoint> {
    PolicyCheckpoint::load(path).with_context(|| format!("loading checkpoint {}", path.display()))
}

fn load_records(paths: &[PathBuf]) -> Result<Vec<SolutionSet>> {
    let mut sets = Vec::new();
    for path in paths {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        sets.extend(read_records(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?);
    }
    Ok(sets)
}

fn objective_names(config: &RunConfig, labelled: bool, dim: usize) -> Result<Vec<String>> {
    let names = if labelled { config.env.spec()?.objective_names } else { Vec::new() };
    if labelled && names.len() != dim {
        bail!("environment {} has {} objectives, records have {dim}", config.env.kind, names.len());
    }
    Ok(names)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train { common, env, variant, steps } => {
            let mut config = sections(&common, env)?;
            if let Some(steps) = steps {
                config.train.total_steps = steps;
            }
            let output = train(variant, &config.env, &config.train, |log| {
                if log.update % 10 == 0 {
                    eprintln!("update {:>5}  steps {:>9}  return {:.3?}", log.update, log.env_steps, log.mean_return);
                }
            })?;
            let ckpt = common.out.join("checkpoint.bin");
            output.checkpoint.write_to(create(&ckpt)?)?;
            write_metrics_csv(create(&common.out.join("metrics.csv"))?, &output.log)?;
            println!("{}", ckpt.display());
        }
        Command::Evaluate { common, checkpoint, env, weights, episodes, deterministic_eval } => {
            let ckpt = load_checkpoint(&checkpoint)?;
            let kind = match env {
                Some(kind) => kind,
                None => ckpt.metadata.env.parse().context("checkpoint names an unknown environment")?,
            };
            let mut config = sections(&common, Some(kind))?;
            if let Some(n) = weights {
                config.eval.weight_point_target = n;
            }
            if let Some(n) = episodes {
                config.eval.episodes_per_point = n;
            }
            if let Some(d) = deterministic_eval {
                config.eval.deterministic = d;
            }
            let record = evaluate(&ckpt, &config.env, &config.eval)?;
            let path = common.out.join("records.csv");
            write_records(create(&path)?, &[record])?;
            println!("{}", path.display());
        }
        Command::Report { common, env, records } => {
            let config = sections(&common, env)?;
            let sets = load_records(&records)?;
            let rows = build_report(&sets, &config.eval)?;
            let dim = rows.first().map_or(0, |r| r.rho.len());
            let names = objective_names(&config, env.is_some() || common.config.is_some(), dim)?;
            write_report_csv(create(&common.out.join("report.csv"))?, &rows)?;
            write_report_markdown(create(&common.out.join("report.md"))?, &rows, &names)?;
            let mut stdout = std::io::stdout().lock();
            write_report_markdown(&mut stdout, &rows, &names)?;
            stdout.flush()?;
        }
        Command::Scatter { common, env, records } => {
            let config = sections(&common, env)?;
            let sets = load_records(&records)?;
            let dim = sets.iter().find_map(SolutionSet::dim).unwrap_or(0);
            let names = objective_names(&config, env.is_some() || common.config.is_some(), dim)?;
            let baselines: Vec<SolutionSet> = sets.iter().filter(|s| !is_conditioned_id(&s.algorithm)).cloned().collect();
            for set in &sets {
                let stem: String = set.algorithm.replace(|c: char| !(c.is_ascii_alphanumeric() || c == '-'), "_");
                let csv = common.out.join(format!("scatter_{stem}.csv"));
                write_scatter_csv(create(&csv)?, set)?;
                let others: Vec<SolutionSet> = baselines.iter().filter(|b| b.algorithm != set.algorithm).cloned().collect();
                let svg = common.out.join(format!("scatter_{stem}.svg"));
                create(&svg)?.write_all(render_scatter_svg(set, &others, &names)?.as_bytes())?;
                println!("{}", csv.display());
            }
        }
        Command::Demo { common, checkpoint, env, deterministic_eval } => {
            let ckpt = load_checkpoint(&checkpoint)?;
            let kind = match env {
                Some(kind) => kind,
                None => ckpt.metadata.env.parse().context("checkpoint names an unknown environment")?,
            };
            let config = sections(&common, Some(kind))?;
            if !ckpt.config.condition_on_weights {
                bail!("the demo needs a weight-conditioned checkpoint, got {}", ckpt.metadata.variant);
            }
            let spec = check_compatible(&ckpt, &config.env)?;
            let (initial, schedule) = config.demo.resolve(spec.objective_count)?;
            let actor = CheckpointActor::new(&ckpt, deterministic_eval.unwrap_or(config.demo.deterministic));
            let log = dynamic_demo(&actor, &config.demo.demo_env(&config.env), &initial, &schedule, config.demo.horizon, config.demo.seed)?;
            let path = common.out.join("demo.csv");
            write_demo_csv(create(&path)?, &log)?;
            for s in &log.segments {
                println!("steps {:>6}..{:<6} weight {:?}  reward rate {:.4?}", s.start, s.end, s.weight.as_slice(), s.mean_reward);
            }
        }
        Command::Run { config, out, seed } => {
            let mut resolved = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(out) = out {
                resolved.run.out = out;
            }
            if let Some(seed) = seed {
                resolved.train.seed = seed;
                resolved.eval.seed = seed;
                resolved.demo.seed = seed;
            }
            let summary = execute(&resolved)?;
            for path in &summary.artifacts {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
