use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lfa_npg::features::Transform;
use lfa_npg::harness::{self, config, ExperimentConfig, RunArtifact, RunStatus};
use lfa_npg::npg::evaluate;
use lfa_npg::policy::Checkpoint;
use lfa_npg::robustness::NoiseSpec;
use lfa_npg::Error;

#[derive(Parser)]
#[command(name = "lfa-npg", version, about = "Natural policy gradient with linear function approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed of a config.
    Train(ExperimentArgs),
    /// Evaluate a saved policy checkpoint.
    Eval(EvalArgs),
    /// Train one run per (noise level, seed).
    SweepNoise {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated noise levels.
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.3,1,3,10")]
        zetas: Vec<f64>,
    },
    /// Train one run per (feature transform, seed).
    CompareFeatures {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated transform names.
        #[arg(long, value_delimiter = ',', required = true)]
        transforms: Vec<String>,
    },
}

/// Flags mirror config keys and override them.
#[derive(Args)]
struct ExperimentArgs {
    /// Builtin config name (cartpole-reference, acrobot-reference) or config file path.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    transform: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    critic_steps: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    w_max: Option<String>,
    #[arg(long)]
    eval_episodes: Option<String>,
    /// Observation noise level ζ.
    #[arg(long)]
    noise: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, default_value_t = 20)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let base = match &self.config {
            Some(name) => match config::builtin(name) {
                Some(text) => text.to_owned(),
                None => std::fs::read_to_string(name)?,
            },
            None => String::new(),
        };
        let mut pairs = config::parse_pairs(&base)?;
        let flags = [
            ("env", &self.env),
            ("transform", &self.transform),
            ("iterations", &self.iterations),
            ("critic_steps", &self.critic_steps),
            ("eta", &self.eta),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("w_max", &self.w_max),
            ("eval_episodes", &self.eval_episodes),
            ("zeta", &self.noise),
            ("seeds", &self.seed),
            ("output", &self.out),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.push((key, v.as_str()));
            }
        }
        ExperimentConfig::from_pairs(pairs)
    }
}

fn report(artifacts: &[RunArtifact]) -> ExitCode {
    for a in artifacts {
        match &a.status {
            RunStatus::Completed => println!(
                "{}: final_return={:.2} wall_clock_s={:.3} csv={}",
                a.run_id,
                a.final_return().unwrap_or(f64::NAN),
                a.wall_clock_s(),
                a.metrics_csv.display()
            ),
            RunStatus::Diverged { iteration, reason } => println!(
                "{}: FAILED at iteration {iteration}: {reason} (partial csv={})",
                a.run_id,
                a.metrics_csv.display()
            ),
        }
    }
    for group in harness::summarize(artifacts) {
        println!("{group}");
    }
    if artifacts.iter().all(RunArtifact::completed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Train(exp) => {
            let cfg = exp.resolve()?;
            Ok(report(&harness::run(&cfg)?))
        }
        Command::SweepNoise { exp, zetas } => {
            let cfg = exp.resolve()?;
            Ok(report(&harness::sweep_noise(&cfg, &zetas)?))
        }
        Command::CompareFeatures { exp, transforms } => {
            let cfg = exp.resolve()?;
            let transforms = transforms
                .iter()
                .map(|t| t.parse::<Transform>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(report(&harness::compare_features(&cfg, &transforms)?))
        }
        Command::Eval(args) => {
            let ckpt: Checkpoint = std::fs::read_to_string(&args.checkpoint)?.parse()?;
            let map = ckpt.feature_map()?;
            let noise = NoiseSpec::new(args.noise)?;
            let mean = evaluate(ckpt.env.build(), &ckpt.theta, &map, args.episodes.max(1), args.seed, noise)?;
            println!("{}/{}: mean_return={mean:.3} over {} episodes", ckpt.env, ckpt.transform, args.episodes.max(1));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e @ (Error::Config { .. } | Error::Parse { .. })) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
