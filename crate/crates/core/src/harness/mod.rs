//! Experiment runner: seeded training runs, noise sweeps and feature-map
//! comparisons, written out as CSV metrics, policy checkpoints and config
//! echoes.
//!
//! Every (transform, ζ, seed) combination is one run with its own files:
//!
//! ```text
//! <output>/<run_id>.csv     per-iteration metrics
//! <output>/<run_id>.policy  final policy checkpoint
//! <output>/<run_id>.cfg     resolved single-seed config
//! ```

pub mod config;
pub mod metrics;

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::ExperimentConfig;
pub use metrics::{read_csv, write_csv, MetricsRow, CSV_HEADER};

use crate::error::{Error, Result};
use crate::features::{FeatureMap, Transform};
use crate::npg::{train, IterationRecord};
use crate::policy::Checkpoint;
use crate::robustness::NoiseSpec;

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    Diverged { iteration: usize, reason: String },
}

#[derive(Clone, Debug)]
pub struct RunArtifact {
    pub run_id: String,
    pub env: String,
    pub transform: Transform,
    pub seed: u64,
    pub zeta: f64,
    pub metrics_csv: PathBuf,
    /// Absent when the run diverged.
    pub checkpoint: Option<PathBuf>,
    pub config_echo: PathBuf,
    pub status: RunStatus,
    pub records: Vec<IterationRecord>,
}

impl RunArtifact {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn final_return(&self) -> Option<f64> {
        self.records.last().map(|r| r.avg_return)
    }

    pub fn wall_clock_s(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.wall_clock_s)
    }
}

pub fn run_id(cfg: &ExperimentConfig, seed: u64) -> String {
    format!("{}-{}-z{}-s{}", cfg.env, cfg.transform, cfg.zeta, seed)
}

/// Median of a non-empty sample; mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Runs one seed and writes its files. Divergence is recorded in the status;
/// only I/O failures are errors.
fn execute_one(cfg: &ExperimentConfig, seed: u64) -> Result<RunArtifact> {
    let id = run_id(cfg, seed);
    let dir = &cfg.output;
    let metrics_csv = dir.join(format!("{id}.csv"));
    let config_echo = dir.join(format!("{id}.cfg"));
    let checkpoint_path = dir.join(format!("{id}.policy"));

    let echo = ExperimentConfig { seeds: vec![seed], ..cfg.clone() };
    std::fs::write(&config_echo, echo.to_text())?;

    let env = cfg.env.build();
    let map = FeatureMap::new(cfg.transform, &cfg.env.spec())?;
    let noise = NoiseSpec::new(cfg.zeta)?;

    let (status, records, checkpoint) = match train(env, &map, &cfg.npg, seed, noise) {
        Ok(out) => {
            let ckpt = Checkpoint::new(cfg.env, &map, out.theta);
            std::fs::write(&checkpoint_path, ckpt.to_text())?;
            (RunStatus::Completed, out.records, Some(checkpoint_path))
        }
        Err(Error::Diverged { iteration, what, records }) => (
            RunStatus::Diverged {
                iteration,
                reason: format!("{what} became non-finite"),
            },
            records,
            None,
        ),
        Err(e) => return Err(e),
    };

    let env_name = cfg.env.name();
    let transform_name = cfg.transform.name();
    let rows: Vec<MetricsRow> = records
        .iter()
        .map(|r| MetricsRow::new(&id, env_name, transform_name, seed, cfg.zeta, r))
        .collect();
    write_csv(&metrics_csv, &rows)?;

    Ok(RunArtifact {
        run_id: id,
        env: env_name.to_owned(),
        transform: cfg.transform,
        seed,
        zeta: cfg.zeta,
        metrics_csv,
        checkpoint,
        config_echo,
        status,
        records,
    })
}

/// Validates every config, then runs all `(config, seed)` jobs on a pool of
/// `workers` threads. Nothing is written if any config is invalid.
pub fn execute(configs: &[ExperimentConfig], workers: usize) -> Result<Vec<RunArtifact>> {
    for cfg in configs {
        cfg.validate()?;
    }
    let mut dirs: Vec<&Path> = configs.iter().map(|c| c.output.as_path()).collect();
    dirs.dedup();
    for dir in dirs {
        std::fs::create_dir_all(dir)?;
    }
    let jobs: Vec<(&ExperimentConfig, u64)> = configs
        .iter()
        .flat_map(|c| c.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| jobs.par_iter().map(|(c, s)| execute_one(c, *s)).collect())
}

/// All seeds of one config.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<RunArtifact>> {
    execute(std::slice::from_ref(cfg), cfg.workers)
}

fn reject_duplicates<T: PartialEq + fmt::Debug>(field: &str, items: &[T]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::config(field, "list is empty"));
    }
    for (i, a) in items.iter().enumerate() {
        if items[..i].contains(a) {
            return Err(Error::config(field, format!("duplicate entry {a:?}")));
        }
    }
    Ok(())
}

/// One run per `(ζ, seed)`.
pub fn sweep_noise(cfg: &ExperimentConfig, zetas: &[f64]) -> Result<Vec<RunArtifact>> {
    reject_duplicates("zeta", zetas)?;
    let configs: Vec<ExperimentConfig> = zetas
        .iter()
        .map(|&zeta| ExperimentConfig { zeta, ..cfg.clone() })
        .collect();
    execute(&configs, cfg.workers)
}

/// One run per `(transform, seed)`.
pub fn compare_features(cfg: &ExperimentConfig, transforms: &[Transform]) -> Result<Vec<RunArtifact>> {
    reject_duplicates("transform", transforms)?;
    let configs: Vec<ExperimentConfig> = transforms
        .iter()
        .map(|&transform| ExperimentConfig { transform, ..cfg.clone() })
        .collect();
    execute(&configs, cfg.workers)
}

/// Aggregate over the seeds of one (env, transform, ζ) group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub env: String,
    pub transform: Transform,
    pub zeta: f64,
    pub runs: usize,
    pub failed: usize,
    pub median_final_return: Option<f64>,
    pub total_wall_clock_s: f64,
}

pub fn summarize(artifacts: &[RunArtifact]) -> Vec<GroupSummary> {
    let mut groups: Vec<GroupSummary> = Vec::new();
    let mut finals: Vec<Vec<f64>> = Vec::new();
    for a in artifacts {
        let idx = match groups
            .iter()
            .position(|g| g.env == a.env && g.transform == a.transform && g.zeta == a.zeta)
        {
            Some(i) => i,
            None => {
                groups.push(GroupSummary {
                    env: a.env.clone(),
                    transform: a.transform,
                    zeta: a.zeta,
                    runs: 0,
                    failed: 0,
                    median_final_return: None,
                    total_wall_clock_s: 0.0,
                });
                finals.push(Vec::new());
                groups.len() - 1
            }
        };
        let g = &mut groups[idx];
        g.runs += 1;
        g.total_wall_clock_s += a.wall_clock_s();
        if a.completed() {
            finals[idx].extend(a.final_return());
        } else {
            g.failed += 1;
        }
    }
    for (g, f) in groups.iter_mut().zip(&finals) {
        g.median_final_return = median(f);
    }
    groups
}

impl fmt::Display for GroupSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let median = self
            .median_final_return
            .map_or_else(|| "n/a".to_owned(), |m| format!("{m:.2}"));
        write!(
            f,
            "{}/{}/zeta={}: runs={} failed={} median_final_return={} wall_clock_s={:.3}",
            self.env, self.transform, self.zeta, self.runs, self.failed, median, self.total_wall_clock_s
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::EnvKind;

    fn small(dir: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(EnvKind::CartPole);
        cfg.npg.iterations = 2;
        cfg.npg.critic_steps = 20;
        cfg.npg.eval_episodes = 2;
        cfg.seeds = vec![0, 1];
        cfg.output = dir.to_path_buf();
        cfg
    }

    #[test]
    fn median_matches_sorting() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0]), Some(3.0));
        assert_eq!(median(&[5.0, 1.0, 3.0]), Some(3.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
    }

    #[test]
    fn run_writes_files_per_seed() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        let arts = run(&cfg).unwrap();
        assert_eq!(arts.len(), 2);
        for a in &arts {
            assert!(a.completed());
            assert_eq!(read_csv(&a.metrics_csv).unwrap().len(), 2);
            assert!(a.checkpoint.as_ref().unwrap().exists());
            let echo = ExperimentConfig::load(a.config_echo.to_str().unwrap()).unwrap();
            assert_eq!(echo.seeds, vec![a.seed]);
        }
        let summary = summarize(&arts);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].runs, 2);
    }

    #[test]
    fn invalid_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("never");
        let mut cfg = small(&out);
        cfg.npg.gamma = 1.5;
        assert!(matches!(run(&cfg), Err(Error::Config { field, .. }) if field == "gamma"));
        assert!(!out.exists());
    }

    #[test]
    fn sweep_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        assert!(sweep_noise(&cfg, &[0.0, 0.1, 0.0]).is_err());
        assert!(sweep_noise(&cfg, &[-1.0]).is_err());
        assert!(compare_features(&cfg, &[Transform::Raw, Transform::Raw]).is_err());
        assert!(compare_features(&cfg, &[Transform::AcrobotAug7]).is_err());
    }

    #[test]
    fn diverged_run_keeps_partial_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.npg.iterations = 4;
        cfg.npg.eta = 1e308;
        cfg.seeds = vec![0];
        let arts = run(&cfg).unwrap();
        let a = &arts[0];
        assert!(matches!(a.status, RunStatus::Diverged { .. }));
        assert!(a.checkpoint.is_none());
        assert_eq!(read_csv(&a.metrics_csv).unwrap().len(), a.records.len());
        assert_eq!(summarize(&arts)[0].failed, 1);
    }
}
