//! Flat `key = value` experiment configs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::features::{FeatureMap, Transform};
use crate::npg::NpgConfig;
use crate::robustness::NoiseSpec;

pub const CARTPOLE_REFERENCE: &str = include_str!("../../configs/cartpole-reference.cfg");
pub const ACROBOT_REFERENCE: &str = include_str!("../../configs/acrobot-reference.cfg");

/// Config names that resolve without touching the filesystem.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "cartpole-reference" => Some(CARTPOLE_REFERENCE),
        "acrobot-reference" => Some(ACROBOT_REFERENCE),
        _ => None,
    }
}

pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub transform: Transform,
    pub npg: NpgConfig,
    pub zeta: f64,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
    /// Parallel runs; 0 uses every available core.
    pub workers: usize,
}

impl ExperimentConfig {
    /// Reference hyperparameters and the augmented transform for `env`.
    pub fn defaults(env: EnvKind) -> Self {
        let (transform, npg) = match env {
            EnvKind::CartPole => (Transform::CartpoleAug7, NpgConfig::cartpole_reference()),
            EnvKind::Acrobot => (Transform::AcrobotAug7, NpgConfig::acrobot_reference()),
        };
        ExperimentConfig {
            env,
            transform,
            npg,
            zeta: 0.0,
            seeds: DEFAULT_SEEDS.to_vec(),
            output: PathBuf::from("results").join(env.name()),
            workers: 0,
        }
    }

    /// Builds a config from `(key, value)` pairs applied in order on top of the
    /// defaults of the environment named by the last `env` pair.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let env = pairs
            .iter()
            .rev()
            .find(|(k, _)| k.trim() == "env")
            .ok_or_else(|| Error::config("env", "missing"))?
            .1
            .parse::<EnvKind>()?;
        let mut cfg = Self::defaults(env);
        for (key, value) in pairs {
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(parse_pairs(text)?)
    }

    /// Resolves a builtin config name or reads a config file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match builtin(name_or_path) {
            Some(text) => Self::parse(text),
            None => Self::parse(&std::fs::read_to_string(Path::new(name_or_path))?),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| Error::config(key, format!("`{value}`: {e}")))
        }
        match key {
            "env" => {
                let env = value.parse::<EnvKind>()?;
                if env != self.env {
                    return Err(Error::config("env", "conflicting environment names"));
                }
            }
            "transform" => self.transform = value.parse()?,
            "iterations" => self.npg.iterations = num(key, value)?,
            "critic_steps" => self.npg.critic_steps = num(key, value)?,
            "eta" => self.npg.eta = num(key, value)?,
            "alpha" => self.npg.alpha = num(key, value)?,
            "gamma" => self.npg.gamma = num(key, value)?,
            "w_max" => self.npg.w_max = num(key, value)?,
            "eval_episodes" => self.npg.eval_episodes = num(key, value)?,
            "zeta" | "noise" => self.zeta = num("zeta", value)?,
            "seeds" | "seed" => {
                self.seeds = value
                    .split(',')
                    .map(|s| num::<u64>("seeds", s.trim()))
                    .collect::<Result<_>>()?
            }
            "output" => self.output = PathBuf::from(value),
            "workers" => self.workers = num(key, value)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        FeatureMap::new(self.transform, &self.env.spec())?;
        self.npg.validate()?;
        if self.npg.iterations == 0 {
            return Err(Error::config("iterations", "must be >= 1"));
        }
        NoiseSpec::new(self.zeta)?;
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("seeds", "seeds must be distinct"));
        }
        Ok(())
    }

    /// Every key, fully resolved. Parsing the result gives back `self`.
    pub fn to_text(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut s = String::new();
        writeln!(s, "env = {}", self.env).unwrap();
        writeln!(s, "transform = {}", self.transform).unwrap();
        writeln!(s, "iterations = {}", self.npg.iterations).unwrap();
        writeln!(s, "critic_steps = {}", self.npg.critic_steps).unwrap();
        writeln!(s, "eta = {:?}", self.npg.eta).unwrap();
        writeln!(s, "alpha = {:?}", self.npg.alpha).unwrap();
        writeln!(s, "gamma = {:?}", self.npg.gamma).unwrap();
        writeln!(s, "w_max = {:?}", self.npg.w_max).unwrap();
        writeln!(s, "eval_episodes = {}", self.npg.eval_episodes).unwrap();
        writeln!(s, "zeta = {:?}", self.zeta).unwrap();
        writeln!(s, "seeds = {}", seeds.join(",")).unwrap();
        writeln!(s, "output = {}", self.output.display()).unwrap();
        writeln!(s, "workers = {}", self.workers).unwrap();
        s
    }
}

/// Splits config text into `(key, value)` pairs, skipping blanks and `#`
/// comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = match line.split_once('#') {
            Some((before, _)) => before,
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        out.push((k.trim(), v.trim()));
    }
    Ok(out)
}
