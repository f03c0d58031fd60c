//! Log-linear softmax policy.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::features::{FeatureMap, Transform};
use crate::mdp::ActionId;
use crate::rng::RngStream;

/// Flat parameter vector, one block of `d` weights per action.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams(pub Vec<f64>);

impl PolicyParams {
    pub fn zeros(map: &FeatureMap) -> Self {
        PolicyParams(vec![0.0; map.dim()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::BadDistribution("no actions".into()));
    }
    if !logits.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("logits"));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= z);
    Ok(p)
}

/// `π_θ(·|s)` for the augmented state `psi`.
pub fn action_distribution(theta: &PolicyParams, map: &FeatureMap, psi: &[f64]) -> Result<Vec<f64>> {
    softmax(&map.logits(&theta.0, psi)?)
}

/// Inverse-CDF sampling from one uniform draw.
pub fn sample_action(p: &[f64], rng: &mut RngStream) -> Result<ActionId> {
    if p.is_empty() || p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::BadDistribution(format!("{p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution(format!("sums to {total}")));
    }
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return Ok(ActionId(i));
        }
    }
    // Rounding left `acc` just below `u`; fall back to the last action with mass.
    let last = p.iter().rposition(|v| *v > 0.0).unwrap_or(p.len() - 1);
    Ok(ActionId(last))
}

/// A trained policy together with what is needed to evaluate it again.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub env: EnvKind,
    pub transform: Transform,
    pub state_dim: usize,
    pub action_count: usize,
    pub theta: PolicyParams,
}

const CHECKPOINT_FORMAT: &str = "lfa-npg-policy/1";

impl Checkpoint {
    pub fn new(env: EnvKind, map: &FeatureMap, theta: PolicyParams) -> Self {
        Checkpoint {
            env,
            transform: map.transform(),
            state_dim: map.state_dim(),
            action_count: map.action_count(),
            theta,
        }
    }

    /// `name = value` lines; floats use the shortest representation that
    /// parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let theta: Vec<String> = self.theta.0.iter().map(|v| format!("{v:?}")).collect();
        writeln!(s, "format = {CHECKPOINT_FORMAT}").unwrap();
        writeln!(s, "env = {}", self.env).unwrap();
        writeln!(s, "transform = {}", self.transform).unwrap();
        writeln!(s, "state_dim = {}", self.state_dim).unwrap();
        writeln!(s, "action_count = {}", self.action_count).unwrap();
        writeln!(s, "theta = {}", theta.join(",")).unwrap();
        s
    }

    /// Rebuilds the feature map and checks the stored dimensions against it.
    pub fn feature_map(&self) -> Result<FeatureMap> {
        let map = FeatureMap::new(self.transform, &self.env.spec())?;
        if map.state_dim() != self.state_dim || map.action_count() != self.action_count {
            return Err(Error::config("state_dim", "checkpoint dimensions do not match environment"));
        }
        Ok(map)
    }
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut env = None;
        let mut transform = None;
        let mut state_dim = None;
        let mut action_count = None;
        let mut theta = None;
        let mut format = None;
        for (i, line) in text.lines().enumerate() {
            let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected `name = value`".into()))?;
            let value = value.trim();
            match key.trim() {
                "format" => format = Some(value.to_owned()),
                "env" => env = Some(value.parse::<EnvKind>()?),
                "transform" => transform = Some(value.parse::<Transform>()?),
                "state_dim" => {
                    state_dim = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
                }
                "action_count" => {
                    action_count = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
                }
                "theta" => {
                    let v = value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| parse_err(e.to_string()))?;
                    theta = Some(v);
                }
                other => return Err(parse_err(format!("unknown key `{other}`"))),
            }
        }
        if format.as_deref() != Some(CHECKPOINT_FORMAT) {
            return Err(Error::Parse { line: 0, reason: "missing or unsupported format line".into() });
        }
        let missing = |k: &str| Error::Parse { line: 0, reason: format!("missing `{k}`") };
        let ckpt = Checkpoint {
            env: env.ok_or_else(|| missing("env"))?,
            transform: transform.ok_or_else(|| missing("transform"))?,
            state_dim: state_dim.ok_or_else(|| missing("state_dim"))?,
            action_count: action_count.ok_or_else(|| missing("action_count"))?,
            theta: PolicyParams(theta.ok_or_else(|| missing("theta"))?),
        };
        let expected = ckpt.state_dim * ckpt.action_count;
        if ckpt.theta.0.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: ckpt.theta.0.len() });
        }
        if !ckpt.theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        Ok(ckpt)
    }
}
