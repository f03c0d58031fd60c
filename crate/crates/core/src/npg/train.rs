use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::mdp::{rollout_return, Environment};
use crate::policy::{l2_norm, PolicyParams};
use crate::rng::{RngStream, Streams};
use crate::robustness::{NoiseSpec, Noisy};

use super::critic::critic_solve;
use super::sampler::act;
use super::{actor_update, NpgConfig};

/// Metrics for one actor iteration. Counters and `wall_clock_s` are
/// cumulative since the start of training.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Mean undiscounted evaluation return of the updated policy.
    pub avg_return: f64,
    pub episodes_used: usize,
    pub env_steps_used: usize,
    /// Time spent sampling, fitting the critic and updating the actor.
    pub wall_clock_s: f64,
    pub theta_norm: f64,
    pub w_hat_norm: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutput {
    pub theta: PolicyParams,
    pub records: Vec<IterationRecord>,
    /// Largest critic iterate norm over every SGD step of the run.
    pub max_critic_norm: f64,
}

/// Mean return over `episodes` rollouts with actions sampled from `π_θ`.
pub fn evaluate_with<E: Environment + ?Sized>(
    env: &mut E,
    theta: &PolicyParams,
    map: &FeatureMap,
    episodes: usize,
    reset_rng: &mut RngStream,
    policy_rng: &mut RngStream,
) -> Result<f64> {
    let cap = env.spec().max_episode_steps;
    let mut total = 0.0;
    for _ in 0..episodes {
        let mut failure = None;
        total += rollout_return(env, reset_rng, cap, |obs| match act(theta, map, obs, policy_rng) {
            Ok(a) => a,
            Err(e) => {
                failure.get_or_insert(e);
                crate::mdp::ActionId(0)
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(total / episodes.max(1) as f64)
}

/// Evaluates a policy on fresh episodes drawn from the evaluation streams of
/// `seed`, with observations perturbed at level `noise`.
pub fn evaluate<E: Environment>(
    env: E,
    theta: &PolicyParams,
    map: &FeatureMap,
    episodes: usize,
    seed: u64,
    noise: NoiseSpec,
) -> Result<f64> {
    let mut streams = Streams::new(seed);
    let mut env = Noisy::new(env, noise, streams.eval_noise.clone());
    evaluate_with(&mut env, theta, map, episodes, &mut streams.eval_reset, &mut streams.eval_policy)
}

/// Trains from `θ = 0` with all randomness derived from `seed`.
pub fn train<E: Environment + Clone>(
    env: E,
    map: &FeatureMap,
    cfg: &NpgConfig,
    seed: u64,
    noise: NoiseSpec,
) -> Result<TrainOutput> {
    train_with_streams(env, map, cfg, Streams::new(seed), noise)
}

pub fn train_with_streams<E: Environment + Clone>(
    env: E,
    map: &FeatureMap,
    cfg: &NpgConfig,
    mut streams: Streams,
    noise: NoiseSpec,
) -> Result<TrainOutput> {
    cfg.validate()?;
    let mut eval_env = Noisy::new(env.clone(), noise, streams.eval_noise.clone());
    let mut train_env = Noisy::new(env, noise, streams.noise.clone());

    let mut theta = PolicyParams::zeros(map);
    let mut records = Vec::with_capacity(cfg.iterations);
    let mut busy = Duration::ZERO;
    let mut episodes_used = 0;
    let mut env_steps_used = 0;
    let mut max_critic_norm = 0.0f64;

    for t in 0..cfg.iterations {
        let diverged = |what: &'static str, records: &Vec<IterationRecord>| Error::Diverged {
            iteration: t,
            what,
            records: records.clone(),
        };

        let start = Instant::now();
        let critic = match critic_solve(&mut train_env, &theta, map, cfg, &mut streams) {
            Ok(c) => c,
            Err(Error::NonFinite(what)) => return Err(diverged(what, &records)),
            Err(e) => return Err(e),
        };
        if !critic.w_hat.iter().all(|v| v.is_finite()) {
            return Err(diverged("w_hat", &records));
        }
        actor_update(&mut theta, &critic.w_hat, cfg.eta)?;
        if !theta.is_finite() {
            return Err(diverged("theta", &records));
        }
        busy += start.elapsed();

        episodes_used += critic.episodes;
        env_steps_used += critic.env_steps;
        max_critic_norm = max_critic_norm.max(critic.max_norm);

        let avg_return = match evaluate_with(
            &mut eval_env,
            &theta,
            map,
            cfg.eval_episodes,
            &mut streams.eval_reset,
            &mut streams.eval_policy,
        ) {
            Ok(r) => r,
            Err(Error::NonFinite(what)) => return Err(diverged(what, &records)),
            Err(e) => return Err(e),
        };

        records.push(IterationRecord {
            iteration: t,
            avg_return,
            episodes_used,
            env_steps_used,
            wall_clock_s: busy.as_secs_f64(),
            theta_norm: theta.norm(),
            w_hat_norm: l2_norm(&critic.w_hat),
        });
    }

    Ok(TrainOutput {
        theta,
        records,
        max_critic_norm,
    })
}
