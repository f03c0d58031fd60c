use crate::error::Result;
use crate::features::FeatureMap;
use crate::mdp::{ActionId, Environment, StateVec};
use crate::policy::{action_distribution, sample_action, PolicyParams};
use crate::rng::{RngStream, Streams};

/// A state-action pair drawn from the discounted occupancy measure together
/// with an unbiased estimate of its Q-value.
#[derive(Clone, Debug, PartialEq)]
pub struct QSample {
    /// The observation as the agent saw it (before augmentation).
    pub state: StateVec,
    pub action: ActionId,
    pub q_hat: f64,
    /// Steps taken before the pair was accepted.
    pub accept_index: usize,
    /// Environment steps consumed by this call.
    pub env_steps: usize,
    /// Episodes started by this call.
    pub episodes: usize,
}

pub(crate) fn act(
    theta: &PolicyParams,
    map: &FeatureMap,
    obs: &[f64],
    rng: &mut RngStream,
) -> Result<ActionId> {
    let psi = map.psi(obs)?;
    let p = action_distribution(theta, map, &psi)?;
    sample_action(&p, rng)
}

/// Draws `(s, a) ~ d^π` and `Q̂(s, a)`.
///
/// Starting from a reset state and a policy action, each step continues under
/// the policy with probability `gamma` and otherwise accepts the current pair.
/// An episode that ends before acceptance is reset without restarting the
/// acceptance clock. From the accepted pair the policy keeps acting, stopping
/// after each step with probability `1 - gamma` or when the episode ends;
/// `q_hat` is the undiscounted sum of rewards from the accepted step on.
pub fn sample_q<E: Environment + ?Sized>(
    env: &mut E,
    theta: &PolicyParams,
    map: &FeatureMap,
    gamma: f64,
    streams: &mut Streams,
) -> Result<QSample> {
    let mut env_steps = 0;
    let mut episodes = 1;
    let mut obs = env.reset(&mut streams.reset);
    let mut action = act(theta, map, &obs, &mut streams.policy)?;
    let mut accept_index = 0;

    while streams.coins.bernoulli(gamma) {
        let out = env.step(action);
        env_steps += 1;
        obs = if out.done {
            episodes += 1;
            env.reset(&mut streams.reset)
        } else {
            out.next_state
        };
        action = act(theta, map, &obs, &mut streams.policy)?;
        accept_index += 1;
    }

    let (state, accepted) = (obs, action);
    let mut q_hat = 0.0;
    let mut a = accepted;
    loop {
        let out = env.step(a);
        env_steps += 1;
        q_hat += out.reward;
        if out.done || !streams.coins.bernoulli(gamma) {
            break;
        }
        a = act(theta, map, &out.next_state, &mut streams.policy)?;
    }

    Ok(QSample {
        state,
        action: accepted,
        q_hat,
        accept_index,
        env_steps,
        episodes,
    })
}
