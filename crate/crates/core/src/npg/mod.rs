//! Sample-based natural policy gradient for log-linear policies.
//!
//! Each actor iteration runs `N` projected-SGD steps on the compatible
//! least-squares problem `min_w E[(Q(s,a) - wᵀφ(s,a))²]`, with `(s, a, Q̂)`
//! drawn by [`sample_q`] from the discounted occupancy measure of the current
//! policy. The averaged iterate `ŵ` is the natural gradient direction, and the
//! actor moves `θ ← θ + ηŵ`.

mod critic;
mod sampler;
mod train;

pub use critic::{average_sgd, critic_solve, critic_sgd_step, CriticSolution, CriticWeights};
pub use sampler::{sample_q, QSample};
pub use train::{evaluate, evaluate_with, train, train_with_streams, IterationRecord, TrainOutput};

use crate::error::{Error, Result};
use crate::policy::PolicyParams;

#[derive(Clone, Debug, PartialEq)]
pub struct NpgConfig {
    /// Actor iterations `T`.
    pub iterations: usize,
    /// Critic SGD steps `N` per actor iteration.
    pub critic_steps: usize,
    /// Actor step size `η`.
    pub eta: f64,
    /// Critic SGD step size `α`.
    pub alpha: f64,
    /// Continuation probability of the sampler; `1 - γ` terminates.
    pub gamma: f64,
    /// Radius of the critic's feasible ball.
    pub w_max: f64,
    pub eval_episodes: usize,
}

impl NpgConfig {
    pub fn cartpole_reference() -> Self {
        NpgConfig {
            iterations: 25,
            critic_steps: 150,
            eta: 0.1,
            alpha: 0.1,
            gamma: 0.95,
            w_max: 1e12,
            eval_episodes: 20,
        }
    }

    pub fn acrobot_reference() -> Self {
        NpgConfig {
            iterations: 60,
            critic_steps: 80,
            eta: 1.0,
            alpha: 0.0001,
            gamma: 0.95,
            w_max: 1e12,
            eval_episodes: 20,
        }
    }

    /// `iterations = 0` is accepted and yields an empty run.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be finite and > 0, got {v}")))
            }
        };
        if self.critic_steps == 0 {
            return Err(Error::config("critic_steps", "must be >= 1"));
        }
        if self.eval_episodes == 0 {
            return Err(Error::config("eval_episodes", "must be >= 1"));
        }
        positive("eta", self.eta)?;
        positive("alpha", self.alpha)?;
        positive("w_max", self.w_max)?;
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        Ok(())
    }
}

/// `θ ← θ + η ŵ`.
pub fn actor_update(theta: &mut PolicyParams, w_hat: &[f64], eta: f64) -> Result<()> {
    if theta.0.len() != w_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.0.len(),
            actual: w_hat.len(),
        });
    }
    for (t, w) in theta.0.iter_mut().zip(w_hat) {
        *t += eta * w;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_update_examples() {
        let mut theta = PolicyParams(vec![0.0; 4]);
        actor_update(&mut theta, &[1.0, -1.0, 0.0, 0.0], 0.1).unwrap();
        assert_eq!(theta.0, vec![0.1, -0.1, 0.0, 0.0]);

        let before = theta.clone();
        actor_update(&mut theta, &[3.0, 2.0, 1.0, 0.5], 0.0).unwrap();
        assert_eq!(theta, before);

        assert!(actor_update(&mut theta, &[1.0], 0.1).is_err());
    }

    #[test]
    fn actor_updates_accumulate_linearly() {
        let w1 = [0.5, -0.25, 2.0];
        let w2 = [0.25, 0.75, -1.0];
        let mut seq = PolicyParams(vec![1.0, 2.0, 3.0]);
        actor_update(&mut seq, &w1, 0.5).unwrap();
        actor_update(&mut seq, &w2, 0.5).unwrap();
        let sum: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let mut once = PolicyParams(vec![1.0, 2.0, 3.0]);
        actor_update(&mut once, &sum, 0.5).unwrap();
        assert_eq!(seq, once);
    }

    #[test]
    fn config_validation() {
        assert!(NpgConfig::cartpole_reference().validate().is_ok());
        assert!(NpgConfig::acrobot_reference().validate().is_ok());
        let bad = |f: fn(&mut NpgConfig)| {
            let mut c = NpgConfig::cartpole_reference();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(|c| c.gamma = 1.0), Error::Config { field, .. } if field == "gamma"));
        assert!(matches!(bad(|c| c.gamma = 0.0), Error::Config { .. }));
        assert!(matches!(bad(|c| c.alpha = -1.0), Error::Config { field, .. } if field == "alpha"));
        assert!(matches!(bad(|c| c.critic_steps = 0), Error::Config { .. }));
        assert!(matches!(bad(|c| c.w_max = 0.0), Error::Config { .. }));
    }
}
