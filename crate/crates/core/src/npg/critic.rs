use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::mdp::Environment;
use crate::policy::{l2_norm, PolicyParams};
use crate::rng::Streams;

use super::sampler::sample_q;
use super::NpgConfig;

/// Critic iterate constrained to the ball `‖ω‖₂ ≤ w_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticWeights {
    omega: Vec<f64>,
    w_max: f64,
}

impl CriticWeights {
    pub fn zeros(dim: usize, w_max: f64) -> Self {
        CriticWeights {
            omega: vec![0.0; dim],
            w_max,
        }
    }

    /// Builds weights from an explicit vector, projecting it onto the ball.
    pub fn from_vec(omega: Vec<f64>, w_max: f64) -> Self {
        let mut w = CriticWeights { omega, w_max };
        w.project();
        w
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.omega)
    }

    /// Euclidean projection onto the ball of radius `w_max`.
    fn project(&mut self) {
        let norm = self.norm();
        if norm > self.w_max {
            let scale = self.w_max / norm;
            self.omega.iter_mut().for_each(|w| *w *= scale);
        }
    }

    /// `ω ← Proj(ω − 2α(ω·φ − Q̂)φ)`.
    pub fn sgd_step(&mut self, phi: &[f64], q_hat: f64, alpha: f64) -> Result<()> {
        if phi.len() != self.omega.len() {
            return Err(Error::DimensionMismatch {
                expected: self.omega.len(),
                actual: phi.len(),
            });
        }
        if !q_hat.is_finite() || !alpha.is_finite() || !phi.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("critic input"));
        }
        let prediction: f64 = self.omega.iter().zip(phi).map(|(w, f)| w * f).sum();
        let scale = 2.0 * alpha * (prediction - q_hat);
        for (w, f) in self.omega.iter_mut().zip(phi) {
            *w -= scale * f;
        }
        self.project();
        if !self.omega.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("critic weights"));
        }
        Ok(())
    }
}

/// Functional form of [`CriticWeights::sgd_step`].
pub fn critic_sgd_step(w: &CriticWeights, phi: &[f64], q_hat: f64, alpha: f64) -> Result<CriticWeights> {
    let mut next = w.clone();
    next.sgd_step(phi, q_hat, alpha)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticSolution {
    /// Average of the post-update iterates `ω_1 … ω_N`.
    pub w_hat: Vec<f64>,
    /// Largest `‖ω_n‖₂` seen during the run.
    pub max_norm: f64,
    pub env_steps: usize,
    pub episodes: usize,
}

/// Runs `steps` projected-SGD updates from `ω₀ = 0` on samples produced by
/// `next_sample` and returns the averaged iterate.
pub fn average_sgd<F>(
    dim: usize,
    steps: usize,
    alpha: f64,
    w_max: f64,
    mut next_sample: F,
) -> Result<CriticSolution>
where
    F: FnMut() -> Result<(Vec<f64>, f64)>,
{
    let mut w = CriticWeights::zeros(dim, w_max);
    let mut sum = vec![0.0; dim];
    let mut max_norm = 0.0f64;
    for _ in 0..steps {
        let (phi, q_hat) = next_sample()?;
        w.sgd_step(&phi, q_hat, alpha)?;
        max_norm = max_norm.max(w.norm());
        for (s, v) in sum.iter_mut().zip(&w.omega) {
            *s += v;
        }
    }
    let n = steps.max(1) as f64;
    Ok(CriticSolution {
        w_hat: sum.into_iter().map(|s| s / n).collect(),
        max_norm,
        env_steps: 0,
        episodes: 0,
    })
}

/// The critic of one actor iteration: `N` fresh occupancy samples under the
/// current policy, fed through projected SGD.
pub fn critic_solve<E: Environment + ?Sized>(
    env: &mut E,
    theta: &PolicyParams,
    map: &FeatureMap,
    cfg: &NpgConfig,
    streams: &mut Streams,
) -> Result<CriticSolution> {
    let mut env_steps = 0;
    let mut episodes = 0;
    let mut solution = average_sgd(map.dim(), cfg.critic_steps, cfg.alpha, cfg.w_max, || {
        let sample = sample_q(env, theta, map, cfg.gamma, streams)?;
        env_steps += sample.env_steps;
        episodes += sample.episodes;
        let psi = map.psi(&sample.state)?;
        Ok((map.phi(&psi, sample.action)?, sample.q_hat))
    })?;
    solution.env_steps = env_steps;
    solution.episodes = episodes;
    Ok(solution)
}
