//! Synthetic environments and exact oracles shared by the integration tests.
#![allow(dead_code)]

use lfa_npg::features::{FeatureMap, Transform};
use lfa_npg::mdp::{ActionId, EnvSpec, Environment, StateVec, StepOutcome};
use lfa_npg::policy::{action_distribution, PolicyParams};
use lfa_npg::rng::RngStream;
use nalgebra::{DMatrix, DVector};

/// A never-terminating two-state, two-action MDP observed as one-hot vectors.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    spec: EnvSpec,
    /// `transition[s][a]` = probability of moving to state 1.
    pub to_one: [[f64; 2]; 2],
    pub reward: [[f64; 2]; 2],
    /// Probability that a reset lands in state 0.
    pub start_zero: f64,
    state: usize,
    steps: usize,
    rng: RngStream,
}

impl TabularMdp {
    pub fn new(seed: u64) -> Self {
        TabularMdp {
            spec: EnvSpec {
                name: "tabular",
                raw_state_dim: 2,
                action_count: 2,
                max_episode_steps: usize::MAX,
                min_return: f64::NEG_INFINITY,
                max_return: f64::INFINITY,
            },
            to_one: [[0.2, 0.7], [0.6, 0.1]],
            reward: [[1.0, -0.5], [2.0, 0.25]],
            start_zero: 0.5,
            state: 0,
            steps: 0,
            rng: RngStream::new(seed, "tabular-transitions"),
        }
    }

    fn obs(&self) -> StateVec {
        let mut v = vec![0.0; 2];
        v[self.state] = 1.0;
        StateVec(v)
    }

    pub fn state_of(obs: &[f64]) -> usize {
        if obs[0] == 1.0 {
            0
        } else {
            1
        }
    }

    pub fn feature_map(&self) -> FeatureMap {
        FeatureMap::new(Transform::Raw, &self.spec).unwrap()
    }

    /// Exact discounted `Q[s][a]` under `theta`, from `(I - γ P Π) q = r`.
    pub fn exact_q(&self, theta: &PolicyParams, gamma: f64) -> [[f64; 2]; 2] {
        let map = self.feature_map();
        let pi: Vec<Vec<f64>> = (0..2)
            .map(|s| {
                let mut psi = vec![0.0; 2];
                psi[s] = 1.0;
                action_distribution(theta, &map, &psi).unwrap()
            })
            .collect();
        let idx = |s: usize, a: usize| 2 * s + a;
        let mut m = DMatrix::<f64>::identity(4, 4);
        let mut r = DVector::<f64>::zeros(4);
        for s in 0..2 {
            for a in 0..2 {
                r[idx(s, a)] = self.reward[s][a];
                for s2 in 0..2 {
                    let p = if s2 == 1 { self.to_one[s][a] } else { 1.0 - self.to_one[s][a] };
                    for a2 in 0..2 {
                        m[(idx(s, a), idx(s2, a2))] -= gamma * p * pi[s2][a2];
                    }
                }
            }
        }
        let q = m.lu().solve(&r).unwrap();
        [[q[0], q[1]], [q[2], q[3]]]
    }
}

impl Environment for TabularMdp {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: &mut RngStream) -> StateVec {
        self.state = if rng.bernoulli(self.start_zero) { 0 } else { 1 };
        self.steps = 0;
        self.obs()
    }

    fn step(&mut self, action: ActionId) -> StepOutcome {
        let reward = self.reward[self.state][action.0];
        self.state = if self.rng.bernoulli(self.to_one[self.state][action.0]) { 1 } else { 0 };
        self.steps += 1;
        StepOutcome {
            next_state: self.obs(),
            reward,
            done: false,
        }
    }

    fn is_done(&self) -> bool {
        false
    }

    fn elapsed_steps(&self) -> usize {
        self.steps
    }
}

/// Least-squares solution of `min_w Σ (w·φ_i − q_i)²` via the normal equations.
pub fn normal_equations(phis: &[Vec<f64>], qs: &[f64]) -> Vec<f64> {
    let d = phis[0].len();
    let x = DMatrix::from_fn(phis.len(), d, |i, j| phis[i][j]);
    let y = DVector::from_column_slice(qs);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    xtx.cholesky().expect("full-rank design").solve(&xty).iter().copied().collect()
}

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median computed independently of the library: sort, then pick.
pub fn sorted_median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
