//! Cart-pole balancing with explicit Euler integration.

use crate::mdp::{ActionId, EnvSpec, Environment, EpisodeClock, StateVec, StepOutcome};
use crate::rng::RngStream;

pub const MAX_EPISODE_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn to_vec(self) -> StateVec {
        StateVec(vec![self.x, self.x_dot, self.theta, self.theta_dot])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartPoleConstants {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub half_length: f64,
    pub force_mag: f64,
    pub tau: f64,
    pub theta_threshold: f64,
    pub x_threshold: f64,
    pub init_bound: f64,
}

impl Default for CartPoleConstants {
    fn default() -> Self {
        CartPoleConstants {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_length: 0.5,
            force_mag: 10.0,
            tau: 0.02,
            theta_threshold: 12.0 * 2.0 * std::f64::consts::PI / 360.0,
            x_threshold: 2.4,
            init_bound: 0.05,
        }
    }
}

impl CartPoleConstants {
    /// One Euler step of the cart-pole equations of motion.
    /// Action 0 pushes left, anything else pushes right.
    pub fn integrate(&self, s: CartPoleState, action: ActionId) -> CartPoleState {
        let force = if action.0 == 1 { self.force_mag } else { -self.force_mag };
        let total_mass = self.cart_mass + self.pole_mass;
        let polemass_length = self.pole_mass * self.half_length;
        let (sin_t, cos_t) = s.theta.sin_cos();

        let temp = (force + polemass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
        let theta_acc = (self.gravity * sin_t - cos_t * temp)
            / (self.half_length * (4.0 / 3.0 - self.pole_mass * cos_t * cos_t / total_mass));
        let x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

        CartPoleState {
            x: s.x + self.tau * s.x_dot,
            x_dot: s.x_dot + self.tau * x_acc,
            theta: s.theta + self.tau * s.theta_dot,
            theta_dot: s.theta_dot + self.tau * theta_acc,
        }
    }

    /// Failure: the cart left the track or the pole reached the angle limit.
    pub fn failed(&self, s: &CartPoleState) -> bool {
        s.x.abs() >= self.x_threshold || s.theta.abs() >= self.theta_threshold
    }
}

#[derive(Clone, Debug)]
pub struct CartPole {
    consts: CartPoleConstants,
    spec: EnvSpec,
    state: CartPoleState,
    clock: EpisodeClock,
}

impl Default for CartPole {
    fn default() -> Self {
        Self::new()
    }
}

impl CartPole {
    pub fn new() -> Self {
        CartPole {
            consts: CartPoleConstants::default(),
            spec: EnvSpec {
                name: "cartpole",
                raw_state_dim: 4,
                action_count: 2,
                max_episode_steps: MAX_EPISODE_STEPS,
                min_return: 1.0,
                max_return: MAX_EPISODE_STEPS as f64,
            },
            state: CartPoleState::default(),
            clock: EpisodeClock::new(MAX_EPISODE_STEPS),
        }
    }

    pub fn constants(&self) -> &CartPoleConstants {
        &self.consts
    }

    pub fn state(&self) -> CartPoleState {
        self.state
    }

    /// Starts an episode from an explicit state.
    pub fn reset_to(&mut self, state: CartPoleState) -> StateVec {
        self.state = state;
        self.clock.restart();
        state.to_vec()
    }
}

impl Environment for CartPole {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: &mut RngStream) -> StateVec {
        let b = self.consts.init_bound;
        let state = CartPoleState {
            x: rng.uniform_in(-b, b),
            x_dot: rng.uniform_in(-b, b),
            theta: rng.uniform_in(-b, b),
            theta_dot: rng.uniform_in(-b, b),
        };
        self.reset_to(state)
    }

    fn step(&mut self, action: ActionId) -> StepOutcome {
        self.clock.check_active("cartpole");
        assert!(action.0 < 2, "cartpole: invalid action {}", action.0);
        self.state = self.consts.integrate(self.state, action);
        let done = self.clock.tick(self.consts.failed(&self.state));
        StepOutcome {
            next_state: self.state.to_vec(),
            reward: 1.0,
            done,
        }
    }

    fn is_done(&self) -> bool {
        self.clock.is_done()
    }

    fn elapsed_steps(&self) -> usize {
        self.clock.steps()
    }
}
