//! Two-link acrobot swing-up, integrated with classical RK4 over each
//! control interval.

use std::f64::consts::PI;

use crate::mdp::{ActionId, EnvSpec, Environment, EpisodeClock, StateVec, StepOutcome};
use crate::rng::RngStream;

pub const MAX_EPISODE_STEPS: usize = 500;

/// Torque applied for actions 0, 1, 2.
pub const TORQUES: [f64; 3] = [-1.0, 0.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct AcrobotState {
    pub theta1: f64,
    /// Angle of the second link relative to the first.
    pub theta2: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl AcrobotState {
    /// `(cos θ1, sin θ1, cos θ2, sin θ2, ω1, ω2)`.
    pub fn observation(&self) -> StateVec {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        StateVec(vec![c1, s1, c2, s2, self.omega1, self.omega2])
    }
}

/// Tip of the lower link above the pivot by more than one link length.
pub fn goal_height_reached(s: &AcrobotState) -> bool {
    -s.theta1.cos() - (s.theta1 + s.theta2).cos() > 1.0
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcrobotConstants {
    pub link_mass_1: f64,
    pub link_mass_2: f64,
    pub link_length_1: f64,
    pub link_com_1: f64,
    pub link_com_2: f64,
    pub link_moi: f64,
    pub gravity: f64,
    pub dt: f64,
    pub max_vel_1: f64,
    pub max_vel_2: f64,
    pub init_bound: f64,
}

impl Default for AcrobotConstants {
    fn default() -> Self {
        AcrobotConstants {
            link_mass_1: 1.0,
            link_mass_2: 1.0,
            link_length_1: 1.0,
            link_com_1: 0.5,
            link_com_2: 0.5,
            link_moi: 1.0,
            gravity: 9.8,
            dt: 0.2,
            max_vel_1: 4.0 * PI,
            max_vel_2: 9.0 * PI,
            init_bound: 0.1,
        }
    }
}

impl AcrobotConstants {
    /// Time derivative of `(θ1, θ2, ω1, ω2)` under joint torque `torque`.
    fn derivatives(&self, s: [f64; 4], torque: f64) -> [f64; 4] {
        let (m1, m2) = (self.link_mass_1, self.link_mass_2);
        let l1 = self.link_length_1;
        let (lc1, lc2) = (self.link_com_1, self.link_com_2);
        let (i1, i2) = (self.link_moi, self.link_moi);
        let g = self.gravity;
        let [theta1, theta2, dtheta1, dtheta2] = s;
        let (sin2, cos2) = theta2.sin_cos();

        let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * cos2) + i1 + i2;
        let d2 = m2 * (lc2 * lc2 + l1 * lc2 * cos2) + i2;
        // cos(x - π/2) written as sin(x) so the hanging rest state is an exact fixed point.
        let phi2 = m2 * lc2 * g * (theta1 + theta2).sin();
        let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * sin2
            - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * sin2
            + (m1 * lc1 + m2 * l1) * g * theta1.sin()
            + phi2;
        let ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * sin2 - phi2)
            / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
        let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
        [dtheta1, dtheta2, ddtheta1, ddtheta2]
    }

    /// One RK4 step over the control interval, followed by angle wrapping and
    /// velocity clipping.
    pub fn integrate(&self, s: AcrobotState, action: ActionId) -> AcrobotState {
        let torque = TORQUES[action.0];
        let y0 = [s.theta1, s.theta2, s.omega1, s.omega2];
        let h = self.dt;
        let add = |y: [f64; 4], k: [f64; 4], c: f64| -> [f64; 4] {
            [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2], y[3] + c * k[3]]
        };
        let k1 = self.derivatives(y0, torque);
        let k2 = self.derivatives(add(y0, k1, h / 2.0), torque);
        let k3 = self.derivatives(add(y0, k2, h / 2.0), torque);
        let k4 = self.derivatives(add(y0, k3, h), torque);
        let mut y = y0;
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        AcrobotState {
            theta1: wrap_angle(y[0]),
            theta2: wrap_angle(y[1]),
            omega1: y[2].clamp(-self.max_vel_1, self.max_vel_1),
            omega2: y[3].clamp(-self.max_vel_2, self.max_vel_2),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Acrobot {
    consts: AcrobotConstants,
    spec: EnvSpec,
    state: AcrobotState,
    clock: EpisodeClock,
}

impl Default for Acrobot {
    fn default() -> Self {
        Self::new()
    }
}

impl Acrobot {
    pub fn new() -> Self {
        Acrobot {
            consts: AcrobotConstants::default(),
            spec: EnvSpec {
                name: "acrobot",
                raw_state_dim: 6,
                action_count: 3,
                max_episode_steps: MAX_EPISODE_STEPS,
                min_return: -(MAX_EPISODE_STEPS as f64),
                max_return: 0.0,
            },
            state: AcrobotState::default(),
            clock: EpisodeClock::new(MAX_EPISODE_STEPS),
        }
    }

    pub fn constants(&self) -> &AcrobotConstants {
        &self.consts
    }

    pub fn state(&self) -> AcrobotState {
        self.state
    }

    pub fn reset_to(&mut self, state: AcrobotState) -> StateVec {
        self.state = state;
        self.clock.restart();
        state.observation()
    }
}

impl Environment for Acrobot {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: &mut RngStream) -> StateVec {
        let b = self.consts.init_bound;
        let state = AcrobotState {
            theta1: rng.uniform_in(-b, b),
            theta2: rng.uniform_in(-b, b),
            omega1: rng.uniform_in(-b, b),
            omega2: rng.uniform_in(-b, b),
        };
        self.reset_to(state)
    }

    fn step(&mut self, action: ActionId) -> StepOutcome {
        self.clock.check_active("acrobot");
        assert!(action.0 < 3, "acrobot: invalid action {}", action.0);
        self.state = self.consts.integrate(self.state, action);
        let goal = goal_height_reached(&self.state);
        let done = self.clock.tick(goal);
        StepOutcome {
            next_state: self.state.observation(),
            reward: if goal { 0.0 } else { -1.0 },
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
