//! Classic-control benchmark environments.

pub mod acrobot;
pub mod cartpole;

use std::fmt;
use std::str::FromStr;

pub use acrobot::{goal_height_reached, Acrobot, AcrobotState};
pub use cartpole::{CartPole, CartPoleState};

use crate::error::Error;
use crate::mdp::{ActionId, EnvSpec, Environment, StateVec, StepOutcome};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvKind {
    CartPole,
    Acrobot,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::CartPole => "cartpole",
            EnvKind::Acrobot => "acrobot",
        }
    }

    pub fn spec(self) -> EnvSpec {
        self.build().spec().clone()
    }

    pub fn build(self) -> AnyEnv {
        match self {
            EnvKind::CartPole => AnyEnv::CartPole(CartPole::new()),
            EnvKind::Acrobot => AnyEnv::Acrobot(Acrobot::new()),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "cartpole" => Ok(EnvKind::CartPole),
            "acrobot" => Ok(EnvKind::Acrobot),
            other => Err(Error::config("env", format!("unknown environment `{other}`"))),
        }
    }
}

/// Either benchmark behind one concrete type.
#[derive(Clone, Debug)]
pub enum AnyEnv {
    CartPole(CartPole),
    Acrobot(Acrobot),
}

impl Environment for AnyEnv {
    fn spec(&self) -> &EnvSpec {
        match self {
            AnyEnv::CartPole(e) => e.spec(),
            AnyEnv::Acrobot(e) => e.spec(),
        }
    }

    fn reset(&mut self, rng: &mut RngStream) -> StateVec {
        match self {
            AnyEnv::CartPole(e) => e.reset(rng),
            AnyEnv::Acrobot(e) => e.reset(rng),
        }
    }

    fn step(&mut self, action: ActionId) -> StepOutcome {
        match self {
            AnyEnv::CartPole(e) => e.step(action),
            AnyEnv::Acrobot(e) => e.step(action),
        }
    }

    fn is_done(&self) -> bool {
        match self {
            AnyEnv::CartPole(e) => e.is_done(),
            AnyEnv::Acrobot(e) => e.is_done(),
        }
    }

    fn elapsed_steps(&self) -> usize {
        match self {
            AnyEnv::CartPole(e) => e.elapsed_steps(),
            AnyEnv::Acrobot(e) => e.elapsed_steps(),
        }
    }
}
