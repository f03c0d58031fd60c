//! Episodic MDP abstraction with discrete actions.

use std::ops::{Deref, DerefMut};

use crate::rng::RngStream;

/// An observation vector, raw or augmented.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StateVec(pub Vec<f64>);

impl StateVec {
    pub fn new(values: Vec<f64>) -> Self {
        StateVec(values)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for StateVec {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for StateVec {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for StateVec {
    fn from(v: Vec<f64>) -> Self {
        StateVec(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub next_state: StateVec,
    pub reward: f64,
    pub done: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvSpec {
    pub name: &'static str,
    pub raw_state_dim: usize,
    pub action_count: usize,
    pub max_episode_steps: usize,
    pub min_return: f64,
    pub max_return: f64,
}

/// An episodic environment with a finite action set.
///
/// Stepping an episode that has already finished is a programming error and
/// panics.
pub trait Environment {
    fn spec(&self) -> &EnvSpec;

    /// Starts a new episode with a state drawn from the initial distribution.
    fn reset(&mut self, rng: &mut RngStream) -> StateVec;

    fn step(&mut self, action: ActionId) -> StepOutcome;

    fn is_done(&self) -> bool;

    /// Steps taken in the current episode.
    fn elapsed_steps(&self) -> usize;
}

/// Step counter and done flag shared by the concrete environments.
#[derive(Clone, Debug)]
pub struct EpisodeClock {
    steps: usize,
    done: bool,
    max_steps: usize,
}

impl EpisodeClock {
    pub fn new(max_steps: usize) -> Self {
        EpisodeClock {
            steps: 0,
            // No episode until the first reset.
            done: true,
            max_steps,
        }
    }

    pub fn restart(&mut self) {
        self.steps = 0;
        self.done = false;
    }

    /// Panics if the episode is over.
    pub fn check_active(&self, env: &str) {
        assert!(
            !self.done,
            "{env}: step() called on a finished episode; call reset() first"
        );
    }

    /// Records one step and returns the episode's done flag.
    pub fn tick(&mut self, terminal: bool) -> bool {
        self.steps += 1;
        self.done = terminal || self.steps >= self.max_steps;
        self.done
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }
}

/// Runs one episode of at most `cap` steps and returns the undiscounted sum of
/// rewards. `cap` is clamped to the environment's step limit.
pub fn rollout_return<E, F>(env: &mut E, reset_rng: &mut RngStream, cap: usize, mut act: F) -> f64
where
    E: Environment + ?Sized,
    F: FnMut(&StateVec) -> ActionId,
{
    let cap = cap.min(env.spec().max_episode_steps);
    let mut state = env.reset(reset_rng);
    let mut total = 0.0;
    for _ in 0..cap {
        let action = act(&state);
        let out = env.step(action);
        total += out.reward;
        state = out.next_state;
        if out.done {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_caps_episode() {
        let mut clock = EpisodeClock::new(3);
        assert!(clock.is_done());
        clock.restart();
        assert!(!clock.tick(false));
        assert!(!clock.tick(false));
        assert!(clock.tick(false));
        assert_eq!(clock.steps(), 3);
    }

    #[test]
    fn terminal_ends_early() {
        let mut clock = EpisodeClock::new(10);
        clock.restart();
        assert!(clock.tick(true));
    }

    #[test]
    #[should_panic(expected = "finished episode")]
    fn stepping_finished_episode_panics() {
        let mut clock = EpisodeClock::new(1);
        clock.restart();
        clock.tick(false);
        clock.check_active("test");
    }
}
