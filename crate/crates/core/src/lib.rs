//! Natural policy gradient with linear function approximation (LFA-NPG).
//!
//! The crate bundles everything needed to train log-linear softmax policies
//! on discrete-action classic-control tasks:
//!
//! - [`mdp`]: the episodic environment abstraction and rollout helpers.
//! - [`envs`]: CartPole and Acrobot dynamics written from scratch.
//! - [`features`]: augmented state transforms and the block state-action map.
//! - [`policy`]: softmax action distributions, sampling and checkpoints.
//! - [`npg`]: the occupancy sampler, projected-SGD critic, actor update and
//!   training loop.
//! - [`robustness`]: multiplicative observation noise.
//! - [`harness`]: configs, seeded runs, noise sweeps and CSV output.

pub mod envs;
pub mod error;
pub mod features;
pub mod harness;
pub mod mdp;
pub mod npg;
pub mod policy;
pub mod rng;
pub mod robustness;

pub use error::{Error, Result};
pub use mdp::{ActionId, EnvSpec, Environment, StateVec, StepOutcome};
pub use rng::{RngStream, Streams};
