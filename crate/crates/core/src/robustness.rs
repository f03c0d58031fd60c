//! Multiplicative observation noise.
//!
//! Each observed element is scaled by an independent `z ~ U(1 - ζ, 1 + ζ)`.
//! Only the observation handed to the agent changes; the wrapped environment's
//! physical state evolves exactly as it would without the wrapper.

use crate::error::{Error, Result};
use crate::mdp::{ActionId, EnvSpec, Environment, StateVec, StepOutcome};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    zeta: f64,
}

impl NoiseSpec {
    pub fn new(zeta: f64) -> Result<Self> {
        if !zeta.is_finite() || zeta < 0.0 {
            return Err(Error::config("zeta", format!("noise level must be finite and >= 0, got {zeta}")));
        }
        Ok(NoiseSpec { zeta })
    }

    pub fn zeta(self) -> f64 {
        self.zeta
    }

    pub fn is_identity(self) -> bool {
        self.zeta == 0.0
    }
}

/// Scales every entry by its own uniform factor. At ζ = 0 the input is
/// returned unchanged and no random numbers are drawn.
pub fn perturb(raw: &StateVec, noise: NoiseSpec, rng: &mut RngStream) -> StateVec {
    if noise.is_identity() {
        return raw.clone();
    }
    let z = noise.zeta;
    StateVec(raw.iter().map(|x| x * rng.uniform_in(1.0 - z, 1.0 + z)).collect())
}

/// Environment wrapper that perturbs every observation it emits.
#[derive(Clone, Debug)]
pub struct Noisy<E> {
    inner: E,
    noise: NoiseSpec,
    rng: RngStream,
}

impl<E: Environment> Noisy<E> {
    pub fn new(inner: E, noise: NoiseSpec, rng: RngStream) -> Self {
        Noisy { inner, noise, rng }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}

impl<E: Environment> Environment for Noisy<E> {
    fn spec(&self) -> &EnvSpec {
        self.inner.spec()
    }

    fn reset(&mut self, rng: &mut RngStream) -> StateVec {
        let obs = self.inner.reset(rng);
        perturb(&obs, self.noise, &mut self.rng)
    }

    fn step(&mut self, action: ActionId) -> StepOutcome {
        let mut out = self.inner.step(action);
        out.next_state = perturb(&out.next_state, self.noise, &mut self.rng);
        out
    }

    fn is_done(&self) -> bool {
        self.inner.is_done()
    }

    fn elapsed_steps(&self) -> usize {
        self.inner.elapsed_steps()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{Acrobot, CartPole};

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = RngStream::new(0, "noise");
        let s = StateVec(vec![1.5, -2.0, 0.0, 1e-300]);
        let out = perturb(&s, NoiseSpec::new(0.0).unwrap(), &mut rng);
        assert_eq!(out, s);
    }

    #[test]
    fn half_noise_stays_in_band() {
        let mut rng = RngStream::new(1, "noise");
        let s = StateVec(vec![1.5, -2.0, 0.3, -0.01]);
        let noise = NoiseSpec::new(0.5).unwrap();
        for _ in 0..10_000 {
            let out = perturb(&s, noise, &mut rng);
            for (x, y) in s.iter().zip(out.iter()) {
                assert!(y.abs() >= 0.5 * x.abs() && y.abs() <= 1.5 * x.abs());
                assert_eq!(x.signum(), y.signum());
            }
        }
    }

    #[test]
    fn ratio_mean_is_one() {
        let mut rng = RngStream::new(2, "noise");
        let noise = NoiseSpec::new(0.3).unwrap();
        let s = StateVec(vec![2.0]);
        let n = 100_000;
        let mean = (0..n).map(|_| perturb(&s, noise, &mut rng)[0] / 2.0).sum::<f64>() / n as f64;
        // U(0.7, 1.3) has standard deviation 0.6 / sqrt(12).
        let se = 0.6 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn rejects_negative_zeta() {
        assert!(NoiseSpec::new(-0.1).is_err());
        assert!(NoiseSpec::new(f64::NAN).is_err());
    }

    #[test]
    fn elements_draw_independent_factors() {
        let mut rng = RngStream::new(3, "noise");
        let noise = NoiseSpec::new(0.5).unwrap();
        let s = StateVec(vec![1.0, 1.0]);
        let n = 100_000;
        let draws: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let o = perturb(&s, noise, &mut rng);
                (o[0], o[1])
            })
            .collect();
        let (mx, my) = draws.iter().fold((0.0, 0.0), |acc, d| (acc.0 + d.0, acc.1 + d.1));
        let (mx, my) = (mx / n as f64, my / n as f64);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &draws {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        let r = sxy / (sxx * syy).sqrt();
        // Under independence r has standard error about 1/sqrt(n).
        assert!(r.abs() < 3.0 / (n as f64).sqrt(), "r = {r}");
    }

    #[test]
    fn wrapped_dynamics_unchanged() {
        let actions: Vec<usize> = (0..150).map(|i| (i * 7 + i / 3) % 3).collect();
        let mut plain = Acrobot::new();
        let mut noisy = Noisy::new(Acrobot::new(), NoiseSpec::new(0.8).unwrap(), RngStream::new(4, "noise"));
        plain.reset(&mut RngStream::new(4, "reset"));
        noisy.reset(&mut RngStream::new(4, "reset"));
        for &a in &actions {
            let p = plain.step(ActionId(a));
            let n = noisy.step(ActionId(a));
            assert_eq!(plain.state(), noisy.inner().state());
            assert_eq!(p.reward, n.reward);
            assert_eq!(p.done, n.done);
            if p.done {
                break;
            }
        }

        let mut plain = CartPole::new();
        let mut noisy = Noisy::new(CartPole::new(), NoiseSpec::new(3.0).unwrap(), RngStream::new(4, "noise"));
        plain.reset(&mut RngStream::new(5, "reset"));
        noisy.reset(&mut RngStream::new(5, "reset"));
        for &a in &actions {
            let p = plain.step(ActionId(a % 2));
            noisy.step(ActionId(a % 2));
            assert_eq!(plain.state(), noisy.inner().state());
            if p.done {
                break;
            }
        }
    }
}
