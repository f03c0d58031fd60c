//! State augmentation and the block state-action feature map.
//!
//! `phi(s, a)` is the augmented state `psi(s)` written into the slice
//! `[a*d, (a+1)*d)` of an otherwise zero vector of length `|A|*d`. The policy
//! logit of action `a` is therefore the dot product of `psi(s)` with block `a`
//! of the parameter vector.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mdp::{ActionId, EnvSpec, StateVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    /// The environment observation as-is.
    Raw,
    /// `(x, ẋ, sin θ, cos θ, θ̇, sin θ̇, cos θ̇)`.
    CartpoleAug7,
    /// The six acrobot observations followed by `sin(ω2 − ω1)`.
    AcrobotAug7,
}

impl Transform {
    pub fn name(self) -> &'static str {
        match self {
            Transform::Raw => "raw",
            Transform::CartpoleAug7 => "cartpole-aug7",
            Transform::AcrobotAug7 => "acrobot-aug7",
        }
    }

    /// Output dimension for a raw observation of `raw_dim` entries, or `None`
    /// if the transform does not accept that input.
    pub fn output_dim(self, raw_dim: usize) -> Option<usize> {
        match (self, raw_dim) {
            (Transform::Raw, d) => Some(d),
            (Transform::CartpoleAug7, 4) => Some(7),
            (Transform::AcrobotAug7, 6) => Some(7),
            _ => None,
        }
    }

    pub fn apply(self, raw: &[f64]) -> Result<StateVec> {
        match self {
            Transform::Raw => {
                if !raw.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite("state"));
                }
                Ok(StateVec(raw.to_vec()))
            }
            Transform::CartpoleAug7 => augment_cartpole(raw),
            Transform::AcrobotAug7 => augment_acrobot(raw),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "raw" => Ok(Transform::Raw),
            "cartpole-aug7" => Ok(Transform::CartpoleAug7),
            "acrobot-aug7" => Ok(Transform::AcrobotAug7),
            other => Err(Error::config("transform", format!("unknown transform `{other}`"))),
        }
    }
}

fn check_input(raw: &[f64], expected: usize) -> Result<()> {
    if raw.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: raw.len(),
        });
    }
    if !raw.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("state"));
    }
    Ok(())
}

pub fn augment_cartpole(raw: &[f64]) -> Result<StateVec> {
    check_input(raw, 4)?;
    let (x, x_dot, theta, theta_dot) = (raw[0], raw[1], raw[2], raw[3]);
    let (sin_t, cos_t) = theta.sin_cos();
    let (sin_w, cos_w) = theta_dot.sin_cos();
    Ok(StateVec(vec![x, x_dot, sin_t, cos_t, theta_dot, sin_w, cos_w]))
}

pub fn augment_acrobot(raw: &[f64]) -> Result<StateVec> {
    check_input(raw, 6)?;
    let mut out = Vec::with_capacity(7);
    out.extend_from_slice(raw);
    out.push((raw[5] - raw[4]).sin());
    Ok(StateVec(out))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    transform: Transform,
    state_dim: usize,
    action_count: usize,
}

impl FeatureMap {
    pub fn new(transform: Transform, env: &EnvSpec) -> Result<Self> {
        let state_dim = transform.output_dim(env.raw_state_dim).ok_or_else(|| {
            Error::config(
                "transform",
                format!("`{}` is not valid for environment `{}`", transform, env.name),
            )
        })?;
        Ok(FeatureMap {
            transform,
            state_dim,
            action_count: env.action_count,
        })
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    /// Dimension `d` of the augmented state.
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    /// Total feature dimension `|A| * d`.
    pub fn dim(&self) -> usize {
        self.state_dim * self.action_count
    }

    /// Augmented state `psi(s)` for a raw observation.
    pub fn psi(&self, raw: &[f64]) -> Result<StateVec> {
        self.transform.apply(raw)
    }

    /// Block `a` of a length-`dim()` vector.
    pub fn block<'v>(&self, v: &'v [f64], a: ActionId) -> &'v [f64] {
        &v[a.0 * self.state_dim..(a.0 + 1) * self.state_dim]
    }

    /// `phi(s, a)` given the augmented state.
    pub fn phi(&self, psi: &[f64], a: ActionId) -> Result<Vec<f64>> {
        if psi.len() != self.state_dim {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim,
                actual: psi.len(),
            });
        }
        if a.0 >= self.action_count {
            return Err(Error::InvalidAction {
                action: a.0,
                count: self.action_count,
            });
        }
        let mut out = vec![0.0; self.dim()];
        out[a.0 * self.state_dim..(a.0 + 1) * self.state_dim].copy_from_slice(psi);
        Ok(out)
    }

    /// `phi(s, a)ᵀ theta` for every action, without building `phi`.
    pub fn logits(&self, theta: &[f64], psi: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: theta.len(),
            });
        }
        if psi.len() != self.state_dim {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim,
                actual: psi.len(),
            });
        }
        Ok(theta
            .chunks_exact(self.state_dim)
            .map(|block| block.iter().zip(psi).map(|(w, x)| w * x).sum())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{Acrobot, CartPole};
    use crate::mdp::Environment;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn toy_spec(d: usize, actions: usize) -> EnvSpec {
        EnvSpec {
            name: "toy",
            raw_state_dim: d,
            action_count: actions,
            max_episode_steps: 1,
            min_return: 0.0,
            max_return: 0.0,
        }
    }

    #[test]
    fn cartpole_aug_exact_values() {
        assert_eq!(
            augment_cartpole(&[0.0; 4]).unwrap().0,
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]
        );
        let v = augment_cartpole(&[1.0, 2.0, FRAC_PI_2, 0.0]).unwrap();
        assert_eq!(&v[..2], &[1.0, 2.0]);
        assert_abs_diff_eq!(v[2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3], 0.0, epsilon = 1e-15);
        assert_eq!(&v[4..], &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn cartpole_aug_trig_entries() {
        let v = augment_cartpole(&[0.1, -0.5, 0.2, 1.3]).unwrap();
        assert_eq!(v[0], 0.1);
        assert_eq!(v[1], -0.5);
        assert_abs_diff_eq!(v[2], 0.198_669_330_795_061_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3], 0.980_066_577_841_241_6, epsilon = 1e-15);
        assert_eq!(v[4], 1.3);
        assert_abs_diff_eq!(v[5], 0.963_558_185_417_192_9, epsilon = 1e-15);
        assert_abs_diff_eq!(v[6], 0.267_498_828_624_587_2, epsilon = 1e-15);
    }

    #[test]
    fn acrobot_aug_velocity_difference() {
        let base = [1.0, 0.0, 1.0, 0.0];
        let with = |w1: f64, w2: f64| {
            let mut raw = base.to_vec();
            raw.extend([w1, w2]);
            augment_acrobot(&raw).unwrap()
        };
        assert_eq!(with(0.7, 0.7)[6], 0.0);
        assert_abs_diff_eq!(with(0.0, FRAC_PI_2)[6], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(with(1.0, -0.5)[6], -0.997_494_986_604_054_5, epsilon = 1e-15);
        assert_eq!(&with(0.3, 0.4)[..6], &[1.0, 0.0, 1.0, 0.0, 0.3, 0.4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            augment_cartpole(&[0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            augment_acrobot(&[0.0; 4]),
            Err(Error::DimensionMismatch { expected: 6, actual: 4 })
        ));
        assert!(Transform::Raw.apply(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn block_placement() {
        let map = FeatureMap::new(Transform::Raw, &toy_spec(2, 2)).unwrap();
        assert_eq!(map.phi(&[5.0, 7.0], ActionId(0)).unwrap(), vec![5.0, 7.0, 0.0, 0.0]);
        assert_eq!(map.phi(&[5.0, 7.0], ActionId(1)).unwrap(), vec![0.0, 0.0, 5.0, 7.0]);
        assert!(map.phi(&[5.0], ActionId(0)).is_err());
        assert!(map.phi(&[5.0, 7.0], ActionId(2)).is_err());
    }

    #[test]
    fn benchmark_dimensions() {
        let cp = FeatureMap::new(Transform::CartpoleAug7, CartPole::new().spec()).unwrap();
        assert_eq!(cp.dim(), 14);
        let ab = FeatureMap::new(Transform::AcrobotAug7, Acrobot::new().spec()).unwrap();
        assert_eq!(ab.dim(), 21);
        let ab_raw = FeatureMap::new(Transform::Raw, Acrobot::new().spec()).unwrap();
        assert_eq!(ab_raw.dim(), 18);
        assert!(FeatureMap::new(Transform::AcrobotAug7, CartPole::new().spec()).is_err());
        assert!(FeatureMap::new(Transform::CartpoleAug7, Acrobot::new().spec()).is_err());
    }

    #[test]
    fn transform_names_round_trip() {
        for t in [Transform::Raw, Transform::CartpoleAug7, Transform::AcrobotAug7] {
            assert_eq!(t.name().parse::<Transform>().unwrap(), t);
        }
        assert!("aug7".parse::<Transform>().is_err());
    }

    proptest! {
        #[test]
        fn phi_block_properties(
            psi in prop::collection::vec(-100.0f64..100.0, 1..8),
            actions in 2usize..5,
            scale in -3.0f64..3.0,
        ) {
            let d = psi.len();
            let map = FeatureMap::new(Transform::Raw, &toy_spec(d, actions)).unwrap();
            let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for a in 0..actions {
                let f = map.phi(&psi, ActionId(a)).unwrap();
                prop_assert_eq!(f.len(), d * actions);
                prop_assert_eq!(map.block(&f, ActionId(a)), &psi[..]);
                prop_assert_eq!(norm(&f), norm(&psi));
                let scaled: Vec<f64> = psi.iter().map(|x| scale * x).collect();
                let fs = map.phi(&scaled, ActionId(a)).unwrap();
                for (x, y) in f.iter().zip(&fs) {
                    prop_assert_eq!(scale * x, *y);
                }
                for b in 0..actions {
                    if b != a {
                        let g = map.phi(&psi, ActionId(b)).unwrap();
                        let dot: f64 = f.iter().zip(&g).map(|(x, y)| x * y).sum();
                        prop_assert_eq!(dot, 0.0);
                    }
                }
            }
        }
    }
}
