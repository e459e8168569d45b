use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{config, Result};
use crate::geometry::Vec3;

/// Spatially correlated standard-normal field over 3D positions, built as a
/// sum of sinusoids.
///
/// Wave vectors are drawn from the spectral density of the exponential
/// covariance `exp(-d / d_corr)` (a 3D Cauchy distribution with scale
/// `1 / d_corr`), so every sinusoid already has the target correlation and
/// the sum only controls how Gaussian the marginal is.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedField {
    seed: u64,
    decorrelation_distance: f64,
    waves: Vec<(Vec3, f64)>,
}

impl CorrelatedField {
    pub fn new(seed: u64, decorrelation_distance: f64, components: usize) -> Result<Self> {
        if !(decorrelation_distance > 0.0 && decorrelation_distance.is_finite()) {
            return Err(config!("decorrelation distance must be > 0, got {decorrelation_distance}"));
        }
        if components == 0 {
            return Err(config!("a correlated field needs at least one sinusoid"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let waves = (0..components)
            .map(|_| {
                let z = Vec3::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                );
                let w: f64 = StandardNormal.sample(&mut rng);
                let k = z / (w.abs().max(f64::MIN_POSITIVE) * decorrelation_distance);
                (k, rng.gen::<f64>() * TAU)
            })
            .collect();
        Ok(CorrelatedField { seed, decorrelation_distance, waves })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn decorrelation_distance(&self) -> f64 {
        self.decorrelation_distance
    }

    pub fn components(&self) -> usize {
        self.waves.len()
    }

    /// Field value at `position`.
    pub fn value(&self, position: Vec3) -> f64 {
        let scale = (2.0 / self.waves.len() as f64).sqrt();
        scale * self.waves.iter().map(|(k, phi)| (k.dot(position) + phi).cos()).sum::<f64>()
    }
}

/// Evaluates `field` at `position`.
pub fn correlated_gaussian(field: &CorrelatedField, position: Vec3) -> f64 {
    field.value(position)
}
