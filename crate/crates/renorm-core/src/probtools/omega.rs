//! Reproducible Bernoulli sign fields.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// ω ∈ {±1}^sites. Site i takes the top bit of 32-bit word i of the ChaCha8
/// keystream keyed by `seed` (via `seed_from_u64`), so any site can be
/// regenerated on its own and the field does not depend on platform or
/// thread count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaField {
    pub seed: u64,
    pub values: Vec<i8>,
}

impl OmegaField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&w| w as f64).collect()
    }
}

fn sign(word: u32) -> i8 {
    if word >> 31 == 1 {
        1
    } else {
        -1
    }
}

pub fn sample_omega(seed: u64, sites: usize) -> OmegaField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OmegaField { seed, values: (0..sites).map(|_| sign(rng.next_u32())).collect() }
}

/// ω at a single site, by seeking the keystream.
pub fn omega_at(seed: u64, site: u64) -> i8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(site as u128);
    sign(rng.next_u32())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_stream() {
        let f = sample_omega(11, 300);
        for i in [0usize, 1, 17, 299] {
            assert_eq!(omega_at(11, i as u64), f.values[i]);
        }
    }
}
