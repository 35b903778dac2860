//! Seeded sampling of random test tensors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::even_rank::is_nonsingular;
use crate::tensor::{random_symmetric_from, SymTensor};
use crate::ExactScalar;

/// Numerator and denominator bound used by the identity suites.
pub const SUITE_BOUND: u32 = 5;

const MAX_REDRAWS: usize = 64;

/// A ChaCha8 stream handing out random exact tensors in a fixed order.
pub struct Sampler {
    rng: ChaCha8Rng,
    bound: u32,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::with_bound(seed, SUITE_BOUND)
    }

    pub fn with_bound(seed: u64, bound: u32) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }

    pub fn symmetric(&mut self, rank: usize, dim: usize) -> Result<SymTensor<ExactScalar>> {
        random_symmetric_from(&mut self.rng, rank, dim, self.bound)
    }

    /// Next even-rank tensor with nonzero determinant.
    pub fn nonsingular(&mut self, rank: usize, dim: usize) -> Result<SymTensor<ExactScalar>> {
        for _ in 0..MAX_REDRAWS {
            let t = self.symmetric(rank, dim)?;
            if is_nonsingular(&t) {
                return Ok(t);
            }
        }
        Err(crate::Error::AllSamplesDegenerate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::even_rank::det_even;
    use num_traits::Zero;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Sampler::new(9);
        let mut b = Sampler::new(9);
        for _ in 0..3 {
            assert_eq!(a.symmetric(4, 2).unwrap(), b.symmetric(4, 2).unwrap());
        }
    }

    #[test]
    fn nonsingular_draws() {
        let mut s = Sampler::new(1);
        for _ in 0..5 {
            assert!(!det_even(&s.nonsingular(2, 3).unwrap()).unwrap().is_zero());
        }
    }
}
