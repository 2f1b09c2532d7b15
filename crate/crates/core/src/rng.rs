//! Reproducible random streams keyed by `(seed, index)`.
//!
//! Every logical unit of work (a Monte Carlo chunk, a simulation trial, a
//! search restart) draws from its own ChaCha stream, so results do not depend
//! on evaluation order or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for unit `index` under master `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derived seed for restart `index`, used where a sub-component takes a plain seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    stream(seed, index ^ 0x5EED_0000_0000_0000).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, 3), |r, _| Some(r.gen())).collect();
        let b: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, 3), |r, _| Some(r.gen())).collect();
        let c: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, 4), |r, _| Some(r.gen())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }
}
