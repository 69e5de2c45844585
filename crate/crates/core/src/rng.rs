//! Seeded randomness. Every generator in the crate is ChaCha8 seeded through
//! `seed_from_u64`, so a seed reproduces the same sets on every platform.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct integers drawn uniformly from `lo..lo + span`, sorted.
///
/// Panics if `count > span`.
pub fn distinct_in<R: Rng + ?Sized>(rng: &mut R, count: usize, lo: i64, span: usize) -> Vec<i64> {
    let mut out: Vec<i64> = index::sample(rng, span, count)
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = distinct_in(&mut seeded(7), 10, -50, 100);
        let b = distinct_in(&mut seeded(7), 10, -50, 100);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|&x| (-50..50).contains(&x)));
        assert_ne!(a, distinct_in(&mut seeded(8), 10, -50, 100));
    }
}
