//! Seeded random systems for differential checks: points uniform in the
//! unit square (kept at least `1e-6` apart so no verdict rides on rounding
//! noise) under a uniformly random permutation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::systems::{DynSystem, MetricSpace};

const MIN_SEPARATION: f64 = 1e-6;

/// One random system on `n` points, fully determined by `seed`.
pub fn random_system(n: usize, seed: u64) -> DynSystem {
    assert!(n >= 1, "random systems need at least one point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
    while points.len() < n {
        let candidate = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let too_close = points.iter().any(|&(x, y)| {
            let dx = x - candidate.0;
            let dy = y - candidate.1;
            (dx * dx + dy * dy).sqrt() < MIN_SEPARATION
        });
        if !too_close {
            points.push(candidate);
        }
    }
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(&mut rng);
    let space = MetricSpace::from_points(points).expect("separated random points are valid");
    DynSystem::new(space, map, None).expect("a shuffle is a bijection")
}

/// A deterministic batch of random systems with sizes drawn uniformly from
/// `2..=max_n`; the whole suite is a function of `seed` alone.
pub fn random_suite(count: usize, max_n: usize, seed: u64) -> Vec<DynSystem> {
    assert!(max_n >= 2, "suite systems need at least two points");
    let mut meta = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = meta.random_range(2..=max_n);
            let system_seed = meta.random::<u64>();
            random_system(n, system_seed)
        })
        .collect()
}

/// `count` resolutions at evenly spaced quantiles of the pair distances
/// (empty for a single point).
pub fn quantile_etas(space: &MetricSpace, count: usize) -> Vec<f64> {
    (1..=count)
        .filter_map(|k| space.distance_quantile(k as f64 / (count + 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_the_system() {
        let a = random_system(12, 99);
        let b = random_system(12, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = random_system(12, 1);
        let b = random_system(12, 2);
        assert_ne!(a, b);
    }

    #[test]
    fn suite_is_deterministic_and_sized() {
        let a = random_suite(10, 16, 7);
        let b = random_suite(10, 16, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.len() >= 2 && s.len() <= 16));
    }

    #[test]
    fn quantiles_are_sorted_distances() {
        let sys = random_system(20, 3);
        let etas = quantile_etas(sys.space(), 5);
        assert_eq!(etas.len(), 5);
        assert!(etas.windows(2).all(|w| w[0] <= w[1]));
    }
}
