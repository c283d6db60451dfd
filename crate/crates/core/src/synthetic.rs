//! Seeded random inputs for tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::simmatrix::{pearson_similarity, Dataset, SimilarityMatrix};

/// Labelled series from a latent factor model: object `i` belongs to class
/// `i % classes` and is `a * factor[class] + noise`, with loading `a` drawn
/// from `[0.3, 1)` and unit Gaussian noise.
pub fn latent_factor_dataset(n: usize, classes: usize, len: usize, seed: u64) -> Dataset {
    assert!(classes > 0, "need at least one class");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = move |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    let factors: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..len).map(|_| normal(&mut rng)).collect())
        .collect();
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let series = labels
        .iter()
        .map(|&c| {
            let a: f64 = rng.random_range(0.3..1.0);
            factors[c].iter().map(|&f| a * f + normal(&mut rng)).collect()
        })
        .collect();
    Dataset::new(labels, series).expect("generated rows are rectangular and n >= 4")
}

/// Pearson similarity of a 5-class, length-64 [`latent_factor_dataset`].
pub fn random_similarity(n: usize, seed: u64) -> SimilarityMatrix {
    pearson_similarity(&latent_factor_dataset(n, 5, 64, seed))
}

/// Off-diagonal entries drawn independently and uniformly from `[-1, 1)`.
pub fn uniform_similarity(n: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.random_range(-1.0..1.0);
            values[i * n + j] = x;
            values[j * n + i] = x;
        }
    }
    SimilarityMatrix::new(n, values).expect("entries lie in [-1, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(uniform_similarity(20, 3), uniform_similarity(20, 3));
        assert_ne!(uniform_similarity(20, 3), uniform_similarity(20, 4));
        assert_eq!(random_similarity(30, 1), random_similarity(30, 1));
    }

    #[test]
    fn factor_classes_cycle() {
        let d = latent_factor_dataset(10, 3, 8, 0);
        assert_eq!(d.labels(), [0, 1, 2, 0, 1, 2, 0, 1, 2, 0]);
        assert_eq!(d.series_len(), 8);
        assert_eq!(d.class_count(), 3);
    }
}
