//! Inputs shared by the criterion benchmarks.

use limitrank_core::corpus::{random_corpus, CorpusConfig};
use limitrank_core::{GroupExpr, IntMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A dense `rows × cols` matrix with entries in `-bound..=bound`.
pub fn random_matrix(seed: u64, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows(&data, cols)
}

/// Non-abelian corpus trees, as swept by the rank-inequality check.
pub fn sweep_corpus(seed: u64, count: usize) -> Vec<GroupExpr> {
    random_corpus(seed, count * 2, CorpusConfig::default())
        .into_iter()
        .filter(|e| !e.is_abelian())
        .take(count)
        .collect()
}
