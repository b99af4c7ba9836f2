//! Fixed, seeded instances shared by the benchmarks.

use mwcs_core::generate::sparse;
use mwcs_core::WeightedGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sparse graph with `n` nodes, `2n` edges and a 30% share of positive
/// nodes, weights in `[-10, 10)`.
pub fn sparse_instance(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sparse(&mut rng, n, 2 * n, 0.3, -10.0, 10.0)
}
