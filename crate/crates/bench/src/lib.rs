//! Shared fixtures for the criterion benchmarks.

use bgraph_core::gf2::{self, BitMatrix};
use bgraph_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_alternating(n: usize, seed: u64) -> BitMatrix {
    gf2::random_alternating(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn seeded_graph(n: usize, seed: u64) -> Graph {
    Graph::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}
