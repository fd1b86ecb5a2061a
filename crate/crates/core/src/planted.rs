//! Random graphs with known degeneracy, used as ground truth across the
//! test batteries.

use crate::graph::{Graph, VertexId};
use crate::rng::{sample_distinct, stream_rng};

/// Random graph on n vertices with degeneracy exactly `kappa`.
///
/// Vertices 0..=kappa form a clique; every later vertex attaches to `kappa`
/// distinct uniformly random earlier vertices. The attachment order is a
/// degeneracy order with back-degree exactly kappa, and the seed clique
/// rules out anything smaller, so the value is exact, not a bound.
pub fn planted_graph(n: usize, kappa: usize, seed: u64) -> Graph {
    assert!(n >= 1, "need at least one vertex");
    assert!(
        kappa + 1 <= n,
        "degeneracy {kappa} needs at least {} vertices",
        kappa + 1
    );
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for v in 1..=kappa {
        for u in 0..v {
            edges.push((u as VertexId, v as VertexId));
        }
    }
    let mut rng = stream_rng(seed, "planted", 0);
    for v in (kappa + 1)..n {
        for u in sample_distinct(&mut rng, kappa, v) {
            edges.push((u, v as VertexId));
        }
    }
    Graph::from_edges(n, edges).expect("construction stays in range")
}

/// Edge count of `planted_graph(n, kappa, _)`: the seed clique plus kappa
/// edges per later vertex.
pub fn planted_edge_count(n: usize, kappa: usize) -> u64 {
    let k = kappa as u64;
    k * (k + 1) / 2 + k * (n as u64 - k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneracy::{degeneracy_ordering, exact_degeneracy};

    #[test]
    fn degeneracy_is_exact() {
        for &(n, kappa) in &[(10usize, 1usize), (40, 3), (60, 8)] {
            for seed in 0..3 {
                let g = planted_graph(n, kappa, seed);
                assert_eq!(exact_degeneracy(&g), kappa, "n={n} kappa={kappa}");
                assert_eq!(degeneracy_ordering(&g).kappa, kappa);
                assert_eq!(g.edge_count() as u64, planted_edge_count(n, kappa));
            }
        }
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(planted_graph(1, 0, 0).edge_count(), 0);
        assert_eq!(planted_graph(5, 0, 0).edge_count(), 0);
        let clique = planted_graph(6, 5, 1);
        assert_eq!(clique.edge_count(), 15);
    }

    #[test]
    fn seed_determinism() {
        let a = planted_graph(50, 4, 9);
        let b = planted_graph(50, 4, 9);
        let c = planted_graph(50, 4, 10);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
    }
}
