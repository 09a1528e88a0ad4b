//! Instance generators for the test corpus and the CLI.

use crate::graph::{Graph, VertexId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn complete(n: u32) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    Graph::new(n, &pairs).unwrap()
}

pub fn cycle(n: u32) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &pairs).unwrap()
}

pub fn path(n: u32) -> Graph {
    assert!(n >= 1);
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &pairs).unwrap()
}

/// Complete bipartite graph with side A = 0..a and side B = a..a+b.
pub fn biclique(a: u32, b: u32) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..a {
        for v in 0..b {
            pairs.push((u, a + v));
        }
    }
    Graph::new(a + b, &pairs).unwrap()
}

pub fn grid(rows: u32, cols: u32) -> Graph {
    assert!(rows >= 1 && cols >= 1);
    let at = |r: u32, c: u32| r * cols + c;
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((at(r, c), at(r + 1, c)));
            }
        }
    }
    Graph::new(rows * cols, &pairs).unwrap()
}

/// Triangular prism: triangles 0-1-2 and 3-4-5 joined by a perfect matching.
pub fn prism() -> Graph {
    Graph::new(
        6,
        &[
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    )
    .unwrap()
}

pub fn petersen() -> Graph {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
        pairs.push((i, i + 5));
        pairs.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, &pairs).unwrap()
}

/// Theta graph: hubs 0 and 1 joined by three internally disjoint
/// length-2 paths through 2, 3 and 4.
pub fn theta() -> Graph {
    Graph::new(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap()
}

/// Two triangles sharing the edge 0-1 (apexes 2 and 3).
pub fn two_triangles() -> Graph {
    Graph::new(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]).unwrap()
}

/// G(n, p): every pair is an edge independently with probability p.
pub fn random_gnp(n: u32, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Graph::new(n, &pairs).unwrap()
}

/// Uniform random labeled tree via a random Pruefer sequence.
pub fn random_tree(n: u32, seed: u64) -> Graph {
    if n <= 1 {
        return Graph::new(n, &[]).unwrap();
    }
    if n == 2 {
        return Graph::new(2, &[(0, 1)]).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<u32> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1u32; n as usize];
    for &v in &seq {
        degree[v as usize] += 1;
    }
    let mut pairs = Vec::new();
    // lowest-id leaf first, the classic decode
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<u32>> = (0..n)
        .filter(|&v| degree[v as usize] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &v in &seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().unwrap();
        pairs.push((leaf, v));
        degree[v as usize] -= 1;
        if degree[v as usize] == 1 {
            leaf_heap.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().unwrap();
    let std::cmp::Reverse(b) = leaf_heap.pop().unwrap();
    pairs.push((a, b));
    Graph::new(n, &pairs).unwrap()
}

/// Connected graph on n vertices with exactly m edges: a random tree plus
/// uniformly chosen extra non-edges. Requires n-1 <= m <= n(n-1)/2.
pub fn random_connected(n: u32, m: u32, seed: u64) -> Graph {
    assert!(n >= 1);
    let max = n as u64 * (n as u64 - 1) / 2;
    assert!(m as u64 <= max && (n == 1 || m >= n - 1), "edge count out of range");
    let tree = random_tree(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e3779b97f4a7c15));
    let mut pairs: Vec<(VertexId, VertexId)> = tree.edges().to_vec();
    let mut candidates: Vec<(VertexId, VertexId)> = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if !tree.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    let mut need = (m + 1).saturating_sub(n) as usize;
    while need > 0 {
        let i = rng.gen_range(0..candidates.len());
        pairs.push(candidates.swap_remove(i));
        need -= 1;
    }
    Graph::new(n, &pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_sizes() {
        assert_eq!(complete(5).m(), 10);
        assert_eq!(cycle(7).m(), 7);
        assert_eq!(path(4).m(), 3);
        assert_eq!(biclique(3, 4).m(), 12);
        assert_eq!(grid(4, 4).m(), 24);
        assert_eq!(prism().m(), 9);
        let p = petersen();
        assert_eq!((p.n(), p.m()), (10, 15));
        assert!((0..10).all(|v| p.degree(v) == 3), "Petersen is cubic");
        assert_eq!(theta().m(), 6);
        assert_eq!(two_triangles().m(), 5);
    }

    #[test]
    fn theta_degrees() {
        let t = theta();
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.degree(1), 3);
        for v in 2..5 {
            assert_eq!(t.degree(v), 2);
        }
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let a = random_gnp(20, 0.4, 7);
        let b = random_gnp(20, 0.4, 7);
        assert_eq!(a, b);
        let c = random_gnp(20, 0.4, 8);
        assert_ne!(a, c, "different seeds should differ on 190 coin flips");
    }

    #[test]
    fn random_tree_is_a_tree() {
        for seed in 0..20 {
            let t = random_tree(12, seed);
            assert_eq!(t.m(), 11);
            assert!(t.is_connected(), "tree from seed {seed} must be connected");
        }
    }

    #[test]
    fn random_connected_hits_edge_count() {
        for seed in 0..20 {
            let g = random_connected(9, 14, seed);
            assert_eq!(g.m(), 14);
            assert!(g.is_connected());
        }
        let full = random_connected(6, 15, 3);
        assert_eq!(full.m(), 15, "can reach the complete graph");
    }
}
