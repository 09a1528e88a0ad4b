//! Connectivity tests and the exhaustive small-graph separator oracle.

use crate::bits::Bitset;
use crate::graph::{EdgeId, Graph, VertexId};
use thiserror::Error;

pub const ORACLE_LIMIT_DEFAULT: u32 = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph with {n} vertices exceeds the oracle limit {limit}")]
    TooLarge { n: u32, limit: u32 },
    #[error("the separator oracle requires a connected graph")]
    Disconnected,
}

/// Is the graph still connected after deleting `removed`? Vacuously true
/// when at most one vertex remains.
pub(crate) fn connected_after_removal(g: &Graph, removed: &[VertexId]) -> bool {
    let n = g.n() as usize;
    let mut banned = vec![false; n];
    for &v in removed {
        banned[v as usize] = true;
    }
    let Some(start) = (0..n).find(|&v| !banned[v]) else {
        return true;
    };
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[start] = true;
    queue.push_back(start as u32);
    let mut reached = 1usize;
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let wi = w as usize;
            if !banned[wi] && !seen[wi] {
                seen[wi] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == n - removed.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThreeConnectedVerdict {
    Yes,
    Disconnected,
    /// Connected but on fewer than 4 vertices, so never 3-connected.
    TooSmall,
    /// Deleting these vertices (one or two of them) disconnects the graph;
    /// the lexicographically first smallest cut is reported.
    CutSet(Vec<VertexId>),
}

impl ThreeConnectedVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, ThreeConnectedVerdict::Yes)
    }
}

/// Brute-force 3-connectivity: at least 4 vertices, connected, and no
/// removal of one or two vertices disconnects the graph.
pub fn is_three_connected(g: &Graph) -> ThreeConnectedVerdict {
    if !g.is_connected() {
        return ThreeConnectedVerdict::Disconnected;
    }
    if g.n() < 4 {
        return ThreeConnectedVerdict::TooSmall;
    }
    for v in 0..g.n() {
        if !connected_after_removal(g, &[v]) {
            return ThreeConnectedVerdict::CutSet(vec![v]);
        }
    }
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            if !connected_after_removal(g, &[u, v]) {
                return ThreeConnectedVerdict::CutSet(vec![u, v]);
            }
        }
    }
    ThreeConnectedVerdict::Yes
}

/// Biconnected components of a graph, each given by its vertices and its
/// host edge ids, plus the cut vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub blocks: Vec<Vec<VertexId>>,
    pub block_edges: Vec<Vec<EdgeId>>,
    pub cut_vertices: Vec<VertexId>,
}

pub fn blocks(g: &Graph) -> Blocks {
    struct Dfs<'a> {
        g: &'a Graph,
        disc: Vec<u32>,
        low: Vec<u32>,
        time: u32,
        stack: Vec<EdgeId>,
        comps: Vec<Vec<EdgeId>>,
        cut: Vec<bool>,
    }
    // lowpoint search with an edge stack: a block closes when a child
    // subtree cannot reach above the current vertex
    fn dfs(d: &mut Dfs, v: VertexId, parent_edge: Option<EdgeId>) {
        d.time += 1;
        d.disc[v as usize] = d.time;
        d.low[v as usize] = d.time;
        let mut children = 0u32;
        for &w in d.g.neighbors(v) {
            let e = d.g.edge_id(v, w).expect("adjacency lists mirror the edge set");
            if Some(e) == parent_edge {
                continue;
            }
            if d.disc[w as usize] == 0 {
                d.stack.push(e);
                children += 1;
                dfs(d, w, Some(e));
                d.low[v as usize] = d.low[v as usize].min(d.low[w as usize]);
                if d.low[w as usize] >= d.disc[v as usize] {
                    let mut comp = Vec::new();
                    while let Some(top) = d.stack.pop() {
                        comp.push(top);
                        if top == e {
                            break;
                        }
                    }
                    d.comps.push(comp);
                    if parent_edge.is_some() {
                        d.cut[v as usize] = true;
                    }
                }
            } else if d.disc[w as usize] < d.disc[v as usize] {
                d.stack.push(e);
                d.low[v as usize] = d.low[v as usize].min(d.disc[w as usize]);
            }
        }
        if parent_edge.is_none() && children >= 2 {
            d.cut[v as usize] = true;
        }
    }
    let mut d = Dfs {
        g,
        disc: vec![0; g.n() as usize],
        low: vec![0; g.n() as usize],
        time: 0,
        stack: Vec::new(),
        comps: Vec::new(),
        cut: vec![false; g.n() as usize],
    };
    for v in 0..g.n() {
        if d.disc[v as usize] == 0 {
            dfs(&mut d, v, None);
        }
    }
    let mut pairs: Vec<(Vec<VertexId>, Vec<EdgeId>)> = d
        .comps
        .into_iter()
        .map(|mut edges| {
            edges.sort_unstable();
            let mut verts = Vec::new();
            for &e in &edges {
                let (u, v) = g.endpoints(e);
                verts.push(u);
                verts.push(v);
            }
            verts.sort_unstable();
            verts.dedup();
            (verts, edges)
        })
        .collect();
    pairs.sort();
    let cut_vertices = (0..g.n()).filter(|&v| d.cut[v as usize]).collect();
    let (blocks, block_edges) = pairs.into_iter().unzip();
    Blocks {
        blocks,
        block_edges,
        cut_vertices,
    }
}

/// A separator of size one or two, flagged by whether it is nested with
/// every other separation of order two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlaggedSeparator {
    /// One or two vertices, ascending.
    pub vertices: Vec<VertexId>,
    pub totally_nested: bool,
}

/// Separations (A, B) with A ∪ B = V, A ∩ B = {u, v}: one per connected
/// component C of the graph minus {u, v}, as (C ∪ {u, v}, V minus C).
fn one_vs_rest_separations(b: &Graph, u: VertexId, v: VertexId) -> Vec<(Bitset, Bitset)> {
    let n = b.n() as usize;
    let mut banned = vec![false; n];
    banned[u as usize] = true;
    banned[v as usize] = true;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if banned[s] || seen[s] {
            continue;
        }
        let mut side = Bitset::new(n);
        let mut rest = Bitset::new(n);
        for i in 0..n {
            rest.insert(i);
        }
        let mut queue = std::collections::VecDeque::new();
        seen[s] = true;
        queue.push_back(s as u32);
        side.insert(s);
        rest.remove(s);
        while let Some(x) = queue.pop_front() {
            for &w in b.neighbors(x) {
                let wi = w as usize;
                if !banned[wi] && !seen[wi] {
                    seen[wi] = true;
                    side.insert(wi);
                    rest.remove(wi);
                    queue.push_back(w);
                }
            }
        }
        side.insert(u as usize);
        side.insert(v as usize);
        out.push((side, rest));
    }
    out
}

/// Two separations are nested when one side of the first fits inside a side
/// of the second while the second's other side fits inside the first's
/// other side.
fn separations_nested(a: &(Bitset, Bitset), c: &(Bitset, Bitset)) -> bool {
    let (a1, a2) = a;
    let (c1, c2) = c;
    (a1.is_subset_of(c1) && c2.is_subset_of(a2))
        || (a1.is_subset_of(c2) && c1.is_subset_of(a2))
        || (a2.is_subset_of(c1) && c2.is_subset_of(a1))
        || (a2.is_subset_of(c2) && c1.is_subset_of(a1))
}

/// For one biconnected graph: all separating vertex pairs, each flagged by
/// nestedness against every other separating pair of the same graph.
pub(crate) fn flagged_pairs_of_biconnected(b: &Graph) -> Vec<((VertexId, VertexId), bool)> {
    let mut pairs = Vec::new();
    for u in 0..b.n() {
        for v in (u + 1)..b.n() {
            if !connected_after_removal(b, &[u, v]) {
                pairs.push((u, v));
            }
        }
    }
    let seps: Vec<Vec<(Bitset, Bitset)>> = pairs
        .iter()
        .map(|&(u, v)| one_vs_rest_separations(b, u, v))
        .collect();
    pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let nested_with_all = seps.iter().enumerate().all(|(j, other)| {
                i == j
                    || seps[i]
                        .iter()
                        .all(|sa| other.iter().all(|sc| separations_nested(sa, sc)))
            });
            (p, nested_with_all)
        })
        .collect()
}

/// All separators of size at most two with nestedness flags, without the
/// size guard. Cut vertices are always totally nested; a pair is totally
/// nested when the two vertices share a biconnected block, split it, and
/// the split is nested with every other separating pair of that block.
pub(crate) fn flagged_two_separators(g: &Graph) -> Vec<FlaggedSeparator> {
    let mut out = Vec::new();
    for v in 0..g.n() {
        if !connected_after_removal(g, &[v]) {
            out.push(FlaggedSeparator {
                vertices: vec![v],
                totally_nested: true,
            });
        }
    }
    let decomposition = blocks(g);
    let mut pair_flags: std::collections::HashMap<(VertexId, VertexId), bool> =
        std::collections::HashMap::new();
    for (verts, edge_ids) in decomposition
        .blocks
        .iter()
        .zip(&decomposition.block_edges)
    {
        if verts.len() < 4 {
            continue;
        }
        let sub = g.edge_induced(edge_ids);
        for ((lu, lv), flag) in flagged_pairs_of_biconnected(&sub.graph) {
            let hu = sub.vertex_to_host[lu as usize];
            let hv = sub.vertex_to_host[lv as usize];
            let key = (hu.min(hv), hu.max(hv));
            pair_flags.insert(key, flag);
        }
    }
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            if !connected_after_removal(g, &[u, v]) {
                out.push(FlaggedSeparator {
                    vertices: vec![u, v],
                    totally_nested: pair_flags.get(&(u, v)).copied().unwrap_or(false),
                });
            }
        }
    }
    out
}

/// Exhaustive separator enumeration for small graphs: every vertex set of
/// size at most two whose removal disconnects the graph, flagged
/// totally-nested or not. Refuses hosts above `limit` (default 20).
pub fn two_separators_bruteforce(
    g: &Graph,
    limit: Option<u32>,
) -> Result<Vec<FlaggedSeparator>, OracleError> {
    let limit = limit.unwrap_or(ORACLE_LIMIT_DEFAULT);
    if g.n() > limit {
        return Err(OracleError::TooLarge { n: g.n(), limit });
    }
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    Ok(flagged_two_separators(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn k4_is_three_connected() {
        assert_eq!(is_three_connected(&gen::complete(4)), ThreeConnectedVerdict::Yes);
    }

    #[test]
    fn c5_has_a_two_cut() {
        assert_eq!(
            is_three_connected(&gen::cycle(5)),
            ThreeConnectedVerdict::CutSet(vec![0, 2]),
            "first non-adjacent pair in lex order"
        );
    }

    #[test]
    fn petersen_is_three_connected() {
        assert_eq!(is_three_connected(&gen::petersen()), ThreeConnectedVerdict::Yes);
    }

    #[test]
    fn degenerate_connectivity_verdicts() {
        assert_eq!(
            is_three_connected(&gen::complete(3)),
            ThreeConnectedVerdict::TooSmall
        );
        let two_parts = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            is_three_connected(&two_parts),
            ThreeConnectedVerdict::Disconnected
        );
        assert_eq!(
            is_three_connected(&gen::path(4)),
            ThreeConnectedVerdict::CutSet(vec![1]),
            "cut vertices are reported before pairs"
        );
    }

    #[test]
    fn blocks_of_a_path_are_its_edges() {
        let b = blocks(&gen::path(4));
        assert_eq!(b.blocks, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert_eq!(b.cut_vertices, vec![1, 2]);
    }

    #[test]
    fn blocks_of_two_triangles_sharing_a_vertex() {
        let g = Graph::new(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap();
        let b = blocks(&g);
        assert_eq!(b.blocks, vec![vec![0, 1, 2], vec![0, 3, 4]]);
        assert_eq!(b.cut_vertices, vec![0]);
        for edges in &b.block_edges {
            assert_eq!(edges.len(), 3, "each triangle keeps its three edges");
        }
    }

    #[test]
    fn biconnected_graph_is_one_block() {
        let b = blocks(&gen::cycle(4));
        assert_eq!(b.blocks.len(), 1);
        assert!(b.cut_vertices.is_empty());
    }

    #[test]
    fn oracle_on_k4_is_empty() {
        let out = two_separators_bruteforce(&gen::complete(4), None).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn oracle_on_c4_lists_crossing_antipodal_pairs() {
        // the two antipodal pairs split C_4 across each other, so neither is
        // nested with the other and neither may appear as an adhesion set
        let out = two_separators_bruteforce(&gen::cycle(4), None).unwrap();
        assert_eq!(
            out,
            vec![
                FlaggedSeparator { vertices: vec![0, 2], totally_nested: false },
                FlaggedSeparator { vertices: vec![1, 3], totally_nested: false },
            ]
        );
    }

    #[test]
    fn oracle_on_theta_flags_the_hub_pair() {
        let out = two_separators_bruteforce(&gen::theta(), None).unwrap();
        assert_eq!(
            out,
            vec![FlaggedSeparator { vertices: vec![0, 1], totally_nested: true }]
        );
    }

    #[test]
    fn oracle_on_chorded_hexagon_keeps_only_the_chord_pair() {
        let mut edges: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.push((0, 3));
        let g = Graph::new(6, &edges).unwrap();
        let out = two_separators_bruteforce(&g, None).unwrap();
        let nested: Vec<&FlaggedSeparator> =
            out.iter().filter(|s| s.totally_nested).collect();
        assert_eq!(nested.len(), 1);
        assert_eq!(nested[0].vertices, vec![0, 3], "only the chord pair is nested");
        assert_eq!(out.len(), 5, "four crossing pairs also separate the hexagon");
    }

    #[test]
    fn oracle_flags_cut_vertices_and_not_their_padding() {
        // two triangles sharing vertex 0: the cut vertex is nested, but a
        // pair made of the cut vertex and a padding vertex is not
        let g = Graph::new(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap();
        let out = two_separators_bruteforce(&g, None).unwrap();
        for sep in &out {
            if sep.vertices.len() == 1 {
                assert_eq!(sep.vertices, vec![0]);
                assert!(sep.totally_nested, "cut vertices are always nested");
            } else {
                assert!(
                    !sep.totally_nested,
                    "pair {:?} only separates through the cut vertex",
                    sep.vertices
                );
            }
        }
        assert!(out.iter().any(|s| s.vertices.len() == 1));
    }

    #[test]
    fn oracle_listing_matches_direct_removal_testing() {
        let g = gen::random_connected(10, 14, 7);
        let out = two_separators_bruteforce(&g, None).unwrap();
        for u in 0..g.n() {
            for v in (u + 1)..g.n() {
                let listed = out.iter().any(|s| s.vertices == vec![u, v]);
                assert_eq!(
                    listed,
                    !connected_after_removal(&g, &[u, v]),
                    "pair ({u}, {v}) listing must mirror disconnection"
                );
            }
        }
        for v in 0..g.n() {
            let listed = out.iter().any(|s| s.vertices == vec![v]);
            assert_eq!(listed, !connected_after_removal(&g, &[v]));
        }
    }

    #[test]
    fn oracle_refuses_large_graphs() {
        let g = gen::random_tree(21, 3);
        match two_separators_bruteforce(&g, None) {
            Err(OracleError::TooLarge { n: 21, limit: 20 }) => {}
            other => panic!("expected the size guard to trip, got {other:?}"),
        }
        assert!(two_separators_bruteforce(&g, Some(25)).is_ok());
    }
}
