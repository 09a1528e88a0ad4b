//! Separating systems whose members are cycles or single edges, built over
//! a chosen ground set of edges: fundamental cycles and triangles are
//! selected greedily by how many unresolved ordered pairs they settle, then
//! single edges top up whatever remains. Triangles matter on dense graphs:
//! every non-tree edge lies in exactly one fundamental cycle, so a basis
//! alone can never separate such an edge from that cycle's other edges and
//! would force one single per non-tree edge. The single-edge fallback keeps
//! the size at or below the ground size no matter what the greedy phase
//! does.

use crate::bits::Bitset;
use crate::family::{FamilyMember, SeparatingFamily};
use crate::gen;
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::subdivision::SubdivisionCert;

/// Fundamental cycles of a breadth-first spanning forest, one per non-tree
/// edge in edge-id order, each as a closed vertex sequence.
fn fundamental_cycles(g: &Graph) -> Vec<Vec<VertexId>> {
    let n = g.n() as usize;
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut depth: Vec<u32> = vec![0; n];
    let mut visited = vec![false; n];
    let mut tree_edge = vec![false; g.m() as usize];
    for root in 0..g.n() {
        if visited[root as usize] {
            continue;
        }
        visited[root as usize] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !visited[w as usize] {
                    visited[w as usize] = true;
                    parent[w as usize] = Some(v);
                    depth[w as usize] = depth[v as usize] + 1;
                    tree_edge[g.edge_id(v, w).unwrap() as usize] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for e in 0..g.m() {
        if tree_edge[e as usize] {
            continue;
        }
        let (u, v) = g.endpoints(e);
        let mut lu = vec![u];
        let mut lv = vec![v];
        let (mut a, mut b) = (u, v);
        while depth[a as usize] > depth[b as usize] {
            a = parent[a as usize].unwrap();
            lu.push(a);
        }
        while depth[b as usize] > depth[a as usize] {
            b = parent[b as usize].unwrap();
            lv.push(b);
        }
        while a != b {
            a = parent[a as usize].unwrap();
            lu.push(a);
            b = parent[b as usize].unwrap();
            lv.push(b);
        }
        lv.pop();
        lu.extend(lv.into_iter().rev());
        cycles.push(lu);
    }
    cycles
}

/// Every triangle of the graph, listed once as a < b < x.
fn all_triangles(g: &Graph) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    for e in 0..g.m() {
        let (a, b) = g.endpoints(e);
        let (mut i, mut j) = (0, 0);
        let (na, nb) = (g.neighbors(a), g.neighbors(b));
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if na[i] > b {
                        out.push(vec![a, b, na[i]]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    out
}

/// Rotate the cycle to start at its smallest vertex and run toward the
/// smaller of that vertex's two cycle neighbors.
fn canonical_cycle(seq: &[VertexId]) -> Vec<VertexId> {
    let k = seq
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .map(|(i, _)| i)
        .unwrap();
    let mut rot: Vec<VertexId> = seq[k..].iter().chain(seq[..k].iter()).copied().collect();
    if rot[1] > rot[rot.len() - 1] {
        rot[1..].reverse();
    }
    rot
}

/// A cycle as a three-branch subdivision certificate: branch vertices are
/// the first three along the canonical orientation.
fn cycle_cert(seq: &[VertexId]) -> SubdivisionCert {
    let long: Vec<VertexId> = std::iter::once(seq[0])
        .chain(seq[2..].iter().rev().copied())
        .collect();
    SubdivisionCert::oriented(
        gen::complete(3),
        vec![seq[0], seq[1], seq[2]],
        vec![
            Path::new(vec![seq[0], seq[1]]),
            Path::new(long),
            Path::new(vec![seq[1], seq[2]]),
        ],
    )
}

/// Build a family of cycles and single edges that strongly separates
/// `ground`. Fundamental cycles and triangles are chosen greedily by the
/// number of newly separated ordered pairs (ties: fewer edges, then
/// lexicographic edge ids); single edges then cover every still-unseparated
/// pair and every ground edge no member contains. If that ever exceeds one
/// member per ground edge, the all-singles family is returned instead.
pub fn build_sub_k3_system(g: &Graph, ground: &[EdgeId]) -> SeparatingFamily {
    let mut ground: Vec<EdgeId> = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    assert!(
        ground.iter().all(|&e| e < g.m()),
        "ground edges must exist in the host graph"
    );
    let q = ground.len();
    let ground_index = |e: EdgeId| ground.binary_search(&e).ok();

    struct Candidate {
        seq: Vec<VertexId>,
        edge_ids: Vec<EdgeId>,
        mask: Bitset,
    }
    let mut seen = std::collections::HashSet::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    for raw in fundamental_cycles(g)
        .into_iter()
        .chain(all_triangles(g).into_iter())
    {
        let seq = canonical_cycle(&raw);
        let mut edge_ids: Vec<EdgeId> = (0..seq.len())
            .map(|i| {
                g.edge_id(seq[i], seq[(i + 1) % seq.len()])
                    .expect("cycle walks host edges")
            })
            .collect();
        edge_ids.sort_unstable();
        if !seen.insert(edge_ids.clone()) {
            continue;
        }
        let mut mask = Bitset::new(q);
        for &e in &edge_ids {
            if let Some(i) = ground_index(e) {
                mask.insert(i);
            }
        }
        candidates.push(Candidate { seq, edge_ids, mask });
    }

    // unresolved[x] holds the ground indices y with ordered pair (x, y)
    // still unseparated
    let mut unresolved: Vec<Bitset> = (0..q)
        .map(|x| {
            let mut row = Bitset::new(q);
            for y in 0..q {
                if y != x {
                    row.insert(y);
                }
            }
            row
        })
        .collect();

    let gain = |c: &Candidate, unresolved: &[Bitset]| -> usize {
        c.mask
            .iter()
            .map(|x| unresolved[x].count_minus(&c.mask))
            .sum()
    };

    let mut chosen: Vec<usize> = Vec::new();
    let mut used = vec![false; candidates.len()];
    loop {
        let mut best: Option<(usize, usize)> = None; // (candidate, gain)
        for (i, c) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let s = gain(c, &unresolved);
            if s == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((j, bs)) => {
                    let b = &candidates[j];
                    s > bs
                        || (s == bs
                            && (c.edge_ids.len() < b.edge_ids.len()
                                || (c.edge_ids.len() == b.edge_ids.len()
                                    && c.edge_ids < b.edge_ids)))
                }
            };
            if better {
                best = Some((i, s));
            }
        }
        let Some((i, _)) = best else { break };
        used[i] = true;
        chosen.push(i);
        for x in candidates[i].mask.iter().collect::<Vec<_>>() {
            unresolved[x].intersect_with(&candidates[i].mask);
        }
    }

    let mut covered = Bitset::new(q);
    for &i in &chosen {
        covered.union_with(&candidates[i].mask);
    }
    let mut singles: Vec<usize> = Vec::new();
    for x in 0..q {
        if !unresolved[x].is_empty() || !covered.contains(x) {
            singles.push(x);
            covered.insert(x);
        }
    }

    let members: Vec<FamilyMember> = if chosen.len() + singles.len() > q {
        ground.iter().map(|&e| FamilyMember::SingleEdge(e)).collect()
    } else {
        chosen
            .iter()
            .map(|&i| FamilyMember::Subdivision(cycle_cert(&candidates[i].seq)))
            .chain(singles.iter().map(|&x| FamilyMember::SingleEdge(ground[x])))
            .collect()
    };
    SeparatingFamily::new(g, members).expect("members are host cycles and host edges")
}
