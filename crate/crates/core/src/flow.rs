//! Disjoint path packing via unit-vertex-capacity maximum flow.

use crate::graph::{Graph, Path, VertexId};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("only {found} of the requested {wanted} disjoint paths exist")]
    NotEnough { found: u32, wanted: u32 },
}

/// `k` source-to-target paths that are internally vertex-disjoint and whose
/// internal vertices avoid sources and targets entirely. Paths may share
/// source or target endpoints (the fan form of Menger's theorem).
pub fn disjoint_paths(
    g: &Graph,
    sources: &[VertexId],
    targets: &[VertexId],
    k: u32,
) -> Result<Vec<Path>, FlowError> {
    route(g, sources, targets, k, k)
}

/// Like `disjoint_paths` but fully vertex-disjoint: the `k` paths share no
/// vertex at all, so sources and targets are hit at most once each.
pub fn disjoint_paths_distinct(
    g: &Graph,
    sources: &[VertexId],
    targets: &[VertexId],
    k: u32,
) -> Result<Vec<Path>, FlowError> {
    route(g, sources, targets, k, 1)
}

struct Net {
    // paired arcs: arc i and i^1 are each other's reverses
    to: Vec<u32>,
    cap: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl Net {
    fn new(nodes: usize) -> Net {
        Net {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn arc(&mut self, from: u32, to: u32, cap: u32) {
        let id = self.to.len() as u32;
        self.to.push(to);
        self.cap.push(cap);
        self.adj[from as usize].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.adj[to as usize].push(id + 1);
    }
}

/// Vertex-split max flow: node 2v is v's entry, 2v+1 its exit. Sources feed
/// from a super source and never accept graph arcs; targets drain to a super
/// sink and never emit graph arcs, which keeps interiors off both sets.
/// `endpoint_cap` throttles how many paths may reuse one source or target.
fn route(
    g: &Graph,
    sources: &[VertexId],
    targets: &[VertexId],
    k: u32,
    endpoint_cap: u32,
) -> Result<Vec<Path>, FlowError> {
    assert!(k >= 1, "at least one path must be requested");
    let mut sources = sources.to_vec();
    let mut targets = targets.to_vec();
    sources.sort_unstable();
    sources.dedup();
    targets.sort_unstable();
    targets.dedup();
    assert!(
        sources.iter().all(|s| !targets.contains(s)),
        "sources and targets must be disjoint"
    );
    let n = g.n() as usize;
    let mut role = vec![0u8; n]; // 1 = source, 2 = target
    for &s in &sources {
        role[s as usize] = 1;
    }
    for &t in &targets {
        role[t as usize] = 2;
    }
    let entry = |v: VertexId| 2 * v;
    let exit = |v: VertexId| 2 * v + 1;
    let super_source = 2 * g.n();
    let super_sink = 2 * g.n() + 1;
    let mut net = Net::new(2 * n + 2);
    for v in 0..g.n() {
        let through = match role[v as usize] {
            0 => 1,
            _ => endpoint_cap,
        };
        net.arc(entry(v), exit(v), through);
    }
    for v in 0..g.n() {
        for &w in g.neighbors(v) {
            // no arcs into sources, none out of targets
            if role[w as usize] != 1 && role[v as usize] != 2 {
                net.arc(exit(v), entry(w), 1);
            }
        }
    }
    for &s in &sources {
        net.arc(super_source, entry(s), endpoint_cap);
    }
    for &t in &targets {
        net.arc(exit(t), super_sink, endpoint_cap);
    }

    // breadth-first augmentation, one unit at a time; arc insertion order
    // follows ascending vertex ids, so ties resolve toward low ids
    let mut flow = 0u32;
    let mut parent_arc = vec![u32::MAX; 2 * n + 2];
    while flow < k {
        for p in parent_arc.iter_mut() {
            *p = u32::MAX;
        }
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(super_source);
        parent_arc[super_source as usize] = u32::MAX - 1;
        let mut reached = false;
        'bfs: while let Some(x) = queue.pop_front() {
            for &a in &net.adj[x as usize] {
                let y = net.to[a as usize];
                if net.cap[a as usize] > 0 && parent_arc[y as usize] == u32::MAX {
                    parent_arc[y as usize] = a;
                    if y == super_sink {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if !reached {
            break;
        }
        let mut y = super_sink;
        while y != super_source {
            let a = parent_arc[y as usize];
            net.cap[a as usize] -= 1;
            net.cap[(a ^ 1) as usize] += 1;
            y = net.to[(a ^ 1) as usize];
        }
        flow += 1;
    }
    if flow < k {
        return Err(FlowError::NotEnough { found: flow, wanted: k });
    }

    // net flow per forward arc, then peel off one source-to-sink walk per
    // unit; a depth-first walk with backtracking never gets stranded on
    // leftover circulation
    let arcs = net.to.len();
    let mut flow_on = vec![0u32; arcs];
    for a in (0..arcs).step_by(2) {
        let sent = net.cap[a + 1];
        flow_on[a] = sent;
    }
    let mut paths = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let mut walk: Vec<u32> = vec![super_source];
        let mut arc_trail: Vec<u32> = Vec::new();
        loop {
            let x = *walk.last().unwrap();
            if x == super_sink {
                break;
            }
            let next = net.adj[x as usize]
                .iter()
                .copied()
                .find(|&a| a % 2 == 0 && flow_on[a as usize] > 0 && !walk.contains(&net.to[a as usize]));
            match next {
                Some(a) => {
                    flow_on[a as usize] -= 1;
                    arc_trail.push(a);
                    walk.push(net.to[a as usize]);
                }
                None => {
                    // dead end off a circulation: undo the last hop
                    let a = arc_trail.pop().expect("super source always has outflow");
                    flow_on[a as usize] += 1;
                    walk.pop();
                }
            }
        }
        let vertices: Vec<VertexId> = walk
            .iter()
            .copied()
            .filter(|&x| x < 2 * g.n() && x % 2 == 0)
            .map(|x| x / 2)
            .collect();
        paths.push(Path::new(vertices));
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn interiors(p: &Path) -> &[VertexId] {
        let v = p.vertices();
        &v[1..v.len() - 1]
    }

    #[test]
    fn fan_paths_in_k5() {
        let g = gen::complete(5);
        let paths = disjoint_paths(&g, &[0], &[2, 3, 4], 3).unwrap();
        let mut flat: Vec<Vec<u32>> = paths.iter().map(|p| p.vertices().to_vec()).collect();
        flat.sort();
        assert_eq!(flat, vec![vec![0, 2], vec![0, 3], vec![0, 4]]);
    }

    #[test]
    fn single_route_path_fails_for_two() {
        let g = gen::path(4);
        assert_eq!(
            disjoint_paths(&g, &[0], &[3], 2),
            Err(FlowError::NotEnough { found: 1, wanted: 2 })
        );
    }

    #[test]
    fn grid_corners_carry_two_disjoint_paths() {
        let g = gen::grid(4, 4);
        let paths = disjoint_paths(&g, &[0], &[15], 2).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert!(p.is_valid_in(&g));
            assert_eq!(p.first(), 0);
            assert_eq!(p.last(), 15);
        }
        let mut inner: Vec<u32> = Vec::new();
        for p in &paths {
            inner.extend_from_slice(interiors(p));
        }
        let before = inner.len();
        inner.sort_unstable();
        inner.dedup();
        assert_eq!(before, inner.len(), "interiors must not overlap");
        assert!(!inner.contains(&0) && !inner.contains(&15));
    }

    #[test]
    fn grid_pair_existence_matches_exhaustive_search() {
        // independent oracle: enumerate all simple corner-to-corner paths and
        // look for an internally disjoint pair
        let g = gen::grid(4, 4);
        let mut all: Vec<Vec<u32>> = Vec::new();
        let mut stack = vec![0u32];
        let mut on = vec![false; 16];
        on[0] = true;
        fn dfs(g: &Graph, stack: &mut Vec<u32>, on: &mut Vec<bool>, all: &mut Vec<Vec<u32>>) {
            let v = *stack.last().unwrap();
            if v == 15 {
                all.push(stack.clone());
                return;
            }
            for &w in g.neighbors(v) {
                if !on[w as usize] {
                    on[w as usize] = true;
                    stack.push(w);
                    dfs(g, stack, on, all);
                    stack.pop();
                    on[w as usize] = false;
                }
            }
        }
        dfs(&g, &mut stack, &mut on, &mut all);
        let disjoint_pair_exists = all.iter().enumerate().any(|(i, p)| {
            all[i + 1..].iter().any(|q| {
                p[1..p.len() - 1]
                    .iter()
                    .all(|v| !q[1..q.len() - 1].contains(v))
            })
        });
        assert!(disjoint_pair_exists, "oracle: the grid admits a disjoint pair");
        assert!(disjoint_paths(&g, &[0], &[15], 2).is_ok());
        assert_eq!(
            disjoint_paths(&g, &[0], &[15], 3),
            Err(FlowError::NotEnough { found: 2, wanted: 3 }),
            "corner degree 2 caps the packing at two"
        );
    }

    #[test]
    fn distinct_variant_refuses_shared_endpoints() {
        let g = gen::complete(5);
        assert!(disjoint_paths(&g, &[0], &[2, 3, 4], 2).is_ok());
        assert_eq!(
            disjoint_paths_distinct(&g, &[0], &[2, 3, 4], 2),
            Err(FlowError::NotEnough { found: 1, wanted: 2 }),
            "one source supports only one fully disjoint path"
        );
        let paths = disjoint_paths_distinct(&g, &[0, 1], &[3, 4], 2).unwrap();
        let mut seen: Vec<u32> = paths.iter().flat_map(|p| p.vertices().to_vec()).collect();
        let before = seen.len();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(before, seen.len(), "no vertex reuse at all");
    }

    #[test]
    fn interiors_avoid_source_and_target_sets() {
        // star of paths: routing 0 to 5 must not cut through source 1 or
        // target 4 even where that is the short way
        let g = Graph::new(6, &[(0, 1), (1, 5), (0, 2), (2, 3), (3, 5), (0, 4), (4, 5)]).unwrap();
        let paths = disjoint_paths(&g, &[0, 1], &[4, 5], 1).unwrap();
        let p = &paths[0];
        for v in interiors(p) {
            assert!(![0, 1, 4, 5].contains(v), "interior {v} lies in an endpoint set");
        }
    }

    #[test]
    fn three_connected_graphs_always_pack_three() {
        for g in [gen::complete(4), gen::complete(5), gen::prism(), gen::petersen()] {
            assert!(crate::separators::is_three_connected(&g).is_yes());
            let n = g.n();
            let sources: Vec<u32> = vec![0, 1, 2];
            let targets: Vec<u32> = vec![n - 3, n - 2, n - 1];
            if sources.iter().any(|s| targets.contains(s)) {
                continue;
            }
            let paths = disjoint_paths_distinct(&g, &sources, &targets, 3).unwrap();
            assert_eq!(paths.len(), 3);
            let mut seen: Vec<u32> = paths.iter().flat_map(|p| p.vertices().to_vec()).collect();
            let before = seen.len();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(before, seen.len());
        }
    }

    #[test]
    fn leftover_capacity_keeps_endpoints_connected() {
        // max flow exceeds the request, so removing the returned interiors
        // must keep some source-target route alive
        let g = gen::grid(4, 4);
        let paths = disjoint_paths(&g, &[0], &[15], 1).unwrap();
        let removed: Vec<u32> = interiors(&paths[0]).to_vec();
        let mut banned = vec![false; 16];
        for &v in &removed {
            banned[v as usize] = true;
        }
        let mut queue = std::collections::VecDeque::new();
        let mut seen = vec![false; 16];
        seen[0] = true;
        queue.push_back(0u32);
        let mut hit = false;
        while let Some(v) = queue.pop_front() {
            if v == 15 {
                hit = true;
                break;
            }
            for &w in g.neighbors(v) {
                if !banned[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        assert!(hit, "a second route must survive the first path's removal");
    }
}
