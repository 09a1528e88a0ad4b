//! Subdivision certificates, verification, balance classification, and
//! balanced clique-subdivision search.

use crate::bits::Bitset;
use crate::graph::{EdgeId, Graph, GraphError, Path, VertexId};
use crate::Verdict;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("pattern must be the complete graph on {expected} vertices")]
    WrongPatternSize { expected: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Witness that a host graph contains a subdivision of `pattern`:
/// an injective branch-vertex placement plus one host path per pattern edge.
///
/// `branch_paths[e]` is oriented from the image of pattern edge e's smaller
/// endpoint to the image of its larger endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionCert {
    pub pattern: Graph,
    pub branch_vertices: Vec<VertexId>,
    pub branch_paths: Vec<Path>,
}

impl SubdivisionCert {
    /// Build a cert, reversing any branch path that arrives in the wrong
    /// orientation. Panics if a path matches neither orientation; callers
    /// construct paths between the correct images.
    pub fn oriented(
        pattern: Graph,
        branch_vertices: Vec<VertexId>,
        branch_paths: Vec<Path>,
    ) -> SubdivisionCert {
        assert_eq!(branch_vertices.len(), pattern.n() as usize);
        assert_eq!(branch_paths.len(), pattern.m() as usize);
        let paths: Vec<Path> = branch_paths
            .into_iter()
            .enumerate()
            .map(|(e, p)| {
                let (a, b) = pattern.endpoints(e as EdgeId);
                let (ia, ib) = (
                    branch_vertices[a as usize],
                    branch_vertices[b as usize],
                );
                if p.first() == ia && p.last() == ib {
                    p
                } else if p.first() == ib && p.last() == ia {
                    p.reversed()
                } else {
                    panic!("branch path for pattern edge {e} joins neither image pair");
                }
            })
            .collect();
        SubdivisionCert {
            pattern,
            branch_vertices,
            branch_paths: paths,
        }
    }

    /// All host vertices the subdivision touches, sorted.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out = self.branch_vertices.clone();
        for p in &self.branch_paths {
            out.extend_from_slice(p.vertices());
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Host edge ids of all branch paths, sorted.
    pub fn edge_ids(&self, g: &Graph) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for p in &self.branch_paths {
            for (u, v) in p.edge_pairs() {
                out.push(
                    g.edge_id(u, v)
                        .expect("certificate paths must use host edges"),
                );
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The branch path joining two pattern vertices, if they are adjacent
    /// in the pattern, oriented from `a`'s image to `b`'s image.
    pub fn path_between(&self, a: u32, b: u32) -> Option<Path> {
        let e = self.pattern.edge_id(a, b)?;
        let p = &self.branch_paths[e as usize];
        if p.first() == self.branch_vertices[a as usize] {
            Some(p.clone())
        } else {
            Some(p.reversed())
        }
    }
}

pub fn verify_subdivision(g: &Graph, cert: &SubdivisionCert) -> Verdict {
    let n_pat = cert.pattern.n() as usize;
    if cert.branch_vertices.len() != n_pat {
        return Verdict::fail("branch vertex map size differs from pattern order");
    }
    if cert.branch_paths.len() != cert.pattern.m() as usize {
        return Verdict::fail("branch path count differs from pattern size");
    }
    let mut seen = std::collections::HashSet::new();
    for &v in &cert.branch_vertices {
        if v >= g.n() {
            return Verdict::fail(format!("branch vertex {v} outside the host"));
        }
        if !seen.insert(v) {
            return Verdict::fail(format!("branch vertex map repeats host vertex {v}"));
        }
    }
    for (e, p) in cert.branch_paths.iter().enumerate() {
        let (a, b) = cert.pattern.endpoints(e as EdgeId);
        if p.first() != cert.branch_vertices[a as usize]
            || p.last() != cert.branch_vertices[b as usize]
        {
            return Verdict::fail(format!(
                "branch path for pattern edge {e} does not join the endpoint images"
            ));
        }
        if p.is_empty() {
            return Verdict::fail(format!("branch path for pattern edge {e} has no edges"));
        }
        if !p.is_valid_in(g) {
            return Verdict::fail(format!(
                "branch path for pattern edge {e} is not a path of the host"
            ));
        }
    }
    // internal disjointness: no vertex is interior to two paths, interior to
    // one path and on another, or both a branch vertex and an interior
    let mut interior_owner: std::collections::HashMap<VertexId, usize> =
        std::collections::HashMap::new();
    for (e, p) in cert.branch_paths.iter().enumerate() {
        let verts = p.vertices();
        for &v in &verts[1..verts.len() - 1] {
            if interior_owner.insert(v, e).is_some() {
                return Verdict::fail(format!("vertex {v} is interior to two branch paths"));
            }
            if seen.contains(&v) {
                return Verdict::fail(format!(
                    "branch vertex {v} is interior to a branch path"
                ));
            }
        }
    }
    for (e, p) in cert.branch_paths.iter().enumerate() {
        for &v in p.vertices() {
            if let Some(&owner) = interior_owner.get(&v) {
                if owner != e {
                    return Verdict::fail(format!(
                        "vertex {v} is shared between branch paths {owner} and {e}"
                    ));
                }
            }
        }
    }
    Verdict::Pass
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalanceClass {
    Balanced(usize),
    AlmostBalanced(usize),
    Unbalanced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceProfile {
    /// Branch path lengths, ascending.
    pub lengths: Vec<usize>,
    pub class: BalanceClass,
}

impl BalanceProfile {
    /// True when at most one branch path has a length other than `ell`.
    pub fn is_almost_balanced(&self, ell: usize) -> bool {
        self.lengths.iter().filter(|&&l| l != ell).count() <= 1
    }
}

pub fn balance_profile(cert: &SubdivisionCert) -> BalanceProfile {
    let mut lengths: Vec<usize> = cert.branch_paths.iter().map(|p| p.len()).collect();
    lengths.sort_unstable();
    let class = if lengths.is_empty() {
        BalanceClass::Balanced(0)
    } else {
        // smallest ell matched by all but at most one path
        let mut class = BalanceClass::Unbalanced;
        let mut candidates: Vec<usize> = lengths.clone();
        candidates.dedup();
        for ell in candidates {
            let off = lengths.iter().filter(|&&l| l != ell).count();
            if off == 0 {
                class = BalanceClass::Balanced(ell);
                break;
            }
            if off == 1 {
                class = BalanceClass::AlmostBalanced(ell);
                break;
            }
        }
        class
    };
    BalanceProfile { lengths, class }
}

#[derive(Debug)]
pub enum SearchResult {
    Found(SubdivisionCert),
    /// The node budget ran out before the search space was covered.
    BudgetExhausted,
    /// Every feasible path length was exhaustively ruled out.
    Refuted,
}

struct Budget;

/// Search for an ell-balanced complete-graph subdivision with m branch
/// vertices, trying ell = 1 (a clique) first and increasing ell while the
/// counting bound m + (ell-1)*m(m-1)/2 <= n keeps the length feasible.
pub fn find_balanced_clique_subdivision(g: &Graph, m: u32, budget: u64) -> SearchResult {
    assert!(m >= 2, "pattern needs at least two branch vertices");
    let mut remaining = budget.max(1);
    let pat_pairs = m as u64 * (m as u64 - 1) / 2;
    let mut ell: u64 = 1;
    loop {
        if m as u64 + (ell - 1) * pat_pairs > g.n() as u64 {
            return SearchResult::Refuted;
        }
        let found = if ell == 1 {
            find_clique(g, m as usize, &mut remaining).map(|cl| {
                cl.map(|verts| {
                    let pattern = crate::gen::complete(m);
                    let paths = pattern
                        .edges()
                        .iter()
                        .map(|&(a, b)| Path::new(vec![verts[a as usize], verts[b as usize]]))
                        .collect();
                    SubdivisionCert {
                        pattern,
                        branch_vertices: verts,
                        branch_paths: paths,
                    }
                })
            })
        } else {
            find_subdivision_exact(g, m as usize, ell as usize, &mut remaining)
        };
        match found {
            Ok(Some(cert)) => return SearchResult::Found(cert),
            Ok(None) => ell += 1,
            Err(Budget) => return SearchResult::BudgetExhausted,
        }
    }
}

/// Vertices ordered by descending degree, ties by ascending id.
fn degree_order(g: &Graph) -> Vec<VertexId> {
    let mut order: Vec<VertexId> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// First clique with `m` vertices in deterministic search order; host ids
/// sorted ascending. Ok(None) means exhaustively refuted.
fn find_clique(g: &Graph, m: usize, budget: &mut u64) -> Result<Option<Vec<VertexId>>, Budget> {
    let n = g.n() as usize;
    if m > n {
        return Ok(None);
    }
    let order = degree_order(g);
    // adjacency in order-space
    let mut adj = vec![Bitset::new(n); n];
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i;
    }
    for &(u, v) in g.edges() {
        adj[pos[u as usize]].insert(pos[v as usize]);
        adj[pos[v as usize]].insert(pos[u as usize]);
    }
    fn extend(
        chosen: &mut Vec<usize>,
        cand: &Bitset,
        m: usize,
        adj: &[Bitset],
        budget: &mut u64,
    ) -> Result<bool, Budget> {
        if *budget == 0 {
            return Err(Budget);
        }
        *budget -= 1;
        if chosen.len() == m {
            return Ok(true);
        }
        if chosen.len() + cand.count() < m {
            return Ok(false);
        }
        let members: Vec<usize> = cand.iter().collect();
        for (k, &i) in members.iter().enumerate() {
            if chosen.len() + (members.len() - k) < m {
                break;
            }
            let mut next = cand.clone();
            next.intersect_with(&adj[i]);
            for &j in &members[..=k] {
                if next.contains(j) {
                    next.remove(j);
                }
            }
            chosen.push(i);
            if extend(chosen, &next, m, adj, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let mut chosen = Vec::new();
    let mut cand = Bitset::new(n);
    for i in 0..n {
        cand.insert(i);
    }
    if extend(&mut chosen, &cand, m, &adj, budget)? {
        let mut verts: Vec<VertexId> = chosen.iter().map(|&i| order[i]).collect();
        verts.sort_unstable();
        Ok(Some(verts))
    } else {
        Ok(None)
    }
}

/// Backtracking search for a complete-graph subdivision in which every
/// branch path has exactly `ell` edges.
fn find_subdivision_exact(
    g: &Graph,
    m: usize,
    ell: usize,
    budget: &mut u64,
) -> Result<Option<SubdivisionCert>, Budget> {
    #[derive(Clone, Copy)]
    enum Task {
        Assign(usize),
        Route(usize, usize),
    }
    let mut tasks = Vec::new();
    for j in 0..m {
        tasks.push(Task::Assign(j));
        for i in 0..j {
            tasks.push(Task::Route(i, j));
        }
    }
    let order = degree_order(g);

    struct State {
        images: Vec<VertexId>,
        used: Vec<bool>,
        paths: std::collections::HashMap<(usize, usize), Path>,
    }
    let mut st = State {
        images: vec![u32::MAX; m],
        used: vec![false; g.n() as usize],
        paths: std::collections::HashMap::new(),
    };

    fn route(
        g: &Graph,
        st: &mut State,
        acc: &mut Vec<VertexId>,
        target: VertexId,
        dist_to_target: &[u32],
        steps_left: usize,
        tasks: &[Task],
        idx: usize,
        order: &[VertexId],
        budget: &mut u64,
        ell: usize,
    ) -> Result<bool, Budget> {
        if *budget == 0 {
            return Err(Budget);
        }
        *budget -= 1;
        let cur = *acc.last().unwrap();
        if steps_left == 0 {
            if cur != target {
                return Ok(false);
            }
            let (i, j) = match tasks[idx] {
                Task::Route(i, j) => (i, j),
                Task::Assign(_) => unreachable!(),
            };
            let interior: Vec<VertexId> = acc[1..acc.len() - 1].to_vec();
            for &v in &interior {
                st.used[v as usize] = true;
            }
            st.paths.insert((i, j), Path::new(acc.clone()));
            let ok = step(g, st, tasks, idx + 1, order, budget, ell)?;
            if !ok {
                st.paths.remove(&(i, j));
                for &v in &interior {
                    st.used[v as usize] = false;
                }
            }
            return Ok(ok);
        }
        if dist_to_target[cur as usize] as usize > steps_left {
            return Ok(false);
        }
        for &w in g.neighbors(cur) {
            let final_step = steps_left == 1;
            if final_step {
                if w != target {
                    continue;
                }
            } else if st.used[w as usize] || acc.contains(&w) {
                continue;
            }
            acc.push(w);
            let ok = route(
                g, st, acc, target, dist_to_target, steps_left - 1, tasks, idx, order, budget,
                ell,
            )?;
            acc.pop();
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn step(
        g: &Graph,
        st: &mut State,
        tasks: &[Task],
        idx: usize,
        order: &[VertexId],
        budget: &mut u64,
        ell: usize,
    ) -> Result<bool, Budget> {
        if *budget == 0 {
            return Err(Budget);
        }
        *budget -= 1;
        if idx == tasks.len() {
            return Ok(true);
        }
        match tasks[idx] {
            Task::Assign(v) => {
                for &cand in order {
                    if st.used[cand as usize] {
                        continue;
                    }
                    st.images[v] = cand;
                    st.used[cand as usize] = true;
                    if step(g, st, tasks, idx + 1, order, budget, ell)? {
                        return Ok(true);
                    }
                    st.used[cand as usize] = false;
                    st.images[v] = u32::MAX;
                }
                Ok(false)
            }
            Task::Route(i, j) => {
                let (s, t) = (st.images[i], st.images[j]);
                let mut d = vec![u32::MAX; g.n() as usize];
                let mut q = std::collections::VecDeque::new();
                d[t as usize] = 0;
                q.push_back(t);
                while let Some(v) = q.pop_front() {
                    for &w in g.neighbors(v) {
                        if d[w as usize] == u32::MAX {
                            d[w as usize] = d[v as usize] + 1;
                            q.push_back(w);
                        }
                    }
                }
                let mut acc = vec![s];
                route(g, st, &mut acc, t, &d, ell, tasks, idx, order, budget, ell)
            }
        }
    }

    if step(g, &mut st, &tasks, 0, &order, budget, ell)? {
        let pattern = crate::gen::complete(m as u32);
        let branch_vertices = st.images.clone();
        let branch_paths = pattern
            .edges()
            .iter()
            .map(|&(a, b)| {
                let p = st.paths.remove(&(a as usize, b as usize)).unwrap();
                if p.first() == branch_vertices[a as usize] {
                    p
                } else {
                    p.reversed()
                }
            })
            .collect();
        Ok(Some(SubdivisionCert {
            pattern,
            branch_vertices,
            branch_paths,
        }))
    } else {
        Ok(None)
    }
}

/// Split a complete-graph subdivision on 4t+8 branch vertices into four
/// vertex-disjoint complete subdivisions on t+2 branch vertices each.
/// Parts are consecutive runs of branch vertices in ascending host id order;
/// each part keeps exactly the branch paths joining two of its vertices.
pub fn quarter_split(cert: &SubdivisionCert, t: u32) -> Result<Vec<SubdivisionCert>, CertError> {
    let size = 4 * t + 8;
    let part = t + 2;
    let expect_m = size as u64 * (size as u64 - 1) / 2;
    if cert.pattern.n() != size || cert.pattern.m() as u64 != expect_m {
        return Err(CertError::WrongPatternSize { expected: size });
    }
    let mut by_image: Vec<u32> = (0..size).collect();
    by_image.sort_by_key(|&pv| cert.branch_vertices[pv as usize]);
    let mut out = Vec::with_capacity(4);
    for chunk in by_image.chunks(part as usize) {
        let pattern = crate::gen::complete(part);
        let branch_vertices: Vec<VertexId> = chunk
            .iter()
            .map(|&pv| cert.branch_vertices[pv as usize])
            .collect();
        let branch_paths: Vec<Path> = pattern
            .edges()
            .iter()
            .map(|&(a, b)| {
                cert.path_between(chunk[a as usize], chunk[b as usize])
                    .expect("complete pattern has every pair")
            })
            .collect();
        out.push(SubdivisionCert::oriented(
            pattern,
            branch_vertices,
            branch_paths,
        ));
    }
    Ok(out)
}

pub fn serialize_cert(cert: &SubdivisionCert) -> String {
    let mut out = format!("pattern {} {}\n", cert.pattern.n(), cert.pattern.m());
    for &(u, v) in cert.pattern.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    for (h, &v) in cert.branch_vertices.iter().enumerate() {
        out.push_str(&format!("branch {h} {v}\n"));
    }
    for (e, p) in cert.branch_paths.iter().enumerate() {
        out.push_str(&format!("path {e}:"));
        for &v in p.vertices() {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_cert(text: &str) -> Result<SubdivisionCert, CertError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let bad = |line: usize, message: &str| CertError::Parse {
        line,
        message: message.into(),
    };
    let (hline, header) = lines
        .next()
        .ok_or_else(|| bad(0, "empty certificate, expected \"pattern n m\""))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "pattern" {
        return Err(bad(hline, "expected \"pattern n m\""));
    }
    let n: u32 = toks[1].parse().map_err(|_| bad(hline, "malformed vertex count"))?;
    let m: u32 = toks[2].parse().map_err(|_| bad(hline, "malformed edge count"))?;
    let mut pairs = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| bad(0, "certificate ended inside the pattern edge list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(bad(lno, "expected \"u v\""));
        }
        let u: u32 = toks[0].parse().map_err(|_| bad(lno, "malformed endpoint"))?;
        let v: u32 = toks[1].parse().map_err(|_| bad(lno, "malformed endpoint"))?;
        pairs.push((u, v));
    }
    let pattern = Graph::new(n, &pairs)?;
    let mut branch_vertices = vec![u32::MAX; n as usize];
    for _ in 0..n {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| bad(0, "certificate ended inside the branch vertex list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "branch" {
            return Err(bad(lno, "expected \"branch h v\""));
        }
        let h: usize = toks[1].parse().map_err(|_| bad(lno, "malformed pattern vertex"))?;
        let v: u32 = toks[2].parse().map_err(|_| bad(lno, "malformed host vertex"))?;
        if h >= n as usize || branch_vertices[h] != u32::MAX {
            return Err(bad(lno, "branch line names a bad or repeated pattern vertex"));
        }
        branch_vertices[h] = v;
    }
    let mut branch_paths: Vec<Option<Path>> = vec![None; m as usize];
    for _ in 0..m {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| bad(0, "certificate ended inside the path list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 || toks[0] != "path" || !toks[1].ends_with(':') {
            return Err(bad(lno, "expected \"path e: v0 v1 ...\""));
        }
        let e: usize = toks[1][..toks[1].len() - 1]
            .parse()
            .map_err(|_| bad(lno, "malformed path edge id"))?;
        if e >= m as usize || branch_paths[e].is_some() {
            return Err(bad(lno, "path line names a bad or repeated pattern edge"));
        }
        let mut verts = Vec::with_capacity(toks.len() - 2);
        for t in &toks[2..] {
            verts.push(t.parse().map_err(|_| bad(lno, "malformed path vertex"))?);
        }
        branch_paths[e] = Some(Path::new(verts));
    }
    if let Some((lno, _)) = lines.next() {
        return Err(bad(lno, "unexpected content after the path list"));
    }
    Ok(SubdivisionCert {
        pattern,
        branch_vertices,
        branch_paths: branch_paths.into_iter().map(|p| p.unwrap()).collect(),
    })
}
