use thiserror::Error;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: u32 },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: VertexId },
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Immutable simple graph with dense vertex ids 0..n and stable edge ids.
///
/// Edges are kept normalized (u < v) and lexicographically sorted; an edge's
/// id is its position in that order, so families can store membership as
/// bitsets over edge ids and certificates can name host edges unambiguously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn new(n: u32, pairs: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { vertex: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { vertex: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop { vertex: a });
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge { u: w[0].0, v: w[0].1 });
            }
        }
        let mut adj = vec![Vec::new(); n as usize];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e as usize]
    }

    /// Stable id of the edge between u and v, in either order.
    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(|i| i as EdgeId)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n as usize];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Components as sorted vertex lists, ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n as usize];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start as usize] {
                continue;
            }
            let mut comp = vec![start];
            seen[start as usize] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Breadth-first shortest path with deterministic lowest-id tie-breaking.
    /// When `allowed` is given, only vertices flagged true may be visited
    /// (the endpoints must be allowed too).
    pub fn shortest_path(
        &self,
        from: VertexId,
        to: VertexId,
        allowed: Option<&[bool]>,
    ) -> Option<Path> {
        let ok = |v: VertexId| allowed.map_or(true, |a| a[v as usize]);
        if !ok(from) || !ok(to) {
            return None;
        }
        if from == to {
            return Some(Path::new(vec![from]));
        }
        let mut parent: Vec<Option<VertexId>> = vec![None; self.n as usize];
        let mut queue = std::collections::VecDeque::new();
        parent[from as usize] = Some(from);
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if ok(w) && parent[w as usize].is_none() {
                    parent[w as usize] = Some(v);
                    if w == to {
                        let mut rev = vec![to];
                        let mut cur = v;
                        while cur != from {
                            rev.push(cur);
                            cur = parent[cur as usize].unwrap();
                        }
                        rev.push(from);
                        rev.reverse();
                        return Some(Path::new(rev));
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Parse the edge-list text format: '#' comment lines, then "n m",
    /// then m lines "u v".
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 0,
            message: "empty input, expected a header line \"n m\"".into(),
        })?;
        let mut it = header.split_whitespace();
        let parse_num = |tok: Option<&str>, line: usize, what: &str| -> Result<u32, GraphError> {
            tok.ok_or_else(|| GraphError::Parse {
                line,
                message: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| GraphError::Parse {
                line,
                message: format!("malformed {what}"),
            })
        };
        let n = parse_num(it.next(), header_no, "vertex count")?;
        let m = parse_num(it.next(), header_no, "edge count")?;
        if it.next().is_some() {
            return Err(GraphError::Parse {
                line: header_no,
                message: "trailing tokens after header".into(),
            });
        }
        let mut pairs = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let (line_no, line) = lines.next().ok_or(GraphError::Parse {
                line: 0,
                message: format!("expected {m} edge lines, input ended early"),
            })?;
            let mut it = line.split_whitespace();
            let u = parse_num(it.next(), line_no, "edge endpoint")?;
            let v = parse_num(it.next(), line_no, "edge endpoint")?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "trailing tokens after edge".into(),
                });
            }
            pairs.push((u, v));
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(GraphError::Parse {
                line: line_no,
                message: "unexpected content after the last edge".into(),
            });
        }
        Graph::new(n, &pairs)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// FNV-1a hash of the canonical serialization; used to tie family files
    /// to the host graph they were built for.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in self.serialize().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    /// Subgraph on the given edges; vertices are the edges' endpoints,
    /// renumbered densely in ascending host order.
    pub fn edge_induced(&self, edge_ids: &[EdgeId]) -> Subgraph {
        let mut verts: Vec<VertexId> = Vec::new();
        for &e in edge_ids {
            let (u, v) = self.endpoints(e);
            verts.push(u);
            verts.push(v);
        }
        verts.sort_unstable();
        verts.dedup();
        let mut ids = edge_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        self.subgraph_from(&verts, &ids)
    }

    /// Subgraph induced by a vertex set: all host edges with both endpoints
    /// inside, renumbered densely in ascending host order.
    pub fn induced(&self, vertices: &[VertexId]) -> Subgraph {
        let mut verts = vertices.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let inside = {
            let mut flags = vec![false; self.n as usize];
            for &v in &verts {
                flags[v as usize] = true;
            }
            flags
        };
        let ids: Vec<EdgeId> = (0..self.m())
            .filter(|&e| {
                let (u, v) = self.endpoints(e);
                inside[u as usize] && inside[v as usize]
            })
            .collect();
        self.subgraph_from(&verts, &ids)
    }

    fn subgraph_from(&self, verts: &[VertexId], edge_ids: &[EdgeId]) -> Subgraph {
        let mut host_to_local = vec![u32::MAX; self.n as usize];
        for (i, &v) in verts.iter().enumerate() {
            host_to_local[v as usize] = i as u32;
        }
        let pairs: Vec<(VertexId, VertexId)> = edge_ids
            .iter()
            .map(|&e| {
                let (u, v) = self.endpoints(e);
                (host_to_local[u as usize], host_to_local[v as usize])
            })
            .collect();
        let graph = Graph::new(verts.len() as u32, &pairs)
            .expect("subgraph construction from valid host edges cannot fail");
        // Graph::new sorts edges; rebuild the id map in the sorted order.
        let mut edge_to_host = vec![0; pairs.len()];
        for &e in edge_ids {
            let (u, v) = self.endpoints(e);
            let lu = host_to_local[u as usize];
            let lv = host_to_local[v as usize];
            let local = graph.edge_id(lu, lv).unwrap();
            edge_to_host[local as usize] = e;
        }
        Subgraph {
            graph,
            vertex_to_host: verts.to_vec(),
            edge_to_host,
        }
    }
}

/// A subgraph view: a standalone graph plus maps back to host ids.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub vertex_to_host: Vec<VertexId>,
    pub edge_to_host: Vec<EdgeId>,
}

/// Sequence of pairwise distinct vertices; consecutive pairs are intended
/// to be edges of a host graph (checked by `is_valid_in`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Path {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        Path { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path::new(v)
    }

    pub fn is_valid_in(&self, g: &Graph) -> bool {
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.vertices.len() {
            return false;
        }
        self.edge_pairs().all(|(u, v)| g.has_edge(u, v))
    }
}
