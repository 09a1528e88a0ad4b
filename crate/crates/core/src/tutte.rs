//! Decomposition of a connected graph into a tree of torsos, each
//! 3-connected, a cycle, or a single real edge, glued along separators of
//! size at most two; plus the reverse step that turns torso-level family
//! members back into host-level members by routing every virtual edge
//! through its own side of the tree.

use crate::family::{FamilyError, FamilyMember, SeparatingFamily};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::separators::{flagged_pairs_of_biconnected, is_three_connected};
use crate::subdivision::SubdivisionCert;
use crate::Verdict;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TutteError {
    #[error("decomposition requires a connected graph")]
    Disconnected,
    #[error("decomposition requires at least two vertices")]
    TooSmall,
}

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error("bag {bag} is out of range")]
    BadBag { bag: usize },
    #[error("member {member} must be a single torso edge or a torso subdivision")]
    UnsupportedMember { member: usize },
    #[error("members are declared over a graph other than this bag's torso")]
    WrongTorso,
    #[error("virtual pair {u}-{v} has no incident tree link")]
    MissingLink { u: VertexId, v: VertexId },
    #[error("no replacement route for virtual pair {u}-{v} inside its tree side")]
    NoRoute { u: VertexId, v: VertexId },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    /// A host edge, named by its host edge id.
    Real(EdgeId),
    /// A completion edge standing in for a separator pair that is not
    /// adjacent in the host.
    Virtual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsoKind {
    ThreeConnected,
    Cycle,
    SingleRealEdge,
}

impl TorsoKind {
    pub fn label(&self) -> &'static str {
        match self {
            TorsoKind::ThreeConnected => "three_connected",
            TorsoKind::Cycle => "cycle",
            TorsoKind::SingleRealEdge => "single_real_edge",
        }
    }
}

/// A bag's torso: the subgraph induced on the bag plus one completion edge
/// per non-adjacent separator pair, as a standalone graph over local ids.
#[derive(Clone, Debug)]
pub struct Torso {
    pub graph: Graph,
    /// Local vertex id to host vertex id, ascending.
    pub vertex_to_host: Vec<VertexId>,
    /// Local edge id to its provenance.
    pub edge_tags: Vec<EdgeTag>,
    pub kind: TorsoKind,
}

impl Torso {
    pub fn host_vertex(&self, local: VertexId) -> VertexId {
        self.vertex_to_host[local as usize]
    }

    pub fn local_vertex(&self, host: VertexId) -> Option<VertexId> {
        self.vertex_to_host
            .binary_search(&host)
            .ok()
            .map(|i| i as VertexId)
    }

    /// Local ids of the virtual edges, ascending.
    pub fn virtual_edges(&self) -> Vec<EdgeId> {
        self.edge_tags
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, EdgeTag::Virtual))
            .map(|(e, _)| e as EdgeId)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLink {
    pub a: usize,
    pub b: usize,
    /// One or two host vertices, ascending; always the intersection of the
    /// two bags.
    pub adhesion: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct TutteDecomposition {
    /// Bag id to its host vertex set, ascending.
    pub bags: Vec<Vec<VertexId>>,
    pub torsos: Vec<Torso>,
    pub links: Vec<TreeLink>,
    /// Parent bag per bag; exactly one root carries None.
    pub parent: Vec<Option<usize>>,
    /// Depth-first preorder: every prefix induces a subtree.
    pub order: Vec<usize>,
}

impl TutteDecomposition {
    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    fn bag_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for (i, l) in self.links.iter().enumerate() {
            adj[l.a].push((i, l.b));
            adj[l.b].push((i, l.a));
        }
        adj
    }

    /// Host vertices of the tree side reached from `start` without crossing
    /// link `banned`, sorted.
    fn side_vertices(&self, start: usize, banned: usize) -> Vec<VertexId> {
        let adj = self.bag_adjacency();
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut verts = Vec::new();
        while let Some(t) = stack.pop() {
            verts.extend_from_slice(&self.bags[t]);
            for &(li, other) in &adj[t] {
                if li != banned && !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        verts.sort_unstable();
        verts.dedup();
        verts
    }
}

fn contains_sorted(sorted: &[VertexId], v: VertexId) -> bool {
    sorted.binary_search(&v).is_ok()
}

/// Working subgraph during construction: a local graph whose edges remember
/// whether they are host edges or completions.
#[derive(Clone)]
struct Piece {
    graph: Graph,
    to_host: Vec<VertexId>,
    tags: Vec<EdgeTag>,
}

impl Piece {
    /// Restrict to a vertex subset (local ids) and add a completion edge
    /// between `u` and `v` when the pair is not already adjacent.
    fn restrict(&self, keep: &[VertexId], u: VertexId, v: VertexId) -> Piece {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let local = |x: VertexId| keep.binary_search(&x).unwrap() as VertexId;
        let mut tagged: Vec<((VertexId, VertexId), EdgeTag)> = Vec::new();
        for (e, &(a, b)) in self.graph.edges().iter().enumerate() {
            if contains_sorted(&keep, a) && contains_sorted(&keep, b) {
                tagged.push(((local(a), local(b)), self.tags[e]));
            }
        }
        if self.graph.edge_id(u, v).is_none() {
            let (lu, lv) = (local(u), local(v));
            tagged.push(((lu.min(lv), lu.max(lv)), EdgeTag::Virtual));
        }
        tagged.sort_by_key(|&(pair, _)| pair);
        let pairs: Vec<(VertexId, VertexId)> = tagged.iter().map(|&(p, _)| p).collect();
        let graph = Graph::new(keep.len() as u32, &pairs)
            .expect("restriction of a valid piece stays valid");
        Piece {
            graph,
            to_host: keep.iter().map(|&x| self.to_host[x as usize]).collect(),
            tags: tagged.into_iter().map(|(_, t)| t).collect(),
        }
    }
}

fn classify(graph: &Graph, tags: &[EdgeTag]) -> TorsoKind {
    if graph.n() == 2 && graph.m() == 1 && matches!(tags[0], EdgeTag::Real(_)) {
        return TorsoKind::SingleRealEdge;
    }
    if graph.n() >= 3 && graph.is_connected() && (0..graph.n()).all(|v| graph.degree(v) == 2) {
        return TorsoKind::Cycle;
    }
    TorsoKind::ThreeConnected
}

fn components_after_removal(g: &Graph, removed: &[VertexId]) -> Vec<Vec<VertexId>> {
    let n = g.n() as usize;
    let mut banned = vec![false; n];
    for &v in removed {
        banned[v as usize] = true;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if banned[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s as VertexId];
        let mut queue = std::collections::VecDeque::new();
        seen[s] = true;
        queue.push_back(s as VertexId);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                let wi = w as usize;
                if !banned[wi] && !seen[wi] {
                    seen[wi] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

struct Builder {
    bags: Vec<Vec<VertexId>>,
    torsos: Vec<Torso>,
    links: Vec<TreeLink>,
}

impl Builder {
    fn finalize(&mut self, piece: Piece) -> usize {
        let kind = classify(&piece.graph, &piece.tags);
        debug_assert!(
            kind != TorsoKind::ThreeConnected || is_three_connected(&piece.graph).is_yes(),
            "a piece with no nested separator pair and degree variety must be 3-connected"
        );
        let id = self.bags.len();
        self.bags.push(piece.to_host.clone());
        self.torsos.push(Torso {
            graph: piece.graph,
            vertex_to_host: piece.to_host,
            edge_tags: piece.tags,
            kind,
        });
        id
    }

    /// Split a 2-connected piece along its lexicographically first totally
    /// nested separator pair, recursing into the parts; returns the bag ids
    /// created for this piece, in creation order.
    fn split(&mut self, piece: Piece) -> Vec<usize> {
        if piece.graph.n() >= 4 {
            let mut nested: Vec<(VertexId, VertexId, VertexId, VertexId)> =
                flagged_pairs_of_biconnected(&piece.graph)
                    .into_iter()
                    .filter(|&(_, flag)| flag)
                    .map(|((lu, lv), _)| {
                        let (hu, hv) = (piece.to_host[lu as usize], piece.to_host[lv as usize]);
                        let ((hu, lu), (hv, lv)) = if hu < hv {
                            ((hu, lu), (hv, lv))
                        } else {
                            ((hv, lv), (hu, lu))
                        };
                        (hu, hv, lu, lv)
                    })
                    .collect();
            nested.sort();
            if let Some(&(hu, hv, lu, lv)) = nested.first() {
                let comps = components_after_removal(&piece.graph, &[lu, lv]);
                let mut all_ids = Vec::new();
                let mut anchors = Vec::new();
                for comp in comps {
                    let mut keep = comp;
                    keep.push(lu);
                    keep.push(lv);
                    let part = piece.restrict(&keep, lu, lv);
                    let ids = self.split(part);
                    let anchor = *ids
                        .iter()
                        .find(|&&id| {
                            contains_sorted(&self.bags[id], hu)
                                && contains_sorted(&self.bags[id], hv)
                        })
                        .expect("the separator pair stays adjacent in some bag of its part");
                    anchors.push(anchor);
                    all_ids.extend(ids);
                }
                for &other in &anchors[1..] {
                    self.links.push(TreeLink {
                        a: anchors[0],
                        b: other,
                        adhesion: vec![hu, hv],
                    });
                }
                return all_ids;
            }
        }
        vec![self.finalize(piece)]
    }
}

/// Decompose a connected graph into a tree of bags whose torsos are each
/// 3-connected, a cycle, or a single real edge: cut vertices split the graph
/// into its biconnected blocks, and each block is split recursively along
/// its totally nested separator pairs.
pub fn build_tutte(g: &Graph) -> Result<TutteDecomposition, TutteError> {
    if g.n() < 2 {
        return Err(TutteError::TooSmall);
    }
    if !g.is_connected() {
        return Err(TutteError::Disconnected);
    }
    let decomposition = crate::separators::blocks(g);
    let mut b = Builder {
        bags: Vec::new(),
        torsos: Vec::new(),
        links: Vec::new(),
    };
    let mut block_bags: Vec<Vec<usize>> = Vec::new();
    for edge_ids in &decomposition.block_edges {
        let sub = g.edge_induced(edge_ids);
        let tags = sub
            .edge_to_host
            .iter()
            .map(|&e| EdgeTag::Real(e))
            .collect();
        let piece = Piece {
            graph: sub.graph,
            to_host: sub.vertex_to_host,
            tags,
        };
        block_bags.push(b.split(piece));
    }
    for &v in &decomposition.cut_vertices {
        let holders: Vec<usize> = (0..decomposition.blocks.len())
            .filter(|&i| contains_sorted(&decomposition.blocks[i], v))
            .collect();
        let rep = |block: usize| -> usize {
            *block_bags[block]
                .iter()
                .find(|&&id| contains_sorted(&b.bags[id], v))
                .expect("every block vertex survives into some bag")
        };
        let hub = rep(holders[0]);
        for &other in &holders[1..] {
            b.links.push(TreeLink {
                a: hub,
                b: rep(other),
                adhesion: vec![v],
            });
        }
    }
    // orient the tree from bag 0 and fix the preorder
    let k = b.bags.len();
    let mut adj = vec![Vec::new(); k];
    for l in &b.links {
        adj[l.a].push(l.b);
        adj[l.b].push(l.a);
    }
    for nb in adj.iter_mut() {
        nb.sort_unstable();
    }
    let mut parent = vec![None; k];
    let mut seen = vec![false; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &nb in adj[t].iter().rev() {
            if !seen[nb] {
                seen[nb] = true;
                parent[nb] = Some(t);
                stack.push(nb);
            }
        }
    }
    Ok(TutteDecomposition {
        bags: b.bags,
        torsos: b.torsos,
        links: b.links,
        parent,
        order,
    })
}

/// Check every decomposition invariant directly against the definition,
/// independent of how the decomposition was produced.
pub fn verify_tutte(g: &Graph, d: &TutteDecomposition) -> Verdict {
    let k = d.bags.len();
    if k == 0 {
        return Verdict::fail("decomposition has no bags");
    }
    if d.torsos.len() != k || d.parent.len() != k || d.order.len() != k {
        return Verdict::fail("bag, torso, parent, and order tables differ in length");
    }
    for (t, bag) in d.bags.iter().enumerate() {
        if bag.is_empty() {
            return Verdict::fail(format!("bag {t} is empty"));
        }
        if bag.windows(2).any(|w| w[0] >= w[1]) || bag.iter().any(|&v| v >= g.n()) {
            return Verdict::fail(format!("bag {t} is not a sorted set of host vertices"));
        }
    }
    // tree shape
    let roots: Vec<usize> = (0..k).filter(|&t| d.parent[t].is_none()).collect();
    if roots.len() != 1 {
        return Verdict::fail(format!("expected one root bag, found {}", roots.len()));
    }
    if d.links.len() != k - 1 {
        return Verdict::fail(format!(
            "a tree on {k} bags needs {} links, found {}",
            k - 1,
            d.links.len()
        ));
    }
    for l in &d.links {
        if l.a >= k || l.b >= k || l.a == l.b {
            return Verdict::fail("link endpoints are not two distinct bags");
        }
        let oriented = d.parent[l.b] == Some(l.a) || d.parent[l.a] == Some(l.b);
        if !oriented {
            return Verdict::fail(format!(
                "link {}-{} does not match any parent relation",
                l.a, l.b
            ));
        }
    }
    let adj = d.bag_adjacency();
    let mut seen = vec![false; k];
    let mut stack = vec![roots[0]];
    seen[roots[0]] = true;
    let mut reached = 1;
    while let Some(t) = stack.pop() {
        for &(_, other) in &adj[t] {
            if !seen[other] {
                seen[other] = true;
                reached += 1;
                stack.push(other);
            }
        }
    }
    if reached != k {
        return Verdict::fail("links do not connect all bags into one tree");
    }
    // preorder gives prefix subtrees
    {
        let mut placed = vec![false; k];
        let mut first = true;
        for &t in &d.order {
            if !first {
                let touches = adj[t].iter().any(|&(_, other)| placed[other]);
                if !touches {
                    return Verdict::fail(format!(
                        "bag {t} appears in the order before any neighbor"
                    ));
                }
            }
            placed[t] = true;
            first = false;
        }
        if d.order.len() != k || placed.iter().any(|p| !p) {
            return Verdict::fail("order is not a permutation of the bags");
        }
    }
    // adhesion sets are the bag intersections and have size at most two
    for l in &d.links {
        let inter: Vec<VertexId> = d.bags[l.a]
            .iter()
            .copied()
            .filter(|&v| contains_sorted(&d.bags[l.b], v))
            .collect();
        if l.adhesion != inter {
            return Verdict::fail(format!(
                "link {}-{} stores adhesion {:?} but the bags intersect in {:?}",
                l.a, l.b, l.adhesion, inter
            ));
        }
        if inter.is_empty() || inter.len() > 2 {
            return Verdict::fail(format!(
                "link {}-{} violates adhesion at most two: {:?}",
                l.a, l.b, inter
            ));
        }
    }
    // every edge in some bag
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let covered = d
            .bags
            .iter()
            .any(|bag| contains_sorted(bag, u) && contains_sorted(bag, v));
        if !covered {
            return Verdict::fail(format!("edge {e} ({u}-{v}) lies in no bag"));
        }
    }
    // every vertex induces a non-empty subtree
    for v in 0..g.n() {
        let holders: Vec<usize> = (0..k)
            .filter(|&t| contains_sorted(&d.bags[t], v))
            .collect();
        if holders.is_empty() {
            return Verdict::fail(format!("vertex {v} lies in no bag"));
        }
        let mut seen = vec![false; k];
        let mut stack = vec![holders[0]];
        seen[holders[0]] = true;
        let mut count = 1;
        while let Some(t) = stack.pop() {
            for &(_, other) in &adj[t] {
                if !seen[other]
                    && contains_sorted(&d.bags[other], v)
                {
                    seen[other] = true;
                    count += 1;
                    stack.push(other);
                }
            }
        }
        if count != holders.len() {
            return Verdict::fail(format!("bags containing vertex {v} are not a subtree"));
        }
    }
    // torsos are exactly the induced subgraph plus completions, kinds match
    for t in 0..k {
        let torso = &d.torsos[t];
        if torso.vertex_to_host != d.bags[t] {
            return Verdict::fail(format!("torso {t} vertex map differs from its bag"));
        }
        if torso.edge_tags.len() != torso.graph.m() as usize {
            return Verdict::fail(format!("torso {t} tag table differs from its edge count"));
        }
        let local = |host: VertexId| torso.local_vertex(host).unwrap();
        let mut expected: std::collections::BTreeMap<(VertexId, VertexId), EdgeTag> =
            std::collections::BTreeMap::new();
        for &u in &d.bags[t] {
            for &v in &d.bags[t] {
                if u < v {
                    if let Some(e) = g.edge_id(u, v) {
                        let (lu, lv) = (local(u), local(v));
                        expected.insert((lu.min(lv), lu.max(lv)), EdgeTag::Real(e));
                    }
                }
            }
        }
        for l in &d.links {
            if (l.a == t || l.b == t) && l.adhesion.len() == 2 {
                let (u, v) = (l.adhesion[0], l.adhesion[1]);
                if g.edge_id(u, v).is_none() {
                    let (lu, lv) = (local(u), local(v));
                    expected.insert((lu.min(lv), lu.max(lv)), EdgeTag::Virtual);
                }
            }
        }
        if expected.len() != torso.graph.m() as usize {
            return Verdict::fail(format!(
                "torso {t} has {} edges but the bag induces {}",
                torso.graph.m(),
                expected.len()
            ));
        }
        for (e, &(a, b)) in torso.graph.edges().iter().enumerate() {
            match expected.get(&(a, b)) {
                Some(tag) if *tag == torso.edge_tags[e] => {}
                Some(tag) => {
                    return Verdict::fail(format!(
                        "torso {t} edge {a}-{b} is tagged {:?} but should be {:?}",
                        torso.edge_tags[e], tag
                    ));
                }
                None => {
                    return Verdict::fail(format!(
                        "torso {t} edge {a}-{b} is neither induced nor a completion"
                    ));
                }
            }
        }
        let recomputed = classify(&torso.graph, &torso.edge_tags);
        let valid = match torso.kind {
            TorsoKind::SingleRealEdge => recomputed == TorsoKind::SingleRealEdge,
            TorsoKind::Cycle => recomputed == TorsoKind::Cycle,
            TorsoKind::ThreeConnected => {
                recomputed == TorsoKind::ThreeConnected
                    && is_three_connected(&torso.graph).is_yes()
            }
        };
        if !valid {
            return Verdict::fail(format!(
                "torso {t} classification {} does not match its structure",
                torso.kind.label()
            ));
        }
    }
    // each side of a non-adjacent separator pair carries its own route
    for (li, l) in d.links.iter().enumerate() {
        if l.adhesion.len() != 2 {
            continue;
        }
        let (u, v) = (l.adhesion[0], l.adhesion[1]);
        if g.edge_id(u, v).is_some() {
            continue;
        }
        for side_of in [l.a, l.b] {
            let verts = d.side_vertices(side_of, li);
            let mut allowed = vec![false; g.n() as usize];
            for &x in &verts {
                allowed[x as usize] = true;
            }
            if g.shortest_path(u, v, Some(&allowed)).is_none() {
                return Verdict::fail(format!(
                    "virtual pair {u}-{v} has no route inside the side of bag {side_of}"
                ));
            }
        }
    }
    Verdict::Pass
}

/// Turn a family over one bag's torso into a family over the host graph:
/// real single edges survive under their host id, virtual single edges are
/// dropped, and every virtual edge inside a subdivision member is replaced
/// by the shortest route through its own side of the decomposition tree.
pub fn realize_members(
    g: &Graph,
    d: &TutteDecomposition,
    bag: usize,
    members: &SeparatingFamily,
) -> Result<SeparatingFamily, RealizeError> {
    if bag >= d.bags.len() {
        return Err(RealizeError::BadBag { bag });
    }
    let torso = &d.torsos[bag];
    if members.host_fingerprint() != torso.graph.fingerprint() {
        return Err(RealizeError::WrongTorso);
    }
    // one deterministic replacement route per virtual pair: the first
    // incident link with that adhesion, routed through its far side
    let mut routes: std::collections::HashMap<(VertexId, VertexId), Path> =
        std::collections::HashMap::new();
    for e in torso.virtual_edges() {
        let (la, lb) = torso.graph.endpoints(e);
        let (ha, hb) = (torso.host_vertex(la), torso.host_vertex(lb));
        let key = (ha.min(hb), ha.max(hb));
        let link_idx = d
            .links
            .iter()
            .position(|l| (l.a == bag || l.b == bag) && l.adhesion == vec![key.0, key.1])
            .ok_or(RealizeError::MissingLink { u: key.0, v: key.1 })?;
        let far = if d.links[link_idx].a == bag {
            d.links[link_idx].b
        } else {
            d.links[link_idx].a
        };
        let side = d.side_vertices(far, link_idx);
        let mut allowed = vec![false; g.n() as usize];
        for &x in &side {
            allowed[x as usize] = true;
        }
        let route = g
            .shortest_path(key.0, key.1, Some(&allowed))
            .ok_or(RealizeError::NoRoute { u: key.0, v: key.1 })?;
        routes.insert(key, route);
    }
    let mut realized = Vec::new();
    for (idx, member) in members.members().iter().enumerate() {
        match member {
            FamilyMember::SingleEdge(e) => {
                if *e >= torso.graph.m() {
                    return Err(RealizeError::UnsupportedMember { member: idx });
                }
                match torso.edge_tags[*e as usize] {
                    EdgeTag::Real(host) => realized.push(FamilyMember::SingleEdge(host)),
                    EdgeTag::Virtual => {}
                }
            }
            FamilyMember::Subdivision(cert) => {
                realized.push(FamilyMember::Subdivision(realize_cert(
                    torso, &routes, cert,
                )));
            }
            _ => return Err(RealizeError::UnsupportedMember { member: idx }),
        }
    }
    Ok(SeparatingFamily::new(g, realized)?)
}

fn realize_cert(
    torso: &Torso,
    routes: &std::collections::HashMap<(VertexId, VertexId), Path>,
    cert: &SubdivisionCert,
) -> SubdivisionCert {
    let host = |local: VertexId| torso.host_vertex(local);
    let branch_vertices: Vec<VertexId> =
        cert.branch_vertices.iter().map(|&v| host(v)).collect();
    let branch_paths: Vec<Path> = cert
        .branch_paths
        .iter()
        .map(|p| {
            let verts = p.vertices();
            let mut out = vec![host(verts[0])];
            for w in verts.windows(2) {
                let (x, y) = (w[0], w[1]);
                let e = torso
                    .graph
                    .edge_id(x, y)
                    .expect("certificate paths walk torso edges");
                match torso.edge_tags[e as usize] {
                    EdgeTag::Real(_) => out.push(host(y)),
                    EdgeTag::Virtual => {
                        let (hx, hy) = (host(x), host(y));
                        let key = (hx.min(hy), hx.max(hy));
                        let route = &routes[&key];
                        let rv = route.vertices();
                        if rv[0] == hx {
                            out.extend_from_slice(&rv[1..]);
                        } else {
                            out.extend(rv[..rv.len() - 1].iter().rev().copied());
                        }
                    }
                }
            }
            Path::new(out)
        })
        .collect();
    SubdivisionCert {
        pattern: cert.pattern.clone(),
        branch_vertices,
        branch_paths,
    }
}

/// Text dump: bags with kinds and vertices, links with adhesions, virtual
/// edges with host endpoints.
pub fn dump_decomposition(d: &TutteDecomposition) -> String {
    let list = |ids: &[VertexId]| {
        ids.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = String::new();
    for (t, bag) in d.bags.iter().enumerate() {
        out.push_str(&format!(
            "bag {t} kind={} vertices={}\n",
            d.torsos[t].kind.label(),
            list(bag)
        ));
    }
    for l in &d.links {
        out.push_str(&format!(
            "link {} {} adhesion={}\n",
            l.a,
            l.b,
            list(&l.adhesion)
        ));
    }
    for (t, torso) in d.torsos.iter().enumerate() {
        for e in torso.virtual_edges() {
            let (a, b) = torso.graph.endpoints(e);
            let (ha, hb) = (torso.host_vertex(a), torso.host_vertex(b));
            out.push_str(&format!("virtual {t} {} {}\n", ha.min(hb), ha.max(hb)));
        }
    }
    out
}

/// DOT rendering of the decomposition tree for figures.
pub fn decomposition_dot(d: &TutteDecomposition) -> String {
    let mut out = String::from("graph decomposition {\n  node [shape=box];\n");
    for (t, bag) in d.bags.iter().enumerate() {
        let verts = bag
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "  b{t} [label=\"{t}: {}\\n{{{verts}}}\"];\n",
            d.torsos[t].kind.label()
        ));
    }
    for l in &d.links {
        let adhesion = l
            .adhesion
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("  b{} -- b{} [label=\"{adhesion}\"];\n", l.a, l.b));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{check_strong_separation, SeparationVerdict};
    use crate::gen;

    fn built(g: &Graph) -> TutteDecomposition {
        let d = build_tutte(g).unwrap();
        assert_eq!(verify_tutte(g, &d), Verdict::Pass, "self-check on {:?}", g.edges());
        d
    }

    #[test]
    fn cycle_is_a_single_cycle_bag() {
        let g = gen::cycle(7);
        let d = built(&g);
        assert_eq!(d.bag_count(), 1);
        assert_eq!(d.torsos[0].kind, TorsoKind::Cycle);
        assert!(d.links.is_empty());
    }

    #[test]
    fn k4_is_a_single_three_connected_bag() {
        let g = gen::complete(4);
        let d = built(&g);
        assert_eq!(d.bag_count(), 1);
        assert_eq!(d.torsos[0].kind, TorsoKind::ThreeConnected);
    }

    #[test]
    fn two_triangles_sharing_an_edge_give_two_bags_with_the_real_edge_in_both() {
        let g = gen::two_triangles();
        let d = built(&g);
        assert_eq!(d.bag_count(), 2);
        assert_eq!(d.bags[0], vec![0, 1, 2]);
        assert_eq!(d.bags[1], vec![0, 1, 3]);
        assert_eq!(d.links.len(), 1);
        assert_eq!(d.links[0].adhesion, vec![0, 1]);
        for torso in &d.torsos {
            assert_eq!(torso.kind, TorsoKind::Cycle);
            assert!(
                torso.virtual_edges().is_empty(),
                "the shared edge is real, so both torsos keep it without completions"
            );
            let e = torso.graph.edge_id(0, 1).expect("shared pair is adjacent locally");
            assert_eq!(torso.edge_tags[e as usize], EdgeTag::Real(0));
        }
    }

    #[test]
    fn theta_gives_three_triangle_bags_with_a_virtual_hub_pair() {
        let g = gen::theta();
        let d = built(&g);
        assert_eq!(d.bag_count(), 3);
        for torso in &d.torsos {
            assert_eq!(torso.kind, TorsoKind::Cycle);
            assert_eq!(torso.virtual_edges().len(), 1);
        }
        for l in &d.links {
            assert_eq!(l.adhesion, vec![0, 1]);
        }
        let dump = dump_decomposition(&d);
        assert!(dump.contains("bag 0 kind=cycle vertices=0,1,2"));
        assert!(dump.contains("virtual 0 0 1"));
        assert!(dump.contains("adhesion=0,1"));
    }

    #[test]
    fn chorded_hexagon_splits_at_the_chord_into_two_squares() {
        let mut edges: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.push((0, 3));
        let g = Graph::new(6, &edges).unwrap();
        let d = built(&g);
        assert_eq!(d.bag_count(), 2);
        for torso in &d.torsos {
            assert_eq!(torso.kind, TorsoKind::Cycle);
            assert_eq!(torso.graph.n(), 4);
            assert!(torso.virtual_edges().is_empty(), "the chord is a real edge");
        }
        assert_eq!(d.links[0].adhesion, vec![0, 3]);
    }

    #[test]
    fn subdivided_k4_yields_a_three_connected_bag_and_a_triangle() {
        // K_4 on 0..4 with edge 2-3 replaced by the path 2-4-3
        let g = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        let d = built(&g);
        assert_eq!(d.bag_count(), 2);
        let kinds: Vec<TorsoKind> = d.torsos.iter().map(|t| t.kind).collect();
        assert!(kinds.contains(&TorsoKind::ThreeConnected));
        assert!(kinds.contains(&TorsoKind::Cycle));
        for torso in &d.torsos {
            assert_eq!(torso.virtual_edges().len(), 1, "pair 2,3 is non-adjacent");
        }
    }

    #[test]
    fn trees_decompose_into_single_edge_bags() {
        let g = gen::random_tree(8, 5);
        let d = built(&g);
        assert_eq!(d.bag_count(), 7);
        for torso in &d.torsos {
            assert_eq!(torso.kind, TorsoKind::SingleRealEdge);
        }
        for l in &d.links {
            assert_eq!(l.adhesion.len(), 1);
        }
    }

    #[test]
    fn size_accounting_holds_on_random_graphs() {
        for seed in 0..12u64 {
            let n = 4 + (seed as u32 % 7);
            let m = n + seed as u32 % 5;
            let g = gen::random_connected(n, m.min(n * (n - 1) / 2), seed);
            let d = built(&g);
            let k = d.bag_count();
            assert!(k <= n as usize, "bag count {k} exceeds n={n}");
            let total: usize = d.bags.iter().map(|b| b.len()).sum();
            assert!(
                total <= 3 * n as usize,
                "bag sizes sum to {total} on n={n}"
            );
        }
    }

    #[test]
    fn adhesions_match_the_oracle_flags() {
        for seed in [1u64, 4, 9] {
            let g = gen::random_connected(9, 12, seed);
            let d = built(&g);
            let mut adhesions: Vec<Vec<VertexId>> =
                d.links.iter().map(|l| l.adhesion.clone()).collect();
            adhesions.sort();
            adhesions.dedup();
            let mut flagged: Vec<Vec<VertexId>> =
                crate::separators::two_separators_bruteforce(&g, None)
                    .unwrap()
                    .into_iter()
                    .filter(|s| s.totally_nested)
                    .map(|s| s.vertices)
                    .collect();
            flagged.sort();
            assert_eq!(adhesions, flagged, "seed {seed}");
        }
    }

    #[test]
    fn verify_rejects_oversized_adhesion() {
        let g = gen::complete(4);
        let mut d = built(&g);
        // graft a fake second bag overlapping in three vertices
        d.bags.push(vec![0, 1, 2]);
        let sub = g.induced(&[0, 1, 2]);
        let tags = sub.edge_to_host.iter().map(|&e| EdgeTag::Real(e)).collect();
        d.torsos.push(Torso {
            graph: sub.graph,
            vertex_to_host: sub.vertex_to_host,
            edge_tags: tags,
            kind: TorsoKind::Cycle,
        });
        d.parent.push(Some(0));
        d.links.push(TreeLink { a: 0, b: 1, adhesion: vec![0, 1, 2] });
        d.order.push(1);
        let verdict = verify_tutte(&g, &d);
        match verdict {
            Verdict::Fail(msg) => assert!(
                msg.contains("adhesion"),
                "failure should name the adhesion clause, got: {msg}"
            ),
            Verdict::Pass => panic!("three-vertex adhesion must fail"),
        }
    }

    #[test]
    fn verify_rejects_mislabeled_torso() {
        let g = gen::path(4);
        let tags = (0..3).map(|e| EdgeTag::Real(e)).collect();
        let d = TutteDecomposition {
            bags: vec![vec![0, 1, 2, 3]],
            torsos: vec![Torso {
                graph: g.clone(),
                vertex_to_host: vec![0, 1, 2, 3],
                edge_tags: tags,
                kind: TorsoKind::Cycle,
            }],
            links: vec![],
            parent: vec![None],
            order: vec![0],
        };
        match verify_tutte(&g, &d) {
            Verdict::Fail(msg) => assert!(
                msg.contains("classification"),
                "failure should name the classification clause, got: {msg}"
            ),
            Verdict::Pass => panic!("a path is not a cycle torso"),
        }
    }

    #[test]
    fn realize_routes_theta_virtual_edge_through_lowest_side() {
        let g = gen::theta();
        let d = built(&g);
        let bag = (0..d.bag_count())
            .find(|&t| d.bags[t] == vec![0, 1, 2])
            .expect("the hub-and-2 triangle is a bag");
        let torso = &d.torsos[bag];
        // the torso triangle as a subdivision certificate
        let tg = &torso.graph;
        let cert = SubdivisionCert::oriented(
            gen::complete(3),
            vec![0, 1, 2],
            tg.edges()
                .iter()
                .map(|&(a, b)| Path::new(vec![a, b]))
                .collect(),
        );
        let members =
            SeparatingFamily::new(tg, vec![FamilyMember::Subdivision(cert)]).unwrap();
        let realized = realize_members(&g, &d, bag, &members).unwrap();
        assert_eq!(realized.len(), 1);
        let FamilyMember::Subdivision(out) = &realized.members()[0] else {
            panic!("expected a subdivision member");
        };
        assert_eq!(
            crate::subdivision::verify_subdivision(&g, out),
            Verdict::Pass
        );
        let hub_path = out
            .branch_paths
            .iter()
            .find(|p| p.len() == 2)
            .expect("the virtual hub pair becomes a length-2 route");
        assert_eq!(
            hub_path.vertices()[1],
            3,
            "route through vertex 3 beats vertex 4 on id order"
        );
    }

    #[test]
    fn realize_keeps_real_singles_and_drops_virtual_ones() {
        let g = gen::theta();
        let d = built(&g);
        let bag = (0..d.bag_count())
            .find(|&t| d.bags[t] == vec![0, 1, 2])
            .unwrap();
        let torso = &d.torsos[bag];
        let virtual_edge = torso.virtual_edges()[0];
        let real_edge = (0..torso.graph.m())
            .find(|&e| matches!(torso.edge_tags[e as usize], EdgeTag::Real(_)))
            .unwrap();
        let members = SeparatingFamily::new(
            &torso.graph,
            vec![
                FamilyMember::SingleEdge(real_edge),
                FamilyMember::SingleEdge(virtual_edge),
            ],
        )
        .unwrap();
        let realized = realize_members(&g, &d, bag, &members).unwrap();
        assert_eq!(realized.len(), 1, "the virtual single edge is dropped");
        let &FamilyMember::SingleEdge(e) = &realized.members()[0] else {
            panic!("expected a single edge member");
        };
        let EdgeTag::Real(host) = torso.edge_tags[real_edge as usize] else {
            unreachable!()
        };
        assert_eq!(e, host);
    }

    #[test]
    fn realized_triangle_families_separate_each_bag_in_the_host() {
        // all-singles family per torso, realized and merged, then checked on
        // each bag's real edges
        let g = gen::theta();
        let d = built(&g);
        for bag in 0..d.bag_count() {
            let torso = &d.torsos[bag];
            let members: Vec<FamilyMember> =
                (0..torso.graph.m()).map(FamilyMember::SingleEdge).collect();
            let fam = SeparatingFamily::new(&torso.graph, members).unwrap();
            let realized = realize_members(&g, &d, bag, &fam).unwrap();
            let ground: Vec<EdgeId> = torso
                .edge_tags
                .iter()
                .filter_map(|t| match t {
                    EdgeTag::Real(e) => Some(*e),
                    EdgeTag::Virtual => None,
                })
                .collect();
            assert_eq!(
                check_strong_separation(&ground, &realized),
                SeparationVerdict::Pass
            );
        }
    }

    #[test]
    fn prefix_subtree_order_on_a_star_of_triangles() {
        // four triangles glued at one shared vertex
        let mut edges = Vec::new();
        for i in 0..4u32 {
            let a = 1 + 2 * i;
            let b = 2 + 2 * i;
            edges.push((0, a));
            edges.push((0, b));
            edges.push((a, b));
        }
        let g = Graph::new(9, &edges).unwrap();
        let d = built(&g);
        assert_eq!(d.bag_count(), 4);
        assert_eq!(d.order[0], 0);
    }

    #[test]
    fn dot_export_names_every_bag() {
        let d = built(&gen::theta());
        let dot = decomposition_dot(&d);
        assert!(dot.starts_with("graph decomposition {"));
        for t in 0..d.bag_count() {
            assert!(dot.contains(&format!("b{t} [label=")));
        }
    }
}
