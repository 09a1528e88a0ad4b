//! The two headline constructions. For a 3-connected host: find a balanced
//! complete-graph subdivision, split it into four quarters, separate the
//! edges away from each quarter with cycles and single edges, and convert
//! every cycle into six pattern subdivisions anchored in the quarter. For a
//! general connected host: decompose into torsos, run the 3-connected
//! construction per torso, and realize the members back in the host.

use crate::cycles::build_sub_k3_system;
use crate::family::{all_singles, FamilyError, FamilyMember, SeparatingFamily};
use crate::flow::disjoint_paths_distinct;
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::separators::is_three_connected;
use crate::subdivision::{
    find_balanced_clique_subdivision, quarter_split, SearchResult, SubdivisionCert,
};
use crate::tutte::{build_tutte, realize_members, RealizeError, TorsoKind, TutteError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("host graph must be 3-connected")]
    NotThreeConnected,
    #[error("pattern graph needs at least one edge")]
    PatternEdgeless,
    #[error("host graph has no vertices")]
    EmptyHost,
    #[error("embedding needs {needed} branch vertices but only {available} are usable")]
    EmbedTooSmall { needed: u32, available: u32 },
    #[error(transparent)]
    Tutte(#[from] TutteError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Constant in the reported average-degree threshold c*(4t+8)^2. The
    /// threshold is informational; the fallback is triggered by the
    /// subdivision search itself failing, which is always sound.
    pub c_balance: f64,
    /// Node budget for the balanced-subdivision search.
    pub budget: u64,
    /// Pattern edge whose branch path is routed over the cycle in derived
    /// members; None picks the lexicographically first edge.
    pub fixed_edge: Option<EdgeId>,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            c_balance: 1.0,
            budget: 2_000_000,
            fixed_edge: None,
        }
    }
}

/// How one 3-connected run went, for reports and sanity checks.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub fallback: bool,
    /// Vertex count of the host the run was given.
    pub host_vertex_count: usize,
    /// Common branch path length of the balanced subdivision, when found.
    pub ell: Option<usize>,
    pub average_degree: f64,
    pub degree_threshold: f64,
    /// Size of the cycle-and-edge system per quarter (empty on fallback).
    pub cycle_system_sizes: Vec<usize>,
    /// Vertex count of each quarter's away subgraph (empty on fallback).
    pub away_vertex_counts: Vec<usize>,
    pub derived_subdivisions: usize,
    pub single_edges: usize,
    /// One gadget per cycle member, in emission order (empty on fallback).
    pub gadgets: Vec<DerivedGadget>,
}

/// Everything produced while turning one cycle into six pattern
/// subdivisions anchored in a quarter subdivision.
#[derive(Clone, Debug)]
pub struct DerivedGadget {
    /// Host cycle as a closed vertex sequence.
    pub cycle: Vec<VertexId>,
    /// Where the three connectors leave the cycle.
    pub anchors: [VertexId; 3],
    /// Where the three connectors land on the quarter.
    pub landings: [VertexId; 3],
    /// Connector paths, anchor to landing.
    pub connectors: [Path; 3],
    /// Cycle arcs between anchor pairs (0,1), (0,2), (1,2), each avoiding
    /// the third anchor.
    pub arcs: [Path; 3],
    /// Branch-vertex ends (u, v) chosen for each anchor pair.
    pub pair_ends: [(VertexId, VertexId); 3],
    /// The six members: plain and rerouted variant per anchor pair.
    pub members: Vec<SubdivisionCert>,
}

/// Place the pattern minus one edge onto the branch vertices of a complete
/// subdivision: `f`'s endpoints go to `u` and `v`, every other pattern
/// vertex goes to the lowest usable branch vertex outside `excluded`, and
/// each remaining pattern edge rides the corresponding branch path.
pub fn embed_h_minus_f(
    kr: &SubdivisionCert,
    h: &Graph,
    f: EdgeId,
    u: VertexId,
    v: VertexId,
    excluded: &[VertexId],
) -> Result<SubdivisionCert, PipelineError> {
    assert!(f < h.m(), "f must be an edge of the pattern");
    assert!(u != v, "f needs two distinct endpoints");
    assert!(
        excluded.len() <= 2 && !excluded.contains(&u) && !excluded.contains(&v),
        "at most two excluded ends, never u or v"
    );
    let branch = &kr.branch_vertices;
    let pattern_index = |host: VertexId| -> u32 {
        branch
            .iter()
            .position(|&b| b == host)
            .expect("u and v must be branch vertices of the host subdivision") as u32
    };
    let _ = (pattern_index(u), pattern_index(v));
    let usable: Vec<VertexId> = branch
        .iter()
        .copied()
        .filter(|b| *b != u && *b != v && !excluded.contains(b))
        .collect();
    let needed = h.n().saturating_sub(2);
    if (usable.len() as u32) < needed {
        return Err(PipelineError::EmbedTooSmall {
            needed: h.n(),
            available: usable.len() as u32 + 2,
        });
    }
    let (f0, f1) = h.endpoints(f);
    let mut images: Vec<VertexId> = vec![0; h.n() as usize];
    images[f0 as usize] = u;
    images[f1 as usize] = v;
    let mut next = usable.into_iter();
    for w in 0..h.n() {
        if w != f0 && w != f1 {
            images[w as usize] = next.next().unwrap();
        }
    }
    let remaining: Vec<(VertexId, VertexId)> = h
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| e as EdgeId != f)
        .map(|(_, &pair)| pair)
        .collect();
    let pattern = Graph::new(h.n(), &remaining).expect("pattern minus an edge stays simple");
    let paths: Vec<Path> = pattern
        .edges()
        .iter()
        .map(|&(a, b)| {
            kr.path_between(
                pattern_index(images[a as usize]),
                pattern_index(images[b as usize]),
            )
            .expect("the host subdivision pattern is complete")
        })
        .collect();
    Ok(SubdivisionCert::oriented(pattern, images, paths))
}

/// Subpath of the closed cycle `c` from position `from` to position `to`
/// that avoids position `avoid`.
fn cycle_arc(c: &[VertexId], from: usize, to: usize, avoid: usize) -> Path {
    let l = c.len();
    let hits = |step: usize| {
        let mut i = from;
        loop {
            i = (i + l + step) % l;
            if i == to {
                return false;
            }
            if i == avoid {
                return true;
            }
        }
    };
    let step = if hits(1) { l - 1 } else { 1 };
    let mut out = vec![c[from]];
    let mut i = from;
    while i != to {
        i = (i + step) % l;
        out.push(c[i]);
    }
    Path::new(out)
}

/// Concatenate path fragments whose ends agree into one path.
fn splice(parts: &[Vec<VertexId>]) -> Path {
    let mut out: Vec<VertexId> = parts[0].clone();
    for part in &parts[1..] {
        assert_eq!(
            *out.last().unwrap(),
            part[0],
            "spliced fragments must share their meeting vertex"
        );
        out.extend_from_slice(&part[1..]);
    }
    Path::new(out)
}

/// Portion of a branch path from `a` to `b` (both on the path).
fn path_segment(p: &Path, a: VertexId, b: VertexId) -> Vec<VertexId> {
    let vs = p.vertices();
    let pa = vs.iter().position(|&x| x == a).expect("segment start on path");
    let pb = vs.iter().position(|&x| x == b).expect("segment end on path");
    if pa <= pb {
        vs[pa..=pb].to_vec()
    } else {
        let mut seg = vs[pb..=pa].to_vec();
        seg.reverse();
        seg
    }
}

/// Derive six pattern subdivisions from one cycle: three disjoint
/// connectors join the cycle to the quarter subdivision, the cycle splits
/// into three arcs, and each anchor pair contributes two members whose
/// `f`-branch path runs over an arc (plain) or over the other two arcs
/// (rerouted). Panics if the three connectors do not exist; a 3-connected
/// host always has them.
pub fn derive_six(
    g: &Graph,
    cycle: &[VertexId],
    kr: &SubdivisionCert,
    h: &Graph,
    cfg: &PipelineConfig,
) -> Result<DerivedGadget, PipelineError> {
    assert!(cycle.len() >= 3, "a cycle has at least three vertices");
    let kr_vertices = kr.vertices();
    let mut cycle_sorted = cycle.to_vec();
    cycle_sorted.sort_unstable();
    debug_assert!(
        cycle_sorted
            .iter()
            .all(|v| kr_vertices.binary_search(v).is_err()),
        "the cycle must avoid the quarter subdivision"
    );
    let connectors: Vec<Path> = disjoint_paths_distinct(g, &cycle_sorted, &kr_vertices, 3)
        .expect("a 3-connected host always yields three disjoint connector paths");
    let anchors = [
        connectors[0].first(),
        connectors[1].first(),
        connectors[2].first(),
    ];
    let landings = [
        connectors[0].last(),
        connectors[1].last(),
        connectors[2].last(),
    ];
    let pos = anchors.map(|x| {
        cycle
            .iter()
            .position(|&c| c == x)
            .expect("anchors lie on the cycle")
    });

    // arcs for pairs (0,1), (0,2), (1,2), oriented first anchor to second
    let pair_of = |slot: usize| -> (usize, usize, usize) {
        match slot {
            0 => (0, 1, 2),
            1 => (0, 2, 1),
            _ => (1, 2, 0),
        }
    };
    let arcs: [Path; 3] = std::array::from_fn(|slot| {
        let (i, j, k) = pair_of(slot);
        cycle_arc(cycle, pos[i], pos[j], pos[k])
    });

    // branch path of the quarter that carries each landing
    let is_branch = |x: VertexId| kr.branch_vertices.contains(&x);
    let q_of: [u32; 3] = std::array::from_fn(|i| {
        let y = landings[i];
        let owner = (0..kr.pattern.m()).find(|&e| {
            let vs = kr.branch_paths[e as usize].vertices();
            if is_branch(y) {
                vs[0] == y || *vs.last().unwrap() == y
            } else {
                vs[1..vs.len() - 1].contains(&y)
            }
        });
        owner.expect("every landing lies on some branch path")
    });

    let f = cfg.fixed_edge.unwrap_or(0);
    assert!(f < h.m(), "fixed edge must be an edge of the pattern");
    let (f0, f1) = h.endpoints(f);

    let mut pair_ends = [(0, 0); 3];
    let mut members = Vec::with_capacity(6);
    for slot in 0..3 {
        let (i, j, _) = pair_of(slot);
        let (qi, qj) = (q_of[i], q_of[j]);
        let qi_path = &kr.branch_paths[qi as usize];
        let qj_path = &kr.branch_paths[qj as usize];
        let ends_i = [qi_path.first(), qi_path.last()];
        let ends_j = [qj_path.first(), qj_path.last()];
        let (u, v) = if qi == qj {
            let vs = qi_path.vertices();
            let pi = vs.iter().position(|&x| x == landings[i]).unwrap();
            let pj = vs.iter().position(|&x| x == landings[j]).unwrap();
            if pi <= pj {
                (qi_path.first(), qi_path.last())
            } else {
                (qi_path.last(), qi_path.first())
            }
        } else {
            let forced_u = is_branch(landings[i]).then_some(landings[i]);
            let forced_v = is_branch(landings[j]).then_some(landings[j]);
            let pick = |ends: [VertexId; 2], other: [VertexId; 2], banned: Option<VertexId>| {
                let mut cands: Vec<VertexId> = ends
                    .iter()
                    .copied()
                    .filter(|e| Some(*e) != banned)
                    .collect();
                cands.sort_by_key(|e| (other.contains(e), *e));
                cands[0]
            };
            match (forced_u, forced_v) {
                (Some(u), Some(v)) => (u, v),
                (Some(u), None) => (u, pick(ends_j, ends_i, Some(u))),
                (None, Some(v)) => (pick(ends_i, ends_j, Some(v)), v),
                (None, None) => {
                    let u = pick(ends_i, ends_j, None);
                    (u, pick(ends_j, ends_i, Some(u)))
                }
            }
        };
        pair_ends[slot] = (u, v);

        let mut excluded: Vec<VertexId> = ends_i
            .iter()
            .chain(ends_j.iter())
            .copied()
            .filter(|&e| e != u && e != v)
            .collect();
        excluded.sort_unstable();
        excluded.dedup();

        let core = embed_h_minus_f(kr, h, f, u, v, &excluded)?;

        let seg_u = path_segment(qi_path, u, landings[i]);
        let seg_v = path_segment(qj_path, landings[j], v);
        let into_cycle: Vec<VertexId> = connectors[i].reversed().vertices().to_vec();
        let out_of_cycle: Vec<VertexId> = connectors[j].vertices().to_vec();
        let plain = splice(&[
            seg_u.clone(),
            into_cycle.clone(),
            arcs[slot].vertices().to_vec(),
            out_of_cycle.clone(),
            seg_v.clone(),
        ]);
        let rerouted_arc: Vec<VertexId> = {
            // the other two arcs, walked from anchor i through the third
            // anchor to anchor j
            let (i, j, k) = pair_of(slot);
            let first = cycle_arc(cycle, pos[i], pos[k], pos[j]);
            let second = cycle_arc(cycle, pos[k], pos[j], pos[i]);
            splice(&[first.vertices().to_vec(), second.vertices().to_vec()])
                .vertices()
                .to_vec()
        };
        let rerouted = splice(&[seg_u, into_cycle, rerouted_arc, out_of_cycle, seg_v]);

        for wide in [plain, rerouted] {
            let paths: Vec<Path> = (0..h.m())
                .map(|e| {
                    if e == f {
                        wide.clone()
                    } else {
                        let (a, b) = h.endpoints(e);
                        let inner = core
                            .pattern
                            .edge_id(a, b)
                            .expect("pattern edges other than f survive");
                        core.branch_paths[inner as usize].clone()
                    }
                })
                .collect();
            let mut branch = core.branch_vertices.clone();
            branch[f0 as usize] = u;
            branch[f1 as usize] = v;
            members.push(SubdivisionCert::oriented(h.clone(), branch, paths));
        }
    }

    Ok(DerivedGadget {
        cycle: cycle.to_vec(),
        anchors,
        landings,
        connectors: [
            connectors[0].clone(),
            connectors[1].clone(),
            connectors[2].clone(),
        ],
        arcs,
        pair_ends,
        members,
    })
}

/// Closed vertex sequence of a three-branch cycle certificate.
fn cycle_sequence(cert: &SubdivisionCert) -> Vec<VertexId> {
    let p01 = cert.path_between(0, 1).unwrap();
    let p12 = cert.path_between(1, 2).unwrap();
    let p20 = cert.path_between(2, 0).unwrap();
    let mut seq = p01.vertices().to_vec();
    seq.extend_from_slice(&p12.vertices()[1..]);
    let inner = p20.vertices();
    seq.extend_from_slice(&inner[1..inner.len() - 1]);
    seq
}

/// Separating family of pattern subdivisions and single edges for a
/// 3-connected host. Falls back to all single edges when no balanced
/// complete subdivision of the required order is found.
pub fn separate_three_connected(
    g: &Graph,
    h: &Graph,
    cfg: &PipelineConfig,
) -> Result<(SeparatingFamily, RunReport), PipelineError> {
    if h.m() == 0 {
        return Err(PipelineError::PatternEdgeless);
    }
    if !is_three_connected(g).is_yes() {
        return Err(PipelineError::NotThreeConnected);
    }
    let t = h.n();
    let target = 4 * t + 8;
    let average_degree = 2.0 * g.m() as f64 / g.n() as f64;
    let degree_threshold = cfg.c_balance * (target as f64) * (target as f64);
    let mut report = RunReport {
        fallback: false,
        host_vertex_count: g.n() as usize,
        ell: None,
        average_degree,
        degree_threshold,
        cycle_system_sizes: Vec::new(),
        away_vertex_counts: Vec::new(),
        derived_subdivisions: 0,
        single_edges: 0,
        gadgets: Vec::new(),
    };

    let found = match find_balanced_clique_subdivision(g, target, cfg.budget) {
        SearchResult::Found(cert) => Some(cert),
        SearchResult::BudgetExhausted | SearchResult::Refuted => None,
    };
    let Some(k) = found else {
        report.fallback = true;
        report.single_edges = g.m() as usize;
        let ground: Vec<EdgeId> = (0..g.m()).collect();
        return Ok((all_singles(g, &ground), report));
    };
    report.ell = Some(k.branch_paths[0].len());

    let quarters = quarter_split(&k, t).expect("the search returns the requested order");
    let mut members: Vec<FamilyMember> = Vec::new();
    for kr in &quarters {
        let kv = kr.vertices();
        let away: Vec<EdgeId> = (0..g.m())
            .filter(|&e| {
                let (a, b) = g.endpoints(e);
                kv.binary_search(&a).is_err() && kv.binary_search(&b).is_err()
            })
            .collect();
        let sub = g.edge_induced(&away);
        let local_ground: Vec<EdgeId> = (0..sub.graph.m()).collect();
        let system = build_sub_k3_system(&sub.graph, &local_ground);
        report.cycle_system_sizes.push(system.len());
        report.away_vertex_counts.push(sub.graph.n() as usize);
        for member in system.members() {
            match member {
                FamilyMember::SingleEdge(local) => {
                    members.push(FamilyMember::SingleEdge(
                        sub.edge_to_host[*local as usize],
                    ));
                    report.single_edges += 1;
                }
                FamilyMember::Subdivision(cert) => {
                    let host_cycle: Vec<VertexId> = cycle_sequence(cert)
                        .into_iter()
                        .map(|v| sub.vertex_to_host[v as usize])
                        .collect();
                    let gadget = derive_six(g, &host_cycle, kr, h, cfg)?;
                    report.derived_subdivisions += gadget.members.len();
                    members.extend(gadget.members.iter().cloned().map(FamilyMember::Subdivision));
                    report.gadgets.push(gadget);
                }
                _ => unreachable!("cycle systems emit only edges and cycles"),
            }
        }
    }
    Ok((SeparatingFamily::new(g, members)?, report))
}

/// Per-bag outcome of a full-graph run.
#[derive(Clone, Debug)]
pub struct BagOutcome {
    pub bag: usize,
    pub kind: TorsoKind,
    pub members: usize,
    /// Some(flag) when the bag ran the 3-connected construction.
    pub fallback: Option<bool>,
    /// Full run report for 3-connected bags.
    pub detail: Option<RunReport>,
}

#[derive(Clone, Debug)]
pub struct GraphReport {
    pub bags: Vec<BagOutcome>,
}

/// Separating family for any connected host: decompose into torsos, run the
/// 3-connected construction on 3-connected torsos and plain single edges on
/// cycle and single-edge torsos, then realize everything in the host.
pub fn separate_graph(
    g: &Graph,
    h: &Graph,
    cfg: &PipelineConfig,
) -> Result<(SeparatingFamily, GraphReport), PipelineError> {
    if h.m() == 0 {
        return Err(PipelineError::PatternEdgeless);
    }
    if g.n() == 0 {
        return Err(PipelineError::EmptyHost);
    }
    if g.n() == 1 {
        return Ok((
            SeparatingFamily::new(g, Vec::new())?,
            GraphReport { bags: Vec::new() },
        ));
    }
    let d = build_tutte(g)?;
    let mut members: Vec<FamilyMember> = Vec::new();
    let mut outcomes = Vec::new();
    for bag in 0..d.bag_count() {
        let torso = &d.torsos[bag];
        let (local, detail) = match torso.kind {
            TorsoKind::ThreeConnected => {
                let (fam, rep) = separate_three_connected(&torso.graph, h, cfg)?;
                (fam, Some(rep))
            }
            TorsoKind::Cycle | TorsoKind::SingleRealEdge => {
                let ground: Vec<EdgeId> = (0..torso.graph.m()).collect();
                (all_singles(&torso.graph, &ground), None)
            }
        };
        let realized = realize_members(g, &d, bag, &local)?;
        outcomes.push(BagOutcome {
            bag,
            kind: torso.kind,
            members: realized.len(),
            fallback: detail.as_ref().map(|r| r.fallback),
            detail,
        });
        members.extend(realized.members().iter().cloned());
    }
    Ok((
        SeparatingFamily::new(g, members)?,
        GraphReport { bags: outcomes },
    ))
}
