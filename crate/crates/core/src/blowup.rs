//! Separation at the level of whole pattern copies: balanced blowups,
//! exhaustive copy enumeration at desk scale, the copy-separation checker,
//! a supergraph separator driven by include/exclude constraints, and the
//! blowup separator built from per-class set families.

use crate::bipartite::{build_constraint_family, Constraint};
use crate::family::{FamilyMember, SeparatingFamily};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::Verdict;
use thiserror::Error;

const PATTERN_CAP: u32 = 4;
const HOST_CAP: u32 = 16;

#[derive(Debug, Error)]
pub enum BlowupError {
    #[error("pattern has {n} vertices, the enumeration cap is {PATTERN_CAP}")]
    PatternTooLarge { n: u32 },
    #[error("host has {n} vertices, the enumeration cap is {HOST_CAP}")]
    HostTooLarge { n: u32 },
}

/// A pattern blown up by substituting classes for vertices and complete
/// bipartite graphs for edges.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub pattern: Graph,
    pub class_size: u32,
    /// classes[x] lists the host vertices standing in for pattern vertex x.
    pub classes: Vec<Vec<VertexId>>,
    pub host: Graph,
}

/// The balanced blowup with classes numbered block by block: pattern vertex
/// x owns host vertices l*x .. l*(x+1).
pub fn build_blowup(h: &Graph, l: u32) -> Blowup {
    assert!(l >= 1, "class size must be positive");
    let classes: Vec<Vec<VertexId>> = (0..h.n()).map(|x| (l * x..l * (x + 1)).collect()).collect();
    let mut edges = Vec::new();
    for &(x, y) in h.edges() {
        for &a in &classes[x as usize] {
            for &b in &classes[y as usize] {
                edges.push((a, b));
            }
        }
    }
    let host = Graph::new(h.n() * l, &edges).expect("cross pairs of disjoint classes are simple");
    Blowup {
        pattern: h.clone(),
        class_size: l,
        classes,
        host,
    }
}

/// One subgraph copy of a pattern inside a host.
#[derive(Clone, Debug)]
pub struct CopyOfH {
    /// map[x] is the host vertex playing pattern vertex x.
    pub map: Vec<VertexId>,
    /// Host edge ids of the copy, sorted.
    pub edges: Vec<EdgeId>,
}

/// Every copy of `h` in `g` as a subgraph, found by exhaustive backtracking
/// and deduplicated by image edge set. Desk-scale oracle, hence the caps.
pub fn enumerate_h_copies(g: &Graph, h: &Graph) -> Result<Vec<CopyOfH>, BlowupError> {
    if h.n() > PATTERN_CAP {
        return Err(BlowupError::PatternTooLarge { n: h.n() });
    }
    if g.n() > HOST_CAP {
        return Err(BlowupError::HostTooLarge { n: g.n() });
    }
    let mut copies = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut map: Vec<VertexId> = Vec::with_capacity(h.n() as usize);
    fn extend(
        g: &Graph,
        h: &Graph,
        map: &mut Vec<VertexId>,
        seen: &mut std::collections::HashSet<Vec<EdgeId>>,
        copies: &mut Vec<CopyOfH>,
    ) {
        let x = map.len() as u32;
        if x == h.n() {
            let mut edges: Vec<EdgeId> = h
                .edges()
                .iter()
                .map(|&(a, b)| {
                    g.edge_id(map[a as usize], map[b as usize])
                        .expect("adjacency was checked during extension")
                })
                .collect();
            edges.sort_unstable();
            if seen.insert(edges.clone()) {
                copies.push(CopyOfH {
                    map: map.clone(),
                    edges,
                });
            }
            return;
        }
        for v in 0..g.n() {
            if map.contains(&v) {
                continue;
            }
            let ok = (0..x).all(|y| {
                !h.has_edge(y, x) || g.has_edge(map[y as usize], v)
            });
            if ok {
                map.push(v);
                extend(g, h, map, seen, copies);
                map.pop();
            }
        }
    }
    extend(g, h, &mut map, &mut seen, &mut copies);
    Ok(copies)
}

/// Check that the family separates copies of `h` in `g`: for every ordered
/// pair of distinct copies some member contains all edges of the first and
/// misses at least one edge of the second.
pub fn check_h_separation(
    g: &Graph,
    h: &Graph,
    fam: &SeparatingFamily,
) -> Result<Verdict, BlowupError> {
    let copies = enumerate_h_copies(g, h)?;
    let masks: Vec<crate::bits::Bitset> = copies
        .iter()
        .map(|c| {
            let mut m = crate::bits::Bitset::new(g.m() as usize);
            for &e in &c.edges {
                m.insert(e as usize);
            }
            m
        })
        .collect();
    for i in 0..copies.len() {
        for j in 0..copies.len() {
            if i == j {
                continue;
            }
            let separated = (0..fam.len()).any(|k| {
                let mask = fam.member_mask(k);
                masks[i].is_subset_of(mask) && !masks[j].is_subset_of(mask)
            });
            if !separated {
                return Ok(Verdict::fail(format!(
                    "no member contains copy {i} {:?} while missing copy {j} {:?}",
                    copies[i].map, copies[j].map
                )));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Separate the copies of `h` in `g` by supergraphs: one constraint per
/// (copy, outside edge) pair, handed to the randomized constraint-family
/// builder; each satisfying edge set becomes a member.
pub fn build_supergraph_h_separator(
    g: &Graph,
    h: &Graph,
    seed: u64,
) -> Result<SeparatingFamily, BlowupError> {
    let copies = enumerate_h_copies(g, h)?;
    let mut constraints = Vec::new();
    for c in &copies {
        for e in 0..g.m() {
            if c.edges.binary_search(&e).is_err() {
                constraints.push(Constraint::new(c.edges.clone(), vec![e]));
            }
        }
    }
    if constraints.is_empty() {
        return Ok(SeparatingFamily::new(g, Vec::new()).expect("empty family"));
    }
    let fam = build_constraint_family(g.m(), &constraints, seed);
    let members: Vec<FamilyMember> = fam.sets.into_iter().map(FamilyMember::EdgeSet).collect();
    Ok(SeparatingFamily::new(g, members).expect("members are host edge sets"))
}

/// Which construction produced the blowup separator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupStrategy {
    SharedIndex,
    Product,
    AllCopies,
}

/// A verified copy-separating system over a balanced blowup.
#[derive(Clone, Debug)]
pub struct BlowupSeparator {
    pub blowup: Blowup,
    pub family: SeparatingFamily,
    /// Per member, the selected subset of each class (host vertex ids);
    /// empty for the all-copies fallback.
    pub selections: Vec<Vec<Vec<VertexId>>>,
    pub strategy: BlowupStrategy,
}

/// Edge set induced by choosing one vertex subset per class.
fn selection_edges(b: &Blowup, choice: &[Vec<VertexId>]) -> Vec<EdgeId> {
    let mut ids = Vec::new();
    for &(x, y) in b.pattern.edges() {
        for &a in &choice[x as usize] {
            for &bb in &choice[y as usize] {
                ids.push(
                    b.host
                        .edge_id(a, bb)
                        .expect("cross pairs over pattern edges are blowup edges"),
                );
            }
        }
    }
    ids.sort_unstable();
    ids
}

/// Build an H-separating system over the l-balanced blowup of `h` with
/// class size `n`. Per class, a set family separates every small subset
/// from every outside vertex; members combine one set per class. The
/// shared-index combination is tried first, then the full product, then the
/// always-correct family of all copies; the returned strategy says which
/// one verified.
pub fn build_blowup_h_separator(
    h: &Graph,
    n: u32,
    seed: u64,
) -> Result<BlowupSeparator, BlowupError> {
    assert!(n >= 1, "class size must be positive");
    let blowup = build_blowup(h, n);
    let copies = enumerate_h_copies(&blowup.host, h)?;
    if copies.len() <= 1 {
        return Ok(BlowupSeparator {
            family: SeparatingFamily::new(&blowup.host, Vec::new()).expect("empty family"),
            blowup,
            selections: Vec::new(),
            strategy: BlowupStrategy::SharedIndex,
        });
    }

    // per-class families over local indices 0..n
    let take = (h.n().min(n - 1)).max(1) as usize;
    let mut class_families: Vec<Vec<Vec<u32>>> = Vec::new();
    for x in 0..h.n() {
        let mut constraints = Vec::new();
        let mut subset: Vec<u32> = Vec::new();
        fn subsets(
            from: u32,
            n: u32,
            take: usize,
            subset: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if subset.len() == take {
                out.push(subset.clone());
                return;
            }
            for v in from..n {
                subset.push(v);
                subsets(v + 1, n, take, subset, out);
                subset.pop();
            }
        }
        let mut all = Vec::new();
        subsets(0, n, take, &mut subset, &mut all);
        for s in &all {
            for w in 0..n {
                if !s.contains(&w) {
                    constraints.push(Constraint::new(s.clone(), vec![w]));
                }
            }
        }
        let sets = if constraints.is_empty() {
            vec![(0..n).collect::<Vec<u32>>()]
        } else {
            build_constraint_family(n, &constraints, seed.wrapping_add(x as u64)).sets
        };
        class_families.push(sets);
    }

    let to_host = |x: usize, local: &[u32]| -> Vec<VertexId> {
        local.iter().map(|&v| blowup.classes[x][v as usize]).collect()
    };

    // shared index: the j-th member takes the j-th set of every class,
    // wrapping shorter families
    let width = class_families.iter().map(|f| f.len()).max().unwrap();
    let shared: Vec<Vec<Vec<VertexId>>> = (0..width)
        .map(|j| {
            (0..h.n() as usize)
                .map(|x| to_host(x, &class_families[x][j % class_families[x].len()]))
                .collect()
        })
        .collect();

    // full product of one set per class
    let mut product: Vec<Vec<Vec<VertexId>>> = vec![Vec::new()];
    for (x, fam) in class_families.iter().enumerate() {
        let mut next = Vec::new();
        for partial in &product {
            for s in fam {
                let mut row = partial.clone();
                row.push(to_host(x, s));
                next.push(row);
            }
        }
        product = next;
    }

    for (selections, strategy) in [
        (shared, BlowupStrategy::SharedIndex),
        (product, BlowupStrategy::Product),
    ] {
        let members: Vec<FamilyMember> = selections
            .iter()
            .map(|choice| FamilyMember::EdgeSet(selection_edges(&blowup, choice)))
            .collect();
        let family =
            SeparatingFamily::new(&blowup.host, members).expect("selections span host edges");
        if check_h_separation(&blowup.host, h, &family)? == Verdict::Pass {
            return Ok(BlowupSeparator {
                blowup,
                family,
                selections,
                strategy,
            });
        }
    }

    let members: Vec<FamilyMember> = copies
        .iter()
        .map(|c| FamilyMember::EdgeSet(c.edges.clone()))
        .collect();
    let family = SeparatingFamily::new(&blowup.host, members).expect("copies are host edge sets");
    debug_assert_eq!(
        check_h_separation(&blowup.host, h, &family)?,
        Verdict::Pass,
        "equal-size distinct copies always separate each other"
    );
    Ok(BlowupSeparator {
        blowup,
        family,
        selections: Vec::new(),
        strategy: BlowupStrategy::AllCopies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn blowup_of_an_edge_by_three_is_the_three_three_biclique() {
        let b = build_blowup(&gen::complete(2), 3);
        assert_eq!(b.host.fingerprint(), gen::biclique(3, 3).fingerprint());
        assert_eq!(b.classes, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn blowup_of_a_triangle_by_two_is_the_octahedron() {
        let b = build_blowup(&gen::complete(3), 2);
        assert_eq!(b.host.n(), 6);
        assert_eq!(b.host.m(), 12);
        for x in 0..3u32 {
            let class = &b.classes[x as usize];
            assert!(
                !b.host.has_edge(class[0], class[1]),
                "classes stay independent"
            );
        }
    }

    #[test]
    fn blowup_by_one_is_the_pattern_itself() {
        let b = build_blowup(&gen::complete(2), 1);
        assert_eq!(b.host.fingerprint(), gen::complete(2).fingerprint());
    }

    #[test]
    fn edge_copies_in_the_biclique_number_nine() {
        let copies = enumerate_h_copies(&gen::biclique(3, 3), &gen::complete(2)).unwrap();
        assert_eq!(copies.len(), 9);
    }

    #[test]
    fn triangle_copies_in_the_octahedron_number_eight() {
        let b = build_blowup(&gen::complete(3), 2);
        let copies = enumerate_h_copies(&b.host, &gen::complete(3)).unwrap();
        assert_eq!(copies.len(), 8, "one transversal per sign pattern");
    }

    #[test]
    fn no_triangle_copies_in_a_five_cycle() {
        let copies = enumerate_h_copies(&gen::cycle(5), &gen::complete(3)).unwrap();
        assert!(copies.is_empty());
    }

    #[test]
    fn enumeration_caps_are_enforced() {
        assert!(matches!(
            enumerate_h_copies(&gen::complete(5), &gen::complete(5)),
            Err(BlowupError::PatternTooLarge { n: 5 })
        ));
        assert!(matches!(
            enumerate_h_copies(&gen::cycle(17), &gen::complete(2)),
            Err(BlowupError::HostTooLarge { n: 17 })
        ));
    }

    #[test]
    fn the_copies_themselves_always_separate() {
        let b = build_blowup(&gen::complete(3), 2);
        let copies = enumerate_h_copies(&b.host, &gen::complete(3)).unwrap();
        let members: Vec<FamilyMember> = copies
            .iter()
            .map(|c| FamilyMember::EdgeSet(c.edges.clone()))
            .collect();
        let fam = SeparatingFamily::new(&b.host, members).unwrap();
        assert_eq!(
            check_h_separation(&b.host, &gen::complete(3), &fam).unwrap(),
            Verdict::Pass
        );
    }

    #[test]
    fn the_whole_graph_never_separates_two_copies() {
        let b = build_blowup(&gen::complete(3), 2);
        let every: Vec<EdgeId> = (0..b.host.m()).collect();
        let fam =
            SeparatingFamily::new(&b.host, vec![FamilyMember::EdgeSet(every)]).unwrap();
        let verdict = check_h_separation(&b.host, &gen::complete(3), &fam).unwrap();
        assert!(!verdict.passed(), "a single all-edges member contains every copy");
    }

    #[test]
    fn supergraph_separator_passes_on_k4() {
        let g = gen::complete(4);
        let h = gen::complete(3);
        let fam = build_supergraph_h_separator(&g, &h, 11).unwrap();
        assert!(!fam.is_empty());
        assert_eq!(check_h_separation(&g, &h, &fam).unwrap(), Verdict::Pass);
    }

    #[test]
    fn supergraph_separator_passes_on_two_disjoint_triangles() {
        let g = Graph::new(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        let h = gen::complete(3);
        let fam = build_supergraph_h_separator(&g, &h, 0).unwrap();
        assert_eq!(check_h_separation(&g, &h, &fam).unwrap(), Verdict::Pass);
    }

    #[test]
    fn supergraph_separator_is_empty_without_copies() {
        let fam = build_supergraph_h_separator(&gen::cycle(5), &gen::complete(3), 0).unwrap();
        assert!(fam.is_empty());
    }

    #[test]
    fn blowup_separator_passes_across_the_desk_grid() {
        let grid: [(Graph, u32); 5] = [
            (gen::complete(2), 2),
            (gen::complete(2), 4),
            (gen::path(3), 2),
            (gen::complete(3), 2),
            (gen::complete(3), 3),
        ];
        for (h, n) in grid {
            let sep = build_blowup_h_separator(&h, n, 42).unwrap();
            assert!(!sep.family.is_empty(), "h={:?} n={n} needs members", h.edges());
            assert_eq!(
                check_h_separation(&sep.blowup.host, &h, &sep.family).unwrap(),
                Verdict::Pass,
                "h={:?} n={n} strategy {:?}",
                h.edges(),
                sep.strategy
            );
        }
    }

    #[test]
    fn blowup_separator_members_are_blowup_closed() {
        let h = gen::complete(3);
        let sep = build_blowup_h_separator(&h, 3, 42).unwrap();
        assert_ne!(sep.strategy, BlowupStrategy::AllCopies);
        for (k, choice) in sep.selections.iter().enumerate() {
            assert!(choice.iter().all(|s| !s.is_empty()), "member {k} misses a class");
            let expected = selection_edges(&sep.blowup, choice);
            let mask = sep.family.member_mask(k);
            assert_eq!(
                mask.count(),
                expected.len(),
                "member {k} must contain exactly its spanned cross edges"
            );
            assert!(expected.iter().all(|&e| mask.contains(e as usize)));
        }
    }

    #[test]
    fn single_copy_blowups_get_an_empty_family() {
        let sep = build_blowup_h_separator(&gen::complete(2), 1, 0).unwrap();
        assert!(sep.family.is_empty());
    }

    #[test]
    fn a_path_cannot_separate_extremal_matchings_with_connected_members() {
        // the pattern is a two-edge matching; the host path's extremal copy
        // can only be contained, among connected subgraphs, by the whole
        // path, which contains every other copy too
        let g = gen::path(5);
        let h = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let copies = enumerate_h_copies(&g, &h).unwrap();
        assert_eq!(copies.len(), 3, "three disjoint edge pairs in a four-edge path");
        let extremal: Vec<EdgeId> = vec![
            g.edge_id(0, 1).unwrap(),
            g.edge_id(3, 4).unwrap(),
        ];
        assert!(
            copies.iter().any(|c| c.edges == extremal),
            "the extremal copy uses the two end edges"
        );
        let whole: Vec<EdgeId> = (0..g.m()).collect();
        let fam = SeparatingFamily::new(&g, vec![FamilyMember::EdgeSet(whole)]).unwrap();
        let verdict = check_h_separation(&g, &h, &fam).unwrap();
        assert!(
            !verdict.passed(),
            "the only connected subgraph containing both end edges is the whole path"
        );
    }

    #[test]
    fn blowup_separator_is_deterministic_per_seed() {
        let h = gen::complete(3);
        let a = build_blowup_h_separator(&h, 2, 7).unwrap();
        let b = build_blowup_h_separator(&h, 2, 7).unwrap();
        let text = |s: &BlowupSeparator| {
            crate::family::serialize_family(&s.family, "x")
                .into_iter()
                .map(|(_, c)| c)
                .collect::<String>()
        };
        assert_eq!(text(&a), text(&b));
        assert_eq!(a.strategy, b.strategy);
    }
}
