//! Separating systems for complete bipartite graphs via per-side binary
//! indexing, randomized constraint-satisfying set families with a tailored
//! fallback, a greedy biclique cover, the composition of the two into a
//! biclique separating system for arbitrary graphs, and a grid tiling of
//! K_{n,n} by small complete bipartite placements.

use crate::family::{FamilyMember, SeparatingFamily};
use crate::gen;
use crate::graph::{EdgeId, Graph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BipartiteError {
    #[error("tiling needs 1 <= t <= s <= n, got t={t} s={s} n={n}")]
    BadTile { n: u32, t: u32, s: u32 },
}

/// Bits needed to index `n` distinct values.
fn bits_for(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Bit-indexed separating system for K_{n,n} with side A on vertices 0..n
/// and side B on n..2n. For every bit position the A-vertices with that bit
/// set, their complement, and the mirrored B-sets pair up into at most four
/// bicliques, so the family has at most 4*ceil(log2 n) members and the
/// A-side sets are closed under complement.
pub fn build_knn_system(n: u32) -> SeparatingFamily {
    assert!(n >= 1, "side size must be positive");
    let g = gen::biclique(n, n);
    let mut members = Vec::new();
    for bit in 0..bits_for(n) {
        let ones: Vec<u32> = (0..n).filter(|i| i >> bit & 1 == 1).collect();
        let zeros: Vec<u32> = (0..n).filter(|i| i >> bit & 1 == 0).collect();
        for left in [&ones, &zeros] {
            for right in [&ones, &zeros] {
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                members.push(FamilyMember::Biclique {
                    left: left.clone(),
                    right: right.iter().map(|j| n + j).collect(),
                });
            }
        }
    }
    SeparatingFamily::new(&g, members).expect("bit-indexed sides are host biclique sides")
}

/// One include/exclude requirement: a set satisfies it when it contains all
/// of `include` and nothing of `exclude`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub include: Vec<u32>,
    pub exclude: Vec<u32>,
}

impl Constraint {
    pub fn new(include: Vec<u32>, exclude: Vec<u32>) -> Constraint {
        let c = Constraint { include, exclude };
        assert!(
            c.include.iter().all(|x| !c.exclude.contains(x)),
            "include and exclude must be disjoint"
        );
        c
    }

    pub fn size(&self) -> usize {
        self.include.len() + self.exclude.len()
    }

    /// Does a member set, given as a universe membership table, meet this
    /// constraint?
    pub fn satisfied_by(&self, membership: &[bool]) -> bool {
        self.include.iter().all(|&x| membership[x as usize])
            && self.exclude.iter().all(|&x| !membership[x as usize])
    }
}

/// Outcome of the randomized constraint-family construction.
#[derive(Clone, Debug)]
pub struct ConstraintFamily {
    /// The member sets, each sorted.
    pub sets: Vec<Vec<u32>>,
    /// Random draws consumed.
    pub draws: u32,
    /// Constraints that needed a tailored fallback set.
    pub tailored: usize,
}

const DRAW_CEILING: u32 = 4096;

/// Build a family of subsets of 0..universe such that every constraint is
/// satisfied by at least one member. Subsets are drawn with the average
/// include-fraction as the per-element probability and kept when they
/// satisfy something new; constraints still open after the draw ceiling get
/// one tailored set each (include plus everything outside exclude).
pub fn build_constraint_family(
    universe: u32,
    constraints: &[Constraint],
    seed: u64,
) -> ConstraintFamily {
    assert!(!constraints.is_empty(), "need at least one constraint");
    let k = constraints[0].size();
    assert!(
        constraints.iter().all(|c| c.size() == k) && k > 0,
        "constraints must share one positive size"
    );
    assert!(
        constraints
            .iter()
            .flat_map(|c| c.include.iter().chain(c.exclude.iter()))
            .all(|&x| x < universe),
        "constraint elements must lie in the universe"
    );
    let include_total: usize = constraints.iter().map(|c| c.include.len()).sum();
    let p = include_total as f64 / (constraints.len() * k) as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut open: Vec<usize> = (0..constraints.len()).collect();
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut draws = 0;
    let mut membership = vec![false; universe as usize];
    while !open.is_empty() && draws < DRAW_CEILING {
        draws += 1;
        for slot in membership.iter_mut() {
            *slot = rng.gen_bool(p);
        }
        let before = open.len();
        open.retain(|&c| !constraints[c].satisfied_by(&membership));
        if open.len() < before {
            sets.push(
                (0..universe)
                    .filter(|&x| membership[x as usize])
                    .collect(),
            );
        }
    }

    let tailored = open.len();
    for &c in &open {
        let con = &constraints[c];
        let set: Vec<u32> = (0..universe)
            .filter(|x| con.include.contains(x) || !con.exclude.contains(x))
            .collect();
        sets.push(set);
    }
    ConstraintFamily { sets, draws, tailored }
}

/// A complete bipartite subgraph found by the cover, plus what it left
/// behind.
#[derive(Clone, Debug)]
pub struct BicliqueCover {
    /// Sorted side pairs; cross edges of distinct entries are disjoint.
    pub bicliques: Vec<(Vec<VertexId>, Vec<VertexId>)>,
    /// Host edges no extracted biclique covers.
    pub leftovers: Vec<EdgeId>,
}

/// Greedy biclique cover: seed a residual edge, grow the smaller side with
/// the lowest vertex adjacent to everything across, extract when both sides
/// reach `s_min`, remove its edges, and repeat until no seed works.
pub fn extract_biclique_cover(g: &Graph, s_min: usize) -> BicliqueCover {
    assert!(s_min >= 1, "side threshold must be positive");
    let n = g.n() as usize;
    let mut residual: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for &(a, b) in g.edges() {
        residual[a as usize][b as usize] = true;
        residual[b as usize][a as usize] = true;
    }
    let adjacent_to_all = |x: u32, side: &[u32], residual: &[Vec<bool>]| {
        side.iter().all(|&y| residual[x as usize][y as usize])
    };

    let mut bicliques: Vec<(Vec<VertexId>, Vec<VertexId>)> = Vec::new();
    'outer: loop {
        for e in 0..g.m() {
            let (u, v) = g.endpoints(e);
            if !residual[u as usize][v as usize] {
                continue;
            }
            let mut left = vec![u];
            let mut right = vec![v];
            loop {
                let (grow, across): (&mut Vec<u32>, &Vec<u32>) = if left.len() <= right.len() {
                    (&mut left, &right)
                } else {
                    (&mut right, &left)
                };
                let cand = (0..g.n()).find(|&x| {
                    !grow.contains(&x) && !across.contains(&x) && adjacent_to_all(x, across, &residual)
                });
                match cand {
                    Some(x) => grow.push(x),
                    None => {
                        // the larger side may still extend
                        let (grow, across): (&mut Vec<u32>, &Vec<u32>) =
                            if left.len() <= right.len() {
                                (&mut right, &left)
                            } else {
                                (&mut left, &right)
                            };
                        let cand = (0..g.n()).find(|&x| {
                            !grow.contains(&x)
                                && !across.contains(&x)
                                && adjacent_to_all(x, across, &residual)
                        });
                        match cand {
                            Some(x) => grow.push(x),
                            None => break,
                        }
                    }
                }
            }
            if left.len().min(right.len()) >= s_min {
                for &a in &left {
                    for &b in &right {
                        residual[a as usize][b as usize] = false;
                        residual[b as usize][a as usize] = false;
                    }
                }
                left.sort_unstable();
                right.sort_unstable();
                bicliques.push((left, right));
                continue 'outer;
            }
        }
        break;
    }

    let leftovers: Vec<EdgeId> = (0..g.m())
        .filter(|&e| {
            let (a, b) = g.endpoints(e);
            residual[a as usize][b as usize]
        })
        .collect();
    BicliqueCover { bicliques, leftovers }
}

/// Append the bit-indexed members for one (possibly rectangular) biclique
/// with the given sorted sides.
fn push_indexed_members(
    left: &[VertexId],
    right: &[VertexId],
    members: &mut Vec<FamilyMember>,
) {
    let width = left.len().max(right.len()) as u32;
    if width == 1 {
        members.push(FamilyMember::Biclique {
            left: left.to_vec(),
            right: right.to_vec(),
        });
        return;
    }
    let by_bit = |side: &[VertexId], bit: u32, want: u32| -> Vec<VertexId> {
        side.iter()
            .enumerate()
            .filter(|&(i, _)| (i as u32) >> bit & 1 == want)
            .map(|(_, &v)| v)
            .collect()
    };
    for bit in 0..bits_for(width) {
        for lw in [1, 0] {
            for rw in [1, 0] {
                let l = by_bit(left, bit, lw);
                let r = by_bit(right, bit, rw);
                if !l.is_empty() && !r.is_empty() {
                    members.push(FamilyMember::Biclique { left: l, right: r });
                }
            }
        }
    }
}

/// Separating system of bicliques for an arbitrary host: cover the edges
/// greedily with bicliques, index each cover element with the mirrored-bit
/// construction, and keep every uncovered edge as its own single-pair
/// member. Pairs inside one cover element are separated by the indexing;
/// pairs across elements are separated because cover elements are
/// edge-disjoint.
pub fn build_biclique_separating_system(g: &Graph, s_min: usize) -> SeparatingFamily {
    let cover = extract_biclique_cover(g, s_min);
    let mut members = Vec::new();
    for (left, right) in &cover.bicliques {
        push_indexed_members(left, right, &mut members);
    }
    for &e in &cover.leftovers {
        let (a, b) = g.endpoints(e);
        members.push(FamilyMember::Biclique {
            left: vec![a],
            right: vec![b],
        });
    }
    SeparatingFamily::new(g, members).expect("cover sides and leftovers are host structures")
}

/// Grid tiling of K_{n,n} (side A on 0..n, side B on n..2n) by complete
/// bipartite placements with t rows and s columns: row blocks of t and
/// column blocks of s, the last block of each side wrapping around, giving
/// ceil(n/t) * ceil(n/s) placements that jointly cover every edge.
pub fn tile_biclique(
    n: u32,
    t: u32,
    s: u32,
) -> Result<Vec<(Vec<VertexId>, Vec<VertexId>)>, BipartiteError> {
    if !(1 <= t && t <= s && s <= n) {
        return Err(BipartiteError::BadTile { n, t, s });
    }
    let blocks = |width: u32| -> Vec<Vec<u32>> {
        let count = n.div_ceil(width);
        (0..count)
            .map(|b| {
                (0..width)
                    .map(|i| {
                        let raw = b * width + i;
                        if raw < n {
                            raw
                        } else {
                            raw - n
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let rows = blocks(t);
    let cols = blocks(s);
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for rb in &rows {
        for cb in &cols {
            let mut left = rb.clone();
            left.sort_unstable();
            let mut right: Vec<u32> = cb.iter().map(|j| n + j).collect();
            right.sort_unstable();
            out.push((left, right));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{check_strong_separation, SeparationVerdict};

    fn assert_separates_all(g: &Graph, fam: &SeparatingFamily) {
        let ground: Vec<EdgeId> = (0..g.m()).collect();
        assert_eq!(
            check_strong_separation(&ground, fam),
            SeparationVerdict::Pass,
            "family must strongly separate every host edge"
        );
    }

    #[test]
    fn knn_side_one_gives_an_empty_family() {
        let fam = build_knn_system(1);
        assert!(fam.is_empty(), "one edge separates vacuously");
    }

    #[test]
    fn knn_side_two_gives_four_single_edge_bicliques() {
        let fam = build_knn_system(2);
        assert_eq!(fam.len(), 4);
        for k in 0..4 {
            assert_eq!(fam.member_mask(k).count(), 1);
        }
        assert_separates_all(&gen::biclique(2, 2), &fam);
    }

    #[test]
    fn knn_side_eight_fits_the_log_bound_and_separates() {
        let fam = build_knn_system(8);
        assert!(fam.len() <= 12, "got {} members", fam.len());
        assert_separates_all(&gen::biclique(8, 8), &fam);
    }

    #[test]
    fn knn_left_sets_are_closed_under_complement() {
        let n = 8u32;
        let fam = build_knn_system(n);
        let lefts: Vec<Vec<u32>> = fam
            .members()
            .iter()
            .map(|m| match m {
                FamilyMember::Biclique { left, .. } => left.clone(),
                other => panic!("unexpected member {other:?}"),
            })
            .collect();
        for l in &lefts {
            let complement: Vec<u32> = (0..n).filter(|v| !l.contains(v)).collect();
            assert!(
                lefts.contains(&complement),
                "complement of {l:?} missing from the left sets"
            );
        }
    }

    #[test]
    fn knn_odd_and_large_sides_separate_exhaustively() {
        for n in [3u32, 5, 13, 64] {
            let fam = build_knn_system(n);
            assert!(fam.len() as u32 <= 4 * bits_for(n));
            assert_separates_all(&gen::biclique(n, n), &fam);
        }
    }

    #[test]
    fn single_pair_constraint_needs_one_member() {
        let fam = build_constraint_family(4, &[Constraint::new(vec![0], vec![1])], 0);
        assert_eq!(fam.sets.len(), 1);
        assert!(fam.sets[0].contains(&0) && !fam.sets[0].contains(&1));
        assert_eq!(fam.tailored, 0);
    }

    #[test]
    fn all_ordered_pairs_force_a_log_sized_family() {
        let n = 8u32;
        let mut constraints = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    constraints.push(Constraint::new(vec![x], vec![y]));
                }
            }
        }
        let fam = build_constraint_family(n, &constraints, 1);
        for c in &constraints {
            let hit = fam.sets.iter().any(|s| {
                let membership: Vec<bool> = (0..n).map(|v| s.contains(&v)).collect();
                c.satisfied_by(&membership)
            });
            assert!(hit, "constraint {c:?} unsatisfied");
        }
        assert!(
            fam.sets.len() >= bits_for(n) as usize,
            "strong separation of {n} elements needs at least log2 many sets"
        );
    }

    #[test]
    fn random_size_six_constraints_are_all_satisfied() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let universe = 200u32;
        let mut constraints = Vec::new();
        for _ in 0..1000 {
            let mut picks = Vec::new();
            while picks.len() < 6 {
                let x = rng.gen_range(0..universe);
                if !picks.contains(&x) {
                    picks.push(x);
                }
            }
            let split = rng.gen_range(0..=6usize);
            constraints.push(Constraint::new(
                picks[..split].to_vec(),
                picks[split..].to_vec(),
            ));
        }
        let fam = build_constraint_family(universe, &constraints, 5);
        let sets: Vec<Vec<bool>> = fam
            .sets
            .iter()
            .map(|s| {
                let mut mem = vec![false; universe as usize];
                for &x in s {
                    mem[x as usize] = true;
                }
                mem
            })
            .collect();
        for c in &constraints {
            assert!(
                sets.iter().any(|m| c.satisfied_by(m)),
                "constraint {c:?} unsatisfied"
            );
        }
    }

    #[test]
    fn hopeless_constraints_fall_back_to_tailored_sets() {
        let universe = 64u32;
        let a: Vec<u32> = (0..20).collect();
        let b: Vec<u32> = (20..40).collect();
        let constraints = vec![
            Constraint::new(a.clone(), b.clone()),
            Constraint::new(b, a),
        ];
        let fam = build_constraint_family(universe, &constraints, 0);
        assert!(fam.tailored > 0, "the sampler cannot hit 2^-20 events");
        for c in &constraints {
            let hit = fam.sets.iter().any(|s| {
                let mut mem = vec![false; universe as usize];
                for &x in s {
                    mem[x as usize] = true;
                }
                c.satisfied_by(&mem)
            });
            assert!(hit, "constraint {c:?} unsatisfied after fallback");
        }
    }

    #[test]
    fn cover_of_a_biclique_is_that_biclique() {
        let g = gen::biclique(5, 5);
        let cover = extract_biclique_cover(&g, 5);
        assert_eq!(cover.bicliques.len(), 1);
        assert!(cover.leftovers.is_empty());
        let (l, r) = &cover.bicliques[0];
        assert_eq!((l.len(), r.len()), (5, 5));
    }

    #[test]
    fn cover_of_an_edgeless_graph_is_empty() {
        let g = Graph::new(4, &[]).unwrap();
        let cover = extract_biclique_cover(&g, 1);
        assert!(cover.bicliques.is_empty() && cover.leftovers.is_empty());
    }

    #[test]
    fn cover_members_are_edge_disjoint_and_cover_everything() {
        let g = gen::random_gnp(48, 0.5, 3);
        let cover = extract_biclique_cover(&g, 3);
        let mut hit = vec![0u32; g.m() as usize];
        for (l, r) in &cover.bicliques {
            assert!(l.len().min(r.len()) >= 3);
            for &a in l {
                for &b in r {
                    let e = g.edge_id(a, b).expect("cross pairs are host edges");
                    hit[e as usize] += 1;
                }
            }
        }
        for &e in &cover.leftovers {
            hit[e as usize] += 1;
        }
        assert!(
            hit.iter().all(|&c| c >= 1),
            "every edge must be covered at least once"
        );
        let mut biclique_hits = vec![0u32; g.m() as usize];
        for (l, r) in &cover.bicliques {
            for &a in l {
                for &b in r {
                    biclique_hits[g.edge_id(a, b).unwrap() as usize] += 1;
                }
            }
        }
        assert!(
            biclique_hits.iter().all(|&c| c <= 1),
            "extracted bicliques must be edge-disjoint"
        );
    }

    #[test]
    fn biclique_system_on_k88_stays_within_twelve() {
        let g = gen::biclique(8, 8);
        let fam = build_biclique_separating_system(&g, 8);
        assert!(fam.len() <= 12, "got {} members", fam.len());
        assert_separates_all(&g, &fam);
    }

    #[test]
    fn biclique_system_on_a_matching_keeps_every_edge() {
        let g = Graph::new(8, &[(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let fam = build_biclique_separating_system(&g, 1);
        assert_eq!(fam.len(), 4);
        for k in 0..fam.len() {
            assert_eq!(fam.member_mask(k).count(), 1);
        }
        assert_separates_all(&g, &fam);
    }

    #[test]
    fn biclique_system_on_k4_verifies_within_the_edge_bound() {
        let g = gen::complete(4);
        let fam = build_biclique_separating_system(&g, 2);
        assert!(fam.len() <= g.m() as usize);
        assert_separates_all(&g, &fam);
    }

    #[test]
    fn biclique_system_handles_rectangular_cover_elements() {
        let g = gen::biclique(3, 7);
        let fam = build_biclique_separating_system(&g, 3);
        assert_separates_all(&g, &fam);
    }

    #[test]
    fn tiling_examples_match_the_arithmetic() {
        assert_eq!(tile_biclique(4, 2, 2).unwrap().len(), 4);
        assert_eq!(tile_biclique(3, 1, 3).unwrap().len(), 3);
        assert_eq!(tile_biclique(5, 2, 2).unwrap().len(), 9);
        assert!(tile_biclique(4, 2, 5).is_err());
        assert!(tile_biclique(4, 3, 2).is_err());
    }

    #[test]
    fn tilings_cover_every_biclique_edge() {
        for (n, t, s) in [(4u32, 2u32, 2u32), (5, 2, 2), (32, 5, 7), (9, 3, 4)] {
            let tiles = tile_biclique(n, t, s).unwrap();
            assert_eq!(tiles.len() as u32, n.div_ceil(t) * n.div_ceil(s));
            let mut hit = vec![vec![false; n as usize]; n as usize];
            for (l, r) in &tiles {
                assert_eq!((l.len() as u32, r.len() as u32), (t, s));
                for &a in l {
                    for &b in r {
                        assert!(a < n && (n..2 * n).contains(&b), "ids follow host layout");
                        hit[a as usize][(b - n) as usize] = true;
                    }
                }
            }
            assert!(
                hit.iter().all(|row| row.iter().all(|&c| c)),
                "tiling must cover all of K_{n},{n}"
            );
        }
    }
}
