//! Separating families: member kinds, pairwise separation checkers, and the
//! on-disk family format.

use crate::bits::Bitset;
use crate::graph::{EdgeId, Graph, VertexId};
use crate::subdivision::{parse_cert, serialize_cert, verify_subdivision, CertError, SubdivisionCert};
use crate::Verdict;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("family file names host {found} but the graph hashes to {expected}")]
    HostMismatch { expected: String, found: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("member {member}: {reason}")]
    BadMember { member: usize, reason: String },
    #[error("certificate file {path}: {message}")]
    CertLoad { path: String, message: String },
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// One member of a separating family. Every kind reduces to a set of host
/// edge ids; the richer kinds carry the witness that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyMember {
    SingleEdge(EdgeId),
    Subdivision(SubdivisionCert),
    Biclique {
        left: Vec<VertexId>,
        right: Vec<VertexId>,
    },
    EdgeSet(Vec<EdgeId>),
}

impl FamilyMember {
    /// Host edge ids of this member, sorted. Errors mirror the family
    /// constructor's validation.
    fn edge_ids_checked(&self, g: &Graph, member: usize) -> Result<Vec<EdgeId>, FamilyError> {
        let bad = |reason: String| FamilyError::BadMember { member, reason };
        match self {
            FamilyMember::SingleEdge(e) => {
                if *e >= g.m() {
                    return Err(bad(format!("edge id {e} outside the host")));
                }
                Ok(vec![*e])
            }
            FamilyMember::Subdivision(cert) => match verify_subdivision(g, cert) {
                Verdict::Pass => Ok(cert.edge_ids(g)),
                Verdict::Fail(msg) => Err(bad(format!("invalid certificate: {msg}"))),
            },
            FamilyMember::Biclique { left, right } => {
                if left.is_empty() || right.is_empty() {
                    return Err(bad("biclique with an empty side".into()));
                }
                for &v in left.iter().chain(right.iter()) {
                    if v >= g.n() {
                        return Err(bad(format!("biclique vertex {v} outside the host")));
                    }
                }
                if left.iter().any(|v| right.contains(v)) {
                    return Err(bad("biclique sides are not disjoint".into()));
                }
                let mut in_left = vec![false; g.n() as usize];
                let mut in_right = vec![false; g.n() as usize];
                for &v in left {
                    in_left[v as usize] = true;
                }
                for &v in right {
                    in_right[v as usize] = true;
                }
                let mut ids = Vec::new();
                for (id, &(u, v)) in g.edges().iter().enumerate() {
                    let crosses = (in_left[u as usize] && in_right[v as usize])
                        || (in_left[v as usize] && in_right[u as usize]);
                    if crosses {
                        ids.push(id as EdgeId);
                    }
                }
                Ok(ids)
            }
            FamilyMember::EdgeSet(ids) => {
                for &e in ids {
                    if e >= g.m() {
                        return Err(bad(format!("edge id {e} outside the host")));
                    }
                }
                let mut ids = ids.clone();
                ids.sort_unstable();
                ids.dedup();
                Ok(ids)
            }
        }
    }
}

/// An ordered list of members with their edge sets precomputed as bitsets
/// over the host's edge ids. Immutable after construction; checkers only
/// read, so sharing across threads is safe.
#[derive(Clone, Debug)]
pub struct SeparatingFamily {
    members: Vec<FamilyMember>,
    masks: Vec<Bitset>,
    host_edges: u32,
    host_fingerprint: u64,
}

impl SeparatingFamily {
    pub fn new(g: &Graph, members: Vec<FamilyMember>) -> Result<SeparatingFamily, FamilyError> {
        let mut masks = Vec::with_capacity(members.len());
        let mut normalized = Vec::with_capacity(members.len());
        for (k, member) in members.into_iter().enumerate() {
            let ids = member.edge_ids_checked(g, k)?;
            let mut mask = Bitset::new(g.m() as usize);
            for &e in &ids {
                mask.insert(e as usize);
            }
            masks.push(mask);
            // store edge-set members in normalized (sorted, deduped) form so
            // serialization round-trips bit for bit
            normalized.push(match member {
                FamilyMember::EdgeSet(_) => FamilyMember::EdgeSet(ids),
                other => other,
            });
        }
        Ok(SeparatingFamily {
            members: normalized,
            masks,
            host_edges: g.m(),
            host_fingerprint: g.fingerprint(),
        })
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn member_mask(&self, k: usize) -> &Bitset {
        &self.masks[k]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn host_edge_count(&self) -> u32 {
        self.host_edges
    }

    pub fn host_fingerprint(&self) -> u64 {
        self.host_fingerprint
    }

    /// Concatenate two families over the same host, keeping member order.
    pub fn merge(mut self, other: SeparatingFamily) -> Result<SeparatingFamily, FamilyError> {
        if self.host_fingerprint != other.host_fingerprint {
            return Err(FamilyError::HostMismatch {
                expected: format!("{:016x}", self.host_fingerprint),
                found: format!("{:016x}", other.host_fingerprint),
            });
        }
        self.members.extend(other.members);
        self.masks.extend(other.masks);
        Ok(self)
    }
}

/// Outcome of a pairwise separation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationVerdict {
    Pass,
    /// The lexicographically first failing pair: no member contains
    /// `target` while missing `other`.
    Fail { target: EdgeId, other: EdgeId },
}

impl SeparationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SeparationVerdict::Pass)
    }
}

impl std::fmt::Display for SeparationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeparationVerdict::Pass => write!(f, "pass"),
            SeparationVerdict::Fail { target, other } => {
                write!(f, "fail: no member contains edge {target} and misses edge {other}")
            }
        }
    }
}

/// Per-edge membership signatures: bit k of `sigs[i]` says member k contains
/// ground edge i.
fn signatures(ids: &[EdgeId], fam: &SeparatingFamily) -> Vec<Bitset> {
    ids.iter()
        .map(|&e| {
            let mut s = Bitset::new(fam.len());
            for k in 0..fam.len() {
                if fam.member_mask(k).contains(e as usize) {
                    s.insert(k);
                }
            }
            s
        })
        .collect()
}

fn sorted_ground(ground: &[EdgeId], fam: &SeparatingFamily) -> Vec<EdgeId> {
    assert!(!ground.is_empty(), "ground set must be non-empty");
    let mut ids = ground.to_vec();
    ids.sort_unstable();
    ids.dedup();
    for &e in &ids {
        assert!(
            e < fam.host_edge_count(),
            "ground edge {e} outside the family's host"
        );
    }
    ids
}

/// Pass iff for every ordered pair of distinct ground edges (e, e') some
/// member contains e and not e'. The failing pair, if any, is the
/// lexicographically first in (e, e') order.
pub fn check_strong_separation(ground: &[EdgeId], fam: &SeparatingFamily) -> SeparationVerdict {
    let ids = sorted_ground(ground, fam);
    let sigs = signatures(&ids, fam);
    for i in 0..ids.len() {
        for j in 0..ids.len() {
            if i != j && sigs[i].count_minus(&sigs[j]) == 0 {
                return SeparationVerdict::Fail {
                    target: ids[i],
                    other: ids[j],
                };
            }
        }
    }
    SeparationVerdict::Pass
}

/// Pass iff for every unordered pair of distinct ground edges at least one
/// direction is separated; equivalently no two ground edges share their
/// membership signature.
pub fn check_weak_separation(ground: &[EdgeId], fam: &SeparatingFamily) -> SeparationVerdict {
    let ids = sorted_ground(ground, fam);
    let sigs = signatures(&ids, fam);
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if sigs[i].count_minus(&sigs[j]) == 0 && sigs[j].count_minus(&sigs[i]) == 0 {
                return SeparationVerdict::Fail {
                    target: ids[i],
                    other: ids[j],
                };
            }
        }
    }
    SeparationVerdict::Pass
}

fn join_ids<T: std::fmt::Display>(ids: &[T]) -> String {
    ids.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serialize a family into a bundle of (file name, content) pairs: the
/// family file itself plus one sidecar per subdivision certificate.
pub fn serialize_family(fam: &SeparatingFamily, stem: &str) -> Vec<(String, String)> {
    let mut sidecars = Vec::new();
    let mut body = format!(
        "family {:016x} {}\n",
        fam.host_fingerprint(),
        fam.len()
    );
    for (k, member) in fam.members().iter().enumerate() {
        match member {
            FamilyMember::SingleEdge(e) => body.push_str(&format!("edge {e}\n")),
            FamilyMember::Subdivision(cert) => {
                let name = format!("{stem}.cert-{k}.txt");
                body.push_str(&format!("cert {name}\n"));
                sidecars.push((name, serialize_cert(cert)));
            }
            FamilyMember::Biclique { left, right } => {
                body.push_str(&format!(
                    "biclique {} | {}\n",
                    join_ids(left),
                    join_ids(right)
                ));
            }
            FamilyMember::EdgeSet(ids) => body.push_str(&format!("set {}\n", join_ids(ids))),
        }
    }
    let mut files = vec![(format!("{stem}.family.txt"), body)];
    files.append(&mut sidecars);
    files
}

/// Parse a family file against its host graph. `load_cert` resolves the
/// file name on a "cert" line to that file's content.
pub fn parse_family(
    g: &Graph,
    text: &str,
    load_cert: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<SeparatingFamily, FamilyError> {
    let bad = |line: usize, message: &str| FamilyError::Parse {
        line,
        message: message.into(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| bad(0, "empty family file, expected \"family <host-hash> <count>\""))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "family" {
        return Err(bad(hline, "expected \"family <host-hash> <count>\""));
    }
    let found_hash = toks[1].to_string();
    let expected = format!("{:016x}", g.fingerprint());
    if found_hash != expected {
        return Err(FamilyError::HostMismatch {
            expected,
            found: found_hash,
        });
    }
    let count: usize = toks[2]
        .parse()
        .map_err(|_| bad(hline, "malformed member count"))?;
    let mut members = Vec::with_capacity(count);
    for _ in 0..count {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| bad(0, "family file ended before all members were listed"))?;
        let (kind, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match kind {
            "edge" => {
                let e: EdgeId = rest
                    .parse()
                    .map_err(|_| bad(lno, "malformed edge id"))?;
                members.push(FamilyMember::SingleEdge(e));
            }
            "cert" => {
                if rest.is_empty() {
                    return Err(bad(lno, "cert line without a file name"));
                }
                let content = load_cert(rest).map_err(|message| FamilyError::CertLoad {
                    path: rest.to_string(),
                    message,
                })?;
                members.push(FamilyMember::Subdivision(parse_cert(&content)?));
            }
            "biclique" => {
                let (lhs, rhs) = rest
                    .split_once('|')
                    .ok_or_else(|| bad(lno, "biclique line missing the | side separator"))?;
                let parse_side = |s: &str| -> Result<Vec<VertexId>, FamilyError> {
                    s.split_whitespace()
                        .map(|t| t.parse::<VertexId>().map_err(|_| bad(lno, "malformed biclique vertex")))
                        .collect()
                };
                members.push(FamilyMember::Biclique {
                    left: parse_side(lhs)?,
                    right: parse_side(rhs)?,
                });
            }
            "set" => {
                let ids: Result<Vec<EdgeId>, FamilyError> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<EdgeId>().map_err(|_| bad(lno, "malformed edge id")))
                    .collect();
                members.push(FamilyMember::EdgeSet(ids?));
            }
            other => {
                return Err(bad(lno, &format!("unknown member kind \"{other}\"")));
            }
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(bad(lno, "unexpected content after the member list"));
    }
    SeparatingFamily::new(g, members)
}

/// Convenience: the family of all ground edges as single-edge members.
/// Always strongly separates its ground set.
pub fn all_singles(g: &Graph, ground: &[EdgeId]) -> SeparatingFamily {
    let mut ids = ground.to_vec();
    ids.sort_unstable();
    ids.dedup();
    SeparatingFamily::new(g, ids.into_iter().map(FamilyMember::SingleEdge).collect())
        .expect("single edges from the ground set are always valid members")
}
