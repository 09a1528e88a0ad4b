//! Strongly separating edge systems for graphs.
//!
//! A family of edge sets strongly separates a ground set when for every
//! ordered pair of distinct ground edges some member contains the first and
//! misses the second. This crate builds such families from structured
//! witnesses (balanced subdivisions, bicliques, short cycle systems), checks
//! them with independent verifiers, and decomposes hosts along their
//! two-vertex separators first so each piece can be handled on its own.

pub mod bipartite;
pub mod bits;
pub mod blowup;
pub mod cycles;
pub mod family;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod pipeline;
pub mod separators;
pub mod subdivision;
pub mod tutte;

/// Outcome of a verification pass: either everything checked out or a
/// human-readable description of the first violated clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
}

impl Verdict {
    pub fn fail(message: impl Into<String>) -> Verdict {
        Verdict::Fail(message.into())
    }

    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail(msg) => write!(f, "fail: {msg}"),
        }
    }
}
