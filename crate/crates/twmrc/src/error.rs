//! Unified error type for the crate.

use crate::node::NodeSet;

/// Everything that can go wrong when building models, pairings, regions or
/// schedules. Variants carry enough context to be actionable from the CLI.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Sender set intersects the conditioning set or contains a receiver.
    #[error("sender set {senders} overlaps conditioning/receiver set {other}")]
    Overlap { senders: NodeSet, other: NodeSet },

    /// A table-backed model has no entry for the requested triple.
    #[error("no table entry for senders {a}, receivers {b}, conditioned {c}")]
    MissingEntry { a: NodeSet, b: NodeSet, c: NodeSet },

    /// The discrete model's joint state space exceeds the configured cap.
    #[error("discrete joint state count {count} exceeds cap {cap}")]
    StateCapExceeded { count: u128, cap: u128 },

    /// A covariance determinant came out non-positive.
    #[error("covariance matrix is numerically singular")]
    SingularCovariance,

    /// A node label outside 1..=M was supplied.
    #[error("node {node} does not exist in a {m}-node network")]
    UnknownNode { node: usize, m: usize },

    /// An operation defined only for the canonical path pair got another pair.
    #[error("operation requires the canonical path pair (1..M and M..1)")]
    NonCanonicalPath,

    /// The queried node is the head of the queried path.
    #[error("node {node} has no predecessor on the path of source {flow}")]
    NoPredecessor { node: usize, flow: usize },

    /// Reference nodes exist only at relays.
    #[error("reference node is undefined at source {node}")]
    RefUndefinedAtSource { node: usize },

    /// The rank assignment is not a valid pairing with the canonical paths.
    #[error("rank assignment is not a valid pairing: {reason}")]
    InvalidPairing { reason: String },

    /// The delay recursion revisited a value that is still being computed.
    #[error("delay recursion cycles at node {node}, source {flow}")]
    RecursionCycle { node: usize, flow: usize },

    /// A sub-region index outside its documented range.
    #[error("index {index} outside valid range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    /// A rate point fell outside the region it was supposed to lie in.
    #[error("rate point ({r1}, {rm}) lies outside the region")]
    PointOutsideRegion { r1: f64, rm: f64 },

    /// Exhaustive path enumeration was requested for too many nodes.
    #[error("path universe 'all' supports at most {max} nodes (got {m})")]
    PathUniverseTooLarge { m: usize, max: usize },

    /// The schedule horizon is shorter than the pipeline needs.
    #[error("horizon of {blocks} blocks is shorter than required {needed}")]
    HorizonTooShort { blocks: u64, needed: u64 },

    /// A geometric query on a region with no finite extent.
    #[error("region is degenerate or unbounded for this operation")]
    DegenerateRegion,

    /// Fewer nodes than the operation supports.
    #[error("operation requires at least {needed} nodes (got {got})")]
    TooFewNodes { needed: usize, got: usize },

    /// Construction-time validation of a channel model failed.
    #[error("invalid channel model: {0}")]
    InvalidModel(String),

    /// Malformed external input (JSON, ranking tuple, delay map, ...).
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
