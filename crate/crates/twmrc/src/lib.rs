//! Rate-region computations for the two-way multiple-relay channel.
//!
//! Two source nodes at the ends of a line of relays exchange messages with
//! decode-forward block-Markov coding. This crate computes the achievable
//! rate region of that strategy — a union over `2^(M-1)` rank assignments of
//! two-dimensional rate pentagons — together with the matching cut-set outer
//! bound, the multiple-access sub-region decomposition at a downstream node,
//! and the block-level encoding/decoding schedules implied by a rank
//! assignment.
//!
//! Modules:
//! * [`channel`] — Gaussian, discrete and table-backed mutual information.
//! * [`ranking`] — paths, valid rank assignments, orthant sets.
//! * [`geometry`] — pentagons, unions, frontiers and areas.
//! * [`region`] — the achievable region, bounds and decompositions.
//! * [`schedule`] — encoding/decoding delays and block schedules.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod node;
pub mod ranking;
pub mod region;
pub mod schedule;

pub use channel::{ChannelModel, DiscreteChannel, GaussianNetwork, MITable};
pub use error::{Error, Result};
pub use node::NodeSet;
pub use ranking::{PathPair, RankAssignment, SourceSet, ValidPairing};
