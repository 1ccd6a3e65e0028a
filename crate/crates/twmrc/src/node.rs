//! Node labels and node sets.
//!
//! Nodes are labelled `1..=M` as in the channel definition. Sets are small
//! (M never exceeds the low tens), so a bitmask is the natural carrier: cheap
//! set algebra, total ordering for deterministic iteration, and `Copy`.

use std::fmt;

/// An immutable set of node labels, stored as a bitmask (bit `k` = node `k+1`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeSet(u32);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    /// Set containing every node of a `m`-node network.
    pub fn full(m: usize) -> NodeSet {
        debug_assert!(m <= 32);
        NodeSet(if m == 32 { u32::MAX } else { (1u32 << m) - 1 })
    }

    pub fn singleton(node: usize) -> NodeSet {
        NodeSet(1u32 << (node - 1))
    }

    /// Nodes `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> NodeSet {
        let mut s = NodeSet::EMPTY;
        for n in lo..=hi.min(32) {
            if n >= lo {
                s = s.with(n);
            }
        }
        s
    }

    pub fn with(self, node: usize) -> NodeSet {
        NodeSet(self.0 | 1u32 << (node - 1))
    }

    pub fn without(self, node: usize) -> NodeSet {
        NodeSet(self.0 & !(1u32 << (node - 1)))
    }

    pub fn contains(self, node: usize) -> bool {
        node >= 1 && node <= 32 && self.0 & (1u32 << (node - 1)) != 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersect(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn minus(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    /// Complement within a `m`-node network.
    pub fn complement(self, m: usize) -> NodeSet {
        NodeSet::full(m).minus(self)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending iterator over member labels.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..=32usize).filter(move |&n| self.contains(n))
    }

    /// Members as an ascending `Vec`, the canonical external form.
    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = NodeSet::EMPTY;
        for n in iter {
            s = s.with(n);
        }
        s
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, n) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}
