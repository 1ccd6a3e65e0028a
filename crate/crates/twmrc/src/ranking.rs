//! Routing paths, rank assignments and the combinatorics built on them.
//!
//! The network has `M` nodes; node 1 and node `M` are the sources and each
//! message travels along a path visiting every node. The canonical pair routes
//! source 1 along `(1, 2, ..., M)` and source `M` along `(M, M-1, ..., 1)`.
//!
//! A rank assignment gives every node a distinct priority `1..=M`. It forms a
//! *valid pairing* with the canonical paths when the rank sequence read along
//! the node line has exactly one local minimum — it strictly descends to a
//! unique valley node and strictly ascends afterwards. Exactly `2^(M-1)` such
//! assignments exist. All decoding-order structure (reference nodes, orthant
//! sets, extension order) derives from a valid pairing.

use crate::error::{Error, Result};
use crate::node::NodeSet;
use std::fmt;
use std::str::FromStr;

/// Which sources' paths a predecessor query ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceSet {
    /// Source node 1 only.
    S1,
    /// Source node M only.
    SM,
    /// Both sources.
    Both,
}

impl SourceSet {
    /// Member source labels in a `m`-node network.
    pub fn members(self, m: usize) -> Vec<usize> {
        match self {
            SourceSet::S1 => vec![1],
            SourceSet::SM => vec![m],
            SourceSet::Both => vec![1, m],
        }
    }
}

/// A pair of routing paths, one per source. Each path is a permutation of all
/// node labels beginning at its source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPair {
    forward: Vec<usize>,  // source 1's path
    backward: Vec<usize>, // source M's path
}

fn check_permutation(path: &[usize], m: usize, name: &str) -> Result<()> {
    if path.len() != m {
        return Err(Error::Parse(format!(
            "{name} path has {} entries, expected {m}",
            path.len()
        )));
    }
    let seen: NodeSet = path.iter().copied().collect();
    if path.iter().any(|&n| n < 1 || n > m) || seen.len() != m {
        return Err(Error::Parse(format!(
            "{name} path must be a permutation of 1..={m}"
        )));
    }
    Ok(())
}

impl PathPair {
    /// The canonical pair `(1..M, M..1)`.
    pub fn canonical(m: usize) -> PathPair {
        PathPair {
            forward: (1..=m).collect(),
            backward: (1..=m).rev().collect(),
        }
    }

    /// Validates that both paths are permutations headed by their sources.
    pub fn new(forward: Vec<usize>, backward: Vec<usize>) -> Result<PathPair> {
        let m = forward.len();
        if m < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: m });
        }
        if m > 32 {
            return Err(Error::Parse(format!("at most 32 nodes supported, got {m}")));
        }
        check_permutation(&forward, m, "forward")?;
        check_permutation(&backward, m, "backward")?;
        if forward[0] != 1 {
            return Err(Error::Parse("forward path must start at node 1".into()));
        }
        if backward[0] != m {
            return Err(Error::Parse(format!("backward path must start at node {m}")));
        }
        Ok(PathPair { forward, backward })
    }

    pub fn node_count(&self) -> usize {
        self.forward.len()
    }

    pub fn is_canonical(&self) -> bool {
        let m = self.node_count();
        self.forward.iter().copied().eq(1..=m) && self.backward.iter().copied().eq((1..=m).rev())
    }

    /// The path along which `source`'s message travels.
    pub fn source_path(&self, source: usize) -> Result<&[usize]> {
        let m = self.node_count();
        if source == 1 {
            Ok(&self.forward)
        } else if source == m {
            Ok(&self.backward)
        } else {
            Err(Error::Parse(format!("source must be node 1 or node {m}, got {source}")))
        }
    }

    fn check_node(&self, node: usize) -> Result<()> {
        let m = self.node_count();
        if node < 1 || node > m {
            return Err(Error::UnknownNode { node, m });
        }
        Ok(())
    }

    /// `P_node(S)`: nodes strictly preceding `node` on the selected sources'
    /// paths (union over the selection).
    pub fn predecessors(&self, node: usize, sel: SourceSet) -> Result<NodeSet> {
        self.check_node(node)?;
        let mut set = NodeSet::EMPTY;
        for s in sel.members(self.node_count()) {
            let path = self.source_path(s)?;
            for &p in path.iter().take_while(|&&p| p != node) {
                set = set.with(p);
            }
        }
        Ok(set)
    }

    /// The complement of `predecessors`; always contains `node` itself.
    pub fn predecessor_complement(&self, node: usize, sel: SourceSet) -> Result<NodeSet> {
        Ok(self.predecessors(node, sel)?.complement(self.node_count()))
    }

    /// `u(node, source)`: the one-hop predecessor of `node` on `source`'s path.
    pub fn upstream(&self, node: usize, source: usize) -> Result<usize> {
        self.check_node(node)?;
        let path = self.source_path(source)?;
        let pos = path.iter().position(|&p| p == node).expect("node on path");
        if pos == 0 {
            return Err(Error::NoPredecessor { node, flow: source });
        }
        Ok(path[pos - 1])
    }

    /// `U(node)`: one-hop predecessors over all paths on which one exists.
    pub fn upstream_set(&self, node: usize) -> Result<NodeSet> {
        self.check_node(node)?;
        let m = self.node_count();
        let mut set = NodeSet::EMPTY;
        for s in [1, m] {
            if let Ok(u) = self.upstream(node, s) {
                set = set.with(u);
            }
        }
        Ok(set)
    }
}

/// A permutation of `1..=M` giving each node a distinct rank.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankAssignment {
    ranks: Vec<usize>, // ranks[k] = rank of node k+1
}

impl RankAssignment {
    pub fn new(ranks: Vec<usize>) -> Result<RankAssignment> {
        let m = ranks.len();
        if m < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: m });
        }
        check_permutation(&ranks, m, "rank")
            .map_err(|_| Error::Parse(format!("ranks must be a permutation of 1..={m}")))?;
        Ok(RankAssignment { ranks })
    }

    pub fn node_count(&self) -> usize {
        self.ranks.len()
    }

    pub fn rank_of(&self, node: usize) -> usize {
        self.ranks[node - 1]
    }

    pub fn node_with_rank(&self, rank: usize) -> usize {
        self.ranks.iter().position(|&r| r == rank).expect("rank present") + 1
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ranks
    }
}

impl fmt::Debug for RankAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RankAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, r) in self.ranks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for RankAssignment {
    type Err = Error;

    /// Parses `"(4,2,1,3)"` (parentheses optional, spaces tolerated).
    fn from_str(s: &str) -> Result<RankAssignment> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let ranks = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad rank entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        RankAssignment::new(ranks)
    }
}

/// Whether `ranks` forms a valid pairing with `paths`: the rank sequence along
/// the node line must descend strictly to a unique valley and ascend after it.
/// Only defined for the canonical pair (the sequence read along the backward
/// path is the reverse, so the one-valley property holds for both or neither).
pub fn is_valid(paths: &PathPair, ranks: &RankAssignment) -> Result<bool> {
    if !paths.is_canonical() {
        return Err(Error::NonCanonicalPath);
    }
    if paths.node_count() != ranks.node_count() {
        return Err(Error::Parse(format!(
            "paths cover {} nodes but ranks cover {}",
            paths.node_count(),
            ranks.node_count()
        )));
    }
    let r = ranks.as_slice();
    let valley = r.iter().position(|&x| x == 1).expect("rank 1 present");
    let descending = (0..valley).all(|k| r[k] > r[k + 1]);
    let ascending = (valley..r.len() - 1).all(|k| r[k] < r[k + 1]);
    Ok(descending && ascending)
}

/// A rank assignment validated against the canonical paths.
#[derive(Clone, PartialEq, Eq)]
pub struct ValidPairing {
    paths: PathPair,
    ranks: RankAssignment,
}

impl ValidPairing {
    pub fn new(paths: PathPair, ranks: RankAssignment) -> Result<ValidPairing> {
        if !is_valid(&paths, &ranks)? {
            return Err(Error::InvalidPairing {
                reason: format!("rank sequence {ranks} has more than one local minimum"),
            });
        }
        Ok(ValidPairing { paths, ranks })
    }

    /// Convenience constructor over the canonical paths.
    pub fn from_ranks(ranks: RankAssignment) -> Result<ValidPairing> {
        let paths = PathPair::canonical(ranks.node_count());
        ValidPairing::new(paths, ranks)
    }

    pub fn node_count(&self) -> usize {
        self.ranks.node_count()
    }

    pub fn paths(&self) -> &PathPair {
        &self.paths
    }

    pub fn ranks(&self) -> &RankAssignment {
        &self.ranks
    }

    pub fn rank_of(&self, node: usize) -> usize {
        self.ranks.rank_of(node)
    }

    pub fn is_relay(&self, node: usize) -> bool {
        node > 1 && node < self.node_count()
    }

    /// `ref(node)`: the highest-ranked one-hop predecessor over both paths.
    /// Defined only at relays; for a valid pairing its rank always exceeds the
    /// relay's own.
    pub fn ref_node(&self, node: usize) -> Result<usize> {
        if node == 1 || node == self.node_count() {
            self.paths.check_node(node)?;
            return Err(Error::RefUndefinedAtSource { node });
        }
        let ups = self.paths.upstream_set(node)?;
        ups.iter()
            .max_by_key(|&u| self.rank_of(u))
            .ok_or(Error::NoPredecessor { node, flow: 1 })
    }

    /// `L(node)`: every node of strictly lower rank.
    pub fn lower_set(&self, node: usize) -> Result<NodeSet> {
        self.paths.check_node(node)?;
        let r = self.rank_of(node);
        Ok((1..=self.node_count()).filter(|&j| self.rank_of(j) < r).collect())
    }

    /// Splits the predecessors of a relay by rank relative to its reference
    /// node; see [`OrthantSets`].
    pub fn orthant_sets(&self, node: usize, sel: SourceSet) -> Result<OrthantSets> {
        let reference = self.ref_node(node)?;
        let threshold = self.rank_of(reference);
        let pred = self.paths.predecessors(node, sel)?;
        let comp = pred.complement(self.node_count());
        let above: NodeSet = pred.iter().filter(|&j| self.rank_of(j) > threshold).collect();
        let below = pred.minus(above);
        let below_complement: NodeSet =
            comp.iter().filter(|&j| self.rank_of(j) <= threshold).collect();
        Ok(OrthantSets { reference, above, below, below_complement })
    }
}

impl fmt::Debug for ValidPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ValidPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ranks)
    }
}

/// The rank-relative split of a relay's predecessor sets.
///
/// With `t = rank(ref(i))`: `above` holds predecessors ranked above `t`
/// (`A_i(S)`), `below` those ranked at most `t` (`B_i(S)`), and
/// `below_complement` the non-predecessors ranked at most `t` (`B̃_i(S)`,
/// which always contains `i` itself).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrthantSets {
    pub reference: usize,
    pub above: NodeSet,
    pub below: NodeSet,
    pub below_complement: NodeSet,
}

/// All valid pairings for `m` nodes, in lexicographic order of the rank tuple.
/// There are exactly `2^(m-1)` of them.
pub fn enumerate_valid(m: usize) -> Result<Vec<ValidPairing>> {
    if m < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: m });
    }
    if m > 24 {
        return Err(Error::Parse(format!("enumeration supports at most 24 nodes, got {m}")));
    }
    // Every valley sequence is fixed by the set of rank values placed left of
    // the valley: they appear descending, then rank 1, then the rest ascending.
    let mut tuples: Vec<Vec<usize>> = Vec::with_capacity(1 << (m - 1));
    for mask in 0u32..(1u32 << (m - 1)) {
        let mut left: Vec<usize> = (2..=m).filter(|&v| mask >> (v - 2) & 1 == 1).collect();
        let right: Vec<usize> = (2..=m).filter(|&v| mask >> (v - 2) & 1 == 0).collect();
        left.sort_unstable_by(|a, b| b.cmp(a));
        let mut seq = left;
        seq.push(1);
        seq.extend(right); // already ascending
        tuples.push(seq);
    }
    tuples.sort_unstable();
    tuples
        .into_iter()
        .map(|t| ValidPairing::from_ranks(RankAssignment::new(t)?))
        .collect()
}

/// Which side a node extends the contiguous block on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Nodes listed by ascending rank, with the extension structure made explicit:
/// the three lowest-ranked nodes form a contiguous label block around the
/// valley, and every later node extends that block by one label leftward or
/// rightward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionOrder {
    pub base: [usize; 3],
    pub extensions: Vec<(usize, Side)>,
}

impl ExtensionOrder {
    /// The full ascending-rank node order.
    pub fn order(&self) -> Vec<usize> {
        let mut v = self.base.to_vec();
        v.extend(self.extensions.iter().map(|&(n, _)| n));
        v
    }
}

/// Decomposes a valid pairing into its extension order. Requires `m >= 3`.
pub fn extension_order(pairing: &ValidPairing) -> Result<ExtensionOrder> {
    let m = pairing.node_count();
    if m < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: m });
    }
    let by_rank: Vec<usize> = (1..=m).map(|r| pairing.ranks().node_with_rank(r)).collect();
    let base = [by_rank[0], by_rank[1], by_rank[2]];
    let mut lo = base.iter().copied().min().unwrap();
    let mut hi = base.iter().copied().max().unwrap();
    if hi - lo != 2 {
        return Err(Error::InvalidPairing {
            reason: format!("three lowest-ranked nodes {base:?} are not label-contiguous"),
        });
    }
    let mut extensions = Vec::with_capacity(m - 3);
    for &n in &by_rank[3..] {
        if n + 1 == lo {
            lo = n;
            extensions.push((n, Side::Left));
        } else if n == hi + 1 {
            hi = n;
            extensions.push((n, Side::Right));
        } else {
            return Err(Error::InvalidPairing {
                reason: format!("node {n} does not extend the block {lo}..={hi}"),
            });
        }
    }
    Ok(ExtensionOrder { base, extensions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(t: &[usize]) -> RankAssignment {
        RankAssignment::new(t.to_vec()).unwrap()
    }

    fn pairing(t: &[usize]) -> ValidPairing {
        ValidPairing::from_ranks(ranks(t)).unwrap()
    }

    #[test]
    fn predecessors_on_arbitrary_paths() {
        // Five nodes routed 1->3->2->4->5 and 5->2->3->4->1.
        let paths = PathPair::new(vec![1, 3, 2, 4, 5], vec![5, 2, 3, 4, 1]).unwrap();
        assert_eq!(paths.predecessors(2, SourceSet::S1).unwrap().to_vec(), vec![1, 3]);
        assert_eq!(paths.predecessors(2, SourceSet::SM).unwrap().to_vec(), vec![5]);
        assert_eq!(paths.predecessors(2, SourceSet::Both).unwrap().to_vec(), vec![1, 3, 5]);
        assert_eq!(
            paths.predecessor_complement(2, SourceSet::Both).unwrap().to_vec(),
            vec![2, 4]
        );
        // The source heading a path has no predecessors there; on the other
        // path every other node precedes it.
        assert_eq!(paths.predecessors(1, SourceSet::S1).unwrap(), NodeSet::EMPTY);
        assert_eq!(paths.predecessors(1, SourceSet::SM).unwrap().to_vec(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn predecessors_canonical() {
        let paths = PathPair::canonical(5);
        assert_eq!(paths.predecessors(3, SourceSet::S1).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(paths.predecessors(3, SourceSet::SM).unwrap().to_vec(), vec![4, 5]);
        assert_eq!(
            paths.predecessor_complement(3, SourceSet::S1).unwrap().to_vec(),
            vec![3, 4, 5]
        );
    }

    #[test]
    fn upstream_neighbours() {
        let paths = PathPair::canonical(5);
        assert_eq!(paths.upstream(2, 1).unwrap(), 1);
        assert_eq!(paths.upstream(2, 5).unwrap(), 3);
        assert_eq!(paths.upstream_set(2).unwrap().to_vec(), vec![1, 3]);
        assert_eq!(paths.upstream_set(1).unwrap().to_vec(), vec![2]);
        assert_eq!(
            paths.upstream(1, 1),
            Err(Error::NoPredecessor { node: 1, flow: 1 })
        );
        assert_eq!(
            paths.upstream(5, 5),
            Err(Error::NoPredecessor { node: 5, flow: 5 })
        );
    }

    #[test]
    fn validity_is_the_one_valley_property() {
        let paths = PathPair::canonical(8);
        for good in [
            [1, 2, 3, 4, 5, 6, 7, 8],
            [8, 7, 6, 5, 4, 3, 2, 1],
            [8, 6, 4, 2, 1, 3, 5, 7],
            [8, 7, 6, 4, 3, 1, 2, 5],
        ] {
            assert!(is_valid(&paths, &ranks(&good)).unwrap(), "{good:?}");
        }
        assert!(is_valid(&paths, &ranks(&[7, 6, 4, 3, 1, 2, 5, 8])).unwrap());
        assert!(!is_valid(&paths, &ranks(&[1, 3, 2, 4, 5, 6, 7, 8])).unwrap());
        assert!(!is_valid(&paths, &ranks(&[2, 1, 3, 4, 5, 6, 8, 7])).unwrap());

        let twisted = PathPair::new(vec![1, 3, 2, 4], vec![4, 3, 2, 1]).unwrap();
        assert_eq!(
            is_valid(&twisted, &ranks(&[4, 2, 1, 3])),
            Err(Error::NonCanonicalPath)
        );
    }

    #[test]
    fn enumeration_counts_and_m3_list() {
        let four: Vec<String> = enumerate_valid(3)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(four, vec!["(1,2,3)", "(2,1,3)", "(3,1,2)", "(3,2,1)"]);
        for m in 2..=8 {
            assert_eq!(enumerate_valid(m).unwrap().len(), 1 << (m - 1), "m={m}");
        }
    }

    #[test]
    fn reference_nodes() {
        // Ranks (5,3,2,1,4): node 2 hears node 1 (rank 5) and node 3 (rank 2).
        let p = pairing(&[5, 3, 2, 1, 4]);
        assert_eq!(p.ref_node(2).unwrap(), 1);
        assert_eq!(p.ref_node(3).unwrap(), 2);
        assert_eq!(p.ref_node(4).unwrap(), 5);
        assert_eq!(p.ref_node(1), Err(Error::RefUndefinedAtSource { node: 1 }));
        assert_eq!(p.ref_node(5), Err(Error::RefUndefinedAtSource { node: 5 }));
        // Every relay's reference outranks it.
        for m in 2..=7 {
            for p in enumerate_valid(m).unwrap() {
                for i in 2..m {
                    let r = p.ref_node(i).unwrap();
                    assert!(p.rank_of(r) > p.rank_of(i), "{p} relay {i}");
                }
            }
        }
    }

    #[test]
    fn orthant_sets_split_predecessors() {
        let p = pairing(&[5, 3, 1, 2, 4]);
        assert_eq!(p.ref_node(4).unwrap(), 5);
        assert_eq!(p.lower_set(4).unwrap().to_vec(), vec![3]);

        let s1 = p.orthant_sets(4, SourceSet::S1).unwrap();
        assert_eq!(s1.above.to_vec(), vec![1]);
        assert_eq!(s1.below.to_vec(), vec![2, 3]);
        assert_eq!(s1.below_complement.to_vec(), vec![4, 5]);

        let sm = p.orthant_sets(4, SourceSet::SM).unwrap();
        assert_eq!(sm.above, NodeSet::EMPTY);
        assert_eq!(sm.below.to_vec(), vec![5]);
        assert_eq!(sm.below_complement.to_vec(), vec![2, 3, 4]);

        let both = p.orthant_sets(4, SourceSet::Both).unwrap();
        assert_eq!(both.above.to_vec(), vec![1]);
        assert_eq!(both.below.to_vec(), vec![2, 3, 5]);
        assert_eq!(both.below_complement.to_vec(), vec![4]);

        // above/below partition the predecessors; below_complement holds the
        // relay itself.
        for m in 3..=6 {
            for p in enumerate_valid(m).unwrap() {
                for i in 2..m {
                    for sel in [SourceSet::S1, SourceSet::SM, SourceSet::Both] {
                        let o = p.orthant_sets(i, sel).unwrap();
                        let pred = p.paths().predecessors(i, sel).unwrap();
                        assert_eq!(o.above.union(o.below), pred);
                        assert!(o.above.is_disjoint(o.below));
                        assert!(o.below_complement.contains(i));
                        assert!(o.below_complement.is_disjoint(pred));
                    }
                }
            }
        }
    }

    #[test]
    fn extension_orders() {
        let e = extension_order(&pairing(&[4, 2, 1, 3])).unwrap();
        assert_eq!(e.order(), vec![3, 2, 4, 1]);
        assert_eq!(e.base, [3, 2, 4]);
        assert_eq!(e.extensions, vec![(1, Side::Left)]);

        let e = extension_order(&pairing(&[8, 6, 4, 2, 1, 3, 5, 7])).unwrap();
        assert_eq!(e.order(), vec![5, 4, 6, 3, 7, 2, 8, 1]);

        let e = extension_order(&pairing(&[3, 2, 1])).unwrap();
        assert_eq!(e.order(), vec![3, 2, 1]);
        assert!(e.extensions.is_empty());

        assert_eq!(
            extension_order(&pairing(&[2, 1])).unwrap_err(),
            Error::TooFewNodes { needed: 3, got: 2 }
        );

        // Structural guarantee for every valid pairing.
        for m in 3..=8 {
            for p in enumerate_valid(m).unwrap() {
                let e = extension_order(&p).unwrap();
                assert_eq!(e.order().len(), m);
            }
        }
    }

    #[test]
    fn rank_tuple_round_trip() {
        let r: RankAssignment = "(4, 2, 1, 3)".parse().unwrap();
        assert_eq!(r.to_string(), "(4,2,1,3)");
        assert_eq!("4,2,1,3".parse::<RankAssignment>().unwrap(), r);
        assert!("(4,2,2,3)".parse::<RankAssignment>().is_err());
        assert!("(4,x)".parse::<RankAssignment>().is_err());
    }
}
