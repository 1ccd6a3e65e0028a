//! Rate-region assembly.
//!
//! The achievable region of the decode-forward strategy is a union over all
//! valid rank assignments of per-assignment pentagons. Each pentagon is the
//! intersection over nodes of that node's rate constraints:
//!
//! * at a source, the single constraint on the opposing rate
//!   `R_S < I(X_P; Y_i | X_P̃)` with `P` the predecessors on the opposing path;
//! * at a relay, for each nonempty source subset `S`, the orthant-decomposed
//!   constraint `R_S < sum_{j in A} I(X_j; Y_i | X_L(j)) + I(X_B; Y_i | X_B̃)`
//!   built from the relay's orthant sets.
//!
//! Alongside the union the module computes the nested-conditioning inner
//! pentagon on the canonical paths, the cut-set outer rectangle, and the
//! multiple-access decomposition of a downstream node's pentagon into
//! per-extension sub-pentagons.

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::geometry::{
    frontier_value, Frontier, PentagonUnion, RatePentagon, DEFAULT_TOL,
};
use crate::node::NodeSet;
use crate::ranking::{enumerate_valid, PathPair, SourceSet, ValidPairing};
use serde::Serialize;
use std::str::FromStr;

/// How many nodes exhaustive path enumeration supports.
pub const MAX_ALL_PATH_NODES: usize = 7;

/// Grid resolution used for coverage witnesses.
pub const WITNESS_GRID: usize = 200;

/// Which routing paths a bound ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathUniverse {
    /// The single canonical pair `(1..M, M..1)`.
    Canonical,
    /// Every pair of full paths headed by the sources.
    All,
}

impl FromStr for PathUniverse {
    type Err = Error;

    fn from_str(s: &str) -> Result<PathUniverse> {
        match s {
            "canonical" => Ok(PathUniverse::Canonical),
            "all" => Ok(PathUniverse::All),
            other => Err(Error::Parse(format!(
                "path universe must be \"canonical\" or \"all\", got {other:?}"
            ))),
        }
    }
}

fn check_node_count(model: &ChannelModel, m: usize) -> Result<()> {
    if model.node_count() != m {
        return Err(Error::Parse(format!(
            "channel model describes {} nodes, expected {m}",
            model.node_count()
        )));
    }
    Ok(())
}

/// The single-letter constraint pentagon of one node under given paths,
/// without any orthant decomposition (full joint conditioning).
fn nested_pentagon(model: &ChannelModel, paths: &PathPair, node: usize) -> Result<RatePentagon> {
    let m = paths.node_count();
    let cap = |sel: SourceSet| -> Result<f64> {
        let p = paths.predecessors(node, sel)?;
        let p_comp = paths.predecessor_complement(node, sel)?;
        model.mi_node(p, node, p_comp.without(node))
    };
    if node == 1 {
        RatePentagon::new(f64::INFINITY, cap(SourceSet::SM)?, f64::INFINITY)
    } else if node == m {
        RatePentagon::new(cap(SourceSet::S1)?, f64::INFINITY, f64::INFINITY)
    } else {
        RatePentagon::new(cap(SourceSet::S1)?, cap(SourceSet::SM)?, cap(SourceSet::Both)?)
    }
}

/// One node's constraint pentagon under a valid pairing: the full-conditioning
/// constraint at sources, the orthant-decomposed constraint at relays.
pub fn node_region(
    model: &ChannelModel,
    pairing: &ValidPairing,
    node: usize,
) -> Result<RatePentagon> {
    check_node_count(model, pairing.node_count())?;
    let m = pairing.node_count();
    if node == 1 || node == m {
        return nested_pentagon(model, pairing.paths(), node);
    }
    let cap = |sel: SourceSet| -> Result<f64> {
        let o = pairing.orthant_sets(node, sel)?;
        let mut total = model.mi_node(o.below, node, o.below_complement.without(node))?;
        for j in o.above.iter() {
            total += model.mi_node(NodeSet::singleton(j), node, pairing.lower_set(j)?.without(node))?;
        }
        Ok(total)
    };
    RatePentagon::new(cap(SourceSet::S1)?, cap(SourceSet::SM)?, cap(SourceSet::Both)?)
}

/// The pentagon of a single rank assignment: intersection over all nodes.
pub fn scheme_region(model: &ChannelModel, pairing: &ValidPairing) -> Result<RatePentagon> {
    check_node_count(model, pairing.node_count())?;
    let mut region = RatePentagon::unbounded();
    for node in 1..=pairing.node_count() {
        region = region.intersect(&node_region(model, pairing, node)?);
    }
    Ok(region)
}

/// The full achievable region: union over all `2^(M-1)` valid pairings.
#[derive(Clone, Debug)]
pub struct RegionUnion {
    members: Vec<(ValidPairing, RatePentagon)>,
    union: PentagonUnion,
}

impl RegionUnion {
    pub fn members(&self) -> &[(ValidPairing, RatePentagon)] {
        &self.members
    }

    pub fn as_pentagon_union(&self) -> &PentagonUnion {
        &self.union
    }

    pub fn frontier(&self) -> &Frontier {
        self.union.frontier()
    }

    pub fn area(&self) -> f64 {
        self.union.area()
    }

    pub fn max_r1(&self) -> f64 {
        self.union.max_r1()
    }

    pub fn max_rm(&self) -> f64 {
        self.union.max_rm()
    }

    pub fn contains(&self, r1: f64, rm: f64, tol: f64) -> bool {
        self.union.contains(r1, rm, tol)
    }

    pub fn report(&self) -> RegionReport {
        RegionReport {
            members: self
                .members
                .iter()
                .map(|(p, pent)| MemberReport {
                    ranks: p.ranks().as_slice().to_vec(),
                    caps: pent.caps(),
                })
                .collect(),
            frontier: self.union.frontier().clone(),
        }
    }
}

/// Serializable form of a region union (`members` + `frontier`).
#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub members: Vec<MemberReport>,
    pub frontier: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberReport {
    pub ranks: Vec<usize>,
    pub caps: [f64; 3],
}

/// Computes the achievable union for `m >= 3` nodes, members in lexicographic
/// rank order.
pub fn achievable_region(model: &ChannelModel, m: usize) -> Result<RegionUnion> {
    if m < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: m });
    }
    check_node_count(model, m)?;
    let mut members = Vec::with_capacity(1 << (m - 1));
    for pairing in enumerate_valid(m)? {
        let pent = scheme_region(model, &pairing)?;
        members.push((pairing, pent));
    }
    let union = PentagonUnion::new(members.iter().map(|(_, p)| *p).collect())?;
    Ok(RegionUnion { members, union })
}

/// The nested-conditioning pentagon on the canonical paths: intersection over
/// nodes of the full-conditioning constraints, no rank structure involved.
pub fn cd_region(model: &ChannelModel, m: usize) -> Result<RatePentagon> {
    if m < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: m });
    }
    check_node_count(model, m)?;
    let paths = PathPair::canonical(m);
    let mut region = RatePentagon::unbounded();
    for node in 1..=m {
        region = region.intersect(&nested_pentagon(model, &paths, node)?);
    }
    Ok(region)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (k, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The nested-conditioning region over every full path pair: a union of one
/// pentagon per pair. Exhaustive, hence capped at [`MAX_ALL_PATH_NODES`].
pub fn cd_region_all_paths(model: &ChannelModel, m: usize) -> Result<PentagonUnion> {
    if m < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: m });
    }
    if m > MAX_ALL_PATH_NODES {
        return Err(Error::PathUniverseTooLarge { m, max: MAX_ALL_PATH_NODES });
    }
    check_node_count(model, m)?;
    let forward_tails = permutations(&(2..=m).collect::<Vec<_>>());
    let backward_tails = permutations(&(1..m).collect::<Vec<_>>());
    let mut pentagons = Vec::with_capacity(forward_tails.len() * backward_tails.len());
    for ft in &forward_tails {
        let mut fwd = vec![1];
        fwd.extend(ft);
        for bt in &backward_tails {
            let mut bwd = vec![m];
            bwd.extend(bt);
            let paths = PathPair::new(fwd.clone(), bwd.clone())?;
            let mut region = RatePentagon::unbounded();
            for node in 1..=m {
                region = region.intersect(&nested_pentagon(model, &paths, node)?);
            }
            pentagons.push(region);
        }
    }
    PentagonUnion::new(pentagons)
}

/// The cut-set outer bound. With two sources only per-rate cuts exist, so the
/// region is the rectangle `{R1 <= c1, RM <= cm}`.
///
/// For the canonical universe the cuts are the path prefixes; for `All` every
/// sender set containing the source (each such set is a prefix of some path,
/// and the constraint depends on the path only through that set).
pub fn cutset_region(model: &ChannelModel, m: usize, universe: PathUniverse) -> Result<RatePentagon> {
    if m < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: m });
    }
    check_node_count(model, m)?;
    let cut = |senders: NodeSet| -> Result<f64> {
        let receivers = senders.complement(m);
        model.mi_cut(senders, receivers, receivers)
    };
    let (c1, cm) = match universe {
        PathUniverse::Canonical => {
            let mut c1 = f64::INFINITY;
            for i in 2..=m {
                c1 = c1.min(cut(NodeSet::range(1, i - 1))?);
            }
            let mut cm = f64::INFINITY;
            for i in 1..m {
                cm = cm.min(cut(NodeSet::range(i + 1, m))?);
            }
            (c1, cm)
        }
        PathUniverse::All => {
            if m > MAX_ALL_PATH_NODES {
                return Err(Error::PathUniverseTooLarge { m, max: MAX_ALL_PATH_NODES });
            }
            let mut c1 = f64::INFINITY;
            let mut cm = f64::INFINITY;
            // Proper subsets of the non-source nodes joined with the source.
            let others: Vec<usize> = (2..=m).collect();
            for mask in 0..(1u32 << (m - 1)) - 1 {
                let extra: NodeSet =
                    others.iter().enumerate().filter(|&(k, _)| mask >> k & 1 == 1).map(|(_, &n)| n).collect();
                c1 = c1.min(cut(extra.with(1))?);
            }
            let others: Vec<usize> = (1..m).collect();
            for mask in 0..(1u32 << (m - 1)) - 1 {
                let extra: NodeSet =
                    others.iter().enumerate().filter(|&(k, _)| mask >> k & 1 == 1).map(|(_, &n)| n).collect();
                cm = cm.min(cut(extra.with(m))?);
            }
            (c1, cm)
        }
    };
    RatePentagon::new(c1, cm, f64::INFINITY)
}

/// Checks that the region under `inner` lies inside the region under `outer`.
/// Exact for slope-`{0,-1}` frontiers: the difference of the two envelopes is
/// linear between merged breakpoints, so testing those suffices.
pub fn frontier_contained(inner: &Frontier, outer: &Frontier, tol: f64) -> bool {
    let inner_max = inner.last().map_or(0.0, |v| v.0);
    let outer_max = outer.last().map_or(0.0, |v| v.0);
    if inner_max > outer_max + tol {
        return false;
    }
    inner
        .iter()
        .chain(outer.iter())
        .map(|v| v.0.min(inner_max))
        .all(|x| {
            let iv = frontier_value(inner, x).unwrap_or(0.0);
            match frontier_value(outer, x) {
                Some(ov) => iv <= ov + tol,
                None => iv <= tol,
            }
        })
}

// ---------------------------------------------------------------------------
// Downstream-node decomposition (two sources into one receiver through a
// chain of relays: sources 1 and M, receiver 2, relays 3..M-1 with M's
// message routed M -> M-1 -> ... -> 3 -> 2).
// ---------------------------------------------------------------------------

/// The receiver's own constraint pentagon in the downstream topology.
pub fn bmarc_node2_region(model: &ChannelModel, m: usize) -> Result<RatePentagon> {
    if m < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: m });
    }
    check_node_count(model, m)?;
    let rest = NodeSet::range(3, m).with(1);
    RatePentagon::new(
        model.mi_node(NodeSet::singleton(1), 2, NodeSet::range(2, m))?,
        model.mi_node(NodeSet::range(3, m), 2, NodeSet::range(1, 2))?,
        model.mi_node(rest, 2, NodeSet::singleton(2))?,
    )
}

/// Sub-pentagon `i` of the decomposition, `3 <= i <= m`: node 1's rate is
/// resolved against the inputs up to node `i`, the reverse flow splits into
/// the part already forwarded (`3..i-1`, heard over node 2's floor) and the
/// part arriving alongside (`i..m`, heard with everything closer known).
pub fn bmarc_subregion(model: &ChannelModel, m: usize, i: usize) -> Result<RatePentagon> {
    if m < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: m });
    }
    check_node_count(model, m)?;
    if i < 3 || i > m {
        return Err(Error::IndexOutOfRange { index: i, lo: 3, hi: m });
    }
    let rest = NodeSet::range(3, m).with(1);
    let cap_r1 = model.mi_node(NodeSet::singleton(1), 2, NodeSet::range(2, i))?;
    let cap_rm = model.mi_node(NodeSet::range(3, i - 1), 2, NodeSet::singleton(2))?
        + model.mi_node(NodeSet::range(i, m), 2, NodeSet::range(1, i - 1))?;
    let cap_sum = model.mi_node(rest, 2, NodeSet::singleton(2))?;
    RatePentagon::new(cap_r1, cap_rm, cap_sum)
}

/// Result of comparing the union of sub-pentagons against the receiver's own
/// pentagon.
#[derive(Clone, Debug)]
pub struct CoverReport {
    /// No grid point of the receiver pentagon escapes the union.
    pub covered: bool,
    pub union_area: f64,
    pub node2_area: f64,
    /// Largest frontier height difference at any breakpoint.
    pub max_frontier_gap: f64,
    /// A point of the receiver pentagon missed by the union, if any.
    pub witness: Option<(f64, f64)>,
}

/// Verifies that the sub-pentagons jointly cover the receiver's pentagon,
/// reporting areas, the worst frontier gap, and an uncovered witness if one
/// exists (checked on a [`WITNESS_GRID`]² grid at tolerance 1e-9).
pub fn bmarc_cover_check(model: &ChannelModel, m: usize) -> Result<CoverReport> {
    let node2 = bmarc_node2_region(model, m)?;
    let subs: Vec<RatePentagon> =
        (3..=m).map(|i| bmarc_subregion(model, m, i)).collect::<Result<_>>()?;
    let union = PentagonUnion::new(subs)?;
    let target = PentagonUnion::new(vec![node2])?;

    let max_frontier_gap = union
        .frontier()
        .iter()
        .chain(target.frontier().iter())
        .map(|v| v.0)
        .map(|x| {
            let a = union.height_at(x).unwrap_or(0.0);
            let b = target.height_at(x).unwrap_or(0.0);
            (a - b).abs()
        })
        .fold(0.0, f64::max);

    let mut witness = None;
    let (xmax, ymax) = (target.max_r1(), target.max_rm());
    'grid: for gi in 0..=WITNESS_GRID {
        for gj in 0..=WITNESS_GRID {
            let x = xmax * gi as f64 / WITNESS_GRID as f64;
            let y = ymax * gj as f64 / WITNESS_GRID as f64;
            if node2.contains(x, y, -DEFAULT_TOL) && !union.contains(x, y, DEFAULT_TOL) {
                witness = Some((x, y));
                break 'grid;
            }
        }
    }
    Ok(CoverReport {
        covered: witness.is_none(),
        union_area: union.area(),
        node2_area: target.area(),
        max_frontier_gap,
        witness,
    })
}

/// The largest decomposition index whose sub-pentagon contains the point
/// (scanned from `m` downward). The point must lie in the receiver pentagon.
pub fn bmarc_select_index(model: &ChannelModel, m: usize, r1: f64, rm: f64) -> Result<usize> {
    let node2 = bmarc_node2_region(model, m)?;
    if !node2.contains(r1, rm, DEFAULT_TOL) {
        return Err(Error::PointOutsideRegion { r1, rm });
    }
    for i in (3..=m).rev() {
        if bmarc_subregion(model, m, i)?.contains(r1, rm, DEFAULT_TOL) {
            return Ok(i);
        }
    }
    // Only reachable with inconsistent table values.
    Err(Error::PointOutsideRegion { r1, rm })
}
