//! Block schedules and decoding delays.
//!
//! In the block-Markov scheme each node forwards a source's message stream
//! with a per-node block count `f` and a cumulative offset `d`. A node whose
//! downstream neighbour resolves it as reference must stretch its block to
//! span the neighbour's decoding window, which makes `f` recursive: the
//! stretched count is the sum of the counts of the opposite-flow nodes the
//! neighbour still has pending, cut off at a rank threshold.
//!
//! Two thresholds are supported. [`ThresholdMode::StrictSelf`] cuts at the
//! node's own rank; recursion then strictly descends in rank and always
//! terminates. [`ThresholdMode::Literal`] cuts at the rank of the node's own
//! reference, which admits mutually recursive pairs on some valid rankings
//! (e.g. `(5,3,1,2,4)`), reported as [`Error::RecursionCycle`].

use crate::error::{Error, Result};
use crate::ranking::{SourceSet, ValidPairing};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Which rank threshold caps the pending set in the delay recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Cut at the recursing node's own rank (always terminates).
    #[default]
    StrictSelf,
    /// Cut at the rank of the recursing node's reference.
    Literal,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::StrictSelf => "strict-self",
            ThresholdMode::Literal => "literal",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<ThresholdMode> {
        match s {
            "strict-self" | "strict_self" => Ok(ThresholdMode::StrictSelf),
            "literal" => Ok(ThresholdMode::Literal),
            other => Err(Error::Parse(format!(
                "threshold mode must be \"strict-self\" or \"literal\", got {other:?}"
            ))),
        }
    }
}

/// Per-node block counts `f`, cumulative offsets `d` and decoding delays `d~`
/// for both message flows of a valid pairing.
///
/// Maps are keyed `(node, source)`. `f` covers every transmitter of a flow
/// (all path nodes except the destination), `d` every path node (zero at the
/// source), `d~` every decoder (all path nodes except the source).
#[derive(Clone, Debug)]
pub struct DelayTable {
    pairing: ValidPairing,
    mode: ThresholdMode,
    f: BTreeMap<(usize, usize), u64>,
    d: BTreeMap<(usize, usize), u64>,
    dtilde: BTreeMap<(usize, usize), u64>,
}

impl DelayTable {
    /// Solves the delay recursion for both flows.
    pub fn compute(pairing: &ValidPairing, mode: ThresholdMode) -> Result<DelayTable> {
        let m = pairing.node_count();
        if m < 3 {
            return Err(Error::TooFewNodes { needed: 3, got: m });
        }
        let mut f = BTreeMap::new();
        let mut in_progress = Vec::new();
        for source in [1, m] {
            let path = pairing.paths().source_path(source)?.to_vec();
            for &node in &path[..path.len() - 1] {
                solve_f(pairing, mode, node, source, &mut f, &mut in_progress)?;
            }
        }

        let mut d = BTreeMap::new();
        let mut dtilde = BTreeMap::new();
        for source in [1, m] {
            let path = pairing.paths().source_path(source)?;
            let mut acc = 0u64;
            for &node in path {
                d.insert((node, source), acc);
                if node != source {
                    dtilde.insert((node, source), acc - 1);
                }
                if let Some(&fv) = f.get(&(node, source)) {
                    acc += fv;
                }
            }
        }
        Ok(DelayTable { pairing: pairing.clone(), mode, f, d, dtilde })
    }

    pub fn pairing(&self) -> &ValidPairing {
        &self.pairing
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.pairing.node_count()
    }

    pub fn f(&self, node: usize, source: usize) -> Option<u64> {
        self.f.get(&(node, source)).copied()
    }

    pub fn d(&self, node: usize, source: usize) -> Option<u64> {
        self.d.get(&(node, source)).copied()
    }

    pub fn dtilde(&self, node: usize, source: usize) -> Option<u64> {
        self.dtilde.get(&(node, source)).copied()
    }

    /// Blocks between a source's first transmission of a message and the
    /// opposite destination decoding it: the destination's decoding delay.
    pub fn pipeline_latency(&self, source: usize) -> Result<u64> {
        let m = self.node_count();
        let dest = match source {
            1 => m,
            s if s == m => 1,
            s => return Err(Error::UnknownNode { node: s, m }),
        };
        Ok(self.dtilde[&(dest, source)])
    }

    /// The larger of the two flows' latencies.
    pub fn max_latency(&self) -> u64 {
        let m = self.node_count();
        self.pipeline_latency(1).unwrap().max(self.pipeline_latency(m).unwrap())
    }

    /// Replaces decoding delays with user-supplied values. Every key must
    /// name an existing decoder entry.
    pub fn with_dtilde_overrides(
        mut self,
        overrides: &BTreeMap<(usize, usize), u64>,
    ) -> Result<DelayTable> {
        for (&key, &value) in overrides {
            match self.dtilde.get_mut(&key) {
                Some(slot) => *slot = value,
                None => {
                    return Err(Error::Parse(format!(
                        "no decoding delay exists for node {} on source {}'s flow",
                        key.0, key.1
                    )))
                }
            }
        }
        Ok(self)
    }

    /// Serializable snapshot with `"node,source"` keys.
    pub fn report(&self) -> DelayReport {
        let fmt_map = |map: &BTreeMap<(usize, usize), u64>| {
            map.iter().map(|(&(n, s), &v)| (format!("{n},{s}"), v)).collect()
        };
        let m = self.node_count();
        let mut latency = BTreeMap::new();
        latency.insert("1".to_string(), self.pipeline_latency(1).unwrap());
        latency.insert(m.to_string(), self.pipeline_latency(m).unwrap());
        DelayReport {
            ranks: self.pairing.ranks().as_slice().to_vec(),
            mode: self.mode.to_string(),
            f: fmt_map(&self.f),
            d: fmt_map(&self.d),
            dtilde: fmt_map(&self.dtilde),
            latency,
        }
    }

    #[cfg(test)]
    fn set_dtilde(&mut self, node: usize, source: usize, value: u64) {
        self.dtilde.insert((node, source), value);
    }
}

/// JSON form of a [`DelayTable`].
#[derive(Clone, Debug, Serialize)]
pub struct DelayReport {
    pub ranks: Vec<usize>,
    pub mode: String,
    pub f: BTreeMap<String, u64>,
    pub d: BTreeMap<String, u64>,
    pub dtilde: BTreeMap<String, u64>,
    pub latency: BTreeMap<String, u64>,
}

fn solve_f(
    pairing: &ValidPairing,
    mode: ThresholdMode,
    node: usize,
    source: usize,
    f: &mut BTreeMap<(usize, usize), u64>,
    in_progress: &mut Vec<(usize, usize)>,
) -> Result<u64> {
    if let Some(&v) = f.get(&(node, source)) {
        return Ok(v);
    }
    if in_progress.contains(&(node, source)) {
        return Err(Error::RecursionCycle { node, flow: source });
    }
    in_progress.push((node, source));

    let m = pairing.node_count();
    let path = pairing.paths().source_path(source)?;
    let pos = path.iter().position(|&n| n == node).expect("node lies on its flow's path");
    let succ = path[pos + 1];
    let stretched = pairing.is_relay(succ) && pairing.ref_node(succ)? == node;

    let value = if stretched {
        let other = if source == 1 { m } else { 1 };
        let threshold = if pairing.is_relay(node) && mode == ThresholdMode::Literal {
            pairing.rank_of(pairing.ref_node(node)?)
        } else {
            pairing.rank_of(node)
        };
        let sel = if other == 1 { SourceSet::S1 } else { SourceSet::SM };
        let pending = pairing.paths().predecessors(node, sel)?;
        let mut total = 0u64;
        for k in pending.iter().filter(|&k| pairing.rank_of(k) <= threshold) {
            total += solve_f(pairing, mode, k, other, f, in_progress)?;
        }
        total
    } else {
        1
    };

    in_progress.pop();
    f.insert((node, source), value);
    Ok(value)
}

// ---------------------------------------------------------------------------
// Block schedule simulation
// ---------------------------------------------------------------------------

/// What one node does in one block: the message indices it transmits for each
/// flow and the indices it finishes decoding at the block's end. `0` is the
/// dummy index (nothing to send / nothing decoded yet).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleRow {
    pub block: u64,
    pub node: usize,
    pub w1_index: u64,
    pub wm_index: u64,
    pub decoded_w1: u64,
    pub decoded_wm: u64,
}

/// A fully unrolled transmission/decoding table over a finite horizon.
#[derive(Clone, Debug)]
pub struct Schedule {
    m: usize,
    blocks: u64,
    rows: Vec<ScheduleRow>,
}

impl Schedule {
    pub fn node_count(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    /// Rows in block-major, then node order.
    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    pub fn row(&self, block: u64, node: usize) -> &ScheduleRow {
        &self.rows[(block as usize - 1) * self.m + (node - 1)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("block,node,w1_index,wM_index,decoded_w1,decoded_wM\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.block, r.node, r.w1_index, r.wm_index, r.decoded_w1, r.decoded_wm
            ));
        }
        out
    }
}

fn sub_or_dummy(t: u64, delay: Option<u64>) -> u64 {
    match delay {
        Some(d) if t > d => t - d,
        _ => 0,
    }
}

/// Unrolls `blocks` blocks of the delay table's schedule. The horizon must
/// let at least one message cross end to end: `blocks >= max latency + 1`.
pub fn build_schedule(delays: &DelayTable, blocks: u64) -> Result<Schedule> {
    let needed = delays.max_latency() + 1;
    if blocks < needed {
        return Err(Error::HorizonTooShort { blocks, needed });
    }
    let m = delays.node_count();
    let mut rows = Vec::with_capacity(blocks as usize * m);
    for t in 1..=blocks {
        for node in 1..=m {
            rows.push(ScheduleRow {
                block: t,
                node,
                w1_index: sub_or_dummy(t, delays.f(node, 1).and(delays.d(node, 1))),
                wm_index: sub_or_dummy(t, delays.f(node, m).and(delays.d(node, m))),
                decoded_w1: sub_or_dummy(t, delays.dtilde(node, 1)),
                decoded_wm: sub_or_dummy(t, delays.dtilde(node, m)),
            });
        }
    }
    Ok(Schedule { m, blocks, rows })
}

/// Outcome of the causality audit.
#[derive(Clone, Debug, Serialize)]
pub struct CausalityReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Audits a delay table over a finite horizon.
///
/// Static checks: every decoder's delay is shorter than its transmit offset
/// (a node only forwards messages it has finished decoding) and no shorter
/// than its upstream neighbour's transmit offset (a message must be on the
/// air before it can be decoded). Dynamic check: the schedule is simulated
/// block by block against per-node knowledge sets.
pub fn verify_causality(delays: &DelayTable, blocks: u64) -> Result<CausalityReport> {
    let m = delays.node_count();
    let mut violations = Vec::new();

    for source in [1, m] {
        let path = delays.pairing().paths().source_path(source)?.to_vec();
        for &node in &path {
            if node == source {
                continue;
            }
            let dt = delays.dtilde(node, source).unwrap();
            if let Some(d) = delays.d(node, source) {
                if delays.f(node, source).is_some() && d <= dt {
                    violations.push(format!(
                        "node {node} forwards source {source}'s message at offset {d} \
                         but only decodes it after delay {dt}"
                    ));
                }
            }
            let up = delays.pairing().paths().upstream(node, source)?;
            let up_d = delays.d(up, source).unwrap();
            if dt < up_d {
                violations.push(format!(
                    "node {node} claims to decode source {source}'s message after delay {dt} \
                     before upstream node {up} first transmits it at offset {up_d}"
                ));
            }
        }
    }

    // Dynamic simulation: decoded[(node, source)] is the highest message
    // index the node has finished decoding so far.
    let mut decoded: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let horizon = blocks.max(delays.max_latency() + 1);
    for t in 1..=horizon {
        for source in [1, m] {
            let path = delays.pairing().paths().source_path(source)?.to_vec();
            for &node in &path[..path.len() - 1] {
                let idx = sub_or_dummy(t, delays.d(node, source));
                if idx >= 1
                    && node != source
                    && decoded.get(&(node, source)).copied().unwrap_or(0) < idx
                {
                    violations.push(format!(
                        "block {t}: node {node} must transmit message {idx} of source \
                         {source} without having decoded it"
                    ));
                }
            }
        }
        for source in [1, m] {
            let path = delays.pairing().paths().source_path(source)?.to_vec();
            for &node in &path {
                if node == source {
                    continue;
                }
                let idx = sub_or_dummy(t, delays.dtilde(node, source));
                if idx >= 1 {
                    let up = delays.pairing().paths().upstream(node, source)?;
                    let on_air = sub_or_dummy(t, delays.d(up, source));
                    if idx > on_air {
                        violations.push(format!(
                            "block {t}: node {node} decodes message {idx} of source {source} \
                             which upstream node {up} has not yet transmitted"
                        ));
                    }
                    decoded.insert((node, source), idx);
                }
            }
        }
        if violations.len() > 32 {
            break; // enough evidence; avoid flooding the report
        }
    }

    Ok(CausalityReport { ok: violations.is_empty(), violations })
}
