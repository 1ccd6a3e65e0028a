//! Channel models and mutual-information evaluation.
//!
//! Every rate constraint in the crate reduces to one of two quantities:
//!
//! * `mi_node(A, i, C)` — the information rate `I(X_A; Y_i | X_C)` from the
//!   senders in `A` into node `i`'s observation, with the inputs in `C` known.
//! * `mi_cut(A, B, C)` — the vector version `I(X_A; Y_B | X_C)` across a cut
//!   with receiver set `B`.
//!
//! Units are bits. A receiver always knows its own transmission (full-duplex
//! echo cancellation), so the evaluators implicitly condition on `X_i`
//! (respectively `X_B`) even when the caller leaves it out of `C`.
//!
//! Three model kinds are supported: closed-form Gaussian networks, exact
//! finite discrete channels, and raw lookup tables for adversarial or
//! hand-crafted values.

use crate::error::{Error, Result};
use crate::node::NodeSet;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Default bound on `|X1|·...·|XM| · |Y1|·...·|YM|` for discrete models.
pub const DEFAULT_STATE_CAP: u128 = 10_000_000;

/// A memoryless Gaussian relay network.
///
/// Node `i` observes `Y_i = sum_j g[j][i] X_j + Z_i` with `Z_i ~ N(0, N_i)`
/// and per-node power limits `E[X_j^2] <= P_j`. Gains are indexed
/// `gains[j-1][i-1]` = transmitter row, receiver column; diagonal entries are
/// ignored (a node's own signal is cancelled).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianNetwork {
    m: usize,
    gains: Vec<Vec<f64>>,
    powers: Vec<f64>,
    noises: Vec<f64>,
}

impl GaussianNetwork {
    pub fn new(gains: Vec<Vec<f64>>, powers: Vec<f64>, noises: Vec<f64>) -> Result<GaussianNetwork> {
        let m = powers.len();
        if m < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: m });
        }
        if m > 32 {
            return Err(Error::InvalidModel(format!("at most 32 nodes supported, got {m}")));
        }
        if noises.len() != m || gains.len() != m || gains.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidModel(format!(
                "gain matrix must be {m}x{m} and noise vector length {m}"
            )));
        }
        if powers.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidModel("powers must be finite and nonnegative".into()));
        }
        if noises.iter().any(|&n| !n.is_finite() || n <= 0.0) {
            return Err(Error::InvalidModel("noise variances must be finite and positive".into()));
        }
        if gains.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::InvalidModel("gains must be finite".into()));
        }
        Ok(GaussianNetwork { m, gains, powers, noises })
    }

    /// Symmetric unit network: every cross gain, power and noise equal to 1.
    pub fn symmetric_unit(m: usize) -> Result<GaussianNetwork> {
        GaussianNetwork::new(vec![vec![1.0; m]; m], vec![1.0; m], vec![1.0; m])
    }

    /// Draws gains from `[0.1, 2.0)`, powers and noises from `[0.5, 2.0)`.
    /// Used by the randomized verification sweeps.
    pub fn random(m: usize, rng: &mut impl rand::Rng) -> Result<GaussianNetwork> {
        let gains = (0..m)
            .map(|j| {
                (0..m)
                    .map(|i| if i == j { 0.0 } else { rng.random_range(0.1..2.0) })
                    .collect()
            })
            .collect();
        let powers = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
        let noises = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
        GaussianNetwork::new(gains, powers, noises)
    }

    /// The same physical network with node labels reversed (`i -> m+1-i`).
    pub fn relabel_reversed(&self) -> GaussianNetwork {
        let m = self.m;
        let flip = |k: usize| m - 1 - k;
        GaussianNetwork {
            m,
            gains: (0..m)
                .map(|j| (0..m).map(|i| self.gains[flip(j)][flip(i)]).collect())
                .collect(),
            powers: (0..m).rev().map(|k| self.powers[k]).collect(),
            noises: (0..m).rev().map(|k| self.noises[k]).collect(),
        }
    }

    pub fn gain(&self, from: usize, to: usize) -> f64 {
        self.gains[from - 1][to - 1]
    }

    pub fn power(&self, node: usize) -> f64 {
        self.powers[node - 1]
    }

    pub fn noise(&self, node: usize) -> f64 {
        self.noises[node - 1]
    }

    /// Received power at `to` from every sender in `set`.
    fn received_power(&self, set: NodeSet, to: usize) -> f64 {
        set.iter()
            .filter(|&j| j != to)
            .map(|j| self.gain(j, to).powi(2) * self.power(j))
            .sum()
    }

    fn mi_node(&self, a: NodeSet, i: usize, c: NodeSet) -> f64 {
        let known = c.with(i);
        let unknown = a.union(known).complement(self.m);
        let interference = self.received_power(unknown, i);
        let signal = self.received_power(a, i);
        let n = self.noise(i);
        (0.5 * ((n + interference + signal) / (n + interference)).log2()).max(0.0)
    }

    fn mi_cut(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<f64> {
        let known = c.union(b);
        let unknown = a.union(known).complement(self.m);
        let rows: Vec<usize> = b.to_vec();
        let k = rows.len();
        // Covariance of the received vector's unknown part: sum over senders S
        // of P_s * g_s g_s^T restricted to the receiver rows, plus noise.
        let cov = |senders: NodeSet| -> nalgebra::DMatrix<f64> {
            let mut mat = nalgebra::DMatrix::<f64>::zeros(k, k);
            for s in senders.iter() {
                let g: Vec<f64> =
                    rows.iter().map(|&r| if r == s { 0.0 } else { self.gain(s, r) }).collect();
                let p = self.power(s);
                for r in 0..k {
                    for q in 0..k {
                        mat[(r, q)] += p * g[r] * g[q];
                    }
                }
            }
            for r in 0..k {
                mat[(r, r)] += self.noise(rows[r]);
            }
            mat
        };
        let denom = cov(unknown).determinant();
        let numer = cov(unknown.union(a)).determinant();
        if !(denom > 0.0) || !(numer > 0.0) || !numer.is_finite() {
            return Err(Error::SingularCovariance);
        }
        Ok((0.5 * (numer / denom).log2()).max(0.0))
    }
}

/// An exact finite channel: independent per-node input distributions and a
/// dense conditional table `p(y_1..y_M | x_1..x_M)`.
///
/// The transition table is stored row-major: row index enumerates the joint
/// input `(x_1, ..., x_M)` with `x_1` most significant, column index the joint
/// output likewise. Evaluation is exact summation, feasible while the joint
/// state count (rows times columns) stays under the cap.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteChannel {
    m: usize,
    input_alphabets: Vec<usize>,
    output_alphabets: Vec<usize>,
    input_pmfs: Vec<Vec<f64>>,
    transition: Vec<Vec<f64>>,
    state_cap: u128,
}

const PROB_TOL: f64 = 1e-12;

impl DiscreteChannel {
    pub fn new(
        input_alphabets: Vec<usize>,
        output_alphabets: Vec<usize>,
        input_pmfs: Vec<Vec<f64>>,
        transition: Vec<Vec<f64>>,
    ) -> Result<DiscreteChannel> {
        Self::with_state_cap(input_alphabets, output_alphabets, input_pmfs, transition, DEFAULT_STATE_CAP)
    }

    pub fn with_state_cap(
        input_alphabets: Vec<usize>,
        output_alphabets: Vec<usize>,
        input_pmfs: Vec<Vec<f64>>,
        transition: Vec<Vec<f64>>,
        state_cap: u128,
    ) -> Result<DiscreteChannel> {
        let m = input_alphabets.len();
        if m < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: m });
        }
        if output_alphabets.len() != m || input_pmfs.len() != m {
            return Err(Error::InvalidModel(
                "alphabet and pmf lists must all have one entry per node".into(),
            ));
        }
        if input_alphabets.iter().chain(&output_alphabets).any(|&n| n == 0) {
            return Err(Error::InvalidModel("alphabet sizes must be positive".into()));
        }
        let x_count: u128 = input_alphabets.iter().map(|&n| n as u128).product();
        let y_count: u128 = output_alphabets.iter().map(|&n| n as u128).product();
        let count = x_count.saturating_mul(y_count);
        if count > state_cap {
            return Err(Error::StateCapExceeded { count, cap: state_cap });
        }
        for (j, pmf) in input_pmfs.iter().enumerate() {
            if pmf.len() != input_alphabets[j] {
                return Err(Error::InvalidModel(format!(
                    "pmf of node {} must have {} entries",
                    j + 1,
                    input_alphabets[j]
                )));
            }
            if pmf.iter().any(|&p| !(0.0..=1.0 + PROB_TOL).contains(&p)) {
                return Err(Error::InvalidModel(format!("pmf of node {} has entries outside [0,1]", j + 1)));
            }
            let s: f64 = pmf.iter().sum();
            if (s - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidModel(format!(
                    "pmf of node {} sums to {s}, expected 1 within {PROB_TOL}",
                    j + 1
                )));
            }
        }
        if transition.len() as u128 != x_count {
            return Err(Error::InvalidModel(format!(
                "transition table must have {x_count} rows (one per joint input)"
            )));
        }
        for (r, row) in transition.iter().enumerate() {
            if row.len() as u128 != y_count {
                return Err(Error::InvalidModel(format!(
                    "transition row {r} must have {y_count} entries (one per joint output)"
                )));
            }
            if row.iter().any(|&p| !(0.0..=1.0 + PROB_TOL).contains(&p)) {
                return Err(Error::InvalidModel(format!("transition row {r} has entries outside [0,1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidModel(format!(
                    "transition row {r} sums to {s}, expected 1 within {PROB_TOL}"
                )));
            }
        }
        Ok(DiscreteChannel { m, input_alphabets, output_alphabets, input_pmfs, transition, state_cap })
    }

    /// Digits of `index` in the mixed radix given by `sizes` (first digit most
    /// significant), written into `out`.
    fn digits(mut index: usize, sizes: &[usize], out: &mut [usize]) {
        for k in (0..sizes.len()).rev() {
            out[k] = index % sizes[k];
            index /= sizes[k];
        }
    }

    /// Exact `I(X_A; Y_B | X_C)`, with `C` already including the implicit
    /// receiver conditioning.
    fn mi_exact(&self, a: NodeSet, b_outputs: NodeSet, c: NodeSet) -> f64 {
        let a_nodes = a.to_vec();
        let c_nodes = c.to_vec();
        let b_nodes = b_outputs.to_vec();
        let dim = |nodes: &[usize], alphabets: &[usize]| -> usize {
            nodes.iter().map(|&n| alphabets[n - 1]).product()
        };
        let na = dim(&a_nodes, &self.input_alphabets);
        let nc = dim(&c_nodes, &self.input_alphabets);
        let nb = dim(&b_nodes, &self.output_alphabets);
        let reduce = |digits: &[usize], nodes: &[usize], alphabets: &[usize]| -> usize {
            let mut idx = 0;
            for &n in nodes {
                idx = idx * alphabets[n - 1] + digits[n - 1];
            }
            idx
        };

        // Joint distribution over (x_A, x_C, y_B), then the marginals needed
        // for the conditional mutual information.
        let mut joint = vec![0.0f64; na * nc * nb];
        let x_count: usize = self.input_alphabets.iter().product();
        let y_count: usize = self.output_alphabets.iter().product();
        let mut xd = vec![0usize; self.m];
        let mut yd = vec![0usize; self.m];
        for jx in 0..x_count {
            Self::digits(jx, &self.input_alphabets, &mut xd);
            let px: f64 = (0..self.m).map(|j| self.input_pmfs[j][xd[j]]).product();
            if px == 0.0 {
                continue;
            }
            let ia = reduce(&xd, &a_nodes, &self.input_alphabets);
            let ic = reduce(&xd, &c_nodes, &self.input_alphabets);
            let row = &self.transition[jx];
            for jy in 0..y_count {
                let p = row[jy];
                if p == 0.0 {
                    continue;
                }
                Self::digits(jy, &self.output_alphabets, &mut yd);
                let ib = reduce(&yd, &b_nodes, &self.output_alphabets);
                joint[(ia * nc + ic) * nb + ib] += px * p;
            }
        }

        let mut p_ac = vec![0.0f64; na * nc];
        let mut p_cb = vec![0.0f64; nc * nb];
        let mut p_c = vec![0.0f64; nc];
        for ia in 0..na {
            for ic in 0..nc {
                for ib in 0..nb {
                    let p = joint[(ia * nc + ic) * nb + ib];
                    p_ac[ia * nc + ic] += p;
                    p_cb[ic * nb + ib] += p;
                    p_c[ic] += p;
                }
            }
        }
        let mut mi = 0.0;
        for ia in 0..na {
            for ic in 0..nc {
                for ib in 0..nb {
                    let p = joint[(ia * nc + ic) * nb + ib];
                    if p > 0.0 {
                        mi += p * (p * p_c[ic] / (p_ac[ia * nc + ic] * p_cb[ic * nb + ib])).log2();
                    }
                }
            }
        }
        mi.max(0.0)
    }
}

/// A direct table of mutual-information values keyed by `(A, B, C)`, with `B`
/// the receiver set (`{i}` for per-node queries). No interpolation, no
/// defaults: a missing key is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct MITable {
    m: usize,
    entries: BTreeMap<(NodeSet, NodeSet, NodeSet), f64>,
}

impl MITable {
    pub fn new(m: usize, entries: Vec<(NodeSet, NodeSet, NodeSet, f64)>) -> Result<MITable> {
        if m < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: m });
        }
        let full = NodeSet::full(m);
        let mut map = BTreeMap::new();
        for (a, b, c, bits) in entries {
            for set in [a, b, c] {
                if !set.is_subset(full) {
                    let bad = set.minus(full).iter().next().unwrap();
                    return Err(Error::UnknownNode { node: bad, m });
                }
            }
            if !bits.is_finite() || bits < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "table value for ({a}, {b}, {c}) must be finite and nonnegative, got {bits}"
                )));
            }
            // Receiver inputs are implicitly conditioned in every model, so
            // keys are canonicalized with receivers stripped from C.
            if map.insert((a, b, c.minus(b)), bits).is_some() {
                return Err(Error::InvalidModel(format!("duplicate table key ({a}, {b}, {c})")));
            }
        }
        Ok(MITable { m, entries: map })
    }

    /// Replaces (or inserts) one entry; used to build perturbed variants.
    pub fn with_entry(mut self, a: NodeSet, b: NodeSet, c: NodeSet, bits: f64) -> MITable {
        self.entries.insert((a, b, c.minus(b)), bits);
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(NodeSet, NodeSet, NodeSet), &f64)> {
        self.entries.iter()
    }

    fn lookup(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<f64> {
        let c = c.minus(b);
        self.entries
            .get(&(a, b, c))
            .copied()
            .ok_or(Error::MissingEntry { a, b, c })
    }
}

/// Any of the supported channel model kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    Gaussian(GaussianNetwork),
    Discrete(DiscreteChannel),
    Table(MITable),
}

impl ChannelModel {
    pub fn node_count(&self) -> usize {
        match self {
            ChannelModel::Gaussian(g) => g.m,
            ChannelModel::Discrete(d) => d.m,
            ChannelModel::Table(t) => t.m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChannelModel::Gaussian(_) => "gaussian",
            ChannelModel::Discrete(_) => "discrete",
            ChannelModel::Table(_) => "table",
        }
    }

    fn check_sets(&self, sets: &[NodeSet]) -> Result<()> {
        let full = NodeSet::full(self.node_count());
        for &s in sets {
            if !s.is_subset(full) {
                let bad = s.minus(full).iter().next().unwrap();
                return Err(Error::UnknownNode { node: bad, m: self.node_count() });
            }
        }
        Ok(())
    }

    /// `I(X_A; Y_i | X_C)` in bits. `A` and `C` must be disjoint and `i` must
    /// not send within `A`; the empty sender set yields 0 for every model.
    /// The receiver's own input is implicitly conditioned, so `i` may or may
    /// not appear in `C` with identical results (table keys are canonicalized
    /// with receivers stripped from `C`).
    pub fn mi_node(&self, a: NodeSet, i: usize, c: NodeSet) -> Result<f64> {
        let m = self.node_count();
        if i < 1 || i > m {
            return Err(Error::UnknownNode { node: i, m });
        }
        self.check_sets(&[a, c])?;
        if !a.is_disjoint(c) || a.contains(i) {
            return Err(Error::Overlap { senders: a, other: c.with(i) });
        }
        if a.is_empty() {
            return Ok(0.0);
        }
        match self {
            ChannelModel::Gaussian(g) => Ok(g.mi_node(a, i, c)),
            ChannelModel::Discrete(d) => Ok(d.mi_exact(a, NodeSet::singleton(i), c.with(i))),
            ChannelModel::Table(t) => t.lookup(a, NodeSet::singleton(i), c),
        }
    }

    /// `I(X_A; Y_B | X_C)` in bits for a receiver set `B`. With `B = {i}` this
    /// agrees with [`mi_node`](Self::mi_node) on the same arguments.
    pub fn mi_cut(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<f64> {
        self.check_sets(&[a, b, c])?;
        if b.is_empty() {
            return Err(Error::Parse("receiver set of a cut must be nonempty".into()));
        }
        if !a.is_disjoint(c) || !a.is_disjoint(b) {
            return Err(Error::Overlap { senders: a, other: b.union(c) });
        }
        if a.is_empty() {
            return Ok(0.0);
        }
        match self {
            ChannelModel::Gaussian(g) => g.mi_cut(a, b, c),
            ChannelModel::Discrete(d) => Ok(d.mi_exact(a, b, c.union(b))),
            ChannelModel::Table(t) => t.lookup(a, b, c),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON ingestion
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianJson {
    nodes: usize,
    gains: Vec<Vec<f64>>,
    powers: Vec<f64>,
    noises: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryJson {
    #[serde(rename = "A")]
    a: Vec<usize>,
    #[serde(rename = "B")]
    b: Vec<usize>,
    #[serde(rename = "C")]
    c: Vec<usize>,
    bits: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    nodes: usize,
    entries: Vec<TableEntryJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteJson {
    nodes: usize,
    input_alphabets: Vec<usize>,
    output_alphabets: Vec<usize>,
    input_pmfs: Vec<Vec<f64>>,
    transition: Vec<Vec<f64>>,
}

fn node_set(nodes: &[usize], m: usize) -> Result<NodeSet> {
    for &n in nodes {
        if n < 1 || n > m {
            return Err(Error::UnknownNode { node: n, m });
        }
    }
    Ok(nodes.iter().copied().collect())
}

impl ChannelModel {
    /// Parses a channel description; the `"kind"` field selects the model.
    /// Unknown fields anywhere are rejected.
    pub fn from_json_str(text: &str) -> Result<ChannelModel> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Parse("channel description must be a JSON object".into()))?;
        let kind = obj
            .remove("kind")
            .and_then(|v| v.as_str().map(str::to_owned))
            .ok_or_else(|| Error::Parse("missing string field \"kind\"".into()))?;
        let body = serde_json::Value::Object(obj.clone());
        let parse_err = |e: serde_json::Error| Error::Parse(format!("invalid {kind} channel: {e}"));
        match kind.as_str() {
            "gaussian" => {
                let g: GaussianJson = serde_json::from_value(body).map_err(parse_err)?;
                let net = GaussianNetwork::new(g.gains, g.powers, g.noises)?;
                if net.m != g.nodes {
                    return Err(Error::Parse(format!(
                        "\"nodes\" is {} but the matrices describe {} nodes",
                        g.nodes, net.m
                    )));
                }
                Ok(ChannelModel::Gaussian(net))
            }
            "table" => {
                let t: TableJson = serde_json::from_value(body).map_err(parse_err)?;
                let entries = t
                    .entries
                    .iter()
                    .map(|e| {
                        Ok((
                            node_set(&e.a, t.nodes)?,
                            node_set(&e.b, t.nodes)?,
                            node_set(&e.c, t.nodes)?,
                            e.bits,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ChannelModel::Table(MITable::new(t.nodes, entries)?))
            }
            "discrete" => {
                let d: DiscreteJson = serde_json::from_value(body).map_err(parse_err)?;
                if d.input_alphabets.len() != d.nodes {
                    return Err(Error::Parse(format!(
                        "\"nodes\" is {} but {} input alphabets are given",
                        d.nodes,
                        d.input_alphabets.len()
                    )));
                }
                Ok(ChannelModel::Discrete(DiscreteChannel::new(
                    d.input_alphabets,
                    d.output_alphabets,
                    d.input_pmfs,
                    d.transition,
                )?))
            }
            other => Err(Error::Parse(format!(
                "unknown channel kind {other:?} (expected gaussian, discrete or table)"
            ))),
        }
    }

    pub fn from_path(path: &Path) -> Result<ChannelModel> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        ChannelModel::from_json_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    fn unit3() -> ChannelModel {
        ChannelModel::Gaussian(GaussianNetwork::symmetric_unit(3).unwrap())
    }

    #[test]
    fn gaussian_scalar_values() {
        let ch = unit3();
        // All other inputs known: plain point-to-point SNR of 1.
        assert!((ch.mi_node(ns(&[1]), 2, ns(&[3])).unwrap() - 0.5).abs() < 1e-12);
        // Node 3 unknown: its signal is interference.
        let v = ch.mi_node(ns(&[1]), 2, NodeSet::EMPTY).unwrap();
        assert!((v - 0.5 * (1.5f64).log2()).abs() < 1e-12);
        // Two senders, no interference left.
        let v = ch.mi_node(ns(&[1, 3]), 2, NodeSet::EMPTY).unwrap();
        assert!((v - 0.5 * (3.0f64).log2()).abs() < 1e-12);
        // Empty sender set.
        assert_eq!(ch.mi_node(NodeSet::EMPTY, 2, ns(&[1])).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_conditioning_never_hurts() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let net = GaussianNetwork::random(4, &mut rng).unwrap();
            let ch = ChannelModel::Gaussian(net);
            let base = ch.mi_node(ns(&[1]), 3, NodeSet::EMPTY).unwrap();
            let cond = ch.mi_node(ns(&[1]), 3, ns(&[2])).unwrap();
            let full = ch.mi_node(ns(&[1]), 3, ns(&[2, 4])).unwrap();
            assert!(cond >= base - 1e-12);
            assert!(full >= cond - 1e-12);
        }
    }

    #[test]
    fn gaussian_cut_log_det() {
        let ch = unit3();
        // One sender into both far receivers, everything else known:
        // covariance [[2,1],[1,2]] against the identity.
        let v = ch.mi_cut(ns(&[1]), ns(&[2, 3]), ns(&[2, 3])).unwrap();
        assert!((v - 0.5 * (3.0f64).log2()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn cut_reduces_to_node_for_single_receiver() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let ch = ChannelModel::Gaussian(GaussianNetwork::random(5, &mut rng).unwrap());
            for (a, i, c) in [
                (ns(&[1]), 3, ns(&[2])),
                (ns(&[1, 2]), 4, ns(&[3, 4])),
                (ns(&[2, 5]), 1, NodeSet::EMPTY),
            ] {
                let node = ch.mi_node(a, i, c).unwrap();
                let cut = ch.mi_cut(a, NodeSet::singleton(i), c).unwrap();
                assert!((node - cut).abs() < 1e-12, "{node} vs {cut}");
            }
        }
    }

    /// A noiseless binary pipe from node 1 into node 2's observation; the
    /// other observations are degenerate single-letter alphabets.
    fn xor_pipe() -> ChannelModel {
        let mut transition = Vec::new();
        for x1 in 0..2 {
            for _x2 in 0..2 {
                for _x3 in 0..2 {
                    let mut row = vec![0.0; 2];
                    row[x1] = 1.0;
                    transition.push(row);
                }
            }
        }
        ChannelModel::Discrete(
            DiscreteChannel::new(
                vec![2, 2, 2],
                vec![1, 2, 1],
                vec![vec![0.5, 0.5]; 3],
                transition,
            )
            .unwrap(),
        )
    }

    #[test]
    fn discrete_noiseless_bit() {
        let ch = xor_pipe();
        let v = ch.mi_node(ns(&[1]), 2, ns(&[3])).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        // Node 3 tells us nothing about the pipe; dropping it changes nothing.
        let v = ch.mi_node(ns(&[1]), 2, NodeSet::EMPTY).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        // And node 3's input is invisible at node 2.
        let v = ch.mi_node(ns(&[3]), 2, ns(&[1])).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn discrete_chain_rule() {
        // Y_2 = X_1 AND X_3 with a little flip noise, checked against the
        // chain rule I(X_{1,3};Y_2) = I(X_1;Y_2) + I(X_3;Y_2|X_1).
        let mut transition = Vec::new();
        for x1 in 0..2usize {
            for _x2 in 0..2 {
                for x3 in 0..2usize {
                    let y = x1 & x3;
                    let mut row = vec![0.1, 0.1];
                    row[y] = 0.9;
                    transition.push(row);
                }
            }
        }
        let ch = ChannelModel::Discrete(
            DiscreteChannel::new(
                vec![2, 2, 2],
                vec![1, 2, 1],
                vec![vec![0.3, 0.7], vec![0.5, 0.5], vec![0.6, 0.4]],
                transition,
            )
            .unwrap(),
        );
        let joint = ch.mi_node(ns(&[1, 3]), 2, NodeSet::EMPTY).unwrap();
        let split = ch.mi_node(ns(&[1]), 2, NodeSet::EMPTY).unwrap()
            + ch.mi_node(ns(&[3]), 2, ns(&[1])).unwrap();
        assert!((joint - split).abs() < 1e-12, "{joint} vs {split}");
    }

    #[test]
    fn discrete_state_cap() {
        let err = DiscreteChannel::with_state_cap(
            vec![2, 2],
            vec![2, 2],
            vec![vec![0.5, 0.5]; 2],
            vec![vec![0.25; 4]; 4],
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StateCapExceeded { count: 16, cap: 10 }));
    }

    #[test]
    fn discrete_row_sum_validation() {
        let err = DiscreteChannel::new(
            vec![2, 2],
            vec![1, 2],
            vec![vec![0.5, 0.5]; 2],
            vec![vec![0.6, 0.6], vec![0.5, 0.5], vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)), "{err:?}");
    }

    #[test]
    fn table_lookup_and_missing() {
        let table = MITable::new(3, vec![(ns(&[1]), ns(&[2]), ns(&[3]), 0.75)]).unwrap();
        let ch = ChannelModel::Table(table);
        assert_eq!(ch.mi_node(ns(&[1]), 2, ns(&[3])).unwrap(), 0.75);
        assert_eq!(ch.mi_node(NodeSet::EMPTY, 2, ns(&[3])).unwrap(), 0.0);
        assert_eq!(
            ch.mi_node(ns(&[3]), 2, ns(&[1])),
            Err(Error::MissingEntry { a: ns(&[3]), b: ns(&[2]), c: ns(&[1]) })
        );
    }

    #[test]
    fn overlap_rejected() {
        let ch = unit3();
        assert!(matches!(
            ch.mi_node(ns(&[1, 2]), 3, ns(&[2])),
            Err(Error::Overlap { .. })
        ));
        assert!(matches!(ch.mi_node(ns(&[1, 3]), 3, NodeSet::EMPTY), Err(Error::Overlap { .. })));
        assert!(matches!(
            ch.mi_cut(ns(&[1]), ns(&[1, 2]), NodeSet::EMPTY),
            Err(Error::Overlap { .. })
        ));
        assert!(matches!(ch.mi_node(ns(&[4]), 2, NodeSet::EMPTY), Err(Error::UnknownNode { .. })));
    }

    #[test]
    fn json_parsing() {
        let ch = ChannelModel::from_json_str(
            r#"{"kind":"gaussian","nodes":2,
                "gains":[[0.0,1.0],[0.5,0.0]],
                "powers":[1.0,2.0],"noises":[1.0,1.0]}"#,
        )
        .unwrap();
        assert_eq!(ch.kind(), "gaussian");
        let v = ch.mi_node(ns(&[2]), 1, NodeSet::EMPTY).unwrap();
        assert!((v - 0.5 * 1.5f64.log2()).abs() < 1e-12);

        let ch = ChannelModel::from_json_str(
            r#"{"kind":"table","nodes":2,
                "entries":[{"A":[1],"B":[2],"C":[2],"bits":0.25}]}"#,
        )
        .unwrap();
        assert_eq!(ch.mi_node(ns(&[1]), 2, ns(&[2])).unwrap(), 0.25);
    }

    #[test]
    fn json_rejects_unknown_fields_and_bad_kind() {
        let err = ChannelModel::from_json_str(
            r#"{"kind":"gaussian","nodes":2,"gains":[[0,1],[1,0]],
                "powers":[1,1],"noises":[1,1],"extra":3}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err:?}");
        let err = ChannelModel::from_json_str(r#"{"kind":"fancy","nodes":2}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = ChannelModel::from_json_str(
            r#"{"kind":"gaussian","nodes":3,"gains":[[0,1],[1,0]],"powers":[1,1],"noises":[1,1]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn relabelling_reverses_roles() {
        let net = GaussianNetwork::new(
            vec![vec![0.0, 1.0, 0.3], vec![0.7, 0.0, 1.2], vec![0.4, 0.9, 0.0]],
            vec![1.0, 2.0, 3.0],
            vec![0.5, 1.0, 1.5],
        )
        .unwrap();
        let rev = net.relabel_reversed();
        assert_eq!(rev.power(1), net.power(3));
        assert_eq!(rev.noise(2), net.noise(2));
        assert_eq!(rev.gain(1, 2), net.gain(3, 2));
        assert_eq!(rev.gain(3, 1), net.gain(1, 3));
        // Mutual information is preserved under the relabelling.
        let ch = ChannelModel::Gaussian(net);
        let chr = ChannelModel::Gaussian(rev);
        let orig = ch.mi_node(ns(&[1, 2]), 3, NodeSet::EMPTY).unwrap();
        let flipped = chr.mi_node(ns(&[2, 3]), 1, NodeSet::EMPTY).unwrap();
        assert!((orig - flipped).abs() < 1e-12);
    }
}
