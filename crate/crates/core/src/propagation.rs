//! Diffusion on the multiplex with overlapping activation.
//!
//! Randomness lives entirely in *live-edge worlds*: for every IC edge a world
//! records whether the edge's single activation attempt succeeds. Given a
//! world, a cascade is deterministic (LT thresholds are fixed network
//! parameters). Sampling worlds up front gives common random numbers for every
//! seed set evaluated against the same [`WorldSet`], and a cascade on a world
//! has the same distribution as the attempt-by-attempt IC process.
//!
//! World `r` of a sample is drawn from a ChaCha8 stream `r` keyed by the
//! master seed, so results do not depend on how worlds are scheduled across
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{LayerId, LayerSet, ModelKind, MultiplexNetwork, NodeId, SeedSet};

/// Number of Monte Carlo simulations used when nothing else is configured.
pub const DEFAULT_MC: usize = 100;

/// Largest number of IC edges the enumeration oracles accept.
pub const EXACT_IC_EDGE_GUARD: usize = 16;

const LT_EPS: f64 = 1e-12;

/// A collection of live-edge worlds, optionally weighted.
#[derive(Clone, Debug)]
pub struct WorldSet {
    words: usize,
    bits: Vec<u64>,
    len: usize,
    /// `None` means uniform weights `1 / len`.
    weights: Option<Vec<f64>>,
}

impl WorldSet {
    /// Samples `m` worlds covering every IC edge of the network.
    pub fn sample(net: &MultiplexNetwork, m: usize, master_seed: u64) -> Self {
        let edges = ic_edge_probabilities(net);
        let words = edges.len().div_ceil(64).max(1);
        let per_world: Vec<Vec<u64>> = (0..m)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
                rng.set_stream(r as u64);
                let mut w = vec![0u64; words];
                for (i, &p) in edges.iter().enumerate() {
                    if rng.random::<f64>() < p {
                        w[i / 64] |= 1u64 << (i % 64);
                    }
                }
                w
            })
            .collect();
        WorldSet {
            words,
            bits: per_world.concat(),
            len: m,
            weights: None,
        }
    }

    /// A single world drawn from `rng_seed`.
    pub fn single(net: &MultiplexNetwork, rng_seed: u64) -> Self {
        Self::sample(net, 1, rng_seed)
    }

    /// Every assignment of the IC edges inside `layers`, weighted by its
    /// probability. IC edges outside `layers` are dead in every world.
    pub fn enumerate(net: &MultiplexNetwork, layers: LayerSet) -> Result<Self> {
        let all = ic_edge_probabilities(net);
        let in_scope: Vec<usize> = net
            .layers()
            .iter()
            .filter(|l| l.model() == ModelKind::IC && layers.contains(l.id()))
            .flat_map(|l| l.ic_offset()..l.ic_offset() + l.num_edges())
            .collect();
        if in_scope.len() > EXACT_IC_EDGE_GUARD {
            return Err(Error::GuardExceeded(format!(
                "{} IC edges exceed the enumeration limit of {EXACT_IC_EDGE_GUARD}; use Monte Carlo estimation",
                in_scope.len()
            )));
        }
        let words = all.len().div_ceil(64).max(1);
        let mut bits = Vec::new();
        let mut weights = Vec::new();
        for mask in 0u32..(1u32 << in_scope.len()) {
            let mut w = vec![0u64; words];
            let mut weight = 1.0;
            for (j, &e) in in_scope.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    w[e / 64] |= 1u64 << (e % 64);
                    weight *= all[e];
                } else {
                    weight *= 1.0 - all[e];
                }
            }
            if weight > 0.0 {
                bits.extend(w);
                weights.push(weight);
            }
        }
        Ok(WorldSet {
            words,
            len: weights.len(),
            bits,
            weights: Some(weights),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.is_none()
    }

    pub fn weight(&self, r: usize) -> f64 {
        match &self.weights {
            Some(w) => w[r],
            None => 1.0 / self.len as f64,
        }
    }

    pub(crate) fn world_bits(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }
}

fn ic_edge_probabilities(net: &MultiplexNetwork) -> Vec<f64> {
    net.layers()
        .iter()
        .filter(|l| l.model() == ModelKind::IC)
        .flat_map(|l| l.edges().iter().map(|e| e.weight))
        .collect()
}

/// Reusable per-thread cascade state with an undo log, so marginal gains can
/// be measured on top of a base cascade and rolled back.
pub(crate) struct CascadeState {
    n: usize,
    active: Vec<bool>,
    round: Vec<u32>,
    order: Vec<NodeId>,
    lt_sum: Vec<f64>,
    lt_log: Vec<(usize, f64)>,
    frontier: Vec<NodeId>,
    next: Vec<NodeId>,
}

#[derive(Clone, Copy)]
pub(crate) struct Checkpoint {
    order: usize,
    lt: usize,
}

impl CascadeState {
    pub(crate) fn new(net: &MultiplexNetwork) -> Self {
        let n = net.num_nodes();
        CascadeState {
            n,
            active: vec![false; n],
            round: vec![0; n],
            order: Vec::new(),
            lt_sum: vec![0.0; n * net.num_layers()],
            lt_log: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    pub(crate) fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            order: self.order.len(),
            lt: self.lt_log.len(),
        }
    }

    pub(crate) fn rollback(&mut self, cp: Checkpoint) {
        for &v in &self.order[cp.order..] {
            self.active[v as usize] = false;
        }
        self.order.truncate(cp.order);
        while self.lt_log.len() > cp.lt {
            let (i, old) = self.lt_log.pop().unwrap();
            self.lt_sum[i] = old;
        }
    }

    pub(crate) fn reset(&mut self) {
        self.rollback(Checkpoint { order: 0, lt: 0 });
    }

    pub(crate) fn is_active(&self, v: NodeId) -> bool {
        self.active[v as usize]
    }

    /// Active nodes in activation order.
    pub(crate) fn activated(&self) -> &[NodeId] {
        &self.order
    }


    fn activate(&mut self, v: NodeId, round: u32) {
        self.active[v as usize] = true;
        self.round[v as usize] = round;
        self.order.push(v);
    }

    /// Runs synchronous rounds from `seeds` (nodes already active are
    /// skipped) until quiescence. Returns the number of newly active nodes.
    ///
    /// An identity activated in any layer is active in every layer it belongs
    /// to, so the frontier of one round propagates in all layers of `layers`
    /// during the next.
    pub(crate) fn run(
        &mut self,
        net: &MultiplexNetwork,
        layers: LayerSet,
        world: &[u64],
        seeds: impl IntoIterator<Item = NodeId>,
    ) -> usize {
        let start = self.order.len();
        let mut frontier = std::mem::take(&mut self.frontier);
        let mut next = std::mem::take(&mut self.next);
        frontier.clear();
        for s in seeds {
            if !self.active[s as usize] {
                self.activate(s, 0);
                frontier.push(s);
            }
        }
        let mut round = 0u32;
        while !frontier.is_empty() {
            frontier.sort_unstable();
            next.clear();
            round += 1;
            for layer in net.layers().iter().filter(|l| layers.contains(l.id())) {
                match layer.model() {
                    ModelKind::IC => {
                        let base = layer.ic_offset();
                        for &u in &frontier {
                            for (i, e) in layer.out_edges(u) {
                                let g = base + i;
                                let live = world[g / 64] & (1u64 << (g % 64)) != 0;
                                if live && !self.active[e.dst as usize] {
                                    self.activate(e.dst, round);
                                    next.push(e.dst);
                                }
                            }
                        }
                    }
                    ModelKind::LT => {
                        let row = layer.id() * self.n;
                        for &u in &frontier {
                            for (_, e) in layer.out_edges(u) {
                                let v = e.dst as usize;
                                if self.active[v] {
                                    continue;
                                }
                                let idx = row + v;
                                self.lt_log.push((idx, self.lt_sum[idx]));
                                self.lt_sum[idx] += e.weight;
                                let zeta = layer.threshold(e.dst).unwrap();
                                if self.lt_sum[idx] >= zeta - LT_EPS {
                                    self.activate(e.dst, round);
                                    next.push(e.dst);
                                }
                            }
                        }
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        self.frontier = frontier;
        self.next = next;
        self.order.len() - start
    }
}

/// Deterministic cascade evaluation of seed sets over a fixed [`WorldSet`].
#[derive(Clone, Copy)]
pub struct SpreadEvaluator<'a> {
    net: &'a MultiplexNetwork,
    worlds: &'a WorldSet,
    layers: LayerSet,
}

impl<'a> SpreadEvaluator<'a> {
    pub fn new(net: &'a MultiplexNetwork, worlds: &'a WorldSet, layers: LayerSet) -> Self {
        SpreadEvaluator { net, worlds, layers }
    }

    pub fn network(&self) -> &'a MultiplexNetwork {
        self.net
    }

    pub fn worlds(&self) -> &'a WorldSet {
        self.worlds
    }

    pub fn layers(&self) -> LayerSet {
        self.layers
    }

    /// Applies `f` to the final cascade of `seeds` in every world, in world order.
    pub(crate) fn map_worlds<T, F>(&self, seeds: &[NodeId], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &CascadeState) -> T + Sync,
    {
        (0..self.worlds.len())
            .into_par_iter()
            .map_init(
                || CascadeState::new(self.net),
                |st, r| {
                    st.reset();
                    st.run(self.net, self.layers, self.worlds.world_bits(r), seeds.iter().copied());
                    f(r, st)
                },
            )
            .collect()
    }

    /// Like [`Self::map_worlds`] but hands out the state mutably, e.g. to
    /// run extra seeds on top of the base cascade.
    pub(crate) fn map_worlds_with<T, F>(&self, seeds: &[NodeId], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut CascadeState) -> T + Sync,
    {
        (0..self.worlds.len())
            .into_par_iter()
            .map_init(
                || CascadeState::new(self.net),
                |st, r| {
                    st.reset();
                    st.run(self.net, self.layers, self.worlds.world_bits(r), seeds.iter().copied());
                    f(r, st)
                },
            )
            .collect()
    }

    /// Number of activated identities per world.
    pub fn counts(&self, seeds: &[NodeId]) -> Vec<u32> {
        self.map_worlds(seeds, |_, st| st.activated().len() as u32)
    }

    /// Expected number of activated identities.
    pub fn value(&self, seeds: &[NodeId]) -> f64 {
        let counts = self.counts(seeds);
        match &self.worlds.weights {
            None => counts.iter().map(|&c| c as u64).sum::<u64>() as f64 / counts.len().max(1) as f64,
            Some(w) => counts.iter().zip(w).map(|(&c, &w)| c as f64 * w).sum(),
        }
    }

    /// Per-world number of extra activations of each candidate on top of `base`.
    pub fn marginal_counts(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<Vec<u32>> {
        (0..self.worlds.len())
            .into_par_iter()
            .map_init(
                || CascadeState::new(self.net),
                |st, r| {
                    let world = self.worlds.world_bits(r);
                    st.reset();
                    st.run(self.net, self.layers, world, base.iter().copied());
                    candidates
                        .iter()
                        .map(|&v| {
                            let cp = st.checkpoint();
                            let added = st.run(self.net, self.layers, world, [v]);
                            st.rollback(cp);
                            added as u32
                        })
                        .collect()
                },
            )
            .collect()
    }

    /// Expected marginal gain of each candidate over `base`, computed on
    /// shared worlds so equal integer gains give bitwise-equal values.
    pub fn gains(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<f64> {
        let per_world = self.marginal_counts(base, candidates);
        match &self.worlds.weights {
            None => {
                let mut totals = vec![0u64; candidates.len()];
                for row in &per_world {
                    for (t, &c) in totals.iter_mut().zip(row) {
                        *t += c as u64;
                    }
                }
                let m = per_world.len().max(1) as f64;
                totals.into_iter().map(|t| t as f64 / m).collect()
            }
            Some(w) => {
                let mut totals = vec![0.0f64; candidates.len()];
                for (row, &wr) in per_world.iter().zip(w) {
                    for (t, &c) in totals.iter_mut().zip(row) {
                        *t += c as f64 * wr;
                    }
                }
                totals
            }
        }
    }
}

/// One simulated cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeTrace {
    /// Activated identities, ascending.
    pub activated: Vec<NodeId>,
    /// Per layer, the activated identities that are members of that layer.
    pub per_layer_activated: Vec<Vec<NodeId>>,
    /// `rounds[t]` holds the identities first activated in round `t`
    /// (round 0 is the seed set).
    pub rounds: Vec<Vec<NodeId>>,
}

impl CascadeTrace {
    pub fn activation_round(&self, v: NodeId) -> Option<usize> {
        self.rounds.iter().position(|r| r.binary_search(&v).is_ok())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Simulates one cascade on all layers. Deterministic given `rng_seed`.
pub fn simulate_once(net: &MultiplexNetwork, seeds: &SeedSet, rng_seed: u64) -> Result<CascadeTrace> {
    simulate_once_in(net, seeds, net.all_layers(), rng_seed)
}

/// Like [`simulate_once`] with diffusion restricted to `layers`; activated
/// identities are still copied to every layer they belong to.
pub fn simulate_once_in(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers: LayerSet,
    rng_seed: u64,
) -> Result<CascadeTrace> {
    seeds.validate(net)?;
    let worlds = WorldSet::single(net, rng_seed);
    let mut st = CascadeState::new(net);
    st.run(net, layers, worlds.world_bits(0), seeds.iter());
    let mut activated = st.activated().to_vec();
    activated.sort_unstable();
    let max_round = activated.iter().map(|&v| st.round[v as usize]).max();
    let mut rounds = vec![Vec::new(); max_round.map_or(0, |r| r as usize + 1)];
    for &v in &activated {
        rounds[st.round[v as usize] as usize].push(v);
    }
    let per_layer_activated = net
        .layers()
        .iter()
        .map(|l| activated.iter().copied().filter(|&v| l.is_member(v)).collect())
        .collect();
    Ok(CascadeTrace {
        activated,
        per_layer_activated,
        rounds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub stderr: f64,
    #[serde(rename = "m")]
    pub num_sims: usize,
}

impl SpreadEstimate {
    pub fn exact(value: f64) -> Self {
        SpreadEstimate {
            mean: value,
            stderr: 0.0,
            num_sims: 0,
        }
    }

    fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let stderr = if m > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        } else {
            0.0
        };
        SpreadEstimate {
            mean,
            stderr,
            num_sims: m,
        }
    }
}

/// Monte Carlo estimate of the multiplex spread; copies count once.
pub fn estimate_spread(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    m: usize,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    estimate_spread_in(net, seeds, net.all_layers(), m, master_seed)
}

pub fn estimate_spread_in(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers: LayerSet,
    m: usize,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    if m == 0 {
        return Err(Error::Domain("at least one simulation is required".into()));
    }
    seeds.validate(net)?;
    let worlds = WorldSet::sample(net, m, master_seed);
    let counts = SpreadEvaluator::new(net, &worlds, layers).counts(seeds.nodes());
    let samples: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    Ok(SpreadEstimate::from_samples(&samples))
}

/// Number of activated identities that are members of `layer`.
pub fn per_layer_spread(trace: &CascadeTrace, layer: LayerId) -> Result<f64> {
    trace
        .per_layer_activated
        .get(layer)
        .map(|s| s.len() as f64)
        .ok_or_else(|| Error::Domain(format!("layer {layer} out of range")))
}

/// Monte Carlo estimate of the membership-filtered spread inside `layer`
/// under full multiplex diffusion.
pub fn estimate_per_layer_spread(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layer: LayerId,
    m: usize,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    net.check_layer(layer)?;
    if m == 0 {
        return Err(Error::Domain("at least one simulation is required".into()));
    }
    seeds.validate(net)?;
    let worlds = WorldSet::sample(net, m, master_seed);
    let l = net.layer(layer);
    let samples: Vec<f64> = SpreadEvaluator::new(net, &worlds, net.all_layers())
        .map_worlds(seeds.nodes(), |_, st| {
            st.activated().iter().filter(|&&v| l.is_member(v)).count() as f64
        });
    Ok(SpreadEstimate::from_samples(&samples))
}

/// `m x |V|` binary matrix of final activation indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusDataset {
    num_nodes: usize,
    num_rows: usize,
    /// Row-major.
    data: Vec<u8>,
    pub seed_context: SeedSet,
    pub layer_context: Vec<LayerId>,
}

impl StatusDataset {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let num_nodes = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != num_nodes) {
            return Err(Error::Domain("status rows have different lengths".into()));
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::Domain("status entries must be 0 or 1".into()));
        }
        Ok(StatusDataset {
            num_nodes,
            num_rows: rows.len(),
            data: rows.concat(),
            seed_context: SeedSet::new(),
            layer_context: Vec::new(),
        })
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn get(&self, row: usize, node: usize) -> u8 {
        self.data[row * self.num_nodes + node]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.num_nodes..(row + 1) * self.num_nodes]
    }

    pub fn column(&self, node: usize) -> Vec<u8> {
        (0..self.num_rows).map(|r| self.get(r, node)).collect()
    }

    pub fn column_sum(&self, node: usize) -> usize {
        (0..self.num_rows).map(|r| self.get(r, node) as usize).sum()
    }

    pub fn column_mean(&self, node: usize) -> f64 {
        self.column_sum(node) as f64 / self.num_rows as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = (0..self.num_nodes)
            .map(|v| format!("node_{v}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for r in 0..self.num_rows {
            let row: Vec<&str> = self.row(r).iter().map(|&x| if x == 1 { "1" } else { "0" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Simulates `m` cascades of `seeds` with diffusion restricted to
/// `layers_so_far` and records each final activation indicator as a row.
pub fn record_status_dataset(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers_so_far: LayerSet,
    m: usize,
    master_seed: u64,
) -> Result<StatusDataset> {
    if layers_so_far.is_empty() {
        return Err(Error::Domain("status recording needs at least one layer".into()));
    }
    if let Some(l) = layers_so_far.iter().find(|&l| l >= net.num_layers()) {
        return Err(Error::Domain(format!("layer {l} out of range")));
    }
    if m < 2 {
        return Err(Error::Domain(format!("status dataset needs m >= 2 rows, got {m}")));
    }
    seeds.validate(net)?;
    let n = net.num_nodes();
    let worlds = WorldSet::sample(net, m, master_seed);
    let rows: Vec<Vec<u8>> = SpreadEvaluator::new(net, &worlds, layers_so_far).map_worlds(seeds.nodes(), |_, st| {
        let mut row = vec![0u8; n];
        for &v in st.activated() {
            row[v as usize] = 1;
        }
        row
    });
    Ok(StatusDataset {
        num_nodes: n,
        num_rows: m,
        data: rows.concat(),
        seed_context: seeds.clone(),
        layer_context: layers_so_far.iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::LayerSpec;

    fn chain_pair() -> MultiplexNetwork {
        // layer 0: a(0) -> b(1); layer 1: b(1) -> c(2)
        MultiplexNetwork::new(
            3,
            vec![
                LayerSpec::new(ModelKind::IC).edge(0, 1, 1.0),
                LayerSpec::new(ModelKind::IC).edge(1, 2, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_seeds_activate_nothing() {
        let net = chain_pair();
        let t = simulate_once(&net, &SeedSet::new(), 1).unwrap();
        assert!(t.activated.is_empty());
        assert!(t.rounds.is_empty());
    }

    #[test]
    fn overlapping_activation_crosses_layers() {
        let net = chain_pair();
        let t = simulate_once(&net, &SeedSet::from_nodes([0]), 9).unwrap();
        assert_eq!(t.activated, vec![0, 1, 2]);
        assert_eq!(t.rounds, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(t.per_layer_activated, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(t.activation_round(2), Some(2));
        // b is active in layer 1 only through its copy from layer 0
        assert_eq!(per_layer_spread(&t, 1).unwrap(), 2.0);
        assert!(per_layer_spread(&t, 2).is_err());
        let json = t.to_json();
        assert!(json.contains("per_layer_activated"));
    }

    #[test]
    fn restricted_layers_still_copy_identities() {
        let net = chain_pair();
        let t = simulate_once_in(&net, &SeedSet::from_nodes([0]), LayerSet::single(0), 0).unwrap();
        assert_eq!(t.activated, vec![0, 1]);
        assert_eq!(t.per_layer_activated[1], vec![1]);
    }

    #[test]
    fn lt_needs_both_neighbours() {
        // v=2 with threshold 0.6 and two in-neighbours of weight 0.5
        let net = MultiplexNetwork::new(
            3,
            vec![LayerSpec::new(ModelKind::LT)
                .edge(0, 2, 0.5)
                .edge(1, 2, 0.5)
                .threshold(2, 0.6)],
        )
        .unwrap();
        let one = simulate_once(&net, &SeedSet::from_nodes([0]), 0).unwrap();
        assert_eq!(one.activated, vec![0]);
        let both = simulate_once(&net, &SeedSet::from_nodes([0, 1]), 0).unwrap();
        assert_eq!(both.activated, vec![0, 1, 2]);
    }

    #[test]
    fn seed_out_of_range_is_rejected() {
        let net = chain_pair();
        assert!(matches!(
            simulate_once(&net, &SeedSet::from_nodes([7]), 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn deterministic_network_has_zero_stderr() {
        let net = chain_pair();
        let est = estimate_spread(&net, &SeedSet::from_nodes([0]), 50, 3).unwrap();
        assert_eq!(est.mean, 3.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.num_sims, 50);
        assert!(estimate_spread(&net, &SeedSet::from_nodes([0]), 0, 3).is_err());
    }

    #[test]
    fn single_edge_half_probability() {
        let net = MultiplexNetwork::new(2, vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5)]).unwrap();
        let est = estimate_spread(&net, &SeedSet::from_nodes([0]), 20_000, 42).unwrap();
        assert!((est.mean - 1.5).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn estimates_are_reproducible() {
        let net = MultiplexNetwork::new(
            4,
            vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 0.3).edge(1, 2, 0.6).edge(0, 3, 0.5)],
        )
        .unwrap();
        let seeds = SeedSet::from_nodes([0]);
        let a = estimate_spread(&net, &seeds, 500, 77).unwrap();
        let b = estimate_spread(&net, &seeds, 500, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incremental_gains_match_full_recomputation() {
        let net = MultiplexNetwork::new(
            6,
            vec![
                LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5).edge(1, 2, 0.5).edge(3, 2, 0.7),
                LayerSpec::new(ModelKind::LT)
                    .edge(2, 4, 0.5)
                    .edge(5, 4, 0.5)
                    .edge(1, 5, 1.0)
                    .threshold(4, 0.9)
                    .threshold(5, 0.8),
            ],
        )
        .unwrap();
        let worlds = WorldSet::sample(&net, 64, 5);
        let ev = SpreadEvaluator::new(&net, &worlds, net.all_layers());
        let base = [0u32];
        let cands = [1u32, 2, 3, 4, 5, 0];
        let per_world = ev.marginal_counts(&base, &cands);
        let base_counts = ev.counts(&base);
        for (i, &v) in cands.iter().enumerate() {
            let with = ev.counts(&[0, v]);
            for r in 0..worlds.len() {
                assert_eq!(per_world[r][i], with[r] - base_counts[r]);
            }
        }
    }

    #[test]
    fn status_dataset_columns() {
        let net = MultiplexNetwork::new(
            4,
            vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 1.0).edge(1, 2, 0.5)],
        )
        .unwrap();
        let d = record_status_dataset(&net, &SeedSet::from_nodes([0]), LayerSet::single(0), 40, 1).unwrap();
        assert_eq!(d.num_rows(), 40);
        assert_eq!(d.column_sum(0), 40);
        assert_eq!(d.column_sum(1), 40);
        assert_eq!(d.column_sum(3), 0);
        let csv = d.to_csv();
        assert!(csv.starts_with("node_0,node_1,node_2,node_3\n1,1,"));
        assert_eq!(csv.lines().count(), 41);
        assert!(record_status_dataset(&net, &SeedSet::new(), LayerSet::EMPTY, 4, 1).is_err());
        assert!(record_status_dataset(&net, &SeedSet::new(), LayerSet::single(0), 1, 1).is_err());
    }
}
