//! Multiplex graph data model.
//!
//! A multiplex network is a list of directed layers over one shared node
//! universe `[0, n)`. Each layer carries its own diffusion model. A node is a
//! *member* of a layer when it natively belongs to it (declared, or an edge
//! endpoint); every other node is present only as an isolated padding vertex.
//! Padding vertices never count towards the native overlap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type LayerId = usize;

/// Largest number of layers a [`LayerSet`] can address.
pub const MAX_LAYERS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    IC,
    LT,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::IC => write!(f, "IC"),
            ModelKind::LT => write!(f, "LT"),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "IC" | "ic" => Ok(ModelKind::IC),
            "LT" | "lt" => Ok(ModelKind::LT),
            other => Err(format!("unknown diffusion model `{other}` (expected IC or LT)")),
        }
    }
}

/// Directed edge. `weight` is the activation probability for IC layers and the
/// influence weight for LT layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

/// Set of layer indices packed into a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LayerSet(u64);

impl LayerSet {
    pub const EMPTY: LayerSet = LayerSet(0);

    pub fn all(k: usize) -> Self {
        debug_assert!(k <= MAX_LAYERS);
        if k == MAX_LAYERS {
            LayerSet(u64::MAX)
        } else {
            LayerSet((1u64 << k) - 1)
        }
    }

    pub fn single(layer: LayerId) -> Self {
        LayerSet(1u64 << layer)
    }

    pub fn from_layers<I: IntoIterator<Item = LayerId>>(layers: I) -> Self {
        layers.into_iter().fold(LayerSet::EMPTY, |s, l| s.with(l))
    }

    pub fn with(self, layer: LayerId) -> Self {
        LayerSet(self.0 | (1u64 << layer))
    }

    pub fn contains(self, layer: LayerId) -> bool {
        layer < MAX_LAYERS && self.0 & (1u64 << layer) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = LayerId> {
        (0..MAX_LAYERS).filter(move |&l| self.contains(l))
    }
}

/// Construction-time description of one layer.
#[derive(Clone, Debug)]
pub struct LayerSpec {
    pub model: ModelKind,
    /// `(src, dst, weight)`; a missing weight defaults to `1 / in-degree(dst)`.
    pub edges: Vec<(NodeId, NodeId, Option<f64>)>,
    /// LT thresholds; members without an entry get [`DEFAULT_LT_THRESHOLD`].
    pub thresholds: BTreeMap<NodeId, f64>,
    /// Explicitly declared members. Edge endpoints are always members.
    pub members: BTreeSet<NodeId>,
}

impl LayerSpec {
    pub fn new(model: ModelKind) -> Self {
        LayerSpec {
            model,
            edges: Vec::new(),
            thresholds: BTreeMap::new(),
            members: BTreeSet::new(),
        }
    }

    pub fn edge(mut self, src: NodeId, dst: NodeId, weight: f64) -> Self {
        self.edges.push((src, dst, Some(weight)));
        self
    }

    pub fn threshold(mut self, node: NodeId, zeta: f64) -> Self {
        self.thresholds.insert(node, zeta);
        self
    }

    pub fn member(mut self, node: NodeId) -> Self {
        self.members.insert(node);
        self
    }
}

/// Threshold assigned to LT members that have no explicit threshold.
pub const DEFAULT_LT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    id: LayerId,
    model: ModelKind,
    /// Sorted by `(src, dst)`.
    edges: Vec<Edge>,
    /// CSR offsets into `edges`, length `n + 1`.
    out_offsets: Vec<usize>,
    /// Per-node LT threshold; empty for IC layers.
    thresholds: Vec<f64>,
    members: Vec<bool>,
    member_count: usize,
    /// Position of this layer's first edge in the global IC edge order.
    ic_offset: usize,
}

impl Layer {
    pub fn id(&self) -> LayerId {
        self.id
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Out-edges of `node` together with their index inside this layer.
    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (usize, &Edge)> {
        let lo = self.out_offsets[node as usize];
        let hi = self.out_offsets[node as usize + 1];
        (lo..hi).map(move |i| (i, &self.edges[i]))
    }

    pub fn threshold(&self, node: NodeId) -> Option<f64> {
        self.thresholds.get(node as usize).copied()
    }

    pub fn is_member(&self, node: NodeId) -> bool {
        self.members[node as usize]
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v as NodeId)
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn ic_offset(&self) -> usize {
        self.ic_offset
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|e| e.dst == node).count()
    }
}

/// `k` layers over a shared node universe.
///
/// Immutable after construction; every layer spans `[0, num_nodes)` with
/// non-members acting as isolated padding.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplexNetwork {
    num_nodes: usize,
    layers: Vec<Layer>,
    native_overlap: Vec<NodeId>,
    total_ic_edges: usize,
}

impl MultiplexNetwork {
    pub fn new(num_nodes: usize, specs: Vec<LayerSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidNetwork("a multiplex needs at least one layer".into()));
        }
        if specs.len() > MAX_LAYERS {
            return Err(Error::InvalidNetwork(format!(
                "{} layers requested, at most {MAX_LAYERS} are supported",
                specs.len()
            )));
        }
        if num_nodes > NodeId::MAX as usize {
            return Err(Error::InvalidNetwork(format!("{num_nodes} nodes exceed the id space")));
        }

        let mut layers = Vec::with_capacity(specs.len());
        let mut ic_offset = 0;
        for (id, spec) in specs.into_iter().enumerate() {
            let layer = build_layer(id, num_nodes, spec, ic_offset)?;
            if layer.model == ModelKind::IC {
                ic_offset += layer.edges.len();
            }
            layers.push(layer);
        }

        let native_overlap = (0..num_nodes as NodeId)
            .filter(|&v| layers.iter().filter(|l| l.is_member(v)).count() >= 2)
            .collect();

        Ok(MultiplexNetwork {
            num_nodes,
            layers,
            native_overlap,
            total_ic_edges: ic_offset,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, id: LayerId) -> &Layer {
        &self.layers[id]
    }

    pub fn all_layers(&self) -> LayerSet {
        LayerSet::all(self.layers.len())
    }

    /// Nodes natively present in at least two layers (padding excluded).
    pub fn native_overlap(&self) -> &[NodeId] {
        &self.native_overlap
    }

    /// `o`: the number of native overlapping nodes.
    pub fn overlap_count(&self) -> usize {
        self.native_overlap.len()
    }

    pub fn total_ic_edges(&self) -> usize {
        self.total_ic_edges
    }

    /// Number of IC edges restricted to `layers`.
    pub fn ic_edges_in(&self, layers: LayerSet) -> usize {
        self.layers
            .iter()
            .filter(|l| layers.contains(l.id) && l.model == ModelKind::IC)
            .map(|l| l.edges.len())
            .sum()
    }

    /// Nodes that are a member of at least one layer.
    pub fn member_nodes(&self) -> Vec<NodeId> {
        (0..self.num_nodes as NodeId)
            .filter(|&v| self.layers.iter().any(|l| l.is_member(v)))
            .collect()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.num_nodes {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "node {v} is outside the node universe [0, {})",
                self.num_nodes
            )))
        }
    }

    pub fn check_layer(&self, layer: LayerId) -> Result<()> {
        if layer < self.layers.len() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "layer {layer} out of range (network has {} layers)",
                self.layers.len()
            )))
        }
    }
}

fn build_layer(id: LayerId, n: usize, spec: LayerSpec, ic_offset: usize) -> Result<Layer> {
    let bad = |msg: String| Error::InvalidNetwork(format!("layer {id}: {msg}"));

    let mut members = vec![false; n];
    for &v in &spec.members {
        if v as usize >= n {
            return Err(bad(format!("member {v} outside [0, {n})")));
        }
        members[v as usize] = true;
    }

    let mut seen = BTreeSet::new();
    let mut in_degree = vec![0usize; n];
    for &(src, dst, w) in &spec.edges {
        if src as usize >= n || dst as usize >= n {
            return Err(bad(format!("edge {src}->{dst} outside [0, {n})")));
        }
        if src == dst {
            return Err(bad(format!("self-loop on node {src}")));
        }
        if !seen.insert((src, dst)) {
            return Err(bad(format!("duplicate edge {src}->{dst}")));
        }
        if let Some(w) = w {
            let ok = match spec.model {
                ModelKind::IC => (0.0..=1.0).contains(&w),
                ModelKind::LT => w.is_finite() && w >= 0.0,
            };
            if !ok {
                return Err(bad(format!("edge {src}->{dst} has invalid weight {w}")));
            }
        }
        in_degree[dst as usize] += 1;
        members[src as usize] = true;
        members[dst as usize] = true;
    }

    let mut edges: Vec<Edge> = spec
        .edges
        .iter()
        .map(|&(src, dst, w)| Edge {
            src,
            dst,
            weight: w.unwrap_or(1.0 / in_degree[dst as usize] as f64),
        })
        .collect();
    edges.sort_by_key(|e| (e.src, e.dst));

    if spec.model == ModelKind::LT {
        // in-weights of every node must sum to at most one
        let mut in_sum = vec![0.0f64; n];
        for e in &edges {
            in_sum[e.dst as usize] += e.weight;
        }
        for e in &mut edges {
            let s = in_sum[e.dst as usize];
            // slack keeps already-normalized weights stable across save/load
            if s > 1.0 + 1e-9 {
                e.weight /= s;
            }
        }
    }

    let thresholds = match spec.model {
        ModelKind::IC => {
            if !spec.thresholds.is_empty() {
                return Err(bad("thresholds given for an IC layer".into()));
            }
            Vec::new()
        }
        ModelKind::LT => {
            let mut t = vec![DEFAULT_LT_THRESHOLD; n];
            for (&v, &zeta) in &spec.thresholds {
                if v as usize >= n {
                    return Err(bad(format!("threshold for node {v} outside [0, {n})")));
                }
                if !(0.0..=1.0).contains(&zeta) {
                    return Err(bad(format!("threshold {zeta} of node {v} outside [0, 1]")));
                }
                t[v as usize] = zeta;
            }
            t
        }
    };

    let mut out_offsets = vec![0usize; n + 1];
    for e in &edges {
        out_offsets[e.src as usize + 1] += 1;
    }
    for i in 0..n {
        out_offsets[i + 1] += out_offsets[i];
    }

    let member_count = members.iter().filter(|&&m| m).count();
    Ok(Layer {
        id,
        model: spec.model,
        edges,
        out_offsets,
        thresholds,
        members,
        member_count,
        ic_offset,
    })
}

/// Ordered, duplicate-free seed set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedSet(Vec<NodeId>);

impl SeedSet {
    pub fn new() -> Self {
        SeedSet(Vec::new())
    }

    /// Builds a seed set keeping the first occurrence of each node.
    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        let mut s = SeedSet::new();
        for v in nodes {
            s.insert(v);
        }
        s
    }

    /// Appends `v`; returns false if it was already present.
    pub fn insert(&mut self, v: NodeId) -> bool {
        if self.0.contains(&v) {
            false
        } else {
            self.0.push(v);
            true
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    /// Union preserving the order of first appearance.
    pub fn union<'a, I: IntoIterator<Item = &'a SeedSet>>(sets: I) -> SeedSet {
        SeedSet::from_nodes(sets.into_iter().flat_map(|s| s.iter()))
    }

    pub fn sorted(&self) -> Vec<NodeId> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    pub fn validate(&self, net: &MultiplexNetwork) -> Result<()> {
        self.0.iter().try_for_each(|&v| net.check_node(v))
    }
}

impl FromIterator<NodeId> for SeedSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        SeedSet::from_nodes(iter)
    }
}
