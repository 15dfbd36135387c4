//! Synthetic Erdős–Rényi multiplex generation.
//!
//! Shared identities are sized from the largest layer:
//! `shared = round(overlap_percent * max(layer_node_counts))`. Layers at least
//! that large natively contain every shared identity; smaller layers hold a
//! uniform sample of them and the remaining shared identities are added as
//! isolated padding vertices.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{LayerSpec, ModelKind, MultiplexNetwork, NodeId};

/// LT thresholds are drawn uniformly from this range.
pub const LT_THRESHOLD_RANGE: (f64, f64) = (0.5, 0.9);

/// Layer node counts of the synthetic benchmark, indexed by `k - 3`.
pub const PRESET_LAYER_COUNTS: [&[usize]; 7] = [
    &[500, 2000, 2500],
    &[500, 1000, 1500, 2000],
    &[200, 600, 1000, 1400, 1800],
    &[200, 400, 600, 800, 1200, 1800],
    &[100, 200, 400, 600, 800, 1200, 1700],
    &[100, 200, 300, 500, 600, 800, 1000, 1500],
    &[100, 200, 300, 400, 500, 600, 700, 800, 1400],
];

pub const PRESET_TOTAL_EDGES: usize = 25_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub layer_node_counts: Vec<usize>,
    pub total_edges: usize,
    pub overlap_percent: f64,
    pub model_per_layer: Vec<ModelKind>,
    pub rng_seed: u64,
    #[serde(default = "default_true")]
    pub allow_padding: bool,
}

fn default_true() -> bool {
    true
}

impl GeneratorConfig {
    /// Benchmark preset for `k` in `3..=9`, divided by `scale_down` (1 = full
    /// size). Layers alternate IC, LT, IC, ...
    pub fn preset(k: usize, overlap_percent: f64, rng_seed: u64, scale_down: usize) -> Result<Self> {
        if !(3..=9).contains(&k) {
            return Err(Error::InvalidConfig(format!("no preset for k={k} (expected 3..=9)")));
        }
        if scale_down == 0 {
            return Err(Error::InvalidConfig("scale_down must be positive".into()));
        }
        let counts = PRESET_LAYER_COUNTS[k - 3]
            .iter()
            .map(|&c| (c / scale_down).max(1))
            .collect();
        Ok(GeneratorConfig {
            layer_node_counts: counts,
            total_edges: PRESET_TOTAL_EDGES / scale_down,
            overlap_percent,
            model_per_layer: alternating_models(k),
            rng_seed,
            allow_padding: true,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.layer_node_counts.len()
    }

    pub fn shared_identities(&self) -> usize {
        let max_n = self.layer_node_counts.iter().copied().max().unwrap_or(0);
        (self.overlap_percent * max_n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.layer_node_counts.is_empty() {
            return bad("at least one layer is required".into());
        }
        if self.layer_node_counts.contains(&0) {
            return bad("layer node counts must be positive".into());
        }
        if self.model_per_layer.len() != self.layer_node_counts.len() {
            return bad(format!(
                "{} models given for {} layers",
                self.model_per_layer.len(),
                self.layer_node_counts.len()
            ));
        }
        if !(0.0..=1.0).contains(&self.overlap_percent) {
            return bad(format!("overlap_percent {} outside [0, 1]", self.overlap_percent));
        }
        let shared = self.shared_identities();
        if !self.allow_padding {
            if let Some((i, &n)) = self
                .layer_node_counts
                .iter()
                .enumerate()
                .find(|(_, &n)| n < shared)
            {
                return bad(format!(
                    "overlap needs {shared} shared nodes but layer {i} holds only {n} and padding is disabled"
                ));
            }
        }
        for (i, (&n, &m)) in self
            .layer_node_counts
            .iter()
            .zip(self.edges_per_layer().iter())
            .enumerate()
        {
            if m > n * (n - 1) {
                return bad(format!("layer {i} cannot hold {m} directed edges on {n} nodes"));
            }
        }
        Ok(())
    }

    /// Edges are split proportionally to layer node counts (largest remainder).
    pub fn edges_per_layer(&self) -> Vec<usize> {
        let total_nodes: usize = self.layer_node_counts.iter().sum();
        if total_nodes == 0 {
            return vec![0; self.layer_node_counts.len()];
        }
        let exact: Vec<f64> = self
            .layer_node_counts
            .iter()
            .map(|&n| self.total_edges as f64 * n as f64 / total_nodes as f64)
            .collect();
        let mut out: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut rest = self.total_edges - out.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if rest == 0 {
                break;
            }
            out[i] += 1;
            rest -= 1;
        }
        out
    }
}

pub fn alternating_models(k: usize) -> Vec<ModelKind> {
    (0..k)
        .map(|i| if i % 2 == 0 { ModelKind::IC } else { ModelKind::LT })
        .collect()
}

/// Bookkeeping reported alongside a generated network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub num_layers: usize,
    /// Distinct node identities after merging shared users.
    pub num_nodes: usize,
    /// `k * max(layer size)`: node slots once every layer is padded to the
    /// largest layer.
    pub total_nodes: usize,
    pub layer_node_counts: Vec<usize>,
    pub shared_identities: usize,
    pub native_overlap: usize,
    pub edges_per_layer: Vec<usize>,
    pub intra_layer_edges: usize,
    /// One interlayer coupling edge per shared identity between consecutive layers.
    pub interlayer_edges: usize,
}

pub fn generate_synthetic(cfg: &GeneratorConfig) -> Result<MultiplexNetwork> {
    generate_synthetic_with_report(cfg).map(|(net, _)| net)
}

pub fn generate_synthetic_with_report(
    cfg: &GeneratorConfig,
) -> Result<(MultiplexNetwork, GenerationReport)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let k = cfg.num_layers();
    let shared = cfg.shared_identities();

    // Identity slots: [0, shared) are shared, private slots follow layer by layer.
    let private: Vec<usize> = cfg
        .layer_node_counts
        .iter()
        .map(|&n| n.saturating_sub(shared))
        .collect();
    let num_nodes = shared + private.iter().sum::<usize>();

    // Relabel slots randomly so shared identities are not the lowest ids.
    let mut label: Vec<NodeId> = (0..num_nodes as NodeId).collect();
    label.shuffle(&mut rng);

    let edge_counts = cfg.edges_per_layer();
    let mut specs = Vec::with_capacity(k);
    let mut next_private = shared;
    for i in 0..k {
        let n = cfg.layer_node_counts[i];
        let mut local: Vec<usize> = if n >= shared {
            (0..shared).collect()
        } else {
            let mut pick = index::sample(&mut rng, shared, n).into_vec();
            pick.sort_unstable();
            pick
        };
        local.extend(next_private..next_private + private[i]);
        next_private += private[i];
        let local: Vec<NodeId> = local.into_iter().map(|slot| label[slot]).collect();

        let mut spec = LayerSpec::new(cfg.model_per_layer[i]);
        spec.members.extend(local.iter().copied());

        let m = edge_counts[i];
        if n >= 2 && m > 0 {
            for pair in index::sample(&mut rng, n * (n - 1), m).into_iter() {
                let a = pair / (n - 1);
                let r = pair % (n - 1);
                let b = if r >= a { r + 1 } else { r };
                spec.edges.push((local[a], local[b], None));
            }
        }
        if spec.model == ModelKind::LT {
            let (lo, hi) = LT_THRESHOLD_RANGE;
            for &v in &local {
                spec.thresholds.insert(v, rng.random_range(lo..=hi));
            }
        }
        specs.push(spec);
    }

    let net = MultiplexNetwork::new(num_nodes, specs)?;
    let max_n = cfg.layer_node_counts.iter().copied().max().unwrap_or(0);
    let report = GenerationReport {
        num_layers: k,
        num_nodes,
        total_nodes: k * max_n,
        layer_node_counts: cfg.layer_node_counts.clone(),
        shared_identities: shared,
        native_overlap: net.overlap_count(),
        edges_per_layer: edge_counts.clone(),
        intra_layer_edges: edge_counts.iter().sum(),
        interlayer_edges: if k > 1 { (k - 1) * shared } else { 0 },
    };
    Ok((net, report))
}
