//! Per-layer seed selection: lazy greedy, probabilistic greedy used to score
//! and prune candidates, and the profit-cost table.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{LayerId, MultiplexNetwork, NodeId, SeedSet};
use crate::objective::Objective;

/// Stale entries re-evaluated together when the heap top is stale. Fixed so
/// that results do not depend on the thread count.
const LAZY_BATCH: usize = 16;

/// Candidate nodes ranked by score, highest first, ties by lower id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub nodes: Vec<NodeId>,
    pub scores: Vec<f64>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn score(&self, v: NodeId) -> f64 {
        self.nodes
            .iter()
            .position(|&u| u == v)
            .map_or(0.0, |i| self.scores[i])
    }
}

/// Picks made by a greedy run, with the marginal gain of each pick when it
/// was taken.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GreedyRun {
    pub picks: Vec<NodeId>,
    pub gains: Vec<f64>,
}

impl GreedyRun {
    pub fn seed_set(&self) -> SeedSet {
        SeedSet::from_nodes(self.picks.iter().copied())
    }

    /// `S_0 = ∅, S_1, ..., S_|picks|`.
    pub fn prefixes(&self) -> Vec<SeedSet> {
        (0..=self.picks.len())
            .map(|j| SeedSet::from_nodes(self.picks[..j].iter().copied()))
            .collect()
    }

    pub fn total_gain(&self) -> f64 {
        self.gains.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Always fill the budget.
    Never,
    /// Stop when the best available gain is strictly negative.
    NegativeGain,
}

struct Entry {
    gain: f64,
    node: NodeId,
    stamp: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: larger gain first, then smaller id
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Lazy greedy (CELF) over `candidates`. Stale gains are upper bounds when
/// the objective is submodular, in which case the picks equal those of
/// [`naive_greedy`].
pub fn lazy_greedy<O: Objective + ?Sized>(
    obj: &O,
    candidates: &[NodeId],
    budget: usize,
    stop: StopRule,
) -> GreedyRun {
    let mut cands: Vec<NodeId> = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    let budget = clamp_budget(budget, cands.len());
    let mut run = GreedyRun::default();
    if budget == 0 {
        return run;
    }
    let mut heap: BinaryHeap<Entry> = obj
        .gains(&[], &cands)
        .into_iter()
        .zip(&cands)
        .map(|(gain, &node)| Entry { gain, node, stamp: 0 })
        .collect();

    while run.picks.len() < budget {
        let round = run.picks.len();
        let Some(top) = heap.peek() else { break };
        if top.stamp == round {
            if stop == StopRule::NegativeGain && top.gain < 0.0 {
                break;
            }
            let top = heap.pop().unwrap();
            run.picks.push(top.node);
            run.gains.push(top.gain);
            continue;
        }
        let mut stale = Vec::with_capacity(LAZY_BATCH);
        while stale.len() < LAZY_BATCH {
            match heap.peek() {
                Some(e) if e.stamp != round => stale.push(heap.pop().unwrap().node),
                _ => break,
            }
        }
        for (gain, node) in obj.gains(&run.picks, &stale).into_iter().zip(stale) {
            heap.push(Entry {
                gain,
                node,
                stamp: round,
            });
        }
    }
    run
}

/// Re-evaluates every remaining candidate at every step.
pub fn naive_greedy<O: Objective + ?Sized>(obj: &O, candidates: &[NodeId], budget: usize) -> GreedyRun {
    let mut remaining: Vec<NodeId> = candidates.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let budget = clamp_budget(budget, remaining.len());
    let mut run = GreedyRun::default();
    while run.picks.len() < budget {
        let gains = obj.gains(&run.picks, &remaining);
        let mut best = 0;
        for i in 1..gains.len() {
            if gains[i] > gains[best] {
                best = i;
            }
        }
        run.picks.push(remaining.remove(best));
        run.gains.push(gains[best]);
    }
    run
}

fn clamp_budget(budget: usize, available: usize) -> usize {
    if budget > available {
        log::warn!("budget {budget} exceeds {available} candidates; clamping");
        available
    } else {
        budget
    }
}

/// CELF prefixes `S_0..S_l` for one layer.
pub fn celf_greedy<O: Objective + ?Sized>(obj: &O, candidates: &[NodeId], budget: usize) -> Vec<SeedSet> {
    lazy_greedy(obj, candidates, budget, StopRule::Never).prefixes()
}

/// `restarts` runs that each pick nodes with probability proportional to
/// their positive marginal gain, stopping at `budget` picks or when the
/// sampled gain is at most `delta` (that pick is discarded).
pub fn probabilistic_greedy<O: Objective + ?Sized, R: Rng + ?Sized>(
    obj: &O,
    universe: &[NodeId],
    budget: usize,
    restarts: usize,
    delta: f64,
    rng: &mut R,
) -> Result<Vec<GreedyRun>> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("probabilistic greedy needs at least one restart".into()));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidConfig(format!("convergence threshold must be >= 0, got {delta}")));
    }
    let mut nodes: Vec<NodeId> = universe.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let mut runs = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let mut remaining = nodes.clone();
        let mut run = GreedyRun::default();
        while run.picks.len() < budget && !remaining.is_empty() {
            let gains = obj.gains(&run.picks, &remaining);
            let total: f64 = gains.iter().filter(|&&g| g > 0.0).sum();
            if total <= 0.0 {
                break;
            }
            let mut target = rng.random::<f64>() * total;
            let mut chosen = None;
            for (i, &g) in gains.iter().enumerate() {
                if g > 0.0 {
                    chosen = Some(i);
                    if target < g {
                        break;
                    }
                    target -= g;
                }
            }
            let i = chosen.unwrap();
            if gains[i] <= delta {
                break;
            }
            run.picks.push(remaining.remove(i));
            run.gains.push(gains[i]);
        }
        runs.push(run);
    }
    Ok(runs)
}

/// `ω(v) = Σ_q F_q(v) / Σ_q σ(S_q)` where `F_q(v)` is the marginal gain of
/// `v` when it was picked in run `q`. Only picked nodes are returned.
pub fn candidate_scores(runs: &[GreedyRun]) -> Result<CandidateSet> {
    let denom: f64 = runs.iter().map(GreedyRun::total_gain).sum();
    if runs.iter().all(|r| r.picks.is_empty()) || denom <= 0.0 {
        return Err(Error::Domain("all probabilistic greedy runs are empty".into()));
    }
    let mut contrib: std::collections::BTreeMap<NodeId, f64> = Default::default();
    for run in runs {
        for (&v, &g) in run.picks.iter().zip(&run.gains) {
            *contrib.entry(v).or_default() += g;
        }
    }
    let mut scored: Vec<(NodeId, f64)> = contrib.into_iter().map(|(v, f)| (v, f / denom)).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(CandidateSet {
        nodes: scored.iter().map(|s| s.0).collect(),
        scores: scored.iter().map(|s| s.1).collect(),
    })
}

/// The pruned candidate pool `V^g` of a layer: its members ranked by score
/// (unscored members count as 0, ties by id), keeping the top
/// `max(⌈γ·members⌉, #scored, min(budget, members))`.
pub fn prune_candidates(scores: &CandidateSet, members: &[NodeId], gamma: f64, budget: usize) -> CandidateSet {
    let mut ranked: Vec<(NodeId, f64)> = members.iter().map(|&v| (v, scores.score(v))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let keep = ((gamma * members.len() as f64).ceil() as usize)
        .max(scores.len())
        .max(budget.min(members.len()))
        .min(members.len());
    ranked.truncate(keep);
    CandidateSet {
        nodes: ranked.iter().map(|r| r.0).collect(),
        scores: ranked.iter().map(|r| r.1).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfitCostEntry {
    pub cost: usize,
    pub profit: f64,
    pub seeds: SeedSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfitCostTable {
    /// `rows[i][j]` is the entry of layer `i` with budget `j`.
    pub rows: Vec<Vec<ProfitCostEntry>>,
}

impl ProfitCostTable {
    pub fn num_layers(&self) -> usize {
        self.rows.len()
    }

    pub fn profits(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.profit).collect())
            .collect()
    }

    pub fn seeds(&self, layer: LayerId, budget: usize) -> &SeedSet {
        &self.rows[layer][budget].seeds
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,budget,cost,profit,seeds\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let seeds: Vec<String> = e.seeds.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{i},{j},{},{},{}", e.cost, e.profit, seeds.join(";"));
            }
        }
        out
    }
}

/// Profit of each prefix is its value under `profit` (the full-multiplex
/// spread), cost is its size. `prefixes[i]` must start with the empty set.
pub fn build_profit_cost_table<O: Objective + ?Sized>(
    net: &MultiplexNetwork,
    prefixes: &[Vec<SeedSet>],
    profit: &O,
) -> Result<ProfitCostTable> {
    if prefixes.len() != net.num_layers() {
        return Err(Error::Domain(format!(
            "expected prefixes for {} layers, got {}",
            net.num_layers(),
            prefixes.len()
        )));
    }
    let rows = prefixes
        .par_iter()
        .map(|layer_prefixes| {
            layer_prefixes
                .iter()
                .map(|s| ProfitCostEntry {
                    cost: s.len(),
                    profit: if s.is_empty() { 0.0 } else { profit.value(s.nodes()) },
                    seeds: s.clone(),
                })
                .collect()
        })
        .collect();
    Ok(ProfitCostTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{LayerSpec, ModelKind};
    use crate::objective::ExactObjective;
    use crate::propagation::{SpreadEvaluator, WorldSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Additive weights: marginal gain of v is `w[v]` unless already chosen.
    struct Additive(Vec<f64>);

    impl Objective for Additive {
        fn value(&self, seeds: &[NodeId]) -> f64 {
            seeds.iter().map(|&v| self.0[v as usize]).sum()
        }
        fn gains(&self, base: &[NodeId], cands: &[NodeId]) -> Vec<f64> {
            cands
                .iter()
                .map(|v| if base.contains(v) { 0.0 } else { self.0[*v as usize] })
                .collect()
        }
    }

    fn star() -> MultiplexNetwork {
        let mut spec = LayerSpec::new(ModelKind::IC);
        for v in 1..6 {
            spec = spec.edge(0, v, 1.0);
        }
        MultiplexNetwork::new(6, vec![spec]).unwrap()
    }

    #[test]
    fn budget_zero_is_empty() {
        let obj = Additive(vec![1.0, 2.0]);
        let p = celf_greedy(&obj, &[0, 1], 0);
        assert_eq!(p, vec![SeedSet::new()]);
    }

    #[test]
    fn star_center_is_picked_first() {
        let net = star();
        let worlds = WorldSet::sample(&net, 10, 0);
        let ev = SpreadEvaluator::new(&net, &worlds, net.all_layers());
        let run = lazy_greedy(&ev, &[0, 1, 2, 3, 4, 5], 1, StopRule::Never);
        assert_eq!(run.picks, vec![0]);
        assert_eq!(run.gains, vec![6.0]);
    }

    #[test]
    fn budget_is_clamped_and_ties_go_to_lower_id() {
        let obj = Additive(vec![1.0, 3.0, 3.0, 0.0]);
        let run = lazy_greedy(&obj, &[3, 2, 1, 0], 9, StopRule::Never);
        assert_eq!(run.picks, vec![1, 2, 0, 3]);
        let naive = naive_greedy(&obj, &[0, 1, 2, 3], 9);
        assert_eq!(naive.picks, run.picks);
    }

    #[test]
    fn negative_gain_stop_rule() {
        struct Shrinking;
        impl Objective for Shrinking {
            fn value(&self, s: &[NodeId]) -> f64 {
                -(s.len() as f64)
            }
            fn gains(&self, _: &[NodeId], c: &[NodeId]) -> Vec<f64> {
                vec![-1.0; c.len()]
            }
        }
        assert!(lazy_greedy(&Shrinking, &[0, 1], 2, StopRule::NegativeGain).picks.is_empty());
        assert_eq!(lazy_greedy(&Shrinking, &[0, 1], 2, StopRule::Never).picks.len(), 2);
    }

    #[test]
    fn probabilistic_greedy_single_positive_node() {
        let obj = Additive(vec![0.0, 2.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let runs = probabilistic_greedy(&obj, &[0, 1, 2], 2, 5, 0.0, &mut rng).unwrap();
        for r in &runs {
            assert_eq!(r.picks, vec![1]);
        }
    }

    #[test]
    fn probabilistic_greedy_equal_gains_split_evenly() {
        let obj = Additive(vec![1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let runs = probabilistic_greedy(&obj, &[0, 1], 1, 4000, 0.0, &mut rng).unwrap();
        let zeros = runs.iter().filter(|r| r.picks == [0]).count() as f64 / 4000.0;
        // 4 sigma of a fair binomial proportion
        assert!((zeros - 0.5).abs() < 4.0 * (0.25f64 / 4000.0).sqrt(), "{zeros}");
    }

    #[test]
    fn probabilistic_greedy_infinite_delta_is_empty() {
        let obj = Additive(vec![1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let runs = probabilistic_greedy(&obj, &[0, 1], 2, 3, f64::INFINITY, &mut rng).unwrap();
        assert!(runs.iter().all(|r| r.picks.is_empty()));
        assert!(candidate_scores(&runs).is_err());
        assert!(probabilistic_greedy(&obj, &[0, 1], 2, 0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn single_run_single_pick_scores_one() {
        let runs = vec![GreedyRun {
            picks: vec![4],
            gains: vec![2.5],
        }];
        let c = candidate_scores(&runs).unwrap();
        assert_eq!(c.nodes, vec![4]);
        assert_eq!(c.scores, vec![1.0]);
        assert_eq!(c.score(7), 0.0);
    }

    #[test]
    fn prune_keeps_all_picks() {
        let scores = CandidateSet {
            nodes: vec![9, 2, 5],
            scores: vec![0.5, 0.3, 0.2],
        };
        let members: Vec<NodeId> = (0..10).collect();
        let p = prune_candidates(&scores, &members, 0.25, 2);
        assert_eq!(p.nodes, vec![9, 2, 5]);
        let p = prune_candidates(&scores, &members, 0.5, 2);
        assert_eq!(p.nodes, vec![9, 2, 5, 0, 1]);
        let p = prune_candidates(&CandidateSet::default(), &members, 0.0, 4);
        assert_eq!(p.nodes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn profit_table_single_layer_matches_exact() {
        let net = MultiplexNetwork::new(
            4,
            vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5).edge(1, 2, 0.5).edge(3, 2, 0.2)],
        )
        .unwrap();
        let exact = ExactObjective::new(&net, net.all_layers()).unwrap();
        let prefixes = vec![celf_greedy(&exact, &[0, 1, 2, 3], 2)];
        let table = build_profit_cost_table(&net, &prefixes, &exact).unwrap();
        assert_eq!(table.rows[0][0].profit, 0.0);
        assert_eq!(table.rows[0][1].seeds.nodes(), &[0]);
        assert!((table.rows[0][1].profit - 1.75).abs() < 1e-12);
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "layer,budget,cost,profit,seeds");
        assert_eq!(lines[1], "0,0,0,0,");
        assert!(lines[2].starts_with("0,1,1,1.7") && lines[2].ends_with(",0"));
        assert_eq!(lines.len(), 4);
    }
}
