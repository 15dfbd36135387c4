//! End-to-end pipeline: per-layer seeding and knapsack allocation, then
//! layer-by-layer re-optimization against PGMs of the layers already done.

mod certificate;
mod reward;

pub use certificate::{
    bound_best, bound_general, bound_worst, exhaustive_optimum, measure_beta, BoundCheck, Bounds, RatioCertificate,
    EXHAUSTIVE_LIMIT,
};
pub use reward::{
    activation_score, layer_spread_m, reward_shaped_greedy, step_reward, stochastic_refinement, ClampMode,
    RewardContext, ShapedSpread,
};

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::exact_spread;
use crate::mckp::{solve_mckp, AllocationRow, BudgetAllocation};
use crate::network::{LayerId, LayerSet, MultiplexNetwork, NodeId, SeedSet};
use crate::objective::Objective;
use crate::pgm::{FittedPgm, DEFAULT_ALPHA, DEFAULT_XI};
use crate::propagation::{estimate_spread, record_status_dataset, SpreadEstimate, SpreadEvaluator, WorldSet, DEFAULT_MC};
use crate::seeding::{
    build_profit_cost_table, candidate_scores, lazy_greedy, probabilistic_greedy, prune_candidates, CandidateSet,
    ProfitCostTable, StopRule,
};

pub const DEFAULT_BUDGET: usize = 30;
pub const DEFAULT_GAMMA: f64 = 0.25;
pub const DEFAULT_RESTARTS: usize = 4;
pub const DEFAULT_TAU: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReasonerConfig {
    /// Total seed budget `l`.
    pub budget: usize,
    /// Monte Carlo worlds per estimate and rows per status dataset.
    pub mc: usize,
    pub seed: u64,
    /// Correlation threshold for grouping.
    pub xi: f64,
    /// Fraction of a layer's members kept as candidates.
    pub gamma: f64,
    /// Probabilistic greedy runs per layer.
    pub restarts: usize,
    /// Probabilistic greedy stops once the sampled gain is at most this.
    pub delta: f64,
    pub tau: f64,
    /// Refinement rollouts; 1 means greedy only.
    pub rollouts: usize,
    /// Laplace pseudo-count for the trees.
    pub alpha: f64,
    pub clamp_mode: ClampMode,
    pub phase2: bool,
    /// Optimize and evaluate on exact world enumeration (guarded instances only).
    pub exact: bool,
    /// Knapsack solver slack reported in certificates; 0 for the exact DP.
    pub epsilon: f64,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig {
            budget: DEFAULT_BUDGET,
            mc: DEFAULT_MC,
            seed: 0,
            xi: DEFAULT_XI,
            gamma: DEFAULT_GAMMA,
            restarts: DEFAULT_RESTARTS,
            delta: 0.0,
            tau: DEFAULT_TAU,
            rollouts: 1,
            alpha: DEFAULT_ALPHA,
            clamp_mode: ClampMode::Raw,
            phase2: true,
            exact: false,
            epsilon: 0.0,
        }
    }
}

impl ReasonerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.mc < 2 {
            return bad(format!("mc must be at least 2 (status datasets need variance), got {}", self.mc));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return bad(format!("xi must be in (0, 1], got {}", self.xi));
        }
        if !(self.gamma >= 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must be in [0, 1], got {}", self.gamma));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return bad(format!("delta must be >= 0, got {}", self.delta));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be > 0, got {}", self.tau));
        }
        if self.rollouts == 0 {
            return bad("rollouts must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad(format!("epsilon must be in [0, 1), got {}", self.epsilon));
        }
        Ok(())
    }

    /// Independent sub-seed for one purpose.
    pub fn derive_seed(&self, purpose: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(purpose);
        rng.next_u64()
    }

    fn rng(&self, purpose: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive_seed(purpose))
    }

    /// Worlds shared by every objective during optimization.
    pub fn optimization_worlds(&self, net: &MultiplexNetwork) -> Result<WorldSet> {
        if self.exact {
            WorldSet::enumerate(net, net.all_layers())
        } else {
            Ok(WorldSet::sample(net, self.mc, self.derive_seed(SEED_WORLDS)))
        }
    }

    /// Seed of the final evaluation; independent of optimization and equal
    /// across methods so that their spreads are paired.
    pub fn evaluation_seed(&self) -> u64 {
        self.derive_seed(SEED_EVALUATION)
    }
}

const SEED_WORLDS: u64 = 1;
const SEED_EVALUATION: u64 = 2;
const SEED_PROB_GREEDY: u64 = 1 << 16;
const SEED_STATUS: u64 = 2 << 16;
const SEED_REFINE: u64 = 3 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MimReasoner,
    Ksn,
    Isf,
    CelfSingle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::MimReasoner => "mim-reasoner",
            Method::Ksn => "ksn",
            Method::Isf => "isf",
            Method::CelfSingle => "celf-single",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mim-reasoner" => Ok(Method::MimReasoner),
            "ksn" => Ok(Method::Ksn),
            "isf" => Ok(Method::Isf),
            "celf-single" => Ok(Method::CelfSingle),
            other => Err(format!(
                "unknown method `{other}` (expected mim-reasoner, ksn, isf or celf-single)"
            )),
        }
    }
}

/// Everything the first phase produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase1 {
    pub candidates: Vec<CandidateSet>,
    pub table: ProfitCostTable,
    pub allocation: BudgetAllocation,
}

impl Phase1 {
    pub fn seeds(&self, layer: LayerId) -> &SeedSet {
        self.table.seeds(layer, self.allocation.rows[layer].budget)
    }
}

/// Rewards collected while re-optimizing one layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub layer: LayerId,
    pub budget: usize,
    pub picks: Vec<NodeId>,
    pub rewards: Vec<f64>,
    /// `M(∅)` and `M(S_final)` on the same worlds as the rewards.
    pub shaped_empty: f64,
    pub shaped_final: f64,
    /// Number of PGMs the reward was conditioned on.
    pub num_pgms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmSummary {
    pub after_layer: LayerId,
    pub num_variables: usize,
    pub num_groups: usize,
    pub mi_evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub method: Method,
    pub per_layer_seeds: Vec<SeedSet>,
    pub union_seeds: SeedSet,
    pub total_spread: SpreadEstimate,
    pub beta: f64,
    pub certificate: RatioCertificate,
    pub processing_order: Vec<LayerId>,
    pub allocation: Option<BudgetAllocation>,
    pub reward_trace: Vec<Episode>,
    pub pgms: Vec<PgmSummary>,
    pub wall_times: BTreeMap<String, f64>,
}

/// Removes and returns the remaining row with the lowest profit (lower
/// layer id on ties); `None` once every layer has been taken.
pub fn select_next_layer(remaining: &mut Vec<AllocationRow>) -> Option<AllocationRow> {
    let best = (0..remaining.len()).min_by(|&a, &b| {
        remaining[a]
            .profit
            .total_cmp(&remaining[b].profit)
            .then(remaining[a].layer.cmp(&remaining[b].layer))
    })?;
    Some(remaining.remove(best))
}

/// Candidate scoring, per-layer greedy prefixes, profit-cost table and
/// knapsack allocation. Layers are processed in parallel.
pub fn run_phase1(net: &MultiplexNetwork, cfg: &ReasonerConfig, worlds: &WorldSet) -> Result<Phase1> {
    let l = cfg.budget;
    let per_layer: Vec<(CandidateSet, Vec<SeedSet>)> = (0..net.num_layers())
        .into_par_iter()
        .map(|i| -> Result<_> {
            let members: Vec<NodeId> = net.layer(i).members().collect();
            let sigma_i = SpreadEvaluator::new(net, worlds, LayerSet::single(i));
            let mut rng = cfg.rng(SEED_PROB_GREEDY + i as u64);
            let runs = probabilistic_greedy(&sigma_i, &members, l, cfg.restarts, cfg.delta, &mut rng)?;
            let scores = candidate_scores(&runs).unwrap_or_default();
            let cands = prune_candidates(&scores, &members, cfg.gamma, l);
            let prefixes = lazy_greedy(&sigma_i, &cands.nodes, l, StopRule::Never).prefixes();
            Ok((cands, prefixes))
        })
        .collect::<Result<_>>()?;
    let (candidates, prefixes): (Vec<_>, Vec<_>) = per_layer.into_iter().unzip();
    let sigma = SpreadEvaluator::new(net, worlds, net.all_layers());
    let table = build_profit_cost_table(net, &prefixes, &sigma)?;
    let allocation = solve_mckp(&table.profits(), l)?;
    Ok(Phase1 {
        candidates,
        table,
        allocation,
    })
}

struct Phase2 {
    per_layer_seeds: Vec<SeedSet>,
    order: Vec<LayerId>,
    episodes: Vec<Episode>,
    pgms: Vec<FittedPgm>,
}

fn run_phase2(net: &MultiplexNetwork, cfg: &ReasonerConfig, worlds: &WorldSet, p1: &Phase1) -> Result<Phase2> {
    let k = net.num_layers();
    let mut remaining = p1.allocation.rows.clone();
    let mut out = Phase2 {
        per_layer_seeds: vec![SeedSet::new(); k],
        order: Vec::with_capacity(k),
        episodes: Vec::new(),
        pgms: Vec::new(),
    };
    let mut processed = LayerSet::EMPTY;
    while let Some(row) = select_next_layer(&mut remaining) {
        let layer = row.layer;
        let seeds = if out.order.is_empty() {
            p1.seeds(layer).clone()
        } else {
            let ctx = RewardContext {
                layer,
                pgms: &out.pgms,
                clamp: cfg.clamp_mode,
            };
            let obj = ShapedSpread::new(net, worlds, ctx)?;
            let cands = &p1.candidates[layer].nodes;
            let run = if cfg.rollouts > 1 {
                let mut rng = cfg.rng(SEED_REFINE + layer as u64);
                stochastic_refinement(&obj, cands, row.budget, cfg.tau, cfg.rollouts, &mut rng)?
            } else {
                reward_shaped_greedy(&obj, cands, row.budget)
            };
            out.episodes.push(Episode {
                layer,
                budget: row.budget,
                picks: run.picks.clone(),
                rewards: run.gains.clone(),
                shaped_empty: obj.value(&[]),
                shaped_final: obj.value(&run.picks),
                num_pgms: out.pgms.len(),
            });
            run.seed_set()
        };
        out.per_layer_seeds[layer] = seeds;
        out.order.push(layer);
        processed = processed.with(layer);
        if !remaining.is_empty() {
            let acc = SeedSet::union(out.order.iter().map(|&i| &out.per_layer_seeds[i]));
            let status_seed = cfg.derive_seed(SEED_STATUS + out.order.len() as u64);
            let d = record_status_dataset(net, &acc, processed, cfg.mc, status_seed)?;
            out.pgms.push(FittedPgm::fit(&d, cfg.xi, cfg.alpha)?);
        }
    }
    Ok(out)
}

fn evaluate(net: &MultiplexNetwork, cfg: &ReasonerConfig, seeds: &SeedSet) -> Result<SpreadEstimate> {
    if cfg.exact {
        Ok(SpreadEstimate::exact(exact_spread(net, seeds)?))
    } else {
        estimate_spread(net, seeds, cfg.mc, cfg.evaluation_seed())
    }
}

fn evaluation_worlds(net: &MultiplexNetwork, cfg: &ReasonerConfig) -> Result<WorldSet> {
    if cfg.exact {
        WorldSet::enumerate(net, net.all_layers())
    } else {
        Ok(WorldSet::sample(net, cfg.mc, cfg.evaluation_seed()))
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    net: &MultiplexNetwork,
    cfg: &ReasonerConfig,
    method: Method,
    per_layer_seeds: Vec<SeedSet>,
    order: Vec<LayerId>,
    allocation: Option<BudgetAllocation>,
    reward_trace: Vec<Episode>,
    pgms: Vec<PgmSummary>,
    mut wall_times: BTreeMap<String, f64>,
) -> Result<Solution> {
    let t = Instant::now();
    let union_seeds = SeedSet::union(order.iter().map(|&i| &per_layer_seeds[i]));
    let total_spread = evaluate(net, cfg, &union_seeds)?;
    let beta = measure_beta(net, &per_layer_seeds, &order, &evaluation_worlds(net, cfg)?)?;
    let certificate = RatioCertificate::new(net.num_layers(), net.overlap_count(), cfg.epsilon, beta, total_spread.mean)?;
    wall_times.insert("evaluation".into(), t.elapsed().as_secs_f64());
    Ok(Solution {
        method,
        per_layer_seeds,
        union_seeds,
        total_spread,
        beta,
        certificate,
        processing_order: order,
        allocation,
        reward_trace,
        pgms,
        wall_times,
    })
}

/// Phase 1 and, unless disabled, Phase 2.
pub fn run_mim_reasoner(net: &MultiplexNetwork, cfg: &ReasonerConfig) -> Result<(Solution, Phase1)> {
    cfg.validate()?;
    let mut times = BTreeMap::new();
    let worlds = cfg.optimization_worlds(net)?;
    let t = Instant::now();
    let p1 = run_phase1(net, cfg, &worlds)?;
    times.insert("phase1".into(), t.elapsed().as_secs_f64());
    if !cfg.phase2 {
        let sol = ksn_from_phase1(net, cfg, &p1, Method::MimReasoner, times)?;
        return Ok((sol, p1));
    }
    let t = Instant::now();
    let p2 = run_phase2(net, cfg, &worlds, &p1)?;
    times.insert("phase2".into(), t.elapsed().as_secs_f64());
    let pgms = p2
        .pgms
        .iter()
        .zip(&p2.order)
        .map(|(p, &after_layer)| PgmSummary {
            after_layer,
            num_variables: p.tree.num_variables(),
            num_groups: p.partition().groups.len(),
            mi_evaluations: p.tree.mi_evaluations,
        })
        .collect();
    let sol = finish(
        net,
        cfg,
        Method::MimReasoner,
        p2.per_layer_seeds,
        p2.order,
        Some(p1.allocation.clone()),
        p2.episodes,
        pgms,
        times,
    )?;
    Ok((sol, p1))
}

fn ksn_from_phase1(
    net: &MultiplexNetwork,
    cfg: &ReasonerConfig,
    p1: &Phase1,
    method: Method,
    times: BTreeMap<String, f64>,
) -> Result<Solution> {
    let per_layer: Vec<SeedSet> = (0..net.num_layers()).map(|i| p1.seeds(i).clone()).collect();
    let mut remaining = p1.allocation.rows.clone();
    let order: Vec<LayerId> = std::iter::from_fn(|| select_next_layer(&mut remaining).map(|r| r.layer)).collect();
    finish(net, cfg, method, per_layer, order, Some(p1.allocation.clone()), Vec::new(), Vec::new(), times)
}

/// Knapsack seeding: the union of the Phase-1 allocation.
pub fn run_ksn(net: &MultiplexNetwork, cfg: &ReasonerConfig) -> Result<(Solution, Phase1)> {
    cfg.validate()?;
    let mut times = BTreeMap::new();
    let worlds = cfg.optimization_worlds(net)?;
    let t = Instant::now();
    let p1 = run_phase1(net, cfg, &worlds)?;
    times.insert("phase1".into(), t.elapsed().as_secs_f64());
    let sol = ksn_from_phase1(net, cfg, &p1, Method::Ksn, times)?;
    Ok((sol, p1))
}

/// Lazy greedy directly on the multiplex spread over all member nodes.
pub fn run_isf(net: &MultiplexNetwork, cfg: &ReasonerConfig) -> Result<Solution> {
    cfg.validate()?;
    let worlds = cfg.optimization_worlds(net)?;
    let t = Instant::now();
    let sigma = SpreadEvaluator::new(net, &worlds, net.all_layers());
    let run = lazy_greedy(&sigma, &net.member_nodes(), cfg.budget, StopRule::Never);
    let mut times = BTreeMap::new();
    times.insert("greedy".into(), t.elapsed().as_secs_f64());
    single_set_solution(net, cfg, Method::Isf, run.seed_set(), times)
}

/// Lazy greedy on one layer's own spread.
pub fn run_celf_single(net: &MultiplexNetwork, cfg: &ReasonerConfig, layer: LayerId) -> Result<Solution> {
    cfg.validate()?;
    net.check_layer(layer)?;
    let worlds = cfg.optimization_worlds(net)?;
    let t = Instant::now();
    let sigma = SpreadEvaluator::new(net, &worlds, LayerSet::single(layer));
    let members: Vec<NodeId> = net.layer(layer).members().collect();
    let run = lazy_greedy(&sigma, &members, cfg.budget, StopRule::Never);
    let mut times = BTreeMap::new();
    times.insert("greedy".into(), t.elapsed().as_secs_f64());
    let mut per_layer = vec![SeedSet::new(); net.num_layers()];
    per_layer[layer] = run.seed_set();
    finish(net, cfg, Method::CelfSingle, per_layer, vec![layer], None, Vec::new(), Vec::new(), times)
}

fn single_set_solution(
    net: &MultiplexNetwork,
    cfg: &ReasonerConfig,
    method: Method,
    seeds: SeedSet,
    times: BTreeMap<String, f64>,
) -> Result<Solution> {
    // attribute each seed to its lowest member layer, for reporting and beta
    let mut per_layer = vec![SeedSet::new(); net.num_layers()];
    for v in seeds.iter() {
        if let Some(l) = net.layers().iter().find(|l| l.is_member(v)) {
            per_layer[l.id()].insert(v);
        }
    }
    let order: Vec<LayerId> = (0..net.num_layers()).collect();
    let mut sol = finish(net, cfg, method, per_layer, order, None, Vec::new(), Vec::new(), times)?;
    sol.union_seeds = seeds;
    Ok(sol)
}

/// Runs `method` (layer 0 for single-layer CELF).
pub fn run_method(net: &MultiplexNetwork, cfg: &ReasonerConfig, method: Method, layer: LayerId) -> Result<(Solution, Option<Phase1>)> {
    match method {
        Method::MimReasoner => run_mim_reasoner(net, cfg).map(|(s, p)| (s, Some(p))),
        Method::Ksn => run_ksn(net, cfg).map(|(s, p)| (s, Some(p))),
        Method::Isf => run_isf(net, cfg).map(|s| (s, None)),
        Method::CelfSingle => run_celf_single(net, cfg, layer).map(|s| (s, None)),
    }
}

/// Spread of `seeds` on the objective's worlds; a convenience for checks.
pub fn objective_value<O: Objective + ?Sized>(obj: &O, seeds: &SeedSet) -> f64 {
    obj.value(seeds.nodes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{LayerSpec, ModelKind};

    #[test]
    fn select_next_layer_by_profit() {
        let mut rows: Vec<AllocationRow> = [10.0, 4.0, 7.0, 4.0]
            .iter()
            .enumerate()
            .map(|(layer, &profit)| AllocationRow { layer, budget: 1, profit })
            .collect();
        let order: Vec<LayerId> = std::iter::from_fn(|| select_next_layer(&mut rows).map(|r| r.layer)).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
        assert!(select_next_layer(&mut rows).is_none());
    }

    #[test]
    fn config_validation() {
        assert!(ReasonerConfig::default().validate().is_ok());
        for bad in [
            ReasonerConfig { mc: 1, ..Default::default() },
            ReasonerConfig { xi: 0.0, ..Default::default() },
            ReasonerConfig { gamma: 1.5, ..Default::default() },
            ReasonerConfig { tau: 0.0, ..Default::default() },
            ReasonerConfig { alpha: 0.0, ..Default::default() },
            ReasonerConfig { rollouts: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        let c = ReasonerConfig::default();
        assert_ne!(c.derive_seed(1), c.derive_seed(2));
        assert_eq!("ksn".parse::<Method>().unwrap().to_string(), "ksn");
    }

    fn two_layer() -> MultiplexNetwork {
        MultiplexNetwork::new(
            6,
            vec![
                LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5).edge(1, 2, 0.5).edge(0, 3, 0.4),
                LayerSpec::new(ModelKind::IC).edge(3, 4, 0.6).edge(2, 5, 0.5).edge(4, 5, 0.3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_budget_gives_empty_solution() {
        let net = two_layer();
        let cfg = ReasonerConfig { budget: 0, exact: true, ..Default::default() };
        let (sol, _) = run_mim_reasoner(&net, &cfg).unwrap();
        assert!(sol.union_seeds.is_empty());
        assert_eq!(sol.total_spread.mean, 0.0);
        assert_eq!(sol.pgms.len(), 1);
    }

    #[test]
    fn pipeline_respects_budget_and_counts_pgms() {
        let net = two_layer();
        let cfg = ReasonerConfig { budget: 2, mc: 50, ..Default::default() };
        let (sol, p1) = run_mim_reasoner(&net, &cfg).unwrap();
        assert!(sol.union_seeds.len() <= 2);
        assert!(p1.allocation.total_cost() <= 2);
        assert_eq!(sol.pgms.len(), 1);
        assert_eq!(sol.processing_order.len(), 2);
        let union = SeedSet::union(sol.per_layer_seeds.iter());
        assert_eq!(union.sorted(), sol.union_seeds.sorted());
        let cert = &sol.certificate;
        assert!(cert.bounds.worst <= cert.bounds.general && cert.bounds.general <= cert.bounds.best);
    }

    #[test]
    fn single_layer_reduces_to_celf() {
        let net = MultiplexNetwork::new(
            5,
            vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5).edge(1, 2, 0.5).edge(3, 4, 0.9)],
        )
        .unwrap();
        let cfg = ReasonerConfig { budget: 2, mc: 64, gamma: 1.0, ..Default::default() };
        let (mim, _) = run_mim_reasoner(&net, &cfg).unwrap();
        let (ksn, _) = run_ksn(&net, &cfg).unwrap();
        let celf = run_celf_single(&net, &cfg, 0).unwrap();
        let isf = run_isf(&net, &cfg).unwrap();
        assert_eq!(mim.union_seeds.sorted(), celf.union_seeds.sorted());
        assert_eq!(ksn.union_seeds.sorted(), celf.union_seeds.sorted());
        assert_eq!(isf.union_seeds.sorted(), celf.union_seeds.sorted());
        assert!(mim.pgms.is_empty());
    }
}
