//! Reward-shaped layer spread: every activated node contributes `1 - W(u)`,
//! where `W(u)` estimates how likely previously processed layers already
//! reach `u`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{LayerId, LayerSet, NodeId};
use crate::objective::Objective;
use crate::pgm::{FittedPgm, GroupKind, TreeInference};
use crate::propagation::{CascadeState, SpreadEvaluator, WorldSet};
use crate::seeding::{lazy_greedy, GreedyRun, StopRule};
use crate::network::MultiplexNetwork;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampMode {
    /// Use the Pearson-weighted score as is; negative correlations can push
    /// a node's contribution above 1.
    #[default]
    Raw,
    /// Truncate the score to `[0, 1]`.
    Clamp01,
}

impl std::str::FromStr for ClampMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "raw" => Ok(ClampMode::Raw),
            "clamp01" => Ok(ClampMode::Clamp01),
            other => Err(format!("unknown clamp mode `{other}` (expected raw or clamp01)")),
        }
    }
}

#[derive(Clone, Copy)]
pub struct RewardContext<'a> {
    pub layer: LayerId,
    pub pgms: &'a [FittedPgm],
    pub clamp: ClampMode,
}

/// Scores nodes of one activated set against every previous PGM.
pub(crate) struct Scorer<'a> {
    pgms: &'a [FittedPgm],
    inference: Vec<TreeInference<'a>>,
    clamp: ClampMode,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(pgms: &'a [FittedPgm], clamp: ClampMode) -> Self {
        Scorer {
            pgms,
            inference: pgms.iter().map(|p| TreeInference::new(&p.tree)).collect(),
            clamp,
        }
    }

    /// Per-PGM posteriors `P(y = 1 | K \ {y})` of every tree variable, where
    /// `K` marks the active representatives as observed active.
    pub(crate) fn posteriors(&self, is_active: impl Fn(NodeId) -> bool) -> Result<Vec<Vec<f64>>> {
        self.pgms
            .iter()
            .zip(&self.inference)
            .map(|(pgm, inf)| {
                let ev: Vec<Option<bool>> = pgm
                    .tree
                    .variables
                    .iter()
                    .map(|&y| is_active(y).then_some(true))
                    .collect();
                inf.cavity_posteriors(&ev)
            })
            .collect()
    }

    /// `W(u) = Q(u, f(u)) · P(f(u) | K \ {f(u)})` for the PGM whose
    /// conditional is largest (earliest PGM on ties).
    pub(crate) fn score(&self, u: NodeId, posteriors: &[Vec<f64>]) -> f64 {
        let mut best: Option<(f64, usize)> = None;
        for (i, pgm) in self.pgms.iter().enumerate() {
            let g = pgm.partition().group_of(u);
            let p = match g.kind {
                GroupKind::AlwaysActive => 1.0,
                GroupKind::NeverActive => 0.0,
                GroupKind::Correlated => {
                    let idx = pgm.tree.variable_index(g.representative).expect("representative is a variable");
                    posteriors[i][idx]
                }
            };
            if best.is_none_or(|(bp, _)| p > bp) {
                best = Some((p, i));
            }
        }
        let Some((p, i)) = best else { return 0.0 };
        let w = self.pgms[i].weight(u) * p;
        match self.clamp {
            ClampMode::Raw => w,
            ClampMode::Clamp01 => w.clamp(0.0, 1.0),
        }
    }

    /// `Σ_{u ∈ T} (1 - W(u))`.
    pub(crate) fn shaped(&self, activated: &[NodeId], is_active: impl Fn(NodeId) -> bool) -> Result<f64> {
        if self.pgms.is_empty() {
            return Ok(activated.len() as f64);
        }
        let post = self.posteriors(is_active)?;
        Ok(activated.iter().map(|&u| 1.0 - self.score(u, &post)).sum())
    }
}

/// `W(u)` for one activated set.
pub fn activation_score(u: NodeId, activated: &[NodeId], ctx: &RewardContext<'_>) -> Result<f64> {
    if !activated.contains(&u) {
        return Err(Error::Domain(format!("node {u} is not in the activated set")));
    }
    let scorer = Scorer::new(ctx.pgms, ctx.clamp);
    let post = scorer.posteriors(|v| activated.contains(&v))?;
    Ok(scorer.score(u, &post))
}

/// The reward-shaped spread `M(S)` in one layer, estimated on shared worlds.
pub struct ShapedSpread<'a> {
    eval: SpreadEvaluator<'a>,
    scorer: Scorer<'a>,
}

impl<'a> ShapedSpread<'a> {
    pub fn new(net: &'a MultiplexNetwork, worlds: &'a WorldSet, ctx: RewardContext<'a>) -> Result<Self> {
        net.check_layer(ctx.layer)?;
        Ok(ShapedSpread {
            eval: SpreadEvaluator::new(net, worlds, LayerSet::single(ctx.layer)),
            scorer: Scorer::new(ctx.pgms, ctx.clamp),
        })
    }

    fn world_value(&self, st: &CascadeState) -> f64 {
        self.scorer
            .shaped(st.activated(), |v| st.is_active(v))
            .expect("smoothed trees admit any positive evidence")
    }

    /// `M(S)` per world.
    pub fn per_world(&self, seeds: &[NodeId]) -> Vec<f64> {
        self.eval.map_worlds(seeds, |_, st| self.world_value(st))
    }

    fn aggregate(&self, per_world: impl Iterator<Item = f64>) -> f64 {
        let worlds = self.eval.worlds();
        if worlds.is_uniform() {
            per_world.sum::<f64>() / worlds.len().max(1) as f64
        } else {
            per_world.enumerate().map(|(r, x)| worlds.weight(r) * x).sum()
        }
    }
}

impl Objective for ShapedSpread<'_> {
    fn value(&self, seeds: &[NodeId]) -> f64 {
        self.aggregate(self.per_world(seeds).into_iter())
    }

    fn gains(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<f64> {
        let net = self.eval.network();
        let layers = self.eval.layers();
        let worlds = self.eval.worlds();
        let diffs: Vec<Vec<f64>> = self.eval.map_worlds_with(base, |r, st| {
            let before = self.world_value(st);
            candidates
                .iter()
                .map(|&v| {
                    let cp = st.checkpoint();
                    st.run(net, layers, worlds.world_bits(r), [v]);
                    let after = self.world_value(st);
                    st.rollback(cp);
                    after - before
                })
                .collect()
        });
        (0..candidates.len())
            .map(|i| self.aggregate(diffs.iter().map(|d| d[i])))
            .collect()
    }
}

/// `M(S)`.
pub fn layer_spread_m(obj: &ShapedSpread<'_>, seeds: &[NodeId]) -> f64 {
    obj.value(seeds)
}

/// `r = M(S + v) - M(S)`.
pub fn step_reward(obj: &ShapedSpread<'_>, seeds: &[NodeId], v: NodeId) -> f64 {
    obj.gains(seeds, &[v])[0]
}

/// Lazy greedy on `M`, stopping early only when every gain is negative.
pub fn reward_shaped_greedy<O: Objective + ?Sized>(obj: &O, candidates: &[NodeId], budget: usize) -> GreedyRun {
    lazy_greedy(obj, candidates, budget, StopRule::NegativeGain)
}

/// Greedy plus `rollouts - 1` runs that sample each pick from
/// `softmax(gain / tau)`; returns the run with the largest `M` (earliest on
/// ties), so the result is never worse than greedy.
pub fn stochastic_refinement<O: Objective + ?Sized, R: Rng + ?Sized>(
    obj: &O,
    candidates: &[NodeId],
    budget: usize,
    tau: f64,
    rollouts: usize,
    rng: &mut R,
) -> Result<GreedyRun> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!("temperature must be > 0, got {tau}")));
    }
    if rollouts == 0 {
        return Err(Error::InvalidConfig("refinement needs at least one rollout".into()));
    }
    let greedy = reward_shaped_greedy(obj, candidates, budget);
    let mut best_value = obj.value(&greedy.picks);
    let mut best = greedy;
    let mut pool: Vec<NodeId> = candidates.to_vec();
    pool.sort_unstable();
    pool.dedup();
    for _ in 1..rollouts {
        let mut remaining = pool.clone();
        let mut run = GreedyRun::default();
        while run.picks.len() < budget && !remaining.is_empty() {
            let gains = obj.gains(&run.picks, &remaining);
            let top = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top < 0.0 {
                break;
            }
            let weights: Vec<f64> = gains.iter().map(|g| ((g - top) / tau).exp()).collect();
            let mut target = rng.random::<f64>() * weights.iter().sum::<f64>();
            let mut pick = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            run.picks.push(remaining.remove(pick));
            run.gains.push(gains[pick]);
        }
        let value = obj.value(&run.picks);
        if value > best_value {
            best_value = value;
            best = run;
        }
    }
    Ok(best)
}
