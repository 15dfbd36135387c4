//! Set functions that greedy seed selection can maximize.

use crate::error::Result;
use crate::exact::exact_spread_in;
use crate::network::{LayerSet, MultiplexNetwork, NodeId, SeedSet};
use crate::propagation::SpreadEvaluator;

pub trait Objective: Sync {
    fn value(&self, seeds: &[NodeId]) -> f64;

    /// `value(base + v) - value(base)` for each candidate.
    fn gains(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<f64>;
}

impl Objective for SpreadEvaluator<'_> {
    fn value(&self, seeds: &[NodeId]) -> f64 {
        SpreadEvaluator::value(self, seeds)
    }

    fn gains(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<f64> {
        SpreadEvaluator::gains(self, base, candidates)
    }
}

/// Spread computed by full world enumeration. Only for guarded instances.
pub struct ExactObjective<'a> {
    net: &'a MultiplexNetwork,
    layers: LayerSet,
}

impl<'a> ExactObjective<'a> {
    /// Fails up front if the instance is above the enumeration guard.
    pub fn new(net: &'a MultiplexNetwork, layers: LayerSet) -> Result<Self> {
        exact_spread_in(net, &SeedSet::new(), layers)?;
        Ok(ExactObjective { net, layers })
    }

    fn eval(&self, seeds: &[NodeId]) -> f64 {
        exact_spread_in(self.net, &SeedSet::from_nodes(seeds.iter().copied()), self.layers)
            .expect("guard checked at construction")
    }
}

impl Objective for ExactObjective<'_> {
    fn value(&self, seeds: &[NodeId]) -> f64 {
        self.eval(seeds)
    }

    fn gains(&self, base: &[NodeId], candidates: &[NodeId]) -> Vec<f64> {
        let b = self.eval(base);
        candidates
            .iter()
            .map(|&v| {
                let mut s = base.to_vec();
                s.push(v);
                self.eval(&s) - b
            })
            .collect()
    }
}
