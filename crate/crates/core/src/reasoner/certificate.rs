//! Approximation-ratio certificates and the measured re-activation fraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{LayerId, LayerSet, MultiplexNetwork, NodeId, SeedSet};
use crate::objective::Objective;
use crate::propagation::{SpreadEvaluator, WorldSet};

const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Largest number of seed subsets [`exhaustive_optimum`] will evaluate.
pub const EXHAUSTIVE_LIMIT: u128 = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// `(1-ε)(1-1/e) / ((o+1)k)`
    pub worst: f64,
    /// `(1-ε)(1-1/e) / ((k-1)βo + o + k)`
    pub general: f64,
    /// `(1-ε)(1-1/e) / (k+o)`
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCertificate {
    pub o: usize,
    pub k: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub bounds: Bounds,
    pub sigma_hat: f64,
    /// Only known when the optimum was found by exhaustive search.
    pub sigma_opt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub ratio: f64,
    pub required: f64,
    pub passed: bool,
}

pub fn bound_worst(k: usize, o: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon) * ONE_MINUS_INV_E / ((o as f64 + 1.0) * k as f64)
}

pub fn bound_best(k: usize, o: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon) * ONE_MINUS_INV_E / (k as f64 + o as f64)
}

pub fn bound_general(k: usize, o: usize, epsilon: f64, beta: f64) -> f64 {
    let (k, o) = (k as f64, o as f64);
    (1.0 - epsilon) * ONE_MINUS_INV_E / ((k - 1.0) * beta * o + o + k)
}

impl RatioCertificate {
    pub fn new(k: usize, o: usize, epsilon: f64, beta: f64, sigma_hat: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("certificate needs at least one layer".into()));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("epsilon must be in [0, 1), got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Domain(format!("beta must be in [0, 1], got {beta}")));
        }
        Ok(RatioCertificate {
            o,
            k,
            epsilon,
            beta,
            bounds: Bounds {
                worst: bound_worst(k, o, epsilon),
                general: bound_general(k, o, epsilon, beta),
                best: bound_best(k, o, epsilon),
            },
            sigma_hat,
            sigma_opt: None,
        })
    }

    pub fn with_optimum(mut self, sigma_opt: f64) -> Self {
        self.sigma_opt = Some(sigma_opt);
        self
    }

    /// Pass/fail of `σ(Ŝ) >= bound · σ(S̃)` for each bound; empty without an optimum.
    pub fn checks(&self) -> Vec<BoundCheck> {
        let Some(opt) = self.sigma_opt else { return Vec::new() };
        let ratio = if opt > 0.0 { self.sigma_hat / opt } else { 1.0 };
        [
            ("worst", self.bounds.worst),
            ("general", self.bounds.general),
            ("best", self.bounds.best),
        ]
        .into_iter()
        .map(|(name, required)| BoundCheck {
            name: name.into(),
            ratio,
            required,
            passed: self.sigma_hat >= required * opt,
        })
        .collect()
    }
}

/// Best value of `obj` over all subsets of `universe` of size `min(l, |universe|)`
/// (and smaller, for objectives that may not be monotone). Ties go to the
/// lexicographically first subset.
pub fn exhaustive_optimum<O: Objective + ?Sized>(obj: &O, universe: &[NodeId], l: usize) -> Result<(f64, SeedSet)> {
    let mut nodes: Vec<NodeId> = universe.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let n = nodes.len();
    let size = l.min(n);
    let count: u128 = (0..=size).map(|s| binomial(n as u128, s as u128)).sum();
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::GuardExceeded(format!(
            "{count} seed subsets exceed the exhaustive-search limit of {EXHAUSTIVE_LIMIT}"
        )));
    }
    let mut best = (obj.value(&[]), Vec::new());
    for s in 1..=size {
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let set: Vec<NodeId> = idx.iter().map(|&i| nodes[i]).collect();
            let v = obj.value(&set);
            if v > best.0 {
                best = (v, set);
            }
            // next combination in lexicographic order
            let mut i = s;
            while i > 0 && idx[i - 1] == n - s + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..s {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok((best.0, SeedSet::from_nodes(best.1)))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Fraction of overlap-node activations in the second and later processed
/// layers that an earlier layer's cascade had already produced. Each layer's
/// cascade runs inside that layer only, from that layer's seeds, on shared
/// worlds. Zero when there are no such activations.
pub fn measure_beta(
    net: &MultiplexNetwork,
    per_layer_seeds: &[SeedSet],
    order: &[LayerId],
    worlds: &WorldSet,
) -> Result<f64> {
    if per_layer_seeds.len() != net.num_layers() {
        return Err(Error::Domain("need one seed set per layer".into()));
    }
    for &l in order {
        net.check_layer(l)?;
    }
    let n = net.num_nodes();
    let mut is_overlap = vec![false; n];
    for &v in net.native_overlap() {
        is_overlap[v as usize] = true;
    }
    let per_layer: Vec<Vec<Vec<NodeId>>> = order
        .iter()
        .map(|&l| {
            SpreadEvaluator::new(net, worlds, LayerSet::single(l))
                .map_worlds(per_layer_seeds[l].nodes(), |_, st| st.activated().to_vec())
        })
        .collect();
    let (mut repeats, mut total) = (0.0, 0.0);
    for r in 0..worlds.len() {
        let w = worlds.weight(r);
        let mut seen = vec![false; n];
        for (t, cascades) in per_layer.iter().enumerate() {
            let activated = &cascades[r];
            if t > 0 {
                for &v in activated {
                    if is_overlap[v as usize] {
                        total += w;
                        if seen[v as usize] {
                            repeats += w;
                        }
                    }
                }
            }
            for &v in activated {
                seen[v as usize] = true;
            }
        }
    }
    Ok(if total > 0.0 { (repeats / total).clamp(0.0, 1.0) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{LayerSpec, ModelKind};

    #[test]
    fn bound_ordering_and_special_cases() {
        let c = RatioCertificate::new(3, 4, 0.0, 0.5, 1.0).unwrap();
        assert!(c.bounds.worst <= c.bounds.general && c.bounds.general <= c.bounds.best);
        assert!((bound_worst(1, 0, 0.0) - ONE_MINUS_INV_E).abs() < 1e-15);
        // beta = 1 gives (k-1)o + o + k = (o+1)k
        assert!((bound_general(3, 4, 0.0, 1.0) - bound_worst(3, 4, 0.0)).abs() < 1e-15);
        assert!((bound_general(3, 4, 0.0, 0.0) - bound_best(3, 4, 0.0)).abs() < 1e-15);
        assert!(RatioCertificate::new(2, 1, 0.0, 1.5, 1.0).is_err());
        assert!(c.checks().is_empty());
        let checks = c.with_optimum(2.0).checks();
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(|c| c.passed && c.ratio == 0.5));
    }

    #[test]
    fn exhaustive_picks_best_pair() {
        struct Cover;
        impl Objective for Cover {
            fn value(&self, s: &[NodeId]) -> f64 {
                let mut covered = std::collections::BTreeSet::new();
                for &v in s {
                    covered.extend([[0, 1], [1, 2], [3, 4], [0, 4]][v as usize]);
                }
                covered.len() as f64
            }
            fn gains(&self, _: &[NodeId], _: &[NodeId]) -> Vec<f64> {
                unreachable!()
            }
        }
        let (v, s) = exhaustive_optimum(&Cover, &[0, 1, 2, 3], 2).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(s.nodes(), &[0, 2]);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert!(exhaustive_optimum(&Cover, &(0..40).collect::<Vec<_>>(), 20).is_err());
    }

    fn twin_layers() -> MultiplexNetwork {
        let spec = LayerSpec::new(ModelKind::IC).edge(0, 1, 1.0).edge(1, 2, 1.0);
        MultiplexNetwork::new(3, vec![spec.clone(), spec]).unwrap()
    }

    #[test]
    fn identical_layers_and_seeds_give_beta_one() {
        let net = twin_layers();
        let worlds = WorldSet::sample(&net, 32, 1);
        let seeds = vec![SeedSet::from_nodes([0]), SeedSet::from_nodes([0])];
        assert_eq!(measure_beta(&net, &seeds, &[0, 1], &worlds).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_cascades_give_beta_zero() {
        let net = MultiplexNetwork::new(
            6,
            vec![
                LayerSpec::new(ModelKind::IC).edge(0, 1, 1.0).member(4),
                LayerSpec::new(ModelKind::IC).edge(4, 5, 1.0).member(0),
            ],
        )
        .unwrap();
        assert_eq!(net.native_overlap(), &[0, 4]);
        let worlds = WorldSet::sample(&net, 8, 1);
        let seeds = vec![SeedSet::from_nodes([0]), SeedSet::from_nodes([4])];
        assert_eq!(measure_beta(&net, &seeds, &[0, 1], &worlds).unwrap(), 0.0);
        let none = MultiplexNetwork::new(
            4,
            vec![
                LayerSpec::new(ModelKind::IC).edge(0, 1, 1.0),
                LayerSpec::new(ModelKind::IC).edge(2, 3, 1.0),
            ],
        )
        .unwrap();
        let worlds = WorldSet::sample(&none, 8, 1);
        let seeds = vec![SeedSet::from_nodes([0]), SeedSet::from_nodes([2])];
        assert_eq!(measure_beta(&none, &seeds, &[1, 0], &worlds).unwrap(), 0.0);
    }
}
