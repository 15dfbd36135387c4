//! Brute-force oracles over every live-edge world.
//!
//! This module deliberately shares no cascade code with [`crate::propagation`]:
//! the closure below is a plain fixed-point iteration, so agreement between
//! the two is a meaningful check.

use crate::error::{Error, Result};
use crate::network::{LayerSet, ModelKind, MultiplexNetwork, NodeId, SeedSet};
use crate::propagation::EXACT_IC_EDGE_GUARD;

struct IcEdge {
    layer: usize,
    src: usize,
    dst: usize,
    p: f64,
}

/// Expected number of activated identities under diffusion in all layers.
pub fn exact_spread(net: &MultiplexNetwork, seeds: &SeedSet) -> Result<f64> {
    exact_spread_in(net, seeds, net.all_layers())
}

pub fn exact_spread_in(net: &MultiplexNetwork, seeds: &SeedSet, layers: LayerSet) -> Result<f64> {
    exact_expectation(net, seeds, layers, |active| {
        active.iter().filter(|&&a| a).count() as f64
    })
}

/// Per-node activation probabilities.
pub fn exact_activation_probabilities(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers: LayerSet,
) -> Result<Vec<f64>> {
    let mut probs = vec![0.0; net.num_nodes()];
    for (w, active) in exact_outcomes(net, seeds, layers)? {
        for (p, &a) in probs.iter_mut().zip(&active) {
            if a {
                *p += w;
            }
        }
    }
    Ok(probs)
}

/// `E[f(final active set)]` over all live-edge worlds of the IC edges in `layers`.
pub fn exact_expectation<F>(net: &MultiplexNetwork, seeds: &SeedSet, layers: LayerSet, f: F) -> Result<f64>
where
    F: Fn(&[bool]) -> f64,
{
    Ok(exact_outcomes(net, seeds, layers)?
        .into_iter()
        .map(|(w, active)| w * f(&active))
        .sum())
}

/// Every world with nonzero probability, paired with its final active set.
pub fn exact_outcomes(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers: LayerSet,
) -> Result<Vec<(f64, Vec<bool>)>> {
    seeds.validate(net)?;
    let ic: Vec<IcEdge> = net
        .layers()
        .iter()
        .filter(|l| l.model() == ModelKind::IC && layers.contains(l.id()))
        .flat_map(|l| {
            l.edges().iter().map(move |e| IcEdge {
                layer: l.id(),
                src: e.src as usize,
                dst: e.dst as usize,
                p: e.weight,
            })
        })
        .collect();
    if ic.len() > EXACT_IC_EDGE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "{} IC edges exceed the exact-oracle limit of {EXACT_IC_EDGE_GUARD}; use Monte Carlo estimation",
            ic.len()
        )));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << ic.len()) {
        let mut weight = 1.0;
        for (j, e) in ic.iter().enumerate() {
            weight *= if mask & (1 << j) != 0 { e.p } else { 1.0 - e.p };
        }
        if weight == 0.0 {
            continue;
        }
        let live: Vec<&IcEdge> = ic
            .iter()
            .enumerate()
            .filter(|(j, _)| mask & (1 << j) != 0)
            .map(|(_, e)| e)
            .collect();
        out.push((weight, closure(net, seeds, layers, &live)));
    }
    Ok(out)
}

fn closure(net: &MultiplexNetwork, seeds: &SeedSet, layers: LayerSet, live: &[&IcEdge]) -> Vec<bool> {
    let n = net.num_nodes();
    let mut active = vec![false; n];
    for s in seeds.iter() {
        active[s as usize] = true;
    }
    loop {
        let mut changed = false;
        for e in live {
            debug_assert!(layers.contains(e.layer));
            if active[e.src] && !active[e.dst] {
                active[e.dst] = true;
                changed = true;
            }
        }
        for layer in net.layers() {
            if layer.model() != ModelKind::LT || !layers.contains(layer.id()) {
                continue;
            }
            let mut incoming = vec![0.0; n];
            for e in layer.edges() {
                if active[e.src as usize] {
                    incoming[e.dst as usize] += e.weight;
                }
            }
            for v in 0..n {
                if !active[v] && layer.is_member(v as NodeId) {
                    let zeta = layer.threshold(v as NodeId).unwrap();
                    if incoming[v] >= zeta - 1e-12 {
                        active[v] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return active;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::LayerSpec;
    use crate::propagation::simulate_once;

    #[test]
    fn two_edge_chain() {
        let net = MultiplexNetwork::new(
            3,
            vec![LayerSpec::new(ModelKind::IC).edge(0, 1, 0.5).edge(1, 2, 0.5)],
        )
        .unwrap();
        let s = exact_spread(&net, &SeedSet::from_nodes([0])).unwrap();
        assert!((s - 1.75).abs() < 1e-15);
        let p = exact_activation_probabilities(&net, &SeedSet::from_nodes([0]), net.all_layers()).unwrap();
        assert_eq!(p, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn lt_only_equals_one_simulation() {
        let net = MultiplexNetwork::new(
            4,
            vec![LayerSpec::new(ModelKind::LT)
                .edge(0, 1, 0.7)
                .edge(1, 2, 0.4)
                .edge(3, 2, 0.6)
                .threshold(1, 0.6)
                .threshold(2, 0.5)],
        )
        .unwrap();
        let seeds = SeedSet::from_nodes([0]);
        let exact = exact_spread(&net, &seeds).unwrap();
        let sim = simulate_once(&net, &seeds, 11).unwrap();
        assert_eq!(exact, sim.activated.len() as f64);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let mut spec = LayerSpec::new(ModelKind::IC);
        for v in 1..18 {
            spec = spec.edge(0, v, 0.5);
        }
        let net = MultiplexNetwork::new(18, vec![spec]).unwrap();
        assert!(matches!(
            exact_spread(&net, &SeedSet::from_nodes([0])),
            Err(Error::GuardExceeded(_))
        ));
    }
}
