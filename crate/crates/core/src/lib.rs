//! Influence maximization on multiplex networks.
//!
//! A multiplex network is a set of diffusion layers (independent cascade or
//! linear threshold) over one node universe; a node activated in any layer is
//! active in every layer it belongs to. Seeds are chosen in two phases: each
//! layer gets greedy seed prefixes whose multiplex spreads feed a
//! multiple-choice knapsack that splits the budget, then layers are revisited
//! one at a time with a reward that discounts nodes which Chow-Liu trees
//! fitted on earlier layers predict are already reached.

pub mod error;
pub mod exact;
pub mod experiment;
pub mod generate;
pub mod io;
pub mod mckp;
pub mod network;
pub mod objective;
pub mod pgm;
pub mod propagation;
pub mod reasoner;
pub mod seeding;

pub use error::{Error, Result};
pub use network::{LayerId, LayerSet, ModelKind, MultiplexNetwork, NodeId, SeedSet};
