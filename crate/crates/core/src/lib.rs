//! Graphical potential games: detection and construction of exact,
//! weighted, ordinal and transformed potentials, clique decompositions of
//! potentials, smooth best-response play as a Gibbs sampler, and pure Nash
//! equilibria.
//!
//! Joint actions are indexed in mixed radix with player 0 most significant.
//! Enumeration-heavy routines run on rayon when the `parallel` feature is on
//! and [`Settings::execution`] is [`Execution::Parallel`].

pub mod actions;
pub mod cli;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod generate;
pub mod graph;
pub mod io;
mod par;
pub mod potential;
pub mod settings;

pub use actions::{ActionSpace, LocalTable};
pub use error::{Error, Result};
pub use game::{AnyGame, Game, GraphicalGame, HypergraphicalGame};
pub use graph::{CliqueSet, Graph, Hypergraph};
pub use potential::{GibbsPotential, GlobalPotential};
pub use settings::{Execution, Settings};
