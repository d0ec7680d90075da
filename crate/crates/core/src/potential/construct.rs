use crate::error::{Error, Result};
use crate::game::{Game, HypergraphicalGame};
use crate::graph::Hypergraph;
use crate::potential::GibbsPotential;

/// Hyperedge-symmetric game with one hyperedge per clique of `gp`, where
/// every member of clique `C` receives the local potential `φ_C` as payoff.
///
/// Any game for which `gp` recomposes to a `w`-potential is `w`-scaled
/// payoff-difference equivalent to the flattening of this game.
pub fn symmetric_hypergraphical_from_potential(gp: &GibbsPotential) -> Result<HypergraphicalGame> {
    let hyperedges = gp.cliques().iter().map(|t| t.scope().to_vec()).collect();
    let hypergraph = Hypergraph::new(gp.actions().n(), hyperedges)?;
    HypergraphicalGame::symmetric(hypergraph, gp.actions().clone(), gp.cliques().to_vec())
}

/// Gibbs potential over the primal graph with `φ_C = M'_C` for each hyperedge.
/// Its recomposition is an exact potential of the game.
pub fn potential_from_symmetric(hg: &HypergraphicalGame) -> Result<GibbsPotential> {
    if let Some((hyperedge, players)) = hg.symmetry_violation(0.0) {
        return Err(Error::NotSymmetric { hyperedge, players });
    }
    let cliques = hg
        .hypergraph()
        .hyperedges()
        .iter()
        .enumerate()
        .map(|(k, e)| hg.table(e[0], k).expect("validated game").clone())
        .collect();
    GibbsPotential::new(hg.graph().clone(), hg.actions().clone(), cliques)
}

/// Pairwise-symmetric polymatrix game for a potential on a graph whose
/// neighborhoods are totally disconnected.
pub fn to_pairwise_polymatrix(gp: &GibbsPotential) -> Result<HypergraphicalGame> {
    if let Some((node, pair)) = gp.graph().adjacent_neighbor_pair() {
        return Err(Error::Neighborhood { node, pair });
    }
    let game = symmetric_hypergraphical_from_potential(gp)?;
    debug_assert!(game.is_polymatrix());
    Ok(game)
}
