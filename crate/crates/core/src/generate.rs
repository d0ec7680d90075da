//! Random instances for tests, benchmarks and experiments.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::actions::{ActionSpace, LocalTable};
use crate::dynamics::PlayingScheme;
use crate::error::Result;
use crate::game::{validate_weights, Game, GraphicalGame, HypergraphicalGame};
use crate::graph::{Graph, Hypergraph};
use crate::potential::GibbsPotential;

/// Erdős–Rényi graph: each pair is an edge with probability `p`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, edges).expect("valid edges")
}

/// Uniform random recursive tree: node `k` attaches to a uniform earlier node.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|k| (rng.random_range(0..k), k)).collect();
    Graph::new(n, edges).expect("valid edges")
}

fn uniform_table<R: Rng>(
    scope: Vec<usize>,
    actions: &ActionSpace,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> LocalTable {
    LocalTable::from_fn(scope, actions, |_| rng.random_range(lo..=hi)).expect("valid scope")
}

/// Potential with one table per maximal clique, entries uniform in `[lo, hi]`.
pub fn random_gibbs_potential<R: Rng>(
    graph: &Graph,
    actions: &ActionSpace,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> GibbsPotential {
    let cliques = graph
        .maximal_cliques()
        .iter()
        .map(|c| uniform_table(c.clone(), actions, lo, hi, rng))
        .collect();
    GibbsPotential::new(graph.clone(), actions.clone(), cliques).expect("tables on maximal cliques")
}

/// Up to `edges` distinct hyperedges of size `1..=max_size`, nodes uniform.
pub fn random_hypergraph<R: Rng>(n: usize, edges: usize, max_size: usize, rng: &mut R) -> Hypergraph {
    let nodes: Vec<usize> = (0..n).collect();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    for _ in 0..edges {
        let size = rng.random_range(1..=max_size.min(n));
        let mut e: Vec<usize> = nodes.choose_multiple(rng, size).copied().collect();
        e.sort_unstable();
        if !chosen.contains(&e) {
            chosen.push(e);
        }
    }
    Hypergraph::new(n, chosen).expect("distinct non-empty hyperedges")
}

/// Hyperedge-symmetric game with one shared table per hyperedge, entries
/// uniform in `[lo, hi]`.
pub fn random_symmetric_game<R: Rng>(
    hypergraph: &Hypergraph,
    actions: &ActionSpace,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> HypergraphicalGame {
    let shared = hypergraph
        .hyperedges()
        .iter()
        .map(|e| uniform_table(e.clone(), actions, lo, hi, rng))
        .collect();
    HypergraphicalGame::symmetric(hypergraph.clone(), actions.clone(), shared).expect("valid tables")
}

/// Game on the graph of `gp` with `M_i(x) = w_i Σ_{C ∋ i} φ_C(x_C) + η_i(x_{𝒩(i)})`,
/// where `η_i` ignores player `i`'s own action and has entries uniform in
/// `[−noise, noise]`. The recomposition of `gp` is a `w`-potential for it.
pub fn weighted_potential_game<R: Rng>(
    gp: &GibbsPotential,
    w: &[f64],
    noise: f64,
    rng: &mut R,
) -> Result<GraphicalGame> {
    let graph = gp.graph();
    let actions = gp.actions();
    validate_weights(graph.n(), w)?;
    let noise_tables: Vec<LocalTable> = (0..graph.n())
        .map(|i| {
            let scope = graph.neighbors(i).to_vec();
            LocalTable::from_fn(scope, actions, |_| {
                if noise > 0.0 {
                    rng.random_range(-noise..=noise)
                } else {
                    0.0
                }
            })
        })
        .collect::<Result<_>>()?;
    let own: Vec<Vec<&LocalTable>> = (0..graph.n())
        .map(|i| {
            gp.cliques()
                .iter()
                .filter(|t| t.scope().binary_search(&i).is_ok())
                .collect()
        })
        .collect();
    GraphicalGame::from_fn(graph.clone(), actions.clone(), |i, x| {
        let phi: f64 = own[i].iter().map(|t| t.eval(x)).sum();
        w[i] * phi + noise_tables[i].eval(x)
    })
}

/// Weights uniform in `[lo, hi]`.
pub fn random_weights<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..=hi)).collect()
}

/// Scheme whose rows are softmaxes of logits uniform in `[−scale, scale]`.
pub fn random_scheme<R: Rng>(
    graph: &Graph,
    actions: &ActionSpace,
    scale: f64,
    rng: &mut R,
) -> Result<PlayingScheme> {
    let logits = (0..graph.n())
        .map(|i| {
            let len = actions.scope_count(graph.neighbors(i)) * actions.size(i);
            (0..len).map(|_| rng.random_range(-scale..=scale)).collect()
        })
        .collect();
    PlayingScheme::from_log_weights(graph.clone(), actions.clone(), logits)
}

/// Copy of `game` with entry `k` of player `i`'s local table shifted by `delta`.
pub fn perturb(game: &GraphicalGame, i: usize, k: usize, delta: f64) -> Result<GraphicalGame> {
    let mut local = game.local_payoffs().to_vec();
    local[i].values_mut()[k] += delta;
    GraphicalGame::new(game.graph().clone(), game.actions().clone(), local)
}

/// Uniform random joint action.
pub fn random_joint_action<R: Rng>(actions: &ActionSpace, rng: &mut R) -> Vec<usize> {
    actions.sizes().iter().map(|&k| rng.random_range(0..k)).collect()
}

/// Uniformly shuffled node labels applied to `graph`.
pub fn relabel<R: Rng>(graph: &Graph, rng: &mut R) -> Graph {
    let mut perm: Vec<usize> = (0..graph.n()).collect();
    perm.shuffle(rng);
    Graph::new(graph.n(), graph.edges().into_iter().map(|(a, b)| (perm[a], perm[b]))).expect("valid edges")
}
