//! Graphical and hypergraphical games with explicit local payoff tables.

use std::collections::BTreeMap;

use crate::actions::{ActionSpace, LocalTable};
use crate::error::{Error, Result};
use crate::graph::{Graph, Hypergraph};
use crate::par;
use crate::settings::Settings;

/// A finite game whose payoffs respect an interaction graph: `payoff(i, x)`
/// depends only on the actions of the closed neighborhood of `i`.
pub trait Game: Sync {
    fn actions(&self) -> &ActionSpace;

    /// Interaction graph. For hypergraphical games this is the primal graph.
    fn graph(&self) -> &Graph;

    fn payoff(&self, i: usize, x: &[usize]) -> f64;

    fn n(&self) -> usize {
        self.actions().n()
    }
}

/// Payoffs of player `i` against the opponents in `x`, one per own action.
/// `x[i]` is left at zero on return.
pub(crate) fn payoff_row<G: Game + ?Sized>(game: &G, i: usize, x: &mut [usize]) -> Vec<f64> {
    let row = (0..game.actions().size(i))
        .map(|a| {
            x[i] = a;
            game.payoff(i, x)
        })
        .collect();
    x[i] = 0;
    row
}

/// Evaluates `pred(i, x)` on every unilateral-deviation row: `x` is a joint
/// action with `x_i = 0` that the predicate may read, and may modify in
/// coordinate `i` as long as it restores it.
pub(crate) fn every_row<F>(actions: &ActionSpace, settings: &Settings, pred: F) -> Result<bool>
where
    F: Fn(usize, &mut [usize]) -> bool + Sync + Send,
{
    let total = actions.checked_count(settings.joint_cap)?;
    for i in 0..actions.n() {
        let rows = actions.row_count(total, i);
        let ok = par::all(settings.execution, rows, |r| {
            let mut x = actions.decode(actions.row_base(i, r));
            pred(i, &mut x)
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn validate_weights(n: usize, w: &[f64]) -> Result<()> {
    if w.len() != n {
        return Err(Error::Invalid(format!(
            "expected {n} weights, got {}",
            w.len()
        )));
    }
    match w.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(player) => Err(Error::NonPositiveWeight {
            player,
            weight: w[player],
        }),
        None => Ok(()),
    }
}

/// Game given by one local payoff table per player over its closed neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphicalGame {
    graph: Graph,
    actions: ActionSpace,
    local: Vec<LocalTable>,
}

impl GraphicalGame {
    pub fn new(graph: Graph, actions: ActionSpace, local: Vec<LocalTable>) -> Result<Self> {
        if graph.n() != actions.n() {
            return Err(Error::InvalidGame(format!(
                "graph has {} nodes but the action space has {} players",
                graph.n(),
                actions.n()
            )));
        }
        if local.len() != graph.n() {
            return Err(Error::InvalidGame(format!(
                "expected {} local payoff tables, got {}",
                graph.n(),
                local.len()
            )));
        }
        for (i, t) in local.iter().enumerate() {
            let expected = graph.closed_neighborhood(i);
            if t.scope() != expected.as_slice() {
                return Err(Error::InvalidGame(format!(
                    "payoff table of player {i} has scope {:?}, expected N({i}) = {expected:?}",
                    t.scope()
                )));
            }
            if t.radices() != expected.iter().map(|&j| actions.size(j)).collect::<Vec<_>>() {
                return Err(Error::InvalidGame(format!(
                    "payoff table of player {i} does not match the action space"
                )));
            }
        }
        Ok(Self {
            graph,
            actions,
            local,
        })
    }

    /// Tabulates `f(i, x)` for every player over its closed neighborhood.
    /// `x` is a full joint action whose entries outside `N(i)` are zero.
    pub fn from_fn<F>(graph: Graph, actions: ActionSpace, f: F) -> Result<Self>
    where
        F: Fn(usize, &[usize]) -> f64,
    {
        let local = (0..graph.n())
            .map(|i| {
                let scope = graph.closed_neighborhood(i);
                let mut x = vec![0; actions.n()];
                LocalTable::from_fn(scope.clone(), &actions, |l| {
                    for (&j, &a) in scope.iter().zip(l) {
                        x[j] = a;
                    }
                    f(i, &x)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, actions, local)
    }

    pub fn local_payoff(&self, i: usize) -> &LocalTable {
        &self.local[i]
    }

    pub fn local_payoffs(&self) -> &[LocalTable] {
        &self.local
    }

    /// Copy with player `i`'s payoffs multiplied by `w[i]`.
    pub fn scaled(&self, w: &[f64]) -> Result<Self> {
        validate_weights(self.n(), w)?;
        let mut out = self.clone();
        for (t, &wi) in out.local.iter_mut().zip(w) {
            t.scale(wi);
        }
        Ok(out)
    }
}

impl Game for GraphicalGame {
    fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn payoff(&self, i: usize, x: &[usize]) -> f64 {
        self.local[i].eval(x)
    }
}

/// Game whose payoffs are sums of per-hyperedge tables:
/// `M_i(x) = Σ_{C ∋ i} M'_{i,C}(x_C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphicalGame {
    hypergraph: Hypergraph,
    primal: Graph,
    actions: ActionSpace,
    /// Keyed by (player, hyperedge index).
    tables: BTreeMap<(usize, usize), LocalTable>,
    incident: Vec<Vec<usize>>,
}

impl HypergraphicalGame {
    /// `tables` lists `(player, table)` pairs; each table's scope must be a
    /// hyperedge containing the player, and every such pair must be present.
    pub fn new(
        hypergraph: Hypergraph,
        actions: ActionSpace,
        tables: Vec<(usize, LocalTable)>,
    ) -> Result<Self> {
        if hypergraph.n() != actions.n() {
            return Err(Error::InvalidGame(format!(
                "hypergraph has {} nodes but the action space has {} players",
                hypergraph.n(),
                actions.n()
            )));
        }
        let index: BTreeMap<&[usize], usize> = hypergraph
            .hyperedges()
            .iter()
            .enumerate()
            .map(|(k, e)| (e.as_slice(), k))
            .collect();
        let mut map = BTreeMap::new();
        for (player, table) in tables {
            let Some(&k) = index.get(table.scope()) else {
                return Err(Error::InvalidGame(format!(
                    "payoff table for player {player} has scope {:?}, which is not a hyperedge",
                    table.scope()
                )));
            };
            if table.scope().binary_search(&player).is_err() {
                return Err(Error::InvalidGame(format!(
                    "player {player} is not a member of hyperedge {:?}",
                    table.scope()
                )));
            }
            if map.insert((player, k), table).is_some() {
                return Err(Error::InvalidGame(format!(
                    "duplicate payoff table for player {player} on hyperedge {:?}",
                    hypergraph.hyperedges()[k]
                )));
            }
        }
        for (k, e) in hypergraph.hyperedges().iter().enumerate() {
            for &i in e {
                if !map.contains_key(&(i, k)) {
                    return Err(Error::InvalidGame(format!(
                        "missing payoff table for player {i} on hyperedge {e:?}"
                    )));
                }
            }
        }
        let incident = (0..hypergraph.n())
            .map(|i| hypergraph.incident(i).collect())
            .collect();
        Ok(Self {
            primal: hypergraph.primal_graph(),
            hypergraph,
            actions,
            tables: map,
            incident,
        })
    }

    /// Hyperedge-symmetric game: every member of hyperedge `k` uses `shared[k]`.
    pub fn symmetric(
        hypergraph: Hypergraph,
        actions: ActionSpace,
        shared: Vec<LocalTable>,
    ) -> Result<Self> {
        if shared.len() != hypergraph.hyperedges().len() {
            return Err(Error::InvalidGame(format!(
                "expected {} shared tables, got {}",
                hypergraph.hyperedges().len(),
                shared.len()
            )));
        }
        let tables = shared
            .into_iter()
            .flat_map(|t| {
                let members = t.scope().to_vec();
                members.into_iter().map(move |i| (i, t.clone()))
            })
            .collect();
        Self::new(hypergraph, actions, tables)
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    /// Table `M'_{i,C}` for player `i` on hyperedge index `k`.
    pub fn table(&self, i: usize, k: usize) -> Option<&LocalTable> {
        self.tables.get(&(i, k))
    }

    /// All `(player, hyperedge index, table)` triples ordered by player.
    pub fn tables(&self) -> impl Iterator<Item = (usize, usize, &LocalTable)> {
        self.tables.iter().map(|(&(i, k), t)| (i, k, t))
    }

    /// Every hyperedge has at most two members.
    pub fn is_polymatrix(&self) -> bool {
        self.hypergraph.hyperedges().iter().all(|e| e.len() <= 2)
    }

    /// Polymatrix and hyperedge-symmetric.
    pub fn is_pairwise_symmetric(&self) -> bool {
        self.is_polymatrix() && self.is_hyperedge_symmetric()
    }

    /// Exact entrywise equality of the member tables on every hyperedge.
    pub fn is_hyperedge_symmetric(&self) -> bool {
        self.symmetry_violation(0.0).is_none()
    }

    pub fn is_hyperedge_symmetric_within(&self, tol: f64) -> bool {
        self.symmetry_violation(tol).is_none()
    }

    /// First hyperedge whose member tables differ by more than `tol`, with
    /// the offending pair of players.
    pub fn symmetry_violation(&self, tol: f64) -> Option<(Vec<usize>, (usize, usize))> {
        self.hypergraph
            .hyperedges()
            .iter()
            .enumerate()
            .find_map(|(k, e)| {
                let first = e[0];
                let reference = &self.tables[&(first, k)];
                e[1..].iter().find_map(|&j| {
                    let other = &self.tables[&(j, k)];
                    let same = reference
                        .values()
                        .iter()
                        .zip(other.values())
                        .all(|(a, b)| (a - b).abs() <= tol);
                    (!same).then(|| (e.clone(), (first, j)))
                })
            })
    }

    /// Equivalent graphical game over the primal graph with
    /// `M'_i(x_{N(i)}) = Σ_{C ∋ i} M'_{i,C}(x_C)`.
    pub fn flatten(&self, settings: &Settings) -> Result<GraphicalGame> {
        for i in 0..self.n() {
            let scope = self.primal.closed_neighborhood(i);
            let count: u128 = scope.iter().map(|&j| self.actions.size(j) as u128).product();
            if count > settings.joint_cap as u128 {
                return Err(Error::CapExceeded {
                    required: count,
                    cap: settings.joint_cap,
                });
            }
        }
        GraphicalGame::from_fn(self.primal.clone(), self.actions.clone(), |i, x| {
            self.payoff(i, x)
        })
    }

    /// Copy with every table of player `i` multiplied by `w[i]`.
    pub fn scaled(&self, w: &[f64]) -> Result<Self> {
        validate_weights(self.n(), w)?;
        let mut out = self.clone();
        for (&(i, _), t) in out.tables.iter_mut() {
            t.scale(w[i]);
        }
        Ok(out)
    }
}

impl Game for HypergraphicalGame {
    fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    fn graph(&self) -> &Graph {
        &self.primal
    }

    fn payoff(&self, i: usize, x: &[usize]) -> f64 {
        self.incident[i]
            .iter()
            .map(|&k| self.tables[&(i, k)].eval(x))
            .sum()
    }
}

/// Either kind of game, as loaded from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGame {
    Graphical(GraphicalGame),
    Hypergraphical(HypergraphicalGame),
}

impl Game for AnyGame {
    fn actions(&self) -> &ActionSpace {
        match self {
            AnyGame::Graphical(g) => g.actions(),
            AnyGame::Hypergraphical(g) => g.actions(),
        }
    }

    fn graph(&self) -> &Graph {
        match self {
            AnyGame::Graphical(g) => g.graph(),
            AnyGame::Hypergraphical(g) => g.graph(),
        }
    }

    fn payoff(&self, i: usize, x: &[usize]) -> f64 {
        match self {
            AnyGame::Graphical(g) => g.payoff(i, x),
            AnyGame::Hypergraphical(g) => g.payoff(i, x),
        }
    }
}

impl AnyGame {
    pub fn to_graphical(&self, settings: &Settings) -> Result<GraphicalGame> {
        match self {
            AnyGame::Graphical(g) => Ok(g.clone()),
            AnyGame::Hypergraphical(h) => h.flatten(settings),
        }
    }
}

/// True iff for every player, opponent profile and pair of own actions,
/// `M¹_i(a) − M¹_i(b) = w_i (M²_i(a) − M²_i(b))` within `settings.eps`.
pub fn payoff_difference_equivalent<G1: Game, G2: Game>(
    g1: &G1,
    g2: &G2,
    w: &[f64],
    settings: &Settings,
) -> Result<bool> {
    if g1.actions() != g2.actions() {
        return Err(Error::Invalid(
            "games must share the same players and action space".into(),
        ));
    }
    validate_weights(g1.n(), w)?;
    let eps = settings.eps;
    every_row(g1.actions(), settings, |i, x| {
        let m1 = payoff_row(g1, i, x);
        let m2 = payoff_row(g2, i, x);
        (0..m1.len()).all(|a| {
            (0..a).all(|b| ((m1[a] - m1[b]) - w[i] * (m2[a] - m2[b])).abs() <= eps)
        })
    })
}

/// Two-player pure coordination game: both players get 1 when their binary
/// actions match and 0 otherwise.
pub fn coordination_game() -> GraphicalGame {
    let actions = ActionSpace::uniform(2, 2).unwrap();
    GraphicalGame::from_fn(Graph::complete(2), actions, |_, x| {
        if x[0] == x[1] {
            1.0
        } else {
            0.0
        }
    })
    .unwrap()
}

/// Matching pennies: player 0 wins (+1) on a match, player 1 wins on a mismatch.
pub fn matching_pennies() -> GraphicalGame {
    let actions = ActionSpace::uniform(2, 2).unwrap();
    GraphicalGame::from_fn(Graph::complete(2), actions, |i, x| {
        let matched = if x[0] == x[1] { 1.0 } else { -1.0 };
        if i == 0 {
            matched
        } else {
            -matched
        }
    })
    .unwrap()
}
