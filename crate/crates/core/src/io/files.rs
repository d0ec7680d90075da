use serde::{Deserialize, Serialize};

use crate::actions::{ActionSpace, LocalTable};
use crate::dynamics::PlayingScheme;
use crate::error::{Error, Result};
use crate::game::{AnyGame, Game, GraphicalGame, HypergraphicalGame};
use crate::graph::{Graph, Hypergraph};
use crate::potential::GibbsPotential;

pub const FORMAT_VERSION: u32 = 1;

/// Table over `scope` in row-major mixed radix, smallest node most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<usize>,
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Graphical,
    Hypergraphical,
    GibbsPotential,
    Scheme,
}

/// On-disk form of games, Gibbs potentials and playing schemes.
///
/// Graphical games and schemes list `edges`; hypergraphical games list
/// `hyperedges`; potentials list `edges` and one table per clique in
/// `cliques`. Payoff tables of graphical games range over the closed
/// neighborhood, scheme tables over the open neighborhood followed by the
/// player's own action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub kind: FileKind,
    pub n: usize,
    pub actions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperedges: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<TableEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<Vec<TableEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditionals: Option<Vec<TableEntry>>,
}

/// Parsed content of a [`ModelFile`].
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Game(AnyGame),
    Potential(GibbsPotential),
    Scheme(PlayingScheme),
}

fn field<T>(value: Option<T>, kind: FileKind, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parse(format!("{kind:?} file is missing field `{name}`")))
}

fn forbid<T>(value: &Option<T>, kind: FileKind, name: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::Parse(format!("{kind:?} file may not contain field `{name}`")));
    }
    Ok(())
}

fn at(section: &str, k: usize, err: Error) -> Error {
    Error::Parse(format!("{section}[{k}]: {err}"))
}

fn graph_of(n: usize, edges: Vec<[usize; 2]>) -> Result<Graph> {
    Graph::new(n, edges.into_iter().map(|[a, b]| (a, b))).map_err(|e| Error::Parse(format!("edges: {e}")))
}

fn edges_of(graph: &Graph) -> Vec<[usize; 2]> {
    graph.edges().into_iter().map(|(a, b)| [a, b]).collect()
}

fn entry(player: Option<usize>, t: &LocalTable) -> TableEntry {
    TableEntry {
        player,
        scope: t.scope().to_vec(),
        table: t.values().to_vec(),
    }
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }

    pub fn into_model(self) -> Result<Model> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.actions.len() != self.n {
            return Err(Error::Parse(format!(
                "actions: {} sizes listed for n = {}",
                self.actions.len(),
                self.n
            )));
        }
        let actions = ActionSpace::new(self.actions).map_err(|e| Error::Parse(format!("actions: {e}")))?;
        let kind = self.kind;
        match kind {
            FileKind::Graphical => {
                forbid(&self.hyperedges, kind, "hyperedges")?;
                forbid(&self.cliques, kind, "cliques")?;
                forbid(&self.conditionals, kind, "conditionals")?;
                let graph = graph_of(self.n, field(self.edges, kind, "edges")?)?;
                let mut local: Vec<Option<LocalTable>> = vec![None; self.n];
                for (k, e) in field(self.payoffs, kind, "payoffs")?.into_iter().enumerate() {
                    let i = e.player.ok_or_else(|| Error::Parse(format!("payoffs[{k}]: missing `player`")))?;
                    if i >= self.n {
                        return Err(Error::Parse(format!("payoffs[{k}]: player {i} out of range")));
                    }
                    let expected = graph.closed_neighborhood(i);
                    if e.scope != expected {
                        return Err(Error::Parse(format!(
                            "payoffs[{k}]: scope {:?} of player {i} must be its closed neighborhood {expected:?}",
                            e.scope
                        )));
                    }
                    let t = LocalTable::new(e.scope, &actions, e.table).map_err(|err| at("payoffs", k, err))?;
                    if local[i].replace(t).is_some() {
                        return Err(Error::Parse(format!("payoffs[{k}]: duplicate table for player {i}")));
                    }
                }
                let local = local
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.ok_or_else(|| {
                            Error::Parse(format!(
                                "missing payoff table for player {i} with scope {:?}",
                                graph.closed_neighborhood(i)
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Model::Game(AnyGame::Graphical(GraphicalGame::new(graph, actions, local)?)))
            }
            FileKind::Hypergraphical => {
                forbid(&self.edges, kind, "edges")?;
                forbid(&self.cliques, kind, "cliques")?;
                forbid(&self.conditionals, kind, "conditionals")?;
                let hg = Hypergraph::new(self.n, field(self.hyperedges, kind, "hyperedges")?)
                    .map_err(|e| Error::Parse(format!("hyperedges: {e}")))?;
                let tables = field(self.payoffs, kind, "payoffs")?
                    .into_iter()
                    .enumerate()
                    .map(|(k, e)| {
                        let i = e.player.ok_or_else(|| Error::Parse(format!("payoffs[{k}]: missing `player`")))?;
                        let t = LocalTable::new(e.scope, &actions, e.table).map_err(|err| at("payoffs", k, err))?;
                        Ok((i, t))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let game = HypergraphicalGame::new(hg, actions, tables).map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Model::Game(AnyGame::Hypergraphical(game)))
            }
            FileKind::GibbsPotential => {
                forbid(&self.hyperedges, kind, "hyperedges")?;
                forbid(&self.payoffs, kind, "payoffs")?;
                forbid(&self.conditionals, kind, "conditionals")?;
                let graph = graph_of(self.n, field(self.edges, kind, "edges")?)?;
                let cliques = field(self.cliques, kind, "cliques")?
                    .into_iter()
                    .enumerate()
                    .map(|(k, e)| {
                        if e.player.is_some() {
                            return Err(Error::Parse(format!("cliques[{k}]: unexpected `player`")));
                        }
                        LocalTable::new(e.scope, &actions, e.table).map_err(|err| at("cliques", k, err))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let gp = GibbsPotential::new(graph, actions, cliques).map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Model::Potential(gp))
            }
            FileKind::Scheme => {
                forbid(&self.hyperedges, kind, "hyperedges")?;
                forbid(&self.payoffs, kind, "payoffs")?;
                forbid(&self.cliques, kind, "cliques")?;
                let graph = graph_of(self.n, field(self.edges, kind, "edges")?)?;
                let mut probs: Vec<Option<Vec<f64>>> = vec![None; self.n];
                for (k, e) in field(self.conditionals, kind, "conditionals")?.into_iter().enumerate() {
                    let i = e.player.ok_or_else(|| Error::Parse(format!("conditionals[{k}]: missing `player`")))?;
                    if i >= self.n {
                        return Err(Error::Parse(format!("conditionals[{k}]: player {i} out of range")));
                    }
                    if e.scope != graph.neighbors(i) {
                        return Err(Error::Parse(format!(
                            "conditionals[{k}]: scope {:?} of player {i} must be its neighbors {:?}",
                            e.scope,
                            graph.neighbors(i)
                        )));
                    }
                    if probs[i].replace(e.table).is_some() {
                        return Err(Error::Parse(format!("conditionals[{k}]: duplicate table for player {i}")));
                    }
                }
                let probs = probs
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.ok_or_else(|| {
                            Error::Parse(format!(
                                "missing conditional table for player {i} with scope {:?}",
                                graph.neighbors(i)
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let scheme = PlayingScheme::new(graph, actions, probs).map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Model::Scheme(scheme))
            }
        }
    }

    pub fn from_model(model: &Model) -> Self {
        match model {
            Model::Game(AnyGame::Graphical(g)) => Self::from_graphical(g),
            Model::Game(AnyGame::Hypergraphical(h)) => Self::from_hypergraphical(h),
            Model::Potential(gp) => Self::from_potential(gp),
            Model::Scheme(s) => Self::from_scheme(s),
        }
    }

    fn base(kind: FileKind, actions: &ActionSpace) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            kind,
            n: actions.n(),
            actions: actions.sizes().to_vec(),
            edges: None,
            hyperedges: None,
            payoffs: None,
            cliques: None,
            conditionals: None,
        }
    }

    pub fn from_graphical(g: &GraphicalGame) -> Self {
        Self {
            edges: Some(edges_of(g.graph())),
            payoffs: Some(
                g.local_payoffs()
                    .iter()
                    .enumerate()
                    .map(|(i, t)| entry(Some(i), t))
                    .collect(),
            ),
            ..Self::base(FileKind::Graphical, g.actions())
        }
    }

    /// Tables are listed by hyperedge, then by member.
    pub fn from_hypergraphical(h: &HypergraphicalGame) -> Self {
        let mut payoffs = Vec::new();
        for (k, e) in h.hypergraph().hyperedges().iter().enumerate() {
            for &i in e {
                payoffs.push(entry(Some(i), h.table(i, k).expect("validated game")));
            }
        }
        Self {
            hyperedges: Some(h.hypergraph().hyperedges().to_vec()),
            payoffs: Some(payoffs),
            ..Self::base(FileKind::Hypergraphical, h.actions())
        }
    }

    pub fn from_potential(gp: &GibbsPotential) -> Self {
        Self {
            edges: Some(edges_of(gp.graph())),
            cliques: Some(gp.cliques().iter().map(|t| entry(None, t)).collect()),
            ..Self::base(FileKind::GibbsPotential, gp.actions())
        }
    }

    pub fn from_scheme(s: &PlayingScheme) -> Self {
        Self {
            edges: Some(edges_of(s.graph())),
            conditionals: Some(
                (0..s.n())
                    .map(|i| TableEntry {
                        player: Some(i),
                        scope: s.graph().neighbors(i).to_vec(),
                        table: s.table(i).to_vec(),
                    })
                    .collect(),
            ),
            ..Self::base(FileKind::Scheme, s.actions())
        }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    ModelFile::from_json(text)?.into_model()
}

pub fn write_model(model: &Model) -> String {
    ModelFile::from_model(model).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::coordination_game;

    #[test]
    fn coordination_roundtrip() {
        let m = Model::Game(AnyGame::Graphical(coordination_game()));
        let text = write_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
        assert_eq!(write_model(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn decimal_payoffs_roundtrip_exactly() {
        let a = ActionSpace::uniform(2, 2).unwrap();
        let vals = [0.1, -1.0 / 3.0, 1e-300, 12345.678901234567];
        let g = GraphicalGame::from_fn(Graph::complete(2), a, |i, x| vals[2 * x[0] + x[1]] + i as f64).unwrap();
        let m = Model::Game(AnyGame::Graphical(g));
        assert_eq!(parse_model(&write_model(&m)).unwrap(), m);
    }

    #[test]
    fn missing_table_names_player_and_scope() {
        let text = r#"{"format_version":1,"kind":"graphical","n":2,"actions":[2,2],"edges":[[0,1]],
            "payoffs":[{"player":0,"scope":[0,1],"table":[1,0,0,1]}]}"#;
        let err = parse_model(text).unwrap_err().to_string();
        assert!(err.contains("player 1") && err.contains("[0, 1]"), "{err}");
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_model("{\n  \"format_version\": 1,\n  oops\n}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn wrong_table_length_is_located() {
        let text = r#"{"format_version":1,"kind":"graphical","n":2,"actions":[2,2],"edges":[[0,1]],
            "payoffs":[{"player":0,"scope":[0,1],"table":[1,0,0,1]},
                       {"player":1,"scope":[0,1],"table":[1,0,0]}]}"#;
        let err = parse_model(text).unwrap_err().to_string();
        assert!(err.contains("payoffs[1]"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"format_version":1,"kind":"scheme","n":1,"actions":[2],"edges":[],
            "conditionals":[{"player":0,"scope":[],"table":[0.5,0.5]}],"extra":1}"#;
        assert!(parse_model(text).is_err());
    }
}
