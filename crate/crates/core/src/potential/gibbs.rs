use std::collections::BTreeSet;

use crate::actions::{decode_local, ActionSpace, LocalTable};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par;
use crate::potential::GlobalPotential;
use crate::settings::Settings;

/// Potential written as a sum of clique-local tables, `Ψ(x) = Σ_C φ_C(x_C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsPotential {
    graph: Graph,
    actions: ActionSpace,
    cliques: Vec<LocalTable>,
}

impl GibbsPotential {
    /// Every table scope must be a clique of `graph` (singletons allowed) and
    /// scopes must be distinct. Cliques need not be maximal.
    pub fn new(graph: Graph, actions: ActionSpace, cliques: Vec<LocalTable>) -> Result<Self> {
        if graph.n() != actions.n() {
            return Err(Error::Invalid(format!(
                "graph has {} nodes but the action space has {} players",
                graph.n(),
                actions.n()
            )));
        }
        let mut seen = BTreeSet::new();
        for t in &cliques {
            let scope = t.scope();
            if scope.is_empty() || !graph.is_clique(scope) {
                return Err(Error::Invalid(format!(
                    "local potential scope {scope:?} is not a clique of the graph"
                )));
            }
            if t.radices() != scope.iter().map(|&j| actions.size(j)).collect::<Vec<_>>() {
                return Err(Error::Invalid(format!(
                    "local potential over {scope:?} does not match the action space"
                )));
            }
            if !seen.insert(scope.to_vec()) {
                return Err(Error::Invalid(format!(
                    "duplicate local potential over {scope:?}"
                )));
            }
        }
        Ok(Self {
            graph,
            actions,
            cliques,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn cliques(&self) -> &[LocalTable] {
        &self.cliques
    }

    pub fn value(&self, x: &[usize]) -> f64 {
        self.cliques.iter().map(|t| t.eval(x)).sum()
    }

    /// Tabulates `Σ_C φ_C(x_C)` on the full joint-action space.
    pub fn recompose(&self, settings: &Settings) -> Result<GlobalPotential> {
        GlobalPotential::from_fn(self.actions.clone(), settings, |x| self.value(x))
    }
}

/// Output of [`decompose`]: `psi(x) = potential.value(x) + constant`, up to
/// `residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub potential: GibbsPotential,
    pub constant: f64,
    pub residual: f64,
}

/// Writes `psi` as a sum of local potentials over the maximal cliques of
/// `graph`.
///
/// Uses the canonical potentials relative to the all-zeros joint action:
/// for every clique `S`,
/// `V_S(x_S) = Σ_{U ⊆ S} (−1)^{|S∖U|} psi(x_U, 0)`, which vanishes unless
/// every coordinate of `x_S` is nonzero. Each `V_S` is added to the
/// lexicographically first maximal clique containing `S`; `V_∅ = psi(0)` is
/// returned as the constant. When `psi` is not Gibbs for `graph`, some
/// non-clique canonical term is nonzero and the recomposition misses it; the
/// error reports where the residual is largest.
pub fn decompose(psi: &GlobalPotential, graph: &Graph, settings: &Settings) -> Result<Decomposition> {
    let actions = psi.actions();
    if graph.n() != actions.n() {
        return Err(Error::Invalid(format!(
            "graph has {} nodes but the potential has {} players",
            graph.n(),
            actions.n()
        )));
    }
    let total = actions.checked_count(settings.joint_cap)?;
    let values = psi.values();
    let maximal = graph.maximal_cliques();

    let mut assigned = BTreeSet::new();
    let mut tables = Vec::with_capacity(maximal.len());
    for clique in maximal.iter() {
        let mut phi = LocalTable::zeros(clique.clone(), actions)?;
        let size = clique.len();
        for mask in 1u64..(1u64 << size) {
            let subset: Vec<usize> = (0..size)
                .filter(|&p| mask >> p & 1 == 1)
                .map(|p| clique[p])
                .collect();
            if !assigned.insert(subset.clone()) {
                continue;
            }
            let term = canonical_term(&subset, actions, values);
            add_into(&mut phi, clique, &subset, &term);
        }
        tables.push(phi);
    }
    let constant = values[0];
    let potential = GibbsPotential::new(graph.clone(), actions.clone(), tables)?;

    let (worst, residual) = par::argmax(settings.execution, total, |k| {
        let x = actions.decode(k);
        (potential.value(&x) + constant - values[k]).abs()
    })
    .expect("joint-action space is non-empty");
    if residual > settings.eps || residual.is_nan() {
        return Err(Error::NotGibbs {
            witness: actions.decode(worst),
            residual,
        });
    }
    Ok(Decomposition {
        potential,
        constant,
        residual,
    })
}

/// Canonical term `V_S` tabulated over configurations of `S` whose entries
/// are all nonzero; entry `k` uses the digits of `k` in radices `|A_j| − 1`,
/// shifted by one.
fn canonical_term(subset: &[usize], actions: &ActionSpace, psi: &[f64]) -> Vec<f64> {
    let reduced: Vec<usize> = subset.iter().map(|&j| actions.size(j) - 1).collect();
    let count: usize = reduced.iter().product();
    let size = subset.len();
    let mut digits = vec![0; size];
    (0..count)
        .map(|k| {
            decode_local(&reduced, k, &mut digits);
            let offsets: Vec<usize> = subset
                .iter()
                .zip(&digits)
                .map(|(&j, &d)| (d + 1) * actions.stride(j))
                .collect();
            (0u64..(1u64 << size))
                .map(|mask| {
                    let index: usize = (0..size)
                        .filter(|&p| mask >> p & 1 == 1)
                        .map(|p| offsets[p])
                        .sum();
                    if (size - mask.count_ones() as usize).is_multiple_of(2) {
                        psi[index]
                    } else {
                        -psi[index]
                    }
                })
                .sum()
        })
        .collect()
}

/// Adds `term` (a canonical term over `subset`) into `phi` (over `clique`).
fn add_into(phi: &mut LocalTable, clique: &[usize], subset: &[usize], term: &[f64]) {
    let positions: Vec<usize> = subset
        .iter()
        .map(|j| clique.binary_search(j).expect("subset of clique"))
        .collect();
    let radices = phi.radices().to_vec();
    let mut local = vec![0; clique.len()];
    for k in 0..phi.len() {
        decode_local(&radices, k, &mut local);
        if positions.iter().any(|&p| local[p] == 0) {
            continue;
        }
        let t = positions
            .iter()
            .fold(0, |acc, &p| acc * (radices[p] - 1) + (local[p] - 1));
        phi.values_mut()[k] += term[t];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_potential() -> GibbsPotential {
        let a = ActionSpace::uniform(3, 2).unwrap();
        let eq = |scope: Vec<usize>| {
            LocalTable::from_fn(scope, &a, |l| if l[0] == l[1] { 1.0 } else { 0.0 }).unwrap()
        };
        GibbsPotential::new(Graph::path(3), a.clone(), vec![eq(vec![0, 1]), eq(vec![1, 2])])
            .unwrap()
    }

    #[test]
    fn recompose_path_indicators() {
        let s = Settings::default();
        let psi = path_potential().recompose(&s).unwrap();
        assert_eq!(psi.value(&[0, 0, 0]), 2.0);
        assert_eq!(psi.value(&[0, 1, 0]), 0.0);
        assert_eq!(psi.value(&[0, 0, 1]), 1.0);
    }

    #[test]
    fn recompose_single_clique_and_zeros() {
        let s = Settings::default();
        let a = ActionSpace::uniform(2, 2).unwrap();
        let t = LocalTable::new(vec![0, 1], &a, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let gp = GibbsPotential::new(Graph::complete(2), a.clone(), vec![t]).unwrap();
        assert_eq!(gp.recompose(&s).unwrap().values(), &[1.0, 0.0, 0.0, 1.0]);

        let a3 = ActionSpace::uniform(3, 2).unwrap();
        let zeros = vec![
            LocalTable::zeros(vec![0, 1], &a3).unwrap(),
            LocalTable::zeros(vec![1, 2], &a3).unwrap(),
        ];
        let gp = GibbsPotential::new(Graph::path(3), a3, zeros).unwrap();
        assert!(gp.recompose(&s).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decompose_path_recovers_potential() {
        let s = Settings::default();
        let psi = path_potential().recompose(&s).unwrap();
        let d = decompose(&psi, &Graph::path(3), &s).unwrap();
        let scopes: Vec<&[usize]> = d.potential.cliques().iter().map(|t| t.scope()).collect();
        assert_eq!(scopes, vec![&[0, 1][..], &[1, 2][..]]);
        let back = d.potential.recompose(&s).unwrap().shifted(d.constant);
        for (a, b) in back.values().iter().zip(psi.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn three_way_indicator_is_not_pairwise() {
        let s = Settings::default();
        let a = ActionSpace::uniform(3, 2).unwrap();
        let psi = GlobalPotential::from_fn(a, &s, |x| {
            if x[0] == x[1] && x[1] == x[2] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        match decompose(&psi, &Graph::path(3), &s) {
            Err(Error::NotGibbs { witness, residual }) => {
                assert_eq!(witness.len(), 3);
                assert!(residual > 0.1);
            }
            other => panic!("expected NotGibbs, got {other:?}"),
        }
        // The complete graph holds any table in one clique.
        let d = decompose(&psi, &Graph::complete(3), &s).unwrap();
        assert_eq!(d.potential.cliques().len(), 1);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn rejects_non_clique_scopes() {
        let a = ActionSpace::uniform(3, 2).unwrap();
        let t = LocalTable::zeros(vec![0, 2], &a).unwrap();
        assert!(GibbsPotential::new(Graph::path(3), a, vec![t]).is_err());
    }

    #[test]
    fn multi_action_decomposition() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![3, 2, 4]).unwrap();
        let g = Graph::path(3);
        let t01 = LocalTable::from_fn(vec![0, 1], &a, |l| (l[0] as f64).sin() + l[1] as f64).unwrap();
        let t12 = LocalTable::from_fn(vec![1, 2], &a, |l| (l[0] * l[1]) as f64 * 0.3 - 1.0).unwrap();
        let t0 = LocalTable::from_fn(vec![0], &a, |l| l[0] as f64 * 2.5).unwrap();
        let gp = GibbsPotential::new(g.clone(), a, vec![t01, t12, t0]).unwrap();
        let psi = gp.recompose(&s).unwrap();
        let d = decompose(&psi, &g, &s).unwrap();
        let back = d.potential.recompose(&s).unwrap();
        assert!(back.deviation_from_constant(&psi) < 1e-12);
    }
}
