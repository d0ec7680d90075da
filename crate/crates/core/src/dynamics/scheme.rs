use crate::actions::{decode_local, ActionSpace};
use crate::error::{Error, Result};
use crate::game::{validate_weights, Game};
use crate::graph::Graph;
use crate::potential::TransformWitness;
use crate::settings::Settings;

/// Row sums of a scheme must be within this distance of one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Local Markov playing procedure: for every player, a strictly positive
/// conditional distribution over its actions given the last actions of its
/// graph neighbors.
///
/// Row `c` of player `i` holds `p_i(· | x_{𝒩(i)})` for the neighbor
/// configuration with mixed-radix index `c` (neighbors ascending, smallest
/// most significant); the table is stored flat as `c * |A_i| + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayingScheme {
    graph: Graph,
    actions: ActionSpace,
    radices: Vec<Vec<usize>>,
    probs: Vec<Vec<f64>>,
}

impl PlayingScheme {
    pub fn new(graph: Graph, actions: ActionSpace, probs: Vec<Vec<f64>>) -> Result<Self> {
        let radices = check_shape(&graph, &actions, &probs)?;
        for (i, table) in probs.iter().enumerate() {
            let k = actions.size(i);
            for (c, row) in table.chunks(k).enumerate() {
                if let Some(a) = row.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
                    return Err(Error::Invalid(format!(
                        "p_{i}({a} | config {c}) = {} is not strictly positive",
                        row[a]
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::Invalid(format!(
                        "conditional of player {i} at config {c} sums to {sum}"
                    )));
                }
            }
        }
        Ok(Self {
            graph,
            actions,
            radices,
            probs,
        })
    }

    /// Normalizes each row of unnormalized log-probabilities.
    pub fn from_log_weights(graph: Graph, actions: ActionSpace, logits: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&graph, &actions, &logits)?;
        let probs = logits
            .into_iter()
            .enumerate()
            .map(|(i, table)| {
                table
                    .chunks(actions.size(i))
                    .flat_map(softmax)
                    .collect::<Vec<f64>>()
            })
            .collect();
        Self::new(graph, actions, probs)
    }

    pub fn uniform(graph: Graph, actions: ActionSpace) -> Result<Self> {
        let logits = (0..actions.n())
            .map(|i| {
                let configs: usize = actions.scope_count(graph.neighbors(i));
                vec![0.0; configs * actions.size(i)]
            })
            .collect();
        Self::from_log_weights(graph, actions, logits)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn n(&self) -> usize {
        self.actions.n()
    }

    pub fn config_count(&self, i: usize) -> usize {
        self.radices[i].iter().product()
    }

    /// Neighbor configuration index of player `i` in the full joint action `x`.
    pub fn config_index(&self, i: usize, x: &[usize]) -> usize {
        self.graph
            .neighbors(i)
            .iter()
            .zip(&self.radices[i])
            .fold(0, |acc, (&j, &r)| acc * r + x[j])
    }

    /// Neighbor actions of configuration `c`, in neighbor order.
    pub fn config(&self, i: usize, c: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices[i].len()];
        decode_local(&self.radices[i], c, &mut out);
        out
    }

    /// `p_i(· | x_{𝒩(i)})` read off the full joint action `x`.
    pub fn conditional(&self, i: usize, x: &[usize]) -> &[f64] {
        self.row(i, self.config_index(i, x))
    }

    pub fn row(&self, i: usize, c: usize) -> &[f64] {
        let k = self.actions.size(i);
        &self.probs[i][c * k..(c + 1) * k]
    }

    pub fn table(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }
}

fn check_shape(graph: &Graph, actions: &ActionSpace, tables: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if graph.n() != actions.n() || tables.len() != actions.n() {
        return Err(Error::Invalid(format!(
            "scheme needs one table per player: graph {} nodes, {} players, {} tables",
            graph.n(),
            actions.n(),
            tables.len()
        )));
    }
    let radices: Vec<Vec<usize>> = (0..graph.n())
        .map(|i| graph.neighbors(i).iter().map(|&j| actions.size(j)).collect())
        .collect();
    for (i, table) in tables.iter().enumerate() {
        let expected = radices[i].iter().product::<usize>() * actions.size(i);
        if table.len() != expected {
            return Err(Error::Invalid(format!(
                "conditional table of player {i} has {} entries, expected {expected}",
                table.len()
            )));
        }
    }
    Ok(radices)
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(logits);
    logits.iter().map(|v| (v - z).exp()).collect()
}

fn neighbor_configs<G: Game>(game: &G, i: usize, settings: &Settings) -> Result<(Vec<usize>, usize)> {
    let nbrs = game.graph().neighbors(i).to_vec();
    let count = nbrs
        .iter()
        .try_fold(game.actions().size(i) as u128, |acc, &j| {
            acc.checked_mul(game.actions().size(j) as u128)
        })
        .unwrap_or(u128::MAX);
    if count > settings.joint_cap as u128 {
        return Err(Error::CapExceeded {
            required: count,
            cap: settings.joint_cap,
        });
    }
    let configs = count as usize / game.actions().size(i);
    Ok((nbrs, configs))
}

/// Visits every neighbor configuration of `i` with a joint action whose
/// entries outside `𝒩(i)` are zero, collecting one row per configuration.
fn per_config<G, F>(game: &G, i: usize, settings: &Settings, mut row: F) -> Result<Vec<f64>>
where
    G: Game,
    F: FnMut(&mut Vec<usize>) -> Result<Vec<f64>>,
{
    let (nbrs, configs) = neighbor_configs(game, i, settings)?;
    let radices: Vec<usize> = nbrs.iter().map(|&j| game.actions().size(j)).collect();
    let mut local = vec![0; nbrs.len()];
    let mut x = vec![0; game.n()];
    let mut out = Vec::with_capacity(configs * game.actions().size(i));
    for c in 0..configs {
        decode_local(&radices, c, &mut local);
        for (&j, &a) in nbrs.iter().zip(&local) {
            x[j] = a;
        }
        out.extend(row(&mut x)?);
    }
    Ok(out)
}

/// Smooth best response with a linear transform of slope `1/w_i`:
/// `p_i(a | x_{𝒩(i)}) ∝ exp(M_i(a, x_{𝒩(i)}) / w_i)`, normalized in the log
/// domain.
pub fn sbr_scheme<G: Game>(game: &G, w: &[f64], settings: &Settings) -> Result<PlayingScheme> {
    validate_weights(game.n(), w)?;
    let logits = (0..game.n())
        .map(|i| {
            per_config(game, i, settings, |x| {
                let row = (0..game.actions().size(i))
                    .map(|a| {
                        x[i] = a;
                        game.payoff(i, x) / w[i]
                    })
                    .collect();
                x[i] = 0;
                Ok(row)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PlayingScheme::from_log_weights(game.graph().clone(), game.actions().clone(), logits)
}

/// Smooth best-response-difference scheme driven by the inverse transforms
/// tabulated in `witness`:
/// `p_i(a | x_{𝒩(i)}) = 1 / Σ_{a'} exp(f_i⁻¹(M_i(a') − M_i(a)))`.
pub fn sbrd_scheme<G: Game>(
    game: &G,
    witness: &TransformWitness,
    settings: &Settings,
) -> Result<PlayingScheme> {
    if witness.n() != game.n()
        || (0..game.n()).any(|i| witness.neighbors(i) != game.graph().neighbors(i))
    {
        return Err(Error::Invalid(
            "transform witness does not match the game graph".into(),
        ));
    }
    let log_probs = (0..game.n())
        .map(|i| {
            per_config(game, i, settings, |x| {
                let k = game.actions().size(i);
                let c = witness.config_index(i, x);
                let m: Vec<f64> = (0..k)
                    .map(|a| {
                        x[i] = a;
                        game.payoff(i, x)
                    })
                    .collect();
                x[i] = 0;
                (0..k)
                    .map(|a| {
                        let exponents = (0..k)
                            .map(|b| {
                                let dm = m[b] - m[a];
                                witness.inverse(i, c, dm).ok_or(Error::MissingDifference {
                                    player: i,
                                    difference: dm,
                                })
                            })
                            .collect::<Result<Vec<f64>>>()?;
                        Ok(-log_sum_exp(&exponents))
                    })
                    .collect()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PlayingScheme::from_log_weights(game.graph().clone(), game.actions().clone(), log_probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{coordination_game, matching_pennies};
    use crate::potential::{check_transformed_potential, find_exact_potential};

    #[test]
    fn coordination_sbr_closed_form() {
        let s = Settings::default();
        let p = sbr_scheme(&coordination_game(), &[1.0, 1.0], &s).unwrap();
        let e = std::f64::consts::E;
        assert!((p.conditional(0, &[0, 0])[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((p.conditional(0, &[0, 0])[0] - 0.731059).abs() < 1e-6);
        assert!((p.conditional(1, &[0, 0])[1] - 1.0 / (e + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn constant_rows_are_uniform() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![3, 2]).unwrap();
        let g = crate::game::GraphicalGame::from_fn(Graph::complete(2), a, |i, x| x[1 - i] as f64)
            .unwrap();
        let p = sbr_scheme(&g, &[0.7, 2.0], &s).unwrap();
        for &v in p.table(0) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_payoffs_and_weights_together_is_invisible() {
        let s = Settings::default();
        let g = matching_pennies();
        let p1 = sbr_scheme(&g, &[1.0, 0.5], &s).unwrap();
        let p2 = sbr_scheme(&g.scaled(&[2.0, 2.0]).unwrap(), &[2.0, 1.0], &s).unwrap();
        for i in 0..2 {
            for (a, b) in p1.table(i).iter().zip(p2.table(i)) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_sbrd_matches_sbr() {
        let s = Settings::default();
        let g = coordination_game();
        let psi = find_exact_potential(&g, &s).unwrap().unwrap();
        let witness = check_transformed_potential(&g, &psi, &s).unwrap().unwrap();
        let sbrd = sbrd_scheme(&g, &witness, &s).unwrap();
        let sbr = sbr_scheme(&g, &[1.0, 1.0], &s).unwrap();
        for i in 0..2 {
            for (a, b) in sbrd.table(i).iter().zip(sbr.table(i)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_differences_give_uniform_rows() {
        let s = Settings::default();
        let a = ActionSpace::uniform(2, 3).unwrap();
        let g = crate::game::GraphicalGame::from_fn(Graph::complete(2), a, |_, _| 4.0).unwrap();
        let psi = find_exact_potential(&g, &s).unwrap().unwrap();
        let witness = check_transformed_potential(&g, &psi, &s).unwrap().unwrap();
        let p = sbrd_scheme(&g, &witness, &s).unwrap();
        assert!(p.table(1).iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn validation() {
        let g = Graph::complete(2);
        let a = ActionSpace::uniform(2, 2).unwrap();
        let ok = vec![vec![0.5; 4], vec![0.25, 0.75, 0.5, 0.5]];
        assert!(PlayingScheme::new(g.clone(), a.clone(), ok).is_ok());
        let zero = vec![vec![1.0, 0.0, 0.5, 0.5], vec![0.5; 4]];
        assert!(PlayingScheme::new(g.clone(), a.clone(), zero).is_err());
        let unnormalized = vec![vec![0.6, 0.6, 0.5, 0.5], vec![0.5; 4]];
        assert!(PlayingScheme::new(g.clone(), a.clone(), unnormalized).is_err());
        let short = vec![vec![0.5; 2], vec![0.5; 4]];
        assert!(PlayingScheme::new(g, a, short).is_err());
    }

    #[test]
    fn large_payoffs_do_not_overflow() {
        let s = Settings::default();
        let g = coordination_game().scaled(&[1e4, 1e4]).unwrap();
        let p = sbr_scheme(&g, &[1.0, 1.0], &s);
        // exp(-1e4) underflows to zero, which a scheme may not contain.
        assert!(p.is_err());
        let p = sbr_scheme(&g, &[1e3, 1e3], &s).unwrap();
        assert!(p.table(0).iter().all(|v| v.is_finite() && *v > 0.0));
    }
}
