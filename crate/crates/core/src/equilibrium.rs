//! Pure Nash equilibria by enumeration, potential maximizers, and
//! deterministic best-response paths.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::game::{payoff_row, Game};
use crate::par;
use crate::potential::GlobalPotential;
use crate::settings::Settings;

/// Joint actions with no unilateral deviation improving by more than
/// `settings.eps`, in lexicographic order.
pub fn enumerate_pne<G: Game>(game: &G, settings: &Settings) -> Result<Vec<Vec<usize>>> {
    let actions = game.actions();
    let total = actions.checked_count(settings.joint_cap)?;
    let eps = settings.eps;
    let stable = par::map(settings.execution, total, |k| {
        let mut x = actions.decode(k);
        (0..game.n()).all(|i| {
            let own = x[i];
            let current = game.payoff(i, &x);
            let row = payoff_row(game, i, &mut x);
            x[i] = own;
            row.iter().all(|&m| m - current <= eps)
        })
    });
    Ok(stable
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(k, _)| actions.decode(k))
        .collect())
}

/// Argmax set of `psi` (ties within `settings.eps`), in lexicographic order.
pub fn potential_maximizers(psi: &GlobalPotential, settings: &Settings) -> Vec<Vec<usize>> {
    psi.maximizers(settings.eps)
}

/// Lowest-index action within `eps` of the best payoff for player `i`.
fn best_response<G: Game>(game: &G, i: usize, x: &mut [usize], eps: f64) -> (usize, f64) {
    let own = x[i];
    let row = payoff_row(game, i, x);
    x[i] = own;
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a = row.iter().position(|&m| m >= best - eps).expect("non-empty action set");
    (a, row[a] - row[own])
}

/// Strict best-response dynamics with players moving in turn `0, 1, …`.
///
/// A player switches only when its best response (lowest index among
/// near-ties) improves its payoff by more than `settings.eps`. Returns the
/// visited joint actions, starting at `x0` and ending at a pure equilibrium;
/// a start at an equilibrium gives a one-element path.
pub fn best_response_path<G: Game>(
    game: &G,
    x0: &[usize],
    max_steps: usize,
    settings: &Settings,
) -> Result<Vec<Vec<usize>>> {
    game.actions().validate(x0)?;
    let n = game.n();
    let mut x = x0.to_vec();
    let mut path = vec![x.clone()];
    let mut seen: HashSet<(Vec<usize>, usize)> = HashSet::new();
    let mut idle = 0;
    let mut i = 0;
    while idle < n {
        if !seen.insert((x.clone(), i)) {
            return Err(Error::Cycle {
                state: x,
                player: i,
            });
        }
        let (a, gain) = best_response(game, i, &mut x, settings.eps);
        if gain > settings.eps {
            if path.len() > max_steps {
                return Err(Error::MaxSteps(max_steps));
            }
            x[i] = a;
            path.push(x.clone());
            idle = 0;
        } else {
            idle += 1;
        }
        i = (i + 1) % n;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::ActionSpace;
    use crate::game::{coordination_game, matching_pennies, GraphicalGame};
    use crate::graph::Graph;

    #[test]
    fn coordination_equilibria() {
        let s = Settings::default();
        assert_eq!(enumerate_pne(&coordination_game(), &s).unwrap(), vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn matching_pennies_has_no_pne_and_cycles() {
        let s = Settings::default();
        let g = matching_pennies();
        assert!(enumerate_pne(&g, &s).unwrap().is_empty());
        for k in 0..4 {
            let x0 = g.actions().decode(k);
            assert!(matches!(
                best_response_path(&g, &x0, 100, &s),
                Err(Error::Cycle { .. })
            ));
        }
    }

    #[test]
    fn single_player_argmax() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![3]).unwrap();
        let g = GraphicalGame::from_fn(Graph::empty(1), a, |_, x| [3.0, 1.0, 2.0][x[0]]).unwrap();
        assert_eq!(enumerate_pne(&g, &s).unwrap(), vec![vec![0]]);
        assert_eq!(best_response_path(&g, &[1], 10, &s).unwrap(), vec![vec![1], vec![0]]);
    }

    #[test]
    fn coordination_from_mismatch() {
        let s = Settings::default();
        let path = best_response_path(&coordination_game(), &[0, 1], 10, &s).unwrap();
        // Player 0 moves first and copies player 1.
        assert_eq!(path, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn start_at_equilibrium_is_empty_path() {
        let s = Settings::default();
        let path = best_response_path(&coordination_game(), &[1, 1], 10, &s).unwrap();
        assert_eq!(path, vec![vec![1, 1]]);
    }

    #[test]
    fn step_limit() {
        let s = Settings::default();
        let a = ActionSpace::uniform(3, 2).unwrap();
        // Each player copies its predecessor on the path.
        let g = GraphicalGame::from_fn(Graph::path(3), a, |i, x| {
            if i == 0 || x[i] == x[i - 1] {
                if i == 0 {
                    x[0] as f64
                } else {
                    1.0
                }
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(best_response_path(&g, &[0, 0, 0], 10, &s).unwrap().last().unwrap(), &vec![1, 1, 1]);
        assert_eq!(best_response_path(&g, &[0, 0, 0], 2, &s), Err(Error::MaxSteps(2)));
    }

    #[test]
    fn maximizers_of_constant_potential() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![2, 3]).unwrap();
        let psi = GlobalPotential::from_fn(a, &s, |_| 0.5).unwrap();
        assert_eq!(potential_maximizers(&psi, &s).len(), 6);
    }
}
