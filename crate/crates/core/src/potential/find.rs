use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;

use crate::error::Result;
use crate::game::{payoff_row, validate_weights, Game};
use crate::par;
use crate::potential::{check_ordinal_potential, check_w_potential, GlobalPotential};
use crate::settings::Settings;

/// Builds the unique-up-to-a-constant exact potential if one exists.
///
/// `Ψ(x)` accumulates the payoff change of each player `k` as the profile
/// moves from all-zeros to `x` one coordinate at a time; the result is then
/// validated, so `None` means no exact potential exists.
pub fn find_exact_potential<G: Game>(game: &G, settings: &Settings) -> Result<Option<GlobalPotential>> {
    find_w_potential(game, &vec![1.0; game.n()], settings)
}

/// As [`find_exact_potential`] for a `w`-potential (`ΔM_i = w_i ΔΨ`).
pub fn find_w_potential<G: Game>(
    game: &G,
    w: &[f64],
    settings: &Settings,
) -> Result<Option<GlobalPotential>> {
    validate_weights(game.n(), w)?;
    let actions = game.actions();
    let total = actions.checked_count(settings.joint_cap)?;
    let table = par::map(settings.execution, total, |idx| {
        let x = actions.decode(idx);
        let mut y = vec![0; x.len()];
        let mut acc = 0.0;
        for k in 0..x.len() {
            if x[k] == 0 {
                continue;
            }
            let before = game.payoff(k, &y);
            y[k] = x[k];
            acc += (game.payoff(k, &y) - before) / w[k];
        }
        acc
    });
    let psi = GlobalPotential::new(actions.clone(), table)?;
    Ok(check_w_potential(game, &psi, w, settings)?.then_some(psi))
}

/// Builds an ordinal potential by longest-path levelling of the strict
/// improvement graph, or returns `None` when none exists.
///
/// Joint actions connected by payoff-neutral unilateral moves are merged into
/// one class; strict unilateral improvements become edges between classes.
/// An improvement inside a class or a cycle among classes rules out an
/// ordinal potential.
pub fn find_ordinal_potential<G: Game>(
    game: &G,
    settings: &Settings,
) -> Result<Option<GlobalPotential>> {
    let actions = game.actions();
    let total = actions.checked_count(settings.joint_cap)?;
    let eps = settings.eps;

    // Payoff rows, computed once and reused for both passes.
    let rows: Vec<Vec<Vec<f64>>> = (0..game.n())
        .map(|i| {
            par::map(settings.execution, actions.row_count(total, i), |r| {
                let mut x = actions.decode(actions.row_base(i, r));
                payoff_row(game, i, &mut x)
            })
        })
        .collect();

    let mut classes = UnionFind::<usize>::new(total);
    for (i, player_rows) in rows.iter().enumerate() {
        let stride = actions.stride(i);
        for (r, m) in player_rows.iter().enumerate() {
            let base = actions.row_base(i, r);
            for a in 0..m.len() {
                for b in 0..a {
                    if (m[a] - m[b]).abs() <= eps {
                        classes.union(base + a * stride, base + b * stride);
                    }
                }
            }
        }
    }
    let labels = classes.into_labeling();
    let mut class_of = vec![usize::MAX; total];
    let mut id_of_root = vec![usize::MAX; total];
    let mut class_count = 0;
    for (x, &root) in labels.iter().enumerate() {
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = class_count;
            class_count += 1;
        }
        class_of[x] = id_of_root[root];
    }

    let mut improvement = DiGraph::<(), ()>::with_capacity(class_count, 0);
    for _ in 0..class_count {
        improvement.add_node(());
    }
    for (i, player_rows) in rows.iter().enumerate() {
        let stride = actions.stride(i);
        for (r, m) in player_rows.iter().enumerate() {
            let base = actions.row_base(i, r);
            for a in 0..m.len() {
                for b in 0..m.len() {
                    if m[b] - m[a] > eps {
                        let from = class_of[base + a * stride];
                        let to = class_of[base + b * stride];
                        if from == to {
                            return Ok(None);
                        }
                        improvement.add_edge(NodeIndex::new(from), NodeIndex::new(to), ());
                    }
                }
            }
        }
    }
    let order = match toposort(&improvement, None) {
        Ok(order) => order,
        Err(_) => return Ok(None),
    };
    let mut level = vec![0usize; class_count];
    for node in order {
        let here = level[node.index()];
        for next in improvement.neighbors(node) {
            level[next.index()] = level[next.index()].max(here + 1);
        }
    }
    let table = class_of.iter().map(|&c| level[c] as f64).collect();
    let psi = GlobalPotential::new(actions.clone(), table)?;
    Ok(check_ordinal_potential(game, &psi, settings)?.then_some(psi))
}
