use crate::actions::decode_local;
use crate::error::Result;
use crate::game::{every_row, payoff_row, validate_weights, Game};
use crate::par;
use crate::potential::{ensure_same_space, sign, GlobalPotential};
use crate::settings::Settings;

/// Unilateral payoff differences equal potential differences (within `eps`).
pub fn check_exact_potential<G: Game>(
    game: &G,
    psi: &GlobalPotential,
    settings: &Settings,
) -> Result<bool> {
    check_w_potential(game, psi, &vec![1.0; game.n()], settings)
}

/// `M_i(a, x_{-i}) − M_i(b, x_{-i}) = w_i (Ψ(a, x_{-i}) − Ψ(b, x_{-i}))` for
/// every player, opponent profile and action pair.
pub fn check_w_potential<G: Game>(
    game: &G,
    psi: &GlobalPotential,
    w: &[f64],
    settings: &Settings,
) -> Result<bool> {
    ensure_same_space(game.actions(), psi.actions())?;
    validate_weights(game.n(), w)?;
    let actions = game.actions();
    let values = psi.values();
    let eps = settings.eps;
    every_row(actions, settings, |i, x| {
        let base = actions.index(x);
        let stride = actions.stride(i);
        let m = payoff_row(game, i, x);
        (0..m.len()).all(|a| {
            (0..a).all(|b| {
                let dpsi = values[base + a * stride] - values[base + b * stride];
                ((m[a] - m[b]) - w[i] * dpsi).abs() <= eps
            })
        })
    })
}

/// Unilateral payoff and potential differences have the same sign, with
/// values in `[−eps, eps]` counted as zero.
pub fn check_ordinal_potential<G: Game>(
    game: &G,
    psi: &GlobalPotential,
    settings: &Settings,
) -> Result<bool> {
    ensure_same_space(game.actions(), psi.actions())?;
    let actions = game.actions();
    let values = psi.values();
    let eps = settings.eps;
    every_row(actions, settings, |i, x| {
        let base = actions.index(x);
        let stride = actions.stride(i);
        let m = payoff_row(game, i, x);
        (0..m.len()).all(|a| {
            (0..a).all(|b| {
                let dpsi = values[base + a * stride] - values[base + b * stride];
                sign(m[a] - m[b], eps) == sign(dpsi, eps)
            })
        })
    })
}

/// Finite tabulation of per-player preference-order-preserving transforms.
///
/// For player `i` and a configuration of its open neighborhood, the table
/// lists `(ΔΨ, ΔM)` pairs sorted by `ΔΨ`, where both columns are strictly
/// increasing and `(0, 0)` is present. Reading the table left to right gives
/// `f_i`; reading right to left gives its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformWitness {
    neighbors: Vec<Vec<usize>>,
    radices: Vec<Vec<usize>>,
    pairs: Vec<Vec<Vec<(f64, f64)>>>,
    eps: f64,
}

impl TransformWitness {
    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn config_count(&self, i: usize) -> usize {
        self.pairs[i].len()
    }

    /// Index of the neighbor configuration of `i` in the full joint action `x`.
    pub fn config_index(&self, i: usize, x: &[usize]) -> usize {
        self.neighbors[i]
            .iter()
            .zip(&self.radices[i])
            .fold(0, |acc, (&j, &r)| acc * r + x[j])
    }

    /// Neighbor actions (in neighbor order) of configuration `config`.
    pub fn config(&self, i: usize, config: usize) -> Vec<usize> {
        let mut out = vec![0; self.neighbors[i].len()];
        decode_local(&self.radices[i], config, &mut out);
        out
    }

    pub fn pairs(&self, i: usize, config: usize) -> &[(f64, f64)] {
        &self.pairs[i][config]
    }

    /// `f_i(ΔΨ)` for a tabulated potential difference.
    pub fn forward(&self, i: usize, config: usize, dpsi: f64) -> Option<f64> {
        lookup(&self.pairs[i][config], dpsi, self.eps, |p| p.0).map(|p| p.1)
    }

    /// `f_i⁻¹(ΔM)` for a tabulated payoff difference.
    pub fn inverse(&self, i: usize, config: usize, dm: f64) -> Option<f64> {
        lookup(&self.pairs[i][config], dm, self.eps, |p| p.1).map(|p| p.0)
    }

    /// Whether every tabulated pair satisfies `ΔM = w_i ΔΨ` within `tol`.
    pub fn is_linear(&self, w: &[f64], tol: f64) -> bool {
        self.pairs.iter().zip(w).all(|(configs, &wi)| {
            configs
                .iter()
                .flatten()
                .all(|&(dpsi, dm)| (dm - wi * dpsi).abs() <= tol)
        })
    }
}

fn lookup<F>(pairs: &[(f64, f64)], v: f64, eps: f64, key: F) -> Option<(f64, f64)>
where
    F: Fn(&(f64, f64)) -> f64,
{
    let pos = pairs.partition_point(|p| key(p) < v - eps);
    pairs
        .get(pos)
        .filter(|p| (key(p) - v).abs() <= eps)
        .copied()
}

/// Returns a witness that `psi` is an `f`-transformed potential for `game`
/// with transforms conditioned on each player's open neighborhood, or `None`.
///
/// Requires that potential differences over a unilateral move depend only on
/// the two actions and the neighbor configuration, and that the induced map
/// from potential differences to payoff differences is well defined and
/// strictly increasing.
pub fn check_transformed_potential<G: Game>(
    game: &G,
    psi: &GlobalPotential,
    settings: &Settings,
) -> Result<Option<TransformWitness>> {
    ensure_same_space(game.actions(), psi.actions())?;
    let actions = game.actions();
    let total = actions.checked_count(settings.joint_cap)?;
    let eps = settings.eps;
    let neighbors: Vec<Vec<usize>> = (0..game.n())
        .map(|i| game.graph().neighbors(i).to_vec())
        .collect();
    let radices: Vec<Vec<usize>> = neighbors
        .iter()
        .map(|nb| nb.iter().map(|&j| actions.size(j)).collect())
        .collect();

    let per_player = par::map(settings.execution, game.n(), |i| {
        tabulate_player(game, psi, i, &neighbors[i], &radices[i], total, eps)
    });
    let pairs = match per_player.into_iter().collect::<Option<Vec<_>>>() {
        Some(p) => p,
        None => return Ok(None),
    };
    Ok(Some(TransformWitness {
        neighbors,
        radices,
        pairs,
        eps,
    }))
}

fn tabulate_player<G: Game>(
    game: &G,
    psi: &GlobalPotential,
    i: usize,
    neighbors: &[usize],
    radices: &[usize],
    total: usize,
    eps: f64,
) -> Option<Vec<Vec<(f64, f64)>>> {
    let actions = game.actions();
    let k = actions.size(i);
    let stride = actions.stride(i);
    let configs: usize = radices.iter().product();
    let values = psi.values();
    // Per configuration: ΔΨ for every ordered action pair, and the payoff row.
    let mut dpsi: Vec<Option<Vec<f64>>> = vec![None; configs];
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); configs];
    for r in 0..actions.row_count(total, i) {
        let base = actions.row_base(i, r);
        let mut x = actions.decode(base);
        let c = neighbors
            .iter()
            .zip(radices)
            .fold(0, |acc, (&j, &rad)| acc * rad + x[j]);
        let diffs: Vec<f64> = (0..k * k)
            .map(|ab| values[base + (ab / k) * stride] - values[base + (ab % k) * stride])
            .collect();
        match &dpsi[c] {
            Some(seen) => {
                if seen.iter().zip(&diffs).any(|(s, d)| (s - d).abs() > eps) {
                    return None;
                }
            }
            None => {
                rows[c] = payoff_row(game, i, &mut x);
                dpsi[c] = Some(diffs);
            }
        }
    }
    dpsi.into_iter()
        .zip(rows)
        .map(|(d, m)| {
            let d = d.expect("every neighbor configuration occurs");
            let mut pairs: Vec<(f64, f64)> = (0..k * k)
                .map(|ab| (d[ab], m[ab / k] - m[ab % k]))
                .collect();
            pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
            monotone_table(pairs, eps)
        })
        .collect()
}

/// Collapses pairs with equal `ΔΨ` (requiring equal `ΔM`) and checks the
/// result is strictly increasing in `ΔM`.
fn monotone_table(sorted: Vec<(f64, f64)>, eps: f64) -> Option<Vec<(f64, f64)>> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (dpsi, dm) in sorted {
        match out.last() {
            Some(&(p, m)) if (dpsi - p).abs() <= eps => {
                if (dm - m).abs() > eps {
                    return None;
                }
            }
            Some(&(_, m)) if dm - m <= eps => return None,
            _ => out.push((dpsi, dm)),
        }
    }
    Some(out)
}
