//! Brute-force oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use gibbsgame::generate::{random_gibbs_potential, random_graph};
use gibbsgame::{ActionSpace, Game, GibbsPotential, GlobalPotential, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Action sizes drawn from `sizes`, redrawn until the joint count is at most `cap`.
pub fn random_actions<R: Rng>(n: usize, sizes: &[usize], cap: usize, rng: &mut R) -> ActionSpace {
    loop {
        let v: Vec<usize> = (0..n).map(|_| sizes[rng.random_range(0..sizes.len())]).collect();
        if v.iter().product::<usize>() <= cap {
            return ActionSpace::new(v).unwrap();
        }
    }
}

pub fn random_instance(seed: u64, max_n: usize, sizes: &[usize]) -> (Graph, ActionSpace, GibbsPotential) {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_n);
    let g = random_graph(n, r.random_range(0.2..0.8), &mut r);
    let a = random_actions(n, sizes, 4096, &mut r);
    let gp = random_gibbs_potential(&g, &a, -2.0, 2.0, &mut r);
    (g, a, gp)
}

/// Every subset of nodes that is a clique and cannot be extended.
pub fn brute_maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let is_clique = |mask: u32| {
        (0..n).all(|a| {
            (a + 1..n).all(|b| mask >> a & 1 == 0 || mask >> b & 1 == 0 || g.has_edge(a, b))
        })
    };
    let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
        .filter(|&m| is_clique(m) && (0..n).all(|v| m >> v & 1 == 1 || !is_clique(m | 1 << v)))
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

fn payoff_at<G: Game>(game: &G, i: usize, x: &[usize]) -> f64 {
    game.payoff(i, x)
}

/// Exact-potential criterion on unilateral 4-cycles: for every pair of
/// players `i ≠ j`, every base profile and every pair of action changes,
/// the payoff changes around the square sum to zero.
pub fn four_cycle_oracle<G: Game>(game: &G, w: &[f64], tol: f64) -> bool {
    let a = game.actions();
    let total = a.joint_count() as usize;
    for k in 0..total {
        let x = a.decode(k);
        for i in 0..game.n() {
            for j in i + 1..game.n() {
                for ai in 0..a.size(i) {
                    for aj in 0..a.size(j) {
                        if ai == x[i] || aj == x[j] {
                            continue;
                        }
                        let mut y = x.clone();
                        y[i] = ai;
                        let mut z = y.clone();
                        z[j] = aj;
                        let mut u = x.clone();
                        u[j] = aj;
                        let s = (payoff_at(game, i, &y) - payoff_at(game, i, &x)) / w[i]
                            + (payoff_at(game, j, &z) - payoff_at(game, j, &y)) / w[j]
                            + (payoff_at(game, i, &u) - payoff_at(game, i, &z)) / w[i]
                            + (payoff_at(game, j, &x) - payoff_at(game, j, &u)) / w[j];
                        if s.abs() > tol {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Whether some strict unilateral improvement can be undone by a chain of
/// non-worsening unilateral moves (a weak improvement cycle).
pub fn has_weak_improvement_cycle<G: Game>(game: &G) -> bool {
    let a = game.actions();
    let total = a.joint_count() as usize;
    let moves = |k: usize| -> Vec<(usize, bool)> {
        let x = a.decode(k);
        let mut out = Vec::new();
        for i in 0..game.n() {
            let here = game.payoff(i, &x);
            for b in 0..a.size(i) {
                if b == x[i] {
                    continue;
                }
                let mut y = x.clone();
                y[i] = b;
                let there = game.payoff(i, &y);
                if there >= here {
                    out.push((a.index(&y), there > here));
                }
            }
        }
        out
    };
    let adj: Vec<Vec<(usize, bool)>> = (0..total).map(moves).collect();
    for from in 0..total {
        for &(to, strict) in &adj[from] {
            if !strict {
                continue;
            }
            let mut seen = vec![false; total];
            let mut queue = VecDeque::from([to]);
            seen[to] = true;
            while let Some(v) = queue.pop_front() {
                if v == from {
                    return true;
                }
                for &(u, _) in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
    }
    false
}

/// Pairwise Markov criterion: for every non-adjacent pair `i, j` the mixed
/// second difference of `psi` in `(x_i, x_j)` vanishes for all contexts.
pub fn pairwise_markov(psi: &GlobalPotential, g: &Graph, tol: f64) -> bool {
    let a = psi.actions();
    let total = a.joint_count() as usize;
    for k in 0..total {
        let x = a.decode(k);
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                if g.has_edge(i, j) || x[i] != 0 || x[j] != 0 {
                    continue;
                }
                for bi in 1..a.size(i) {
                    for bj in 1..a.size(j) {
                        let mut xi = x.clone();
                        xi[i] = bi;
                        let mut xj = x.clone();
                        xj[j] = bj;
                        let mut xij = xi.clone();
                        xij[j] = bj;
                        let d = psi.value(&xij) - psi.value(&xi) - psi.value(&xj) + psi.value(&x);
                        if d.abs() > tol {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// `exp(Ψ) / Z`, max-shifted.
pub fn gibbs_distribution(psi: &GlobalPotential) -> Vec<f64> {
    let m = psi.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = psi.values().iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Pure equilibria straight from the definition, comparing whole payoff
/// vectors rather than rows.
pub fn brute_pne<G: Game>(game: &G, eps: f64) -> Vec<Vec<usize>> {
    let a = game.actions();
    (0..a.joint_count() as usize)
        .map(|k| a.decode(k))
        .filter(|x| {
            (0..game.n()).all(|i| {
                (0..a.size(i)).all(|b| {
                    let mut y = x.clone();
                    y[i] = b;
                    game.payoff(i, &y) <= game.payoff(i, x) + eps
                })
            })
        })
        .collect()
}

/// Sum of the clique tables of `gp` that contain player `i`.
pub fn local_potential(gp: &GibbsPotential, i: usize, x: &[usize]) -> f64 {
    gp.cliques()
        .iter()
        .filter(|t| t.scope().contains(&i))
        .map(|t| t.eval(x))
        .sum()
}

/// Binary-action game whose unilateral payoff differences are the cubes of
/// the potential differences of `gp`.
pub fn cubic_game(gp: &GibbsPotential) -> gibbsgame::GraphicalGame {
    gibbsgame::GraphicalGame::from_fn(gp.graph().clone(), gp.actions().clone(), |i, x| {
        let mut y = x.to_vec();
        y[i] = 0;
        (local_potential(gp, i, x) - local_potential(gp, i, &y)).powi(3)
    })
    .unwrap()
}
