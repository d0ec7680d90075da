use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::kernel::stationary_for_order;
use crate::dynamics::{round_kernel, stationary, Distribution, PlayingScheme};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par;
use crate::potential::{decompose, Decomposition, GlobalPotential};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyOptions {
    pub tol_tv: f64,
    pub tol_cond: f64,
    /// Every permutation is tested when `n` is at most this.
    pub all_orders_up_to: usize,
    /// Random permutations tested beyond identity and reverse for larger `n`.
    pub random_orders: usize,
    pub seed: u64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        Self {
            tol_tv: 1e-9,
            tol_cond: 1e-8,
            all_orders_up_to: 4,
            random_orders: 8,
            seed: 0,
        }
    }
}

/// Where a consistency check failed: the pair of scan orders (indices into
/// [`ConsistencyReport::orders`]) that disagree most, and the player and
/// joint action whose conditional under the identity-order law deviates most
/// from the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyWitness {
    pub orders: (usize, usize),
    pub tv: f64,
    pub player: usize,
    pub joint_action: Vec<usize>,
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub orders: Vec<Vec<usize>>,
    /// Stationary laws in the order of `orders`; the first is the identity scan.
    pub stationaries: Vec<Distribution>,
    pub max_tv: f64,
    pub max_conditional_mismatch: f64,
    pub options: ConsistencyOptions,
    pub witness: Option<ConsistencyWitness>,
}

/// Scan orders tested for `n` players: all permutations in lexicographic
/// order for small `n`, else identity, reverse and seeded shuffles.
pub fn scan_orders(n: usize, options: &ConsistencyOptions) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..n).collect();
    if n <= options.all_orders_up_to {
        let mut out = Vec::new();
        let mut p = identity;
        loop {
            out.push(p.clone());
            if !next_permutation(&mut p) {
                return out;
            }
        }
    }
    let mut out = vec![identity.clone(), identity.iter().rev().copied().collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..options.random_orders {
        let mut p = identity.clone();
        p.shuffle(&mut rng);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Largest `|π(a | x_{-i}) − p_i(a | x_{𝒩(i)})|` over players and joint
/// actions, with the first place it is attained.
fn conditional_mismatch(
    scheme: &PlayingScheme,
    pi: &Distribution,
    settings: &Settings,
) -> (f64, usize, usize) {
    let actions = scheme.actions();
    let total = pi.probs().len();
    let probs = pi.probs();
    let mut best = (0.0, 0, 0);
    for i in 0..scheme.n() {
        let stride = actions.stride(i);
        let k = actions.size(i);
        let rows = actions.row_count(total, i);
        let found = par::argmax(settings.execution, rows * k, |t| {
            let base = actions.row_base(i, t / k);
            let a = t % k;
            let mass: f64 = (0..k).map(|b| probs[base + b * stride]).sum();
            let x = actions.decode(base);
            let p = scheme.conditional(i, &x)[a];
            (probs[base + a * stride] / mass - p).abs()
        });
        if let Some((t, m)) = found {
            if m > best.0 || m.is_nan() {
                best = (m, i, actions.row_base(i, t / k) + (t % k) * stride);
            }
        }
    }
    best
}

/// Compares the round-chain stationary laws of several scan orders and the
/// conditionals of the identity-order law against the scheme. A scheme whose
/// conditionals come from one joint Markov random field passes both.
pub fn consistency_check(
    scheme: &PlayingScheme,
    options: &ConsistencyOptions,
    settings: &Settings,
) -> Result<ConsistencyReport> {
    let orders = scan_orders(scheme.n(), options);
    let first = stationary(&round_kernel(scheme, settings)?)?;
    let rest = par::map(settings.execution, orders.len() - 1, |k| {
        stationary_for_order(scheme, &orders[k + 1], Some(&first), settings)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut stationaries = vec![first];
    stationaries.extend(rest);

    let mut max_tv = 0.0;
    let mut pair = (0, 0);
    for a in 0..stationaries.len() {
        for b in a + 1..stationaries.len() {
            let tv = stationaries[a].tv(&stationaries[b]);
            if tv > max_tv {
                max_tv = tv;
                pair = (a, b);
            }
        }
    }
    let (mismatch, player, at) = conditional_mismatch(scheme, &stationaries[0], settings);
    let consistent = max_tv <= options.tol_tv && mismatch <= options.tol_cond;
    let witness = (!consistent).then(|| ConsistencyWitness {
        orders: pair,
        tv: max_tv,
        player,
        joint_action: scheme.actions().decode(at),
        mismatch,
    });
    Ok(ConsistencyReport {
        consistent,
        orders,
        stationaries,
        max_tv,
        max_conditional_mismatch: mismatch,
        options: *options,
        witness,
    })
}

/// Potential read off converged play: `Ψ̂ = ln π` for the identity-order
/// stationary law, with its clique decomposition over `graph`.
#[derive(Debug, Clone, PartialEq)]
pub struct InferredPotential {
    pub psi: GlobalPotential,
    pub decomposition: Decomposition,
    pub report: ConsistencyReport,
}

pub fn infer_potential_from_play(
    scheme: &PlayingScheme,
    graph: &Graph,
    options: &ConsistencyOptions,
    settings: &Settings,
) -> Result<InferredPotential> {
    let report = consistency_check(scheme, options, settings)?;
    potential_from_report(report, graph, settings)
}

/// As [`infer_potential_from_play`] for an already computed report.
pub fn potential_from_report(
    report: ConsistencyReport,
    graph: &Graph,
    settings: &Settings,
) -> Result<InferredPotential> {
    if !report.consistent {
        return Err(Error::InconsistentScheme {
            max_tv: report.max_tv,
            max_mismatch: report.max_conditional_mismatch,
        });
    }
    let pi = &report.stationaries[0];
    let psi = GlobalPotential::new(
        pi.actions().clone(),
        pi.probs().iter().map(|p| p.ln()).collect(),
    )?;
    let decomposition = decompose(&psi, graph, settings)?;
    Ok(InferredPotential {
        psi,
        decomposition,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::ActionSpace;
    use crate::dynamics::sbr_scheme;
    use crate::game::coordination_game;

    #[test]
    fn permutations_of_three() {
        let o = scan_orders(3, &ConsistencyOptions::default());
        assert_eq!(o.len(), 6);
        assert_eq!(o[0], vec![0, 1, 2]);
        assert_eq!(o[5], vec![2, 1, 0]);
    }

    #[test]
    fn large_n_uses_seeded_shuffles() {
        let opts = ConsistencyOptions::default();
        let o = scan_orders(7, &opts);
        assert_eq!(o[0], (0..7).collect::<Vec<_>>());
        assert_eq!(o[1], (0..7).rev().collect::<Vec<_>>());
        assert!(o.len() <= 10 && o.len() >= 9);
        assert_eq!(o, scan_orders(7, &opts));
    }

    #[test]
    fn coordination_sbr_is_consistent() {
        let s = Settings::default();
        let p = sbr_scheme(&coordination_game(), &[1.0, 1.0], &s).unwrap();
        let r = consistency_check(&p, &ConsistencyOptions::default(), &s).unwrap();
        assert!(r.consistent);
        assert!(r.witness.is_none());
        assert_eq!(r.orders.len(), 2);
        assert!(r.max_tv < 1e-12);
    }

    #[test]
    fn inferred_coordination_potential() {
        let s = Settings::default();
        let p = sbr_scheme(&coordination_game(), &[1.0, 1.0], &s).unwrap();
        let inf = infer_potential_from_play(&p, p.graph(), &ConsistencyOptions::default(), &s).unwrap();
        let v = inf.psi.values();
        assert!((v[0] - v[1] - 1.0).abs() < 1e-9);
        assert_eq!(inf.decomposition.potential.cliques().len(), 1);
    }

    #[test]
    fn single_player_is_consistent() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![3]).unwrap();
        let p = PlayingScheme::new(Graph::empty(1), a, vec![vec![0.1, 0.6, 0.3]]).unwrap();
        assert!(consistency_check(&p, &ConsistencyOptions::default(), &s).unwrap().consistent);
    }

    #[test]
    fn uniform_scheme_on_edgeless_graph_gives_constant_potential() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![2, 3, 2]).unwrap();
        let g = Graph::empty(3);
        let p = PlayingScheme::uniform(g.clone(), a).unwrap();
        let inf = infer_potential_from_play(&p, &g, &ConsistencyOptions::default(), &s).unwrap();
        let v = inf.psi.values();
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12));
    }

    #[test]
    fn incompatible_conditionals_are_flagged() {
        // Player 0 copies player 1 while player 1 avoids player 0.
        let s = Settings::default();
        let a = ActionSpace::uniform(2, 2).unwrap();
        let p = PlayingScheme::new(
            Graph::complete(2),
            a,
            vec![vec![0.9, 0.1, 0.1, 0.9], vec![0.1, 0.9, 0.9, 0.1]],
        )
        .unwrap();
        let r = consistency_check(&p, &ConsistencyOptions::default(), &s).unwrap();
        assert!(!r.consistent);
        let w = r.witness.unwrap();
        assert_eq!(w.orders, (0, 1));
        assert!(w.mismatch > 0.1);
        assert!(matches!(
            infer_potential_from_play(&p, p.graph(), &ConsistencyOptions::default(), &s),
            Err(Error::InconsistentScheme { .. })
        ));
    }
}
