use nalgebra::{DMatrix, DVector};

use crate::actions::ActionSpace;
use crate::dynamics::PlayingScheme;
use crate::error::{Error, Result};
use crate::par;
use crate::settings::Settings;

/// Target for `max_x |(πK)(x) − π(x)|` after solving.
pub const STATIONARY_RESIDUAL: f64 = 1e-12;

/// Probability vector over the joint-action space, in joint-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    actions: ActionSpace,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(actions: ActionSpace, probs: Vec<f64>) -> Result<Self> {
        if actions.joint_count() != probs.len() as u128 {
            return Err(Error::Invalid(format!(
                "distribution has {} entries for {} joint actions",
                probs.len(),
                actions.joint_count()
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Invalid("probabilities must be finite and non-negative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("probabilities sum to {sum}")));
        }
        Ok(Self { actions, probs })
    }

    pub(crate) fn new_unchecked(actions: ActionSpace, probs: Vec<f64>) -> Self {
        Self { actions, probs }
    }

    pub fn uniform(actions: ActionSpace, settings: &Settings) -> Result<Self> {
        let total = actions.checked_count(settings.joint_cap)?;
        Ok(Self {
            actions,
            probs: vec![1.0 / total as f64; total],
        })
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, x: &[usize]) -> f64 {
        self.probs[self.actions.index(x)]
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn tv(&self, other: &Distribution) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len(), "distributions over different spaces");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Round-chain transition matrix, row `x` holding `P(z^{r+1} = · | z^r = x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    actions: ActionSpace,
    size: usize,
    matrix: Vec<f64>,
}

impl TransitionKernel {
    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.size..(x + 1) * self.size]
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.matrix[from * self.size + to]
    }

    /// `v ↦ vK`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (x, &mass) in v.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (o, &k) in out.iter_mut().zip(self.row(x)) {
                *o += mass * k;
            }
        }
        out
    }

    pub fn residual(&self, pi: &[f64]) -> f64 {
        self.apply(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Single-site update operator for one player: neighbor configuration of
/// every unilateral-deviation row, so a sweep never re-decodes joint actions.
struct Site {
    stride: usize,
    size: usize,
    rows: Vec<(usize, usize)>,
}

fn sites(scheme: &PlayingScheme, total: usize) -> Vec<Site> {
    let actions = scheme.actions();
    (0..scheme.n())
        .map(|i| {
            let rows = (0..actions.row_count(total, i))
                .map(|r| {
                    let base = actions.row_base(i, r);
                    (base, scheme.config_index(i, &actions.decode(base)))
                })
                .collect();
            Site {
                stride: actions.stride(i),
                size: actions.size(i),
                rows,
            }
        })
        .collect()
}

/// `v ← v K_i`: the mass of each row is redistributed over player `i`'s
/// actions by `p_i(· | x_{𝒩(i)})`.
fn apply_site(scheme: &PlayingScheme, i: usize, site: &Site, v: &mut [f64]) {
    for &(base, cfg) in &site.rows {
        let mass: f64 = (0..site.size).map(|a| v[base + a * site.stride]).sum();
        for (b, &p) in scheme.row(i, cfg).iter().enumerate() {
            v[base + b * site.stride] = mass * p;
        }
    }
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::Invalid(format!("{order:?} is not a permutation of 0..{n}")));
    }
    Ok(())
}

fn kernel_size(scheme: &PlayingScheme, settings: &Settings) -> Result<usize> {
    scheme
        .actions()
        .checked_count(settings.kernel_cap.min(settings.joint_cap))
}

/// Round kernel for the scan order `0..n`.
pub fn round_kernel(scheme: &PlayingScheme, settings: &Settings) -> Result<TransitionKernel> {
    let order: Vec<usize> = (0..scheme.n()).collect();
    round_kernel_with_order(scheme, &order, settings)
}

/// `K = K_{σ(n)} ⋯ K_{σ(1)}` as a dense matrix: row `x` is the unit mass at
/// `x` pushed through the single-site updates in scan order.
pub fn round_kernel_with_order(
    scheme: &PlayingScheme,
    order: &[usize],
    settings: &Settings,
) -> Result<TransitionKernel> {
    check_order(order, scheme.n())?;
    let size = kernel_size(scheme, settings)?;
    let sites = sites(scheme, size);
    let rows = par::map(settings.execution, size, |x| {
        let mut v = vec![0.0; size];
        v[x] = 1.0;
        for &i in order {
            apply_site(scheme, i, &sites[i], &mut v);
        }
        v
    });
    Ok(TransitionKernel {
        actions: scheme.actions().clone(),
        size,
        matrix: rows.concat(),
    })
}

/// Whether some power of the kernel is strictly positive. Positivity of
/// `K^m` persists for all larger powers, so repeated squaring of the support
/// pattern up to Wielandt's bound `(N−1)² + 1` decides it.
fn is_primitive(k: &TransitionKernel) -> bool {
    let n = k.size;
    let words = n.div_ceil(64);
    let mut support: Vec<Vec<u64>> = (0..n)
        .map(|x| {
            let mut bits = vec![0u64; words];
            for (y, &p) in k.row(x).iter().enumerate() {
                if p > 0.0 {
                    bits[y / 64] |= 1 << (y % 64);
                }
            }
            bits
        })
        .collect();
    let full = |rows: &[Vec<u64>]| {
        rows.iter().all(|r| {
            r.iter().enumerate().all(|(w, &bits)| {
                let width = (n - 64 * w).min(64);
                let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
                bits & mask == mask
            })
        })
    };
    let bound = (n as u128 - 1).pow(2) + 1;
    let mut power: u128 = 1;
    loop {
        if full(&support) {
            return true;
        }
        if power >= bound {
            return false;
        }
        support = (0..n)
            .map(|x| {
                let mut bits = vec![0u64; words];
                for y in 0..n {
                    if support[x][y / 64] >> (y % 64) & 1 == 1 {
                        for (b, s) in bits.iter_mut().zip(&support[y]) {
                            *b |= s;
                        }
                    }
                }
                bits
            })
            .collect();
        power *= 2;
    }
}

/// Unique stationary law of a primitive kernel, by a dense LU solve of
/// `π(K − I) = 0, Σπ = 1` followed by power steps until the residual is
/// below [`STATIONARY_RESIDUAL`].
pub fn stationary(k: &TransitionKernel) -> Result<Distribution> {
    if !is_primitive(k) {
        return Err(Error::NonErgodic);
    }
    let n = k.size;
    // Rows of (K − I)ᵀ, with the last equation replaced by normalization.
    let a = DMatrix::from_fn(n, n, |r, c| {
        if r == n - 1 {
            1.0
        } else {
            k.get(c, r) - if r == c { 1.0 } else { 0.0 }
        }
    });
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let solution = a.lu().solve(&b).ok_or(Error::NonErgodic)?;
    let mut pi: Vec<f64> = solution.iter().map(|&p| p.max(0.0)).collect();
    normalize(&mut pi);
    for _ in 0..1000 {
        if k.residual(&pi) <= STATIONARY_RESIDUAL {
            break;
        }
        pi = k.apply(&pi);
        normalize(&mut pi);
    }
    Ok(Distribution::new_unchecked(k.actions.clone(), pi))
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= s);
}

/// Stationary law of the round chain for an arbitrary scan order, by
/// repeated sweeps of the single-site updates (no dense matrix). Starts from
/// `start` when given, else uniform; stops when a full sweep moves the
/// vector by at most `tol` in L1, or after `max_sweeps`.
pub fn sweep_stationary(
    scheme: &PlayingScheme,
    order: &[usize],
    start: Option<&Distribution>,
    tol: f64,
    max_sweeps: usize,
    settings: &Settings,
) -> Result<(Distribution, bool)> {
    check_order(order, scheme.n())?;
    let size = scheme.actions().checked_count(settings.joint_cap)?;
    let sites = sites(scheme, size);
    let mut v = match start {
        Some(d) if d.probs.len() == size => d.probs.clone(),
        Some(_) => return Err(Error::Invalid("start distribution has the wrong size".into())),
        None => vec![1.0 / size as f64; size],
    };
    let mut converged = false;
    for _ in 0..max_sweeps {
        let before = v.clone();
        for &i in order {
            apply_site(scheme, i, &sites[i], &mut v);
        }
        normalize(&mut v);
        let moved: f64 = v.iter().zip(&before).map(|(a, b)| (a - b).abs()).sum();
        if moved <= tol {
            converged = true;
            break;
        }
    }
    Ok((
        Distribution::new_unchecked(scheme.actions().clone(), v),
        converged,
    ))
}

/// Stationary law for `order`: sweeps first, dense solve as a fallback.
pub(crate) fn stationary_for_order(
    scheme: &PlayingScheme,
    order: &[usize],
    start: Option<&Distribution>,
    settings: &Settings,
) -> Result<Distribution> {
    let (pi, converged) = sweep_stationary(scheme, order, start, 1e-14, 20_000, settings)?;
    if converged {
        return Ok(pi);
    }
    stationary(&round_kernel_with_order(scheme, order, settings)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sbr_scheme;
    use crate::game::coordination_game;
    use crate::graph::Graph;

    fn coordination_scheme() -> PlayingScheme {
        sbr_scheme(&coordination_game(), &[1.0, 1.0], &Settings::default()).unwrap()
    }

    #[test]
    fn coordination_kernel_entry() {
        let k = round_kernel(&coordination_scheme(), &Settings::default()).unwrap();
        let e = std::f64::consts::E;
        let expected = (1.0 / (e + 1.0)) * (e / (e + 1.0));
        assert!((k.get(0, 3) - expected).abs() < 1e-15);
        assert!((k.get(0, 3) - 0.196612).abs() < 1e-6);
        for x in 0..4 {
            assert!((k.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coordination_stationary_closed_form() {
        let s = Settings::default();
        let k = round_kernel(&coordination_scheme(), &s).unwrap();
        let pi = stationary(&k).unwrap();
        let e = std::f64::consts::E;
        let hi = e / (2.0 * e + 2.0);
        let lo = 1.0 / (2.0 * e + 2.0);
        for (p, q) in pi.probs().iter().zip([hi, lo, lo, hi]) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!(k.residual(pi.probs()) <= STATIONARY_RESIDUAL);
    }

    #[test]
    fn uniform_scheme_has_uniform_kernel_and_law() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![2, 3, 2]).unwrap();
        let p = PlayingScheme::uniform(Graph::path(3), a).unwrap();
        let k = round_kernel(&p, &s).unwrap();
        assert!(k.matrix.iter().all(|&v| (v - 1.0 / 12.0).abs() < 1e-15));
        let pi = stationary(&k).unwrap();
        assert!(pi.probs().iter().all(|&v| (v - 1.0 / 12.0).abs() < 1e-15));
    }

    #[test]
    fn single_player_kernel_rows_are_the_conditional() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![3]).unwrap();
        let p = PlayingScheme::new(Graph::empty(1), a, vec![vec![0.2, 0.5, 0.3]]).unwrap();
        let k = round_kernel(&p, &s).unwrap();
        for x in 0..3 {
            assert_eq!(k.row(x), &[0.2, 0.5, 0.3]);
        }
        let pi = stationary(&k).unwrap();
        for (a, b) in pi.probs().iter().zip([0.2, 0.5, 0.3]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sweeps_agree_with_dense_solve() {
        let s = Settings::default();
        let a = ActionSpace::new(vec![2, 3, 2]).unwrap();
        let g = Graph::path(3);
        let logits = (0..3)
            .map(|i| {
                let len = a.scope_count(g.neighbors(i)) * a.size(i);
                (0..len).map(|k| ((k * 7 + i * 3) % 5) as f64 * 0.4).collect()
            })
            .collect();
        let p = PlayingScheme::from_log_weights(g, a, logits).unwrap();
        for order in [[0, 1, 2], [2, 0, 1]] {
            let dense = stationary(&round_kernel_with_order(&p, &order, &s).unwrap()).unwrap();
            let (swept, converged) = sweep_stationary(&p, &order, None, 1e-15, 100_000, &s).unwrap();
            assert!(converged);
            assert!(dense.tv(&swept) < 1e-12);
        }
    }

    #[test]
    fn reducible_kernel_is_not_ergodic() {
        let a = ActionSpace::new(vec![2]).unwrap();
        let k = TransitionKernel {
            actions: a,
            size: 2,
            matrix: vec![1.0, 0.0, 0.0, 1.0],
        };
        assert_eq!(stationary(&k), Err(Error::NonErgodic));
        let periodic = TransitionKernel {
            matrix: vec![0.0, 1.0, 1.0, 0.0],
            ..k
        };
        assert_eq!(stationary(&periodic), Err(Error::NonErgodic));
    }

    #[test]
    fn kernel_cap_is_enforced() {
        let s = Settings {
            kernel_cap: 3,
            ..Settings::default()
        };
        assert!(matches!(
            round_kernel(&coordination_scheme(), &s),
            Err(Error::CapExceeded { required: 4, cap: 3 })
        ));
    }

    #[test]
    fn bad_orders_are_rejected() {
        let s = Settings::default();
        let p = coordination_scheme();
        assert!(round_kernel_with_order(&p, &[0, 0], &s).is_err());
        assert!(round_kernel_with_order(&p, &[0], &s).is_err());
        assert!(round_kernel_with_order(&p, &[1, 2], &s).is_err());
    }
}
