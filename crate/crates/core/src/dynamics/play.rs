use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::actions::ActionSpace;
use crate::dynamics::{Distribution, PlayingScheme};
use crate::error::{Error, Result};
use crate::par;
use crate::settings::Settings;

/// Sequential play: `rounds` sweeps over players `0..n`, each drawing a new
/// action given its neighbors' current actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayTrace {
    pub initial: Vec<usize>,
    pub seed: u64,
    n: usize,
    outcomes: Vec<usize>,
}

impl PlayTrace {
    pub fn new(initial: Vec<usize>, seed: u64, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        let n = initial.len();
        if outcomes.iter().any(|z| z.len() != n) {
            return Err(Error::Invalid(format!(
                "every round of a trace must have {n} actions"
            )));
        }
        Ok(Self {
            initial,
            seed,
            n,
            outcomes: outcomes.concat(),
        })
    }

    pub fn rounds(&self) -> usize {
        self.outcomes.len().checked_div(self.n).unwrap_or(0)
    }

    /// Play outcome `z^r` for `r` in `1..=rounds()`.
    pub fn round(&self, r: usize) -> &[usize] {
        assert!(r >= 1 && r <= self.rounds(), "round {r} out of range");
        &self.outcomes[(r - 1) * self.n..r * self.n]
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &[usize]> {
        self.outcomes.chunks(self.n)
    }

    pub fn last(&self) -> &[usize] {
        if self.outcomes.is_empty() {
            &self.initial
        } else {
            &self.outcomes[self.outcomes.len() - self.n..]
        }
    }
}

/// Uniform draws for one chain. Step `t` (zero-based, `t = (r−1)n + i`)
/// consumes 64-bit block `t` of the ChaCha8 stream keyed by the seed, so
/// any step can be regenerated without replaying the chain.
#[derive(Debug, Clone)]
pub struct StepRng(ChaCha8Rng);

impl StepRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Positions the stream at step `t`.
    pub fn at(seed: u64, t: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(2 * t as u128);
        Self(rng)
    }

    pub fn next_uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

/// Inverse-CDF draw from `probs`; the last action absorbs rounding.
pub(crate) fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (a, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    probs.len() - 1
}

/// One round in place: players `0..n` in order, each seeing the actions
/// already chosen earlier in the round.
pub fn sample_round(scheme: &PlayingScheme, x: &mut [usize], rng: &mut StepRng) {
    for i in 0..scheme.n() {
        let u = rng.next_uniform();
        x[i] = draw(scheme.conditional(i, x), u);
    }
}

pub fn play(scheme: &PlayingScheme, x0: &[usize], rounds: usize, seed: u64) -> Result<PlayTrace> {
    scheme.actions().validate(x0)?;
    let n = scheme.n();
    let mut rng = StepRng::new(seed);
    let mut x = x0.to_vec();
    let mut outcomes = Vec::with_capacity(rounds * n);
    for _ in 0..rounds {
        sample_round(scheme, &mut x, &mut rng);
        outcomes.extend_from_slice(&x);
    }
    Ok(PlayTrace {
        initial: x0.to_vec(),
        seed,
        n,
        outcomes,
    })
}

/// Independent chains, one per `(x0, seed)`; results are in input order and
/// equal to running [`play`] on each start separately.
pub fn play_many(
    scheme: &PlayingScheme,
    starts: &[(Vec<usize>, u64)],
    rounds: usize,
    settings: &Settings,
) -> Result<Vec<PlayTrace>> {
    par::map(settings.execution, starts.len(), |k| {
        let (x0, seed) = &starts[k];
        play(scheme, x0, rounds, *seed)
    })
    .into_iter()
    .collect()
}

/// Frequencies of play outcomes over the rounds of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    actions: ActionSpace,
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn probability(&self, x: &[usize]) -> f64 {
        self.counts[self.actions.index(x)] as f64 / self.total as f64
    }

    pub fn to_distribution(&self) -> Distribution {
        let t = self.total as f64;
        Distribution::new_unchecked(
            self.actions.clone(),
            self.counts.iter().map(|&c| c as f64 / t).collect(),
        )
    }
}

pub fn empirical_distribution(
    trace: &PlayTrace,
    actions: &ActionSpace,
    settings: &Settings,
) -> Result<EmpiricalDistribution> {
    if trace.rounds() == 0 {
        return Err(Error::Invalid("empirical distribution needs at least one round".into()));
    }
    if actions.n() != trace.n {
        return Err(Error::Invalid("trace does not match the action space".into()));
    }
    let total = actions.checked_count(settings.joint_cap)?;
    let mut counts = vec![0u64; total];
    for z in trace.outcomes() {
        actions.validate(z)?;
        counts[actions.index(z)] += 1;
    }
    Ok(EmpiricalDistribution {
        actions: actions.clone(),
        counts,
        total: trace.rounds() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn sticky(eps: f64) -> PlayingScheme {
        let a = ActionSpace::uniform(2, 2).unwrap();
        let row = [1.0 - eps, eps];
        PlayingScheme::new(Graph::complete(2), a, vec![row.repeat(2), row.repeat(2)]).unwrap()
    }

    #[test]
    fn seed_reuse_is_deterministic() {
        let p = sticky(0.3);
        let a = play(&p, &[1, 1], 500, 9).unwrap();
        let b = play(&p, &[1, 1], 500, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, play(&p, &[1, 1], 500, 10).unwrap());
    }

    #[test]
    fn near_deterministic_trace_is_constant() {
        let p = sticky(1e-12);
        let t = play(&p, &[1, 1], 100, 3).unwrap();
        assert!(t.outcomes().all(|z| z == [0, 0]));
        let s = Settings::default();
        let e = empirical_distribution(&t, p.actions(), &s).unwrap();
        assert_eq!(e.probability(&[0, 0]), 1.0);
    }

    #[test]
    fn single_round_gives_point_mass() {
        let s = Settings::default();
        let p = sticky(0.5);
        let t = play(&p, &[0, 1], 1, 4).unwrap();
        let e = empirical_distribution(&t, p.actions(), &s).unwrap();
        assert_eq!(e.counts().iter().sum::<u64>(), 1);
        assert_eq!(e.probability(t.round(1)), 1.0);
        let zero = play(&p, &[0, 1], 0, 4).unwrap();
        assert!(empirical_distribution(&zero, p.actions(), &s).is_err());
    }

    #[test]
    fn steps_are_addressable() {
        let seed = 77;
        let mut seq = StepRng::new(seed);
        let draws: Vec<f64> = (0..10).map(|_| seq.next_uniform()).collect();
        for (t, &u) in draws.iter().enumerate() {
            assert_eq!(StepRng::at(seed, t as u64).next_uniform(), u);
        }
    }

    #[test]
    fn play_many_matches_individual_chains() {
        let p = sticky(0.4);
        let starts: Vec<(Vec<usize>, u64)> = (0..6).map(|k| (vec![k % 2, 0], k as u64)).collect();
        for exec in [crate::settings::Execution::Sequential, crate::settings::Execution::Parallel] {
            let s = Settings::default().with_execution(exec);
            let many = play_many(&p, &starts, 50, &s).unwrap();
            for ((x0, seed), trace) in starts.iter().zip(&many) {
                assert_eq!(trace, &play(&p, x0, 50, *seed).unwrap());
            }
        }
    }

    #[test]
    fn invalid_start_is_rejected() {
        assert!(play(&sticky(0.1), &[2, 0], 5, 0).is_err());
        assert!(play(&sticky(0.1), &[0], 5, 0).is_err());
    }

    #[test]
    fn draw_covers_all_actions() {
        assert_eq!(draw(&[0.25, 0.5, 0.25], 0.0), 0);
        assert_eq!(draw(&[0.25, 0.5, 0.25], 0.3), 1);
        assert_eq!(draw(&[0.25, 0.5, 0.25], 0.9), 2);
        assert_eq!(draw(&[0.5, 0.5 - 1e-17], 0.999_999_999_999_999_9), 1);
    }
}
