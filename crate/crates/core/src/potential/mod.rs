//! Potential functions: global tables, clique-decomposed Gibbs potentials,
//! the exact/weighted/ordinal/transformed checks, and constructions between
//! potentials and hyperedge-symmetric games.

mod checks;
mod construct;
mod find;
mod gibbs;

pub use checks::{
    check_exact_potential, check_ordinal_potential, check_transformed_potential,
    check_w_potential, TransformWitness,
};
pub use construct::{
    potential_from_symmetric, symmetric_hypergraphical_from_potential, to_pairwise_polymatrix,
};
pub use find::{find_exact_potential, find_ordinal_potential, find_w_potential};
pub use gibbs::{decompose, Decomposition, GibbsPotential};

use crate::actions::ActionSpace;
use crate::error::{Error, Result};
use crate::par;
use crate::settings::Settings;

/// A real function on the full joint-action space, stored densely in joint
/// index order.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPotential {
    actions: ActionSpace,
    table: Vec<f64>,
}

impl GlobalPotential {
    pub fn new(actions: ActionSpace, table: Vec<f64>) -> Result<Self> {
        if actions.joint_count() != table.len() as u128 {
            return Err(Error::Invalid(format!(
                "potential table has {} entries, expected {}",
                table.len(),
                actions.joint_count()
            )));
        }
        if let Some(k) = table.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "potential has a non-finite entry at joint index {k}"
            )));
        }
        Ok(Self { actions, table })
    }

    pub fn from_fn<F>(actions: ActionSpace, settings: &Settings, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> f64 + Sync + Send,
    {
        let total = actions.checked_count(settings.joint_cap)?;
        let table = par::map(settings.execution, total, |k| f(&actions.decode(k)));
        Self::new(actions, table)
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn values(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, x: &[usize]) -> f64 {
        self.table[self.actions.index(x)]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            actions: self.actions.clone(),
            table: self.table.iter().map(|v| v + c).collect(),
        }
    }

    /// `max_x |(self(x) − other(x)) − (self(0) − other(0))|`: zero iff the two
    /// potentials differ by a constant.
    pub fn deviation_from_constant(&self, other: &GlobalPotential) -> f64 {
        let offset = self.table[0] - other.table[0];
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b - offset).abs())
            .fold(0.0, f64::max)
    }

    /// Joint actions whose value is within `eps` of the maximum, in index order.
    pub fn maximizers(&self, eps: f64) -> Vec<Vec<usize>> {
        let best = self.table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= best - eps)
            .map(|(k, _)| self.actions.decode(k))
            .collect()
    }
}

/// Sign with a dead zone of `eps` around zero.
pub(crate) fn sign(v: f64, eps: f64) -> i8 {
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

pub(crate) fn ensure_same_space(a: &ActionSpace, b: &ActionSpace) -> Result<()> {
    if a != b {
        return Err(Error::Invalid(format!(
            "action spaces differ: {:?} vs {:?}",
            a.sizes(),
            b.sizes()
        )));
    }
    Ok(())
}
