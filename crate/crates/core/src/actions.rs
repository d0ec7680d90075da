//! Action spaces, joint-action indexing and dense local tables.
//!
//! Joint actions are indexed in row-major mixed radix with player 0 as the
//! most significant digit. Local tables use the same convention over their
//! sorted scope.

use crate::error::{Error, Result};

/// Per-player action counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    count: u128,
}

impl ActionSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidGame(format!("player {i} has no actions")));
        }
        let count = sizes
            .iter()
            .try_fold(1u128, |acc, &s| acc.checked_mul(s as u128))
            .ok_or_else(|| Error::InvalidGame("joint-action count overflows".into()))?;
        let mut strides = vec![0usize; sizes.len()];
        let mut acc = 1usize;
        for i in (0..sizes.len()).rev() {
            strides[i] = acc;
            acc = acc.saturating_mul(sizes[i]);
        }
        Ok(Self {
            sizes,
            strides,
            count,
        })
    }

    /// `n` players with `k` actions each.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![k; n])
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Exact joint-action count, possibly larger than `usize`.
    pub fn joint_count(&self) -> u128 {
        self.count
    }

    /// Joint-action count, or `CapExceeded` if it is above `cap`.
    pub fn checked_count(&self, cap: usize) -> Result<usize> {
        if self.count > cap as u128 {
            Err(Error::CapExceeded {
                required: self.count,
                cap,
            })
        } else {
            Ok(self.count as usize)
        }
    }

    /// Index distance between joint actions that differ by one in `x_i`.
    /// Only meaningful when the space fits the cap.
    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        x.len() == self.sizes.len() && x.iter().zip(&self.sizes).all(|(&a, &s)| a < s)
    }

    pub fn validate(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.sizes.len() {
            return Err(Error::Invalid(format!(
                "joint action has {} entries, expected {}",
                x.len(),
                self.sizes.len()
            )));
        }
        if let Some(i) = (0..x.len()).find(|&i| x[i] >= self.sizes[i]) {
            return Err(Error::Invalid(format!(
                "action {} of player {i} is outside 0..{}",
                x[i], self.sizes[i]
            )));
        }
        Ok(())
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.strides).map(|(&a, &s)| a * s).sum()
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for i in (0..self.sizes.len()).rev() {
            out[i] = index % self.sizes[i];
            index /= self.sizes[i];
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        self.decode_into(index, &mut out);
        out
    }

    /// Number of unilateral-deviation rows for player `i`, i.e. `|A_{-i}|`.
    pub(crate) fn row_count(&self, total: usize, i: usize) -> usize {
        total / self.sizes[i]
    }

    /// Joint index of the `r`-th profile with `x_i = 0`. Adding
    /// `a * stride(i)` gives the profile where `i` plays `a` instead.
    pub(crate) fn row_base(&self, i: usize, r: usize) -> usize {
        let stride = self.strides[i];
        (r / stride) * stride * self.sizes[i] + r % stride
    }

    /// Number of configurations of the nodes in `scope`.
    pub fn scope_count(&self, scope: &[usize]) -> usize {
        scope.iter().map(|&j| self.sizes[j]).product()
    }
}

/// Dense real table over the joint actions of a sorted node subset.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTable {
    scope: Vec<usize>,
    radices: Vec<usize>,
    table: Vec<f64>,
}

impl LocalTable {
    pub fn new(scope: Vec<usize>, actions: &ActionSpace, table: Vec<f64>) -> Result<Self> {
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGame(format!(
                "scope {scope:?} must be strictly increasing"
            )));
        }
        if let Some(&bad) = scope.iter().find(|&&j| j >= actions.n()) {
            return Err(Error::InvalidGame(format!(
                "scope {scope:?} references player {bad} outside 0..{}",
                actions.n()
            )));
        }
        let radices: Vec<usize> = scope.iter().map(|&j| actions.size(j)).collect();
        let expected: usize = radices.iter().product();
        if table.len() != expected {
            return Err(Error::InvalidGame(format!(
                "table over scope {scope:?} has {} entries, expected {expected}",
                table.len()
            )));
        }
        if let Some(k) = table.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGame(format!(
                "table over scope {scope:?} has a non-finite entry at {k}"
            )));
        }
        Ok(Self {
            scope,
            radices,
            table,
        })
    }

    /// Tabulates `f` on every local configuration, in index order.
    pub fn from_fn<F>(scope: Vec<usize>, actions: &ActionSpace, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        let radices: Vec<usize> = scope
            .iter()
            .map(|&j| actions.sizes().get(j).copied().unwrap_or(1))
            .collect();
        let count: usize = radices.iter().product();
        let mut local = vec![0; scope.len()];
        let table = (0..count)
            .map(|k| {
                decode_local(&radices, k, &mut local);
                f(&local)
            })
            .collect();
        Self::new(scope, actions, table)
    }

    pub fn zeros(scope: Vec<usize>, actions: &ActionSpace) -> Result<Self> {
        let count = actions.scope_count(&scope);
        Self::new(scope, actions, vec![0.0; count])
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn values(&self) -> &[f64] {
        &self.table
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.table
    }

    pub fn into_values(self) -> Vec<f64> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Local index of the restriction of the full joint action `x`.
    pub fn index_of(&self, x: &[usize]) -> usize {
        self.scope
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&j, &r)| acc * r + x[j])
    }

    /// Value at the restriction of the full joint action `x`.
    pub fn eval(&self, x: &[usize]) -> f64 {
        self.table[self.index_of(x)]
    }

    /// Value at a local configuration listed in scope order.
    pub fn get(&self, local: &[usize]) -> f64 {
        let k = local
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&a, &r)| acc * r + a);
        self.table[k]
    }

    pub fn decode(&self, k: usize) -> Vec<usize> {
        let mut out = vec![0; self.scope.len()];
        decode_local(&self.radices, k, &mut out);
        out
    }

    pub fn scale(&mut self, factor: f64) {
        self.table.iter_mut().for_each(|v| *v *= factor);
    }
}

pub(crate) fn decode_local(radices: &[usize], mut k: usize, out: &mut [usize]) {
    for p in (0..radices.len()).rev() {
        out[p] = k % radices[p];
        k /= radices[p];
    }
}
