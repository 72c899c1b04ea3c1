//! Dynamic categorical sampling over a growable weight vector.
//!
//! A binary indexed tree keeps prefix sums so that insert, point update and
//! proportional sampling each touch `O(log n)` cells.

use crate::error::{Error, Result};
use crate::fitness::Neumaier;

/// Updates between unconditional rebuilds.
pub const REBUILD_PERIOD: u64 = 1 << 20;
/// Relative drift that forces a rebuild.
pub const DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct PrefixIndex {
    weights: Vec<f64>,
    // 1-based; tree[0] unused
    tree: Vec<f64>,
    total: f64,
    since_rebuild: u64,
    drift_bound: f64,
    rebuilds: u64,
}

#[inline]
fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl PrefixIndex {
    pub fn new() -> Self {
        PrefixIndex { tree: vec![0.0], ..Default::default() }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut tree = Vec::with_capacity(n + 1);
        tree.push(0.0);
        PrefixIndex { weights: Vec::with_capacity(n), tree, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, id: usize) -> Option<f64> {
        self.weights.get(id).copied()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of full rebuilds performed so far.
    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    fn check(w: f64) -> Result<()> {
        if w > 0.0 && w.is_finite() {
            Ok(())
        } else {
            Err(Error::Argument(format!("weight must be positive and finite, got {w}")))
        }
    }

    /// Appends a weight and returns its id.
    pub fn insert(&mut self, w: f64) -> Result<usize> {
        Self::check(w)?;
        let id = self.weights.len();
        let pos = id + 1;
        let mut cell = w;
        let mut step = 1;
        while step < lowbit(pos) {
            cell += self.tree[pos - step];
            step <<= 1;
        }
        self.weights.push(w);
        self.tree.push(cell);
        self.total += w;
        self.drift_bound += f64::EPSILON * self.total;
        self.maybe_rebuild();
        Ok(id)
    }

    /// Replaces the weight of `id`; returns the number of tree cells touched.
    pub fn update(&mut self, id: usize, w: f64) -> Result<u32> {
        Self::check(w)?;
        let old = *self
            .weights
            .get(id)
            .ok_or_else(|| Error::Argument(format!("unknown id {id} (size {})", self.weights.len())))?;
        if old == w {
            return Ok(0);
        }
        let delta = w - old;
        self.weights[id] = w;
        let n = self.weights.len();
        let mut pos = id + 1;
        let mut touched = 0;
        while pos <= n {
            self.tree[pos] += delta;
            pos += lowbit(pos);
            touched += 1;
        }
        self.total += delta;
        self.since_rebuild += 1;
        self.drift_bound += f64::EPSILON * (self.total.abs() + delta.abs()) * f64::from(touched);
        self.maybe_rebuild();
        Ok(touched)
    }

    fn maybe_rebuild(&mut self) {
        if self.since_rebuild >= REBUILD_PERIOD || self.drift_bound > DRIFT_TOL * self.total {
            self.rebuild();
        }
    }

    /// Recomputes every cell and the total from the stored weights.
    pub fn rebuild(&mut self) {
        let n = self.weights.len();
        self.tree.clear();
        self.tree.push(0.0);
        self.tree.extend_from_slice(&self.weights);
        for i in 1..=n {
            let j = i + lowbit(i);
            if j <= n {
                self.tree[j] += self.tree[i];
            }
        }
        let mut acc = Neumaier::new();
        for &w in &self.weights {
            acc.add(w);
        }
        self.total = acc.value();
        self.since_rebuild = 0;
        self.drift_bound = f64::EPSILON * self.total * (n.max(2) as f64).log2();
        self.rebuilds += 1;
    }

    /// Replaces all weights by `exp(logw[i] − shift)`, flooring underflow at the
    /// smallest positive normal, and rebuilds.
    pub fn rebuild_scaled(&mut self, logw: &[f64], shift: f64) {
        self.weights.clear();
        self.weights.extend(logw.iter().map(|l| (l - shift).exp().max(f64::MIN_POSITIVE)));
        self.rebuild();
    }

    /// `Σ_{j ≤ id} weights[j]` from the tree.
    pub fn prefix(&self, id: usize) -> f64 {
        let mut pos = (id + 1).min(self.weights.len());
        let mut s = 0.0;
        while pos > 0 {
            s += self.tree[pos];
            pos -= lowbit(pos);
        }
        s
    }

    /// The id whose prefix interval contains `u ∈ [0, total)`; a `u` on a
    /// boundary goes to the lower id.
    pub fn sample(&self, u: f64) -> Result<usize> {
        self.sample_probe(u).map(|(id, _)| id)
    }

    /// As [`PrefixIndex::sample`], also returning the number of cells read.
    pub fn sample_probe(&self, mut u: f64) -> Result<(usize, u32)> {
        let n = self.weights.len();
        if n == 0 {
            return Err(Error::State("cannot sample from an empty index".into()));
        }
        let mut pos = 0;
        let mut step = 1usize << (usize::BITS - 1 - n.leading_zeros());
        let mut touched = 0;
        while step > 0 {
            let next = pos + step;
            if next <= n {
                touched += 1;
                if self.tree[next] < u {
                    u -= self.tree[next];
                    pos = next;
                }
            }
            step >>= 1;
        }
        Ok((pos.min(n - 1), touched))
    }

    /// Reference lookup by linear scan: the first id whose running sum reaches `u`.
    pub fn sample_linear(&self, u: f64) -> Result<usize> {
        if self.weights.is_empty() {
            return Err(Error::State("cannot sample from an empty index".into()));
        }
        let mut acc = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if acc >= u {
                return Ok(i);
            }
        }
        Ok(self.weights.len() - 1)
    }
}
