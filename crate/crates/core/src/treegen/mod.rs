//! Tree growth: the discrete attachment chain and its continuous-time embedding.
//!
//! Vertices are numbered `1..=n` with vertex 1 the root; per-vertex arrays are
//! indexed by `v − 1`. In discrete mode a new vertex attaches to `j` with
//! probability `f(outdeg(j), W_j) / Σ_i f(outdeg(i), W_i)`. In continuous mode
//! each vertex gives birth at the jumps of an exponential clock whose rate is its
//! current fitness; the embedded jump chain of that process is the discrete chain.

mod dump;
mod engine;
mod stats;

pub use dump::{write_stats_json, write_tree_csv};
pub use engine::{grow, grow_continuous, grow_continuous_queue, grow_discrete, grow_replicas};
pub use stats::{collect_stats, CondensationStats, Persistence};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitness::{Bounded, FitnessSpec, MuTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discrete,
    Continuous,
}

impl Mode {
    pub fn id(self) -> &'static str {
        match self {
            Mode::Discrete => "discrete",
            Mode::Continuous => "continuous",
        }
    }
}

/// A grown tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeState {
    pub mode: Mode,
    pub seed: u64,
    pub replica: u64,
    /// `parent[v−1]` for vertex `v`; `0` marks the root.
    pub parent: Vec<u32>,
    pub outdeg: Vec<u32>,
    pub weight: Vec<f64>,
    /// Birth time of each vertex; continuous mode only.
    pub birth_time: Option<Vec<f64>>,
    /// Set when fitness values were handled in the rescaled log domain.
    pub scaled: bool,
}

impl TreeState {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent_of(&self, v: u32) -> Option<u32> {
        match self.parent.get(v as usize - 1) {
            Some(0) | None => None,
            Some(p) => Some(*p),
        }
    }

    /// The `τ_k` sequence: `tau()[k−1]` is the time the tree reached `k` vertices.
    pub fn tau(&self) -> Option<&[f64]> {
        self.birth_time.as_deref()
    }

    /// Out-degrees recomputed from the parent array.
    pub fn replay_outdeg(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.len()];
        for &p in &self.parent[1..] {
            d[p as usize - 1] += 1;
        }
        d
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 || self.parent[0] != 0 {
            return Err(Error::State("tree must have a root with sentinel parent 0".into()));
        }
        for (i, &p) in self.parent.iter().enumerate().skip(1) {
            if p == 0 || p as usize > i {
                return Err(Error::State(format!("vertex {} has parent {p}", i + 1)));
            }
        }
        if self.replay_outdeg() != self.outdeg {
            return Err(Error::State("out-degrees disagree with the parent array".into()));
        }
        if let Some(bt) = &self.birth_time {
            if bt.len() != n || bt.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::State("birth times must be non-decreasing".into()));
            }
        }
        Ok(())
    }
}

/// Bracket on the explosion time given a continuous-mode tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplosionBracket {
    pub tau_lo: f64,
    pub tau_hi: f64,
    /// Vertex attaining the upper bound.
    pub witness: u32,
}

/// `tau_lo = τ_n`; `tau_hi = τ_n + min_v μ^{W_v}_{outdeg(v)} / α`.
///
/// After `τ_n` vertex `v` needs `Σ_{i ≥ outdeg(v)} Exp(f(i, W_v))` more time to
/// have infinitely many children, with mean `μ^{W_v}_{outdeg(v)}`; by Markov's
/// inequality `tau_hi` exceeds the explosion time with probability at least `1 − α`.
pub fn estimate_explosion_time(tree: &TreeState, spec: &FitnessSpec, alpha: f64) -> Result<ExplosionBracket> {
    let bt = match (&tree.birth_time, tree.mode) {
        (Some(bt), Mode::Continuous) => bt,
        _ => return Err(Error::Mode("explosion bracket needs a continuous-mode tree".into())),
    };
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!("tail_bound_tol must lie in (0,1), got {alpha}")));
    }
    let tau_lo = *bt.last().expect("non-empty tree");
    if !spec.s().summable() {
        return Ok(ExplosionBracket { tau_lo, tau_hi: f64::INFINITY, witness: 1 });
    }
    // μ^w_d is decreasing in w for every supported rule, so only the largest
    // weight at each degree matters
    let max_d = *tree.outdeg.iter().max().unwrap_or(&0) as usize;
    let mut best_w = vec![f64::NEG_INFINITY; max_d + 1];
    let mut who = vec![0u32; max_d + 1];
    for (i, (&d, &w)) in tree.outdeg.iter().zip(&tree.weight).enumerate() {
        if w > best_w[d as usize] {
            best_w[d as usize] = w;
            who[d as usize] = i as u32 + 1;
        }
    }
    let mut best = f64::INFINITY;
    let mut witness = 1;
    if spec.is_multiplicative() {
        let g = spec.g().expect("multiplicative");
        let table = MuTable::build(&FitnessSpec { w_star: 0.0, ..spec.clone() }, 0.0, max_d as u64, 1e-12)?;
        let g0 = g.eval(0.0);
        for d in 0..=max_d {
            if best_w[d].is_finite() {
                let t: Bounded = table.get(d as u64);
                let mu = (t.value + t.err) * g0 / g.eval(best_w[d]);
                if mu < best {
                    best = mu;
                    witness = who[d];
                }
            }
        }
    } else {
        for d in 0..=max_d {
            if best_w[d].is_finite() {
                let m = spec.mu(d as f64, best_w[d], 1e-12)?;
                let mu = m.value + m.trunc_error;
                if mu < best {
                    best = mu;
                    witness = who[d];
                }
            }
        }
    }
    Ok(ExplosionBracket { tau_lo, tau_hi: tau_lo + best / alpha, witness })
}
