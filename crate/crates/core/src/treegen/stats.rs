use std::collections::BTreeMap;

use serde::Serialize;

use super::TreeState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "n")]
pub enum Persistence {
    /// Tree size at which the max-degree vertex last changed.
    At(u64),
    /// The last change happened in the second half of the run.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondensationStats {
    pub n: u64,
    /// `max_v outdeg(v) / (n − 1)` at each checkpoint.
    pub max_deg_share: BTreeMap<u64, f64>,
    /// Max-degree vertex (lowest id on ties) at each checkpoint.
    pub argmax_history: BTreeMap<u64, u32>,
    pub persistence_point: Persistence,
    pub last_argmax_change: u64,
    pub height: u32,
    pub moderate_l: u32,
    pub moderate_count: u64,
}

/// Replays the tree in birth order and records checkpoints at powers of two
/// and at the final size.
pub fn collect_stats(tree: &TreeState, l: u32) -> CondensationStats {
    let n = tree.len();
    let mut deg = vec![0u32; n];
    let mut depth = vec![0u32; n];
    let mut moderate = vec![false; n];
    moderate[0] = true;
    let mut moderate_count = 1u64;
    let mut height = 0;
    let mut max = 0u32;
    let mut arg = 0u32;
    let mut last_change = 1u64;
    let mut share = BTreeMap::new();
    let mut hist = BTreeMap::new();
    for i in 1..n {
        let v = i as u32 + 1;
        let p = tree.parent[i];
        let pi = p as usize - 1;
        deg[pi] += 1;
        let rank = deg[pi];
        depth[i] = depth[pi] + 1;
        height = height.max(depth[i]);
        moderate[i] = moderate[pi] && rank <= l;
        moderate_count += u64::from(moderate[i]);
        let d = deg[pi];
        if d > max || (d == max && p < arg) {
            if p != arg {
                last_change = u64::from(v);
                arg = p;
            }
            max = d;
        }
        let size = u64::from(v);
        if size.is_power_of_two() || i + 1 == n {
            share.insert(size, f64::from(max) / (size - 1) as f64);
            hist.insert(size, arg);
        }
    }
    let n64 = n as u64;
    let persistence_point =
        if n64 >= 2 && last_change > n64 / 2 { Persistence::Unstable } else { Persistence::At(last_change) };
    CondensationStats {
        n: n64,
        max_deg_share: share,
        argmax_history: hist,
        persistence_point,
        last_argmax_change: last_change,
        height,
        moderate_l: l,
        moderate_count,
    }
}
