//! Distributional and structural checks of the prefix-sum sampler.

use cmj_core::rng::{Purpose, Stream};
use cmj_core::wsampler::{PrefixIndex, REBUILD_PERIOD};
use proptest::prelude::*;

fn index(ws: &[f64]) -> PrefixIndex {
    let mut idx = PrefixIndex::new();
    for w in ws {
        idx.insert(*w).unwrap();
    }
    idx
}

fn tv_distance(ws: &[f64], draws: usize, seed: u64) -> f64 {
    let idx = index(ws);
    let mut rng = Stream::new(seed, Purpose::Scratch, 0);
    let mut counts = vec![0u64; ws.len()];
    for _ in 0..draws {
        counts[idx.sample(rng.uniform() * idx.total()).unwrap()] += 1;
    }
    let total: f64 = ws.iter().sum();
    0.5 * ws.iter().zip(&counts).map(|(w, c)| (w / total - *c as f64 / draws as f64).abs()).sum::<f64>()
}

#[test]
fn total_variation_on_fixed_vectors() {
    let vectors: Vec<Vec<f64>> = vec![
        vec![1.0, 2.0, 3.0, 4.0],
        vec![1.0; 64],
        (1..=64).map(|i| i as f64).collect(),
        (0..64).map(|i| 1.1f64.powi(i)).collect(),
        (0..33).map(|i| if i % 7 == 0 { 50.0 } else { 0.5 }).collect(),
        vec![1e-6, 1.0, 1e6],
    ];
    for (k, ws) in vectors.iter().enumerate() {
        let tv = tv_distance(ws, 1_000_000, 11 + k as u64);
        assert!(tv <= 0.005, "vector {k}: TV {tv}");
    }
}

#[test]
fn frequencies_within_multinomial_band() {
    let ws = [1.0, 2.0, 3.0, 4.0];
    let idx = index(&ws);
    let mut rng = Stream::new(5, Purpose::Scratch, 0);
    let n = 100_000;
    let mut counts = [0f64; 4];
    for _ in 0..n {
        counts[idx.sample(rng.uniform() * idx.total()).unwrap()] += 1.0;
    }
    for (c, p) in counts.iter().zip([0.1, 0.2, 0.3, 0.4]) {
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c - n as f64 * p).abs() <= 3.0 * sd, "{c} vs {}", n as f64 * p);
    }
}

#[test]
fn prefix_and_linear_scan_agree_exhaustively() {
    // Integer weights keep every prefix sum exact, so boundaries are exact too.
    for size in 1..=1000usize {
        let ws: Vec<f64> = (0..size).map(|i| ((i * 7919) % 13 + 1) as f64).collect();
        let idx = index(&ws);
        let mut acc = 0.0;
        for w in &ws {
            for u in [acc, acc + 0.5 * w, acc + w] {
                if u < idx.total() {
                    assert_eq!(idx.sample(u).unwrap(), idx.sample_linear(u).unwrap(), "size {size}, u {u}");
                }
            }
            acc += w;
        }
    }
}

#[test]
fn touches_are_logarithmic() {
    let mut idx = PrefixIndex::new();
    let mut rng = Stream::new(3, Purpose::Scratch, 0);
    for n in 1..=(1usize << 16) {
        idx.insert(1.0 + rng.uniform()).unwrap();
        let bound = usize::BITS - n.leading_zeros() + 1;
        let (_, probe) = idx.sample_probe(rng.uniform() * idx.total()).unwrap();
        assert!(probe <= bound, "sample read {probe} cells at size {n}");
        let touched = idx.update(rng.uniform() as usize % n, 2.0).unwrap();
        assert!(touched <= bound, "update touched {touched} cells at size {n}");
    }
}

#[test]
fn totals_survive_long_update_runs() {
    let mut idx = PrefixIndex::new();
    for _ in 0..1_000_000 {
        idx.insert(1.0).unwrap();
    }
    assert!((idx.total() - 1e6).abs() <= 1e-9 * 1e6);
    let mut rng = Stream::new(9, Purpose::Scratch, 0);
    for k in 0..100_000usize {
        let w = if k % 2 == 0 { 1e-3 + rng.uniform() * 1e4 } else { 0.5 };
        idx.update(k % 1000, w).unwrap();
    }
    let exact: f64 = idx.weights().iter().sum();
    assert!((idx.total() - exact).abs() <= 1e-9 * exact);
    let probe = 999_999;
    let direct: f64 = idx.weights()[..=probe].iter().sum();
    assert!((idx.prefix(probe) - direct).abs() <= 1e-9 * direct);
}

#[test]
fn periodic_rebuild() {
    let mut idx = index(&[1.0, 2.0]);
    let before = idx.rebuilds();
    for k in 0..REBUILD_PERIOD + 8 {
        idx.update((k % 2) as usize, 1.0 + (k % 3) as f64).unwrap();
    }
    assert!(idx.rebuilds() > before);
}

proptest! {
    #[test]
    fn prefix_matches_linear_scan(ws in prop::collection::vec(1e-3f64..1e3, 1..200), us in prop::collection::vec(0.0f64..1.0, 1..50)) {
        let idx = index(&ws);
        for u in us {
            let u = u * idx.total();
            let a = idx.sample(u).unwrap();
            // Rounding in the two summation orders can only move a boundary by one id.
            let b = idx.sample_linear(u).unwrap();
            prop_assert!(a.abs_diff(b) <= 1, "{a} vs {b}");
            if a != b {
                let edge = idx.prefix(a.min(b));
                prop_assert!((edge - u).abs() <= 1e-9 * idx.total());
            }
        }
    }

    #[test]
    fn updates_keep_prefix_consistent(ws in prop::collection::vec(1e-3f64..1e3, 1..100), ups in prop::collection::vec((0usize..100, 1e-3f64..1e3), 0..200)) {
        let mut idx = index(&ws);
        for (id, w) in ups {
            idx.update(id % ws.len(), w).unwrap();
        }
        let mut acc = 0.0;
        for (i, w) in idx.weights().to_vec().iter().enumerate() {
            acc += w;
            prop_assert!((idx.prefix(i) - acc).abs() <= 1e-9 * acc);
        }
    }
}
