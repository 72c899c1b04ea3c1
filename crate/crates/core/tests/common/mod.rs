#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Two-sample χ² homogeneity test on categorical data. Cells with fewer than
/// ten pooled observations are merged. Returns `(statistic, dof, p-value)`.
pub fn chi2_two_sample<K: Ord + Clone>(a: &[K], b: &[K]) -> (f64, f64, f64) {
    let mut table: BTreeMap<K, (f64, f64)> = BTreeMap::new();
    for k in a {
        table.entry(k.clone()).or_default().0 += 1.0;
    }
    for k in b {
        table.entry(k.clone()).or_default().1 += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut rare = (0.0, 0.0);
    for (_, (x, y)) in table {
        if x + y < 10.0 {
            rare.0 += x;
            rare.1 += y;
        } else {
            cells.push((x, y));
        }
    }
    if rare.0 + rare.1 > 0.0 {
        cells.push(rare);
    }
    let mut stat = 0.0;
    for (x, y) in &cells {
        let tot = x + y;
        let ea = tot * na / (na + nb);
        let eb = tot * nb / (na + nb);
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = (cells.len() as f64 - 1.0).max(1.0);
    let p = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
    (stat, dof, p)
}

/// One-sample χ² goodness of fit of counts against probabilities.
pub fn chi2_gof(counts: &[u64], probs: &[f64]) -> (f64, f64) {
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dof = counts.len() as f64 - 1.0;
    (stat, 1.0 - ChiSquared::new(dof).unwrap().cdf(stat))
}
