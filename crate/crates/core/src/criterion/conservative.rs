//! Monte-Carlo check of the Chernoff bound on conservative sequences.
//!
//! For `a = a₁⋯a_m` with every `a_j ≤ a₁`, the event "a has `a₁` children
//! before the root explodes" is
//! `𝒫_{a₁}(a) + Σ_{j≥2} 𝒫_{a_j}(a|_{j−1}) ≤ Σ_{k>a₁} X_∅(k)`, and its sum over
//! all such `a` is at most `𝓜_λ(Y_{a₁}) E[𝓛_λ(𝒫_{a₁})] (Σ_{n≤a₁} E[𝓛_λ(𝒫_n)])^{m−1}`
//! with `λ = λ_{a₁}`.
//!
//! Each replica walks the `a₁^{m−1}` sequences depth-first, drawing clocks
//! lazily and pruning as soon as the lineage sum exceeds an upper bound on the
//! root's residual time. That residual is replaced by
//! `T_K + μ_K^{W} + t`, where `T_K` sums the explicit clocks below `K` and
//! `t` is a Chernoff deviation with failure probability `eps_b`; the estimate
//! is corrected by `a₁^{m−1} · 2 eps_b` so that it stays an upper estimate.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use super::laplace::{laplace_with, Factors};
use super::{lambda_default, mgf_y, CriterionKind, CriterionReport, Expectation, PowerSums, Verdict};
use crate::error::{Error, Result};
use crate::fitness::{FitnessKind, FitnessSpec};
use crate::rng::{Purpose, Stream};
use crate::weights::WeightModel;

const Z99: f64 = 2.575_829_303_548_901;
/// Below this many replicas with a hit the normal interval is replaced by a
/// Clopper-Pearson bound on the hit probability.
const MIN_HITS_NORMAL: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheckConfig {
    pub a1: u64,
    pub m: u32,
    pub delta: f64,
    pub replicas: u64,
    pub seed: u64,
    pub expectation: Expectation,
    pub eps_b: f64,
}

impl BoundCheckConfig {
    pub fn new(a1: u64, m: u32, delta: f64, replicas: u64, seed: u64) -> Self {
        BoundCheckConfig { a1, m, delta, replicas, seed, expectation: Expectation::default(), eps_b: 1e-10 }
    }
}

/// Deviation `t` with `P(R − E R ≥ t) ≤ eps` for a sum of independent
/// exponentials with variance at most `var` and rates at least `rate`.
fn deviation(var: f64, rate: f64, eps: f64) -> f64 {
    let l = -eps.ln();
    let t = 2.0 * (var * l).sqrt();
    if t <= rate * var {
        t
    } else {
        2.0 * (l + 0.25 * rate * rate * var) / rate
    }
}

struct Rates<'a> {
    spec: &'a FitnessSpec,
    s: Vec<f64>,
    /// `(Σ_{i≥j} 1/s(i) upper bound, inf_{i≥j} s(i))` at `j = a₁` and `j = K`.
    at_a1: (f64, f64),
    at_k: (f64, f64),
    k: u64,
}

impl Rates<'_> {
    #[inline]
    fn rate(&self, i: u64, w: f64) -> f64 {
        let s = self.s[i as usize];
        match self.spec.kind {
            FitnessKind::Multiplicative { g, .. } => g.eval(w) * s,
            FitnessKind::Additive { .. } => s + w,
        }
    }

    /// Upper bound on the residual time from `(tail, inf)` plus its deviation.
    fn residual_cap(&self, (tail, inf): (f64, f64), w: f64, eps: f64) -> f64 {
        let (mu, rate) = match self.spec.kind {
            FitnessKind::Multiplicative { g, .. } => (tail / g.eval(w), inf * g.eval(w)),
            FitnessKind::Additive { .. } => (tail, inf + w),
        };
        mu + deviation(mu / rate, rate, eps)
    }
}

struct Walk<'a> {
    rates: &'a Rates<'a>,
    wmodel: &'a WeightModel,
    rng: Stream,
    a1: u64,
    m: u32,
    w_root: f64,
    coarse: f64,
    fine: Option<f64>,
    eps: f64,
}

impl Walk<'_> {
    fn fine_cap(&mut self) -> f64 {
        if let Some(v) = self.fine {
            return v;
        }
        let mut t = 0.0;
        for i in self.a1..self.rates.k {
            t += self.rng.exp(self.rates.rate(i, self.w_root));
        }
        let v = t + self.rates.residual_cap(self.rates.at_k, self.w_root, self.eps);
        self.fine = Some(v);
        v
    }

    /// Individual `a` itself: does it reach `a₁` children in time?
    fn leaf(&mut self, prefix: f64) -> u64 {
        let w = self.wmodel.sample(&mut self.rng);
        let mut acc = prefix;
        for i in 0..self.a1 {
            acc += self.rng.exp(self.rates.rate(i, w));
            if acc > self.coarse {
                return 0;
            }
        }
        u64::from(acc <= self.fine_cap())
    }

    /// Ancestor `a|_d`, branching over its first `a₁` children.
    fn node(&mut self, depth: u32, prefix: f64) -> u64 {
        let w = self.wmodel.sample(&mut self.rng);
        let mut acc = prefix;
        let mut hits = 0;
        for child in 1..=self.a1 {
            acc += self.rng.exp(self.rates.rate(child - 1, w));
            if acc > self.coarse {
                break;
            }
            hits += if depth + 1 == self.m { self.leaf(acc) } else { self.node(depth + 1, acc) };
        }
        hits
    }
}

/// Monte-Carlo estimate of the conservative-sequence event sum against its
/// analytic Chernoff bound.
pub fn conservative_bound_check(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    cfg: &BoundCheckConfig,
) -> Result<CriterionReport> {
    let BoundCheckConfig { a1, m, delta, replicas, seed, expectation, eps_b } = *cfg;
    if a1 < 2 {
        return Err(Error::Argument(format!("a1 must be at least 2, got {a1}")));
    }
    if !(1..=4).contains(&m) {
        return Err(Error::Argument(format!("sequence length m must lie in 1..=4, got {m}")));
    }
    if replicas < 2 {
        return Err(Error::Argument("at least two replicas are needed".into()));
    }
    if !(eps_b > 0.0 && eps_b < 1e-3) {
        return Err(Error::Argument(format!("eps_b must lie in (0, 1e-3), got {eps_b}")));
    }
    let lambda = lambda_default(spec, a1 as f64, delta)?;
    let mgf = mgf_y(spec, lambda, a1, 1e-10)?;
    let powers = PowerSums::new(spec.s(), a1 as usize)?;
    let mut zeta = 0.0;
    let mut lap_a1 = None;
    for n in 1..=a1 as usize {
        let l = laplace_with(spec, wmodel, &powers, lambda, Factors::First(n), expectation)?;
        zeta += l.value;
        lap_a1 = Some(l);
    }
    let lap_a1 = lap_a1.expect("a1 ≥ 2");
    let bound = mgf.value * lap_a1.value * zeta.powi(m as i32 - 1);

    let k = (8 * a1).max(a1 + 64);
    let s = spec.s();
    let tail = |j: u64| -> Result<(f64, f64)> {
        let t = s.recip_tail(j, 1e-12)?;
        Ok((t.value + t.err, s.inf_from(j)?))
    };
    let rates =
        Rates { spec, s: (0..k).map(|i| s.eval(i)).collect::<Result<_>>()?, at_a1: tail(a1)?, at_k: tail(k)?, k };
    let counts: Vec<u64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = Stream::new(seed, Purpose::BoundCheck, r);
            let w_root = wmodel.sample(&mut rng);
            let coarse = rates.residual_cap(rates.at_a1, w_root, eps_b);
            let mut walk = Walk { rates: &rates, wmodel, rng, a1, m, w_root, coarse, fine: None, eps: eps_b };
            if m == 1 {
                walk.leaf(0.0)
            } else {
                walk.node(1, 0.0)
            }
        })
        .collect();

    let sequences = (a1 as f64).powi(m as i32 - 1);
    let rn = replicas as f64;
    let total: f64 = counts.iter().map(|c| *c as f64).sum();
    let mean = total / rn;
    let var = counts.iter().map(|c| (*c as f64 - mean).powi(2)).sum::<f64>() / (rn - 1.0);
    let half = Z99 * (var / rn).sqrt();
    let hit_replicas = counts.iter().filter(|c| **c > 0).count() as u64;
    let correction = sequences * 2.0 * eps_b;
    let ci_upper = if hit_replicas >= MIN_HITS_NORMAL {
        mean + half
    } else {
        let k = hit_replicas as f64;
        let p = Beta::new(k + 1.0, rn - k)
            .map_err(|e| Error::Domain(format!("Clopper-Pearson bound: {e}")))?
            .inverse_cdf(0.99);
        sequences * p
    } + correction;
    let ci_lower = (mean - half).max(0.0);
    let verdict = if ci_upper <= bound {
        Verdict::Pass
    } else if ci_lower > bound {
        Verdict::FailEvidence
    } else {
        Verdict::Inconclusive
    };

    let mut report = CriterionReport::new(CriterionKind::ConservativeBound, verdict);
    report.echo_spec(spec);
    report.echo_weights(wmodel);
    report.param("a1", a1);
    report.param("m", m);
    report.param("delta", delta);
    report.param("replicas", replicas);
    report.param("seed", seed);
    report.param("expectation", expectation.id());
    report.param("eps_b", eps_b);
    report.param("lambda_sequence", "delta*ln(n)/mu_n");
    for (key, v) in [
        ("lambda", lambda),
        ("mgf_y", mgf.value),
        ("laplace_a1", lap_a1.value),
        ("zeta_sum", zeta),
        ("bound", bound),
        ("sequences", sequences),
        ("estimate", mean + correction),
        ("ci_upper", ci_upper),
        ("ci_lower", ci_lower),
        ("remainder_correction", correction),
        ("hit_replicas", hit_replicas as f64),
        ("truncation_k", k as f64),
    ] {
        report.summary.insert(key.into(), v);
    }
    Ok(report)
}
