//! `E[𝓛_λ(𝒫_n; W)] = E[∏_{i<n} f(i,W)/(f(i,W)+λ)]` and its infinite-product
//! variant.

use serde::Serialize;

use super::{Estimate, PowerSums};
use crate::error::{Error, Result};
use crate::fitness::{Bounded, FitnessKind, FitnessSpec};
use crate::rng::{Purpose, Stream};
use crate::weights::{WeightFamily, WeightModel};

const Z99: f64 = 2.575_829_303_548_901;

/// How the expectation over the weight is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Expectation {
    /// Deterministic bracket on the grid `Λ(w_k) = k h`, using that the
    /// integrand is increasing in `w`. Relative half-width at most `h/2`.
    Stieltjes { h: f64 },
    /// Plain Monte-Carlo over a panel of draws; 99% half-width.
    MonteCarlo { draws: usize, seed: u64 },
    /// Draws `Λ(W) ~ Exp(θ)` reweighted to the true law; 99% half-width.
    Importance { draws: usize, seed: u64, theta: f64 },
}

impl Default for Expectation {
    fn default() -> Self {
        Expectation::Stieltjes { h: 1.0 / 64.0 }
    }
}

impl Expectation {
    pub fn id(&self) -> &'static str {
        match self {
            Expectation::Stieltjes { .. } => "stieltjes",
            Expectation::MonteCarlo { .. } => "monte_carlo",
            Expectation::Importance { .. } => "importance",
        }
    }
}

/// How many factors of the product are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Factors {
    First(usize),
    All,
}

/// `ln ∏ f(i,w)/(f(i,w)+λ)`.
pub(crate) fn ln_product(
    spec: &FitnessSpec,
    powers: &PowerSums,
    lambda: f64,
    factors: Factors,
    w: f64,
) -> Result<Bounded> {
    if w.is_infinite() {
        return Ok(Bounded::exact(0.0));
    }
    let b = match spec.kind {
        FitnessKind::Multiplicative { g, .. } => {
            let x = lambda / g.eval(w);
            match factors {
                Factors::First(n) => powers.log1p_sum(x, n),
                Factors::All => powers.log1p_sum_all(x),
            }
        }
        FitnessKind::Additive { .. } => {
            let n = match factors {
                Factors::First(n) => n,
                Factors::All => powers.len(),
            };
            let mut acc = crate::fitness::Neumaier::new();
            for i in 0..n {
                acc.add((lambda / (powers.s(i) + w)).ln_1p());
            }
            let head = acc.value();
            let mut b = Bounded { value: head, err: 4.0 * f64::EPSILON * head };
            if factors == Factors::All {
                let t = powers.tail();
                let inf = powers.tail_inf();
                let hi = lambda * (t.value + t.err);
                let lo = lambda * (t.value - t.err) * (1.0 - (w + 0.5 * lambda) / inf);
                b.value += 0.5 * (hi + lo.max(0.0));
                b.err += 0.5 * (hi - lo.max(0.0));
            }
            b
        }
    };
    Ok(Bounded { value: -b.value, err: b.err })
}

/// Running `ln Σ e^{v}`.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    shift: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { shift: f64::NEG_INFINITY, scaled: 0.0 }
    }

    fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.shift {
            self.scaled = self.scaled * (self.shift - v).exp() + 1.0;
            self.shift = v;
        } else {
            self.scaled += (v - self.shift).exp();
        }
    }

    fn ln(&self) -> f64 {
        self.shift + self.scaled.ln()
    }
}

/// `E[e^{L(W)}]` for `L ≤ 0` non-decreasing in `w`.
pub(crate) fn expect_exp<F>(wmodel: &WeightModel, method: Expectation, mut lf: F) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Bounded>,
{
    match &wmodel.family {
        WeightFamily::Constant { c } => {
            let l = lf(*c)?;
            return Ok(Estimate::from_ln(l.value, l.err));
        }
        WeightFamily::Empirical(v) => {
            let mut s = LogSum::new();
            let mut e: f64 = 0.0;
            for w in v.iter() {
                let l = lf(*w)?;
                s.add(l.value);
                e = e.max(l.err);
            }
            return Ok(Estimate::from_ln(s.ln() - (v.len() as f64).ln(), e));
        }
        _ => {}
    }
    match method {
        Expectation::Stieltjes { h } => stieltjes(wmodel, h, lf),
        Expectation::MonteCarlo { draws, seed } => {
            let mut rng = Stream::new(seed, Purpose::WeightPanel, 0);
            let vals = (0..draws)
                .map(|_| lf(wmodel.sample(&mut rng)).map(|b| (b.value, b.err)))
                .collect::<Result<Vec<_>>>()?;
            Ok(sample_mean(&vals))
        }
        Expectation::Importance { draws, seed, theta } => {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::Argument(format!("importance tilt θ must lie in (0, 1], got {theta}")));
            }
            let mut rng = Stream::new(seed, Purpose::Importance, 0);
            let vals = (0..draws)
                .map(|_| {
                    let y = rng.exp1() / theta;
                    let lr = -(1.0 - theta) * y - theta.ln();
                    lf(wmodel.inverse_hazard(y)).map(|b| (b.value + lr, b.err))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(sample_mean(&vals))
        }
    }
}

/// Mean of `e^{v_d}` with a 99% normal half-width, in log form.
fn sample_mean(vals: &[(f64, f64)]) -> Estimate {
    let d = vals.len() as f64;
    let shift = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let e = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let xs: Vec<f64> = vals.iter().map(|v| (v.0 - shift).exp()).collect();
    let mean = xs.iter().sum::<f64>() / d;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (d - 1.0).max(1.0);
    let half = Z99 * (var / d).sqrt();
    let ln_err = if half < mean { ((mean + half) / mean).ln().max((mean / (mean - half)).ln()) } else { f64::INFINITY };
    let mut est = Estimate::from_ln(shift + mean.ln(), ln_err + e);
    est.err = (shift.exp() * half).max(est.value * e.exp_m1());
    est
}

/// `E ψ(W) = ψ(0) + ∫ S dψ`, bracketed cell by cell on `Λ(w_k) = k h` because
/// `S` decreases by exactly `e^{−h}` per cell.
fn stieltjes<F>(wmodel: &WeightModel, h: f64, mut lf: F) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Bounded>,
{
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::Argument(format!("Stieltjes cell width must lie in (0, 1], got {h}")));
    }
    let first = lf(wmodel.inverse_hazard(0.0))?;
    let mut max_err = first.err;
    let mut lo = LogSum::new();
    let mut hi = LogSum::new();
    lo.add(first.value);
    hi.add(first.value);
    let mut prev = first.value;
    let mut k: u64 = 0;
    loop {
        let y0 = k as f64 * h;
        let y1 = (k + 1) as f64 * h;
        let cur = lf(wmodel.inverse_hazard(y1))?;
        max_err = max_err.max(cur.err);
        let l1 = cur.value.max(prev).min(0.0);
        if l1 > prev {
            let d = l1 + (-(prev - l1).exp_m1()).ln();
            lo.add(d - y1);
            hi.add(d - y0);
        }
        prev = l1;
        k += 1;
        let rest = -y1 + (-l1.exp_m1()).ln();
        let mut floor = LogSum::new();
        floor.add(lo.ln() + 1e-16f64.ln());
        if hi.ln() > lo.ln() {
            floor.add(hi.ln() + (-(lo.ln() - hi.ln()).exp_m1()).ln() + 0.01f64.ln());
        }
        if rest < floor.ln() || l1 == 0.0 {
            hi.add(rest);
            break;
        }
        if k > 100_000_000 {
            return Err(Error::PrecisionUnreachable("Stieltjes bracket did not close".into()));
        }
    }
    let (a, b) = (lo.ln() - max_err, hi.ln() + max_err);
    let mid = a + ((b - a).exp().ln_1p() - std::f64::consts::LN_2);
    Ok(Estimate::from_ln(mid, (b - mid).max(mid - a)))
}

/// `E[∏_{i<n} f(i,W)/(f(i,W)+λ)]`.
pub fn laplace_p(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    lambda: f64,
    n: u64,
    method: Expectation,
) -> Result<Estimate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Argument(format!("tilt must be positive and finite, got {lambda}")));
    }
    if n == 0 {
        return Ok(Estimate::exact(1.0));
    }
    let powers = PowerSums::new(spec.s(), n as usize)?;
    laplace_with(spec, wmodel, &powers, lambda, Factors::First(n as usize), method)
}

pub(crate) fn laplace_with(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    powers: &PowerSums,
    lambda: f64,
    factors: Factors,
    method: Expectation,
) -> Result<Estimate> {
    expect_exp(wmodel, method, |w| ln_product(spec, powers, lambda, factors, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::{GFamily, SFamily};

    #[test]
    fn constant_single_factor() {
        let spec = FitnessSpec::multiplicative(GFamily::Unit, SFamily::Geometric { r: 2.0 });
        let w = WeightModel::constant(1.0).unwrap();
        let e = laplace_p(&spec, &w, 2.0, 1, Expectation::default()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert_eq!(laplace_p(&spec, &w, 2.0, 0, Expectation::default()).unwrap().value, 1.0);
    }

    #[test]
    fn stieltjes_matches_closed_form() {
        // g = w+1, one factor with s = 1: E[(1+W)/(1+W+λ)], W ~ Exp(1).
        let spec = FitnessSpec::multiplicative(
            GFamily::Shifted,
            SFamily::table(crate::fitness::SeqTable::new(vec![1.0], Some(2.0)).unwrap()),
        );
        let w = WeightModel::weibullish(1.0).unwrap();
        let lambda: f64 = 3.0;
        // 1 − λ e^{1+λ} E_1(1+λ)
        let e1 = statrs_e1(1.0 + lambda);
        let exact = 1.0 - lambda * (1.0 + lambda).exp() * e1;
        let est = laplace_p(&spec, &w, lambda, 1, Expectation::Stieltjes { h: 1.0 / 64.0 }).unwrap();
        assert!((est.value - exact).abs() <= est.err, "{} ± {} vs {exact}", est.value, est.err);
        assert!(est.err < 0.01 * exact);
    }

    fn statrs_e1(x: f64) -> f64 {
        let mut acc = 0.0;
        let h = 1e-4;
        let mut t = x;
        while t < x + 60.0 {
            acc +=
                h * ((-t).exp() / t + 4.0 * (-(t + h / 2.0)).exp() / (t + h / 2.0) + (-(t + h)).exp() / (t + h)) / 6.0;
            t += h;
        }
        acc
    }
}
