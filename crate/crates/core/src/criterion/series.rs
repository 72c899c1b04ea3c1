//! The star series and the path series.

use rayon::prelude::*;
use serde::Serialize;

use super::laplace::{laplace_with, Factors};
use super::{
    decay_verdict, log_grid, mgf_y, mu_relative, CriterionKind, CriterionReport, Expectation, PartialSum, PowerSums,
    Term,
};
use crate::error::{Error, Result};
use crate::fitness::{FitnessSpec, MuTable};
use crate::weights::WeightModel;

/// Grid and accuracy settings shared by the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConfig {
    pub n_lo: u64,
    pub n_hi: u64,
    pub per_decade: usize,
    pub expectation: Expectation,
    /// Tolerance on `ln 𝓜_λ(Y_n)`.
    pub mgf_tol: f64,
}

impl SeriesConfig {
    pub fn new(n_lo: u64, n_hi: u64) -> Self {
        SeriesConfig { n_lo, n_hi, per_decade: 10, expectation: Expectation::default(), mgf_tol: 1e-6 }
    }

    fn check(&self) -> Result<()> {
        if !(2 <= self.n_lo && self.n_lo < self.n_hi) {
            return Err(Error::Argument(format!("series range needs 2 ≤ lo < hi, got [{}, {}]", self.n_lo, self.n_hi)));
        }
        if self.per_decade == 0 {
            return Err(Error::Argument("series grid needs at least one point per decade".into()));
        }
        Ok(())
    }
}

fn mu_table(spec: &FitnessSpec, w: f64, n_max: u64) -> Result<MuTable> {
    let top = mu_relative(spec, n_max as f64, w, 1e-12)?;
    let table = MuTable::build(spec, w, n_max, (1e-12 * top.value).max(f64::MIN_POSITIVE))?;
    if !(table.get(n_max).value > 0.0) {
        return Err(Error::Domain(format!("μ_n underflows to zero by n = {n_max}; shrink the range")));
    }
    Ok(table)
}

/// Smallest `N ≥ 2` such that `λ_n < inf_{i≥n} f(i, w*)` for every
/// `n ∈ [N, n_max]`, with `λ_n = δ ln n / μ_n`. `None` if even `n_max` fails.
pub fn minimal_valid_n(spec: &FitnessSpec, delta: f64, n_max: u64) -> Result<Option<u64>> {
    let table = mu_table(spec, spec.w_star, n_max)?;
    valid_from(spec, &table, delta)
}

fn valid_from(spec: &FitnessSpec, table: &MuTable, delta: f64) -> Result<Option<u64>> {
    let n_max = table.n_max();
    let mut n = n_max;
    while n >= 2 {
        let lambda = delta * (n as f64).ln() / table.get(n).value;
        if lambda >= spec.inf_from(n, spec.w_star)? {
            break;
        }
        n -= 1;
    }
    Ok(if n == n_max { None } else { Some((n + 1).max(2)) })
}

fn grid_with(lo: u64, hi: u64, extra: u64, per_decade: usize) -> Vec<u64> {
    let mut g = log_grid(lo, hi, per_decade);
    if extra > lo && extra < hi && !g.contains(&extra) {
        g.push(extra);
        g.sort_unstable();
    }
    g
}

/// `Σ_{n ∈ [g_0, g_k]} t(n)` at every grid point, interpolating `t` as a
/// power law between neighbours.
fn interpolated_sums(terms: &[Term]) -> Vec<PartialSum> {
    let mut out = Vec::with_capacity(terms.len());
    let mut acc = terms[0].value;
    out.push(PartialSum { n: terms[0].n, value: acc });
    for w in terms.windows(2) {
        let (a, b) = (w[0].n, w[1].n);
        let slope = (w[1].ln_value - w[0].ln_value) / (b / a).ln();
        let t = |x: f64| (w[0].ln_value + slope * (x / a).ln()).exp();
        let span = (b - a) as u64;
        let add = if span <= 64 {
            (1..=span).map(|k| t(a + k as f64)).sum::<f64>()
        } else {
            let integral = if (slope + 1.0).abs() < 1e-12 {
                w[0].value * a * (b / a).ln()
            } else {
                w[0].value * a * ((b / a).powf(slope + 1.0) - 1.0) / (slope + 1.0)
            };
            integral + 0.5 * (w[1].value - w[0].value)
        };
        acc += add.max(0.0);
        out.push(PartialSum { n: b, value: acc });
    }
    out
}

fn finish(report: &mut CriterionReport, n_lo: u64, n_hi: u64) {
    report.partial_sums = interpolated_sums(&report.terms);
    let total = report.partial_sums.last().map_or(0.0, |p| p.value);
    let before_lo = report
        .partial_sums
        .iter()
        .zip(&report.terms)
        .find(|(p, _)| p.n >= n_lo as f64)
        .map_or(0.0, |(p, t)| p.value - t.value);
    report.summary.insert("partial_sum_head_inclusive".into(), total);
    report.summary.insert("partial_sum_head_exclusive".into(), total - before_lo);
    let (v, slope, spread) = decay_verdict(&report.terms, n_hi as f64);
    report.verdict = v;
    report.summary.insert("fitted_exponent".into(), slope);
    report.summary.insert("fitted_exponent_spread".into(), spread);
}

/// Terms `𝓜_{λ_n}(Y_n)·E[𝓛_{λ_n}(𝒫_n; W)]` with `λ_n = δ ln n / μ_n`, from
/// the minimal valid `N` up to `n_hi`.
pub fn star_series(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    delta: f64,
    cfg: &SeriesConfig,
) -> Result<CriterionReport> {
    cfg.check()?;
    if !(delta > 0.0) {
        return Err(Error::Argument(format!("delta must be positive, got {delta}")));
    }
    let table = mu_table(spec, spec.w_star, cfg.n_hi)?;
    let n0 = valid_from(spec, &table, delta)?.ok_or_else(|| {
        Error::Domain(format!(
            "λ_n = δ ln n / μ_n with δ = {delta} reaches inf_(i≥n) f(i, w*) at n = {}; no valid starting index in range",
            cfg.n_hi
        ))
    })?;
    let powers = PowerSums::new(spec.s(), cfg.n_hi as usize + 1)?;
    let grid = grid_with(n0, cfg.n_hi, cfg.n_lo, cfg.per_decade);
    let terms = grid
        .par_iter()
        .map(|&n| {
            let lambda = delta * (n as f64).ln() / table.get(n).value;
            let m = mgf_y(spec, lambda, n, cfg.mgf_tol).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("structural failure of the λ choice at n = {n}: {msg}")),
                other => other,
            })?;
            let l = laplace_with(spec, wmodel, &powers, lambda, Factors::First(n as usize), cfg.expectation)?;
            let t = m.times(l);
            Ok(Term {
                n: n as f64,
                value: t.value,
                ln_value: t.ln_value,
                error_bound: t.err,
                ln_error: t.ln_err,
                lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CriterionReport::new(CriterionKind::StarSeries, super::Verdict::Inconclusive);
    report.echo_spec(spec);
    report.echo_weights(wmodel);
    report.param("delta", delta);
    report.param("lambda_sequence", "delta*ln(n)/mu_n");
    report.param("n_lo", cfg.n_lo);
    report.param("n_hi", cfg.n_hi);
    report.param("expectation", cfg.expectation.id());
    report.param("mgf_tol", cfg.mgf_tol);
    report.summary.insert("minimal_valid_n".into(), n0 as f64);
    report.terms = terms;
    finish(&mut report, cfg.n_lo, cfg.n_hi);
    Ok(report)
}

/// `want`, shortened to stop before `s` exceeds `e^690`; the remainder is
/// carried by the certified tail.
fn explicit_len(spec: &FitnessSpec, want: usize) -> Result<usize> {
    let s = spec.s();
    for i in 0..want as u64 {
        if s.ln_eval(i)? > 690.0 {
            return Ok((i as usize).max(1));
        }
    }
    Ok(want)
}

/// Terms `E[∏_{i≥0} f(i,W)/(f(i,W) + c ln n / μ_n^w)]` for `n ∈ [1, n_hi]`.
pub fn path_series(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    c: f64,
    w: f64,
    cfg: &SeriesConfig,
) -> Result<CriterionReport> {
    cfg.check()?;
    if !(c > 1.0) {
        return Err(Error::Argument(format!("path criterion needs c > 1, got {c}")));
    }
    let table = mu_table(spec, w, cfg.n_hi)?;
    let powers = PowerSums::new(spec.s(), explicit_len(spec, (cfg.n_hi as usize + 1).max(1 << 18))?)?;
    let grid = grid_with(1, cfg.n_hi, cfg.n_lo, cfg.per_decade);
    let terms = grid
        .par_iter()
        .map(|&n| {
            let lambda = c * (n as f64).ln() / table.get(n).value;
            let l = laplace_with(spec, wmodel, &powers, lambda, Factors::All, cfg.expectation)?;
            Ok(Term {
                n: n as f64,
                value: l.value,
                ln_value: l.ln_value,
                error_bound: l.err,
                ln_error: l.ln_err,
                lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CriterionReport::new(CriterionKind::PathSeries, super::Verdict::Inconclusive);
    report.echo_spec(spec);
    report.echo_weights(wmodel);
    report.param("c", c);
    report.param("w", w);
    report.param("lambda_sequence", "c*ln(n)/mu_n^w");
    report.param("n_lo", cfg.n_lo);
    report.param("n_hi", cfg.n_hi);
    report.param("expectation", cfg.expectation.id());
    report.terms = terms;
    finish(&mut report, cfg.n_lo, cfg.n_hi);
    Ok(report)
}
