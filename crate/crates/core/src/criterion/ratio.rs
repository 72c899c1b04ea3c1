//! The ratio `μ_{(δ ln n/(μ_n k_n))^{1/β}} / (μ_n k_n)` and its `g ≡ 1` form.

use super::{log_grid, mu_relative, CriterionKind, CriterionReport, Term, Verdict};
use crate::error::{Error, Result};
use crate::fitness::FitnessSpec;
use crate::weights::WeightModel;

/// Growth factor over the top two decades required for divergence evidence.
pub const GROWTH_FACTOR: f64 = 2.0;

fn resolve_beta(spec: &FitnessSpec, beta: Option<f64>) -> Result<f64> {
    let b = match beta {
        Some(b) => b,
        None => spec.growth.map(|g| g.beta).ok_or_else(|| {
            Error::Config("ratio criterion needs β, either given or from the growth certificate".into())
        })?,
    };
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Config(format!("β must lie in (0, 1), got {b}")));
    }
    Ok(b)
}

fn ratio_report(
    spec: &FitnessSpec,
    kind_label: &str,
    beta: f64,
    n_lo: u64,
    n_hi: u64,
    scale: impl Fn(f64) -> Result<(f64, f64)>,
) -> Result<CriterionReport> {
    if !(2 <= n_lo && n_lo < n_hi) {
        return Err(Error::Argument(format!("ratio range needs 2 ≤ lo < hi, got [{n_lo}, {n_hi}]")));
    }
    let w = spec.w_star;
    let mut report = CriterionReport::new(CriterionKind::AssKnMuRatio, Verdict::Inconclusive);
    report.echo_spec(spec);
    report.param("form", kind_label);
    report.param("beta", beta);
    report.param("n_lo", n_lo);
    report.param("n_hi", n_hi);
    let mut skipped = 0u64;
    let mut grid = log_grid(n_lo, n_hi, 4);
    if n_hi / 100 > n_lo && !grid.contains(&(n_hi / 100)) {
        grid.push(n_hi / 100);
        grid.sort_unstable();
    }
    for n in grid {
        let nf = n as f64;
        let mu_n = mu_relative(spec, nf, w, 1e-10)?;
        let (delta, k) = scale(nf)?;
        let denom = mu_n.value * k;
        let x = (delta * nf.ln() / denom).powf(1.0 / beta);
        if !(x >= 1.0) || !x.is_finite() {
            skipped += 1;
            continue;
        }
        let mu_x = mu_relative(spec, x, w, 1e-10)?;
        let r = mu_x.value / denom;
        let err = r * (mu_x.trunc_error / mu_x.value + mu_n.trunc_error / mu_n.value);
        report.terms.push(Term { n: nf, value: r, ln_value: r.ln(), error_bound: err, ln_error: err / r, lambda: x });
    }
    report.summary.insert("pre_asymptotic_skipped".into(), skipped as f64);
    let at = |n: f64| report.terms.iter().find(|t| t.n == n).copied();
    if let (Some(a), Some(b)) = (at((n_hi / 100) as f64), at(n_hi as f64)) {
        let growth = b.value / a.value;
        let growth_lo = (b.value - b.error_bound) / (a.value + a.error_bound);
        report.summary.insert("growth_top_two_decades".into(), growth);
        if growth_lo >= GROWTH_FACTOR {
            report.verdict = Verdict::DivergesEvidence;
        }
    }
    Ok(report)
}

/// `μ_{(δ ln n/(μ_n k_n))^{1/β}} / (μ_n k_n)` on a log grid; arguments below 1
/// are pre-asymptotic and skipped. Divergence evidence needs growth by
/// [`GROWTH_FACTOR`] from `n_hi/100` to `n_hi`.
pub fn assknmu_ratio(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    delta: f64,
    eps: f64,
    beta: Option<f64>,
    n_lo: u64,
    n_hi: u64,
) -> Result<CriterionReport> {
    if !(delta > 0.0 && delta < eps) {
        return Err(Error::Argument(format!("ratio criterion needs 0 < δ < ε, got δ = {delta}, ε = {eps}")));
    }
    let g = spec.g().ok_or_else(|| Error::UnsupportedFamily("the k_n ratio needs a multiplicative fitness".into()))?;
    let beta = resolve_beta(spec, beta)?;
    let mut report = ratio_report(spec, "assknmu", beta, n_lo, n_hi, |n| Ok((delta, wmodel.k_sequence(g, n, eps)?)))?;
    report.echo_weights(wmodel);
    report.param("delta", delta);
    report.param("eps", eps);
    Ok(report)
}

/// `μ_{(ln n / μ_n)^{1/β}} / μ_n`, the `g ≡ 1` specialisation with `k_n = 1`.
pub fn liminflb_ratio(spec: &FitnessSpec, beta: Option<f64>, n_lo: u64, n_hi: u64) -> Result<CriterionReport> {
    let beta = resolve_beta(spec, beta)?;
    ratio_report(spec, "liminflb", beta, n_lo, n_hi, |_| Ok((1.0, 1.0)))
}
