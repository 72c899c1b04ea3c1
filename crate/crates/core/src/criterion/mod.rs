//! Numerical evaluation of the phase criteria.
//!
//! Series criteria are evaluated on a grid of `n` and graded by the fitted
//! local decay exponent over the top decade. A finite run can only supply
//! evidence for convergence or divergence, so verdicts are named accordingly.

mod closed;
mod conservative;
mod laplace;
mod powers;
mod product;
mod ratio;
mod series;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fitness::{FitnessSpec, MuEvaluation};

pub use closed::{classify_closed_form, iyer_condition, Example};
pub use conservative::{conservative_bound_check, BoundCheckConfig};
pub use laplace::{laplace_p, Expectation};
pub use powers::PowerSums;
pub use product::mgf_y;
pub use ratio::{assknmu_ratio, liminflb_ratio};
pub use series::{minimal_valid_n, path_series, star_series, SeriesConfig};

/// Margin around the critical exponent −1 in series verdicts.
pub const SLOPE_MARGIN: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriterionKind {
    StarSeries,
    PathSeries,
    AssKnMuRatio,
    IyerCondition,
    ClosedFormPhase,
    ConservativeBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergesEvidence,
    DivergesEvidence,
    Inconclusive,
    Star,
    Path,
    Boundary,
    Pass,
    FailEvidence,
}

impl Verdict {
    pub fn id(self) -> &'static str {
        match self {
            Verdict::ConvergesEvidence => "converges_evidence",
            Verdict::DivergesEvidence => "diverges_evidence",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Star => "star",
            Verdict::Path => "path",
            Verdict::Boundary => "boundary",
            Verdict::Pass => "pass",
            Verdict::FailEvidence => "fail_evidence",
        }
    }
}

/// A positive quantity held in log form, with a symmetric log-error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
    pub ln_value: f64,
    pub ln_err: f64,
}

impl Estimate {
    pub fn from_ln(ln_value: f64, ln_err: f64) -> Self {
        let value = ln_value.exp();
        Estimate { value, err: value * ln_err.exp_m1(), ln_value, ln_err }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, err: 0.0, ln_value: value.ln(), ln_err: 0.0 }
    }

    /// Product of independent factors; log errors add.
    pub fn times(self, other: Estimate) -> Estimate {
        Estimate::from_ln(self.ln_value + other.ln_value, self.ln_err + other.ln_err)
    }
}

/// One evaluated term. `ln_value` stays finite when `value` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub n: f64,
    pub value: f64,
    pub ln_value: f64,
    pub error_bound: f64,
    pub ln_error: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialSum {
    pub n: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub verdict: Verdict,
    pub params: BTreeMap<String, Value>,
    pub summary: BTreeMap<String, f64>,
    pub terms: Vec<Term>,
    pub partial_sums: Vec<PartialSum>,
}

impl CriterionReport {
    pub(crate) fn new(kind: CriterionKind, verdict: Verdict) -> Self {
        CriterionReport {
            kind,
            verdict,
            params: BTreeMap::new(),
            summary: BTreeMap::new(),
            terms: Vec::new(),
            partial_sums: Vec::new(),
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub(crate) fn echo_spec(&mut self, spec: &FitnessSpec) {
        self.param("fitness", spec.describe());
        for (k, v) in spec.params() {
            self.param(&format!("fitness.{k}"), v);
        }
    }

    pub(crate) fn echo_weights(&mut self, wmodel: &crate::weights::WeightModel) {
        self.param("weights", wmodel.id());
        for (k, v) in wmodel.params() {
            self.param(&format!("weights.{k}"), v);
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    /// `n,term,ln_term,error,partial_sum`, preceded by `# key=value` lines.
    pub fn write_csv<W: Write>(&self, metadata: &[String], mut out: W) -> Result<()> {
        writeln!(out, "# kind={:?} verdict={}", self.kind, self.verdict.id())?;
        for line in metadata {
            writeln!(out, "# {line}")?;
        }
        for (k, v) in &self.params {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "n,term,ln_term,error,partial_sum")?;
        let sums: BTreeMap<u64, f64> = self.partial_sums.iter().map(|p| (p.n.to_bits(), p.value)).collect();
        for t in &self.terms {
            let ps = sums.get(&t.n.to_bits()).map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(out, "{},{:e},{:e},{:e},{}", t.n, t.value, t.ln_value, t.error_bound, ps)?;
        }
        Ok(())
    }
}

/// `λ_n = δ ln n / μ_n(w*)`.
pub fn lambda_default(spec: &FitnessSpec, n: f64, delta: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::Argument(format!("lambda_default needs n ≥ 2, got {n}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Argument(format!("lambda_default needs delta > 0, got {delta}")));
    }
    let mu = mu_relative(spec, n, spec.w_star, 1e-12)?;
    Ok(delta * n.ln() / mu.value)
}

/// `μ_x^w` certified to `rel` relative to its own size.
pub(crate) fn mu_relative(spec: &FitnessSpec, x: f64, w: f64, rel: f64) -> Result<MuEvaluation> {
    let mu0 = spec.mu_int(0, w, 1.0)?.value;
    let rough = spec.mu(x, w, 1e-3 * mu0)?.value;
    spec.mu(x, w, (rel * rough).max(f64::MIN_POSITIVE))
}

/// Least-squares slope of `y` on `x` and the worst-case shift of the slope when
/// each `y_k` moves by at most `e_k`.
pub(crate) fn ls_slope(x: &[f64], y: &[f64], e: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let xm = x.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    let mut b = 0.0;
    let mut spread = 0.0;
    for k in 0..x.len() {
        let c = (x[k] - xm) / sxx;
        b += c * y[k];
        spread += c.abs() * e[k];
    }
    (b, spread)
}

/// Verdict from the fitted exponent of `terms` over `[top/10, top]`.
pub(crate) fn decay_verdict(terms: &[Term], top: f64) -> (Verdict, f64, f64) {
    let pick: Vec<&Term> = terms.iter().filter(|t| t.n >= top / 10.0 && t.n <= top).collect();
    if pick.len() < 3 {
        return (Verdict::Inconclusive, f64::NAN, f64::NAN);
    }
    let x: Vec<f64> = pick.iter().map(|t| t.n.ln()).collect();
    let y: Vec<f64> = pick.iter().map(|t| t.ln_value).collect();
    let e: Vec<f64> = pick.iter().map(|t| t.ln_error).collect();
    let (b, spread) = ls_slope(&x, &y, &e);
    let (lo, hi) = (b - spread, b + spread);
    let v = if hi < -1.0 - SLOPE_MARGIN {
        Verdict::ConvergesEvidence
    } else if lo > -1.0 + SLOPE_MARGIN {
        Verdict::DivergesEvidence
    } else {
        Verdict::Inconclusive
    };
    (v, b, spread)
}

/// Log-spaced integer grid on `[lo, hi]` with `per_decade` points per decade,
/// always including both ends.
pub(crate) fn log_grid(lo: u64, hi: u64, per_decade: usize) -> Vec<u64> {
    let mut out = vec![lo];
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let steps = (((b - a) / std::f64::consts::LN_10) * per_decade as f64).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let v = (a + (b - a) * k as f64 / steps as f64).exp().round() as u64;
        let v = v.clamp(lo, hi);
        if v > *out.last().unwrap() {
            out.push(v);
        }
    }
    if *out.last().unwrap() != hi {
        out.push(hi);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power() {
        let x: Vec<f64> = (1..6).map(|k| (k as f64).ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 1.0).collect();
        let (b, s) = ls_slope(&x, &y, &[0.0; 5]);
        assert!((b + 2.0).abs() < 1e-12);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn grid_has_ends() {
        let g = log_grid(100, 100_000, 10);
        assert_eq!(g[0], 100);
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
