//! Closed-form phase classification of the four canonical examples, and the
//! regularity ratio `max_{i≤n}(s(i)/(i+1)) / (s(n)/(n+1))`.

use std::collections::BTreeMap;

use super::{log_grid, CriterionKind, CriterionReport, Term, Verdict};
use crate::error::{Error, Result};
use crate::fitness::FitnessSpec;

/// The four canonical examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// `s(i) = (i+1) ln(i+2)^σ`, `P(W ≥ x) ≍ e^{−x^κ}`.
    I,
    /// `s(i) = (i+1) ln(i+2) exp((ln ln(i+3))^ν)`, `P(W ≥ x) ≍ exp(−e^{(ln x)^γ})`.
    II,
    /// `s(i) = (i+1) ln(i+2) (ln ln(i+3))^σ`, `P(W ≥ x) ≍ exp(−e^{x^κ})`.
    III,
    /// Case I off the squares, `i^α` on them; `P(W ≥ x) ≍ e^{−x^κ}`.
    IV,
}

impl Example {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "i" | "1" => Ok(Example::I),
            "ii" | "2" => Ok(Example::II),
            "iii" | "3" => Ok(Example::III),
            "iv" | "4" => Ok(Example::IV),
            _ => Err(Error::Config(format!("unknown example `{id}`; expected one of i, ii, iii, iv"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Example::I => "i",
            Example::II => "ii",
            Example::III => "iii",
            Example::IV => "iv",
        }
    }

    /// Parameter names in canonical order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Example::I | Example::III => &["sigma", "kappa"],
            Example::II => &["nu", "gamma"],
            Example::IV => &["sigma", "kappa", "alpha"],
        }
    }
}

fn get(params: &BTreeMap<String, f64>, ex: Example, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::Config(format!("example {} needs parameter `{key}`", ex.id())))
}

/// `Star` if the phase inequality holds strictly, `Path` if it is strictly
/// reversed, `Boundary` at equality (to a relative 1e-9).
pub fn classify_closed_form(example: Example, params: &BTreeMap<String, f64>) -> Result<CriterionReport> {
    let q = match example {
        Example::I | Example::III | Example::IV => {
            let sigma = get(params, example, "sigma")?;
            let kappa = get(params, example, "kappa")?;
            if !(sigma > 1.0) {
                return Err(Error::Domain(format!("σ must exceed 1, got {sigma}")));
            }
            if !(kappa > 0.0) {
                return Err(Error::Domain(format!("κ must be positive, got {kappa}")));
            }
            if example == Example::IV {
                let alpha = get(params, example, "alpha")?;
                if !(alpha > 0.5 && alpha <= 1.0) {
                    return Err(Error::Domain(format!("α must lie in (1/2, 1], got {alpha}")));
                }
            }
            (sigma - 1.0) * kappa
        }
        Example::II => {
            let nu = get(params, example, "nu")?;
            let gamma = get(params, example, "gamma")?;
            if !(nu > 0.0 && nu < 1.0) {
                return Err(Error::Domain(format!("ν must lie in (0, 1), got {nu}")));
            }
            if !(gamma > 1.0) {
                return Err(Error::Domain(format!("γ must exceed 1, got {gamma}")));
            }
            nu * gamma
        }
    };
    let verdict = if (q - 1.0).abs() <= 1e-9 {
        Verdict::Boundary
    } else if q > 1.0 {
        Verdict::Star
    } else {
        Verdict::Path
    };
    let mut report = CriterionReport::new(CriterionKind::ClosedFormPhase, verdict);
    report.param("example", example.id());
    for name in example.param_names() {
        report.param(name, params[*name]);
    }
    report.summary.insert("criterion_value".into(), q);
    Ok(report)
}

/// `r(n) = max_{i≤n}(s(i)/(i+1)) / (s(n)/(n+1))` swept over `[0, n_hi]`.
///
/// `Pass` when `sup r ≤ kappa_search_max` (the smallest admissible κ is
/// reported); `FailEvidence` when the dyadic-block maxima of `r` keep growing.
pub fn iyer_condition(spec: &FitnessSpec, n_lo: u64, n_hi: u64, kappa_search_max: f64) -> Result<CriterionReport> {
    if !(n_lo < n_hi) {
        return Err(Error::Argument(format!("sweep range needs lo < hi, got [{n_lo}, {n_hi}]")));
    }
    let s = spec.s();
    let mut grid = log_grid(n_lo.max(1), n_hi, 10).into_iter().peekable();
    let mut running = 0.0f64;
    let mut sup = 0.0f64;
    let mut terms = Vec::new();
    let mut blocks: Vec<(u64, f64)> = Vec::new();
    let mut block_best = (0u64, 0.0f64);
    let mut block_end = 2u64;
    for n in 0..=n_hi {
        let d = s.eval(n)? / (n as f64 + 1.0);
        running = running.max(d);
        let r = running / d;
        sup = sup.max(r);
        if n >= n_lo {
            if r > block_best.1 {
                block_best = (n, r);
            }
            if grid.peek() == Some(&n) {
                grid.next();
                terms.push(Term {
                    n: n as f64,
                    value: r,
                    ln_value: r.ln(),
                    error_bound: 0.0,
                    ln_error: 0.0,
                    lambda: 0.0,
                });
            }
        }
        if n + 1 == block_end || n == n_hi {
            if block_best.1 > 0.0 {
                blocks.push(block_best);
            }
            block_best = (0, 0.0);
            block_end *= 2;
        }
    }
    for (n, r) in &blocks {
        if !terms.iter().any(|t| t.n == *n as f64) {
            terms.push(Term {
                n: *n as f64,
                value: *r,
                ln_value: r.ln(),
                error_bound: 0.0,
                ln_error: 0.0,
                lambda: 0.0,
            });
        }
    }
    terms.sort_by(|a, b| a.n.total_cmp(&b.n));
    let growing = blocks.len() >= 5 && {
        let last = blocks[blocks.len() - 1].1;
        let earlier = blocks[blocks.len() - 5].1;
        last >= 2.0 * earlier
    };
    let verdict = if sup <= kappa_search_max {
        Verdict::Pass
    } else if growing {
        Verdict::FailEvidence
    } else {
        Verdict::Inconclusive
    };
    let mut report = CriterionReport::new(CriterionKind::IyerCondition, verdict);
    report.echo_spec(spec);
    report.param("n_lo", n_lo);
    report.param("n_hi", n_hi);
    report.param("kappa_search_max", kappa_search_max);
    report.summary.insert("sup_ratio".into(), sup);
    if verdict == Verdict::Pass {
        report.summary.insert("kappa".into(), sup);
    }
    report.terms = terms;
    Ok(report)
}
