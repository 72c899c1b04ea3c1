use serde::Serialize;

use super::FitnessSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckVerdict {
    Pass,
    Fail,
}

/// Trend evidence for one limit statement.
///
/// The local log-slope `d ln(s(n)/n^e) / d ln n` of a window envelope is fitted as
/// `a + b / ln n` over dyadic windows; `asymptotic_slope` is `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitCheck {
    pub exponent: f64,
    pub asymptotic_slope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionRow {
    pub n: u64,
    pub s_over_n_beta: f64,
    pub s_over_n_p: f64,
    pub ratio: f64,
}

/// Finite-range evidence for the growth assumption. A pass means no violation
/// was found on the range, never that the asymptotic statement holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub family: String,
    pub n_lo: u64,
    pub n_hi: u64,
    pub beta: f64,
    pub p: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub n_cert: u64,
    pub lower_limit: LimitCheck,
    pub upper_limit: LimitCheck,
    pub max_ratio: f64,
    pub max_ratio_at: u64,
    pub ratio_pass: bool,
    pub rows: Vec<AssumptionRow>,
    pub verdict: CheckVerdict,
}

const REPORT_ROWS: usize = 200;

/// Checks `s(n)/n^β → ∞`, `s(n)/n^p → 0` and
/// `s(n) ≤ C n^{1+β−p} inf_{i≥n} s(i) / ln n` for `n ≥ N` on `[n_lo, n_hi]`.
pub fn check_assumption_s(spec: &FitnessSpec, n_lo: u64, n_hi: u64) -> Result<AssumptionReport> {
    let cert = spec
        .growth
        .ok_or_else(|| Error::Config("check_assumption_s needs a growth certificate (beta, p, C, N)".into()))?;
    if n_lo < 2 || n_hi <= n_lo {
        return Err(Error::Argument(format!("range [{n_lo}, {n_hi}] must satisfy 2 ≤ lo < hi")));
    }
    if n_hi / n_lo < 4 {
        return Err(Error::Argument("range must span at least two dyadic windows".into()));
    }
    let s = spec.s();
    let (beta, p) = (cert.beta, cert.p);
    let mut max_ratio = f64::NEG_INFINITY;
    let mut max_ratio_at = n_lo;
    let mut ratio_pass = true;
    let mut rows = Vec::new();
    let step = ((n_hi as f64 / n_lo as f64).ln() / REPORT_ROWS as f64).exp();
    let mut next_row = n_lo as f64;
    let mut low_env: Vec<(f64, f64)> = Vec::new();
    let mut up_env: Vec<(f64, f64)> = Vec::new();
    let mut win_start = n_lo;
    let (mut wmin, mut wmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in n_lo..=n_hi {
        let ls = s.ln_eval(n)?;
        let ln_n = (n as f64).ln();
        let l_beta = ls - beta * ln_n;
        let l_p = ls - p * ln_n;
        let ln_inf = s.inf_from(n).map(f64::ln).or_else(|_| s.ln_eval(n))?;
        let ln_ratio = ls + ln_n.ln() - (1.0 + beta - p) * ln_n - ln_inf;
        let ratio = ln_ratio.exp();
        if n >= cert.n && ratio > max_ratio {
            max_ratio = ratio;
            max_ratio_at = n;
        }
        if n >= cert.n && ratio > cert.c {
            ratio_pass = false;
        }
        if n as f64 >= next_row || n == n_hi {
            rows.push(AssumptionRow { n, s_over_n_beta: l_beta.exp(), s_over_n_p: l_p.exp(), ratio });
            while next_row <= n as f64 {
                next_row *= step;
            }
        }
        wmin = wmin.min(l_beta);
        wmax = wmax.max(l_p);
        if n + 1 == 2 * win_start || n == n_hi {
            if n + 1 == 2 * win_start {
                let mid = ((win_start as f64) * (n as f64)).sqrt().ln();
                low_env.push((mid, wmin));
                up_env.push((mid, wmax));
            }
            win_start = n + 1;
            wmin = f64::INFINITY;
            wmax = f64::NEG_INFINITY;
        }
    }
    if max_ratio == f64::NEG_INFINITY {
        max_ratio = 0.0;
    }
    let lower = limit_check(&low_env, beta, true)?;
    let upper = limit_check(&up_env, p, false)?;
    let verdict = if lower.pass && upper.pass && ratio_pass { CheckVerdict::Pass } else { CheckVerdict::Fail };
    Ok(AssumptionReport {
        family: s.id().to_string(),
        n_lo,
        n_hi,
        beta,
        p,
        c: cert.c,
        n_cert: cert.n,
        lower_limit: lower,
        upper_limit: upper,
        max_ratio,
        max_ratio_at,
        ratio_pass,
        rows,
        verdict,
    })
}

fn limit_check(env: &[(f64, f64)], exponent: f64, to_infinity: bool) -> Result<LimitCheck> {
    if env.len() < 3 {
        return Err(Error::Argument("range too short: need at least three complete dyadic windows".into()));
    }
    let slopes: Vec<(f64, f64)> = env
        .windows(2)
        .map(|w| {
            let x = 0.5 * (w[0].0 + w[1].0);
            (1.0 / x, (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        })
        .collect();
    let a = intercept(&slopes);
    let pass = if to_infinity { a > 0.0 } else { a < 0.0 };
    Ok(LimitCheck { exponent, asymptotic_slope: a, pass })
}

/// Least-squares intercept of `y = a + b x`.
fn intercept(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return my;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    my - (sxy / sxx) * mx
}
