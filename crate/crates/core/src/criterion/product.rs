//! `𝓜_λ(Y_n) = ∏_{i≥n} f(i,w*)/(f(i,w*) − λ)`.

use super::Estimate;
use crate::error::{Error, Result};
use crate::fitness::{tail::MAX_TERMS, FitnessSpec, Neumaier};

/// Upper limit of the scan for the first index violating `λ < f(i, w*)`.
const VIOLATION_SCAN: u64 = 10_000_000;

/// The moment generating function of `Y_n` at `lambda`, with `ln` error at
/// most `tol`.
///
/// Beyond the explicit head at `M` the log-tail `Σ −ln(1 − λ/f)` lies in
/// `[λμ_M, λμ_M + λ²μ_M / (2 inf f_M (1−q))]` with `q = λ / inf f_M`.
pub fn mgf_y(spec: &FitnessSpec, lambda: f64, n: u64, tol: f64) -> Result<Estimate> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Argument(format!("tilt must be finite and non-negative, got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    if lambda == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    let w = spec.w_star;
    if spec.inf_from(n, w)? <= lambda {
        let end = n.saturating_add(VIOLATION_SCAN);
        for i in n..end {
            let f = spec.eval(i, w)?;
            if f <= lambda {
                return Err(Error::Domain(format!(
                    "tilt λ = {lambda} ≥ f({i}, w*) = {f}; the moment generating function of Y_{n} is infinite"
                )));
            }
        }
        return Err(Error::Domain(format!("tilt λ = {lambda} reaches inf_(i≥{n}) f(i, w*)")));
    }
    let mut acc = Neumaier::new();
    let mut m = n;
    loop {
        let inf = spec.inf_from(m, w)?;
        let q = lambda / inf;
        let mu = spec.mu_int(m, w, tol / (4.0 * lambda))?;
        let lo = lambda * (mu.value - mu.err).max(0.0);
        let hi = lambda * (mu.value + mu.err) * (1.0 + 0.5 * q / (1.0 - q));
        let half = 0.5 * (hi - lo);
        if half <= tol {
            let v = acc.value() + 0.5 * (hi + lo);
            return Ok(Estimate::from_ln(v, half + 4.0 * f64::EPSILON * v));
        }
        let next = (m + 8).max((m as f64 * 1.5).ceil() as u64);
        if next - n > MAX_TERMS {
            return Err(Error::PrecisionUnreachable(format!(
                "moment generating function of Y_{n} at λ = {lambda} not certified to {tol:e} within {MAX_TERMS} terms"
            )));
        }
        for i in m..next {
            acc.add(-(-lambda / spec.eval(i, w)?).ln_1p());
        }
        m = next;
    }
}
