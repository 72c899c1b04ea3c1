//! Fitness functions `f(j, w)` and the residual sums `μ_n^w = Σ_{i≥n} 1/f(i,w)`.
//!
//! The multiplicative form `f(j, w) = g(w) s(j)` covers every builtin family;
//! [`FitnessKind::Additive`] (`f = s(j) + w`) is the one general rule provided.
//! Tail sums carry certified error bounds: the explicit head is summed and the
//! remainder is bracketed between two integrals of the convex summand.

mod assumption;
mod family;
pub mod tail;

use std::collections::BTreeMap;

use serde::Serialize;

pub use assumption::{check_assumption_s, AssumptionReport, AssumptionRow, CheckVerdict, LimitCheck};
pub use family::{SFamily, SeqTable};
pub use tail::{Bounded, Neumaier};

use crate::error::{Error, Result};

/// Weight part `g(w)` of a multiplicative fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFamily {
    /// `g(w) = w + 1`, minimised at `w* = 0`.
    Shifted,
    /// `g ≡ 1`: the fitness ignores weights.
    Unit,
}

impl GFamily {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "shifted" | "w_plus_one" => Ok(GFamily::Shifted),
            "unit" | "one" => Ok(GFamily::Unit),
            other => Err(Error::Config(format!("unknown g function `{other}` (known: shifted, unit)"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            GFamily::Shifted => "shifted",
            GFamily::Unit => "unit",
        }
    }

    #[inline]
    pub fn eval(self, w: f64) -> f64 {
        match self {
            GFamily::Shifted => w + 1.0,
            GFamily::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitnessKind {
    Multiplicative {
        g: GFamily,
        s: SFamily,
    },
    /// `f(j, w) = s(j) + w`.
    Additive {
        s: SFamily,
    },
}

/// Certificate for the growth assumption on `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub beta: f64,
    pub p: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

impl GrowthCertificate {
    pub fn new(beta: f64, p: f64, c: f64, n: u64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!("growth beta must lie in (0,1), got {beta}")));
        }
        if !(p > 1.0 && p < 1.0 + beta) {
            return Err(Error::Config(format!("growth p must lie in (1, 1+beta), got {p}")));
        }
        if !(c > 0.0) || n == 0 {
            return Err(Error::Config("growth C must be positive and N at least 1".into()));
        }
        Ok(GrowthCertificate { beta, p, c, n })
    }
}

/// An attachment rule with its minimising weight and optional growth certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessSpec {
    pub kind: FitnessKind,
    pub w_star: f64,
    pub growth: Option<GrowthCertificate>,
}

/// `μ_n^w` with its certified error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEvaluation {
    pub n: f64,
    pub w: f64,
    pub value: f64,
    pub trunc_error: f64,
}

impl FitnessSpec {
    /// `g(w) s(j)` with `w* = 0`.
    pub fn multiplicative(g: GFamily, s: SFamily) -> Self {
        FitnessSpec { kind: FitnessKind::Multiplicative { g, s }, w_star: 0.0, growth: None }
    }

    /// `s(j) + w` with `w* = 0`.
    pub fn additive(s: SFamily) -> Self {
        FitnessSpec { kind: FitnessKind::Additive { s }, w_star: 0.0, growth: None }
    }

    pub fn with_growth(mut self, growth: GrowthCertificate) -> Self {
        self.growth = Some(growth);
        self
    }

    /// The degree part `s`.
    pub fn s(&self) -> &SFamily {
        match &self.kind {
            FitnessKind::Multiplicative { s, .. } | FitnessKind::Additive { s } => s,
        }
    }

    /// `Some(g)` for multiplicative rules.
    pub fn g(&self) -> Option<GFamily> {
        match self.kind {
            FitnessKind::Multiplicative { g, .. } => Some(g),
            FitnessKind::Additive { .. } => None,
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        self.g().is_some()
    }

    /// Every parameter, flattened for report metadata.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = self.s().params();
        m.insert("w_star".into(), self.w_star);
        if let Some(c) = self.growth {
            m.insert("beta".into(), c.beta);
            m.insert("p".into(), c.p);
            m.insert("C".into(), c.c);
            m.insert("N".into(), c.n as f64);
        }
        m
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FitnessKind::Multiplicative { g, s } => format!("{}*{}", g.id(), s.id()),
            FitnessKind::Additive { s } => format!("additive:{}", s.id()),
        }
    }

    /// `f(j, w)`.
    pub fn eval(&self, j: u64, w: f64) -> Result<f64> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::Domain(format!("weight {w} outside the support [0, ∞)")));
        }
        let s = self.s().eval(j)?;
        let v = match self.kind {
            FitnessKind::Multiplicative { g, .. } => g.eval(w) * s,
            FitnessKind::Additive { .. } => s + w,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericOverflow(format!("f({j}, {w}) is not finite")))
        }
    }

    /// `ln f(j, w)`; finite where `f` itself would overflow.
    pub fn ln_eval(&self, j: u64, w: f64) -> Result<f64> {
        let ls = self.s().ln_eval(j)?;
        match self.kind {
            FitnessKind::Multiplicative { g, .. } => Ok(g.eval(w).ln() + ls),
            FitnessKind::Additive { .. } => {
                let lw = w.ln();
                let (hi, lo) = if ls > lw { (ls, lw) } else { (lw, ls) };
                Ok(hi + (lo - hi).exp().ln_1p())
            }
        }
    }

    /// `inf_{i ≥ n} f(i, w)`.
    pub fn inf_from(&self, n: u64, w: f64) -> Result<f64> {
        let s = self.s().inf_from(n)?;
        Ok(match self.kind {
            FitnessKind::Multiplicative { g, .. } => g.eval(w) * s,
            FitnessKind::Additive { .. } => s + w,
        })
    }

    /// `Σ_{i ≥ n} 1/f(i, w)` at an integer index.
    pub fn mu_int(&self, n: u64, w: f64, tol: f64) -> Result<Bounded> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::Domain(format!("weight {w} outside the support [0, ∞)")));
        }
        match self.kind {
            FitnessKind::Multiplicative { g, ref s } => {
                let gw = g.eval(w);
                let t = s.recip_tail(n, tol * gw)?;
                Ok(Bounded { value: t.value / gw, err: t.err / gw + f64::EPSILON * t.value / gw })
            }
            FitnessKind::Additive { ref s } => additive_tail(s, n, w, tol),
        }
    }

    /// `μ_n^w` for real `n ≥ 0`, linearly interpolated between integers.
    pub fn mu(&self, n: f64, w: f64, tol: f64) -> Result<MuEvaluation> {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("mu index must be a finite non-negative real, got {n}")));
        }
        if n > 9.0e15 {
            return Err(Error::Domain(format!("mu index {n} exceeds the exact integer range")));
        }
        let lo = n.floor();
        let frac = n - lo;
        let (value, err) = if frac == 0.0 {
            let b = self.mu_int(lo as u64, w, tol)?;
            (b.value, b.err)
        } else {
            let a = self.mu_int(lo as u64, w, tol)?;
            let b = self.mu_int(lo as u64 + 1, w, tol)?;
            let v = (1.0 - frac) * a.value + frac * b.value;
            (v, (1.0 - frac) * a.err + frac * b.err + 2.0 * f64::EPSILON * v)
        };
        Ok(MuEvaluation { n, w, value, trunc_error: err })
    }
}

/// `Σ_{i≥n} 1/(s(i)+w)`. Beyond `M` the tail lies in
/// `[T(M) − w T(M)/inf s_M, T(M)]` where `T` is the tail of `1/s`.
fn additive_tail(s: &SFamily, n: u64, w: f64, tol: f64) -> Result<Bounded> {
    let mut acc = Neumaier::new();
    let mut m = n;
    loop {
        let t = s.recip_tail(m, tol / 4.0)?;
        let width = w * t.value / s.inf_from(m)?;
        let half = 0.5 * width + t.err;
        if half <= tol {
            let head = acc.value();
            return Ok(Bounded {
                value: head + t.value - 0.5 * width,
                err: half + 4.0 * f64::EPSILON * (head + t.value),
            });
        }
        let next = (m + 8).max((m as f64 * 1.25).ceil() as u64);
        if next - n > tail::MAX_TERMS {
            return Err(Error::PrecisionUnreachable(format!("additive tail from {n} not certified to {tol:e}")));
        }
        for i in m..next {
            acc.add(1.0 / (s.eval(i)? + w));
        }
        m = next;
    }
}

/// `μ_k^{w}` for every integer `k ∈ [0, n_max]`, by backward accumulation from a
/// certified `μ_{n_max}`.
#[derive(Debug, Clone)]
pub struct MuTable {
    values: Vec<f64>,
    err: Vec<f64>,
    pub w: f64,
}

impl MuTable {
    pub fn build(spec: &FitnessSpec, w: f64, n_max: u64, tol: f64) -> Result<Self> {
        let top = spec.mu_int(n_max, w, tol)?;
        let len = n_max as usize + 1;
        let mut values = vec![0.0; len];
        let mut err = vec![0.0; len];
        values[len - 1] = top.value;
        err[len - 1] = top.err;
        let mut acc = Neumaier::new();
        acc.add(top.value);
        for k in (0..n_max).rev() {
            acc.add(1.0 / spec.eval(k, w)?);
            let v = acc.value();
            values[k as usize] = v;
            err[k as usize] = top.err + 4.0 * f64::EPSILON * v;
        }
        Ok(MuTable { values, err, w })
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, k: u64) -> Bounded {
        Bounded { value: self.values[k as usize], err: self.err[k as usize] }
    }

    /// Linear interpolation at real `x ∈ [0, n_max]`.
    pub fn at(&self, x: f64) -> Option<Bounded> {
        if !(x >= 0.0) || x > self.n_max() as f64 {
            return None;
        }
        let lo = x.floor() as u64;
        let frac = x - lo as f64;
        if frac == 0.0 {
            return Some(self.get(lo));
        }
        let a = self.get(lo);
        let b = self.get(lo + 1);
        Some(Bounded { value: (1.0 - frac) * a.value + frac * b.value, err: (1.0 - frac) * a.err + frac * b.err })
    }
}
