//! Vertex-weight distributions.
//!
//! Each light-tailed family is fixed to an exact survival function inside its
//! tail class so that runs are reproducible:
//!
//! | family | `P(W ≥ x)` | tail shape `t(x)` | `(c_lo, c_hi)` |
//! |---|---|---|---|
//! | `Weibullish(κ)` | `e^{−x^κ}` | same | `(1, 1)` |
//! | `DoubleExp(κ)` | `exp(1 − e^{x^κ})` | `exp(−e^{x^κ})` | `(e, e)` |
//! | `DoubleExpLog(γ)` | `e^{−x}` below 1, `exp(−e^{(ln x)^γ})` above | same | `(1, 1)` |
//!
//! Sampling inverts the cumulative hazard `Λ = −ln P(W ≥ ·)` at a standard
//! exponential draw.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitness::GFamily;
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    Weibullish { kappa: f64 },
    DoubleExpLog { gamma: f64 },
    DoubleExp { kappa: f64 },
    Constant { c: f64 },
    Empirical(Arc<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel {
    pub family: WeightFamily,
    pub tail_constants: (f64, f64),
}

/// `[lo, hi]` bracket on a tail probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBracket {
    pub lo: f64,
    pub hi: f64,
}

fn need(params: &BTreeMap<String, f64>, id: &str, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::Config(format!("weight family {id} needs parameter `{key}`")))
}

impl WeightModel {
    pub const IDS: [&'static str; 5] = ["weibullish", "double_exp_log", "double_exp", "constant", "empirical"];

    pub fn new(family: WeightFamily) -> Result<Self> {
        let tail_constants = match family {
            WeightFamily::DoubleExp { .. } => (std::f64::consts::E, std::f64::consts::E),
            _ => (1.0, 1.0),
        };
        let m = WeightModel { family, tail_constants };
        m.validate()?;
        Ok(m)
    }

    pub fn weibullish(kappa: f64) -> Result<Self> {
        Self::new(WeightFamily::Weibullish { kappa })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(WeightFamily::Constant { c })
    }

    pub fn empirical(values: Vec<f64>) -> Result<Self> {
        Self::new(WeightFamily::Empirical(Arc::new(values)))
    }

    /// Builds a parametric family from its id. `empirical` goes through
    /// [`WeightModel::empirical_from_file`].
    pub fn from_id(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let fam = match id {
            "weibullish" => WeightFamily::Weibullish { kappa: need(params, id, "kappa")? },
            "double_exp_log" => WeightFamily::DoubleExpLog { gamma: need(params, id, "gamma")? },
            "double_exp" => WeightFamily::DoubleExp { kappa: need(params, id, "kappa")? },
            "constant" => WeightFamily::Constant { c: params.get("c").copied().unwrap_or(1.0) },
            "empirical" => return Err(Error::Config("empirical weights need a table file".into())),
            other => {
                return Err(Error::Config(format!("unknown weight family `{other}` (known: {})", Self::IDS.join(", "))))
            }
        };
        Self::new(fam)
    }

    /// One value per line, `#` comments allowed.
    pub fn empirical_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Config(format!("{}:{}: bad weight {line:?}", path.display(), lineno + 1)))?;
            values.push(v);
        }
        Self::empirical(values)
    }

    pub fn with_tail_constants(mut self, c_lo: f64, c_hi: f64) -> Result<Self> {
        if !(c_lo > 0.0 && c_hi >= c_lo && c_hi.is_finite()) {
            return Err(Error::Config(format!("tail constants need 0 < c_lo ≤ c_hi, got ({c_lo}, {c_hi})")));
        }
        self.tail_constants = (c_lo, c_hi);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        match &self.family {
            WeightFamily::Weibullish { kappa } | WeightFamily::DoubleExp { kappa }
                if !(*kappa > 0.0 && kappa.is_finite()) =>
            {
                Err(Error::Config(format!("kappa must be positive, got {kappa}")))
            }
            WeightFamily::DoubleExpLog { gamma } if !(*gamma > 1.0 && gamma.is_finite()) => {
                Err(Error::Config(format!("gamma must exceed 1, got {gamma}")))
            }
            WeightFamily::Constant { c } if !(*c >= 0.0 && c.is_finite()) => {
                Err(Error::Config(format!("constant weight must be a finite non-negative value, got {c}")))
            }
            WeightFamily::Empirical(v) if v.is_empty() => Err(Error::Config("empirical weight table is empty".into())),
            WeightFamily::Empirical(v) if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) => {
                Err(Error::Config("empirical weights must be finite and non-negative".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn id(&self) -> &'static str {
        match self.family {
            WeightFamily::Weibullish { .. } => "weibullish",
            WeightFamily::DoubleExpLog { .. } => "double_exp_log",
            WeightFamily::DoubleExp { .. } => "double_exp",
            WeightFamily::Constant { .. } => "constant",
            WeightFamily::Empirical(_) => "empirical",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match &self.family {
            WeightFamily::Weibullish { kappa } | WeightFamily::DoubleExp { kappa } => {
                m.insert("kappa".into(), *kappa);
            }
            WeightFamily::DoubleExpLog { gamma } => {
                m.insert("gamma".into(), *gamma);
            }
            WeightFamily::Constant { c } => {
                m.insert("c".into(), *c);
            }
            WeightFamily::Empirical(v) => {
                m.insert("table_len".into(), v.len() as f64);
            }
        }
        m.insert("c_lo".into(), self.tail_constants.0);
        m.insert("c_hi".into(), self.tail_constants.1);
        m
    }

    /// The single value of a degenerate model.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.family {
            WeightFamily::Constant { c } => Some(*c),
            WeightFamily::Empirical(v) if v.iter().all(|x| *x == v[0]) => Some(v[0]),
            _ => None,
        }
    }

    /// True for families with a continuous survival function.
    pub fn is_continuous(&self) -> bool {
        matches!(
            self.family,
            WeightFamily::Weibullish { .. } | WeightFamily::DoubleExpLog { .. } | WeightFamily::DoubleExp { .. }
        )
    }

    /// One draw.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        match &self.family {
            WeightFamily::Constant { c } => *c,
            WeightFamily::Empirical(v) => {
                let i = ((rng.uniform() * v.len() as f64) as usize).min(v.len() - 1);
                v[i]
            }
            _ => self.inverse_hazard(rng.exp1()),
        }
    }

    /// `Λ^{-1}(y)` where `Λ(x) = −ln P(W ≥ x)`; continuous families only.
    pub fn inverse_hazard(&self, y: f64) -> f64 {
        match self.family {
            WeightFamily::Weibullish { kappa } => y.powf(1.0 / kappa),
            WeightFamily::DoubleExp { kappa } => y.ln_1p().powf(1.0 / kappa),
            WeightFamily::DoubleExpLog { gamma } => {
                if y < 1.0 {
                    y
                } else {
                    y.ln().powf(1.0 / gamma).exp()
                }
            }
            WeightFamily::Constant { c } => c,
            WeightFamily::Empirical(ref v) => v.iter().copied().fold(0.0, f64::max),
        }
    }

    /// `Λ(x) = −ln P(W ≥ x)`; continuous families only.
    pub fn hazard(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.family {
            WeightFamily::Weibullish { kappa } => x.powf(kappa),
            WeightFamily::DoubleExp { kappa } => x.powf(kappa).exp_m1(),
            WeightFamily::DoubleExpLog { gamma } => {
                if x < 1.0 {
                    x
                } else {
                    x.ln().powf(gamma).exp()
                }
            }
            _ => -self.survival(x).ln(),
        }
    }

    /// `P(W ≥ x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant { c } => f64::from(u8::from(x <= *c)),
            WeightFamily::Empirical(v) => v.iter().filter(|w| **w >= x).count() as f64 / v.len() as f64,
            _ => (-self.hazard(x)).exp(),
        }
    }

    /// The Θ-class shape `t(x)`.
    pub fn tail_shape(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::DoubleExp { kappa } => (-x.powf(kappa).exp()).exp(),
            _ => self.survival(x),
        }
    }

    /// `[c_lo t(x), min(1, c_hi t(x))]`.
    pub fn tail_prob(&self, x: f64) -> TailBracket {
        let t = self.tail_shape(x);
        let (lo, hi) = self.tail_constants;
        TailBracket { lo: (lo * t).min(1.0), hi: (hi * t).min(1.0) }
    }

    /// The closed-form `k_n` with `P(g(W) > k_n) ≲ n^{−(1+ε)}`.
    pub fn k_sequence(&self, g: GFamily, n: f64, eps: f64) -> Result<f64> {
        if !(n >= 2.0) {
            return Err(Error::Argument(format!("k_sequence needs n ≥ 2, got {n}")));
        }
        if !(eps > 0.0) {
            return Err(Error::Argument(format!("k_sequence needs eps > 0, got {eps}")));
        }
        let l = (1.0 + eps) * n.ln();
        match &self.family {
            WeightFamily::Weibullish { kappa } => Ok(l.powf(1.0 / kappa)),
            WeightFamily::DoubleExpLog { gamma } => Ok(l.ln().powf(1.0 / gamma).exp()),
            WeightFamily::DoubleExp { kappa } => Ok(l.ln().powf(1.0 / kappa)),
            WeightFamily::Constant { c } => Ok(g.eval(*c)),
            WeightFamily::Empirical(_) => {
                Err(Error::UnsupportedFamily("empirical weights have no closed-form k_n".into()))
            }
        }
    }

    /// `E[W]` where available in closed form.
    pub fn mean(&self) -> Option<f64> {
        match &self.family {
            WeightFamily::Weibullish { kappa } => Some(statrs::function::gamma::gamma(1.0 + 1.0 / kappa)),
            WeightFamily::Constant { c } => Some(*c),
            WeightFamily::Empirical(v) => Some(v.iter().sum::<f64>() / v.len() as f64),
            _ => None,
        }
    }
}
