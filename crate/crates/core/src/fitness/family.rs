use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use super::tail::{convex_tail, horizon, horizon_integral, shift_ratio_excess, upper_gamma, Bounded, Neumaier};
use crate::error::{Error, Result};

/// Degree part `s(i)` of a multiplicative fitness.
#[derive(Debug, Clone, PartialEq)]
pub enum SFamily {
    /// `(i+1) (ln(i+2))^σ`
    CaseI { sigma: f64 },
    /// `(i+1) ln(i+2) exp((ln ln(i+3))^ν)`
    CaseII { nu: f64 },
    /// `(i+1) ln(i+2) (ln ln(i+3))^σ`
    CaseIII { sigma: f64 },
    /// `i^α` at positive perfect squares, `(i+1)(ln(i+2))^σ` elsewhere.
    CaseIV { sigma: f64, alpha: f64 },
    /// `r^{i+1}`
    Geometric { r: f64 },
    /// `s ≡ 1`, not summable.
    UniformAttach,
    /// Tabulated values with an optional power-law extension.
    Table(Arc<SeqTable>),
}

/// Tabulated `s(0), …, s(L−1)`. Beyond the table `s(i) = s(L−1)((i+1)/L)^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqTable {
    values: Vec<f64>,
    suffix_min: Vec<f64>,
    tail_exponent: Option<f64>,
}

impl SeqTable {
    pub fn new(values: Vec<f64>, tail_exponent: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("fitness table is empty".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("fitness table entry {i} is not strictly positive: {v}")));
        }
        if let Some(q) = tail_exponent {
            if !(q > 1.0 && q.is_finite()) {
                return Err(Error::Config(format!("table tail exponent must exceed 1, got {q}")));
            }
        }
        let mut suffix_min = values.clone();
        for i in (0..values.len().saturating_sub(1)).rev() {
            suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
        }
        Ok(SeqTable { values, suffix_min, tail_exponent })
    }

    /// Reads a two-column `index,value` file (comma or whitespace separated,
    /// `#` comments). Indices must be `0, 1, …` in order.
    pub fn from_file(path: &Path, tail_exponent: Option<f64>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|c| !c.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Config(format!("{}:{}: expected two columns", path.display(), lineno + 1)));
            }
            let idx: u64 = cols[0]
                .parse()
                .map_err(|_| Error::Config(format!("{}:{}: bad index {:?}", path.display(), lineno + 1, cols[0])))?;
            let val: f64 = cols[1]
                .parse()
                .map_err(|_| Error::Config(format!("{}:{}: bad value {:?}", path.display(), lineno + 1, cols[1])))?;
            if idx != values.len() as u64 {
                return Err(Error::Config(format!(
                    "{}:{}: expected index {}, found {idx}",
                    path.display(),
                    lineno + 1,
                    values.len()
                )));
            }
            values.push(val);
        }
        Self::new(values, tail_exponent)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    fn get(&self, i: u64) -> Result<f64> {
        if let Some(v) = self.values.get(i as usize) {
            return Ok(*v);
        }
        match self.tail_exponent {
            Some(q) => Ok(self.extend(i as f64, q)),
            None => Err(Error::Domain(format!(
                "index {i} beyond fitness table of length {} and no tail exponent given",
                self.values.len()
            ))),
        }
    }

    fn extend(&self, x: f64, q: f64) -> f64 {
        let l = self.values.len() as f64;
        self.values[self.values.len() - 1] * ((x + 1.0) / l).powf(q)
    }
}

#[inline]
fn is_positive_square(i: u64) -> bool {
    i >= 1 && {
        let k = i.isqrt();
        k * k == i
    }
}

#[inline]
fn case_i(x: f64, sigma: f64) -> f64 {
    (x + 1.0) * (x + 2.0).ln().powf(sigma)
}

#[inline]
fn case_ii(x: f64, nu: f64) -> f64 {
    (x + 1.0) * (x + 2.0).ln() * (x + 3.0).ln().ln().powf(nu).exp()
}

#[inline]
fn case_iii(x: f64, sigma: f64) -> f64 {
    (x + 1.0) * (x + 2.0).ln() * (x + 3.0).ln().ln().powf(sigma)
}

fn need(params: &BTreeMap<String, f64>, id: &str, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::Config(format!("fitness family {id} needs parameter `{key}`")))
}

impl SFamily {
    pub const IDS: [&'static str; 7] =
        ["case_i", "case_ii", "case_iii", "case_iv", "geometric", "uniform_attach", "custom_table"];

    /// Builds a builtin family from its id. `custom_table` goes through [`SFamily::table`].
    pub fn from_id(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let fam = match id {
            "case_i" => SFamily::CaseI { sigma: need(params, id, "sigma")? },
            "case_ii" => SFamily::CaseII { nu: need(params, id, "nu")? },
            "case_iii" => SFamily::CaseIII { sigma: need(params, id, "sigma")? },
            "case_iv" => SFamily::CaseIV { sigma: need(params, id, "sigma")?, alpha: need(params, id, "alpha")? },
            "geometric" => SFamily::Geometric { r: params.get("r").copied().unwrap_or(2.0) },
            "uniform_attach" => SFamily::UniformAttach,
            "custom_table" => {
                return Err(Error::Config("custom_table needs a table file".into()));
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown fitness family `{other}` (known: {})",
                    Self::IDS.join(", ")
                )))
            }
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn table(table: SeqTable) -> Self {
        SFamily::Table(Arc::new(table))
    }

    pub fn id(&self) -> &'static str {
        match self {
            SFamily::CaseI { .. } => "case_i",
            SFamily::CaseII { .. } => "case_ii",
            SFamily::CaseIII { .. } => "case_iii",
            SFamily::CaseIV { .. } => "case_iv",
            SFamily::Geometric { .. } => "geometric",
            SFamily::UniformAttach => "uniform_attach",
            SFamily::Table(_) => "custom_table",
        }
    }

    /// Parameters echoed into reports.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            SFamily::CaseI { sigma } | SFamily::CaseIII { sigma } => {
                m.insert("sigma".into(), *sigma);
            }
            SFamily::CaseII { nu } => {
                m.insert("nu".into(), *nu);
            }
            SFamily::CaseIV { sigma, alpha } => {
                m.insert("sigma".into(), *sigma);
                m.insert("alpha".into(), *alpha);
            }
            SFamily::Geometric { r } => {
                m.insert("r".into(), *r);
            }
            SFamily::UniformAttach => {}
            SFamily::Table(t) => {
                m.insert("table_len".into(), t.len() as f64);
                if let Some(q) = t.tail_exponent {
                    m.insert("q".into(), q);
                }
            }
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            SFamily::CaseI { sigma } | SFamily::CaseIII { sigma } if !(sigma > 1.0 && sigma.is_finite()) => {
                bad(format!("{} requires sigma > 1, got {sigma}", self.id()))
            }
            SFamily::CaseII { nu } if !(nu > 0.0 && nu < 1.0) => bad(format!("case_ii requires nu in (0,1), got {nu}")),
            SFamily::CaseIV { sigma, .. } if !(sigma > 1.0 && sigma.is_finite()) => {
                bad(format!("case_iv requires sigma > 1, got {sigma}"))
            }
            SFamily::CaseIV { alpha, .. } if !(alpha > 0.5 && alpha <= 1.0) => {
                bad(format!("case_iv requires alpha in (1/2,1], got {alpha}"))
            }
            SFamily::Geometric { r } if !(r > 1.0 && r.is_finite()) => {
                bad(format!("geometric requires r > 1, got {r}"))
            }
            _ => Ok(()),
        }
    }

    /// True when `1/s` is summable.
    pub fn summable(&self) -> bool {
        match self {
            SFamily::UniformAttach => false,
            SFamily::Table(t) => t.tail_exponent.is_some(),
            _ => true,
        }
    }

    /// `s(i)`.
    pub fn eval(&self, i: u64) -> Result<f64> {
        let x = i as f64;
        let v = match *self {
            SFamily::CaseI { sigma } => case_i(x, sigma),
            SFamily::CaseII { nu } => case_ii(x, nu),
            SFamily::CaseIII { sigma } => case_iii(x, sigma),
            SFamily::CaseIV { sigma, alpha } => {
                if is_positive_square(i) {
                    x.powf(alpha)
                } else {
                    case_i(x, sigma)
                }
            }
            SFamily::Geometric { r } => r.powf(x + 1.0),
            SFamily::UniformAttach => 1.0,
            SFamily::Table(ref t) => t.get(i)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericOverflow(format!("s({i}) is not finite for {}", self.id())))
        }
    }

    /// `ln s(i)`, finite even where `s(i)` overflows.
    pub fn ln_eval(&self, i: u64) -> Result<f64> {
        match *self {
            SFamily::Geometric { r } => Ok((i as f64 + 1.0) * r.ln()),
            SFamily::Table(ref t) if i as usize >= t.len() => {
                let q = t.tail_exponent.ok_or_else(|| Error::Domain(format!("index {i} beyond fitness table")))?;
                let l = t.len() as f64;
                Ok(t.values[t.len() - 1].ln() + q * ((i as f64 + 1.0) / l).ln())
            }
            _ => Ok(self.eval(i)?.ln()),
        }
    }

    /// `inf_{i ≥ n} s(i)`.
    pub fn inf_from(&self, n: u64) -> Result<f64> {
        match *self {
            SFamily::CaseIV { sigma, alpha } => {
                let first_nonsquare = if is_positive_square(n) { n + 1 } else { n };
                let k = n.isqrt() + u64::from(n.isqrt() * n.isqrt() < n);
                let k = k.max(1);
                Ok(case_i(first_nonsquare as f64, sigma).min((k as f64).powf(2.0 * alpha)))
            }
            SFamily::UniformAttach => Ok(1.0),
            SFamily::Table(ref t) => {
                let len = t.len() as u64;
                let tail = match t.tail_exponent {
                    Some(q) => Some(t.extend(n.max(len) as f64, q)),
                    None => None,
                };
                let head = if n < len { Some(t.suffix_min[n as usize]) } else { None };
                match (head, tail) {
                    (Some(h), Some(tl)) => Ok(h.min(tl)),
                    (Some(h), None) => Ok(h),
                    (None, Some(tl)) => Ok(tl),
                    (None, None) => Err(Error::Domain(format!("index {n} beyond fitness table"))),
                }
            }
            _ => self.eval(n),
        }
    }

    /// `Σ_{i ≥ n} 1/s(i)` with certified error at most `tol`.
    pub fn recip_tail(&self, n: u64, tol: f64) -> Result<Bounded> {
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
        }
        match *self {
            SFamily::CaseI { sigma } => tail_case_i(n, sigma, tol),
            SFamily::CaseII { nu } => tail_case_ii_iii(n, tol, Outer::Exp(nu)),
            SFamily::CaseIII { sigma } => tail_case_ii_iii(n, tol, Outer::Pow(sigma)),
            SFamily::CaseIV { sigma, alpha } => tail_case_iv(n, sigma, alpha, tol),
            SFamily::Geometric { r } => {
                let v = (-(n as f64) * r.ln()).exp() / (r - 1.0);
                Ok(Bounded { value: v, err: 4.0 * f64::EPSILON * v })
            }
            SFamily::UniformAttach => {
                Err(Error::Config("uniform_attach: reciprocal fitness is not summable, tail sums diverge".into()))
            }
            SFamily::Table(ref t) => tail_table(t, n, tol),
        }
    }
}

fn tail_case_i(n: u64, sigma: f64, tol: f64) -> Result<Bounded> {
    convex_tail(n, 0, tol, |x| 1.0 / case_i(x, sigma), |a| Ok(integral_case_i(a, sigma)))
}

/// `∫_a^∞ dx / ((x+1)(ln(x+2))^σ)` via `t = ln(x+2)`.
pub(crate) fn integral_case_i(a: f64, sigma: f64) -> Bounded {
    let ta = (a + 2.0).ln();
    let main = ta.powf(1.0 - sigma) / (sigma - 1.0);
    let end = ta + horizon();
    let tail = end.powf(-sigma) * (-end).exp() / (1.0 - (-end).exp());
    let corr = horizon_integral(|t| t.powf(-sigma) / t.exp_m1(), ta, main, tail);
    Bounded { value: main + corr.value, err: corr.err + 2.0 * f64::EPSILON * main }
}

#[derive(Clone, Copy)]
enum Outer {
    /// `exp((ln ln(x+3))^ν)`
    Exp(f64),
    /// `(ln ln(x+3))^σ`
    Pow(f64),
}

impl Outer {
    #[inline]
    fn recip(self, lnt: f64) -> f64 {
        match self {
            Outer::Exp(nu) => (-lnt.powf(nu)).exp(),
            Outer::Pow(sigma) => lnt.powf(-sigma),
        }
    }
}

fn tail_case_ii_iii(n: u64, tol: f64, outer: Outer) -> Result<Bounded> {
    let h = |x: f64| match outer {
        Outer::Exp(nu) => 1.0 / case_ii(x, nu),
        Outer::Pow(sigma) => 1.0 / case_iii(x, sigma),
    };
    convex_tail(n, 1, tol, h, |a| Ok(integral_case_ii_iii(a, outer)))
}

/// `∫_a^∞ dx / ((x+1) ln(x+2) φ(ln ln(x+3)))` via `t = ln(x+3)`: a closed-form or
/// incomplete-gamma main term for `∫ dt/(t φ(ln t))` plus an exponentially small
/// correction from the shifted arguments.
fn integral_case_ii_iii(a: f64, outer: Outer) -> Bounded {
    let ta = (a + 3.0).ln();
    let ua = ta.ln();
    let main = match outer {
        Outer::Pow(sigma) => Bounded::exact(ua.powf(1.0 - sigma) / (sigma - 1.0)),
        Outer::Exp(nu) => {
            let g = upper_gamma(1.0 / nu, ua.powf(nu));
            Bounded { value: g.value / nu, err: g.err / nu }
        }
    };
    let end = ta + horizon();
    let tail = (-end).exp() * outer.recip(end.ln());
    let corr = horizon_integral(|t| shift_ratio_excess(t) * outer.recip(t.ln()), ta, main.value, tail);
    Bounded { value: main.value + corr.value, err: main.err + corr.err + 2.0 * f64::EPSILON * main.value }
}

fn tail_case_iv(n: u64, sigma: f64, alpha: f64, tol: f64) -> Result<Bounded> {
    let k0 = n.isqrt() + u64::from(n.isqrt() * n.isqrt() < n);
    let k0 = k0.max(1);
    let all = tail_case_i(n, sigma, tol / 3.0)?;
    let h_sq = |k: f64| 1.0 / case_i(k * k, sigma);
    let squares_as_i = convex_tail(k0, 2, tol / 3.0, h_sq, |a| {
        let la = a.ln();
        let f = |t: f64| {
            let k = t.exp();
            k / case_i(k * k, sigma)
        };
        let end = la + horizon();
        let tail = (-end).exp();
        let scale = 1.0 / (a * (2.0 * la).abs().max(0.5).powf(sigma));
        Ok(horizon_integral(f, la, scale, tail))
    })?;
    let e = 2.0 * alpha;
    let squares = convex_tail(k0, 1, tol / 3.0, |k| k.powf(-e), |a| Ok(Bounded::exact(a.powf(1.0 - e) / (e - 1.0))))?;
    Ok(Bounded { value: all.value - squares_as_i.value + squares.value, err: all.err + squares_as_i.err + squares.err })
}

fn tail_table(t: &SeqTable, n: u64, tol: f64) -> Result<Bounded> {
    let q = t
        .tail_exponent
        .ok_or_else(|| Error::Config("custom_table without tail exponent `q`: tail sums are not certified".into()))?;
    let len = t.len() as u64;
    let mut head = Neumaier::new();
    for i in n..len {
        head.add(1.0 / t.values[i as usize]);
    }
    let c = (len as f64).powf(q) / t.values[t.len() - 1];
    let rest = convex_tail(
        n.max(len),
        len,
        tol,
        |x| 1.0 / t.extend(x, q),
        |a| Ok(Bounded::exact(c * (a + 1.0).powf(1.0 - q) / (q - 1.0))),
    )?;
    let hv = head.value();
    Ok(Bounded { value: hv + rest.value, err: rest.err + 4.0 * f64::EPSILON * hv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn squares() {
        assert!(!is_positive_square(0));
        assert!(is_positive_square(1));
        assert!(is_positive_square(4));
        assert!(!is_positive_square(5));
        assert!(is_positive_square(1 << 40));
    }

    #[test]
    fn case_iv_branches() {
        let s = SFamily::from_id("case_iv", &p(&[("sigma", 2.0), ("alpha", 0.8)])).unwrap();
        assert!((s.eval(4).unwrap() - 4f64.powf(0.8)).abs() < 1e-12);
        assert!((s.eval(0).unwrap() - 2f64.ln().powi(2)).abs() < 1e-12);
        assert!((s.eval(5).unwrap() - 6.0 * 7f64.ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn inf_from_case_iv_is_a_true_infimum() {
        let s = SFamily::from_id("case_iv", &p(&[("sigma", 2.0), ("alpha", 0.8)])).unwrap();
        for n in 0..400u64 {
            let brute = (n..20_000).map(|i| s.eval(i).unwrap()).fold(f64::INFINITY, f64::min);
            assert!((s.inf_from(n).unwrap() - brute).abs() <= 1e-12 * brute, "n={n}");
        }
    }

    #[test]
    fn table_suffix_min_and_tail() {
        let t = SeqTable::new(vec![5.0, 1.0, 3.0, 2.0], Some(2.0)).unwrap();
        let s = SFamily::table(t);
        assert_eq!(s.inf_from(0).unwrap(), 1.0);
        assert_eq!(s.inf_from(2).unwrap(), 2.0);
        assert_eq!(s.eval(7).unwrap(), 2.0 * 4.0);
        let tail = s.recip_tail(0, 1e-12).unwrap();
        let brute: f64 =
            1.0 / 5.0 + 1.0 + 1.0 / 3.0 + 0.5 + (4..2_000_000u64).map(|i| 8.0 / ((i + 1) as f64).powi(2)).sum::<f64>();
        assert!((tail.value - brute).abs() < 1e-5);
    }

    #[test]
    fn rejects_out_of_range_params() {
        assert!(SFamily::from_id("case_i", &p(&[("sigma", 1.0)])).is_err());
        assert!(SFamily::from_id("case_ii", &p(&[("nu", 1.0)])).is_err());
        assert!(SFamily::from_id("case_iv", &p(&[("sigma", 2.0), ("alpha", 0.5)])).is_err());
        assert!(SFamily::from_id("nope", &p(&[])).is_err());
    }
}
