//! Suffix power sums of `1/s` for fast evaluation of `Σ ln(1 + x/s(i))`.

use crate::error::{Error, Result};
use crate::fitness::{Bounded, Neumaier, SFamily};

/// Above this ratio `x/s(i)` terms are summed explicitly; below it the
/// alternating series of `ln(1+y)` truncated after `y^6/6` is used.
const SERIES_RATIO: f64 = 0.05;
const ORDERS: usize = 6;
/// From this size on `s(i)^{-6}` nears underflow, so terms are summed explicitly.
const SERIES_MAX_S: f64 = 1e40;

/// `s(i)` for `i < len` with suffix sums `Σ_{i≤j<len} s(j)^{-k}`, `k = 1..6`,
/// suffix minima, and a certified tail `Σ_{j≥len} 1/s(j)`.
#[derive(Debug, Clone)]
pub struct PowerSums {
    s: Vec<f64>,
    suffix: [Vec<f64>; ORDERS],
    smin: Vec<f64>,
    tail: Bounded,
    tail_inf: f64,
}

impl PowerSums {
    pub fn new(s: &SFamily, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Argument("power sums need at least one index".into()));
        }
        let vals: Vec<f64> = (0..len as u64).map(|i| s.eval(i)).collect::<Result<_>>()?;
        let suffix: [Vec<f64>; ORDERS] = std::array::from_fn(|k| {
            let mut out = vec![0.0; len + 1];
            let mut acc = Neumaier::new();
            for i in (0..len).rev() {
                acc.add(vals[i].powi(-(k as i32 + 1)));
                out[i] = acc.value();
            }
            out
        });
        let tail_inf = s.inf_from(len as u64)?;
        let mut smin = vec![0.0; len + 1];
        smin[len] = tail_inf;
        for i in (0..len).rev() {
            smin[i] = vals[i].min(smin[i + 1]);
        }
        let tail = s.recip_tail(len as u64, 1e-13)?;
        Ok(PowerSums { s: vals, suffix, smin, tail, tail_inf })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s[i]
    }

    /// `Σ_{j ≥ len} 1/s(j)`.
    pub fn tail(&self) -> Bounded {
        self.tail
    }

    /// `inf_{j ≥ len} s(j)`.
    pub fn tail_inf(&self) -> f64 {
        self.tail_inf
    }

    /// `Σ_{i<n} ln(1 + x/s(i))` for `x ≥ 0`, `n ≤ len`.
    pub fn log1p_sum(&self, x: f64, n: usize) -> Bounded {
        debug_assert!(n <= self.len());
        if x == 0.0 || n == 0 {
            return Bounded::exact(0.0);
        }
        let head_end = self.smin.partition_point(|v| *v < x / SERIES_RATIO).min(n);
        let mut acc = Neumaier::new();
        for i in 0..head_end {
            acc.add((x / self.s[i]).ln_1p());
        }
        let big = self.smin.partition_point(|v| *v < SERIES_MAX_S).clamp(head_end, n);
        for i in big..n {
            acc.add((x / self.s[i]).ln_1p());
        }
        let n = big;
        let mut err = 0.0;
        if head_end < n {
            let mut xp = 1.0;
            let mut sign = 1.0;
            for k in 0..ORDERS {
                xp *= x;
                let seg = self.suffix[k][head_end] - self.suffix[k][n];
                acc.add(sign * xp * seg / (k + 1) as f64);
                err += 4.0 * f64::EPSILON * xp * self.suffix[k][head_end] / (k + 1) as f64;
                sign = -sign;
            }
            let first = x * (self.suffix[0][head_end] - self.suffix[0][n]);
            err += SERIES_RATIO.powi(ORDERS as i32) * first / (ORDERS + 1) as f64;
        }
        let v = acc.value();
        Bounded { value: v, err: err + 4.0 * f64::EPSILON * v }
    }

    /// `Σ_{i≥0} ln(1 + x/s(i))`; the part beyond `len` lies in
    /// `[xT − x²T/(2 inf s), xT]` with `T` the reciprocal tail.
    pub fn log1p_sum_all(&self, x: f64) -> Bounded {
        let head = self.log1p_sum(x, self.len());
        let t = self.tail;
        let hi = x * (t.value + t.err);
        let lo = x * (t.value - t.err) * (1.0 - 0.5 * x / self.tail_inf);
        Bounded { value: head.value + 0.5 * (hi + lo), err: head.err + 0.5 * (hi - lo) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(s: &SFamily, x: f64, n: usize) -> f64 {
        let mut acc = Neumaier::new();
        for i in 0..n as u64 {
            acc.add((x / s.eval(i).unwrap()).ln_1p());
        }
        acc.value()
    }

    #[test]
    fn series_matches_direct_sum() {
        for s in
            [SFamily::CaseI { sigma: 3.0 }, SFamily::CaseIII { sigma: 2.0 }, SFamily::CaseIV { sigma: 2.0, alpha: 0.8 }]
        {
            let p = PowerSums::new(&s, 5000).unwrap();
            for x in [0.0, 0.3, 7.0, 250.0] {
                for n in [1, 10, 999, 5000] {
                    let b = p.log1p_sum(x, n);
                    let d = direct(&s, x, n);
                    assert!((b.value - d).abs() <= b.err + 1e-12 * d.abs(), "{s:?} x={x} n={n}: {} vs {d}", b.value);
                }
            }
        }
    }
}
