//! Certified tail sums of convex decreasing sequences.

use crate::error::{Error, Result};

/// Hard cap on explicitly summed terms per tail evaluation.
pub const MAX_TERMS: u64 = 100_000_000;

/// Horizon of the exponentially decaying correction integrals, in the
/// logarithmic variable.
const HORIZON: f64 = 60.0;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A value with a certified absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub err: f64,
}

impl Bounded {
    pub fn exact(value: f64) -> Self {
        Bounded { value, err: 0.0 }
    }
}

/// `Σ_{i≥n} h(i)` for `h` convex and decreasing on `[convex_from − 1/2, ∞)`.
///
/// `integral(a)` returns `∫_a^∞ h` with its own error. Terms below
/// `M ≥ max(n, convex_from)` are summed, the rest is bracketed by
/// `[I(M) + h(M)/2, I(M − 1/2)]`, and `M` grows geometrically until the
/// half-width fits `tol`.
pub fn convex_tail<H, I>(n: u64, convex_from: u64, tol: f64, h: H, integral: I) -> Result<Bounded>
where
    H: Fn(f64) -> f64,
    I: Fn(f64) -> Result<Bounded>,
{
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let mut acc = Neumaier::new();
    let mut m = n;
    let mut explicit = 0u64;
    let add_until = |acc: &mut Neumaier, from: u64, to: u64| {
        for i in from..to {
            acc.add(h(i as f64));
        }
    };
    if m < convex_from {
        add_until(&mut acc, m, convex_from);
        explicit += convex_from - m;
        m = convex_from;
    }
    loop {
        let mf = m as f64;
        let upper = integral(mf - 0.5)?;
        let lower = integral(mf)?;
        let lo = lower.value + 0.5 * h(mf) - lower.err;
        let hi = upper.value + upper.err;
        let head = acc.value();
        let half = 0.5 * (hi - lo).max(0.0);
        let rounding = 8.0 * f64::EPSILON * (head + hi);
        if half + rounding <= tol {
            return Ok(Bounded { value: head + 0.5 * (lo + hi), err: half + rounding });
        }
        if rounding > tol {
            return Err(Error::PrecisionUnreachable(format!(
                "tolerance {tol:e} is below the rounding floor {rounding:e}"
            )));
        }
        let next = (m + 8).max((mf * 1.25).ceil() as u64);
        explicit += next - m;
        if explicit > MAX_TERMS {
            return Err(Error::PrecisionUnreachable(format!(
                "tail from {n} not certified to {tol:e} within {MAX_TERMS} terms"
            )));
        }
        add_until(&mut acc, m, next);
        m = next;
    }
}

/// Integrates a smooth integrand on `[a, a + HORIZON]` whose magnitude beyond the
/// horizon is bounded by `tail_bound`.
pub fn horizon_integral<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tail_bound: f64) -> Bounded {
    let target = (scale.abs() * 1e-16).max(1e-300);
    let q = piecewise(&f, a, HORIZON, target);
    Bounded { value: q.value, err: q.err + tail_bound }
}

/// Clenshaw-Curtis on `[a, a + len]` split into pieces of doubling width, so
/// that steep behaviour near `a` and slow exponential decay are both resolved.
/// The reported error is never below the requested target.
pub fn piecewise<F: Fn(f64) -> f64>(f: &F, a: f64, len: f64, target: f64) -> Bounded {
    let mut x = a;
    let mut w = 0.25;
    let mut acc = Neumaier::new();
    let mut err = 0.0;
    let mut pieces = 0.0;
    while x < a + len {
        let out = quadrature::clenshaw_curtis::integrate(f, x, x + w, target);
        acc.add(out.integral);
        err += out.error_estimate.abs();
        pieces += 1.0;
        x += w;
        w *= 2.0;
    }
    let value = acc.value();
    Bounded { value, err: err.max(pieces * target) + 4.0 * f64::EPSILON * value.abs() }
}

pub const fn horizon() -> f64 {
    HORIZON
}

/// `1/((1 − 2e^{−t})(t + ln(1 − e^{−t}))) − 1/t`, evaluated without cancellation.
pub fn shift_ratio_excess(t: f64) -> f64 {
    let e = (-t).exp();
    let l = (-e).ln_1p();
    let num = -l + 2.0 * e * (t + l);
    num / (t * (1.0 - 2.0 * e) * (t + l))
}

/// `Γ(s, y0)` for `s ≥ 1` by quadrature of `e^{−y0} ∫_0^∞ (y0 + z)^{s−1} e^{−z} dz`.
pub fn upper_gamma(s: f64, y0: f64) -> Bounded {
    let p = s - 1.0;
    let z_max = (2.0 * p).max(80.0);
    let g = |z: f64| (y0 + z).powf(p) * (-z).exp();
    let scale = (y0 + 1.0).powf(p);
    let q = piecewise(&g, 0.0, z_max, scale * 1e-16);
    let tail = 2.0 * (y0 + z_max).powf(p) * (-z_max).exp();
    let pre = (-y0).exp();
    Bounded { value: pre * q.value, err: pre * (q.err + tail) }
}
