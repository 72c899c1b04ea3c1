//! Star and path terms against an independent quadrature reference
//! (tests/oracles/series_reference.py: mpmath residual sums, scipy quad over `Λ(W)`).

use cmj_core::criterion::{lambda_default, laplace_p, mgf_y, path_series, Expectation, SeriesConfig};
use cmj_core::fitness::{FitnessSpec, GFamily, SFamily};
use cmj_core::weights::{WeightFamily, WeightModel};

const FINE: Expectation = Expectation::Stieltjes { h: 1.0 / 256.0 };

fn star_ln(spec: &FitnessSpec, w: &WeightModel, n: u64, delta: f64) -> (f64, f64) {
    let lam = lambda_default(spec, n as f64, delta).unwrap();
    let m = mgf_y(spec, lam, n, 1e-9).unwrap();
    let l = laplace_p(spec, w, lam, n, FINE).unwrap();
    (m.ln_value + l.ln_value, m.ln_err + l.ln_err)
}

fn path_ln(spec: &FitnessSpec, w: &WeightModel, n: u64, c: f64) -> (f64, f64) {
    let cfg = SeriesConfig { n_lo: n - 1, n_hi: n, per_decade: 1, expectation: FINE, mgf_tol: 1e-9 };
    let r = path_series(spec, w, c, 0.0, &cfg).unwrap();
    let t = r.terms.last().unwrap();
    assert_eq!(t.n, n as f64);
    (t.ln_value, t.ln_error)
}

fn check(label: &str, (got, err): (f64, f64), want: f64) {
    assert!(err < 0.01, "{label}: error bar {err} too wide");
    assert!((got - want).abs() <= err + 1e-6, "{label}: {got} ± {err} vs reference {want}");
}

fn case_i() -> (FitnessSpec, WeightModel) {
    (
        FitnessSpec::multiplicative(GFamily::Shifted, SFamily::CaseI { sigma: 3.0 }),
        WeightModel::weibullish(1.0).unwrap(),
    )
}

#[test]
fn star_case_ii() {
    let spec = FitnessSpec::multiplicative(GFamily::Shifted, SFamily::CaseII { nu: 0.9 });
    let w = WeightModel::new(WeightFamily::DoubleExpLog { gamma: 2.0 }).unwrap();
    check("n=1e4", star_ln(&spec, &w, 10_000, 0.05), -1.900145223445);
    check("n=1e5", star_ln(&spec, &w, 100_000, 0.05), -2.576472651918);
}

#[test]
fn path_case_iii() {
    let spec = FitnessSpec::multiplicative(GFamily::Shifted, SFamily::CaseIII { sigma: 1.5 });
    let w = WeightModel::new(WeightFamily::DoubleExp { kappa: 1.0 }).unwrap();
    check("n=1e4", path_ln(&spec, &w, 10_000, 1.1), -19.071167116297);
    check("n=1e5", path_ln(&spec, &w, 100_000, 1.1), -22.212067689423);
}

#[test]
fn star_and_path_case_i() {
    let (spec, w) = case_i();
    check("star n=1e4", star_ln(&spec, &w, 10_000, 0.05), -12.118596808969);
    check("star n=1e5", star_ln(&spec, &w, 100_000, 0.05), -15.899207941209);
    check("path n=1e4", path_ln(&spec, &w, 10_000, 1.1), -41.615447709935);
    check("path n=1e5", path_ln(&spec, &w, 100_000, 1.1), -53.381715927463);
}
