//! Residual sums against frozen high-precision references
//! (tests/oracles/mu_reference.py, 40-digit mpmath).

use std::collections::BTreeMap;

use cmj_core::fitness::{FitnessSpec, GFamily, SFamily};
use proptest::prelude::*;

fn fam(id: &str, params: &[(&str, f64)]) -> SFamily {
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    SFamily::from_id(id, &p).unwrap()
}

fn builtins() -> Vec<SFamily> {
    vec![
        fam("case_i", &[("sigma", 2.0)]),
        fam("case_i", &[("sigma", 3.0)]),
        fam("case_ii", &[("nu", 0.5)]),
        fam("case_iii", &[("sigma", 2.0)]),
        fam("case_iv", &[("sigma", 2.0), ("alpha", 0.8)]),
        fam("geometric", &[]),
    ]
}

const REFERENCE: &[(&str, &[(&str, f64)], u64, f64)] = &[
    ("case_i", &[("sigma", 2.0)], 0, 3.3877355319520023164),
    ("case_i", &[("sigma", 2.0)], 10, 0.41854659800001207334),
    ("case_i", &[("sigma", 2.0)], 1000, 0.14475000890896986536),
    ("case_i", &[("sigma", 2.0)], 10_000_000, 0.062042068610286326539),
    ("case_i", &[("sigma", 2.0)], 100_000_000, 0.054286810220402804078),
    ("case_i", &[("sigma", 3.0)], 0, 3.753237562092348067),
    ("case_i", &[("sigma", 3.0)], 10, 0.086876437853310165852),
    ("case_i", &[("sigma", 3.0)], 1000, 0.010476051819795064646),
    ("case_i", &[("sigma", 3.0)], 10_000_000, 0.0019246091376449420267),
    ("case_i", &[("sigma", 3.0)], 100_000_000, 0.0014735288818876311409),
    ("case_ii", &[("nu", 0.5)], 0, 3.2037416481206631698),
    ("case_ii", &[("nu", 0.5)], 10, 1.5201990300051876476),
    ("case_ii", &[("nu", 0.5)], 1000, 1.1904194903921715802),
    ("case_ii", &[("nu", 0.5)], 10_000_000, 1.0069277994800545342),
    ("case_ii", &[("nu", 0.5)], 100_000_000, 0.98221746877887458282),
    ("case_ii", &[("nu", 0.9)], 100_000_000, 0.093214952154848388298),
    ("case_iii", &[("sigma", 2.0)], 0, 170.73917574041430625),
    ("case_iii", &[("sigma", 2.0)], 10, 1.1285326587362343951),
    ("case_iii", &[("sigma", 2.0)], 1000, 0.51739434619404346927),
    ("case_iii", &[("sigma", 2.0)], 10_000_000, 0.35971965775308430109),
    ("case_iii", &[("sigma", 2.0)], 100_000_000, 0.34323285684813297556),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.8)], 0, 5.1611449625826364221),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.8)], 10, 1.1836085856355263527),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.8)], 1000, 0.3546066165899925472),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.8)], 10_000_000, 0.075279321883703540477),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.8)], 100_000_000, 0.060921883221790016466),
    ("case_iv", &[("sigma", 2.0), ("alpha", 0.9)], 100_000_000, 0.055075292883085591526),
];

#[test]
fn matches_high_precision_references() {
    for &(id, params, n, expected) in REFERENCE {
        let s = fam(id, params);
        let t = s.recip_tail(n, 1e-12).unwrap();
        let diff = (t.value - expected).abs();
        assert!(diff <= t.err + 1e-15, "{id} {params:?} n={n}: got {} want {expected} (err {:e})", t.value, t.err);
        assert!(t.err <= 1e-12);
    }
}

#[test]
fn geometric_closed_form() {
    let s = fam("geometric", &[("r", 2.0)]);
    for n in [0u64, 1, 5, 40] {
        let t = s.recip_tail(n, 1e-15).unwrap();
        assert!((t.value - 0.5f64.powi(n as i32)).abs() <= 1e-15 * t.value.max(1e-300));
    }
}

#[test]
fn strictly_decreasing_in_n() {
    for s in builtins() {
        let f = FitnessSpec::multiplicative(GFamily::Shifted, s.clone());
        let mut prev = f.mu(0.0, 0.0, 1e-11).unwrap();
        let mut n = 1u64;
        while n <= 10_000 {
            let cur = f.mu(n as f64, 0.0, 1e-11).unwrap();
            assert!(
                cur.value + cur.trunc_error < prev.value - prev.trunc_error || s.id() == "geometric" && n > 40,
                "{} n={n}",
                s.id()
            );
            prev = cur;
            n += if n < 200 { 1 } else { n / 16 };
        }
    }
}

#[test]
fn halving_tolerance_halves_error() {
    for s in builtins().into_iter().filter(|s| s.id() != "geometric") {
        for &n in &[0u64, 50, 1000] {
            let a = s.recip_tail(n, 1e-8).unwrap().err;
            let b = s.recip_tail(n, 5e-9).unwrap().err;
            assert!(b <= 5e-9 && a <= 1e-8);
            let r = a / b;
            assert!((0.5..=8.0).contains(&r), "{} n={n}: ratio {r}", s.id());
        }
    }
}

#[test]
fn tolerance_below_rounding_floor_is_reported() {
    let s = fam("case_i", &[("sigma", 2.0)]);
    assert!(matches!(s.recip_tail(0, 1e-20), Err(cmj_core::Error::PrecisionUnreachable(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolation_is_linear(n in 0u64..5000, frac in 0.0f64..1.0, w in 0.0f64..50.0) {
        let f = FitnessSpec::multiplicative(GFamily::Shifted, fam("case_iii", &[("sigma", 2.5)]));
        let a = f.mu(n as f64, w, 1e-12).unwrap();
        let b = f.mu(n as f64 + 1.0, w, 1e-12).unwrap();
        let m = f.mu(n as f64 + frac, w, 1e-12).unwrap();
        let lin = (1.0 - frac) * a.value + frac * b.value;
        prop_assert!((m.value - lin).abs() <= 1e-14 * lin);
    }

    #[test]
    fn w_star_is_a_minimiser(j in 0u64..100_000, w in 0.0f64..1e6) {
        for s in builtins() {
            let f = FitnessSpec::multiplicative(GFamily::Shifted, s);
            prop_assert!(f.eval(j.min(900), w).unwrap() >= f.eval(j.min(900), f.w_star).unwrap());
        }
    }
}
