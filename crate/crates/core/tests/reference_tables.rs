//! Special functions against 50-digit reference tables.

use enwidth_core::special::{bessel_j0, erfc, erfcx, ln_erfc};

fn load(name: &str) -> Vec<(f64, String)> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{path}: {e}"))
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').expect("two columns");
            (x.parse().unwrap(), y.to_string())
        })
        .collect()
}

/// Natural log of a decimal literal that may lie below the `f64` range.
fn ln_decimal(s: &str) -> f64 {
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (s, 0),
    };
    mant.parse::<f64>().unwrap().ln() + exp as f64 * std::f64::consts::LN_10
}

#[test]
fn erfc_relative_error_below_1e_13() {
    let rows = load("erfc_reference.csv");
    assert!(rows.len() > 300);
    let mut worst: f64 = 0.0;
    for (x, y) in &rows {
        let ln_ref = ln_decimal(y);
        if ln_ref > -690.0 {
            // comfortably inside the normal range
            let r: f64 = y.parse().unwrap();
            let rel = (erfc(*x) / r - 1.0).abs();
            worst = worst.max(rel);
            assert!(rel < 1e-13, "erfc({x}): relative error {rel:e}");
        }
    }
    assert!(worst < 1e-13);
}

#[test]
fn scaled_erfc_covers_the_underflow_range() {
    // erfc itself leaves the normal f64 range near x = 26.5; its relative
    // accuracy is carried by e^{x²} erfc(x)
    let rows = load("erfcx_reference.csv");
    assert_eq!(rows.last().unwrap().0, 30.0);
    for (x, y) in rows {
        let r: f64 = y.parse().unwrap();
        let rel = (erfcx(x) / r - 1.0).abs();
        assert!(rel < 1e-13, "erfcx({x}): relative error {rel:e}");
    }
}

#[test]
fn ln_erfc_matches_table_everywhere() {
    for (x, y) in load("erfc_reference.csv") {
        let ln_ref = ln_decimal(&y);
        let tol = 1e-13 * ln_ref.abs().max(1.0);
        assert!((ln_erfc(x) - ln_ref).abs() < tol, "x = {x}");
    }
}

#[test]
fn j0_absolute_error_below_1e_12() {
    let rows = load("j0_reference.csv");
    assert!(rows.len() > 500);
    for (x, y) in rows {
        let r: f64 = y.parse().unwrap();
        let got = bessel_j0(x);
        // near zeros of J0 only the absolute error is meaningful
        let err = (got - r).abs() / r.abs().max(1.0);
        assert!(err < 1e-12, "J0({x}) = {got}, want {r}");
        assert_eq!(bessel_j0(-x), got);
    }
}
