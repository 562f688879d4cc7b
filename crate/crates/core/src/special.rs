//! Special functions: the complementary error function and the Bessel
//! function `J₀`.
//!
//! `erfc` uses the Maclaurin series of `erf` for `x < 1` and the Laplace
//! continued fraction (modified Lentz) above that, with `exp(−x²)` split so
//! the rounding of `x²` does not leak into the result. Relative error stays
//! below 1e-13 while the result is a normal double (x ≲ 26.5); `erfcx`
//! carries the same accuracy up to x = 30.
//!
//! `J₀` uses its power series for `|x| ≤ 2`, Miller's backward recurrence
//! normalised by `1 = J₀ + 2Σ J₂ₖ` up to 25, and the Hankel asymptotic
//! expansion beyond.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

const SERIES_CUTOFF: f64 = 1.0;
const CF_MAX_TERMS: usize = 5000;

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π Σ (−1)ⁿ x^{2n+1} / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Denominator `f` of `erfc(x) = exp(−x²) / (√π f)` for `x ≥ 1`:
/// `f = x + (1/2)/(x + 1/(x + (3/2)/(x + …)))`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..CF_MAX_TERMS {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    f
}

/// `exp(−x²)` with `x²` split into an exactly representable head and a small tail.
fn exp_neg_square(x: f64) -> f64 {
    let head = (x * 65536.0).trunc() / 65536.0;
    let tail = (x - head) * (x + head);
    (-head * head).exp() * (-tail).exp()
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < SERIES_CUTOFF {
        return 1.0 - erf_series(x);
    }
    if x > 27.3 {
        // below the smallest subnormal
        return 0.0;
    }
    exp_neg_square(x) / (PI.sqrt() * erfc_continued_fraction(x))
}

pub fn erf(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        erf_series(x)
    } else {
        (1.0 - erfc(x.abs())).copysign(x)
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)`; stays representable
/// where `erfc` underflows.
pub fn erfcx(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        return erfc(x) * (x * x).exp();
    }
    1.0 / (PI.sqrt() * erfc_continued_fraction(x))
}

/// `ln erfc(x)`, finite for arbitrarily large positive `x`.
pub fn ln_erfc(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        return erfc(x).ln();
    }
    -x * x - LN_SQRT_PI - erfc_continued_fraction(x).ln()
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 2.0 {
        j0_series(ax)
    } else if ax <= 25.0 {
        j0_miller(ax)
    } else {
        j0_hankel(ax)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    let start = 2 * (((x + 30.0 + 8.0 * x.sqrt()) / 2.0).ceil() as usize);
    let mut next = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k
    let mut norm = 0.0;
    let mut k = start;
    while k > 0 {
        let previous = 2.0 * k as f64 / x * current - next;
        next = current;
        current = previous;
        k -= 1;
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            next *= 1e-250;
            current *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += current;
    current / norm
}

fn j0_hankel(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut previous = f64::INFINITY;
    for n in 0..60 {
        if term.abs() > previous {
            break;
        }
        match n % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
        previous = term.abs();
        if previous < 1e-18 {
            break;
        }
        let odd = (2 * n + 1) as f64;
        term *= odd * odd / ((n + 1) as f64 * eight_x);
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_anchor_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(1.0) / 0.157_299_207_050_285_13 - 1.0).abs() < 1e-14);
        assert!((erfc(-1.0) / 1.842_700_792_949_715 - 1.0).abs() < 1e-15);
        assert_eq!(erfc(40.0), 0.0);
    }

    #[test]
    fn ln_erfc_matches_log_in_overlap() {
        for &x in &[1.0, 2.5, 7.0, 20.0] {
            let direct = erfc(x).ln();
            assert!((ln_erfc(x) - direct).abs() < 1e-12 * direct.abs());
        }
        assert!(ln_erfc(100.0).is_finite());
    }

    #[test]
    fn erf_is_odd() {
        for &x in &[0.1, 0.9, 1.7, 3.0] {
            assert_eq!(erf(x), -erf(-x));
        }
    }

    #[test]
    fn j0_branches_agree_at_switchovers() {
        assert!((j0_series(2.0) - j0_miller(2.0)).abs() < 1e-15);
        assert!((j0_miller(25.0) - j0_hankel(25.0)).abs() < 1e-15);
        assert_eq!(bessel_j0(0.0), 1.0);
    }
}
