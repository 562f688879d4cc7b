//! Bounded scalar minimisation: a coarse scan to bracket the global minimum,
//! then golden-section refinement.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub struct ScalarMinimum {
    pub x: f64,
    pub f_min: f64,
    pub iterations: usize,
    /// The minimiser sits on (within tolerance of) one of the bounds.
    pub at_bound: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub scan_points: usize,
    /// Scan uniformly in `ln x` instead of `x` (requires a positive interval).
    pub log_scan: bool,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            scan_points: 65,
            log_scan: false,
            max_iter: 500,
        }
    }
}

pub fn minimize_bounded<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: MinimizeOptions,
) -> Result<ScalarMinimum> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "minimisation bounds must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    if opts.log_scan && lo <= 0.0 {
        return Err(Error::InvalidArgument(
            "log-spaced scan needs a positive lower bound".into(),
        ));
    }
    let n = opts.scan_points.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if opts.log_scan {
                (lo.ln() + s * (hi.ln() - lo.ln())).exp()
            } else {
                lo + s * (hi - lo)
            }
        })
        .map(|x| x.clamp(lo, hi))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("objective is NaN on the whole scan".into()))?;

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n - 1)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > opts.tol * (1.0 + 0.5 * (a.abs() + b.abs())) && iterations < opts.max_iter {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let mut x = 0.5 * (a + b);
    let mut f_min = f(x);
    for (gx, gv) in [(lo, values[0]), (hi, values[n - 1])] {
        if gv < f_min {
            x = gx;
            f_min = gv;
        }
    }
    let edge = 10.0 * opts.tol * (hi - lo).abs().max(1.0);
    let at_bound = (x - lo).abs() <= edge || (hi - x).abs() <= edge;
    Ok(ScalarMinimum {
        x,
        f_min,
        iterations,
        at_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let m = minimize_bounded(|x| (x - 0.3).powi(2), 0.0, 1.0, MinimizeOptions::default()).unwrap();
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!(!m.at_bound);
    }

    #[test]
    fn minimum_outside_interval_is_flagged() {
        let m = minimize_bounded(|x| x, 1.0, 2.0, MinimizeOptions::default()).unwrap();
        assert!(m.at_bound);
        assert!((m.x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn log_scan_finds_small_minimum() {
        let opts = MinimizeOptions {
            log_scan: true,
            ..Default::default()
        };
        let m = minimize_bounded(|x: f64| (x.ln() - 0.002_f64.ln()).powi(2), 0.001, 1.0, opts).unwrap();
        assert!((m.x - 0.002).abs() < 1e-9);
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert!(minimize_bounded(|x| x, 1.0, 0.0, MinimizeOptions::default()).is_err());
    }
}
