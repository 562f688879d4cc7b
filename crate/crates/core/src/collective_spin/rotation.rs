//! Columns of the Wigner small-d matrix in the `(2S+1)`-dimensional ladder
//! representation.
//!
//! The rotated state `d(θ)|S, m⟩` is the eigenvector, with eigenvalue `m`, of
//! the tridiagonal operator `cos θ S_z + sin θ S_x`. The spectrum of that
//! operator is exactly `{−S, …, S}`, so eigenvalues are separated by one and
//! shifted inverse iteration converges in a handful of `O(S)` sweeps without
//! ever forming factorials.

/// Matrix element `⟨m+1|S_x|m⟩ = ½√(S(S+1) − m(m+1))`, indices doubled.
pub(crate) fn ladder_coefficient(two_s: u32, two_m: i64) -> f64 {
    let s = two_s as f64 / 2.0;
    let m = two_m as f64 / 2.0;
    0.5 * (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// `m′ = −S + k` for basis index `k`.
pub(crate) fn doubled_m_of_index(two_s: u32, k: usize) -> i64 {
    -(two_s as i64) + 2 * k as i64
}

/// Solve a tridiagonal system with partial pivoting (the `gtsv` scheme).
///
/// `sub[i]` couples row `i+1` to column `i`, `sup[i]` couples row `i` to
/// column `i+1`. The right-hand side is overwritten with the solution.
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let dl = sub;
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let scale = d
        .iter()
        .chain(dl.iter())
        .chain(du.iter())
        .fold(0.0_f64, |a, &b| a.max(b.abs()))
        .max(1.0);
    let guard = f64::EPSILON * scale;

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = guard;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= fact * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = guard;
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

/// Normalised amplitudes of `d(θ)|S, m⟩` over `m′ = −S, …, S`, overall sign
/// chosen so the largest component is positive.
pub fn rotated_column(two_s: u32, two_m: i64, theta: f64) -> Vec<f64> {
    let n = two_s as usize + 1;
    let (sin, cos) = theta.sin_cos();
    let diag: Vec<f64> = (0..n)
        .map(|k| cos * doubled_m_of_index(two_s, k) as f64 / 2.0)
        .collect();
    let off: Vec<f64> = (0..n.saturating_sub(1))
        .map(|k| sin * ladder_coefficient(two_s, doubled_m_of_index(two_s, k)))
        .collect();
    let target = two_m as f64 / 2.0;
    let s = two_s as f64 / 2.0;
    let shift = target + 1e-8 * (1.0 + s);
    let shifted: Vec<f64> = diag.iter().map(|a| a - shift).collect();

    let mut v: Vec<f64> = (0..n).map(|k| 1.0 + 0.25 * ((k as f64) * 0.618).sin()).collect();
    normalize(&mut v);
    for _ in 0..20 {
        let mut y = v.clone();
        solve_tridiagonal(&off, &shifted, &off, &mut y);
        normalize(&mut y);
        let residual = tridiagonal_residual(&diag, &off, &y, target);
        v = y;
        if residual < 1e-13 * (1.0 + s) {
            break;
        }
    }
    let pivot = v
        .iter()
        .cloned()
        .fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// `|d_{m′m}(θ)|²` over `m′ = −S, …, S`.
pub fn rotation_weights(two_s: u32, two_m: i64, theta: f64) -> Vec<f64> {
    rotated_column(two_s, two_m, theta)
        .into_iter()
        .map(|a| a * a)
        .collect()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], v: &[f64], lambda: f64) -> f64 {
    let n = diag.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        worst = worst.max(r.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solver_matches_dense() {
        // needs pivoting: zero leading diagonal
        let sub = [2.0, -1.0, 0.5];
        let diag = [0.0, 1.0, 3.0, -2.0];
        let sup = [1.0, 4.0, 1.5];
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut r = diag[i] * x_true[i];
                if i > 0 {
                    r += sub[i - 1] * x_true[i - 1];
                }
                if i < 3 {
                    r += sup[i] * x_true[i + 1];
                }
                r
            })
            .collect();
        solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
        for (a, b) in rhs.iter().zip(x_true.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn spin_half_column_is_half_angle() {
        let theta = 0.9_f64;
        let v = rotated_column(1, 1, theta);
        // m′ = −½ then +½
        assert!((v[1].abs() - (theta / 2.0).cos()).abs() < 1e-14);
        assert!((v[0].abs() - (theta / 2.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn spin_one_closed_forms() {
        // d¹_{m′,0}(θ): (sinθ/√2, cosθ, −sinθ/√2) up to sign
        let theta = 1.1_f64;
        let w = rotation_weights(2, 0, theta);
        assert!((w[0] - theta.sin().powi(2) / 2.0).abs() < 1e-14);
        assert!((w[1] - theta.cos().powi(2)).abs() < 1e-14);
        assert!((w[2] - theta.sin().powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_flip() {
        let w = rotation_weights(6, 2, 0.0);
        assert!((w[4] - 1.0).abs() < 1e-14);
        let w = rotation_weights(6, 2, std::f64::consts::PI);
        assert!((w[2] - 1.0).abs() < 1e-12);
    }
}
