//! Dense complex linear algebra used by the exact oracles.
//!
//! Everything here works on `ndarray` matrices of `Complex64`; Hermitian
//! eigenproblems go through LAPACK via `ndarray-linalg`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, EigValsh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigendecomposition `A = V diag(λ) V†` of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(a: &CMatrix) -> Result<Self> {
        // ndarray-linalg hands row-major input to LAPACK as its transpose,
        // which for a Hermitian matrix conjugates the eigenvectors
        let mut fortran = Array2::zeros(a.raw_dim().f());
        fortran.assign(a);
        let (values, vectors) = fortran.eigh(UPLO::Lower)?;
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i A t) v`.
    pub fn evolve(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.t().mapv(|z| z.conj()).dot(v);
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        self.vectors.dot(&coeffs)
    }

    /// `exp(-i A t)` as a dense matrix.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = self.values.mapv(|e| Complex64::from_polar(1.0, -e * t));
        let scaled = &self.vectors * &phases.insert_axis(Axis(0));
        scaled.dot(&adjoint(&self.vectors))
    }
}

pub fn eigvalsh(a: &CMatrix) -> Result<Array1<f64>> {
    Ok(a.eigvalsh(UPLO::Lower)?)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) + b.dot(a)
}

pub fn inner(a: ArrayView1<Complex64>, b: ArrayView1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨ψ|A|ψ⟩` (complex; real for Hermitian `A`).
pub fn expectation(a: ArrayView2<Complex64>, psi: ArrayView1<Complex64>) -> Complex64 {
    inner(psi, a.dot(&psi).view())
}

pub fn norm(v: ArrayView1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry of `|A − A†|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Spectral (operator 2-) norm via the largest eigenvalue of `A†A`.
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    let gram = adjoint(a).dot(a);
    let values = eigvalsh(&gram)?;
    Ok(values.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt())
}

/// `exp(Ω)` for anti-Hermitian `Ω`, through the Hermitian generator `K = iΩ`.
pub fn expm_antihermitian(omega: &CMatrix) -> Result<CMatrix> {
    let generator = omega.mapv(|z| I * z);
    let eig = HermitianEigen::new(&generator)?;
    Ok(eig.propagator(1.0))
}

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn check_square(a: &CMatrix, expected: usize) -> Result<()> {
    if a.nrows() != expected || a.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: a.nrows().max(a.ncols()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn propagator_of_pauli_y() {
        // exp(-i σ_y t) = cos t − i σ_y sin t
        let sy = array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let eig = HermitianEigen::new(&sy).unwrap();
        let t = 0.37_f64;
        let u = eig.propagator(t);
        assert!((u[[0, 0]] - c(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[[0, 1]] - c(-t.sin(), 0.0)).norm() < 1e-14);
        assert!((u[[1, 0]] - c(t.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = array![[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -5.0)]];
        assert!((spectral_norm(&a).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros((3, 3));
        let u = expm_antihermitian(&z).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-14);
    }
}
