//! First two Magnus terms for piecewise-constant schedules, the truncation
//! error against the exact propagator, the small-time expansion of the
//! energy-density variance, and the instantaneous variance rate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::collective_spin::DriveSchedule;
use crate::error::{Error, Result};
use crate::exact_lattice::{build_spin_hamiltonian, segment_hamiltonian, LatticeSpec, MatrixOperator, QuantumState};
use crate::linalg::{
    adjoint, anticommutator, commutator, expm_antihermitian, identity, inner, spectral_norm, CMatrix, CVector,
    HermitianEigen, I,
};

#[derive(Debug, Clone, PartialEq)]
pub struct MagnusTerms {
    pub omega1: CMatrix,
    pub omega2: CMatrix,
    pub order: u8,
}

impl MagnusTerms {
    /// Largest `|Ω + Ω†|` entry over both terms.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        [&self.omega1, &self.omega2]
            .iter()
            .map(|m| {
                (*m + &adjoint(m))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `Ω₁ + Ω₂` (or `Ω₁` alone at order 1).
    pub fn exponent(&self) -> CMatrix {
        if self.order >= 2 {
            &self.omega1 + &self.omega2
        } else {
            self.omega1.clone()
        }
    }

    pub fn propagator(&self) -> Result<CMatrix> {
        expm_antihermitian(&self.exponent())
    }
}

/// `(duration, H)` for each traversed piece of the schedule.
fn pieces(lattice: &LatticeSpec, schedule: &DriveSchedule, t: f64) -> Result<Vec<(f64, CMatrix)>> {
    let segs = schedule.pieces_until(t)?;
    let mut cache: Vec<(u64, CMatrix)> = Vec::new();
    let mut out = Vec::with_capacity(segs.len());
    for seg in segs {
        let key = seg.b_y.to_bits();
        let h = match cache.iter().find(|(k, _)| *k == key) {
            Some((_, h)) => h.clone(),
            None => {
                let h = segment_hamiltonian(lattice, schedule.mode(), seg.b_y)?;
                cache.push((key, h.clone()));
                h
            }
        };
        out.push((seg.duration, h));
    }
    Ok(out)
}

fn terms_from_pieces(dim: usize, pieces: &[(f64, CMatrix)]) -> MagnusTerms {
    let mut omega1 = CMatrix::zeros((dim, dim));
    let mut omega2 = CMatrix::zeros((dim, dim));
    for (a, (ta, ha)) in pieces.iter().enumerate() {
        omega1.scaled_add(-I * *ta, ha);
        for (tb, hb) in &pieces[..a] {
            // segment a follows segment b: area of the ordered region is τ_a τ_b
            omega2.scaled_add(Complex64::new(-0.5 * ta * tb, 0.0), &commutator(ha, hb));
        }
    }
    MagnusTerms {
        omega1,
        omega2,
        order: 2,
    }
}

/// `Ω₁ = −i Σ τ_k H_k`, `Ω₂ = −½ Σ_{a>b} τ_a τ_b [H_a, H_b]`.
pub fn magnus_terms(lattice: &LatticeSpec, schedule: &DriveSchedule, t: f64) -> Result<MagnusTerms> {
    let ps = pieces(lattice, schedule, t)?;
    Ok(terms_from_pieces(lattice.dim(), &ps))
}

/// Time-ordered product of segment propagators.
pub fn exact_propagator(lattice: &LatticeSpec, schedule: &DriveSchedule, t: f64) -> Result<CMatrix> {
    let mut u = identity(lattice.dim());
    for (tau, h) in pieces(lattice, schedule, t)? {
        u = HermitianEigen::new(&h)?.propagator(tau).dot(&u);
    }
    Ok(u)
}

/// `‖exp(Ω₁ + Ω₂) − U(t)‖₂`.
pub fn magnus_error(lattice: &LatticeSpec, schedule: &DriveSchedule, t: f64) -> Result<f64> {
    let approx = magnus_terms(lattice, schedule, t)?.propagator()?;
    let exact = exact_propagator(lattice, schedule, t)?;
    spectral_norm(&(approx - exact))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceExpansion {
    /// `σ_ε²(0)`.
    pub sigma_sq_0: f64,
    /// `(⟨[H², Ω₁]⟩ + 2E₀⟨[Ω₁, H]⟩)/N²`.
    pub first_bracket: f64,
    /// Second-order contribution, including `−⟨[H, Ω₁]⟩²/N²`.
    pub second_bracket: f64,
    /// `σ_ε²(t)` from exact evolution.
    pub exact: f64,
}

impl VarianceExpansion {
    pub fn partial_sums(&self) -> [f64; 3] {
        [
            self.sigma_sq_0,
            self.sigma_sq_0 + self.first_bracket,
            self.sigma_sq_0 + self.first_bracket + self.second_bracket,
        ]
    }

    /// Ordered `(label, value)` series table.
    pub fn terms(&self) -> Vec<(&'static str, f64)> {
        let [s0, s1, s2] = self.partial_sums();
        vec![
            ("sigma_sq_0", self.sigma_sq_0),
            ("first_bracket", self.first_bracket),
            ("second_bracket", self.second_bracket),
            ("partial_sum_0", s0),
            ("partial_sum_1", s1),
            ("partial_sum_2", s2),
            ("exact", self.exact),
        ]
    }
}

/// `⟨ψ|A|ψ⟩`.
fn expect(a: &CMatrix, psi: &CVector) -> Complex64 {
    inner(psi.view(), a.dot(psi).view())
}

/// Expansion of `σ_ε²(t)` for `H_spin/N` in powers of the drive, from
/// `U†AU ≈ A + [A, Ω₁] + [A, Ω₂] + ½[Ω₁, [Ω₁, A]]`.
pub fn variance_expansion(
    state: &QuantumState,
    lattice: &LatticeSpec,
    schedule: &DriveSchedule,
    t: f64,
) -> Result<VarianceExpansion> {
    let h_op = build_spin_hamiltonian(lattice)?;
    if state.dim() != h_op.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_op.dim(),
            found: state.dim(),
        });
    }
    let n2 = (lattice.n_sites() * lattice.n_sites()) as f64;
    let h = h_op.matrix();
    let h2 = h.dot(h);
    let psi = state.amplitudes();
    let terms = magnus_terms(lattice, schedule, t)?;
    let (o1, o2) = (&terms.omega1, &terms.omega2);

    let e0 = expect(h, psi).re;
    let sigma_sq_0 = (expect(&h2, psi).re - e0 * e0) / n2;

    let first = |a: &CMatrix| expect(&commutator(a, o1), psi);
    let o1_sq_half = o1.dot(o1).mapv(|z| 0.5 * z);
    let second = |a: &CMatrix| {
        expect(&commutator(a, o2), psi) + expect(&anticommutator(&o1_sq_half, a), psi)
            - expect(&o1.dot(a).dot(o1), psi)
    };
    let d1_h = first(h);
    let first_bracket = (first(&h2) + 2.0 * e0 * expect(&commutator(o1, h), psi)).re / n2;
    let second_bracket = (second(&h2) - 2.0 * e0 * second(h) - d1_h * d1_h).re / n2;

    let u = exact_propagator(lattice, schedule, t)?;
    let evolved = QuantumState::unchecked(u.dot(psi))?;
    let (_, sigma_t) = h_op.density_stats(&evolved)?;
    Ok(VarianceExpansion {
        sigma_sq_0,
        first_bracket,
        second_bracket,
        exact: sigma_t * sigma_t,
    })
}

/// `ℐ = (i/N²)⟨{D, H} − 2⟨H⟩D⟩` with `D = [H(t), H]`: the instantaneous
/// `dσ_ε²/dt` of `H = h_ref` while `h_drive` generates the evolution.
pub fn variance_rate(state_t: &QuantumState, h_drive: &MatrixOperator, h_ref: &MatrixOperator) -> Result<f64> {
    let dim = h_ref.dim();
    for found in [h_drive.dim(), state_t.dim()] {
        if found != dim {
            return Err(Error::DimensionMismatch { expected: dim, found });
        }
    }
    let (ht, h) = (h_drive.matrix(), h_ref.matrix());
    let psi = state_t.amplitudes();
    // D v = H(t) H v − H H(t) v, applied without forming D
    let apply_d = |v: &CVector| ht.dot(&h.dot(v)) - h.dot(&ht.dot(v));
    let h_psi = h.dot(psi);
    let d_psi = apply_d(psi);
    let mean_h = inner(psi.view(), h_psi.view()).re;
    let anti = inner(psi.view(), apply_d(&h_psi).view()) + inner(h_psi.view(), d_psi.view());
    let mean_d = inner(psi.view(), d_psi.view());
    let n = h_ref.n_sites() as f64;
    Ok((I * (anti - 2.0 * mean_h * mean_d)).re / (n * n))
}
