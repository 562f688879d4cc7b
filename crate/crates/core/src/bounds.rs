//! Uncertainty bounds linking the energy-density spread of a system
//! Hamiltonian `H` to the spread of the Hamiltonian `H̃` that drives it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_lattice::{connected_pair_correlators, MatrixOperator, QuantumState};
use crate::linalg::{inner, I};

pub const SLACK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            lhs,
            rhs,
            satisfied: slack >= -SLACK_TOL,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReports {
    /// `σ_{H/N} σ_{H̃} ≥ ½|⟨[H/N, H̃]⟩|`.
    pub commutator: BoundReport,
    /// `σ_{H/N} σ_{H̃} ≥ |dE/dt| / 2N`, `dE/dt = i⟨[H̃, H]⟩`.
    pub rate: BoundReport,
    /// `Ḡ_S Ḡ_I ≥ |dE/dt|² / 4N²`.
    pub correlator: BoundReport,
    pub sigma_density: f64,
    pub sigma_total: f64,
    pub de_dt: f64,
    /// Local-term splits used for `Ḡ_S` and `Ḡ_I`.
    pub system_scheme: String,
    pub total_scheme: String,
}

/// `Σ_ij |G_ij|` for `op` and the decomposition label; an operator without
/// local terms counts as a single term, giving its plain variance.
fn correlator_mass(state: &QuantumState, op: &MatrixOperator, variance: f64) -> Result<(f64, String)> {
    match op.decomposition() {
        Some(d) => {
            let r = connected_pair_correlators(state, op)?;
            Ok((r.g_matrix.iter().map(|g| g.abs()).sum(), d.scheme.clone()))
        }
        None => Ok((variance, "single term".to_string())),
    }
}

/// Mean and variance of `op` (no site normalisation).
fn moments(state: &QuantumState, op: &MatrixOperator) -> (f64, f64) {
    let psi = state.amplitudes();
    let v = op.matrix().dot(psi);
    let mean = inner(psi.view(), v.view()).re;
    (mean, (inner(v.view(), v.view()).re - mean * mean).max(0.0))
}

/// Evaluates the three bounds in `state`. `Ḡ_S` is normalised by `N²`;
/// `Ḡ_I` is the unnormalised sum, which bounds `σ²_{H̃}` from above.
pub fn uncertainty_check(
    state: &QuantumState,
    h_system: &MatrixOperator,
    h_total: &MatrixOperator,
    n_sites: usize,
) -> Result<UncertaintyReports> {
    let dim = h_system.dim();
    for found in [h_total.dim(), state.dim()] {
        if found != dim {
            return Err(Error::DimensionMismatch { expected: dim, found });
        }
    }
    if n_sites == 0 {
        return Err(Error::InvalidArgument("n_sites must be positive".into()));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let n = n_sites as f64;
    let psi = state.amplitudes();
    let (h, ht) = (h_system.matrix(), h_total.matrix());

    let (_, var_h) = moments(state, h_system);
    let (_, var_t) = moments(state, h_total);
    let sigma_density = var_h.sqrt() / n;
    let sigma_total = var_t.sqrt();
    let lhs = sigma_density * sigma_total;

    // ⟨[H, H̃]⟩ = ⟨Hψ|H̃ψ⟩ − ⟨H̃ψ|Hψ⟩ = 2i Im⟨Hψ|H̃ψ⟩
    let h_psi = h.dot(psi);
    let t_psi = ht.dot(psi);
    let comm = inner(h_psi.view(), t_psi.view()) - inner(t_psi.view(), h_psi.view());
    let commutator = BoundReport::new(lhs, 0.5 * comm.norm() / n);

    let de_dt = (I * -comm).re;
    let rate = BoundReport::new(lhs, de_dt.abs() / (2.0 * n));

    let (g_s, system_scheme) = correlator_mass(state, h_system, var_h)?;
    let (g_i, total_scheme) = correlator_mass(state, h_total, var_t)?;
    let correlator = BoundReport::new(g_s / (n * n) * g_i, de_dt * de_dt / (4.0 * n * n));

    Ok(UncertaintyReports {
        commutator,
        rate,
        correlator,
        sigma_density,
        sigma_total,
        de_dt,
        system_scheme,
        total_scheme,
    })
}

/// Cooling/heating rate `2T²√(C_I C_S)` above which a system cannot stay in
/// equilibrium.
pub fn equilibrium_rate_threshold(temperature: f64, cv_total: f64, cv_subsystem: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain {
            what: "temperature",
            value: temperature,
            range: "(0, ∞)".into(),
        });
    }
    for (what, c) in [("total heat capacity", cv_total), ("subsystem heat capacity", cv_subsystem)] {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Domain {
                what,
                value: c,
                range: "[0, ∞)".into(),
            });
        }
    }
    Ok(2.0 * temperature * temperature * (cv_total * cv_subsystem).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective_spin::{DriveMode, DriveSchedule};
    use crate::exact_lattice::{build_spin_hamiltonian, dicke_state, transverse_operator, Evolver, LatticeSpec};
    use std::f64::consts::FRAC_PI_2;

    fn worked_case(up: usize) -> UncertaintyReports {
        let lat = LatticeSpec::complete(4, 1.0, 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let sched = DriveSchedule::rotation(FRAC_PI_2, 1.0).unwrap();
        let psi = Evolver::new(&lat, DriveMode::Replace)
            .unwrap()
            .evolve_to(&dicke_state(4, up).unwrap(), &sched, 1.0)
            .unwrap();
        let ht = MatrixOperator::new(transverse_operator(4, 1.0).unwrap(), 4, "H_tr").unwrap();
        uncertainty_check(&psi, &h, &ht, 4).unwrap()
    }

    #[test]
    fn collective_worked_example() {
        let r = worked_case(3);
        assert!((r.commutator.lhs - 0.625).abs() < 1e-12);
        assert!((r.rate.rhs - 0.125).abs() < 1e-12);
        assert!((r.commutator.rhs - r.rate.rhs).abs() < 1e-12);
        assert!(r.correlator.satisfied);
    }

    #[test]
    fn zero_magnetisation_has_no_rate() {
        let r = worked_case(2);
        assert!(r.de_dt.abs() < 1e-12);
        assert!(r.rate.rhs < 1e-12 && r.rate.lhs > 0.0);
    }

    #[test]
    fn commuting_pair_has_zero_rhs() {
        let lat = LatticeSpec::chain(3, 0.5, 0.2).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let ht = MatrixOperator::new(h.matrix().mapv(|z| z * 2.0), 3, "2H").unwrap();
        let psi = dicke_state(3, 1).unwrap();
        let r = uncertainty_check(&psi, &h, &ht, 3).unwrap();
        assert!(r.commutator.rhs < 1e-15 && r.commutator.satisfied);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(equilibrium_rate_threshold(1.0, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(equilibrium_rate_threshold(3.0, 0.0, 5.0).unwrap(), 0.0);
        let ratio = equilibrium_rate_threshold(2.0, 0.3, 0.7).unwrap() / equilibrium_rate_threshold(1.0, 0.3, 0.7).unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);
        assert!(equilibrium_rate_threshold(1.0, -1.0, 1.0).is_err());
        assert!(equilibrium_rate_threshold(0.0, 1.0, 1.0).is_err());
    }
}
