//! Full `2^N` product-space construction of the spin model: Heisenberg
//! couplings plus a longitudinal field, transverse driving, exact evolution,
//! pair correlators of a local-term decomposition, eigenbasis distributions,
//! and the hard-core boson dual.
//!
//! Basis states are bit strings; bit `i` set means site `i` is up (occupied
//! in the boson picture). Spin operators are half Pauli matrices.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::collective_spin::{DriveMode, DriveSchedule, EnergyDistribution, WeightedValue};
use crate::error::{Error, Result};
use crate::linalg::{
    eigvalsh, hermiticity_defect, max_abs_diff, CMatrix, CVector, HermitianEigen, I,
};

pub const MAX_SITES: usize = 14;
/// Merge tolerance for degenerate eigenvalues in [`eigenbasis_distribution`].
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;
const HERMITICITY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub j_ij: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    n_sites: usize,
    couplings: Vec<Coupling>,
    b_z: f64,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, couplings: Vec<Coupling>, b_z: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidLattice("no sites".into()));
        }
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites(n_sites));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &couplings {
            if c.i >= c.j || c.j >= n_sites {
                return Err(Error::InvalidLattice(format!(
                    "bond ({}, {}) must satisfy i < j < {n_sites}",
                    c.i, c.j
                )));
            }
            if !c.j_ij.is_finite() {
                return Err(Error::InvalidLattice(format!("bond ({}, {}) has non-finite J", c.i, c.j)));
            }
            if !seen.insert((c.i, c.j)) {
                return Err(Error::InvalidLattice(format!("duplicate bond ({}, {})", c.i, c.j)));
            }
        }
        if !b_z.is_finite() {
            return Err(Error::InvalidLattice("b_z must be finite".into()));
        }
        Ok(Self {
            n_sites,
            couplings,
            b_z,
        })
    }

    /// Open chain with uniform nearest-neighbour coupling.
    pub fn chain(n_sites: usize, j: f64, b_z: f64) -> Result<Self> {
        let bonds = (1..n_sites)
            .map(|k| Coupling {
                i: k - 1,
                j: k,
                j_ij: j,
            })
            .collect();
        Self::new(n_sites, bonds, b_z)
    }

    /// Uniform all-to-all coupling.
    pub fn complete(n_sites: usize, j: f64, b_z: f64) -> Result<Self> {
        let mut bonds = Vec::new();
        for a in 0..n_sites {
            for b in a + 1..n_sites {
                bonds.push(Coupling { i: a, j: b, j_ij: j });
            }
        }
        Self::new(n_sites, bonds, b_z)
    }

    /// Every pair coupled with `J_ij` uniform in `[−1, 1]`, `b_z` uniform in `[−1, 1]`.
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        let mut bonds = Vec::new();
        for a in 0..n_sites {
            for b in a + 1..n_sites {
                bonds.push(Coupling {
                    i: a,
                    j: b,
                    j_ij: rng.random_range(-1.0..=1.0),
                });
            }
        }
        let b_z = rng.random_range(-1.0..=1.0);
        Self::new(n_sites, bonds, b_z)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn b_z(&self) -> f64 {
        self.b_z
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `Σ_j J_ij` for each site.
    pub fn coupling_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_sites];
        for c in &self.couplings {
            sums[c.i] += c.j_ij;
            sums[c.j] += c.j_ij;
        }
        sums
    }
}

#[inline]
fn bit(state: usize, site: usize) -> bool {
    (state >> site) & 1 == 1
}

#[inline]
fn sz(state: usize, site: usize) -> f64 {
    if bit(state, site) {
        0.5
    } else {
        -0.5
    }
}

/// Sparse operator stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    pub fn new(dim: usize, entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for &(r, c, a) in &self.entries {
            out[r] += a * v[c];
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros((self.dim, self.dim));
        for &(r, c, a) in &self.entries {
            m[[r, c]] += a;
        }
        m
    }
}

/// Dense Hermitian operator with the site count used for intensive
/// quantities and, optionally, a local-term decomposition `H = Σ_i H_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    matrix: CMatrix,
    n_sites: usize,
    label: String,
    decomposition: Option<Decomposition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub scheme: String,
    pub terms: Vec<SparseOperator>,
}

impl MatrixOperator {
    pub fn new(matrix: CMatrix, n_sites: usize, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "operator is not Hermitian (defect {defect:e})"
            )));
        }
        if n_sites == 0 {
            return Err(Error::InvalidArgument("operator needs a positive site count".into()));
        }
        Ok(Self {
            matrix,
            n_sites,
            label: label.into(),
            decomposition: None,
        })
    }

    /// Attaches local terms after checking they sum to the operator.
    pub fn with_decomposition(mut self, scheme: impl Into<String>, terms: Vec<SparseOperator>) -> Result<Self> {
        let dim = self.dim();
        let mut sum = CMatrix::zeros((dim, dim));
        for t in &terms {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
            for &(r, c, a) in t.entries() {
                sum[[r, c]] += a;
            }
        }
        let defect = max_abs_diff(&sum, &self.matrix);
        if defect > 1e-12 {
            return Err(Error::DecompositionMismatch(format!(
                "local terms differ from the operator by {defect:e}"
            )));
        }
        self.decomposition = Some(Decomposition {
            scheme: scheme.into(),
            terms,
        });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.decomposition.as_ref()
    }

    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        self.check_state(state)?;
        let hv = self.matrix.dot(state.amplitudes());
        Ok(crate::linalg::inner(state.amplitudes().view(), hv.view()).re)
    }

    /// Mean and standard deviation of `operator / n_sites`.
    pub fn density_stats(&self, state: &QuantumState) -> Result<(f64, f64)> {
        self.check_state(state)?;
        let psi = state.amplitudes();
        let hv = self.matrix.dot(psi);
        let mean = crate::linalg::inner(psi.view(), hv.view()).re;
        // ‖(H − ⟨H⟩)ψ‖ rather than √(⟨H²⟩ − ⟨H⟩²), which cancels near eigenstates
        let residual = &hv - &psi.mapv(|z| z * mean);
        let n = self.n_sites as f64;
        Ok((mean / n, crate::linalg::norm(residual.view()) / n))
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }
}

/// Pure state on `n_sites` spin-1/2 sites.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_sites: usize,
    amplitudes: CVector,
}

impl QuantumState {
    /// Requires unit norm within 1e-12.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let state = Self::unchecked(amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Accepts any non-zero norm; used for evolved states whose drift is reported, not corrected.
    pub(crate) fn unchecked(amplitudes: CVector) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "state length {dim} is not 2^N"
            )));
        }
        let n_sites = dim.trailing_zeros() as usize;
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites(n_sites));
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites(n_sites));
        }
        let dim = 1 << n_sites;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(self.amplitudes.view())
    }

    /// `| ‖ψ‖ − 1 |`; evolution never renormalises, so this exposes drift.
    pub fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    /// `⟨S_i^z⟩` for every site.
    pub fn site_magnetization(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_sites];
        for (b, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (i, o) in out.iter_mut().enumerate() {
                *o += p * sz(b, i);
            }
        }
        out
    }
}

/// Dicke state: equal superposition of all basis states with `up` sites up.
pub fn dicke_state(n_sites: usize, up: usize) -> Result<QuantumState> {
    if n_sites > MAX_SITES {
        return Err(Error::TooManySites(n_sites));
    }
    if up > n_sites {
        return Err(Error::InvalidSector(format!("{up} up spins on {n_sites} sites")));
    }
    let dim = 1usize << n_sites;
    let members: Vec<usize> = (0..dim).filter(|b| b.count_ones() as usize == up).collect();
    let amp = Complex64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(dim);
    for b in members {
        v[b] = amp;
    }
    QuantumState::new(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Matrix elements of `S_i^axis` acting on basis state `b`: `(b′, ⟨b′|S|b⟩)`.
fn site_action(b: usize, i: usize, axis: Axis) -> (usize, Complex64) {
    let up = bit(b, i);
    match axis {
        Axis::Z => (b, Complex64::new(sz(b, i), 0.0)),
        Axis::X => (b ^ (1 << i), Complex64::new(0.5, 0.0)),
        // ⟨↑|S^y|↓⟩ = −i/2
        Axis::Y => (b ^ (1 << i), if up { 0.5 * I } else { -0.5 * I }),
    }
}

/// `S_tot^axis = Σ_i S_i^axis`.
pub fn total_spin(n_sites: usize, axis: Axis) -> Result<CMatrix> {
    if n_sites > MAX_SITES {
        return Err(Error::TooManySites(n_sites));
    }
    let dim = 1 << n_sites;
    let mut m = CMatrix::zeros((dim, dim));
    for b in 0..dim {
        for i in 0..n_sites {
            let (r, a) = site_action(b, i, axis);
            m[[r, b]] += a;
        }
    }
    Ok(m)
}

/// `S⃗_tot²`.
pub fn total_spin_squared(n_sites: usize) -> Result<CMatrix> {
    let mut out = CMatrix::zeros((1 << n_sites, 1 << n_sites));
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let s = total_spin(n_sites, axis)?;
        out = out + s.dot(&s);
    }
    Ok(out)
}

/// Triplets of `S⃗_i · S⃗_j` scaled by `coefficient`.
fn push_exchange(entries: &mut Vec<(usize, usize, Complex64)>, dim: usize, i: usize, j: usize, coefficient: f64) {
    for b in 0..dim {
        let same = bit(b, i) == bit(b, j);
        let zz = if same { 0.25 } else { -0.25 };
        entries.push((b, b, Complex64::new(coefficient * zz, 0.0)));
        if !same {
            let flipped = b ^ (1 << i) ^ (1 << j);
            entries.push((flipped, b, Complex64::new(coefficient * 0.5, 0.0)));
        }
    }
}

fn merge_triplets(dim: usize, entries: Vec<(usize, usize, Complex64)>) -> SparseOperator {
    let mut map: std::collections::BTreeMap<(usize, usize), Complex64> = std::collections::BTreeMap::new();
    for (r, c, a) in entries {
        *map.entry((r, c)).or_insert(ZERO) += a;
    }
    SparseOperator {
        dim,
        entries: map
            .into_iter()
            .filter(|(_, a)| *a != ZERO)
            .map(|((r, c), a)| (r, c, a))
            .collect(),
    }
}

/// Local terms `H_i = −B_z S_i^z − ½ Σ_j J_ij S⃗_i·S⃗_j`.
pub fn local_terms(lattice: &LatticeSpec) -> Vec<SparseOperator> {
    let n = lattice.n_sites();
    let dim = lattice.dim();
    (0..n)
        .map(|site| {
            let mut entries = Vec::new();
            for b in 0..dim {
                entries.push((b, b, Complex64::new(-lattice.b_z() * sz(b, site), 0.0)));
            }
            for c in lattice.couplings().iter().filter(|c| c.i == site || c.j == site) {
                push_exchange(&mut entries, dim, c.i, c.j, -0.5 * c.j_ij);
            }
            merge_triplets(dim, entries)
        })
        .collect()
}

pub const SPLIT_SCHEME: &str = "site field plus half of each incident bond";

/// `H_spin = −Σ_{i<j} J_ij S⃗_i·S⃗_j − B_z Σ_i S_i^z`, with its local-term decomposition.
pub fn build_spin_hamiltonian(lattice: &LatticeSpec) -> Result<MatrixOperator> {
    let terms = local_terms(lattice);
    let dim = lattice.dim();
    let mut h = CMatrix::zeros((dim, dim));
    for t in &terms {
        for &(r, c, a) in t.entries() {
            h[[r, c]] += a;
        }
    }
    MatrixOperator::new(h, lattice.n_sites(), "H_spin")?.with_decomposition(SPLIT_SCHEME, terms)
}

/// `H_tr = −b_y Σ_i S_i^y`.
pub fn transverse_operator(n_sites: usize, b_y: f64) -> Result<CMatrix> {
    Ok(total_spin(n_sites, Axis::Y)?.mapv(|z| -b_y * z))
}

/// Hamiltonian in force during a segment with transverse field `b_y`.
pub fn segment_hamiltonian(lattice: &LatticeSpec, mode: DriveMode, b_y: f64) -> Result<CMatrix> {
    let tr = transverse_operator(lattice.n_sites(), b_y)?;
    Ok(match mode {
        DriveMode::Replace => tr,
        DriveMode::Augment => build_spin_hamiltonian(lattice)?.matrix().clone() + tr,
    })
}

/// Segment propagators with cached eigendecompositions.
///
/// Replace-mode Hamiltonians are `b_y · (−S_tot^y)`, so one decomposition of
/// the generator serves every segment; augment-mode ones are cached per `b_y`.
pub struct Evolver {
    lattice: LatticeSpec,
    mode: DriveMode,
    h_spin: Option<CMatrix>,
    generator: Option<HermitianEigen>,
    augment: HashMap<u64, HermitianEigen>,
}

impl Evolver {
    pub fn new(lattice: &LatticeSpec, mode: DriveMode) -> Result<Self> {
        let h_spin = match mode {
            DriveMode::Augment => Some(build_spin_hamiltonian(lattice)?.matrix().clone()),
            DriveMode::Replace => None,
        };
        Ok(Self {
            lattice: lattice.clone(),
            mode,
            h_spin,
            generator: None,
            augment: HashMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// `exp(−i H(b_y) dt) v`.
    pub fn step(&mut self, v: &CVector, b_y: f64, dt: f64) -> Result<CVector> {
        match self.mode {
            DriveMode::Replace => {
                if self.generator.is_none() {
                    let g = transverse_operator(self.lattice.n_sites(), 1.0)?;
                    self.generator = Some(HermitianEigen::new(&g)?);
                }
                Ok(self.generator.as_ref().expect("cached").evolve(v, b_y * dt))
            }
            DriveMode::Augment => {
                let key = b_y.to_bits();
                if !self.augment.contains_key(&key) {
                    let tr = transverse_operator(self.lattice.n_sites(), b_y)?;
                    let h = self.h_spin.as_ref().expect("augment keeps H_spin") + &tr;
                    self.augment.insert(key, HermitianEigen::new(&h)?);
                }
                Ok(self.augment[&key].evolve(v, dt))
            }
        }
    }

    /// State at time `t` of the schedule.
    pub fn evolve_to(&mut self, state: &QuantumState, schedule: &DriveSchedule, t: f64) -> Result<QuantumState> {
        self.check(state, schedule)?;
        let mut v = state.amplitudes().clone();
        for seg in schedule.pieces_until(t)? {
            v = self.step(&v, seg.b_y, seg.duration)?;
        }
        QuantumState::unchecked(v)
    }

    /// States at `t = 0` and at the end of every segment.
    pub fn trajectory(&mut self, state: &QuantumState, schedule: &DriveSchedule) -> Result<Vec<(f64, QuantumState)>> {
        self.check(state, schedule)?;
        let mut out = vec![(0.0, state.clone())];
        let mut v = state.amplitudes().clone();
        let mut t = 0.0;
        for seg in schedule.segments() {
            v = self.step(&v, seg.b_y, seg.duration)?;
            t += seg.duration;
            out.push((t, QuantumState::unchecked(v.clone())?));
        }
        Ok(out)
    }

    fn check(&self, state: &QuantumState, schedule: &DriveSchedule) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        if schedule.mode() != self.mode {
            return Err(Error::InvalidSchedule("schedule mode differs from the evolver's".into()));
        }
        Ok(())
    }
}

/// Trajectory of `state` under `schedule`, sampled at segment boundaries.
///
/// The schedule's own `b_z` is ignored in favour of the lattice field.
pub fn evolve_state(
    state: &QuantumState,
    lattice: &LatticeSpec,
    schedule: &DriveSchedule,
) -> Result<Vec<(f64, QuantumState)>> {
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Evolver::new(lattice, schedule.mode())?.trajectory(state, schedule)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorReport {
    /// `G_ij = Re⟨H_i H_j⟩ − ⟨H_i⟩⟨H_j⟩`.
    pub g_matrix: Array2<f64>,
    /// Mean of `|G_ij|`.
    pub gbar: f64,
    /// Variance of `H / N′` computed directly from the full operator.
    pub sigma_sq: f64,
    /// `|σ² − Σ G_ij / N′²|`.
    pub identity_defect: f64,
}

/// Connected correlators of the operator's local terms in `state`.
pub fn connected_pair_correlators(state: &QuantumState, operator: &MatrixOperator) -> Result<CorrelatorReport> {
    let decomposition = operator.decomposition().ok_or(Error::MissingDecomposition)?;
    operator.check_state(state)?;
    let psi = state.amplitudes();
    let images: Vec<CVector> = decomposition.terms.iter().map(|t| t.apply(psi)).collect();
    let means: Vec<f64> = images
        .iter()
        .map(|hv| crate::linalg::inner(psi.view(), hv.view()).re)
        .collect();
    let n = images.len();
    let mut g = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in a..n {
            let v = crate::linalg::inner(images[a].view(), images[b].view()).re - means[a] * means[b];
            g[[a, b]] = v;
            g[[b, a]] = v;
        }
    }
    let n2 = (n * n) as f64;
    let gbar = g.iter().map(|x| x.abs()).sum::<f64>() / n2;
    let from_terms = g.sum() / n2;
    let hv = operator.matrix().dot(psi);
    let mean = crate::linalg::inner(psi.view(), hv.view()).re;
    let sigma_sq = (crate::linalg::inner(hv.view(), hv.view()).re - mean * mean) / n2;
    let identity_defect = (sigma_sq - from_terms).abs();
    let scale = 1.0 + g.iter().map(|x| x.abs()).fold(0.0, f64::max) + mean * mean / n2;
    if identity_defect > 1e-10 * scale {
        return Err(Error::DecompositionMismatch(format!(
            "variance identity violated by {identity_defect:e}"
        )));
    }
    Ok(CorrelatorReport {
        g_matrix: g,
        gbar,
        sigma_sq,
        identity_defect,
    })
}

/// Distribution of `operator / N` in `state`: eigenvalue densities weighted
/// by `|⟨φ_α|ψ⟩|²`, eigenvalues within `merge_tol` merged.
pub fn eigenbasis_distribution(state: &QuantumState, operator: &MatrixOperator, merge_tol: f64) -> Result<EnergyDistribution> {
    operator.check_state(state)?;
    let eig = HermitianEigen::new(operator.matrix())?;
    let coeffs = eig.vectors.t().mapv(|z| z.conj()).dot(state.amplitudes());
    let n = operator.n_sites() as f64;
    let mut points: Vec<WeightedValue> = Vec::new();
    let mut cluster_start = f64::NEG_INFINITY;
    for (&e, c) in eig.values.iter().zip(coeffs.iter()) {
        let w = c.norm_sqr();
        match points.last_mut() {
            Some(last) if e - cluster_start <= merge_tol => {
                // weighted centre of the cluster
                let total = last.weight + w;
                if total > 0.0 {
                    last.value = (last.value * last.weight + e / n * w) / total;
                }
                last.weight = total;
            }
            _ => {
                cluster_start = e;
                points.push(WeightedValue { value: e / n, weight: w });
            }
        }
    }
    EnergyDistribution::empirical(points)
}

/// `b_i` on the occupation basis (bit set = occupied).
fn annihilator_action(b: usize, i: usize) -> Option<usize> {
    bit(b, i).then_some(b ^ (1 << i))
}

/// Hard-core boson form of `H_spin`:
///
/// `−Σ_{i<j} J_ij[½(b†_i b_j + h.c.) + n_i n_j] − Σ_i (B_z − ½Σ_j J_ij) n_i + B_z N/2 − ¼Σ_{i<j} J_ij`.
pub fn build_bose_hamiltonian(lattice: &LatticeSpec) -> Result<MatrixOperator> {
    let n = lattice.n_sites();
    let dim = lattice.dim();
    let sums = lattice.coupling_sums();
    let constant = lattice.b_z() * n as f64 / 2.0 - 0.25 * lattice.couplings().iter().map(|c| c.j_ij).sum::<f64>();
    let mut h = CMatrix::zeros((dim, dim));
    for b in 0..dim {
        let occ = |i: usize| if bit(b, i) { 1.0 } else { 0.0 };
        let mut diag = constant;
        for (i, s) in sums.iter().enumerate() {
            diag -= (lattice.b_z() - 0.5 * s) * occ(i);
        }
        for c in lattice.couplings() {
            diag -= c.j_ij * occ(c.i) * occ(c.j);
            // b†_i b_j and b†_j b_i
            for (to, from) in [(c.i, c.j), (c.j, c.i)] {
                if let Some(mid) = annihilator_action(b, from) {
                    if !bit(mid, to) {
                        h[[mid | (1 << to), b]] += Complex64::new(-0.5 * c.j_ij, 0.0);
                    }
                }
            }
        }
        h[[b, b]] += Complex64::new(diag, 0.0);
    }
    MatrixOperator::new(h, n, "H_Bose")
}

/// `−(i b_y/2) Σ_i (b†_i − b_i)` on the occupation basis.
pub fn doping_operator(n_sites: usize, b_y: f64) -> Result<CMatrix> {
    if n_sites > MAX_SITES {
        return Err(Error::TooManySites(n_sites));
    }
    let dim = 1 << n_sites;
    let mut m = CMatrix::zeros((dim, dim));
    for b in 0..dim {
        for i in 0..n_sites {
            if bit(b, i) {
                // −b_i term: +(i b_y/2)
                m[[b ^ (1 << i), b]] += 0.5 * b_y * I;
            } else {
                m[[b | (1 << i), b]] += -0.5 * b_y * I;
            }
        }
    }
    Ok(m)
}

/// `Σ_i n_i`.
pub fn number_operator(n_sites: usize) -> CMatrix {
    let dim = 1 << n_sites;
    let mut m = CMatrix::zeros((dim, dim));
    for b in 0..dim {
        m[[b, b]] = Complex64::new(b.count_ones() as f64, 0.0);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseDualReport {
    /// Largest gap between the sorted spectra of `H_Bose` and `H_spin`.
    pub spectrum_max_diff: f64,
    /// `‖doping(b_y) − H_tr(−b_y)‖_max`: the doping term is the transverse
    /// field with reversed amplitude.
    pub doping_max_diff: f64,
    /// `‖Σ n_i − (S_tot^z + N/2)‖_max`.
    pub number_max_diff: f64,
    pub spectra_agree: bool,
}

pub const DUALITY_TOL: f64 = 1e-10;

pub fn bose_dual(lattice: &LatticeSpec) -> Result<(MatrixOperator, BoseDualReport)> {
    let bose = build_bose_hamiltonian(lattice)?;
    let spin = build_spin_hamiltonian(lattice)?;
    let a = eigvalsh(bose.matrix())?;
    let b = eigvalsh(spin.matrix())?;
    let spectrum_max_diff = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let n = lattice.n_sites();
    let probe = 0.731;
    let doping_max_diff = max_abs_diff(&doping_operator(n, probe)?, &transverse_operator(n, -probe)?);
    let shifted = total_spin(n, Axis::Z)? + &CMatrix::eye(lattice.dim()).mapv(|z| z * (n as f64 / 2.0));
    let number_max_diff = max_abs_diff(&number_operator(n), &shifted);
    let report = BoseDualReport {
        spectrum_max_diff,
        doping_max_diff,
        number_max_diff,
        spectra_agree: spectrum_max_diff <= DUALITY_TOL,
    };
    Ok((bose, report))
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    n_sites: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRecord {
    n_sites: usize,
    label: String,
    dim: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

impl Serialize for QuantumState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRecord {
            n_sites: self.n_sites,
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = StateRecord::deserialize(d)?;
        let v: CVector = rec.amplitudes.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let state = QuantumState::new(v).map_err(serde::de::Error::custom)?;
        if state.n_sites != rec.n_sites {
            return Err(serde::de::Error::custom("n_sites disagrees with the amplitude count"));
        }
        Ok(state)
    }
}

impl Serialize for MatrixOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRecord {
            n_sites: self.n_sites,
            label: self.label.clone(),
            dim: self.dim(),
            entries: self.matrix.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = OperatorRecord::deserialize(d)?;
        if rec.entries.len() != rec.dim * rec.dim {
            return Err(serde::de::Error::custom("entry count is not dim²"));
        }
        let data: Vec<Complex64> = rec.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let m = Array2::from_shape_vec((rec.dim, rec.dim), data).map_err(serde::de::Error::custom)?;
        MatrixOperator::new(m, rec.n_sites, rec.label).map_err(serde::de::Error::custom)
    }
}

/// Sorted eigenvalues, exposed for spectrum comparisons.
pub fn spectrum(operator: &MatrixOperator) -> Result<Array1<f64>> {
    eigvalsh(operator.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective_spin::{analytic_sigma, SpinSector};
    use crate::linalg::commutator;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn two_site_spectrum() {
        let lat = LatticeSpec::chain(2, 1.0, 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let e = spectrum(&h).unwrap();
        let expect = [-1.25, -0.25, 0.75, 0.75];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{e}");
        }
    }

    #[test]
    fn free_spins_binomial_spectrum() {
        let lat = LatticeSpec::new(4, vec![], 1.0).unwrap();
        let e = spectrum(&build_spin_hamiltonian(&lat).unwrap()).unwrap();
        let expect = [-2.0, -1.0, -1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn hamiltonian_conserves_total_spin() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let lat = LatticeSpec::random(5, &mut rng).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let s2 = total_spin_squared(5).unwrap();
        let sz = total_spin(5, Axis::Z).unwrap();
        assert!(commutator(h.matrix(), &s2).iter().all(|z| z.norm() < 1e-12));
        assert!(commutator(h.matrix(), &sz).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn lattice_validation() {
        assert!(matches!(LatticeSpec::chain(15, 1.0, 0.0), Err(Error::TooManySites(15))));
        let dup = vec![Coupling { i: 0, j: 1, j_ij: 1.0 }, Coupling { i: 0, j: 1, j_ij: 2.0 }];
        assert!(LatticeSpec::new(3, dup, 0.0).is_err());
        let bad = vec![Coupling { i: 1, j: 0, j_ij: 1.0 }];
        assert!(LatticeSpec::new(3, bad, 0.0).is_err());
    }

    #[test]
    fn dicke_rotation_matches_closed_form() {
        let lat = LatticeSpec::complete(4, 0.7, 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let mut ev = Evolver::new(&lat, DriveMode::Replace).unwrap();
        for up in 0..=4 {
            let psi = dicke_state(4, up).unwrap();
            let sector = SpinSector::dicke(4, up as f64 - 2.0).unwrap();
            let sched = DriveSchedule::rotation(FRAC_PI_2, 1.0).unwrap();
            let out = ev.evolve_to(&psi, &sched, 1.0).unwrap();
            assert!(out.norm_drift() < 1e-12);
            let (_, sigma) = h.density_stats(&out).unwrap();
            let expect = analytic_sigma(&sector, &sched, 1.0).unwrap();
            assert!((sigma - expect).abs() < 1e-12, "up={up}: {sigma} vs {expect}");
        }
    }

    #[test]
    fn full_turn_restores_energy() {
        let lat = LatticeSpec::complete(3, 1.0, 0.6).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let psi = dicke_state(3, 1).unwrap();
        let sched = DriveSchedule::rotation(2.0 * std::f64::consts::PI, 0.6).unwrap();
        let traj = evolve_state(&psi, &lat, &sched).unwrap();
        let (e0, s0) = h.density_stats(&traj[0].1).unwrap();
        let (e1, s1) = h.density_stats(&traj[1].1).unwrap();
        assert!((e0 - e1).abs() < 1e-12 && (s0 - s1).abs() < 1e-9);
    }

    #[test]
    fn correlators_of_product_state_vanish() {
        let lat = LatticeSpec::new(3, vec![], 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let psi = QuantumState::basis(3, 0b111).unwrap();
        let r = connected_pair_correlators(&psi, &h).unwrap();
        assert!(r.g_matrix.iter().all(|g| g.abs() < 1e-15));
        assert_eq!(r.gbar, 0.0);
    }

    #[test]
    fn rotated_dicke_correlators() {
        let lat = LatticeSpec::complete(4, 1.0, 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let psi = dicke_state(4, 2).unwrap();
        let sched = DriveSchedule::rotation(FRAC_PI_2, 1.0).unwrap();
        let out = Evolver::new(&lat, DriveMode::Replace).unwrap().evolve_to(&psi, &sched, 1.0).unwrap();
        let r = connected_pair_correlators(&out, &h).unwrap();
        assert!(r.sigma_sq > 0.0);
        assert!(r.gbar >= r.sigma_sq);
        assert!((r.sigma_sq - 0.1875).abs() < 1e-12);
    }

    #[test]
    fn missing_decomposition_is_reported() {
        let op = MatrixOperator::new(total_spin(2, Axis::Z).unwrap(), 2, "Sz").unwrap();
        let psi = QuantumState::basis(2, 1).unwrap();
        assert_eq!(connected_pair_correlators(&psi, &op), Err(Error::MissingDecomposition));
    }

    #[test]
    fn eigenstate_is_point_mass() {
        let lat = LatticeSpec::complete(3, 1.0, 1.0).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let psi = QuantumState::basis(3, 0b111).unwrap();
        let d = eigenbasis_distribution(&psi, &h, DEFAULT_MERGE_TOL).unwrap();
        let heavy: Vec<_> = d.points().unwrap().iter().filter(|p| p.weight > 1e-12).collect();
        assert_eq!(heavy.len(), 1);
        assert!((heavy[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bose_dual_small_chain() {
        let lat = LatticeSpec::chain(2, 1.0, 0.4).unwrap();
        let (bose, report) = bose_dual(&lat).unwrap();
        assert!(report.spectra_agree, "{report:?}");
        assert!(report.doping_max_diff < 1e-15);
        assert!(report.number_max_diff < 1e-15);
        let spin = build_spin_hamiltonian(&lat).unwrap();
        assert!(max_abs_diff(bose.matrix(), spin.matrix()) < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let psi = dicke_state(2, 1).unwrap();
        let s = serde_json::to_string(&psi).unwrap();
        let back: QuantumState = serde_json::from_str(&s).unwrap();
        assert_eq!(back, psi);
        let op = MatrixOperator::new(total_spin(1, Axis::Y).unwrap(), 1, "Sy").unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert!(s.contains("[0.0,-0.5]"));
        let back: MatrixOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
    }
}
