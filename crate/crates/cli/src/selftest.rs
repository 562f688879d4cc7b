//! Oracle suites behind `--selftest`. Every suite is deterministic: fixed
//! parameters, seeded generators, in-memory fixtures.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use enwidth_core::bounds::{equilibrium_rate_threshold, uncertainty_check};
use enwidth_core::collective_spin::{analytic_sigma, central_moment, eigenweight_distribution, exact_central_moment};
use enwidth_core::exact_lattice::{dicke_state, transverse_operator};
use enwidth_core::ising_entangle::{
    correlator_by_enumeration, correlator_hypergeometric, dicke_entanglement, domain_wall_correlator,
    spin_multiplicity, temperature_energy_maps, TemperatureQuery,
};
use enwidth_core::linalg::CMatrix;
use enwidth_core::nonequil_observables::{
    fit_collapse, fit_liquid, green_at, planck, smeared_planck, synthetic_liquid, ViscosityDataset, DEFAULT_ABAR_BOUNDS,
};
use enwidth_core::quad::{integrate, QuadOptions};
use enwidth_core::special::erfc;
use enwidth_core::{
    CorrelatorMethod, DickeSplit, DomainWallEnsemble, DriveMode, DriveSchedule, EntropyMethod, MatrixOperator,
    MomentMethod, Multiplicity, MultiplicityMethod, QuantumState, SmearKernel, SpinSector,
};
use ndarray::{Array1, Array2};
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::commands;
use crate::fixtures::{synthetic_fixture, FIXTURE_LIQUIDS};
use crate::ingest::ingest_bytes;
use crate::output::Table;
use crate::{row, Artifacts, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    /// Passes when `|value − target| ≤ tol`; reports the deviation.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::at_most(name, (value - target).abs(), tol)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            pass: ok,
        }
    }
}

pub fn run(command: &Command) -> Result<Artifacts, CliError> {
    let checks = suite(command)?;
    let mut t = Table::new(&["check", "value", "bound", "status"]);
    for c in &checks {
        t.push(row![c.name.as_str(), c.value, c.bound, if c.pass { "PASS" } else { "FAIL" }]);
    }
    let mut out = Artifacts {
        failures: checks.iter().filter(|c| !c.pass).count(),
        ..Artifacts::default()
    };
    out.add(format!("{}.selftest.csv", command.name()), t.to_csv()?);
    Ok(out)
}

pub fn suite(command: &Command) -> Result<Vec<Check>, CliError> {
    match command {
        Command::SpinSigma(_) => spin_sigma_suite(),
        Command::SpinDist(_) => spin_dist_suite(),
        Command::ExactCheck(_) => exact_check_suite(),
        Command::BoseDual(_) => bose_dual_suite(),
        Command::MagnusCheck(_) => magnus_suite(),
        Command::VarianceRate(_) => variance_rate_suite(),
        Command::BoundsCheck(_) => bounds_suite(),
        Command::RateThreshold(_) => rate_threshold_suite(),
        Command::IsingCorr(_) => ising_suite(),
        Command::DickeEntropy(_) => dicke_suite(),
        Command::Multiplicity(_) => multiplicity_suite(),
        Command::ViscosityFit(_) => viscosity_suite(),
        Command::Collapse(_) => collapse_suite(),
        Command::SmearGreen(_) => green_suite(),
        Command::SmearPlanck(_) => planck_suite(),
        Command::MomentCompare(_) => moment_suite(),
    }
}

fn spin_sigma_suite() -> Result<Vec<Check>, CliError> {
    let mut c = Vec::new();
    let sector = SpinSector::new(4, 2.0, 0.0)?;
    let sigma = analytic_sigma(&sector, &DriveSchedule::rotation(FRAC_PI_2, 1.0)?, 1.0)?;
    c.push(Check::near("worked example sqrt(3)/4", sigma, 3f64.sqrt() / 4.0, 1e-12));
    c.push(Check::at_most(
        "no rotation, no width",
        analytic_sigma(&sector, &DriveSchedule::rotation(0.0, 1.0)?, 1.0)?,
        1e-15,
    ));
    let mut worst: f64 = 0.0;
    for (n, s, m) in [(4, 2.0, 1.0), (7, 3.5, -1.5), (10, 3.0, 2.0), (40, 12.0, -5.0)] {
        let sector = SpinSector::new(n, s, m)?;
        for k in 0..8 {
            let theta = 0.4 * k as f64;
            let d = eigenweight_distribution(&sector, theta, 1.3, 0.0)?;
            let a = analytic_sigma(&sector, &DriveSchedule::rotation(theta, 1.3)?, 1.0)?;
            worst = worst.max((d.std_dev() - a).abs());
        }
    }
    c.push(Check::at_most("analytic width = eigenweight std", worst, 1e-10));
    let augment = DriveSchedule::constant(DriveMode::Augment, 1.0, 0.7, 1.0)?;
    c.push(Check::at_most("augment width at t=0", analytic_sigma(&sector, &augment, 0.0)?, 1e-15));
    Ok(c)
}

#[derive(Debug, Clone, Copy)]
pub struct DistributionLaw {
    pub ks_distance: f64,
    pub characteristic_max_diff: f64,
    pub weight_sum_defect: f64,
}

/// KS distance and characteristic-function agreement at `S`, `m = 0`, `θ = π/2`.
pub fn distribution_law(stot: f64, q_points: usize) -> Result<DistributionLaw, CliError> {
    let (_, s) = commands::spin_dist(&SpinDistArgs {
        stot,
        n: None,
        m: 0.0,
        theta: FRAC_PI_2,
        bz: 1.0,
        q_points,
    })?;
    let characteristic_max_diff = s
        .characteristic
        .iter()
        .map(|p| (p.empirical_re - p.bessel).hypot(p.empirical_im))
        .fold(0.0, f64::max);
    let sector = SpinSector::new((2.0 * stot) as u32, stot, 0.0)?;
    let total: f64 = eigenweight_distribution(&sector, FRAC_PI_2, 1.0, 0.0)?
        .points()
        .expect("empirical")
        .iter()
        .map(|p| p.weight)
        .sum();
    Ok(DistributionLaw {
        ks_distance: s.ks_distance,
        characteristic_max_diff,
        weight_sum_defect: (total - 1.0).abs(),
    })
}

fn spin_dist_suite() -> Result<Vec<Check>, CliError> {
    let law = distribution_law(1000.0, 10)?;
    Ok(vec![
        Check::at_most("KS distance to arcsine, S=1000", law.ks_distance, 0.05),
        Check::at_most("characteristic vs J0, S=1000", law.characteristic_max_diff, 1e-3),
        Check::at_most("weights sum to one", law.weight_sum_defect, 1e-12),
    ])
}

/// Largest `|analytic − exact|` over the complete-graph sweep.
pub fn exact_check_max_diff(n_max: usize, thetas: usize) -> Result<f64, CliError> {
    let rows = commands::exact_check(&ExactCheckArgs {
        n_max,
        thetas,
        j: 1.0,
        bz: 1.0,
    })?;
    Ok(rows.iter().map(|r| (r.analytic - r.exact).abs()).fold(0.0, f64::max))
}

fn exact_check_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![Check::at_most(
        "analytic = exact, N<=6, 20 angles",
        exact_check_max_diff(6, 20)?,
        1e-10,
    )])
}

/// Worst spectrum, doping and number-operator gaps over the seeded sets.
pub fn bose_dual_worst(n_min: usize, n_max: usize, sets: usize, seed: u64) -> Result<(f64, f64, f64), CliError> {
    let reports = commands::bose_dual_reports(&BoseDualArgs { n_min, n_max, sets, seed })?;
    let fold = |f: fn(&enwidth_core::exact_lattice::BoseDualReport) -> f64| {
        reports.iter().map(|(_, _, r)| f(r)).fold(0.0, f64::max)
    };
    Ok((
        fold(|r| r.spectrum_max_diff),
        fold(|r| r.doping_max_diff),
        fold(|r| r.number_max_diff),
    ))
}

fn bose_dual_suite() -> Result<Vec<Check>, CliError> {
    let (spectrum, doping, number) = bose_dual_worst(2, 6, 3, 7)?;
    Ok(vec![
        Check::at_most("spin and boson spectra", spectrum, 1e-10),
        Check::at_most("doping term = reversed transverse field", doping, 1e-12),
        Check::at_most("number operator = S^z + N/2", number, 1e-12),
    ])
}

pub fn default_magnus_args() -> MagnusCheckArgs {
    MagnusCheckArgs {
        n: 3,
        j: 0.6,
        bz: 0.8,
        by1: 0.9,
        by2: -0.4,
        t_min: 1e-3,
        t_max: 1e-1,
        points: 9,
    }
}

fn magnus_suite() -> Result<Vec<Check>, CliError> {
    let (_, s) = commands::magnus_check(&default_magnus_args())?;
    Ok(vec![
        Check::near("truncation error slope", s.slope, 3.0, 0.2),
        Check::at_most("first bracket on an eigenstate", s.eigenstate_first_bracket.abs(), 1e-12),
        Check::at_most("exp(Omega) unitary", s.unitarity_defect, 1e-12),
        Check::at_most("Omega anti-Hermitian", s.anti_hermiticity_defect, 1e-12),
    ])
}

/// Largest relative gap between the variance rate and central differences.
pub fn variance_rate_worst(n: usize, up: usize, steps: usize) -> Result<f64, CliError> {
    let rows = commands::variance_rate_rows(&VarianceRateArgs {
        n,
        up,
        j: 0.5,
        bz: 1.0,
        theta: 0.6,
        steps,
        h: 1e-5,
    })?;
    Ok(rows
        .iter()
        .map(|r| (r.rate - r.finite_difference).abs() / r.rate.abs().max(r.finite_difference.abs()))
        .fold(0.0, f64::max))
}

fn variance_rate_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![Check::at_most(
        "rate = d sigma^2/dt (relative)",
        variance_rate_worst(4, 3, 6)?,
        1e-6,
    )])
}

fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut a = Array2::from_shape_fn((dim, dim), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let at = a.t().mapv(|z| z.conj());
    a = (&a + &at).mapv(|z| z * 0.5);
    a
}

/// Smallest Robertson slack (commutator form) over random Hermitian pairs
/// and random states of dimension `2^k ≤ 64`.
pub fn robertson_fuzz(pairs: usize, seed: u64) -> Result<f64, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for i in 0..pairs {
        let n = 1 + i % 6;
        let dim = 1usize << n;
        let a = MatrixOperator::new(random_hermitian(dim, &mut rng), n, "A")?;
        let b = MatrixOperator::new(random_hermitian(dim, &mut rng), n, "B")?;
        let v = Array1::from_shape_fn(dim, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi = QuantumState::new(v.mapv(|z| z / norm))?;
        let r = uncertainty_check(&psi, &a, &b, n)?;
        worst = worst.min(r.commutator.slack).min(r.rate.slack);
    }
    Ok(worst)
}

/// `(lhs, rhs)` of the worked collective-spin case.
pub fn worked_bounds() -> Result<(f64, f64), CliError> {
    let r = commands::bounds_check(&BoundsCheckArgs {
        n: 4,
        up: 3,
        theta: FRAC_PI_2,
        j: 1.0,
        bz: 1.0,
        by: 1.0,
    })?;
    Ok((r.commutator.lhs, r.rate.rhs))
}

fn bounds_suite() -> Result<Vec<Check>, CliError> {
    let (lhs, rhs) = worked_bounds()?;
    let n = 4;
    let h = transverse_operator(n, 1.0)?;
    let psi = dicke_state(n, 2)?;
    let a = MatrixOperator::new(h.clone(), n, "A")?;
    let b = MatrixOperator::new(h, n, "B")?;
    let same = uncertainty_check(&psi, &a, &b, n)?;
    Ok(vec![
        Check::near("worked case lhs", lhs, 0.625, 1e-6),
        Check::near("worked case rhs", rhs, 0.125, 1e-6),
        Check::at_most("Robertson fuzz, 200 pairs (negated slack)", -robertson_fuzz(200, 11)?, 1e-12),
        Check::at_most("commuting pair has zero rhs", same.commutator.rhs, 1e-15),
    ])
}

fn rate_threshold_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::near("T=1, C=1", equilibrium_rate_threshold(1.0, 1.0, 1.0)?, 2.0, 0.0),
        Check::near("T=2, C=(4,1)", equilibrium_rate_threshold(2.0, 4.0, 1.0)?, 16.0, 1e-12),
        Check::holds("negative temperature rejected", equilibrium_rate_threshold(-1.0, 1.0, 1.0).is_err()),
    ])
}

/// Every `(L, k, d)` with `L ≤ l_max` where enumeration and the closed form differ.
pub fn enumeration_mismatches(l_max: usize) -> Result<usize, CliError> {
    let mut bad = 0;
    for l in 2..=l_max {
        for k in 0..l {
            let e = DomainWallEnsemble::new(l, k, 1.0)?;
            for d in 1..l {
                if correlator_by_enumeration(&e, d)? != correlator_hypergeometric(&e, d)? {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

/// `|Asymptotic − Exact|` at `ρ = k/B = 1/4`, `d = 2` for `B = 40·2^j`.
pub fn asymptotic_errors(doublings: u32) -> Result<Vec<f64>, CliError> {
    (0..=doublings)
        .map(|j| {
            let b = 40usize << j;
            let e = DomainWallEnsemble::new(b + 1, b / 4, 1.0)?;
            let exact = domain_wall_correlator(&e, 2, CorrelatorMethod::ExactHypergeometric)?;
            let asym = domain_wall_correlator(&e, 2, CorrelatorMethod::Asymptotic)?;
            Ok((asym - exact).abs())
        })
        .collect()
}

/// Largest `B·|thermal − exact| / d²` with `β` from the energy map.
pub fn thermal_band(l: usize, k: usize, d_max: usize) -> Result<f64, CliError> {
    let e = DomainWallEnsemble::new(l, k, 1.0)?;
    let beta = temperature_energy_maps(l, 1.0, TemperatureQuery::Energy(e.energy()))?.beta;
    let mut worst: f64 = 0.0;
    for d in 1..=d_max {
        let exact = domain_wall_correlator(&e, d, CorrelatorMethod::ExactHypergeometric)?;
        let thermal = domain_wall_correlator(&e, d, CorrelatorMethod::Thermal { beta })?;
        worst = worst.max(e.bonds() as f64 * (thermal - exact).abs() / (d * d) as f64);
    }
    Ok(worst)
}

fn ising_suite() -> Result<Vec<Check>, CliError> {
    let e = DomainWallEnsemble::new(3, 1, 1.0)?;
    let errs = asymptotic_errors(3)?;
    let worst_ratio = errs
        .windows(2)
        .map(|w| (w[0] / w[1] / 2.0 - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Check::near(
            "L=3, k=1, d=2",
            domain_wall_correlator(&e, 2, CorrelatorMethod::ExactEnumeration)?,
            -1.0,
            0.0,
        ),
        Check::at_most("enumeration = hypergeometric, L<=10", enumeration_mismatches(10)? as f64, 0.0),
        Check::at_most("asymptotic error halves per doubling (rel. dev.)", worst_ratio, 0.3),
        Check::at_most("thermal band B|diff|/d^2, L=201", thermal_band(201, 50, 6)?, 1.0),
    ])
}

/// Slope of the half-chain Dicke entropy against `ln N` for `N = 16·2^j ≤ n_max`.
pub fn dicke_log_slope(n_max: u32) -> Result<f64, CliError> {
    let mut ns = Vec::new();
    let mut s = Vec::new();
    let mut n = 16;
    while n <= n_max {
        ns.push(n as f64);
        s.push(dicke_entanglement(&DickeSplit::new(n, 0.0, n / 2)?, EntropyMethod::Exact)?);
        n *= 2;
    }
    // S = ½ ln N + c: regress S on ln N
    let ln: Vec<f64> = ns.iter().map(|x| x.ln()).collect();
    let k = ln.len() as f64;
    let (mx, my) = (ln.iter().sum::<f64>() / k, s.iter().sum::<f64>() / k);
    let sxy: f64 = ln.iter().zip(&s).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = ln.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `(2/3) ln(3/2) + (1/3) ln 6`: Schmidt weights `1/6, 2/3, 1/6`.
pub const DICKE_4_2: f64 = 0.867_563_228_481_461_3;

fn dicke_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::near(
            "N=2 single site",
            dicke_entanglement(&DickeSplit::new(2, 0.0, 1)?, EntropyMethod::Exact)?,
            LN_2,
            1e-15,
        ),
        Check::near(
            "N=4, L_A=2",
            dicke_entanglement(&DickeSplit::new(4, 0.0, 2)?, EntropyMethod::Exact)?,
            DICKE_4_2,
            1e-9,
        ),
        Check::near("log slope, N=16..1024", dicke_log_slope(1024)?, 0.5, 0.1),
    ])
}

fn exact_multiplicity(n: u64, two_s: u64) -> Result<BigUint, CliError> {
    match spin_multiplicity(n, two_s, MultiplicityMethod::Exact)? {
        Multiplicity::Exact(m) => Ok(m),
        Multiplicity::Gaussian { .. } => unreachable!("exact method"),
    }
}

/// Sizes `N ≤ n_max` where `Σ M(S)(2S+1) ≠ 2^N`.
pub fn sum_rule_failures(n_max: u64) -> Result<usize, CliError> {
    let mut bad = 0;
    for n in 1..=n_max {
        let mut total = BigUint::ZERO;
        for two_s in (n % 2..=n).step_by(2) {
            total += exact_multiplicity(n, two_s)? * (two_s + 1);
        }
        if total != BigUint::from(1u8) << n {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Gaussian over exact multiplicity at `N = 10⁴`, `S = 2√N`.
pub fn gaussian_ratio() -> Result<f64, CliError> {
    let (n, two_s) = (10_000u64, 400u64);
    let exact = spin_multiplicity(n, two_s, MultiplicityMethod::Exact)?.ln();
    let gauss = spin_multiplicity(n, two_s, MultiplicityMethod::Gaussian)?.ln();
    Ok((gauss - exact).exp())
}

/// Tables for `N = 2, 3, 4`, listed from the largest `S` down.
pub const MULTIPLICITY_TABLES: [(u64, &[u64]); 3] = [(2, &[1, 1]), (3, &[1, 2]), (4, &[1, 3, 2])];

pub fn tables_match() -> Result<bool, CliError> {
    for (n, expected) in MULTIPLICITY_TABLES {
        for (i, want) in expected.iter().enumerate() {
            if exact_multiplicity(n, n - 2 * i as u64)? != BigUint::from(*want) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn multiplicity_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::holds("tables for N=2,3,4", tables_match()?),
        Check::at_most("sum rule failures, N<=64", sum_rule_failures(64)? as f64, 0.0),
        Check::near("Gaussian/exact at N=1e4, S=200", gaussian_ratio()?, 1.0, 0.05),
    ])
}

/// Largest relative Ā error on the shipped noiseless fixture.
pub fn fixture_round_trip() -> Result<f64, CliError> {
    let (data, meta) = synthetic_fixture()?;
    let ingested = ingest_bytes(&data, &meta)?;
    let fits = fit_collapse(&ingested.dataset, DEFAULT_ABAR_BOUNDS)?;
    let mut worst: f64 = 0.0;
    for (fit, (id, abar, _, _)) in fits.iter().zip(FIXTURE_LIQUIDS) {
        if fit.liquid_id != id {
            return Err(CliError::Input(format!("fixture order: {} vs {id}", fit.liquid_id)));
        }
        worst = worst.max((fit.abar - abar).abs() / abar);
    }
    Ok(worst)
}

/// Largest relative Ā error under 2% log-noise for `Ā ∈ [0.05, 0.12]`.
pub fn noisy_recovery(seed: u64) -> Result<f64, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (i, abar) in [0.05, 0.065, 0.08, 0.095, 0.11, 0.12].into_iter().enumerate() {
        let s = synthetic_liquid(&format!("noisy-{i}"), abar, 1200.0, 5.0, 24, 0.02, &mut rng)?;
        let fit = fit_liquid(&s.record, DEFAULT_ABAR_BOUNDS)?;
        worst = worst.max((fit.abar - abar).abs() / abar);
    }
    Ok(worst)
}

/// `(fit RMS, injected RMS)` pairs for a noisy multi-liquid collapse.
pub fn collapse_residuals(seed: u64) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut liquids = Vec::new();
    let mut injected = Vec::new();
    for (i, (abar, t_l)) in [(0.05, 800.0), (0.08, 1100.0), (0.1, 1500.0), (0.12, 1900.0)].into_iter().enumerate() {
        let s = synthetic_liquid(&format!("liquid-{i}"), abar, t_l, 2.0, 20, 0.02, &mut rng)?;
        injected.push(s.injected_rms);
        liquids.push(s.record);
    }
    let fits = fit_collapse(&ViscosityDataset::new(liquids)?, DEFAULT_ABAR_BOUNDS)?;
    Ok(fits.iter().map(|f| f.residual_rms).zip(injected).collect())
}

/// mpmath values of `erfc` at 0.5, 3, 10 and 26.
pub const ERFC_SPOTS: [(f64, f64); 4] = [
    (0.5, 0.479_500_122_186_953_5),
    (3.0, 2.209_049_699_858_544e-5),
    (10.0, 2.088_487_583_762_545e-45),
    (26.0, 5.663_192_408_856_143e-296),
];

fn erfc_spot_error() -> f64 {
    ERFC_SPOTS
        .iter()
        .map(|&(x, v)| (erfc(x) - v).abs() / v)
        .fold(0.0, f64::max)
}

fn viscosity_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::at_most("noiseless fixture recovers abar (relative)", fixture_round_trip()?, 1e-6),
        Check::at_most("2% log-noise recovery (relative)", noisy_recovery(3)?, 0.05),
        Check::at_most("erfc spot values (relative)", erfc_spot_error(), 1e-13),
    ])
}

fn collapse_suite() -> Result<Vec<Check>, CliError> {
    let (data, meta) = synthetic_fixture()?;
    let fits = fit_collapse(&ingest_bytes(&data, &meta)?.dataset, DEFAULT_ABAR_BOUNDS)?;
    let master = fits.iter().map(|f| f.master_curve_rms()).fold(0.0, f64::max);
    let mut c = vec![Check::at_most("fixture collapses onto the master curve", master, 1e-9)];
    for (i, (fit, injected)) in collapse_residuals(5)?.into_iter().enumerate() {
        c.push(Check::at_most(format!("liquid {i}: residual below injected noise"), fit, injected));
    }
    Ok(c)
}

/// `∫ A(ω) dω` through `ω = c + γ tan u`, which maps the Lorentzian tails
/// onto a finite interval.
pub fn green_sum_rule(eps_k: f64, kernel: &SmearKernel, z: f64, tau: f64) -> Result<f64, CliError> {
    let gamma = 1.0 / tau;
    let centre = eps_k - kernel.mean();
    let f = |u: f64| {
        let omega = centre + gamma * u.tan();
        let jac = gamma / u.cos().powi(2);
        green_at(omega, eps_k, kernel, z, tau).map_or(f64::NAN, |g| -g.im / PI * jac)
    };
    let opts = QuadOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_intervals: 20_000,
    };
    let lim = FRAC_PI_2 - 1e-12;
    Ok(integrate(f, -lim, lim, opts)?.value)
}

fn green_suite() -> Result<Vec<Check>, CliError> {
    let z = 0.8;
    Ok(vec![
        Check::near("sum rule, delta kernel", green_sum_rule(0.3, &SmearKernel::delta(0.1)?, z, 10.0)?, z, 1e-6),
        Check::near(
            "sum rule, Gaussian kernel",
            green_sum_rule(0.3, &SmearKernel::gaussian(0.1, 0.5)?, z, 10.0)?,
            z,
            1e-6,
        ),
    ])
}

/// Frequencies where the delta-kernel average differs from `planck` in any bit.
pub fn delta_planck_mismatches() -> Result<usize, CliError> {
    let mut bad = 0;
    for i in 1..=200 {
        let nu = 0.05 * i as f64;
        for t in [0.3, 1.0, 2.7] {
            if smeared_planck(nu, &SmearKernel::delta(t)?, 0.0, t)?.to_bits() != planck(nu, t).to_bits() {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// Largest relative gap between a `σ_T = 1e-4·T` Gaussian average and `planck`.
pub fn narrow_planck_error() -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for i in 1..=40 {
        let nu = 0.25 * i as f64;
        let s = smeared_planck(nu, &SmearKernel::gaussian(1.0, 1e-4)?, 0.0, 1.0)?;
        worst = worst.max((s - planck(nu, 1.0)).abs() / planck(nu, 1.0));
    }
    Ok(worst)
}

fn planck_suite() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::at_most("delta kernel bit-exact (mismatches)", delta_planck_mismatches()? as f64, 0.0),
        Check::at_most("narrow Gaussian kernel (relative)", narrow_planck_error()?, 1e-6),
    ])
}

/// Exact over asymptotic `2g`-th central moment at `m = 0`, `θ = π/2`.
pub fn moment_ratio(stot: f64, g: u32) -> Result<f64, CliError> {
    let sector = SpinSector::new((2.0 * stot) as u32, stot, 0.0)?;
    let sched = DriveSchedule::rotation(FRAC_PI_2, 1.0)?;
    Ok(central_moment(&sector, &sched, 1.0, g, MomentMethod::Exact)?
        / central_moment(&sector, &sched, 1.0, g, MomentMethod::Asymptotic)?)
}

fn moment_suite() -> Result<Vec<Check>, CliError> {
    let mut c = Vec::new();
    for g in 1..=3 {
        c.push(Check::near(format!("moment ratio g={g}, S=2000"), moment_ratio(2000.0, g)?, 1.0, 0.05));
    }
    let worst_g1 = [1.0, 2.0, 5.0, 10.0, 57.0]
        .into_iter()
        .map(|s| moment_ratio(s, 1).map(|r| (r - 1.0).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    c.push(Check::at_most("g=1 ratio is one at every S", worst_g1, 1e-12));
    let sector = SpinSector::new(10, 5.0, 0.0)?;
    let third = exact_central_moment(&sector, &DriveSchedule::rotation(0.7, 1.0)?, 1.0, 3)?;
    c.push(Check::at_most("odd moment vanishes at m=0", third.abs(), 1e-14));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::loglog_slope;

    #[test]
    fn check_constructors() {
        assert!(Check::near("x", 1.0, 1.0 + 1e-13, 1e-12).pass);
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(!Check::holds("x", false).pass);
    }

    #[test]
    fn dicke_constant_is_the_closed_form() {
        let closed = (2.0 / 3.0) * 1.5f64.ln() + 6f64.ln() / 3.0;
        assert!((DICKE_4_2 - closed).abs() < 1e-15);
    }

    #[test]
    fn loglog_slope_of_a_cube() {
        let x = [0.1, 0.2, 0.4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 5.0 * v.powi(3)).collect();
        assert!((loglog_slope(&x, &y) - 3.0).abs() < 1e-12);
    }
}
