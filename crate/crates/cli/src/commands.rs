//! Normal (non-self-test) runs of every subcommand.

use std::f64::consts::PI;

use enwidth_core::bounds::{equilibrium_rate_threshold, uncertainty_check, UncertaintyReports};
use enwidth_core::collective_spin::{
    analytic_distribution, analytic_energy_mean, analytic_sigma, characteristic_value, eigenweight_distribution,
};
use enwidth_core::exact_lattice::{
    bose_dual, build_spin_hamiltonian, dicke_state, segment_hamiltonian, transverse_operator, BoseDualReport,
    Evolver, MAX_SITES,
};
use enwidth_core::ising_entangle::{
    dicke_entanglement, dicke_sigma_sq, domain_wall_correlator, spin_multiplicity,
    temperature_energy_maps, CorrelatorMethod, DickeSplit, DomainWallEnsemble, EntropyMethod, Multiplicity,
    MultiplicityMethod, TemperatureQuery, ThermalPoint, MAX_ENUMERATION_LENGTH,
};
use enwidth_core::linalg::{adjoint, identity, max_abs_diff, HermitianEigen};
use enwidth_core::magnus::{magnus_error, magnus_terms, variance_expansion, variance_rate};
use enwidth_core::nonequil_observables::{
    fit_collapse, moment_compare, smeared_green, smeared_planck, CollapseFit, SmearKernel,
};
use enwidth_core::{DriveMode, DriveSchedule, DriveSegment, LatticeSpec, MatrixOperator, QuantumState, SpinSector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::*;
use crate::ingest::{ingest_bytes, FlaggedRow, Ingested};
use crate::manifest::read_digested;
use crate::output::{fmt_f64, to_json, Table};
use crate::{row, units, Artifacts, CliError};

pub fn run(command: &Command) -> Result<Artifacts, CliError> {
    let name = command.name();
    let mut out = Artifacts::default();
    let csv = format!("{name}.csv");
    let json = format!("{name}.json");
    match command {
        Command::SpinSigma(a) => out.add(csv, spin_sigma(a)?.to_csv()?),
        Command::SpinDist(a) => {
            let (table, summary) = spin_dist(a)?;
            out.add(csv, table.to_csv()?);
            out.add(json, to_json(&summary)?);
        }
        Command::ExactCheck(a) => out.add(csv, exact_check_table(&exact_check(a)?).to_csv()?),
        Command::BoseDual(a) => out.add(csv, bose_dual_table(a)?.to_csv()?),
        Command::MagnusCheck(a) => {
            let (table, summary) = magnus_check(a)?;
            out.add(csv, table.to_csv()?);
            out.add(json, to_json(&summary)?);
        }
        Command::VarianceRate(a) => out.add(csv, variance_rate_table(a)?.to_csv()?),
        Command::BoundsCheck(a) => {
            let r = bounds_check(a)?;
            out.add(csv, bounds_table(&r).to_csv()?);
            out.add(json, to_json(&r)?);
        }
        Command::RateThreshold(a) => out.add(csv, rate_threshold(a)?.to_csv()?),
        Command::IsingCorr(a) => {
            let (table, thermal) = ising_corr(a)?;
            out.add(csv, table.to_csv()?);
            out.add(json, to_json(&thermal)?);
        }
        Command::DickeEntropy(a) => out.add(csv, dicke_entropy(a)?.to_csv()?),
        Command::Multiplicity(a) => out.add(csv, multiplicity(a)?.to_csv()?),
        Command::ViscosityFit(a) => {
            let (fits, ingested) = load_and_fit(a, &mut out)?;
            out.add(csv, fit_summary_table(&fits).to_csv()?);
            out.add(json, to_json(&FitReport::new(&fits, &ingested.flagged))?);
        }
        Command::Collapse(a) => {
            let (fits, _) = load_and_fit(a, &mut out)?;
            out.add(csv, collapse_table(&fits).to_csv()?);
        }
        Command::SmearGreen(a) => out.add(csv, smear_green(a)?.to_csv()?),
        Command::SmearPlanck(a) => out.add(csv, smear_planck(a)?.to_csv()?),
        Command::MomentCompare(a) => out.add(csv, moment_table(a)?.to_csv()?),
    }
    Ok(out)
}

/// `steps` evenly spaced points on `[lo, hi]`.
pub fn sweep(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    match steps {
        0 => Err(CliError::Usage("--steps must be at least 1".into())),
        1 => Ok(vec![lo]),
        _ => Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()),
    }
}

fn log_sweep(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Usage(format!("need 0 < min < max, got ({lo}, {hi})")));
    }
    Ok(sweep(lo.ln(), hi.ln(), steps)?.into_iter().map(f64::exp).collect())
}

fn check_sites(n: usize) -> Result<(), CliError> {
    if !(1..=MAX_SITES).contains(&n) {
        return Err(CliError::Usage(format!("--n must lie in [1, {MAX_SITES}]")));
    }
    Ok(())
}

pub fn spin_sigma(a: &SpinSigmaArgs) -> Result<Table, CliError> {
    let sector = SpinSector::new(a.n, a.stot, a.m)?;
    let head = |x: f64| row![a.n, a.stot, a.m, a.bz, x];
    match a.mode {
        ModeArg::Replace => {
            let mut t = Table::new(&["n", "stot", "m", "bz", "theta", "sigma", "mean"]);
            let thetas = match a.theta {
                Some(th) => vec![th],
                None => sweep(0.0, PI, a.steps)?,
            };
            for th in thetas {
                let sched = DriveSchedule::rotation(th, a.bz)?;
                let mut r = head(th);
                r.extend(row![
                    analytic_sigma(&sector, &sched, 1.0)?,
                    analytic_energy_mean(&sector, &sched, 1.0, 0.0)?
                ]);
                t.push(r);
            }
            Ok(t)
        }
        ModeArg::Augment => {
            let mut t = Table::new(&["n", "stot", "m", "bz", "t", "by", "sigma", "mean"]);
            let times = match a.t {
                Some(x) => vec![x],
                None => sweep(0.0, a.t_max, a.steps)?,
            };
            let span = times.iter().copied().fold(0.0, f64::max);
            let sched = DriveSchedule::constant(DriveMode::Augment, if span > 0.0 { span } else { 1.0 }, a.by, a.bz)?;
            for x in times {
                let mut r = head(x);
                r.extend(row![
                    a.by,
                    analytic_sigma(&sector, &sched, x)?,
                    analytic_energy_mean(&sector, &sched, x, 0.0)?
                ]);
                t.push(r);
            }
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicSample {
    pub q: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub bessel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinDistSummary {
    pub n: u32,
    pub stot: f64,
    pub m: f64,
    pub theta: f64,
    pub mean: f64,
    pub sigma_eigenweights: f64,
    pub sigma_analytic: f64,
    pub ks_distance: f64,
    pub characteristic: Vec<CharacteristicSample>,
}

pub fn spin_dist(a: &SpinDistArgs) -> Result<(Table, SpinDistSummary), CliError> {
    let n = match a.n {
        Some(n) => n,
        None => {
            let n = 2.0 * a.stot;
            if n.fract() != 0.0 || n < 1.0 {
                return Err(CliError::Usage(format!("--stot {} is not a positive half-integer", a.stot)));
            }
            n as u32
        }
    };
    let sector = SpinSector::new(n, a.stot, a.m)?;
    let dist = eigenweight_distribution(&sector, a.theta, a.bz, 0.0)?;
    let sched = DriveSchedule::rotation(a.theta, a.bz)?;
    let law = analytic_distribution(&sector, &sched, 1.0, 0.0)?;
    let mut t = Table::new(&["value", "weight", "cdf", "arcsine_cdf"]);
    for p in dist.points().expect("empirical") {
        t.push(row![p.value, p.weight, dist.cdf(p.value), law.cdf(p.value)]);
    }
    let sigma = law.std_dev();
    let characteristic = (1..=a.q_points)
        .map(|k| {
            let q = if sigma > 0.0 { k as f64 / sigma } else { k as f64 };
            let z = dist.characteristic(q);
            CharacteristicSample {
                q,
                empirical_re: z.re,
                empirical_im: z.im,
                bessel: characteristic_value(q, sigma),
            }
        })
        .collect();
    let summary = SpinDistSummary {
        n,
        stot: a.stot,
        m: a.m,
        theta: a.theta,
        mean: dist.mean(),
        sigma_eigenweights: dist.std_dev(),
        sigma_analytic: sigma,
        ks_distance: dist.ks_distance(&law)?,
        characteristic,
    };
    Ok((t, summary))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactRow {
    pub n: usize,
    pub m: f64,
    pub theta: f64,
    pub analytic: f64,
    pub exact: f64,
}

/// Rotated Dicke states on the complete graph: exact-diagonalization width
/// of `H/N` against the analytic width, for every `m` and `thetas` angles
/// spread over a full turn.
pub fn exact_check(a: &ExactCheckArgs) -> Result<Vec<ExactRow>, CliError> {
    if a.n_max < 2 || a.n_max > MAX_SITES {
        return Err(CliError::Usage(format!("--n-max must lie in [2, {MAX_SITES}]")));
    }
    let mut rows = Vec::new();
    for n in 2..=a.n_max {
        let lat = LatticeSpec::complete(n, a.j, a.bz)?;
        let h = build_spin_hamiltonian(&lat)?;
        let mut ev = Evolver::new(&lat, DriveMode::Replace)?;
        for up in 0..=n {
            let psi = dicke_state(n, up)?;
            let m = up as f64 - n as f64 / 2.0;
            let sector = SpinSector::dicke(n as u32, m)?;
            for k in 0..a.thetas {
                let theta = 2.0 * PI * k as f64 / a.thetas as f64;
                let sched = DriveSchedule::rotation(theta, a.bz)?;
                let (_, exact) = h.density_stats(&ev.evolve_to(&psi, &sched, 1.0)?)?;
                rows.push(ExactRow {
                    n,
                    m,
                    theta,
                    analytic: analytic_sigma(&sector, &sched, 1.0)?,
                    exact,
                });
            }
        }
    }
    Ok(rows)
}

pub fn exact_check_table(rows: &[ExactRow]) -> Table {
    let mut t = Table::new(&["n", "stot", "m", "theta", "analytic", "exact", "abs_diff"]);
    for r in rows {
        t.push(row![r.n, r.n as f64 / 2.0, r.m, r.theta, r.analytic, r.exact, (r.analytic - r.exact).abs()]);
    }
    t
}

/// Duality reports for `sets` seeded random coupling sets per size.
pub fn bose_dual_reports(a: &BoseDualArgs) -> Result<Vec<(usize, usize, BoseDualReport)>, CliError> {
    if a.n_min < 2 || a.n_max < a.n_min || a.n_max > MAX_SITES {
        return Err(CliError::Usage(format!("need 2 ≤ n-min ≤ n-max ≤ {MAX_SITES}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut out = Vec::new();
    for n in a.n_min..=a.n_max {
        for set in 0..a.sets {
            let lat = LatticeSpec::random(n, &mut rng)?;
            out.push((n, set, bose_dual(&lat)?.1));
        }
    }
    Ok(out)
}

fn bose_dual_table(a: &BoseDualArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["n", "set", "spectrum_max_diff", "doping_max_diff", "number_max_diff", "spectra_agree"]);
    for (n, set, r) in bose_dual_reports(a)? {
        t.push(row![n, set, r.spectrum_max_diff, r.doping_max_diff, r.number_max_diff, r.spectra_agree]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct MagnusSummary {
    /// Least-squares slope of `ln error` against `ln t`.
    pub slope: f64,
    /// `‖V†V − 1‖_max` for `V = exp(Ω₁ + Ω₂)` at `t_max`.
    pub unitarity_defect: f64,
    pub anti_hermiticity_defect: f64,
    /// First-order variance bracket in the ground state at `t_max`.
    pub eigenstate_first_bracket: f64,
}

/// Two equal segments of length `t/2`.
pub fn two_segment_schedule(a: &MagnusCheckArgs, t: f64) -> Result<DriveSchedule, CliError> {
    let seg = |b_y| DriveSegment { duration: 0.5 * t, b_y };
    Ok(DriveSchedule::new(DriveMode::Augment, vec![seg(a.by1), seg(a.by2)], a.bz)?)
}

pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn magnus_check(a: &MagnusCheckArgs) -> Result<(Table, MagnusSummary), CliError> {
    check_sites(a.n)?;
    let lat = LatticeSpec::chain(a.n, a.j, a.bz)?;
    let times = log_sweep(a.t_min, a.t_max, a.points.max(2))?;
    let mut t = Table::new(&["t", "error"]);
    let mut errors = Vec::new();
    for &x in &times {
        let e = magnus_error(&lat, &two_segment_schedule(a, x)?, x)?;
        errors.push(e);
        t.push(row![x, e]);
    }
    let sched = two_segment_schedule(a, a.t_max)?;
    let terms = magnus_terms(&lat, &sched, a.t_max)?;
    let v = terms.propagator()?;
    let unitarity_defect = max_abs_diff(&adjoint(&v).dot(&v), &identity(lat.dim()));
    let h = build_spin_hamiltonian(&lat)?;
    let ground = QuantumState::new(HermitianEigen::new(h.matrix())?.vectors.column(0).to_owned())?;
    let expansion = variance_expansion(&ground, &lat, &sched, a.t_max)?;
    Ok((
        t,
        MagnusSummary {
            slope: loglog_slope(&times, &errors),
            unitarity_defect,
            anti_hermiticity_defect: terms.anti_hermiticity_defect(),
            eigenstate_first_bracket: expansion.first_bracket,
        },
    ))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub t: f64,
    pub sigma_sq: f64,
    pub rate: f64,
    pub finite_difference: f64,
}

/// `ℐ(t)` against central differences of `σ_ε²(t)` along a unit-time rotation.
pub fn variance_rate_rows(a: &VarianceRateArgs) -> Result<Vec<RateRow>, CliError> {
    check_sites(a.n)?;
    if a.up > a.n || a.steps == 0 {
        return Err(CliError::Usage("need --up ≤ --n and --steps ≥ 1".into()));
    }
    let lat = LatticeSpec::complete(a.n, a.j, a.bz)?;
    let h = build_spin_hamiltonian(&lat)?;
    let sched = DriveSchedule::rotation(a.theta, a.bz)?;
    let drive = MatrixOperator::new(segment_hamiltonian(&lat, DriveMode::Replace, a.theta)?, a.n, "H_tr")?;
    let psi0 = dicke_state(a.n, a.up)?;
    let mut ev = Evolver::new(&lat, DriveMode::Replace)?;
    let mut sigma_sq = |t: f64| -> Result<(QuantumState, f64), CliError> {
        let s = ev.evolve_to(&psi0, &sched, t)?;
        let (_, sd) = h.density_stats(&s)?;
        Ok((s, sd * sd))
    };
    let mut rows = Vec::new();
    for i in 0..a.steps {
        let t = (i as f64 + 0.5) / a.steps as f64;
        let (state, s2) = sigma_sq(t)?;
        let fd = (sigma_sq(t + a.h)?.1 - sigma_sq(t - a.h)?.1) / (2.0 * a.h);
        rows.push(RateRow {
            t,
            sigma_sq: s2,
            rate: variance_rate(&state, &drive, &h)?,
            finite_difference: fd,
        });
    }
    Ok(rows)
}

fn variance_rate_table(a: &VarianceRateArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["t", "sigma_sq", "rate", "finite_difference"]);
    for r in variance_rate_rows(a)? {
        t.push(row![r.t, r.sigma_sq, r.rate, r.finite_difference]);
    }
    Ok(t)
}

/// Rotated Dicke state against `H̃ = −b_y S^y`.
pub fn bounds_check(a: &BoundsCheckArgs) -> Result<UncertaintyReports, CliError> {
    check_sites(a.n)?;
    if a.up > a.n {
        return Err(CliError::Usage("--up must not exceed --n".into()));
    }
    let lat = LatticeSpec::complete(a.n, a.j, a.bz)?;
    let h = build_spin_hamiltonian(&lat)?;
    let sched = DriveSchedule::rotation(a.theta, a.bz)?;
    let psi = Evolver::new(&lat, DriveMode::Replace)?.evolve_to(&dicke_state(a.n, a.up)?, &sched, 1.0)?;
    let ht = MatrixOperator::new(transverse_operator(a.n, a.by)?, a.n, "H_tr")?;
    Ok(uncertainty_check(&psi, &h, &ht, a.n)?)
}

fn bounds_table(r: &UncertaintyReports) -> Table {
    let mut t = Table::new(&["bound", "lhs", "rhs", "slack", "satisfied"]);
    for (name, b) in [("commutator", r.commutator), ("rate", r.rate), ("correlator", r.correlator)] {
        t.push(row![name, b.lhs, b.rhs, b.slack, b.satisfied]);
    }
    t
}

fn rate_threshold(a: &RateThresholdArgs) -> Result<Table, CliError> {
    let natural = equilibrium_rate_threshold(a.temperature, a.cv_total, a.cv_sub)?;
    let (value, unit) = if a.si {
        (units::rate_threshold_si(natural), "W")
    } else {
        (natural, "natural")
    };
    let mut t = Table::new(&["temperature", "cv_total", "cv_sub", "threshold", "unit"]);
    t.push(row![a.temperature, a.cv_total, a.cv_sub, value, unit]);
    Ok(t)
}

pub fn ising_corr(a: &IsingCorrArgs) -> Result<(Table, ThermalPoint), CliError> {
    let e = DomainWallEnsemble::new(a.l, a.k, a.j)?;
    let thermal = temperature_energy_maps(a.l, a.j, TemperatureQuery::Energy(e.energy()))?;
    let d_max = a.d_max.unwrap_or(e.bonds()).min(e.bonds());
    let mut t = Table::new(&["d", "enumeration", "hypergeometric", "asymptotic", "thermal"]);
    for d in 1..=d_max {
        let enumeration = if a.l <= MAX_ENUMERATION_LENGTH {
            fmt_f64(domain_wall_correlator(&e, d, CorrelatorMethod::ExactEnumeration)?)
        } else {
            String::new()
        };
        let mut r = vec![d.to_string(), enumeration];
        r.extend(row![
            domain_wall_correlator(&e, d, CorrelatorMethod::ExactHypergeometric)?,
            domain_wall_correlator(&e, d, CorrelatorMethod::Asymptotic)?,
            domain_wall_correlator(&e, d, CorrelatorMethod::Thermal { beta: thermal.beta })?
        ]);
        t.push(r);
    }
    Ok((t, thermal))
}

fn dicke_entropy(a: &DickeEntropyArgs) -> Result<Table, CliError> {
    let cuts: Vec<u32> = match a.la {
        Some(la) => vec![la],
        None => (1..a.n).collect(),
    };
    let mut t = Table::new(&["la", "exact", "saddle", "sigma_sq"]);
    for la in cuts {
        let split = DickeSplit::new(a.n, a.m, la)?;
        t.push(row![
            la,
            dicke_entanglement(&split, EntropyMethod::Exact)?,
            dicke_entanglement(&split, EntropyMethod::Saddle)?,
            dicke_sigma_sq(&split)
        ]);
    }
    Ok(t)
}

/// Rows for `S = N/2, N/2 − 1, …`.
pub fn multiplicity(a: &MultiplicityArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["stot", "multiplicity", "ln_exact", "ln_gaussian"]);
    for two_s in (a.n % 2..=a.n).rev().step_by(2) {
        let exact = spin_multiplicity(a.n, two_s, MultiplicityMethod::Exact)?;
        let text = match &exact {
            Multiplicity::Exact(m) => m.to_string(),
            Multiplicity::Gaussian { .. } => unreachable!("exact method"),
        };
        let gaussian = if two_s == 0 {
            String::new()
        } else {
            fmt_f64(spin_multiplicity(a.n, two_s, MultiplicityMethod::Gaussian)?.ln())
        };
        let mut r = row![two_s as f64 / 2.0];
        r.push(text);
        r.extend(row![exact.ln()]);
        r.push(gaussian);
        t.push(r);
    }
    Ok(t)
}

fn load_and_fit(a: &ViscosityArgs, out: &mut Artifacts) -> Result<(Vec<CollapseFit>, Ingested), CliError> {
    let (Some(data), Some(meta)) = (&a.data, &a.meta) else {
        return Err(CliError::Usage("--data and --meta are required".into()));
    };
    let data = read_digested(data, &mut out.input_digests)?;
    let meta = read_digested(meta, &mut out.input_digests)?;
    let ingested = ingest_bytes(&data, &meta)?;
    let fits = fit_collapse(&ingested.dataset, (a.abar_min, a.abar_max))?;
    for f in fits.iter().filter(|f| f.at_bound) {
        eprintln!("warning: {} fit sits at an Ā bound ({})", f.liquid_id, f.abar);
    }
    Ok((fits, ingested))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitEntry {
    pub liquid_id: String,
    pub abar: f64,
    pub residual_rms: f64,
    pub rows: usize,
    pub excluded_rows: usize,
    pub at_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub fits: Vec<FitEntry>,
    pub flagged: Vec<FlaggedRow>,
}

impl FitReport {
    pub fn new(fits: &[CollapseFit], flagged: &[FlaggedRow]) -> Self {
        Self {
            fits: fits
                .iter()
                .map(|f| FitEntry {
                    liquid_id: f.liquid_id.clone(),
                    abar: f.abar,
                    residual_rms: f.residual_rms,
                    rows: f.points.len(),
                    excluded_rows: f.excluded_rows,
                    at_bound: f.at_bound,
                })
                .collect(),
            flagged: flagged.to_vec(),
        }
    }
}

pub fn fit_summary_table(fits: &[CollapseFit]) -> Table {
    let mut t = Table::new(&["liquid", "abar", "residual_rms", "rows", "excluded", "at_bound"]);
    for f in fits {
        t.push(row![f.liquid_id.as_str(), f.abar, f.residual_rms, f.points.len(), f.excluded_rows, f.at_bound]);
    }
    t
}

pub fn collapse_table(fits: &[CollapseFit]) -> Table {
    let mut t = Table::new(&["liquid", "x", "y"]);
    for f in fits {
        for p in &f.points {
            t.push(row![f.liquid_id.as_str(), p.x, p.y]);
        }
    }
    t
}

fn kernel(kind: KernelArg, centre: f64, width: f64) -> Result<SmearKernel, CliError> {
    Ok(match kind {
        KernelArg::Delta => SmearKernel::delta(centre)?,
        KernelArg::Gaussian => SmearKernel::gaussian(centre, width)?,
    })
}

pub fn smear_green(a: &SmearGreenArgs) -> Result<Table, CliError> {
    let k = kernel(a.kernel, a.mu, a.sigma_mu)?;
    let grid = sweep(a.omega_min, a.omega_max, a.steps)?;
    let mut t = Table::new(&["omega", "re", "im", "spectral"]);
    for p in smeared_green(&grid, a.eps_k, &k, a.z, a.tau)? {
        t.push(row![p.omega, p.g.re, p.g.im, p.spectral]);
    }
    Ok(t)
}

pub fn smear_planck(a: &SmearPlanckArgs) -> Result<Table, CliError> {
    let k = kernel(a.kernel, a.t, a.sigma_t)?;
    let ptei_t = a.ptei_t.unwrap_or(a.t);
    let mut t = if a.si {
        Table::new(&["nu_hz", "occupation", "radiance_si"])
    } else {
        Table::new(&["nu", "occupation"])
    };
    for nu in sweep(a.nu_min, a.nu_max, a.steps)? {
        // with --si, ν enters as hν/k_B so that ν/T is dimensionless
        let x = if a.si { units::frequency_to_kelvin(nu) } else { nu };
        let occ = smeared_planck(x, &k, a.ptei_weight, ptei_t)?;
        if a.si {
            t.push(row![nu, occ, units::radiance_prefactor(nu) * occ]);
        } else {
            t.push(row![nu, occ]);
        }
    }
    Ok(t)
}

pub fn moment_table(a: &MomentCompareArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["g", "arcsine", "gaussian", "ratio"]);
    for g in 1..=a.g_max {
        let m = moment_compare(g, a.sigma)?;
        t.push(row![g, m.arcsine, m.gaussian, m.arcsine / m.gaussian]);
    }
    Ok(t)
}
