//! Closed-form energy-density statistics of a rotationally symmetric spin
//! model driven by a transverse field, with a `(2S+1)`-dimensional ladder
//! representation as the exact reference.
//!
//! A collective state `|S, m⟩` of `N` spin-1/2 sites is rotated about the
//! y axis by `θ(t) = ∫ b_y dt′` (replace mode) or precesses about the total
//! field (augment mode). Energies are those of `H_spin = H_symm − B_z S_z`
//! per site; `H_symm` only contributes the constant `e_symm` in a sector.

mod distribution;
mod rotation;

pub use distribution::{
    arcsine_cdf, arcsine_density, central_binomial, characteristic_value, EnergyDistribution,
    WeightedValue, WEIGHT_SUM_TOL,
};
pub use rotation::{rotated_column, rotation_weights};

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use rotation::{doubled_m_of_index, ladder_coefficient};

/// Quantum numbers `(N, S_tot, m)` of a collective spin-1/2 state.
///
/// Half-integers are stored doubled. Besides `|m| ≤ S_tot ≤ N/2` and integer
/// `S_tot − |m|`, the sector must be reachable from `N` spin-1/2 sites, so
/// `N − 2S_tot` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinSector {
    n_sites: u32,
    two_s: u32,
    two_m: i64,
}

impl SpinSector {
    pub fn from_doubled(n_sites: u32, two_s: u32, two_m: i64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSector("N must be positive".into()));
        }
        if two_s > n_sites {
            return Err(Error::InvalidSector(format!(
                "S_tot = {} exceeds N/2 = {}",
                two_s as f64 / 2.0,
                n_sites as f64 / 2.0
            )));
        }
        if (n_sites - two_s) % 2 != 0 {
            return Err(Error::InvalidSector(format!(
                "S_tot = {} is not reachable from {n_sites} spin-1/2 sites",
                two_s as f64 / 2.0
            )));
        }
        if two_m.unsigned_abs() > two_s as u64 {
            return Err(Error::InvalidSector(format!(
                "|m| = {} exceeds S_tot = {}",
                two_m.unsigned_abs() as f64 / 2.0,
                two_s as f64 / 2.0
            )));
        }
        if (two_s as i64 - two_m).rem_euclid(2) != 0 {
            return Err(Error::InvalidSector("S_tot − m must be an integer".into()));
        }
        Ok(Self {
            n_sites,
            two_s,
            two_m,
        })
    }

    /// Accepts `s_tot` and `m` as exact half-integers.
    pub fn new(n_sites: u32, s_tot: f64, m: f64) -> Result<Self> {
        let two_s = doubled(s_tot, "S_tot")?;
        if two_s < 0 {
            return Err(Error::InvalidSector("S_tot must be non-negative".into()));
        }
        Self::from_doubled(n_sites, two_s as u32, doubled(m, "m")?)
    }

    /// Maximal-spin (Dicke) sector `S_tot = N/2`.
    pub fn dicke(n_sites: u32, m: f64) -> Result<Self> {
        Self::new(n_sites, n_sites as f64 / 2.0, m)
    }

    pub fn n_sites(&self) -> u32 {
        self.n_sites
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn two_m(&self) -> i64 {
        self.two_m
    }

    pub fn s_tot(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    pub fn is_dicke(&self) -> bool {
        self.two_s == self.n_sites
    }

    /// `w = m / S_tot`.
    pub fn w(&self) -> Result<f64> {
        if self.two_s == 0 {
            return Err(Error::UndefinedPolarization);
        }
        Ok(self.two_m as f64 / self.two_s as f64)
    }

    /// `S(S+1) − m²`, twice the transverse variance `⟨S_x²⟩ + ⟨S_y²⟩`.
    pub fn transverse_weight(&self) -> f64 {
        let s = self.s_tot();
        let m = self.m();
        s * (s + 1.0) - m * m
    }
}

fn doubled(x: f64, what: &str) -> Result<i64> {
    let d = 2.0 * x;
    if !d.is_finite() || d.round() != d || d.abs() > i64::MAX as f64 / 4.0 {
        return Err(Error::InvalidSector(format!("{what} = {x} is not a half-integer")));
    }
    Ok(d as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveMode {
    /// `H(t) = H_tr(t)` during the drive.
    Replace,
    /// `H(t) = H_spin + H_tr(t)`.
    Augment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSegment {
    pub duration: f64,
    pub b_y: f64,
}

/// Piecewise-constant transverse field `b_y(t)` with a fixed longitudinal `b_z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSchedule {
    mode: DriveMode,
    segments: Vec<DriveSegment>,
    b_z: f64,
}

const SPAN_SLACK: f64 = 1e-12;

impl DriveSchedule {
    pub fn new(mode: DriveMode, segments: Vec<DriveSegment>, b_z: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        for (k, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0) || !seg.duration.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k} has non-positive duration {}",
                    seg.duration
                )));
            }
            if !seg.b_y.is_finite() {
                return Err(Error::InvalidSchedule(format!("segment {k} has non-finite b_y")));
            }
        }
        if !b_z.is_finite() {
            return Err(Error::InvalidSchedule("b_z must be finite".into()));
        }
        Ok(Self { mode, segments, b_z })
    }

    pub fn constant(mode: DriveMode, duration: f64, b_y: f64, b_z: f64) -> Result<Self> {
        Self::new(mode, vec![DriveSegment { duration, b_y }], b_z)
    }

    /// Replace-mode schedule of unit duration that rotates by `theta`.
    pub fn rotation(theta: f64, b_z: f64) -> Result<Self> {
        Self::constant(DriveMode::Replace, 1.0, theta, b_z)
    }

    pub fn mode(&self) -> DriveMode {
        self.mode
    }

    pub fn segments(&self) -> &[DriveSegment] {
        &self.segments
    }

    pub fn b_z(&self) -> f64 {
        self.b_z
    }

    pub fn span(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let span = self.span();
        if !(t >= 0.0) || t > span * (1.0 + SPAN_SLACK) {
            return Err(Error::OutOfRange { t, span });
        }
        Ok(())
    }

    /// The segments actually traversed in `[0, t]`, the last one truncated.
    pub fn pieces_until(&self, t: f64) -> Result<Vec<DriveSegment>> {
        self.check_time(t)?;
        let mut remaining = t;
        let mut out = Vec::new();
        for seg in &self.segments {
            if remaining <= 0.0 {
                break;
            }
            let duration = seg.duration.min(remaining);
            out.push(DriveSegment {
                duration,
                b_y: seg.b_y,
            });
            remaining -= duration;
        }
        Ok(out)
    }

    /// `θ(t) = ∫₀ᵗ b_y dt′`, summed segment by segment.
    pub fn theta_at(&self, t: f64) -> Result<f64> {
        Ok(self
            .pieces_until(t)?
            .iter()
            .map(|s| s.b_y * s.duration)
            .sum())
    }

    fn single_augment_field(&self) -> Result<f64> {
        match self.segments.as_slice() {
            [seg] => Ok(seg.b_y),
            _ => Err(Error::UnsupportedSchedule(format!(
                "augment mode needs a single constant-b_y segment, got {}",
                self.segments.len()
            ))),
        }
    }

    fn require_replace(&self) -> Result<()> {
        match self.mode {
            DriveMode::Replace => Ok(()),
            DriveMode::Augment => Err(Error::UnsupportedSchedule(
                "operation is defined for replace mode only".into(),
            )),
        }
    }
}

/// Augment mode: `ẑ · R(t)ẑ` for precession about `(0, b_y, b_z)/B` at rate `B`.
fn augment_axis_projection(b_y: f64, b_z: f64, t: f64) -> f64 {
    let b = b_y.hypot(b_z);
    if b == 0.0 {
        return 1.0;
    }
    let c = b_z / b;
    c * c + (1.0 - c * c) * (b * t).cos()
}

/// Standard deviation of `H_spin/N` at `t_f`.
pub fn analytic_sigma(sector: &SpinSector, schedule: &DriveSchedule, t_f: f64) -> Result<f64> {
    let w = sector.w()?;
    let s = sector.s_tot();
    let n = sector.n_sites() as f64;
    let b_z = schedule.b_z();
    let shape = (1.0 + 1.0 / s - w * w).max(0.0).sqrt();
    match schedule.mode() {
        DriveMode::Replace => {
            let theta = schedule.theta_at(t_f)?;
            Ok(b_z.abs() * s * theta.sin().abs() / (n * SQRT_2) * shape)
        }
        DriveMode::Augment => {
            let b_y = schedule.single_augment_field()?;
            schedule.check_time(t_f)?;
            let b = b_y.hypot(b_z);
            if b == 0.0 {
                return Ok(0.0);
            }
            let bt = b * t_f;
            let precession = (bt.sin().powi(2) + (b_z / b).powi(2) * (1.0 - bt.cos()).powi(2)).sqrt();
            Ok((b_z * b_y).abs() * s / (n * b * SQRT_2) * shape * precession)
        }
    }
}

/// Mean energy density `(e_symm − B_z ⟨S_z(t_f)⟩)/N`.
pub fn analytic_energy_mean(
    sector: &SpinSector,
    schedule: &DriveSchedule,
    t_f: f64,
    e_symm: f64,
) -> Result<f64> {
    let n = sector.n_sites() as f64;
    let projection = match schedule.mode() {
        DriveMode::Replace => schedule.theta_at(t_f)?.cos(),
        DriveMode::Augment => {
            let b_y = schedule.single_augment_field()?;
            schedule.check_time(t_f)?;
            augment_axis_projection(b_y, schedule.b_z(), t_f)
        }
    };
    Ok((e_symm - schedule.b_z() * sector.m() * projection) / n)
}

/// `ε(t_f) − ε(0)`.
pub fn energy_change(sector: &SpinSector, schedule: &DriveSchedule, t_f: f64) -> Result<f64> {
    Ok(analytic_energy_mean(sector, schedule, t_f, 0.0)? - analytic_energy_mean(sector, schedule, 0.0, 0.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    /// `C(2g, g)(σ²/2)^g`, the large-`S` arcsine law.
    Asymptotic,
    /// Ladder-representation evaluation at finite `S`.
    Exact,
}

/// Even central moment `⟨(Δε)^{2g}⟩` at `t_f` (replace mode).
pub fn central_moment(
    sector: &SpinSector,
    schedule: &DriveSchedule,
    t_f: f64,
    g: u32,
    method: MomentMethod,
) -> Result<f64> {
    if g == 0 {
        return Err(Error::InvalidArgument("moment index g must be positive".into()));
    }
    schedule.require_replace()?;
    match method {
        MomentMethod::Asymptotic => {
            let sigma = analytic_sigma(sector, schedule, t_f)?;
            Ok(central_binomial(g) * (sigma * sigma / 2.0).powi(g as i32))
        }
        MomentMethod::Exact => exact_central_moment(sector, schedule, t_f, 2 * g),
    }
}

/// `⟨(Δε)^p⟩` for any order `p ≥ 1` from the ladder representation.
///
/// Odd orders vanish for `m = 0` or `sin θ = ±1`; otherwise they are of
/// relative size `O(1/S)`.
pub fn exact_central_moment(
    sector: &SpinSector,
    schedule: &DriveSchedule,
    t_f: f64,
    p: u32,
) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument("moment order must be positive".into()));
    }
    schedule.require_replace()?;
    let theta = schedule.theta_at(t_f)?;
    let global = ladder_moment(sector.two_s(), sector.two_m(), theta, p);
    let scale = -schedule.b_z() / sector.n_sites() as f64;
    Ok(global * scale.powi(p as i32))
}

/// `⟨m| Δ^p |m⟩` with `Δ = cos θ (S_z − m) + sin θ S_x`.
fn ladder_moment(two_s: u32, two_m: i64, theta: f64, p: u32) -> f64 {
    let dim = two_s as usize + 1;
    let (sin, cos) = theta.sin_cos();
    let m = two_m as f64 / 2.0;
    let diag: Vec<f64> = (0..dim)
        .map(|k| cos * (doubled_m_of_index(two_s, k) as f64 / 2.0 - m))
        .collect();
    let off: Vec<f64> = (0..dim.saturating_sub(1))
        .map(|k| sin * ladder_coefficient(two_s, doubled_m_of_index(two_s, k)))
        .collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|i| {
                let mut r = diag[i] * v[i];
                if i > 0 {
                    r += off[i - 1] * v[i - 1];
                }
                if i + 1 < dim {
                    r += off[i] * v[i + 1];
                }
                r
            })
            .collect()
    };
    let mut v = vec![0.0; dim];
    v[((two_m + two_s as i64) / 2) as usize] = 1.0;
    for _ in 0..p / 2 {
        v = apply(&v);
    }
    if p % 2 == 0 {
        v.iter().map(|x| x * x).sum()
    } else {
        let u = apply(&v);
        v.iter().zip(&u).map(|(a, b)| a * b).sum()
    }
}

/// Distribution of `H_spin/N` in the rotated state: weights `|d_{m′m}(θ)|²`
/// on energies `(e_symm − B_z m′)/N`.
pub fn eigenweight_distribution(
    sector: &SpinSector,
    theta: f64,
    b_z: f64,
    e_symm: f64,
) -> Result<EnergyDistribution> {
    let n = sector.n_sites() as f64;
    let two_s = sector.two_s();
    let points = rotation_weights(two_s, sector.two_m(), theta)
        .into_iter()
        .enumerate()
        .map(|(k, weight)| WeightedValue {
            value: (e_symm - b_z * doubled_m_of_index(two_s, k) as f64 / 2.0) / n,
            weight,
        })
        .collect();
    EnergyDistribution::empirical(points)
}

/// The arcsine law with the analytic centre and width at `t_f`.
pub fn analytic_distribution(
    sector: &SpinSector,
    schedule: &DriveSchedule,
    t_f: f64,
    e_symm: f64,
) -> Result<EnergyDistribution> {
    EnergyDistribution::analytic(
        analytic_energy_mean(sector, schedule, t_f, e_symm)?,
        analytic_sigma(sector, schedule, t_f)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn replace(theta: f64) -> DriveSchedule {
        DriveSchedule::rotation(theta, 1.0).unwrap()
    }

    #[test]
    fn sector_validation() {
        assert!(SpinSector::new(4, 2.0, 0.5).is_err());
        assert!(SpinSector::new(4, 2.5, 0.5).is_err());
        assert!(SpinSector::new(4, 1.5, 0.5).is_err());
        assert!(SpinSector::new(3, 1.5, 0.5).is_ok());
        assert!(SpinSector::new(4, 1.0, -2.0).is_err());
        assert!(SpinSector::new(4, 0.3, 0.0).is_err());
        assert_eq!(
            SpinSector::new(4, 0.0, 0.0).unwrap().w(),
            Err(Error::UndefinedPolarization)
        );
    }

    #[test]
    fn sigma_examples() {
        let s = SpinSector::new(4, 2.0, 0.0).unwrap();
        let v = analytic_sigma(&s, &replace(FRAC_PI_2), 1.0).unwrap();
        assert!((v - 0.433_012_701_892_219_3).abs() < 1e-15);
        assert!((v - 1.5_f64.sqrt() / (2.0 * SQRT_2)).abs() < 1e-15);
        let s = SpinSector::new(4, 2.0, 2.0).unwrap();
        assert!((analytic_sigma(&s, &replace(FRAC_PI_2), 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(analytic_sigma(&s, &replace(0.0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn augment_requires_single_segment() {
        let seg = DriveSegment { duration: 1.0, b_y: 1.0 };
        let sched = DriveSchedule::new(DriveMode::Augment, vec![seg, seg], 1.0).unwrap();
        let s = SpinSector::new(4, 2.0, 0.0).unwrap();
        assert!(matches!(
            analytic_sigma(&s, &sched, 1.0),
            Err(Error::UnsupportedSchedule(_))
        ));
    }

    #[test]
    fn augment_sigma_matches_precession_geometry() {
        // Var(n·S) in |S,m⟩ is (1 − n_z²)(S(S+1) − m²)/2
        let s = SpinSector::new(6, 3.0, 1.0).unwrap();
        let (b_y, b_z) = (0.7, 1.3);
        let sched = DriveSchedule::constant(DriveMode::Augment, 5.0, b_y, b_z).unwrap();
        for &t in &[0.0, 0.3, 1.7, 4.9] {
            let nz = augment_axis_projection(b_y, b_z, t);
            let expect = b_z / 6.0 * ((1.0 - nz * nz) * s.transverse_weight() / 2.0).sqrt();
            assert!((analytic_sigma(&s, &sched, t).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn mean_examples() {
        let s = SpinSector::new(4, 2.0, 1.0).unwrap();
        assert!(analytic_energy_mean(&s, &replace(FRAC_PI_2), 1.0, 0.0).unwrap().abs() < 1e-16);
        let s = SpinSector::new(4, 2.0, 2.0).unwrap();
        assert!((energy_change(&s, &replace(PI), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(energy_change(&s, &replace(0.0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_accumulates_over_segments() {
        let segs = vec![
            DriveSegment { duration: 0.5, b_y: 2.0 },
            DriveSegment { duration: 1.5, b_y: -1.0 },
        ];
        let sched = DriveSchedule::new(DriveMode::Replace, segs, 1.0).unwrap();
        assert_eq!(sched.theta_at(0.5).unwrap(), 1.0);
        assert_eq!(sched.theta_at(1.0).unwrap(), 0.5);
        assert!(matches!(sched.theta_at(2.5), Err(Error::OutOfRange { .. })));
        assert!(DriveSchedule::constant(DriveMode::Replace, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn exact_moments_spin_one() {
        // global-energy units: B_z = −N cancels the scale
        let s = SpinSector::new(2, 1.0, 0.0).unwrap();
        let sched = DriveSchedule::rotation(FRAC_PI_2, -2.0).unwrap();
        let g1 = central_moment(&s, &sched, 1.0, 1, MomentMethod::Exact).unwrap();
        let g2 = central_moment(&s, &sched, 1.0, 2, MomentMethod::Exact).unwrap();
        assert!((g1 - 1.0).abs() < 1e-14);
        assert!((g2 - 1.0).abs() < 1e-14);
        let a2 = central_moment(&s, &sched, 1.0, 2, MomentMethod::Asymptotic).unwrap();
        assert!((a2 - 1.5).abs() < 1e-14);
    }

    #[test]
    fn second_moment_is_sigma_squared() {
        let s = SpinSector::new(40, 20.0, 7.0).unwrap();
        let sched = replace(0.83);
        let sigma = analytic_sigma(&s, &sched, 1.0).unwrap();
        let exact = central_moment(&s, &sched, 1.0, 1, MomentMethod::Exact).unwrap();
        let asym = central_moment(&s, &sched, 1.0, 1, MomentMethod::Asymptotic).unwrap();
        assert!((exact - sigma * sigma).abs() < 1e-12 * sigma * sigma);
        assert!((asym - sigma * sigma).abs() < 1e-12 * sigma * sigma);
    }

    #[test]
    fn third_moment_closed_form() {
        // ⟨Δ³⟩ = −cos θ sin²θ m / 2 in global units
        let s = SpinSector::new(10, 5.0, 3.0).unwrap();
        let theta = 0.7_f64;
        let sched = DriveSchedule::rotation(theta, -10.0).unwrap();
        let third = exact_central_moment(&s, &sched, 1.0, 3).unwrap();
        let expect = -theta.cos() * theta.sin().powi(2) * 3.0 / 2.0;
        assert!((third - expect).abs() < 1e-12);
    }

    #[test]
    fn eigenweights_half_spin() {
        let s = SpinSector::new(1, 0.5, 0.5).unwrap();
        let d = eigenweight_distribution(&s, FRAC_PI_2, 1.0, 0.0).unwrap();
        let pts = d.points().unwrap();
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!((p.weight - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenweight_mean_and_width() {
        let s = SpinSector::new(30, 15.0, -4.0).unwrap();
        let theta = 1.234;
        let d = eigenweight_distribution(&s, theta, 0.8, 3.0).unwrap();
        let sched = DriveSchedule::rotation(theta, 0.8).unwrap();
        let mean = analytic_energy_mean(&s, &sched, 1.0, 3.0).unwrap();
        assert!((d.mean() - mean).abs() < 1e-12);
        assert!((d.std_dev() - analytic_sigma(&s, &sched, 1.0).unwrap()).abs() < 1e-10);
    }
}
