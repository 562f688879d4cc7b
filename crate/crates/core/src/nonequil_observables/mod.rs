//! Observables of systems whose energy density is smeared by a
//! distribution `P(q′)`: kernel-weighted equilibrium averages, the glass
//! width law and erfc viscosity model, smeared coherent Green's functions
//! and smeared Planck radiance.

mod viscosity;

pub use viscosity::{
    fit_collapse, fit_liquid, synthetic_liquid, CollapseFit, CollapsePoint, SyntheticLiquid, ViscosityDataset,
    ViscosityRecord, ViscosityRow, DEFAULT_ABAR_BOUNDS, FIT_TOL,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::collective_spin::{central_binomial, WeightedValue, WEIGHT_SUM_TOL};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breakpoints, QuadOptions};
use crate::special::erfc;

/// Relative tolerance for kernel quadratures.
pub const KERNEL_REL_TOL: f64 = 1e-8;
/// Gaussian kernels are integrated over `mean ± GAUSSIAN_CUTOFF·σ`.
pub const GAUSSIAN_CUTOFF: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SmearKernel {
    Delta { at: f64 },
    Gaussian { mean: f64, sigma: f64 },
    Empirical { points: Vec<WeightedValue> },
}

impl SmearKernel {
    pub fn delta(at: f64) -> Result<Self> {
        if !at.is_finite() {
            return Err(Error::InvalidKernel(format!("delta position {at}")));
        }
        Ok(Self::Delta { at })
    }

    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidKernel(format!("gaussian with mean {mean}, sigma {sigma}")));
        }
        Ok(Self::Gaussian { mean, sigma })
    }

    pub fn empirical(points: Vec<WeightedValue>) -> Result<Self> {
        let k = Self::Empirical { points };
        k.validate()?;
        Ok(k)
    }

    /// Re-checks the invariants; useful after deserialisation.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Delta { at } => Self::delta(*at).map(|_| ()),
            Self::Gaussian { mean, sigma } => Self::gaussian(*mean, *sigma).map(|_| ()),
            Self::Empirical { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidKernel("no atoms".into()));
                }
                if points.iter().any(|p| !(p.weight >= 0.0) || !p.value.is_finite()) {
                    return Err(Error::InvalidKernel("negative weight or non-finite atom".into()));
                }
                let total: f64 = points.iter().map(|p| p.weight).sum();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidKernel(format!("weights sum to {total}")));
                }
                Ok(())
            }
        }
    }

    /// Closed support interval (Gaussian truncated at the cutoff).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Delta { at } => (*at, *at),
            Self::Gaussian { mean, sigma } => (mean - GAUSSIAN_CUTOFF * sigma, mean + GAUSSIAN_CUTOFF * sigma),
            Self::Empirical { points } => points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.value), hi.max(p.value))
            }),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Delta { at } => *at,
            Self::Gaussian { mean, .. } => *mean,
            Self::Empirical { points } => points.iter().map(|p| p.weight * p.value).sum(),
        }
    }
}

fn gaussian_density(x: f64, mean: f64, sigma: f64) -> f64 {
    let z = (x - mean) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

fn eval_curve<F: Fn(f64) -> f64>(curve: &F, q: f64) -> Result<f64> {
    let v = curve(q);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::CurveUndefined(q))
    }
}

/// Integrates `f(q) P(q)` for a Gaussian kernel, with extra breakpoints.
fn gaussian_integral<F: Fn(f64) -> f64>(mean: f64, sigma: f64, extra: &[f64], f: F) -> Result<f64> {
    let (lo, hi) = (mean - GAUSSIAN_CUTOFF * sigma, mean + GAUSSIAN_CUTOFF * sigma);
    let mut breaks: Vec<f64> = (-9..=9).map(|k| mean + k as f64 * sigma).collect();
    breaks.extend_from_slice(extra);
    let opts = QuadOptions {
        rel_tol: KERNEL_REL_TOL * 1e-2,
        abs_tol: 1e-15,
        max_intervals: 20_000,
    };
    // renormalise the truncated tails (a no-op in double precision at 10σ)
    let mass = 1.0 - erfc(GAUSSIAN_CUTOFF / SQRT_2);
    Ok(integrate_with_breakpoints(|q| f(q) * gaussian_density(q, mean, sigma), lo, hi, &breaks, opts)?.value / mass)
}

/// `∫ P(q′) O_eq(q′) dq′`. The curve signals points where it is undefined by
/// returning a non-finite value.
pub fn kernel_average<F: Fn(f64) -> f64>(kernel: &SmearKernel, curve: F) -> Result<f64> {
    kernel.validate()?;
    match kernel {
        SmearKernel::Delta { at } => eval_curve(&curve, *at),
        SmearKernel::Empirical { points } => {
            let mut acc = 0.0;
            for p in points {
                acc += p.weight * eval_curve(&curve, p.value)?;
            }
            Ok(acc)
        }
        SmearKernel::Gaussian { mean, sigma } => {
            let (lo, hi) = kernel.support();
            // probe so that an undefined curve is reported at a definite point
            for k in 0..=40 {
                eval_curve(&curve, lo + (hi - lo) * k as f64 / 40.0)?;
            }
            let bad = std::cell::Cell::new(None);
            let v = gaussian_integral(*mean, *sigma, &[], |q| {
                let y = curve(q);
                if !y.is_finite() && bad.get().is_none() {
                    bad.set(Some(q));
                }
                y
            })?;
            match bad.get() {
                Some(q) => Err(Error::CurveUndefined(q)),
                None => Ok(v),
            }
        }
    }
}

/// Linear interpolation on a sorted table; `NaN` outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCurve {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TabulatedCurve {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidArgument("table needs ≥ 2 (x, y) pairs of equal length".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table abscissae must increase strictly".into()));
        }
        Ok(Self { x, y })
    }

    pub fn eval(&self, q: f64) -> f64 {
        let n = self.x.len();
        if !(q >= self.x[0] && q <= self.x[n - 1]) {
            return f64::NAN;
        }
        let i = self.x.partition_point(|&v| v <= q).clamp(1, n - 1);
        let t = (q - self.x[i - 1]) / (self.x[i] - self.x[i - 1]);
        self.y[i - 1] + t * (self.y[i] - self.y[i - 1])
    }
}

/// `σ_ε = Ā T (ε_melt − ε(T)) / (T_melt − T)`.
pub fn glass_sigma<F: Fn(f64) -> f64>(t: f64, eps_of_t: F, t_melt: f64, eps_melt: f64, abar: f64) -> Result<f64> {
    if !(t > 0.0 && t < t_melt) {
        return Err(Error::Domain {
            what: "temperature",
            value: t,
            range: format!("(0, {t_melt})"),
        });
    }
    Ok(abar * t * (eps_melt - eps_of_t(t)) / (t_melt - t))
}

/// Collapse abscissa `(T_melt − T)/(Ā T √2)`.
pub fn collapse_x(t: f64, t_melt: f64, abar: f64) -> f64 {
    (t_melt - t) / (abar * t * SQRT_2)
}

fn check_viscosity_args(t: f64, t_melt: f64, abar: f64) -> Result<()> {
    if !(t > 0.0 && t <= t_melt) {
        return Err(Error::Domain {
            what: "temperature",
            value: t,
            range: format!("(0, {t_melt}]"),
        });
    }
    if !(abar > 0.0) {
        return Err(Error::Domain {
            what: "abar",
            value: abar,
            range: "(0, ∞)".into(),
        });
    }
    Ok(())
}

/// `η = η_melt / erfc((T_melt − T)/(Ā T √2))`.
pub fn viscosity_predict(t: f64, t_melt: f64, abar: f64, eta_melt: f64) -> Result<f64> {
    check_viscosity_args(t, t_melt, abar)?;
    Ok(eta_melt / erfc(collapse_x(t, t_melt, abar)))
}

/// `log₁₀ η`, finite even where `η` itself overflows.
pub fn log10_viscosity_predict(t: f64, t_melt: f64, abar: f64, eta_melt: f64) -> Result<f64> {
    check_viscosity_args(t, t_melt, abar)?;
    Ok(eta_melt.log10() - crate::special::ln_erfc(collapse_x(t, t_melt, abar)) / std::f64::consts::LN_10)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenPoint {
    pub omega: f64,
    pub g: Complex64,
    /// `A(ω) = −Im G(ω)/π`.
    pub spectral: f64,
}

fn check_green_args(z_weight: f64, lifetime: f64) -> Result<()> {
    if !(z_weight > 0.0 && z_weight <= 1.0) {
        return Err(Error::Domain {
            what: "quasiparticle weight",
            value: z_weight,
            range: "(0, 1]".into(),
        });
    }
    if !(lifetime > 0.0) || !lifetime.is_finite() {
        return Err(Error::Domain {
            what: "lifetime",
            value: lifetime,
            range: "(0, ∞)".into(),
        });
    }
    Ok(())
}

fn pole(omega: f64, eps_k: f64, mu: f64, z: f64, gamma: f64) -> Complex64 {
    z / Complex64::new(omega - eps_k + mu, gamma)
}

/// `G(ω) = ∫dμ′ P(μ′) Z / (ω − ε_k + μ′ + i/τ)` at a single frequency.
pub fn green_at(omega: f64, eps_k: f64, kernel: &SmearKernel, z_weight: f64, lifetime: f64) -> Result<Complex64> {
    check_green_args(z_weight, lifetime)?;
    kernel.validate()?;
    let gamma = 1.0 / lifetime;
    match kernel {
        SmearKernel::Delta { at } => Ok(pole(omega, eps_k, *at, z_weight, gamma)),
        SmearKernel::Empirical { points } => Ok(points
            .iter()
            .map(|p| p.weight * pole(omega, eps_k, p.value, z_weight, gamma))
            .sum()),
        SmearKernel::Gaussian { mean, sigma } => {
            let centre = eps_k - omega;
            let extra: Vec<f64> = [-10.0, -1.0, 0.0, 1.0, 10.0].iter().map(|k| centre + k * gamma).collect();
            let re = gaussian_integral(*mean, *sigma, &extra, |mu| pole(omega, eps_k, mu, z_weight, gamma).re)?;
            let im = gaussian_integral(*mean, *sigma, &extra, |mu| pole(omega, eps_k, mu, z_weight, gamma).im)?;
            Ok(Complex64::new(re, im))
        }
    }
}

/// Smeared coherent Green's function on a sorted frequency grid.
pub fn smeared_green(
    omega_grid: &[f64],
    eps_k: f64,
    kernel: &SmearKernel,
    z_weight: f64,
    lifetime: f64,
) -> Result<Vec<GreenPoint>> {
    if omega_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument("frequency grid must be sorted".into()));
    }
    omega_grid
        .iter()
        .map(|&omega| {
            let g = green_at(omega, eps_k, kernel, z_weight, lifetime)?;
            Ok(GreenPoint {
                omega,
                g,
                spectral: -g.im / PI,
            })
        })
        .collect()
}

/// Planck occupation `1/(e^{ν/T} − 1)` (radiance prefactor `2hν³/c²` set to one).
pub fn planck(nu: f64, temperature: f64) -> f64 {
    1.0 / (nu / temperature).exp_m1()
}

/// Radiance for a distribution of effective temperatures. The kernel
/// carries weight `1 − w` and the fixed-temperature phase-transition
/// interval carries `w`; with `w = 0` this is exactly the kernel average of
/// [`planck`].
pub fn smeared_planck(nu: f64, kernel: &SmearKernel, ptei_weight: f64, ptei_temperature: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain {
            what: "frequency",
            value: nu,
            range: "(0, ∞)".into(),
        });
    }
    if !(0.0..=1.0).contains(&ptei_weight) {
        return Err(Error::Domain {
            what: "ptei weight",
            value: ptei_weight,
            range: "[0, 1]".into(),
        });
    }
    kernel.validate()?;
    let (lo, _) = kernel.support();
    if !(lo > 0.0) {
        return Err(Error::InvalidKernel(format!("temperature support reaches {lo} ≤ 0")));
    }
    let smeared = kernel_average(kernel, |t| planck(nu, t))?;
    if ptei_weight == 0.0 {
        return Ok(smeared);
    }
    if !(ptei_temperature > 0.0) {
        return Err(Error::Domain {
            what: "ptei temperature",
            value: ptei_temperature,
            range: "(0, ∞)".into(),
        });
    }
    Ok((1.0 - ptei_weight) * smeared + ptei_weight * planck(nu, ptei_temperature))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub arcsine: f64,
    pub gaussian: f64,
}

/// `(C(2g,g)(σ²/2)^g, (2g−1)!! σ^{2g})`: central moments of order `2g` of
/// an arcsine and a normal law sharing the standard deviation `σ`.
pub fn moment_compare(g: u32, sigma: f64) -> Result<MomentPair> {
    if g == 0 {
        return Err(Error::InvalidArgument("moment order g must be ≥ 1".into()));
    }
    let double_factorial: f64 = (1..=g).map(|k| (2 * k - 1) as f64).product();
    Ok(MomentPair {
        arcsine: central_binomial(g) * (0.5 * sigma * sigma).powi(g as i32),
        gaussian: double_factorial * sigma.powi(2 * g as i32),
    })
}
