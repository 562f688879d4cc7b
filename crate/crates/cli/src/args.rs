use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "enwidth", version, about = "Energy-density width sweeps, oracle checks and viscosity fits")]
pub struct Cli {
    /// Output directory (default: $ENWIDTH_OUT_DIR, else ./enwidth-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Run the subcommand's oracle suite instead of its normal output.
    #[arg(long, global = true)]
    pub selftest: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Analytic width of the energy density of a driven collective spin.
    SpinSigma(SpinSigmaArgs),
    /// Eigenweight distribution against the arcsine law.
    SpinDist(SpinDistArgs),
    /// Analytic widths against exact diagonalization.
    ExactCheck(ExactCheckArgs),
    /// Spectra of the spin and hard-core boson Hamiltonians.
    BoseDual(BoseDualArgs),
    /// Second-order Magnus truncation error.
    MagnusCheck(MagnusCheckArgs),
    /// Instantaneous variance rate against finite differences.
    VarianceRate(VarianceRateArgs),
    /// Uncertainty bounds for the driven collective spin.
    BoundsCheck(BoundsCheckArgs),
    /// Largest equilibrium-compatible heating or cooling rate.
    RateThreshold(RateThresholdArgs),
    /// Ising domain-wall correlators.
    IsingCorr(IsingCorrArgs),
    /// Dicke-state entanglement entropy.
    DickeEntropy(DickeEntropyArgs),
    /// Total-spin multiplicities of N spin-1/2 sites.
    Multiplicity(MultiplicityArgs),
    /// Per-liquid fit of the erfc viscosity law.
    ViscosityFit(ViscosityArgs),
    /// Collapse coordinates of viscosity data.
    Collapse(ViscosityArgs),
    /// Coherent Green's function smeared over chemical potentials.
    SmearGreen(SmearGreenArgs),
    /// Planck radiance smeared over effective temperatures.
    SmearPlanck(SmearPlanckArgs),
    /// Arcsine and Gaussian central moments.
    MomentCompare(MomentCompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SpinSigma(_) => "spin-sigma",
            Command::SpinDist(_) => "spin-dist",
            Command::ExactCheck(_) => "exact-check",
            Command::BoseDual(_) => "bose-dual",
            Command::MagnusCheck(_) => "magnus-check",
            Command::VarianceRate(_) => "variance-rate",
            Command::BoundsCheck(_) => "bounds-check",
            Command::RateThreshold(_) => "rate-threshold",
            Command::IsingCorr(_) => "ising-corr",
            Command::DickeEntropy(_) => "dicke-entropy",
            Command::Multiplicity(_) => "multiplicity",
            Command::ViscosityFit(_) => "viscosity-fit",
            Command::Collapse(_) => "collapse",
            Command::SmearGreen(_) => "smear-green",
            Command::SmearPlanck(_) => "smear-planck",
            Command::MomentCompare(_) => "moment-compare",
        }
    }
}

/// Every subcommand name, in help order.
pub const SUBCOMMANDS: [&str; 16] = [
    "spin-sigma",
    "spin-dist",
    "exact-check",
    "bose-dual",
    "magnus-check",
    "variance-rate",
    "bounds-check",
    "rate-threshold",
    "ising-corr",
    "dicke-entropy",
    "multiplicity",
    "viscosity-fit",
    "collapse",
    "smear-green",
    "smear-planck",
    "moment-compare",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Replace,
    Augment,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpinSigmaArgs {
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 2.0)]
    pub stot: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bz: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Replace)]
    pub mode: ModeArg,
    /// Single rotation angle (replace mode); otherwise θ is swept over [0, π].
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Transverse field (augment mode).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub by: f64,
    /// Single time (augment mode); otherwise t is swept over [0, t-max].
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpinDistArgs {
    #[arg(long, default_value_t = 100.0)]
    pub stot: f64,
    /// Site count (default: 2·stot).
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bz: f64,
    /// Number of characteristic-function sample points.
    #[arg(long, default_value_t = 10)]
    pub q_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactCheckArgs {
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 20)]
    pub thetas: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bz: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoseDualArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Random coupling sets per size.
    #[arg(long, default_value_t = 5)]
    pub sets: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MagnusCheckArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub bz: f64,
    /// Transverse fields of the two equal-length segments.
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    pub by1: f64,
    #[arg(long, default_value_t = -0.4, allow_negative_numbers = true)]
    pub by2: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub t_max: f64,
    #[arg(long, default_value_t = 9)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VarianceRateArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Initial Dicke state: number of up spins.
    #[arg(long, default_value_t = 3)]
    pub up: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bz: f64,
    /// Rotation angle accumulated over unit time.
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsCheckArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub up: usize,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bz: f64,
    /// Amplitude of the transverse term in H̃.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub by: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RateThresholdArgs {
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cv_total: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cv_sub: f64,
    /// Temperature in K and heat capacities in J/K; the rate is reported in W.
    #[arg(long)]
    pub si: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IsingCorrArgs {
    #[arg(long, default_value_t = 12)]
    pub l: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    /// Largest distance (default: L − 1).
    #[arg(long)]
    pub d_max: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DickeEntropyArgs {
    #[arg(long, default_value_t = 16)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub m: f64,
    /// Left block size (default: every cut).
    #[arg(long)]
    pub la: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MultiplicityArgs {
    #[arg(long, default_value_t = 4)]
    pub n: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ViscosityArgs {
    /// CSV with header `liquid,T_K,eta_Pa_s`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// CSV with header `liquid,T_liquidus_K,eta_liquidus_Pa_s`.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, default_value_t = 0.001)]
    pub abar_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub abar_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Delta,
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmearGreenArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps_k: f64,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    /// Kernel centre (chemical-potential shift).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma_mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tau: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 121)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmearPlanckArgs {
    #[arg(long, default_value_t = 0.1)]
    pub nu_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub nu_max: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    /// Kernel centre temperature.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Kernel width; the Gaussian is truncated at ±10σ, so keep σ_T < T/10.
    #[arg(long, default_value_t = 0.05)]
    pub sigma_t: f64,
    #[arg(long, default_value_t = 0.0)]
    pub ptei_weight: f64,
    /// Temperature of the phase-transition interval (default: --t).
    #[arg(long)]
    pub ptei_t: Option<f64>,
    /// Frequencies in Hz, temperatures in K, radiance in W sr⁻¹ m⁻² Hz⁻¹.
    #[arg(long)]
    pub si: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentCompareArgs {
    #[arg(long, default_value_t = 5)]
    pub g_max: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}
