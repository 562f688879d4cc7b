use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_10;

use super::{collapse_x, log10_viscosity_predict};
use crate::error::{Error, Result};
use crate::optimize::{minimize_bounded, MinimizeOptions};
use crate::special::ln_erfc;

pub const DEFAULT_ABAR_BOUNDS: (f64, f64) = (0.001, 1.0);
/// Tolerance in `Ā` for the bounded minimiser.
pub const FIT_TOL: f64 = 1e-10;
const MIN_ROWS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscosityRow {
    pub t_k: f64,
    pub eta: f64,
    /// `T > T_l`: kept for reference, excluded from fitting.
    pub above_liquidus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityRecord {
    pub liquid_id: String,
    pub rows: Vec<ViscosityRow>,
    pub t_liquidus: f64,
    pub eta_liquidus: f64,
}

impl ViscosityRecord {
    pub fn new(liquid_id: impl Into<String>, rows: &[(f64, f64)], t_liquidus: f64, eta_liquidus: f64) -> Result<Self> {
        let liquid_id = liquid_id.into();
        if !(t_liquidus > 0.0) || !(eta_liquidus > 0.0) || !t_liquidus.is_finite() || !eta_liquidus.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{liquid_id}: liquidus point ({t_liquidus} K, {eta_liquidus} Pa·s) must be positive"
            )));
        }
        let rows = rows
            .iter()
            .map(|&(t_k, eta)| {
                if !(t_k > 0.0) || !(eta > 0.0) || !t_k.is_finite() || !eta.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "{liquid_id}: row ({t_k} K, {eta} Pa·s) must be positive"
                    )));
                }
                Ok(ViscosityRow {
                    t_k,
                    eta,
                    above_liquidus: t_k > t_liquidus,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            liquid_id,
            rows,
            t_liquidus,
            eta_liquidus,
        })
    }

    pub fn retained(&self) -> impl Iterator<Item = &ViscosityRow> {
        self.rows.iter().filter(|r| !r.above_liquidus)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.above_liquidus).count()
    }
}

/// Liquids ordered by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityDataset {
    liquids: Vec<ViscosityRecord>,
}

impl ViscosityDataset {
    pub fn new(mut liquids: Vec<ViscosityRecord>) -> Result<Self> {
        liquids.sort_by(|a, b| a.liquid_id.cmp(&b.liquid_id));
        if let Some(w) = liquids.windows(2).find(|w| w[0].liquid_id == w[1].liquid_id) {
            return Err(Error::InvalidArgument(format!("duplicate liquid id {}", w[0].liquid_id)));
        }
        Ok(Self { liquids })
    }

    pub fn liquids(&self) -> &[ViscosityRecord] {
        &self.liquids
    }

    pub fn flagged(&self) -> usize {
        self.liquids.iter().map(ViscosityRecord::flagged).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub t_k: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub liquid_id: String,
    pub abar: f64,
    /// RMS of `log₁₀η_pred − log₁₀η_obs` over retained rows (decades).
    pub residual_rms: f64,
    pub points: Vec<CollapsePoint>,
    pub at_bound: bool,
    pub excluded_rows: usize,
}

impl CollapseFit {
    /// RMS distance (decades) of the collapsed points from `y·erfc(x) = 1`.
    pub fn master_curve_rms(&self) -> f64 {
        let n = self.points.len() as f64;
        (self
            .points
            .iter()
            .map(|p| (p.y.log10() + ln_erfc(p.x) / LN_10).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    }
}

fn log10_sse(record: &ViscosityRecord, abar: f64) -> f64 {
    record
        .retained()
        .map(|r| {
            let pred = log10_viscosity_predict(r.t_k, record.t_liquidus, abar, record.eta_liquidus)
                .unwrap_or(f64::INFINITY);
            (pred - r.eta.log10()).powi(2)
        })
        .sum()
}

/// Least-squares `Ā` for one liquid in `log₁₀η`, with collapse coordinates.
pub fn fit_liquid(record: &ViscosityRecord, abar_bounds: (f64, f64)) -> Result<CollapseFit> {
    let n = record.retained().count();
    if n < MIN_ROWS {
        return Err(Error::InsufficientData {
            liquid: record.liquid_id.clone(),
            rows: n,
        });
    }
    let (lo, hi) = abar_bounds;
    if !(lo > 0.0) {
        return Err(Error::InvalidArgument(format!("Ā bounds must be positive, got ({lo}, {hi})")));
    }
    let opts = MinimizeOptions {
        tol: FIT_TOL,
        log_scan: true,
        ..Default::default()
    };
    let best = minimize_bounded(|a| log10_sse(record, a), lo, hi, opts)?;
    let abar = best.x;
    let points = record
        .retained()
        .map(|r| CollapsePoint {
            t_k: r.t_k,
            x: collapse_x(r.t_k, record.t_liquidus, abar),
            y: r.eta / record.eta_liquidus,
        })
        .collect();
    Ok(CollapseFit {
        liquid_id: record.liquid_id.clone(),
        abar,
        residual_rms: (best.f_min / n as f64).sqrt(),
        points,
        at_bound: best.at_bound,
        excluded_rows: record.flagged(),
    })
}

/// Fits every liquid independently (in parallel); results follow the
/// dataset's id order.
pub fn fit_collapse(dataset: &ViscosityDataset, abar_bounds: (f64, f64)) -> Result<Vec<CollapseFit>> {
    dataset
        .liquids()
        .par_iter()
        .map(|r| fit_liquid(r, abar_bounds))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLiquid {
    pub record: ViscosityRecord,
    /// Realised RMS of the injected noise in decades of `η`.
    pub injected_rms: f64,
}

/// Rows on an even grid `T ∈ [0.7 T_l, T_l]` drawn from the erfc law with
/// multiplicative noise `η → η·e^ξ`, `ξ ~ N(0, noise_sigma)`.
pub fn synthetic_liquid<R: Rng + ?Sized>(
    liquid_id: &str,
    abar: f64,
    t_liquidus: f64,
    eta_liquidus: f64,
    n_rows: usize,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<SyntheticLiquid> {
    if n_rows < 2 {
        return Err(Error::InvalidArgument("need at least two synthetic rows".into()));
    }
    let normal = Normal::new(0.0, noise_sigma.max(0.0))
        .map_err(|e| Error::InvalidArgument(format!("noise level {noise_sigma}: {e}")))?;
    let mut rows = Vec::with_capacity(n_rows);
    let mut noise_sq = 0.0;
    for i in 0..n_rows {
        let t = t_liquidus * (0.7 + 0.3 * i as f64 / (n_rows - 1) as f64);
        let xi = if noise_sigma > 0.0 { normal.sample(rng) } else { 0.0 };
        noise_sq += (xi / LN_10).powi(2);
        let lg = log10_viscosity_predict(t, t_liquidus, abar, eta_liquidus)? + xi / LN_10;
        rows.push((t, 10f64.powf(lg)));
    }
    Ok(SyntheticLiquid {
        record: ViscosityRecord::new(liquid_id, &rows, t_liquidus, eta_liquidus)?,
        injected_rms: (noise_sq / n_rows as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = synthetic_liquid("a", 0.085, 1400.0, 10.0, 25, 0.0, &mut rng).unwrap();
        let fit = fit_liquid(&s.record, DEFAULT_ABAR_BOUNDS).unwrap();
        assert!((fit.abar - 0.085).abs() < 1e-6, "{}", fit.abar);
        assert!(!fit.at_bound);
        assert!(fit.master_curve_rms() < 1e-9);
    }

    #[test]
    fn too_few_rows() {
        let r = ViscosityRecord::new("b", &[(900.0, 1e3), (950.0, 1e2), (1200.0, 1.0)], 1000.0, 10.0).unwrap();
        assert_eq!(r.flagged(), 1);
        assert_eq!(
            fit_liquid(&r, DEFAULT_ABAR_BOUNDS),
            Err(Error::InsufficientData {
                liquid: "b".into(),
                rows: 2
            })
        );
    }

    #[test]
    fn rejects_non_positive_rows() {
        assert!(ViscosityRecord::new("c", &[(900.0, 0.0)], 1000.0, 10.0).is_err());
        assert!(ViscosityRecord::new("c", &[(900.0, 1.0)], -1.0, 10.0).is_err());
    }

    #[test]
    fn bound_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = synthetic_liquid("d", 0.5, 1000.0, 1.0, 10, 0.0, &mut rng).unwrap();
        let fit = fit_liquid(&s.record, (0.01, 0.2)).unwrap();
        assert!(fit.at_bound);
    }

    #[test]
    fn dataset_is_sorted_and_unique() {
        let mk = |id: &str| ViscosityRecord::new(id, &[(900.0, 1.0)], 1000.0, 1.0).unwrap();
        let d = ViscosityDataset::new(vec![mk("z"), mk("a")]).unwrap();
        assert_eq!(d.liquids()[0].liquid_id, "a");
        assert!(ViscosityDataset::new(vec![mk("a"), mk("a")]).is_err());
    }
}
