use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::special::bessel_j0;

/// Tolerance on the total weight of an empirical distribution.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedValue {
    pub value: f64,
    pub weight: f64,
}

/// Probability distribution `P(ε′)` of the energy density.
///
/// `Analytic` is the arcsine law centred at `center` with standard deviation
/// `width` (support `center ± width·√2`); `Empirical` is a set of atoms, e.g.
/// eigenvalue densities weighted by `|c_α|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EnergyDistribution {
    Analytic { center: f64, width: f64 },
    Empirical { points: Vec<WeightedValue> },
}

impl EnergyDistribution {
    pub fn analytic(center: f64, width: f64) -> Result<Self> {
        if !(width >= 0.0) || !width.is_finite() || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "arcsine width must be finite and non-negative, got {width}"
            )));
        }
        Ok(Self::Analytic { center, width })
    }

    /// Validates weights: non-negative and summing to one within 1e-12.
    pub fn empirical(mut points: Vec<WeightedValue>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empirical distribution has no points".into()));
        }
        if let Some(p) = points.iter().find(|p| !(p.weight >= 0.0) || !p.value.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "invalid atom (value {}, weight {})",
                p.value, p.weight
            )));
        }
        let total: f64 = points.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        points.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(Self::Empirical { points })
    }

    pub fn points(&self) -> Option<&[WeightedValue]> {
        match self {
            Self::Empirical { points } => Some(points),
            Self::Analytic { .. } => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Analytic { center, .. } => *center,
            Self::Empirical { points } => points.iter().map(|p| p.weight * p.value).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().max(0.0).sqrt()
    }

    /// `⟨(ε′ − ε)^p⟩`.
    pub fn central_moment(&self, p: u32) -> f64 {
        match self {
            Self::Analytic { width, .. } => {
                if p % 2 == 1 {
                    0.0
                } else {
                    let g = p / 2;
                    central_binomial(g) * (width * width / 2.0).powi(g as i32)
                }
            }
            Self::Empirical { points } => {
                let mean = self.mean();
                points
                    .iter()
                    .map(|pt| pt.weight * (pt.value - mean).powi(p as i32))
                    .sum()
            }
        }
    }

    /// `⟨exp(i q (ε′ − ε))⟩`.
    pub fn characteristic(&self, q: f64) -> Complex64 {
        match self {
            Self::Analytic { width, .. } => Complex64::new(characteristic_value(q, *width), 0.0),
            Self::Empirical { points } => {
                let mean = self.mean();
                points
                    .iter()
                    .map(|pt| pt.weight * Complex64::from_polar(1.0, q * (pt.value - mean)))
                    .sum()
            }
        }
    }

    /// `P(ε′ ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Analytic { center, width } => {
                if *width == 0.0 {
                    if x >= *center {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    arcsine_cdf(x, *center, *width).unwrap_or(0.0)
                }
            }
            Self::Empirical { points } => points
                .iter()
                .take_while(|p| p.value <= x)
                .map(|p| p.weight)
                .sum::<f64>()
                .min(1.0),
        }
    }

    /// Kolmogorov–Smirnov distance between an empirical distribution and
    /// any other distribution's CDF, evaluated on both sides of every atom.
    pub fn ks_distance(&self, reference: &EnergyDistribution) -> Result<f64> {
        let points = self.points().ok_or_else(|| {
            Error::InvalidArgument("KS distance needs an empirical distribution".into())
        })?;
        let mut below = 0.0;
        let mut worst = 0.0_f64;
        let mut i = 0;
        while i < points.len() {
            let x = points[i].value;
            let mut mass = 0.0;
            while i < points.len() && points[i].value == x {
                mass += points[i].weight;
                i += 1;
            }
            let f = reference.cdf(x);
            worst = worst.max((f - below).abs()).max((f - (below + mass)).abs());
            below += mass;
        }
        Ok(worst)
    }
}

/// `C(2g, g)` in floating point.
pub fn central_binomial(g: u32) -> f64 {
    (1..=g).fold(1.0, |acc, k| acc * (g + k) as f64 / k as f64)
}

/// Characteristic function of the arcsine law: `J₀(q σ √2)`.
pub fn characteristic_value(q: f64, width: f64) -> f64 {
    bessel_j0(q * width * SQRT_2)
}

/// Arcsine density `θ(σ√2 − |Δ|) / (π σ √(2 − Δ²/σ²))`, `Δ = ε′ − center`.
pub fn arcsine_density(x: f64, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    let delta = x - center;
    let half_width = width * SQRT_2;
    if delta.abs() >= half_width {
        return Ok(0.0);
    }
    let r = delta / width;
    Ok(1.0 / (PI * width * (2.0 - r * r).sqrt()))
}

/// Companion CDF `½ + arcsin(Δ/(σ√2))/π`, clamped to `[0, 1]` off support.
pub fn arcsine_cdf(x: f64, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    let u = (x - center) / (width * SQRT_2);
    Ok(if u <= -1.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        0.5 + u.asin() / PI
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_at_center() {
        let v = arcsine_density(0.0, 0.0, 1.0).unwrap();
        assert!((v - 1.0 / (PI * SQRT_2)).abs() < 1e-15);
        assert!((v - 0.2250791).abs() < 1e-7);
    }

    #[test]
    fn density_vanishes_off_support() {
        assert_eq!(arcsine_density(1.5, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(arcsine_density(-1.42, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_width_is_degenerate() {
        assert_eq!(arcsine_density(0.0, 0.0, 0.0), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let pts = vec![
            WeightedValue { value: 0.0, weight: 0.5 },
            WeightedValue { value: 1.0, weight: 0.4 },
        ];
        assert!(EnergyDistribution::empirical(pts).is_err());
    }

    #[test]
    fn json_shapes() {
        let a = EnergyDistribution::analytic(0.5, 0.25).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"type":"analytic","center":0.5,"width":0.25}"#);
        let e = EnergyDistribution::empirical(vec![WeightedValue { value: 1.0, weight: 1.0 }]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"type":"empirical","points":[{"value":1.0,"weight":1.0}]}"#);
        let back: EnergyDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn central_binomials() {
        assert_eq!(central_binomial(1), 2.0);
        assert_eq!(central_binomial(2), 6.0);
        assert_eq!(central_binomial(5), 252.0);
    }
}
