//! Equal-amplitude superpositions of classical product states: Ising
//! domain-wall correlators, the Ising temperature/energy dictionary, Dicke
//! entanglement entropies, and SU(2) multiplicities of `N` spin-1/2 sites.
//!
//! Ising spins here are `±1` (Pauli eigenvalues), not `±½`.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain handled by brute-force enumeration.
pub const MAX_ENUMERATION_LENGTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainWallEnsemble {
    chain_length: usize,
    wall_count: usize,
    coupling: f64,
}

impl DomainWallEnsemble {
    pub fn new(chain_length: usize, wall_count: usize, coupling: f64) -> Result<Self> {
        if chain_length < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain length {chain_length} must be at least 2"
            )));
        }
        if wall_count > chain_length - 1 {
            return Err(Error::InvalidArgument(format!(
                "{wall_count} walls exceed the {} bonds",
                chain_length - 1
            )));
        }
        if !(coupling > 0.0) || !coupling.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling J = {coupling} must be positive")));
        }
        Ok(Self {
            chain_length,
            wall_count,
            coupling,
        })
    }

    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    pub fn wall_count(&self) -> usize {
        self.wall_count
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn bonds(&self) -> usize {
        self.chain_length - 1
    }

    /// `E = −J(B − 2k)`.
    pub fn energy(&self) -> f64 {
        -self.coupling * (self.bonds() as f64 - 2.0 * self.wall_count as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CorrelatorMethod {
    ExactEnumeration,
    ExactHypergeometric,
    Asymptotic,
    Thermal { beta: f64 },
}

fn check_distance(ensemble: &DomainWallEnsemble, d: usize) -> Result<()> {
    if d == 0 || d > ensemble.bonds() {
        return Err(Error::Domain {
            what: "distance",
            value: d as f64,
            range: format!("[1, {}]", ensemble.bonds()),
        });
    }
    Ok(())
}

/// `⟨S_r S_{r+d}⟩` averaged over all configurations with exactly `k` walls,
/// by enumerating the `2^L` spin configurations.
pub fn correlator_by_enumeration(ensemble: &DomainWallEnsemble, d: usize) -> Result<BigRational> {
    check_distance(ensemble, d)?;
    let l = ensemble.chain_length();
    if l > MAX_ENUMERATION_LENGTH {
        return Err(Error::EnumerationTooLarge(l));
    }
    let bond_mask = (1u64 << (l - 1)) - 1;
    let mut total = 0i64;
    let mut count = 0i64;
    for c in 0u64..(1u64 << l) {
        let walls = (c ^ (c >> 1)) & bond_mask;
        if walls.count_ones() as usize != ensemble.wall_count() {
            continue;
        }
        count += 1;
        total += if (c & 1) == ((c >> d) & 1) { 1 } else { -1 };
    }
    Ok(BigRational::new(BigInt::from(total), BigInt::from(count)))
}

/// `Σ_j (−1)^j C(d, j) C(B−d, k−j) / C(B, k)`.
pub fn correlator_hypergeometric(ensemble: &DomainWallEnsemble, d: usize) -> Result<BigRational> {
    check_distance(ensemble, d)?;
    let b = ensemble.bonds();
    let k = ensemble.wall_count();
    let mut sum = BigInt::zero();
    for j in 0..=d.min(k) {
        if k - j > b - d {
            continue;
        }
        let term = BigInt::from(binomial(BigUint::from(d), BigUint::from(j)))
            * BigInt::from(binomial(BigUint::from(b - d), BigUint::from(k - j)));
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(BigRational::new(sum, BigInt::from(binomial(BigUint::from(b), BigUint::from(k)))))
}

pub fn domain_wall_correlator(ensemble: &DomainWallEnsemble, d: usize, method: CorrelatorMethod) -> Result<f64> {
    check_distance(ensemble, d)?;
    let exact = |r: BigRational| r.to_f64().ok_or_else(|| Error::InvalidArgument("ratio not representable".into()));
    match method {
        CorrelatorMethod::ExactEnumeration => exact(correlator_by_enumeration(ensemble, d)?),
        CorrelatorMethod::ExactHypergeometric => exact(correlator_hypergeometric(ensemble, d)?),
        CorrelatorMethod::Asymptotic => {
            let b = ensemble.bonds() as f64;
            Ok(((b - 2.0 * ensemble.wall_count() as f64) / b).powi(d as i32))
        }
        CorrelatorMethod::Thermal { beta } => Ok((beta * ensemble.coupling()).tanh().powi(d as i32)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TemperatureQuery {
    Energy(f64),
    Beta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub beta: f64,
    pub energy: f64,
    pub heat_capacity: f64,
}

/// Open Ising chain of `L` sites: `E = −J(L−1) tanh βJ` in either direction,
/// with `C_v = L((βJ)² − (βE/L)²)`.
pub fn temperature_energy_maps(chain_length: usize, coupling: f64, query: TemperatureQuery) -> Result<ThermalPoint> {
    if chain_length < 2 || !(coupling > 0.0) {
        return Err(Error::InvalidArgument("need L ≥ 2 and J > 0".into()));
    }
    let scale = coupling * (chain_length - 1) as f64;
    let (beta, energy) = match query {
        TemperatureQuery::Energy(e) => {
            if !(e.abs() <= scale) {
                return Err(Error::Domain {
                    what: "energy",
                    value: e,
                    range: format!("[{}, {}]", -scale, scale),
                });
            }
            ((-e / scale).atanh() / coupling, e)
        }
        TemperatureQuery::Beta(beta) => {
            if beta.is_nan() {
                return Err(Error::InvalidArgument("β is NaN".into()));
            }
            (beta, -scale * (beta * coupling).tanh())
        }
    };
    let l = chain_length as f64;
    let heat_capacity = if beta.is_infinite() {
        0.0
    } else {
        l * ((beta * coupling).powi(2) - (beta * energy / l).powi(2))
    };
    Ok(ThermalPoint {
        beta,
        energy,
        heat_capacity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DickeSplit {
    n_sites: u32,
    up: u32,
    left_size: u32,
}

impl DickeSplit {
    /// `m` as a half-integer magnetisation.
    pub fn new(n_sites: u32, m: f64, left_size: u32) -> Result<Self> {
        let up = m + n_sites as f64 / 2.0;
        if n_sites < 2 || up < 0.0 || up > n_sites as f64 || up.fract() != 0.0 {
            return Err(Error::InvalidSector(format!("m = {m} is not valid for N = {n_sites}")));
        }
        if left_size == 0 || left_size >= n_sites {
            return Err(Error::InvalidArgument(format!(
                "left block size {left_size} must lie in [1, {}]",
                n_sites - 1
            )));
        }
        Ok(Self {
            n_sites,
            up: up as u32,
            left_size,
        })
    }

    pub fn n_sites(&self) -> u32 {
        self.n_sites
    }

    pub fn up(&self) -> u32 {
        self.up
    }

    pub fn left_size(&self) -> u32 {
        self.left_size
    }

    pub fn right_size(&self) -> u32 {
        self.n_sites - self.left_size
    }

    pub fn m(&self) -> f64 {
        self.up as f64 - self.n_sites as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMethod {
    Exact,
    Saddle,
}

/// Schmidt weights `C(L_A, k) C(L_B, n−k) / C(N, n)`, exact.
pub fn dicke_schmidt_weights(split: &DickeSplit) -> Vec<BigRational> {
    let (la, lb, n) = (split.left_size(), split.right_size(), split.up());
    let total = BigInt::from(binomial(BigUint::from(split.n_sites()), BigUint::from(n)));
    let lo = n.saturating_sub(lb);
    let hi = n.min(la);
    (lo..=hi)
        .map(|k| {
            let num = binomial(BigUint::from(la), BigUint::from(k)) * binomial(BigUint::from(lb), BigUint::from(n - k));
            BigRational::new(BigInt::from(num), total.clone())
        })
        .collect()
}

/// Entanglement entropy (nats) of the Dicke state across the split.
pub fn dicke_entanglement(split: &DickeSplit, method: EntropyMethod) -> Result<f64> {
    match method {
        EntropyMethod::Exact => {
            let mut p = dicke_schmidt_weights(split)
                .iter()
                .map(|w| w.to_f64().ok_or_else(|| Error::InvalidArgument("weight not representable".into())))
                .collect::<Result<Vec<f64>>>()?;
            // canonical summation order keeps the L_A ↔ L_B and m ↔ −m symmetries exact
            p.sort_by(f64::total_cmp);
            Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum())
        }
        EntropyMethod::Saddle => Ok(saddle_entropy(dicke_sigma_sq(split))),
    }
}

/// `σ_B²` for free spins in a field, in units of the level spacing:
/// `p(1−p) L_A L_B / N` with `p = n/N`.
pub fn dicke_sigma_sq(split: &DickeSplit) -> f64 {
    let n = split.n_sites() as f64;
    let p = split.up() as f64 / n;
    p * (1.0 - p) * split.left_size() as f64 * split.right_size() as f64 / n
}

/// `½ ln(2πσ² + 1)`.
pub fn saddle_entropy(sigma_sq: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * sigma_sq + 1.0).ln()
}

/// Saddle entropy of the equal-energy Ising superposition split after
/// `left_size` sites. Subsystem heat capacities use the chain formula with
/// energy shared in proportion to size; `σ_B` is measured in units of the
/// domain-wall energy `2J`.
pub fn ising_saddle_entropy(ensemble: &DomainWallEnsemble, left_size: usize) -> Result<f64> {
    let l = ensemble.chain_length();
    if left_size == 0 || left_size >= l {
        return Err(Error::InvalidArgument(format!("left block size {left_size} must lie in [1, {}]", l - 1)));
    }
    let j = ensemble.coupling();
    let point = temperature_energy_maps(l, j, TemperatureQuery::Energy(ensemble.energy()))?;
    let capacity = |size: usize| {
        let e = ensemble.energy() * size as f64 / l as f64;
        size as f64 * ((point.beta * j).powi(2) - (point.beta * e / size as f64).powi(2))
    };
    let (ca, cb) = (capacity(left_size), capacity(l - left_size));
    if !(ca + cb > 0.0) || point.beta.is_infinite() {
        return Ok(saddle_entropy(0.0));
    }
    let c_eff = ca * cb / (ca + cb);
    let sigma_sq = c_eff / (point.beta * point.beta) / (2.0 * j).powi(2);
    Ok(saddle_entropy(sigma_sq))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Multiplicity {
    Exact(BigUint),
    /// Natural logarithm of the Gaussian estimate; the count itself
    /// overflows `f64` for large `N`.
    Gaussian { ln: f64 },
}

impl Multiplicity {
    pub fn ln(&self) -> f64 {
        match self {
            Multiplicity::Exact(m) => ln_biguint(m),
            Multiplicity::Gaussian { ln } => *ln,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicityMethod {
    Exact,
    Gaussian,
}

/// `ln x` for arbitrarily large integers (`−∞` for zero).
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of times total spin `S = two_s/2` occurs among `N` spin-1/2 sites.
pub fn spin_multiplicity(n_sites: u64, two_s: u64, method: MultiplicityMethod) -> Result<Multiplicity> {
    if two_s > n_sites || (n_sites - two_s) % 2 != 0 {
        return Err(Error::InvalidSector(format!(
            "S = {} is not reachable from {n_sites} spin-1/2 sites",
            two_s as f64 / 2.0
        )));
    }
    match method {
        MultiplicityMethod::Exact => {
            // N!(2S+1) / ((N/2+S+1)!(N/2−S)!)
            let upper = (n_sites + two_s) / 2 + 1;
            let lower = (n_sites - two_s) / 2;
            let num = factorial(n_sites) * (two_s + 1);
            Ok(Multiplicity::Exact(num / (factorial(upper) * factorial(lower))))
        }
        MultiplicityMethod::Gaussian => {
            if two_s == 0 {
                return Err(Error::Domain {
                    what: "S_tot",
                    value: 0.0,
                    range: "(0, N/2] for the Gaussian estimate".into(),
                });
            }
            let n = n_sites as f64;
            let s = two_s as f64 / 2.0;
            // 2^{N+5/2} e^{−2S²/N} S / (N^{3/2} √π)
            let ln = (n + 2.5) * std::f64::consts::LN_2 - 2.0 * s * s / n + s.ln()
                - 1.5 * n.ln()
                - 0.5 * std::f64::consts::PI.ln();
            Ok(Multiplicity::Gaussian { ln })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_site_no_wall() {
        let e = DomainWallEnsemble::new(2, 0, 1.0).unwrap();
        assert_eq!(correlator_by_enumeration(&e, 1).unwrap(), rat(1, 1));
    }

    #[test]
    fn three_sites_one_wall() {
        let e = DomainWallEnsemble::new(3, 1, 1.0).unwrap();
        assert_eq!(correlator_by_enumeration(&e, 1).unwrap(), rat(0, 1));
        assert_eq!(correlator_by_enumeration(&e, 2).unwrap(), rat(-1, 1));
        assert_eq!(correlator_hypergeometric(&e, 2).unwrap(), rat(-1, 1));
        assert_eq!(domain_wall_correlator(&e, 2, CorrelatorMethod::Asymptotic).unwrap(), 0.0);
    }

    #[test]
    fn asymptotic_example() {
        let e = DomainWallEnsemble::new(100, 30, 1.0).unwrap();
        let a = domain_wall_correlator(&e, 2, CorrelatorMethod::Asymptotic).unwrap();
        assert!((a - (39.0f64 / 99.0).powi(2)).abs() < 1e-15);
        let x = domain_wall_correlator(&e, 2, CorrelatorMethod::ExactHypergeometric).unwrap();
        // exact − asymptotic = −4ρ(1−ρ)/(B−1) with ρ = k/B
        let rho = 30.0 / 99.0;
        assert!((x - a + 4.0 * rho * (1.0 - rho) / 98.0).abs() < 1e-14);
    }

    #[test]
    fn distance_and_size_checks() {
        let e = DomainWallEnsemble::new(5, 1, 1.0).unwrap();
        assert!(domain_wall_correlator(&e, 0, CorrelatorMethod::Asymptotic).is_err());
        assert!(domain_wall_correlator(&e, 5, CorrelatorMethod::Asymptotic).is_err());
        let big = DomainWallEnsemble::new(21, 3, 1.0).unwrap();
        assert_eq!(correlator_by_enumeration(&big, 1), Err(Error::EnumerationTooLarge(21)));
        assert!(DomainWallEnsemble::new(5, 5, 1.0).is_err());
    }

    #[test]
    fn temperature_maps() {
        let p = temperature_energy_maps(10, 1.0, TemperatureQuery::Energy(0.0)).unwrap();
        assert_eq!(p.beta, 0.0);
        let p = temperature_energy_maps(10, 2.0, TemperatureQuery::Beta(f64::INFINITY)).unwrap();
        assert_eq!(p.energy, -18.0);
        assert!(temperature_energy_maps(10, 1.0, TemperatureQuery::Energy(-9.5)).is_err());
    }

    #[test]
    fn dicke_small_cases() {
        let s = DickeSplit::new(2, 0.0, 1).unwrap();
        assert!((dicke_entanglement(&s, EntropyMethod::Exact).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let s = DickeSplit::new(4, 0.0, 2).unwrap();
        let expect = -(2.0 * (1.0f64 / 6.0) * (1.0f64 / 6.0).ln() + (2.0f64 / 3.0) * (2.0f64 / 3.0).ln());
        assert!((dicke_entanglement(&s, EntropyMethod::Exact).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.867_563).abs() < 1e-6);
    }

    #[test]
    fn dicke_split_validation() {
        assert!(DickeSplit::new(4, 0.5, 2).is_err());
        assert!(DickeSplit::new(4, 3.0, 2).is_err());
        assert!(DickeSplit::new(4, 0.0, 4).is_err());
    }

    #[test]
    fn multiplicity_tables() {
        let m = |n, two_s| match spin_multiplicity(n, two_s, MultiplicityMethod::Exact).unwrap() {
            Multiplicity::Exact(v) => v,
            _ => unreachable!(),
        };
        assert_eq!([m(4, 4), m(4, 2), m(4, 0)], [1u32, 3, 2].map(BigUint::from));
        assert_eq!([m(3, 3), m(3, 1)], [1u32, 2].map(BigUint::from));
        assert!(spin_multiplicity(4, 1, MultiplicityMethod::Exact).is_err());
    }

    #[test]
    fn ln_of_huge_integer() {
        let x = BigUint::one() << 5000u32;
        assert!((ln_biguint(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
    }
}
