//! SI constants (exact in the 2019 SI, CODATA 2018 for ħ as a derived value).
//! The core works with `ħ = k_B = 1`; these are applied at the CLI boundary.

pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK_H / (2.0 * std::f64::consts::PI);
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Frequency in Hz expressed as `hν/k_B` in kelvin.
pub fn frequency_to_kelvin(nu_hz: f64) -> f64 {
    PLANCK_H * nu_hz / BOLTZMANN
}

/// Planck prefactor `2hν³/c²` in W sr⁻¹ m⁻² Hz⁻¹.
pub fn radiance_prefactor(nu_hz: f64) -> f64 {
    2.0 * PLANCK_H * nu_hz.powi(3) / (LIGHT_SPEED * LIGHT_SPEED)
}

/// `2 k_B T² √(C_I C_S) / ħ` in W for `T` in K and heat capacities in J/K.
pub fn rate_threshold_si(threshold_natural_k2_jk: f64) -> f64 {
    BOLTZMANN * threshold_natural_k2_jk / HBAR
}
