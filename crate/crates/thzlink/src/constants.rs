//! Physical constants and unit helpers shared across the crate.

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Specific gas constant of water vapor (J/(kg*K)).
pub const WATER_VAPOR_GAS_CONSTANT: f64 = 461.5;

/// Conversion factor from nepers to decibels: 10 * log10(e).
pub const DB_PER_NEPER: f64 = 4.342_944_819_032_518;

/// Lower edge of the frequency range the absorption model is fitted for (Hz).
pub const FREQ_MIN_HZ: f64 = 100e9;

/// Upper edge of the frequency range the absorption model is fitted for (Hz).
pub const FREQ_MAX_HZ: f64 = 3e12;

/// Converts a linear power ratio to decibels.
#[inline]
pub fn db_from_linear(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Converts decibels to a linear power ratio.
#[inline]
pub fn linear_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
