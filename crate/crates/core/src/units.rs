//! Conversions between linear and logarithmic power units.
//!
//! All model arithmetic runs in linear units (mW, linear gain); these helpers
//! are only used at the edges.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

/// Zero power maps to negative infinity.
pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}
