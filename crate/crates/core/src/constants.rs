//! Physical constants (SI, CODATA 2018, 10 significant digits).

/// Speed of light in vacuum [m/s] (exact).
pub const C0: f64 = 299_792_458.0;

/// Vacuum permeability [H/m].
pub const MU0: f64 = 1.256_637_062e-6;

/// Vacuum permittivity [F/m].
pub const EPS0: f64 = 8.854_187_813e-12;

/// Impedance of free space [Ω].
pub fn eta0() -> f64 {
    (MU0 / EPS0).sqrt()
}

/// Converts a power ratio to decibels.
pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// dB per neper of power decay, `10 / ln 10`.
pub const DB_PER_NEPER_POWER: f64 = 4.342_944_819_032_518;
