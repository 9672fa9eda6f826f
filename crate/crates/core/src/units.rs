//! Unit conversions. Everything inside the integrator is either atomic units
//! or the mixed Angstrom/femtosecond/Hartree system used for I/O; the factors
//! that bridge the two live here and nowhere else.

/// Bohr radii per Angstrom.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;
/// Atomic time units per femtosecond.
pub const FS_TO_AU_TIME: f64 = 41.341374575751;
/// Boltzmann constant in Hartree per Kelvin.
pub const BOLTZMANN_HA_PER_K: f64 = 3.166811563e-6;
/// Electron masses per unified atomic mass unit.
pub const AMU_TO_ELECTRON_MASS: f64 = 1822.888486209;
/// Standard atomic weight of hydrogen.
pub const HYDROGEN_MASS_AMU: f64 = 1.00784;

/// Hydrogen atom mass in electron masses.
pub fn hydrogen_mass() -> f64 {
    HYDROGEN_MASS_AMU * AMU_TO_ELECTRON_MASS
}

/// Reduced mass of the H2 bond coordinate, in electron masses.
pub fn h2_reduced_mass() -> f64 {
    hydrogen_mass() / 2.0
}

/// Inverse temperature in 1/Hartree.
pub fn beta(temperature_k: f64) -> f64 {
    1.0 / (BOLTZMANN_HA_PER_K * temperature_k)
}

/// Converts Hartree / (Angstrom * electron mass) to Angstrom / fs^2.
///
/// A force in Ha/A divided by a mass in electron masses, multiplied by this
/// factor, is an acceleration in A/fs^2.
pub fn acceleration_factor() -> f64 {
    FS_TO_AU_TIME * FS_TO_AU_TIME / (ANGSTROM_TO_BOHR * ANGSTROM_TO_BOHR)
}

/// Kinetic energy in Hartree of a mass (electron masses) moving at `v` A/fs.
pub fn kinetic_energy(mass: f64, v: f64) -> f64 {
    0.5 * mass * v * v / acceleration_factor()
}
