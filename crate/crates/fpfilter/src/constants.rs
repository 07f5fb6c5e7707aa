//! Physical constants and the internal unit system.
//!
//! All numerical work uses `hbar = 1`, lengths in micrometers, times in
//! seconds. Potential heights are handled as `V/hbar` (1/s), wavenumbers in
//! 1/um and velocities in um/s, so the only dimensionful constant left is
//! the atom mass, which enters as `m/hbar` in s/um^2.

/// Reduced Planck constant (J s), CODATA.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Mass of a sodium-23 atom (kg), 22.989769 u.
pub const MASS_NA23: f64 = 3.817_54e-26;

const UM_PER_CM: f64 = 1.0e4;
const UM2_PER_M2: f64 = 1.0e12;

/// Atom mass and `hbar`, both in SI. Everything downstream reduces them to
/// the single internal constant [`PhysicalConstants::mass_per_hbar`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant in J s.
    pub hbar: f64,
    /// Atom mass in kg.
    pub mass: f64,
}

impl PhysicalConstants {
    /// Constants for a single sodium-23 atom.
    pub fn sodium() -> Self {
        Self {
            hbar: HBAR,
            mass: MASS_NA23,
        }
    }

    pub fn with_mass(mass: f64) -> Self {
        Self { hbar: HBAR, mass }
    }

    /// `m/hbar` in s/um^2, the internal mass unit.
    pub fn mass_per_hbar(&self) -> f64 {
        self.mass / self.hbar / UM2_PER_M2
    }

    /// `k = m v / hbar`, velocity in cm/s to wavenumber in 1/um.
    pub fn velocity_to_wavenumber(&self, v_cm_per_s: f64) -> f64 {
        v_cm_per_s * UM_PER_CM * self.mass_per_hbar()
    }

    /// `v = hbar k / m`, wavenumber in 1/um to velocity in cm/s.
    pub fn wavenumber_to_velocity(&self, k: f64) -> f64 {
        k / self.mass_per_hbar() / UM_PER_CM
    }

    /// Kinetic energy over `hbar`, `m v^2 / (2 hbar)` in 1/s, for v in cm/s.
    pub fn kinetic_energy_over_hbar(&self, v_cm_per_s: f64) -> f64 {
        let v_um = v_cm_per_s * UM_PER_CM;
        0.5 * self.mass_per_hbar() * v_um * v_um
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::sodium()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn mass_per_hbar_matches_si() {
        let c = PhysicalConstants::sodium();
        // Direct SI computation: m/hbar in s/m^2, converted to s/um^2.
        let si = MASS_NA23 / HBAR * 1e-12;
        assert_relative_eq!(c.mass_per_hbar(), si, max_relative = 1e-15);
    }

    #[test]
    fn wavenumber_agrees_with_si_route() {
        let c = PhysicalConstants::sodium();
        for v in [1e-4, 3.3e-3, 0.0336, 0.1, 2.5] {
            // k = m v / hbar in 1/m, then to 1/um.
            let k_si = c.mass * (v * 1e-2) / c.hbar * 1e-6;
            assert_relative_eq!(c.velocity_to_wavenumber(v), k_si, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_velocity_is_zero_wavenumber() {
        let c = PhysicalConstants::sodium();
        assert_eq!(c.velocity_to_wavenumber(0.0), 0.0);
    }

    #[test]
    fn convert_round_trips() {
        let c = PhysicalConstants::sodium();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v: f64 = rng.gen_range(1e-6..10.0);
            let back = c.wavenumber_to_velocity(c.velocity_to_wavenumber(v));
            assert_relative_eq!(back, v, max_relative = 1e-14);
        }
    }

    #[test]
    fn known_velocity_for_threshold_wavenumber() {
        // v = hbar k / m at k = 0.3804 1/um; frozen from the SI expression
        // 1.054571817e-34 * 0.3804e6 / 3.81754e-26 = 1.0508e-3 m/s.
        let c = PhysicalConstants::sodium();
        assert_relative_eq!(
            c.wavenumber_to_velocity(0.3804),
            0.105_083_147_6,
            max_relative = 1e-9
        );
    }
}
