//! The triple barrier-well-barrier potential.
//!
//! `V(x) = Vb P(x+d) - Vw P(x) + Vb P(x-d)` with a profile `P` that is either
//! a unit square on `(-d/2, d/2)` or a Gaussian `exp(-x^2 / 2 sigma^2)`. The
//! well depth `Vw` is stored as a positive number and subtracted, never as a
//! signed potential.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::PhysicalConstants;

/// Threshold (in 1/s) below which the barrier tail counts as zero when
/// choosing the integration cutoff for Gaussian profiles.
pub(crate) const SUPPORT_EPS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("well depth must be non-negative (got {0})")]
    NegativeWellDepth(f64),
    #[error("{name} must be finite")]
    NonFinite { name: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Gaussian,
}

/// Full description of the triple potential plus the atom it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "RawSpec")]
pub struct PotentialSpec {
    pub shape: Shape,
    /// Barrier height over hbar, 1/s.
    pub vb_over_hbar: f64,
    /// Well depth over hbar, 1/s; non-negative, subtracted in the potential.
    pub vw_over_hbar: f64,
    /// Barrier separation / square segment length, um.
    pub d: f64,
    /// Gaussian width, um; unused for the square profile.
    pub sigma: f64,
    pub constants: PhysicalConstants,
}

/// `K_b = sqrt(2 m Vb)/hbar` and `K_w = sqrt(2 m Vw)/hbar`, both in 1/um.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavenumberScales {
    pub kb: f64,
    pub kw: f64,
}

impl PotentialSpec {
    /// Square profile with sodium defaults; heights in 1/s, `d` in um.
    pub fn square(vb_over_hbar: f64, vw_over_hbar: f64, d: f64) -> Result<Self, SpecError> {
        let spec = Self {
            shape: Shape::Square,
            vb_over_hbar,
            vw_over_hbar,
            d,
            sigma: 0.0,
            constants: PhysicalConstants::sodium(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Gaussian profile with sodium defaults; heights in 1/s, lengths in um.
    pub fn gaussian(
        vb_over_hbar: f64,
        vw_over_hbar: f64,
        d: f64,
        sigma: f64,
    ) -> Result<Self, SpecError> {
        let spec = Self {
            shape: Shape::Gaussian,
            vb_over_hbar,
            vw_over_hbar,
            d,
            sigma,
            constants: PhysicalConstants::sodium(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    /// Same geometry and barrier at a different well depth.
    pub fn with_well_depth(mut self, vw_over_hbar: f64) -> Self {
        self.vw_over_hbar = vw_over_hbar;
        self
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (name, value) in [
            ("vb_over_hbar", self.vb_over_hbar),
            ("d", self.d),
            ("hbar", self.constants.hbar),
            ("mass", self.constants.mass),
        ] {
            if !value.is_finite() {
                return Err(SpecError::NonFinite { name });
            }
            if value <= 0.0 {
                return Err(SpecError::NonPositive { name, value });
            }
        }
        if !self.vw_over_hbar.is_finite() {
            return Err(SpecError::NonFinite {
                name: "vw_over_hbar",
            });
        }
        if self.vw_over_hbar < 0.0 {
            return Err(SpecError::NegativeWellDepth(self.vw_over_hbar));
        }
        if self.shape == Shape::Gaussian && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SpecError::NonPositive {
                name: "sigma",
                value: self.sigma,
            });
        }
        Ok(())
    }

    /// `V(x)/hbar` in 1/s. Total in x; exactly zero outside the square
    /// supports and vanishing as `exp(-x^2/2 sigma^2)` for Gaussians.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Square => {
                let p = |y: f64| if y.abs() < 0.5 * self.d { 1.0 } else { 0.0 };
                self.vb_over_hbar * p(x + self.d) - self.vw_over_hbar * p(x)
                    + self.vb_over_hbar * p(x - self.d)
            }
            Shape::Gaussian => {
                let p = |y: f64| (-y * y / (2.0 * self.sigma * self.sigma)).exp();
                self.vb_over_hbar * p(x + self.d) - self.vw_over_hbar * p(x)
                    + self.vb_over_hbar * p(x - self.d)
            }
        }
    }

    pub fn wavenumber_scales(&self) -> WavenumberScales {
        let mt = self.constants.mass_per_hbar();
        WavenumberScales {
            kb: (2.0 * mt * self.vb_over_hbar).sqrt(),
            kw: (2.0 * mt * self.vw_over_hbar).sqrt(),
        }
    }

    /// Half-width of the region treated as the potential's support: `3d/2`
    /// for squares, `d + sigma sqrt(2 ln(Vb / (hbar eps)))` for Gaussians so
    /// the truncated tail is below `eps = 1e-14` 1/s.
    pub fn support_half_width(&self) -> f64 {
        match self.shape {
            Shape::Square => 1.5 * self.d,
            Shape::Gaussian => {
                let log = (self.vb_over_hbar / SUPPORT_EPS).ln().max(0.0);
                self.d + self.sigma * (2.0 * log).sqrt()
            }
        }
    }

    pub(crate) fn mass_per_hbar(&self) -> f64 {
        self.constants.mass_per_hbar()
    }
}

/// Wire format used by the CLI config: heights in 1/s, lengths in um, the
/// atom mass in kg (defaults to sodium-23).
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    shape: Shape,
    vb_over_hbar_per_s: f64,
    vw_over_hbar_per_s: f64,
    d_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass_kg: Option<f64>,
}

impl From<PotentialSpec> for RawSpec {
    fn from(spec: PotentialSpec) -> Self {
        RawSpec {
            shape: spec.shape,
            vb_over_hbar_per_s: spec.vb_over_hbar,
            vw_over_hbar_per_s: spec.vw_over_hbar,
            d_um: spec.d,
            sigma_um: match spec.shape {
                Shape::Gaussian => Some(spec.sigma),
                Shape::Square => None,
            },
            mass_kg: Some(spec.constants.mass),
        }
    }
}

impl TryFrom<RawSpec> for PotentialSpec {
    type Error = SpecError;

    fn try_from(raw: RawSpec) -> Result<Self, SpecError> {
        let constants = match raw.mass_kg {
            Some(m) => PhysicalConstants::with_mass(m),
            None => PhysicalConstants::sodium(),
        };
        let spec = PotentialSpec {
            shape: raw.shape,
            vb_over_hbar: raw.vb_over_hbar_per_s,
            vw_over_hbar: raw.vw_over_hbar_per_s,
            d: raw.d_um,
            sigma: raw.sigma_um.unwrap_or(0.0),
            constants,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl<'de> Deserialize<'de> for PotentialSpec {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawSpec::deserialize(deserializer)?;
        PotentialSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_supports_are_disjoint() {
        let spec = PotentialSpec::square(300.0, 150.0, 5.0).unwrap();
        // Only the well's indicator covers x = 0.
        assert_eq!(spec.evaluate(0.0), -150.0);
        // Outside all supports.
        assert_eq!(spec.evaluate(10.0), 0.0);
        // Inside a barrier.
        assert_eq!(spec.evaluate(5.0), 300.0);
        assert_eq!(spec.evaluate(-4.0), 300.0);
    }

    #[test]
    fn gaussian_center_value() {
        // 2 * 300 * exp(-36/8) at x = 0 with the well turned off.
        let spec = PotentialSpec::gaussian(300.0, 0.0, 6.0, 2.0).unwrap();
        assert_relative_eq!(spec.evaluate(0.0), 6.665_397_922_945, max_relative = 1e-12);
    }

    #[test]
    fn parity() {
        // Equal up to summation order of the three profile terms.
        for spec in [
            PotentialSpec::square(300.0, 150.0, 5.0).unwrap(),
            PotentialSpec::gaussian(400.0, 180.0, 6.0, 2.0).unwrap(),
        ] {
            for x in [-11.3, -4.0, -0.7, 0.3, 2.9, 8.1] {
                assert_relative_eq!(
                    spec.evaluate(x),
                    spec.evaluate(-x),
                    max_relative = 1e-14,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn barrier_height_scales_linearly() {
        let a = PotentialSpec::gaussian(200.0, 0.0, 6.0, 2.0).unwrap();
        let b = PotentialSpec::gaussian(400.0, 0.0, 6.0, 2.0).unwrap();
        for x in [-7.0, -2.0, 0.0, 1.5, 6.0] {
            assert_relative_eq!(2.0 * a.evaluate(x), b.evaluate(x), max_relative = 1e-14);
        }
    }

    #[test]
    fn wavenumber_scales_match_si() {
        // sqrt(2 m Vb)/hbar with CODATA hbar and the Na-23 mass, frozen from
        // the SI evaluation in m^-1 scaled to um^-1.
        let spec = PotentialSpec::square(400.0, 199.901, 5.0).unwrap();
        let scales = spec.wavenumber_scales();
        assert_relative_eq!(scales.kb, 0.538_144_258_6, max_relative = 1e-9);
        assert_relative_eq!(scales.kw, 0.380_431_262_8, max_relative = 1e-9);

        let no_well = PotentialSpec::square(400.0, 0.0, 5.0).unwrap();
        assert_eq!(no_well.wavenumber_scales().kw, 0.0);
    }

    #[test]
    fn kb_kw_ordering_follows_heights() {
        for (vb, vw) in [(300.0, 100.0), (100.0, 300.0), (250.0, 250.0)] {
            let spec = PotentialSpec::square(vb, vw, 5.0).unwrap();
            let s = spec.wavenumber_scales();
            let diff = s.kb * s.kb - s.kw * s.kw;
            assert_eq!(diff > 0.0, vb > vw);
            if (vb - vw).abs() < f64::EPSILON {
                assert!(diff.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(PotentialSpec::square(-1.0, 0.0, 5.0).is_err());
        assert!(PotentialSpec::square(300.0, -2.0, 5.0).is_err());
        assert!(PotentialSpec::square(300.0, 0.0, 0.0).is_err());
        assert!(PotentialSpec::gaussian(300.0, 0.0, 6.0, 0.0).is_err());
        assert!(PotentialSpec::gaussian(300.0, 0.0, 6.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_support_cutoff_is_negligible() {
        let spec = PotentialSpec::gaussian(300.0, 150.0, 6.0, 2.0).unwrap();
        let x = spec.support_half_width();
        assert!(spec.evaluate(x).abs() < 3.0 * SUPPORT_EPS);
        assert!(x > spec.d);
    }

    #[test]
    fn config_round_trip() {
        let spec = PotentialSpec::gaussian(300.0, 180.25, 6.0, 2.0).unwrap();
        let toml = toml_like(&spec);
        assert!(toml.contains("vb_over_hbar_per_s"));
        let back: PotentialSpec = serde_json::from_str(&toml).unwrap();
        assert_eq!(back, spec);
    }

    fn toml_like(spec: &PotentialSpec) -> String {
        serde_json::to_string(spec).unwrap()
    }
}
