//! Condensate wavepacket filtering through the triple potential.
//!
//! A 1D Gross-Pitaevskii ground state is prepared in a moving harmonic
//! trap, released, and propagated through the Gaussian triple potential
//! while the nonlinearity decays as `1/(1 + omega_yz^2 t^2)` to mimic free
//! transverse expansion. Momentum-space snapshots show the velocity
//! filtering.

mod evolve;
mod fft;
mod experiment;
mod ground;
mod spectrum;

pub use evolve::{boost_and_place, mean_momentum, propagate};
pub use experiment::{filter_experiment, FilterConfig, FilterReport, ReportSummary, Snapshot};
pub use ground::{ground_state, ground_state_traced};
pub use spectrum::{momentum_distribution, MomentumDistribution};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::SpecError;

/// Density treated as "nothing there" at the grid edges; exceeding it
/// means the packet reached the boundary and the periodic transform would
/// wrap it around.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum WavepacketError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid condensate parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid potential spec: {0}")]
    Spec(#[from] SpecError),
    #[error("propagation requires a gaussian potential")]
    ShapeMismatch,
    #[error("imaginary time did not converge within {steps} steps (last energy {energy} 1/s)")]
    NoConvergence { steps: usize, energy: f64 },
    #[error("translated state reaches the grid edge (edge density {density})")]
    TranslationOutOfGrid { density: f64 },
    #[error("norm drifted by {drift} during propagation")]
    NormDrift { drift: f64 },
    #[error("edge density {density} exceeds {EDGE_DENSITY_LIMIT} (grid wrap-around)")]
    EdgeLeak { density: f64 },
    #[error("grid spacing {dx} um cannot resolve Kb = {kb} 1/um")]
    GridTooCoarse { dx: f64, kb: f64 },
    #[error("invalid time parameters: {0}")]
    InvalidTime(&'static str),
}

/// Uniform periodic spatial grid with a power-of-two point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "RawGrid")]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, WavepacketError> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(WavepacketError::InvalidGrid(format!(
                "bad extent [{x_min}, {x_max}]"
            )));
        }
        if n < 1024 || !n.is_power_of_two() {
            return Err(WavepacketError::InvalidGrid(format!(
                "n = {n} must be a power of two >= 1024"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Default for the filtering runs: wide enough that neither the
    /// transmitted packet (to the right) nor the reflected one (to the
    /// left) reaches an edge within 8 s at ~0.034 cm/s.
    pub fn default_filter_grid() -> Self {
        Self {
            x_min: -4000.0,
            x_max: 4000.0,
            n: 1 << 15,
        }
    }

    /// Same extent, twice the points.
    pub fn doubled(&self) -> Self {
        Self {
            n: self.n * 2,
            ..*self
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.position(j)).collect()
    }

    /// Wavenumbers in FFT ordering (non-negative first).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * std::f64::consts::PI / self.length();
        (0..self.n)
            .map(|m| {
                let m = if m < self.n / 2 {
                    m as isize
                } else {
                    m as isize - self.n as isize
                };
                m as f64 * dk
            })
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min_um: f64,
    x_max_um: f64,
    n: usize,
}

impl From<Grid> for RawGrid {
    fn from(g: Grid) -> Self {
        RawGrid {
            x_min_um: g.x_min,
            x_max_um: g.x_max,
            n: g.n,
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawGrid::deserialize(deserializer)?;
        Grid::new(raw.x_min_um, raw.x_max_um, raw.n).map_err(serde::de::Error::custom)
    }
}

/// Complex amplitudes on a [`Grid`] at a given time.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    /// Time since trap release, s.
    pub time: f64,
}

impl WaveFunction {
    /// `int |psi|^2 dx` on the grid (trapezoid; periodic, so equal to the
    /// rectangle rule).
    pub fn norm(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm().sqrt();
        for v in &mut self.values {
            *v *= scale;
        }
    }

    /// Probability beyond a position, `int_{x > x_edge} |psi|^2 dx`.
    pub fn probability_beyond(&self, x_edge: f64) -> f64 {
        let dx = self.grid.dx();
        self.values
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.position(*j) > x_edge)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// Largest `|psi|^2` over the outermost 8 points on each side.
    pub fn edge_density(&self) -> f64 {
        let n = self.values.len();
        let m = 8.min(n / 2);
        self.values[..m]
            .iter()
            .chain(self.values[n - m..].iter())
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Condensate and trap parameters of a filtering run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateParams {
    /// Number of atoms.
    #[serde(rename = "n_atoms")]
    pub n_atoms: f64,
    /// s-wave scattering length, meters.
    #[serde(rename = "scattering_length_m")]
    pub scattering_length_m: f64,
    /// Trap frequency along x, 1/s.
    #[serde(rename = "omega_x_per_s")]
    pub omega_x: f64,
    /// Transverse trap frequency, 1/s.
    #[serde(rename = "omega_yz_per_s")]
    pub omega_yz: f64,
    /// Trap velocity in the lab frame, cm/s.
    #[serde(rename = "v0_cm_per_s")]
    pub v0: f64,
    /// Trap position at release, um.
    #[serde(rename = "x_trap_um")]
    pub x_trap: f64,
}

impl CondensateParams {
    pub fn validate(&self) -> Result<(), WavepacketError> {
        if !(self.n_atoms >= 0.0) {
            return Err(WavepacketError::InvalidParams("n_atoms must be >= 0"));
        }
        if !(self.scattering_length_m > 0.0) {
            return Err(WavepacketError::InvalidParams(
                "scattering_length_m must be > 0",
            ));
        }
        if !(self.omega_x > 0.0 && self.omega_yz > 0.0) {
            return Err(WavepacketError::InvalidParams(
                "trap frequencies must be > 0",
            ));
        }
        if !(self.v0.is_finite() && self.x_trap.is_finite()) {
            return Err(WavepacketError::InvalidParams(
                "v0 and x_trap must be finite",
            ));
        }
        Ok(())
    }

    /// Mean-field coupling `2 N a omega_yz` over hbar, in um/s; multiplied
    /// by `|psi|^2` (1/um) it yields a potential over hbar in 1/s.
    pub fn g_over_hbar(&self) -> f64 {
        2.0 * self.n_atoms * (self.scattering_length_m * 1e6) * self.omega_yz
    }
}
