//! Velocity selection of ultra-cold atoms with a barrier-well-barrier laser
//! potential.
//!
//! Two blue-detuned barriers with a red-detuned well in between act as a
//! tunable Fabry-Perot cavity for slow atoms: only a narrow velocity window
//! around a transmission resonance passes. This crate models the device:
//!
//! * [`potential`] — the triple potential (square and Gaussian profiles) and
//!   the internal unit system,
//! * [`scattering`] — the transmission amplitude, exact for the square model
//!   and by ODE integration for arbitrary profiles,
//! * [`resonance`] — peak extraction, depth scans and the perturbative
//!   resonance-position/width laws,
//! * [`poles`] — complex-momentum poles of the square model, their collision
//!   and the bound-state threshold,
//! * [`wavepacket`] — 1D Gross-Pitaevskii condensate release and filtering.
//!
//! Internally `hbar = 1`, lengths are in micrometers and times in seconds;
//! potential heights enter as `V/hbar` in 1/s, so the numbers used in the
//! literature pass through unchanged.
//!
//! With the default `parallel` feature, curve generation, depth scans and
//! grid-pointwise work run on rayon; without it everything falls back to
//! sequential loops with identical results.

pub mod constants;
pub(crate) mod parallel;
pub mod poles;
pub mod potential;
pub mod resonance;
pub mod scattering;
pub mod wavepacket;

pub use constants::PhysicalConstants;
pub use potential::{PotentialSpec, Shape, WavenumberScales};
pub use scattering::{ScatteringResult, TransmittanceCurve};
