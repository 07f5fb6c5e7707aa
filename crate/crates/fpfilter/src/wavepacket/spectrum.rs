//! Momentum-space diagnostics.

use std::io::{self, Write};

use super::fft::FftPair;
use super::WaveFunction;
use crate::constants::PhysicalConstants;

/// `|psi(v)|^2` on the velocity grid dual to the spatial one, normalized so
/// that the integral over v (in cm/s) equals the position-space norm.
#[derive(Debug, Clone)]
pub struct MomentumDistribution {
    /// `(v in cm/s, density in (cm/s)^-1)`, velocities increasing.
    pub points: Vec<(f64, f64)>,
}

impl MomentumDistribution {
    /// Velocity spacing of the grid, cm/s.
    pub fn dv(&self) -> f64 {
        self.points[1].0 - self.points[0].0
    }

    /// `int |psi(v)|^2 dv`.
    pub fn total(&self) -> f64 {
        self.points.iter().map(|(_, d)| d).sum::<f64>() * self.dv()
    }

    /// Highest-density point with `v >= v_min`.
    pub fn peak_above(&self, v_min: f64) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter(|(v, _)| *v >= v_min)
            .cloned()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Density linearly interpolated at `v`.
    pub fn density_at(&self, v: f64) -> f64 {
        let dv = self.dv();
        let first = self.points[0].0;
        let idx = ((v - first) / dv).floor();
        if idx < 0.0 || idx as usize + 1 >= self.points.len() {
            return 0.0;
        }
        let j = idx as usize;
        let frac = (v - self.points[j].0) / dv;
        self.points[j].1 * (1.0 - frac) + self.points[j + 1].1 * frac
    }

    /// CSV with header `v_cm_per_s,density`, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "v_cm_per_s,density")?;
        for (v, d) in &self.points {
            writeln!(w, "{v:.11e},{d:.11e}")?;
        }
        Ok(())
    }

    /// Rows restricted to a velocity window (both ends in cm/s).
    pub fn window(&self, v_min: f64, v_max: f64) -> MomentumDistribution {
        MomentumDistribution {
            points: self
                .points
                .iter()
                .filter(|(v, _)| *v >= v_min && *v <= v_max)
                .cloned()
                .collect(),
        }
    }
}

/// Discrete Fourier transform of the state rescaled to a unit-integral
/// velocity density, `v = hbar k / m`.
pub fn momentum_distribution(
    psi: &WaveFunction,
    constants: &PhysicalConstants,
) -> MomentumDistribution {
    let n = psi.grid.n();
    let dx = psi.grid.dx();
    let mt = constants.mass_per_hbar();

    let mut spectrum = psi.values.clone();
    let mut fft = FftPair::new(n);
    fft.forward(&mut spectrum);

    let ks = psi.grid.wavenumbers();
    // k-density |psi~(k)|^2 with psi~ = dx X / sqrt(2 pi); to a density in
    // v (cm/s) multiply by dk/dv = mt * 1e4.
    let to_v_density = dx * dx / (2.0 * std::f64::consts::PI) * mt * 1e4;

    let mut points: Vec<(f64, f64)> = spectrum
        .iter()
        .zip(&ks)
        .map(|(c, k)| {
            let v = constants.wavenumber_to_velocity(*k);
            (v, c.norm_sqr() * to_v_density)
        })
        .collect();
    // fftshift: negative velocities first.
    points.rotate_left(n / 2);
    MomentumDistribution { points }
}
