//! Gross-Pitaevskii ground state by imaginary-time split-step propagation.
//!
//! The trap-frame Hamiltonian over hbar is
//! `-(1/2 mt) d^2/dx^2 + (mt omega_x^2 / 2) x^2 + g |psi|^2` with
//! `g = 2 N a omega_yz`. Each Strang step damps high modes, the state is
//! renormalized, and the run stops when the energy functional stalls.

use num_complex::Complex64;

use super::fft::FftPair;
use super::{CondensateParams, Grid, WaveFunction, WavepacketError};
use crate::constants::PhysicalConstants;
use crate::parallel;

/// Imaginary-time step stages, s. Later stages shrink the splitting bias
/// below the 1e-6 relative energy target for the linear case.
const STAGES: [f64; 3] = [2e-3, 5e-4, 5e-5];

/// Stop a stage when the relative energy change per step falls below this.
const ENERGY_TOL_PER_STEP: f64 = 1e-12;

const ENERGY_CHECK_EVERY: usize = 10;
const MAX_TOTAL_STEPS: usize = 400_000;

/// Ground state, normalized to 1 and centered on the trap at x = 0.
pub fn ground_state(
    params: &CondensateParams,
    constants: &PhysicalConstants,
    grid: &Grid,
) -> Result<WaveFunction, WavepacketError> {
    ground_state_traced(params, constants, grid).map(|(psi, _)| psi)
}

/// Same as [`ground_state`], also returning the energy after every
/// accepted step (monotonically decreasing along the imaginary-time flow).
pub fn ground_state_traced(
    params: &CondensateParams,
    constants: &PhysicalConstants,
    grid: &Grid,
) -> Result<(WaveFunction, Vec<f64>), WavepacketError> {
    params.validate()?;
    let mt = constants.mass_per_hbar();
    let g = params.g_over_hbar();
    let dx = grid.dx();
    let n = grid.n();

    let xs = grid.positions();
    let trap: Vec<f64> = xs
        .iter()
        .map(|x| 0.5 * mt * params.omega_x * params.omega_x * x * x)
        .collect();
    let kinetic: Vec<f64> = grid
        .wavenumbers()
        .iter()
        .map(|k| k * k / (2.0 * mt))
        .collect();

    // Harmonic-oscillator Gaussian as the initial guess.
    let a_ho = 1.0 / (mt * params.omega_x).sqrt();
    let mut psi = WaveFunction {
        grid: *grid,
        values: xs
            .iter()
            .map(|x| Complex64::from((-x * x / (2.0 * a_ho * a_ho)).exp()))
            .collect(),
        time: 0.0,
    };
    psi.normalize();

    let mut fft = FftPair::new(n);
    let mut energies = Vec::new();
    let mut total_steps = 0usize;
    let mut energy = energy_functional(&psi, &trap, &kinetic, g, dx, &mut fft);
    energies.push(energy);

    for &dtau in &STAGES {
        let kin_full: Vec<f64> = kinetic.iter().map(|t| (-dtau * t).exp()).collect();
        loop {
            for _ in 0..ENERGY_CHECK_EVERY {
                strang_step(&mut psi, &trap, &kin_full, g, dtau, &mut fft);
                psi.normalize();
                total_steps += 1;
            }
            let new_energy = energy_functional(&psi, &trap, &kinetic, g, dx, &mut fft);
            energies.push(new_energy);
            let per_step =
                (new_energy - energy).abs() / (ENERGY_CHECK_EVERY as f64 * new_energy.abs());
            energy = new_energy;
            if per_step < ENERGY_TOL_PER_STEP {
                break;
            }
            if total_steps >= MAX_TOTAL_STEPS {
                return Err(WavepacketError::NoConvergence {
                    steps: total_steps,
                    energy,
                });
            }
        }
    }

    let edge = psi
        .values
        .first()
        .unwrap()
        .norm()
        .max(psi.values.last().unwrap().norm());
    if edge > 1e-10 {
        return Err(WavepacketError::InvalidGrid(format!(
            "grid too narrow for the trap state: |psi| = {edge:.2e} at the edge"
        )));
    }
    Ok((psi, energies))
}

/// One Strang step `exp(-dtau V/2) exp(-dtau T) exp(-dtau V/2)` with the
/// instantaneous `|psi|^2` in each potential half-step.
fn strang_step(
    psi: &mut WaveFunction,
    trap: &[f64],
    kin_full: &[f64],
    g: f64,
    dtau: f64,
    fft: &mut FftPair,
) {
    let half = 0.5 * dtau;
    parallel::zip_apply(&mut psi.values, trap, |v, t| {
        *v *= (-half * (t + g * v.norm_sqr())).exp();
    });
    fft.forward(&mut psi.values);
    parallel::zip_apply(&mut psi.values, kin_full, |v, f| *v *= *f);
    fft.inverse(&mut psi.values);
    parallel::zip_apply(&mut psi.values, trap, |v, t| {
        *v *= (-half * (t + g * v.norm_sqr())).exp();
    });
}

/// `E[psi]/hbar = <T> + <V> + (g/2) int |psi|^4`, in 1/s.
pub(crate) fn energy_functional(
    psi: &WaveFunction,
    trap: &[f64],
    kinetic: &[f64],
    g: f64,
    dx: f64,
    fft: &mut FftPair,
) -> f64 {
    let n = psi.values.len() as f64;
    let mut spectrum = psi.values.clone();
    fft.forward(&mut spectrum);
    let t: f64 = spectrum
        .iter()
        .zip(kinetic)
        .map(|(c, t)| t * c.norm_sqr())
        .sum::<f64>()
        * dx
        / n;
    let (v, int): (f64, f64) = psi.values.iter().zip(trap).fold((0.0, 0.0), |acc, (c, tr)| {
        let d = c.norm_sqr();
        (acc.0 + tr * d, acc.1 + d * d)
    });
    t + v * dx + 0.5 * g * int * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn linear_params() -> CondensateParams {
        CondensateParams {
            n_atoms: 0.0,
            scattering_length_m: 2.93e-9,
            omega_x: 5.0,
            omega_yz: 100.0,
            v0: 0.0,
            x_trap: 0.0,
        }
    }

    #[test]
    fn harmonic_ground_state_energy_and_width() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-400.0, 400.0, 4096).unwrap();
        let (psi, energies) =
            ground_state_traced(&linear_params(), &constants, &grid).unwrap();

        // E = hbar omega_x / 2.
        assert_relative_eq!(*energies.last().unwrap(), 2.5, max_relative = 1e-6);
        assert_relative_eq!(psi.norm(), 1.0, max_relative = 1e-10);

        // |psi|^2 variance of the Gaussian ground state: hbar/(2 m omega).
        // The state converges one order slower than the (variational)
        // energy, hence the looser tolerance.
        let mt = constants.mass_per_hbar();
        let dx = grid.dx();
        let var: f64 = psi
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let x = grid.position(j);
                x * x * v.norm_sqr()
            })
            .sum::<f64>()
            * dx;
        assert_relative_eq!(var, 1.0 / (2.0 * mt * 5.0), max_relative = 1e-4);
    }

    #[test]
    fn energy_decreases_monotonically() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-400.0, 400.0, 4096).unwrap();
        let params = CondensateParams {
            n_atoms: 5e4,
            ..linear_params()
        };
        let (_, energies) = ground_state_traced(&params, &constants, &grid).unwrap();
        for w in energies.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-12) + 1e-12,
                "energy rose: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn strong_interaction_approaches_thomas_fermi() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-600.0, 600.0, 8192).unwrap();
        let params = CondensateParams {
            n_atoms: 5e4,
            ..linear_params()
        };
        let psi = ground_state(&params, &constants, &grid).unwrap();

        // Thomas-Fermi oracle: |psi|^2 = (mu - V)/g with mu from the
        // normalization (4/3) mu R / g = 1, R = sqrt(2 mu / (mt wx^2)).
        let mt = constants.mass_per_hbar();
        let g = params.g_over_hbar();
        let wx = params.omega_x;
        let mu = (0.75 * g * wx * mt.sqrt() / 2.0_f64.sqrt()).powf(2.0 / 3.0);
        let radius = (2.0 * mu / (mt * wx * wx)).sqrt();

        // L2 distance over the bulk, relative to the profile's own L2 norm.
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, v) in psi.values.iter().enumerate() {
            let x = grid.position(j);
            if x.abs() < 0.85 * radius {
                let tf = (mu - 0.5 * mt * wx * wx * x * x) / g;
                let diff = v.norm_sqr() - tf;
                num += diff * diff;
                den += tf * tf;
            }
        }
        let l2 = (num / den).sqrt();
        assert!(l2 < 0.05, "bulk L2 distance {l2}");
    }
}
