//! Boost, placement and real-time split-step propagation.

use num_complex::Complex64;

use super::fft::FftPair;
use super::{WaveFunction, WavepacketError, EDGE_DENSITY_LIMIT};
use crate::constants::PhysicalConstants;
use crate::parallel;
use crate::potential::{PotentialSpec, Shape};
use crate::wavepacket::CondensateParams;

/// Steps between norm and edge-density checks during propagation.
const CHECK_EVERY: usize = 512;

/// Norm drift treated as a failure (too large a step or wrap-around).
const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Translate the state to `x_trap` and boost it to `v0`: a spectral shift
/// followed by the plane-wave phase `exp(i x m v0 / hbar)` referenced to
/// the grid origin. The mean momentum afterwards is `m v0 / hbar` exactly
/// up to the spectral content of the state.
pub fn boost_and_place(
    psi: &WaveFunction,
    v0_cm_per_s: f64,
    x_trap_um: f64,
    constants: &PhysicalConstants,
) -> Result<WaveFunction, WavepacketError> {
    let grid = psi.grid;
    let mut out = psi.clone();
    let mut fft = FftPair::new(grid.n());

    // psi(x - x_trap) via the shift theorem.
    let ks = grid.wavenumbers();
    fft.forward(&mut out.values);
    parallel::zip_apply(&mut out.values, &ks, |v, k| {
        *v *= Complex64::from_polar(1.0, -k * x_trap_um);
    });
    fft.inverse(&mut out.values);

    let edge = out.edge_density();
    if edge > EDGE_DENSITY_LIMIT {
        return Err(WavepacketError::TranslationOutOfGrid { density: edge });
    }

    let k0 = constants.velocity_to_wavenumber(v0_cm_per_s);
    let xs = grid.positions();
    parallel::zip_apply(&mut out.values, &xs, |v, x| {
        *v *= Complex64::from_polar(1.0, k0 * x);
    });
    Ok(out)
}

/// Mean momentum `<k>` of the state, 1/um.
pub fn mean_momentum(psi: &WaveFunction) -> f64 {
    let mut spectrum = psi.values.clone();
    let mut fft = FftPair::new(psi.grid.n());
    fft.forward(&mut spectrum);
    let ks = psi.grid.wavenumbers();
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (c, k) in spectrum.iter().zip(&ks) {
        let w = c.norm_sqr();
        weighted += k * w;
        total += w;
    }
    weighted / total
}

/// Propagate through the Gaussian triple potential plus the decaying
/// nonlinearity `V' = g |psi|^2 / (1 + omega_yz^2 t^2)`.
///
/// Symmetric split-step: half a kinetic step, then per step the full
/// potential phase evaluated at the half-step time with the instantaneous
/// `|psi|^2`, then a full kinetic step (halved at the very end). Norm and
/// edge density are checked periodically; the final time is exactly
/// `t_final`.
pub fn propagate(
    psi: &WaveFunction,
    spec: &PotentialSpec,
    params: &CondensateParams,
    t_final: f64,
    dt: f64,
) -> Result<WaveFunction, WavepacketError> {
    spec.validate()?;
    if spec.shape != Shape::Gaussian {
        return Err(WavepacketError::ShapeMismatch);
    }
    params.validate()?;
    if !(dt > 0.0) {
        return Err(WavepacketError::InvalidTime("dt must be positive"));
    }
    if t_final < psi.time {
        return Err(WavepacketError::InvalidTime("t_final is before psi.time"));
    }

    let grid = psi.grid;
    let kb = spec.wavenumber_scales().kb;
    if grid.dx() >= 0.25 / kb {
        return Err(WavepacketError::GridTooCoarse {
            dx: grid.dx(),
            kb,
        });
    }

    let span = t_final - psi.time;
    let mut out = psi.clone();
    if span == 0.0 {
        return Ok(out);
    }
    let n_steps = (span / dt).round().max(1.0) as usize;
    let dt = span / n_steps as f64;

    let mt = spec.mass_per_hbar();
    let g = params.g_over_hbar();
    let omega_yz = params.omega_yz;
    let t0 = psi.time;

    let potential: Vec<f64> = grid.positions().iter().map(|x| spec.evaluate(*x)).collect();
    let (kin_full, kin_half): (Vec<Complex64>, Vec<Complex64>) = grid
        .wavenumbers()
        .iter()
        .map(|k| {
            let phase = k * k / (2.0 * mt) * dt;
            (
                Complex64::from_polar(1.0, -phase),
                Complex64::from_polar(1.0, -0.5 * phase),
            )
        })
        .unzip();

    let mut fft = FftPair::new(grid.n());
    let norm0 = out.norm();

    fft.forward(&mut out.values);
    parallel::zip_apply(&mut out.values, &kin_half, |v, f| *v *= *f);

    for step in 0..n_steps {
        fft.inverse(&mut out.values);

        if step % CHECK_EVERY == 0 {
            let drift = (out.norm() - norm0).abs();
            if drift > NORM_DRIFT_LIMIT {
                return Err(WavepacketError::NormDrift { drift });
            }
            let edge = out.edge_density();
            if edge > EDGE_DENSITY_LIMIT {
                return Err(WavepacketError::EdgeLeak { density: edge });
            }
        }

        let t_mid = t0 + (step as f64 + 0.5) * dt;
        let g_t = g / (1.0 + omega_yz * omega_yz * t_mid * t_mid);
        parallel::zip_apply(&mut out.values, &potential, |v, pot| {
            let phase = dt * (pot + g_t * v.norm_sqr());
            *v *= Complex64::from_polar(1.0, -phase);
        });

        fft.forward(&mut out.values);
        let table = if step + 1 == n_steps {
            &kin_half
        } else {
            &kin_full
        };
        parallel::zip_apply(&mut out.values, table, |v, f| *v *= *f);
    }
    fft.inverse(&mut out.values);

    let drift = (out.norm() - norm0).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(WavepacketError::NormDrift { drift });
    }
    let edge = out.edge_density();
    if edge > EDGE_DENSITY_LIMIT {
        return Err(WavepacketError::EdgeLeak { density: edge });
    }

    out.time = t_final;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::{ground_state, Grid};
    use approx::assert_relative_eq;

    fn gaussian_state(grid: Grid, center: f64, width: f64) -> WaveFunction {
        let mut psi = WaveFunction {
            grid,
            values: grid
                .positions()
                .iter()
                .map(|x| Complex64::from((-(x - center).powi(2) / (2.0 * width * width)).exp()))
                .collect(),
            time: 0.0,
        };
        psi.normalize();
        psi
    }

    #[test]
    fn boost_sets_mean_momentum() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-2000.0, 2000.0, 8192).unwrap();
        let psi = gaussian_state(grid, 0.0, 25.0);
        let v0 = 0.0336;
        let boosted = boost_and_place(&psi, v0, -600.0, &constants).unwrap();
        let expected = constants.velocity_to_wavenumber(v0);
        assert_relative_eq!(mean_momentum(&boosted), expected, max_relative = 1e-6);
        assert_relative_eq!(boosted.norm(), 1.0, max_relative = 1e-10);

        // Zero boost leaves the momentum at zero.
        let placed = boost_and_place(&psi, 0.0, -600.0, &constants).unwrap();
        assert!(mean_momentum(&placed).abs() < 1e-12);
    }

    #[test]
    fn double_boost_cancels() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-1500.0, 1500.0, 4096).unwrap();
        let psi = gaussian_state(grid, 0.0, 30.0);
        // Opposite boosts at fixed position cancel exactly.
        let there = boost_and_place(&psi, 0.02, 0.0, &constants).unwrap();
        let back = boost_and_place(&there, -0.02, 0.0, &constants).unwrap();
        for (a, b) in back.values.iter().zip(&psi.values) {
            assert!((a - b).norm() < 1e-12);
        }
        // With translations the inverse composition agrees up to a global
        // phase (translation and boost do not commute).
        let shifted = boost_and_place(&psi, 0.02, 150.0, &constants).unwrap();
        let round = boost_and_place(&shifted, -0.02, -150.0, &constants).unwrap();
        let overlap: Complex64 = round
            .values
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * grid.dx();
        assert!((overlap.norm() - 1.0).abs() < 1e-10, "overlap {overlap}");
    }

    #[test]
    fn translation_out_of_grid_is_caught() {
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-500.0, 500.0, 2048).unwrap();
        let psi = gaussian_state(grid, 0.0, 40.0);
        let err = boost_and_place(&psi, 0.0, 450.0, &constants).unwrap_err();
        assert!(matches!(err, WavepacketError::TranslationOutOfGrid { .. }));
    }

    #[test]
    fn free_packet_advances_ballistically() {
        // Being linear and barrier-free, the mean position moves by v0 t.
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-1000.0, 3000.0, 16384).unwrap();
        let spec = PotentialSpec::gaussian(1e-9, 0.0, 6.0, 2.0)
            .unwrap()
            .with_constants(constants);
        let params = CondensateParams {
            n_atoms: 0.0,
            scattering_length_m: 2.93e-9,
            omega_x: 5.0,
            omega_yz: 100.0,
            v0: 0.05,
            x_trap: -300.0,
        };
        let psi0 = gaussian_state(grid, 0.0, 25.0);
        let boosted = boost_and_place(&psi0, params.v0, params.x_trap, &constants).unwrap();
        let t = 2.0;
        let moved = propagate(&boosted, &spec, &params, t, 1e-3).unwrap();

        let mean_x = |psi: &WaveFunction| -> f64 {
            psi.grid.dx()
                * psi
                    .values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| psi.grid.position(j) * v.norm_sqr())
                    .sum::<f64>()
        };
        let expected = params.x_trap + params.v0 * 1e4 * t;
        assert_relative_eq!(mean_x(&moved), expected, max_relative = 1e-6);
        assert!((moved.norm() - 1.0).abs() < 1e-10);
        assert_eq!(moved.time, t);
    }

    #[test]
    fn propagate_rejects_square_shape_and_bad_times() {
        let grid = Grid::new(-1000.0, 1000.0, 2048).unwrap();
        let psi = gaussian_state(grid, 0.0, 30.0);
        let square = PotentialSpec::square(300.0, 150.0, 5.0).unwrap();
        let params = CondensateParams {
            n_atoms: 0.0,
            scattering_length_m: 2.93e-9,
            omega_x: 5.0,
            omega_yz: 100.0,
            v0: 0.0,
            x_trap: 0.0,
        };
        assert!(matches!(
            propagate(&psi, &square, &params, 1.0, 1e-3),
            Err(WavepacketError::ShapeMismatch)
        ));
        let gauss = PotentialSpec::gaussian(300.0, 150.0, 6.0, 2.0).unwrap();
        assert!(propagate(&psi, &gauss, &params, 1.0, 0.0).is_err());
        assert!(propagate(&psi, &gauss, &params, -1.0, 1e-3).is_err());
    }

    #[test]
    fn trapped_state_stays_normalized_through_barrier() {
        // Short run of the real experiment geometry; norm conserved to 1e-8.
        let constants = PhysicalConstants::sodium();
        let grid = Grid::new(-2000.0, 2000.0, 8192).unwrap();
        let spec = PotentialSpec::gaussian(300.0, 150.0, 6.0, 2.0)
            .unwrap()
            .with_constants(constants);
        let params = CondensateParams {
            n_atoms: 5e4,
            scattering_length_m: 2.93e-9,
            omega_x: 5.0,
            omega_yz: 100.0,
            v0: 0.0336,
            x_trap: -600.0,
        };
        let bare = ground_state(&params, &constants, &grid).unwrap();
        let psi = boost_and_place(&bare, params.v0, params.x_trap, &constants).unwrap();
        let out = propagate(&psi, &spec, &params, 0.2, 1e-4).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-8, "norm = {}", out.norm());
    }
}
