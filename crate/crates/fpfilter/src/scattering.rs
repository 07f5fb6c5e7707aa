//! Transmission amplitude of the triple potential.
//!
//! For the square model the amplitude has a closed form,
//!
//! ```text
//! T(k) = -4 e^{-2idk} k kb^2 kw / D(k)
//! D(k) = e^{id(k-kw)} [i kb (k+kw) C + (k kw - kb^2) S]^2
//!      - e^{id(k+kw)} [-i kb (k-kw) C + (k kw + kb^2) S]^2
//! ```
//!
//! with `C = cosh(d kb)`, `S = sinh(d kb)`, `kw = sqrt(k^2 + Kw^2)`,
//! `kb = sqrt(Kb^2 - k^2)`. The value of `T` does not depend on the branch
//! chosen for either root: flipping `kb` flips both brackets, which are
//! squared, and flipping `kw` swaps the two denominator terms while also
//! flipping the numerator.
//!
//! For arbitrary profiles the stationary equation is integrated from the
//! right edge of the support (pure outgoing wave) to the left edge and the
//! solution decomposed into incident and reflected plane waves.

use num_complex::Complex64;
use std::io::{self, Write};
use thiserror::Error;

use crate::parallel;
use crate::potential::{PotentialSpec, Shape, SpecError};

mod dopri;

/// Relative tolerance of the ODE route; resonance widths in the
/// intermediate regime demand ~1e-8 amplitude accuracy.
const ODE_RTOL: f64 = 1e-11;
const ODE_ATOL: f64 = 1e-13;
const ODE_MAX_STEPS: usize = 2_000_000;

/// `k = 0` is treated as a limit: evaluations at zero velocity use this
/// wavenumber (1/um) instead.
pub const K_ZERO_LIMIT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("operation requires a {expected:?} potential")]
    ShapeMismatch { expected: Shape },
    #[error("invalid potential spec: {0}")]
    Spec(#[from] SpecError),
    #[error("wavenumber must be positive and finite (got {0})")]
    InvalidWavenumber(f64),
    #[error("ODE integrator failed its tolerance near x = {x} um")]
    NonConvergence { x: f64 },
    #[error("invalid velocity window [{v_min}, {v_max}] cm/s with {n} points")]
    InvalidWindow { v_min: f64, v_max: f64, n: usize },
}

/// Complex transmission and reflection amplitudes at a real wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringResult {
    /// Wavenumber, 1/um.
    pub k: f64,
    pub t: Complex64,
    pub r: Complex64,
}

impl ScatteringResult {
    /// `|T|^2`.
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// `|T|^2 + |R|^2`; 1 up to integrator error for equal asymptotic
    /// momenta.
    pub fn flux_sum(&self) -> f64 {
        self.t.norm_sqr() + self.r.norm_sqr()
    }
}

pub(crate) struct SquareParts {
    pub numerator: Complex64,
    pub denominator: Complex64,
}

pub(crate) fn square_parts(spec: &PotentialSpec, k: Complex64) -> SquareParts {
    square_parts_branched(spec, k, false, false)
}

fn square_parts_branched(
    spec: &PotentialSpec,
    k: Complex64,
    flip_kb: bool,
    flip_kw: bool,
) -> SquareParts {
    let scales = spec.wavenumber_scales();
    let i = Complex64::I;
    let d = spec.d;

    let kb2 = Complex64::from(scales.kb * scales.kb) - k * k;
    let kw2 = k * k + scales.kw * scales.kw;
    let mut kb = kb2.sqrt();
    let mut kw = kw2.sqrt();
    if flip_kb {
        kb = -kb;
    }
    if flip_kw {
        kw = -kw;
    }

    let c = (d * kb).cosh();
    let s = (d * kb).sinh();

    let b1 = i * kb * (k + kw) * c + (k * kw - kb2) * s;
    let b2 = -i * kb * (k - kw) * c + (k * kw + kb2) * s;

    let denominator = (i * d * (k - kw)).exp() * b1 * b1 - (i * d * (k + kw)).exp() * b2 * b2;
    let numerator = -4.0 * (-2.0 * i * d * k).exp() * k * kb2 * kw;
    SquareParts {
        numerator,
        denominator,
    }
}

/// Closed-form transmission amplitude of the square model at real or
/// complex `k`. The value at `k = 0` is a limit; see [`K_ZERO_LIMIT`].
pub fn transmission_square(spec: &PotentialSpec, k: Complex64) -> Result<Complex64, ScatteringError> {
    if spec.shape != Shape::Square {
        return Err(ScatteringError::ShapeMismatch {
            expected: Shape::Square,
        });
    }
    spec.validate()?;
    let parts = square_parts(spec, k);
    Ok(parts.numerator / parts.denominator)
}

#[derive(Clone, Copy)]
enum Incidence {
    FromLeft,
    // Exercised by the left-right symmetry tests.
    #[allow(dead_code)]
    FromRight,
}

enum SegmentPotential {
    Constant(f64),
    Profile,
}

/// Transmission and reflection at real `k > 0` by integrating the
/// stationary equation across the potential support.
pub fn transmission_numeric(
    spec: &PotentialSpec,
    k: f64,
) -> Result<ScatteringResult, ScatteringError> {
    transmission_numeric_directed(spec, k, Incidence::FromLeft)
}

fn transmission_numeric_directed(
    spec: &PotentialSpec,
    k: f64,
    incidence: Incidence,
) -> Result<ScatteringResult, ScatteringError> {
    spec.validate()?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(ScatteringError::InvalidWavenumber(k));
    }

    let mt = spec.mass_per_hbar();
    let kk = k * k;
    let half = spec.support_half_width();
    let i = Complex64::I;

    // Segments ordered along the integration direction; the square profile
    // is split at its jumps and each piece carries its interior value so
    // that no Runge-Kutta stage samples the (measure-zero) boundary points.
    let mut segments: Vec<(f64, f64, SegmentPotential)> = match spec.shape {
        Shape::Square => {
            let ub = 2.0 * mt * spec.vb_over_hbar;
            let uw = -2.0 * mt * spec.vw_over_hbar;
            let d = spec.d;
            vec![
                (1.5 * d, 0.5 * d, SegmentPotential::Constant(ub)),
                (0.5 * d, -0.5 * d, SegmentPotential::Constant(uw)),
                (-0.5 * d, -1.5 * d, SegmentPotential::Constant(ub)),
            ]
        }
        Shape::Gaussian => vec![(half, -half, SegmentPotential::Profile)],
    };

    let (x_start, x_end) = match incidence {
        Incidence::FromLeft => (half, -half),
        Incidence::FromRight => {
            segments.reverse();
            for seg in &mut segments {
                std::mem::swap(&mut seg.0, &mut seg.1);
            }
            (-half, half)
        }
    };

    // Outgoing plane wave on the far side of the incidence direction.
    let outgoing_k = match incidence {
        Incidence::FromLeft => k,
        Incidence::FromRight => -k,
    };
    let phase = (i * outgoing_k * x_start).exp();
    let mut y = [phase, i * outgoing_k * phase];

    for (xa, xb, seg) in segments {
        let step = match seg {
            SegmentPotential::Constant(u) => dopri::integrate(
                |_, y: &[Complex64; 2]| [y[1], (u - kk) * y[0]],
                xa,
                xb,
                y,
                ODE_RTOL,
                ODE_ATOL,
                ODE_MAX_STEPS,
            ),
            SegmentPotential::Profile => dopri::integrate(
                |x, y: &[Complex64; 2]| [y[1], (2.0 * mt * spec.evaluate(x) - kk) * y[0]],
                xa,
                xb,
                y,
                ODE_RTOL,
                ODE_ATOL,
                ODE_MAX_STEPS,
            ),
        };
        y = step.map_err(|e| ScatteringError::NonConvergence { x: e.x })?;
    }

    // Decompose into incident and reflected plane waves at the far edge.
    let ik = i * outgoing_k;
    let incident = 0.5 * (y[0] + y[1] / ik) * (-ik * x_end).exp();
    let reflected = 0.5 * (y[0] - y[1] / ik) * (ik * x_end).exp();
    Ok(ScatteringResult {
        k,
        t: 1.0 / incident,
        r: reflected / incident,
    })
}

/// `|T|^2` at a velocity in cm/s, using the closed form for square specs
/// and the ODE route otherwise. `v = 0` evaluates at the `k -> 0` limit.
pub fn transmittance_at(spec: &PotentialSpec, v_cm_per_s: f64) -> Result<f64, ScatteringError> {
    let k = spec
        .constants
        .velocity_to_wavenumber(v_cm_per_s)
        .max(K_ZERO_LIMIT);
    match spec.shape {
        Shape::Square => Ok(transmission_square(spec, Complex64::from(k))?.norm_sqr()),
        Shape::Gaussian => Ok(transmission_numeric(spec, k)?.transmittance()),
    }
}

/// `|T|^2` sampled on a uniform velocity grid.
#[derive(Debug, Clone)]
pub struct TransmittanceCurve {
    pub spec: PotentialSpec,
    /// `(v in cm/s, |T|^2)`, velocities strictly increasing.
    pub points: Vec<(f64, f64)>,
}

impl TransmittanceCurve {
    /// CSV with header `v_cm_per_s,transmittance`, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "v_cm_per_s,transmittance")?;
        for (v, t) in &self.points {
            writeln!(w, "{v:.11e},{t:.11e}")?;
        }
        Ok(())
    }
}

/// Sample the transmittance on `n` velocities uniformly spanning
/// `[v_min, v_max]` cm/s. Grid points evaluate independently and may run
/// in parallel; the output order is fixed by the grid.
pub fn transmittance_curve(
    spec: &PotentialSpec,
    v_min: f64,
    v_max: f64,
    n: usize,
) -> Result<TransmittanceCurve, ScatteringError> {
    spec.validate()?;
    if !(v_min >= 0.0 && v_max > v_min && v_min.is_finite() && v_max.is_finite()) || n < 2 {
        return Err(ScatteringError::InvalidWindow { v_min, v_max, n });
    }
    let dv = (v_max - v_min) / (n - 1) as f64;
    let velocities: Vec<f64> = (0..n).map(|j| v_min + j as f64 * dv).collect();
    let values = parallel::map_collect(&velocities, |v| transmittance_at(spec, *v));
    let mut points = Vec::with_capacity(n);
    for (v, value) in velocities.iter().zip(values) {
        points.push((*v, value?));
    }
    Ok(TransmittanceCurve {
        spec: *spec,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poles;
    use approx::assert_relative_eq;

    fn square_spec() -> PotentialSpec {
        PotentialSpec::square(300.0, 150.0, 5.0).unwrap()
    }

    #[test]
    fn free_particle_is_transparent() {
        for spec in [
            PotentialSpec::square(1e-12, 0.0, 5.0).unwrap(),
            PotentialSpec::gaussian(1e-12, 0.0, 6.0, 2.0).unwrap(),
        ] {
            let r = transmission_numeric(&spec, 0.2).unwrap();
            assert!((r.t - 1.0).norm() < 1e-6);
            assert!(r.r.norm() < 1e-6);
        }
    }

    #[test]
    fn numeric_matches_closed_form_on_square() {
        let spec = square_spec();
        let kb = spec.wavenumber_scales().kb;
        for frac in [0.05, 0.3, 0.55, 0.8, 0.95] {
            let k = frac * kb;
            let exact = transmission_square(&spec, Complex64::from(k)).unwrap();
            let numeric = transmission_numeric(&spec, k).unwrap().t;
            assert!(
                (exact - numeric).norm() < 1e-8,
                "k = {k}: {exact} vs {numeric}"
            );
        }
    }

    #[test]
    fn unitarity_numeric() {
        let spec = square_spec();
        for k in [0.05, 0.21, 0.33, 0.44] {
            let r = transmission_numeric(&spec, k).unwrap();
            assert!((r.flux_sum() - 1.0).abs() < 1e-9, "k = {k}");
        }
        let gauss = PotentialSpec::gaussian(300.0, 180.0, 6.0, 2.0).unwrap();
        for k in [0.04, 0.16, 0.35] {
            let r = transmission_numeric(&gauss, k).unwrap();
            assert!((r.flux_sum() - 1.0).abs() < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn branch_choice_does_not_matter() {
        let spec = square_spec();
        for k in [
            Complex64::new(0.2, 0.0),
            Complex64::new(0.31, -0.02),
            Complex64::new(-0.1, -0.4),
            Complex64::new(0.0, 0.17),
        ] {
            let base = square_parts_branched(&spec, k, false, false);
            let t0 = base.numerator / base.denominator;
            for (fb, fw) in [(true, false), (false, true), (true, true)] {
                let alt = square_parts_branched(&spec, k, fb, fw);
                let t1 = alt.numerator / alt.denominator;
                assert!((t0 - t1).norm() <= 1e-12 * t0.norm().max(1.0), "{k}");
            }
        }
    }

    #[test]
    fn left_and_right_incidence_agree() {
        for spec in [square_spec(), PotentialSpec::gaussian(250.0, 120.0, 6.0, 2.0).unwrap()] {
            for k in [0.08, 0.25, 0.4] {
                let left = transmission_numeric_directed(&spec, k, Incidence::FromLeft).unwrap();
                let right = transmission_numeric_directed(&spec, k, Incidence::FromRight).unwrap();
                assert!(
                    (left.t - right.t).norm() < 1e-9,
                    "k = {k}: {} vs {}",
                    left.t,
                    right.t
                );
            }
        }
    }

    #[test]
    fn transmittance_vanishes_quadratically_at_origin() {
        // Generic well depth: |T|^2 ~ k^2, so |T|^2/k^2 tends to a constant.
        let spec = square_spec();
        let ratio = |k: f64| {
            transmission_square(&spec, Complex64::from(k))
                .unwrap()
                .norm_sqr()
                / (k * k)
        };
        let r3 = ratio(1e-3);
        let r4 = ratio(1e-4);
        let r5 = ratio(1e-5);
        assert_relative_eq!(r3, r4, max_relative = 0.01);
        assert_relative_eq!(r4, r5, max_relative = 0.01);
    }

    #[test]
    fn transmittance_reaches_one_at_threshold_depth() {
        let template = PotentialSpec::square(400.0, 1.0, 5.0).unwrap();
        let thres = poles::threshold_depth(&template).unwrap();
        let spec = template.with_well_depth(thres.vw_thres);
        let t = transmission_square(&spec, Complex64::from(1e-6))
            .unwrap()
            .norm_sqr();
        assert!(t > 0.999, "|T|^2 = {t}");
    }

    #[test]
    fn denominator_reflection_symmetry() {
        // Schwarz reflection of the real-analytic family: zeros come in
        // pairs (k, -conj k). For the braced factor itself the reflection
        // carries a sign: D(-conj k) = -conj(D(k)), because the k_w-odd
        // numerator absorbs the other sign.
        let spec = square_spec();
        for k in [
            Complex64::new(0.3, -0.05),
            Complex64::new(-0.12, -0.33),
            Complex64::new(0.02, 0.14),
        ] {
            let d = square_parts(&spec, k).denominator;
            let d_ref = square_parts(&spec, -k.conj()).denominator;
            assert!((d_ref + d.conj()).norm() < 1e-12 * d.norm());
            // T itself obeys the plain symmetry.
            let t = transmission_square(&spec, k).unwrap();
            let t_ref = transmission_square(&spec, -k.conj()).unwrap();
            assert!((t_ref - t.conj()).norm() < 1e-12 * t.norm().max(1e-30));
        }
    }

    #[test]
    fn curve_matches_pointwise_closed_form() {
        let spec = square_spec();
        let curve = transmittance_curve(&spec, 0.01, 0.09, 33).unwrap();
        assert_eq!(curve.points.len(), 33);
        for (v, t) in &curve.points {
            let k = spec.constants.velocity_to_wavenumber(*v);
            let direct = transmission_square(&spec, Complex64::from(k))
                .unwrap()
                .norm_sqr();
            assert_eq!(*t, direct);
            assert!(*t >= 0.0 && *t <= 1.0 + 1e-9);
        }
        let vs: Vec<f64> = curve.points.iter().map(|p| p.0).collect();
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn curve_near_origin_is_suppressed() {
        // First grid value at v = 1e-5 cm/s for a generic depth.
        let spec = square_spec();
        let curve = transmittance_curve(&spec, 1e-5, 0.05, 64).unwrap();
        assert!(curve.points[0].1 < 1e-4, "got {}", curve.points[0].1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = square_spec();
        let gauss = PotentialSpec::gaussian(300.0, 0.0, 6.0, 2.0).unwrap();
        assert!(matches!(
            transmission_square(&gauss, Complex64::from(0.1)),
            Err(ScatteringError::ShapeMismatch { .. })
        ));
        assert!(transmission_numeric(&spec, 0.0).is_err());
        assert!(transmission_numeric(&spec, -0.3).is_err());
        assert!(transmittance_curve(&spec, 0.05, 0.01, 10).is_err());
        assert!(transmittance_curve(&spec, 0.0, 0.1, 1).is_err());
    }

    #[test]
    fn csv_has_header_and_12_digits() {
        let spec = square_spec();
        let curve = transmittance_curve(&spec, 0.01, 0.02, 3).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "v_cm_per_s,transmittance");
        let first = lines.next().unwrap();
        assert!(first.starts_with("1.00000000000e-2,"), "{first}");
    }
}
