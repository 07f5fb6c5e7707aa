//! Complex-momentum poles of the square-model transmission.
//!
//! The poles are the zeros of the braced denominator of the closed-form
//! amplitude. The first symmetric resonance sits in the fourth quadrant at
//! `k1`, accompanied by an antiresonance at `k2 = -conj(k1)`. Deepening the
//! well drives the pair onto the negative imaginary axis (collision at
//! depth `vw_coll`, position `-i kappa_coll`), after which two virtual
//! poles separate along the axis until the upper one reaches the origin at
//! the threshold depth `vw_thres` and becomes a bound state. Near the
//! collision the motion follows
//!
//! ```text
//! k_{1,2} = -i kappa_coll +- i gamma (Vw - Vw_coll)^{1/2}
//! ```
//!
//! so `kappa_thres ~ 2 kappa_coll`. For `k/Kb` small the denominator
//! reduces to the quadratic `a2 chi^2 + 2i a1 chi - a0 = 0` whose
//! coefficients are elementary in `Kb`, `Kw` and `d`; `a0 = 0` is the
//! threshold condition and the partner root gives
//! `kappa_thres = 2 Kb a1/a2`.

use num_complex::Complex64;
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

use crate::potential::{PotentialSpec, Shape, SpecError};
use crate::resonance::{self, ResonanceError};
use crate::scattering::square_parts;

/// A pole is "on the axis" when |Re k| is below this (1/um).
const AXIS_EPS: f64 = 1e-10;

/// Newton convergence: |dk| below this (1/um).
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 100;

/// Radius of the probe circle used to set the scale for the pole residual
/// test.
const RESIDUAL_CIRCLE: f64 = 1e-3;
const RESIDUAL_REL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PoleError {
    #[error("operation requires a square potential")]
    ShapeMismatch,
    #[error("invalid potential spec: {0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    InvalidInput(&'static str),
    #[error("Newton iteration did not converge after {iters} steps (last k = {k})")]
    NoConvergence { iters: usize, k: Complex64 },
    #[error("root {root} escaped the basin of seed {seed}")]
    ConvergedElsewhere { seed: Complex64, root: Complex64 },
    #[error("pole tracking lost at depth {vw} 1/s")]
    TrackingLost { vw: f64 },
    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },
    #[error("pole on the real axis at k = {k} 1/um")]
    PoleOnRealAxis { k: f64 },
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleClass {
    /// Fourth quadrant of the momentum plane.
    Resonance,
    /// Third quadrant, mirror of a resonance.
    Antiresonance,
    /// Negative imaginary axis.
    Virtual,
    /// Positive imaginary axis.
    Bound,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Pole {
    pub k: Complex64,
    pub class: PoleClass,
}

fn classify(k: Complex64) -> PoleClass {
    if k.re.abs() < AXIS_EPS {
        if k.im >= 0.0 {
            PoleClass::Bound
        } else {
            PoleClass::Virtual
        }
    } else if k.re > 0.0 {
        PoleClass::Resonance
    } else {
        PoleClass::Antiresonance
    }
}

fn require_square(spec: &PotentialSpec) -> Result<(), PoleError> {
    spec.validate()?;
    if spec.shape != Shape::Square {
        return Err(PoleError::ShapeMismatch);
    }
    Ok(())
}

/// The braced factor of the closed-form amplitude, analytic in `k`.
pub fn denominator(spec: &PotentialSpec, k: Complex64) -> Result<Complex64, PoleError> {
    require_square(spec)?;
    Ok(square_parts(spec, k).denominator)
}

fn den(spec: &PotentialSpec, k: Complex64) -> Complex64 {
    square_parts(spec, k).denominator
}

/// Largest |denominator| on a small circle around `k`; the local scale
/// against which a pole residual is judged.
fn residual_scale(spec: &PotentialSpec, k: Complex64) -> f64 {
    (0..16)
        .map(|j| {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
            let probe = k + RESIDUAL_CIRCLE * Complex64::new(phi.cos(), phi.sin());
            den(spec, probe).norm()
        })
        .fold(0.0, f64::max)
}

fn newton(spec: &PotentialSpec, seed: Complex64) -> Result<Complex64, PoleError> {
    let mut k = seed;
    for _ in 0..NEWTON_MAX_ITERS {
        let h = 1e-7 * k.norm().max(1.0);
        let f = den(spec, k);
        let df = (den(spec, k + h) - den(spec, k - h)) / (2.0 * h);
        let dk = f / df;
        k -= dk;
        if dk.norm() < NEWTON_TOL {
            return Ok(k);
        }
    }
    Err(PoleError::NoConvergence {
        iters: NEWTON_MAX_ITERS,
        k,
    })
}

/// Polish a seed into a pole by Newton iteration on the denominator with a
/// finite-difference derivative. The converged root must stay within the
/// seed's basin and beat the local residual scale.
pub fn find_pole(spec: &PotentialSpec, seed: Complex64) -> Result<Pole, PoleError> {
    require_square(spec)?;
    let root = newton(spec, seed)?;
    if (root - seed).norm() > 10.0 * seed.norm().max(1e-4) {
        return Err(PoleError::ConvergedElsewhere { seed, root });
    }
    let scale = residual_scale(spec, root);
    if !(den(spec, root).norm() < RESIDUAL_REL * scale) {
        return Err(PoleError::NoConvergence {
            iters: NEWTON_MAX_ITERS,
            k: root,
        });
    }
    Ok(Pole {
        k: root,
        class: classify(root),
    })
}

/// Coefficients of the small-`chi` quadratic `a2 chi^2 + 2i a1 chi - a0 = 0`
/// (`chi = k/Kb`) and its two roots.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallKCoefficients {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub chi1: Complex64,
    pub chi2: Complex64,
}

fn quad_coefficients(kb: f64, kw: f64, d: f64) -> (f64, f64, f64) {
    let x = d * kb;
    let w = d * kw;
    let coth = 1.0 / x.tanh();
    let s = x.sinh();
    let s2 = s * s; // may overflow to inf for very opaque barriers; the
                    // 1/s2 terms then underflow to zero instead of NaN
    let a0 = (0.5 * w).cos() / (0.5 * w).sin() - (kw / kb) * coth;
    let a1 = kw / (2.0 * kb * s2);
    let half_sin = (0.5 * w).sin();
    let first = kb * kb * (w + w.sin()) / (4.0 * kw * kw * half_sin * half_sin);
    // (coth(x)(cosh^2 x - 3) + x)/sinh^2 x == coth(x)(1 - 2/sinh^2 x) + x/sinh^2 x
    let second = kw / (2.0 * kb) * (coth * (1.0 - 2.0 / s2) + x / s2);
    (a0, a1, first + second)
}

/// Quadratic approximation of the two near-origin poles. Requires a
/// genuine well (`Vw > 0`); pole positions in the k plane are `chi * Kb`.
pub fn small_k_poles(spec: &PotentialSpec) -> Result<SmallKCoefficients, PoleError> {
    require_square(spec)?;
    if spec.vw_over_hbar <= 0.0 {
        return Err(PoleError::InvalidInput(
            "small-k expansion requires a positive well depth",
        ));
    }
    let scales = spec.wavenumber_scales();
    let (a0, a1, a2) = quad_coefficients(scales.kb, scales.kw, spec.d);
    let disc = Complex64::from(a0 * a2 - a1 * a1).sqrt();
    let chi1 = (-Complex64::I * a1 + disc) / a2;
    let chi2 = (-Complex64::I * a1 - disc) / a2;
    Ok(SmallKCoefficients {
        alpha0: a0,
        alpha1: a1,
        alpha2: a2,
        chi1,
        chi2,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdDepth {
    /// Depth at which a zero of the denominator reaches k = 0, 1/s.
    pub vw_thres: f64,
    /// Position of the partner pole there, `2 Kb a1/a2`, 1/um.
    pub kappa_thres: f64,
    /// Minimal velocity width `hbar kappa_thres / m`, cm/s.
    pub delta_v_thres: f64,
}

/// Solve `a0(Kw) = 0` for the first positive root. `a0` is strictly
/// decreasing on `d Kw/2 in (0, pi)`, so bracketed bisection is safe.
pub fn threshold_depth(template: &PotentialSpec) -> Result<ThresholdDepth, PoleError> {
    require_square(template)?;
    let scales = template.wavenumber_scales();
    let kb = scales.kb;
    let d = template.d;
    let coth = 1.0 / (d * kb).tanh();
    let a0 = |kw: f64| {
        let half = 0.5 * d * kw;
        half.cos() / half.sin() - (kw / kb) * coth
    };

    let mut lo = 1e-12 / d;
    let mut hi = (2.0 * std::f64::consts::PI / d) * (1.0 - 1e-12);
    debug_assert!(a0(lo) > 0.0 && a0(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if a0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kw_thres = 0.5 * (lo + hi);

    let mt = template.mass_per_hbar();
    let vw_thres = kw_thres * kw_thres / (2.0 * mt);
    let (_, a1, a2) = quad_coefficients(kb, kw_thres, d);
    let kappa_thres = 2.0 * kb * a1 / a2;
    Ok(ThresholdDepth {
        vw_thres,
        kappa_thres,
        delta_v_thres: template.constants.wavenumber_to_velocity(kappa_thres),
    })
}

/// `|T|^2` of the two-pole S-matrix model,
/// `|T|^2 = 1/4 |1 - (k-k1*)(k-k2*)/((k-k1)(k-k2))|^2`; the common cut-off
/// phase cancels in the modulus.
pub fn two_pole_transmittance(k1: Complex64, k2: Complex64, k: f64) -> Result<f64, PoleError> {
    for pole in [k1, k2] {
        if pole.im == 0.0 && k == pole.re {
            return Err(PoleError::PoleOnRealAxis { k });
        }
    }
    let kk = Complex64::from(k);
    let ratio = ((kk - k1.conj()) * (kk - k2.conj())) / ((kk - k1) * (kk - k2));
    Ok(0.25 * (Complex64::from(1.0) - ratio).norm_sqr())
}

/// One-pole version of [`two_pole_transmittance`], keeping only `k1`.
pub fn one_pole_transmittance(k1: Complex64, k: f64) -> Result<f64, PoleError> {
    if k1.im == 0.0 && k == k1.re {
        return Err(PoleError::PoleOnRealAxis { k });
    }
    let kk = Complex64::from(k);
    let ratio = (kk - k1.conj()) / (kk - k1);
    Ok(0.25 * (Complex64::from(1.0) - ratio).norm_sqr())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryPoint {
    /// Well depth over hbar, 1/s.
    pub vw: f64,
    pub k1: Complex64,
    pub k2: Complex64,
}

/// The pole pair tracked over a well-depth range, with the collision and
/// threshold landmarks when the range crosses them.
#[derive(Debug, Clone)]
pub struct PoleTrajectory {
    pub points: Vec<TrajectoryPoint>,
    pub vw_coll: Option<f64>,
    pub kappa_coll: Option<f64>,
    pub vw_thres: Option<f64>,
    pub kappa_thres: Option<f64>,
    /// Square-root coefficient of the collision expansion, fitted from the
    /// virtual-regime samples.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectorySummary {
    pub vw_coll: Option<f64>,
    pub kappa_coll: Option<f64>,
    pub vw_thres: Option<f64>,
    pub kappa_thres: Option<f64>,
    pub gamma: Option<f64>,
}

impl PoleTrajectory {
    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            vw_coll: self.vw_coll,
            kappa_coll: self.kappa_coll,
            vw_thres: self.vw_thres,
            kappa_thres: self.kappa_thres,
            gamma: self.gamma,
        }
    }

    /// CSV with one row per tracked depth, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "vw_over_hbar_per_s,re_k1,im_k1,re_k2,im_k2")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                p.vw, p.k1.re, p.k1.im, p.k2.re, p.k2.im
            )?;
        }
        Ok(())
    }
}

/// Step control for [`track_poles`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// First continuation step in depth, 1/s. Defaults to 1/200 of the
    /// range.
    pub initial_step: Option<f64>,
    /// Smallest step before the tracker gives up, 1/s.
    pub min_step: f64,
    /// Largest allowed |dk| between steps relative to |k|; exceeding it
    /// halves the step.
    pub max_rel_jump: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            initial_step: None,
            min_step: 1e-9,
            max_rel_jump: 0.05,
        }
    }
}

/// Both axis roots of the denominator restricted to the imaginary axis.
/// There `D(iy)` is purely imaginary, so the roots of `Im D(iy)` are the
/// poles. Scans `[y_lo, y_hi]` and bisects every sign change.
fn axis_roots(spec: &PotentialSpec, y_lo: f64, y_hi: f64, n_scan: usize) -> Vec<f64> {
    let g = |y: f64| den(spec, Complex64::new(0.0, y)).im;
    let dy = (y_hi - y_lo) / (n_scan - 1) as f64;
    let mut roots = Vec::new();
    let mut prev_y = y_lo;
    let mut prev_g = g(prev_y);
    for j in 1..n_scan {
        let y = y_lo + j as f64 * dy;
        let gy = g(y);
        if prev_g == 0.0 {
            roots.push(prev_y);
        } else if (prev_g > 0.0) != (gy > 0.0) {
            let (mut a, mut b, mut ga) = (prev_y, y, prev_g);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let gm = g(mid);
                if (gm > 0.0) == (ga > 0.0) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_y = y;
        prev_g = gy;
    }
    roots
}

/// The two near-origin axis poles (upper, lower) at a depth in the virtual
/// or bound regime, scanned around `center` (roughly their midpoint, which
/// stays near `-kappa_coll`) with half-width `width`.
fn axis_pole_pair(spec: &PotentialSpec, center: f64, width: f64) -> Result<(f64, f64), PoleError> {
    let roots = axis_roots(spec, center - width, center + width, 2001);
    if roots.len() < 2 {
        return Err(PoleError::TrackingLost {
            vw: spec.vw_over_hbar,
        });
    }
    // The relevant pair brackets the center most closely.
    let mut best: Option<(f64, f64)> = None;
    for pair in roots.windows(2) {
        let spread = (pair[0] - center).abs() + (pair[1] - center).abs();
        if best.is_none_or(|(a, b)| spread < (a - center).abs() + (b - center).abs()) {
            best = Some((pair[0], pair[1]));
        }
    }
    let (lower, upper) = best.unwrap();
    Ok((upper, lower))
}

/// Track the symmetric resonance pole (and its mirror antiresonance)
/// through increasing well depth: predictor-corrector continuation in the
/// Breit-Wigner regime, a bisection for the depth where `Re k1` reaches the
/// axis (the pole collision), axis tracking of the two virtual poles with
/// the depth reparameterized as `vw_coll + s^2`, and a bisection for the
/// threshold depth where the upper pole crosses k = 0.
pub fn track_poles(
    template: &PotentialSpec,
    vw_start: f64,
    vw_end: f64,
    ctrl: StepControl,
) -> Result<PoleTrajectory, PoleError> {
    require_square(template)?;
    if !(vw_start > 0.0 && vw_end > vw_start) {
        return Err(PoleError::InvalidInput(
            "tracking range must satisfy 0 < vw_start < vw_end",
        ));
    }
    let spec_at = |vw: f64| template.with_well_depth(vw);

    // Seed in the BW regime: the quadratic roots when the resonance is
    // near the origin, otherwise the Breit-Wigner estimate off the peak.
    let first_spec = spec_at(vw_start);
    let quad = small_k_poles(&first_spec)?;
    let kb = first_spec.wavenumber_scales().kb;
    let seed = if quad.chi1.norm() < 0.2 && quad.chi1.re > 0.0 {
        quad.chi1 * kb
    } else {
        let mt = first_spec.mass_per_hbar();
        let peak = resonance::first_peak(&first_spec)?;
        Complex64::new(
            mt * peak.v_r * 1e4,
            -0.5 * mt * peak.delta_v_r * 1e4,
        )
    };
    let first = find_pole(&first_spec, seed)?;
    if first.class != PoleClass::Resonance {
        return Err(PoleError::TrackingLost { vw: vw_start });
    }

    let mut points = vec![TrajectoryPoint {
        vw: vw_start,
        k1: first.k,
        k2: -first.k.conj(),
    }];

    // Breit-Wigner continuation until the pole lands on the axis.
    let mut vw = vw_start;
    let mut k1 = first.k;
    let mut slope: Option<Complex64> = None;
    let mut dvw = ctrl
        .initial_step
        .unwrap_or((vw_end - vw_start) / 200.0)
        .max(ctrl.min_step);
    let mut bracket: Option<(f64, Complex64, f64)> = None;

    'march: loop {
        if vw >= vw_end {
            break;
        }
        let target = (vw + dvw).min(vw_end);
        let pred = k1 + slope.unwrap_or_default() * (target - vw);
        match newton(&spec_at(target), pred) {
            Ok(k_new) if (k_new - k1).norm() <= ctrl.max_rel_jump * k1.norm() => {
                if k_new.re.abs() < AXIS_EPS {
                    bracket = Some((vw, k1, target));
                    break 'march;
                }
                slope = Some((k_new - k1) / (target - vw));
                if (k_new - k1).norm() < 0.4 * ctrl.max_rel_jump * k1.norm() {
                    dvw *= 1.4;
                }
                vw = target;
                k1 = k_new;
                points.push(TrajectoryPoint {
                    vw,
                    k1,
                    k2: -k1.conj(),
                });
            }
            _ => {
                dvw *= 0.5;
                if dvw < ctrl.min_step {
                    // Stalled against the collision: probe just ahead.
                    let probe_vw = (vw + 1e-6_f64.max(4.0 * ctrl.min_step)).min(vw_end);
                    match newton(&spec_at(probe_vw), k1) {
                        Ok(k_probe) if k_probe.re.abs() < AXIS_EPS => {
                            bracket = Some((vw, k1, probe_vw));
                            break 'march;
                        }
                        _ => return Err(PoleError::TrackingLost { vw }),
                    }
                }
            }
        }
    }

    let Some((mut lo, mut k_lo, mut hi)) = bracket else {
        // The range ended inside the BW regime.
        return Ok(PoleTrajectory {
            points,
            vw_coll: None,
            kappa_coll: None,
            vw_thres: None,
            kappa_thres: None,
            gamma: None,
        });
    };

    // Collision depth: bisection on "the continued pole sits on the axis".
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        match newton(&spec_at(mid), k_lo) {
            Ok(k_mid) if k_mid.re.abs() < AXIS_EPS => hi = mid,
            Ok(k_mid) => {
                lo = mid;
                k_lo = k_mid;
            }
            Err(_) => {
                // Exactly at the double root Newton may wander; shrink from
                // the known-good side instead.
                hi = mid;
            }
        }
    }
    let vw_coll = 0.5 * (lo + hi);
    let kappa_ref = -k_lo.im;

    // The threshold condition a0 = 0 is exact for the symmetric family;
    // use it to scale the virtual-regime sampling.
    let thres_est = threshold_depth(template)?.vw_thres;
    let gap = (thres_est - vw_coll).max(20.0 * 1e-6);

    // kappa_coll: the mean of the two axis roots just past the collision
    // cancels the +-gamma sqrt(dv) split to first order.
    let delta0 = (1e-4 * gap).max(2e-6);
    let (up0, dn0) = axis_pole_pair(&spec_at(vw_coll + delta0), -kappa_ref, 3.0 * kappa_ref)?;
    let kappa_coll = -0.5 * (up0 + dn0);

    // Virtual regime, parameterized by s = sqrt(vw - vw_coll) to keep the
    // pole motion finite through the square-root singularity.
    let s0 = delta0.sqrt();
    let s_thres = gap.sqrt();
    let s_end = (vw_end - vw_coll).max(0.0).sqrt();
    let mut s_values: Vec<f64> = Vec::new();
    let n_virtual = 12;
    for j in 0..n_virtual {
        let s = s0 + (0.98 * s_thres - s0) * j as f64 / (n_virtual - 1) as f64;
        s_values.push(s);
    }
    if s_end > s_thres {
        let n_post = 5;
        for j in 0..=n_post {
            s_values.push(s_thres * 1.005 + (s_end - s_thres * 1.005) * j as f64 / n_post as f64);
        }
    }

    let mut prev: Option<(f64, f64)> = None; // (vw, upper root)
    let mut thres_bracket: Option<(f64, f64)> = None;
    let mut center = -kappa_coll;
    let mut width = 3.0 * kappa_coll;
    for &s in &s_values {
        let vw_s = vw_coll + s * s;
        if vw_s > vw_end {
            break;
        }
        let (up, dn) = axis_pole_pair(&spec_at(vw_s), center, width)?;
        points.push(TrajectoryPoint {
            vw: vw_s,
            k1: Complex64::new(0.0, up),
            k2: Complex64::new(0.0, dn),
        });
        // The midpoint stays near -kappa_coll while the separation grows
        // like sqrt(vw - vw_coll); keep the scan window ahead of it.
        center = 0.5 * (up + dn);
        width = 3.0 * (up - dn).max(kappa_coll);
        if let Some((vw_prev, up_prev)) = prev {
            if up_prev < 0.0 && up >= 0.0 && thres_bracket.is_none() {
                thres_bracket = Some((vw_prev, vw_s));
            }
        }
        prev = Some((vw_s, up));
    }

    // Threshold: bisection on the sign of the upper pole.
    let mut vw_thres = None;
    let mut kappa_thres = None;
    if let Some((mut t_lo, mut t_hi)) = thres_bracket {
        let (t_center, t_width) = (-kappa_coll, 4.0 * kappa_coll);
        while t_hi - t_lo > 1e-6 {
            let mid = 0.5 * (t_lo + t_hi);
            let (up, _) = axis_pole_pair(&spec_at(mid), t_center, t_width)?;
            if up < 0.0 {
                t_lo = mid;
            } else {
                t_hi = mid;
            }
        }
        let at = 0.5 * (t_lo + t_hi);
        let (_, dn) = axis_pole_pair(&spec_at(at), t_center, t_width)?;
        vw_thres = Some(at);
        kappa_thres = Some(-dn);
    }

    let mut traj = PoleTrajectory {
        points,
        vw_coll: Some(vw_coll),
        kappa_coll: Some(kappa_coll),
        vw_thres,
        kappa_thres,
        gamma: None,
    };
    if let Ok(fit) = collision_expansion(&traj) {
        traj.gamma = Some(fit.gamma);
    }
    Ok(traj)
}

/// Pole pair at an arbitrary depth, seeded from the nearest trajectory
/// sample. Off the axis the mirror relation supplies `k2`.
pub fn pole_pair_at(
    template: &PotentialSpec,
    vw: f64,
    traj: &PoleTrajectory,
) -> Result<(Complex64, Complex64), PoleError> {
    require_square(template)?;
    let nearest = traj
        .points
        .iter()
        .min_by(|a, b| (a.vw - vw).abs().total_cmp(&(b.vw - vw).abs()))
        .ok_or_else(|| PoleError::InsufficientData {
            reason: "empty trajectory".into(),
        })?;
    let spec = template.with_well_depth(vw);
    if nearest.k1.re.abs() < AXIS_EPS {
        let center = 0.5 * (nearest.k1.im + nearest.k2.im);
        let width = 3.0 * (nearest.k1.im - nearest.k2.im).max(-center);
        let (up, dn) = axis_pole_pair(&spec, center, width)?;
        Ok((Complex64::new(0.0, up), Complex64::new(0.0, dn)))
    } else {
        let pole = find_pole(&spec, nearest.k1)?;
        Ok((pole.k, -pole.k.conj()))
    }
}

/// Result of fitting `k_{1,2} = -i kappa_coll +- i gamma sqrt(vw - vw_coll)`
/// to the virtual-regime samples of a trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CollisionFit {
    pub gamma: f64,
    pub rms_residual: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least squares of the imaginary parts of both virtual poles against
/// `sqrt(vw - vw_coll)`.
pub fn collision_expansion(traj: &PoleTrajectory) -> Result<CollisionFit, PoleError> {
    let (vw_coll, kappa_coll) = match (traj.vw_coll, traj.kappa_coll) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(PoleError::InsufficientData {
                reason: "trajectory does not cross the collision".into(),
            })
        }
    };
    let upper_limit = traj.vw_thres.unwrap_or(f64::INFINITY);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in &traj.points {
        let virtual_pair = p.k1.re.abs() < AXIS_EPS
            && p.k2.re.abs() < AXIS_EPS
            && p.k1.im < 0.0
            && p.vw > vw_coll
            && p.vw <= upper_limit;
        if virtual_pair {
            let x = (p.vw - vw_coll).sqrt();
            xs.push(x);
            ys.push(p.k1.im + kappa_coll);
            xs.push(x);
            ys.push(-(p.k2.im + kappa_coll));
        }
    }
    if xs.len() < 10 {
        return Err(PoleError::InsufficientData {
            reason: format!(
                "collision fit needs >= 5 virtual-regime samples, got {}",
                xs.len() / 2
            ),
        });
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let gamma = sxy / sxx;

    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - gamma * x;
            r * r
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    Ok(CollisionFit {
        gamma,
        rms_residual: (ss_res / ys.len() as f64).sqrt(),
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        n_points: xs.len() / 2,
    })
}
