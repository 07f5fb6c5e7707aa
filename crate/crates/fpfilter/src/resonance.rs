//! Resonance peaks of the transmittance and their depth dependence.
//!
//! A peak is the pair `(v_R, dv_R)`: the velocity of the transmittance
//! maximum and the full width of the peak at half its height, both on the
//! positive-velocity axis. Scanning the well depth traces the first
//! symmetric resonance; in the Breit-Wigner regime the peak position obeys
//! `E_R = E_R0 - alpha Vw` and the width `dv_R = dv_R0 exp(-beta Vw)`, with
//! `alpha` and `beta` kept as fitting parameters.

use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::parallel;
use crate::potential::PotentialSpec;
use crate::scattering::{transmittance_at, ScatteringError};

/// Peaks with `|T(v_R)|^2` above this are "sharp" (the filled-symbol
/// criterion); only sharp points enter the alpha and beta fits.
pub const SHARP_THRESHOLD: f64 = 0.995;

/// Coarse samples per search window before bracketed refinement.
/// Near-threshold resonances are extremely narrow; a coarse grid misses
/// them if this is small.
const COARSE_POINTS: usize = 2000;

/// Relative accuracy of the refined peak position and half-height
/// crossings.
const REFINE_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ResonanceError {
    #[error("no interior transmittance maximum in [{v_min}, {v_max}] cm/s")]
    NoPeak { v_min: f64, v_max: f64 },
    #[error("window contains {count} local maxima, expected exactly one")]
    MultiplePeaks { count: usize },
    #[error("peak tracking lost at depth {depth} 1/s")]
    TrackingLost { depth: f64 },
    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

/// A transmittance maximum and its half-height width.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResonancePeak {
    /// Velocity of the maximum, cm/s.
    pub v_r: f64,
    /// Full width at half height, cm/s. When `clamped` the left half-height
    /// crossing does not exist above v = 0 and the width is measured from
    /// zero (threshold-regime convention).
    pub delta_v_r: f64,
    pub peak_transmittance: f64,
    pub sharp: bool,
    pub clamped: bool,
}

impl ResonancePeak {
    /// `E_R / hbar = m v_R^2 / (2 hbar)` in 1/s.
    pub fn energy_over_hbar(&self, constants: &PhysicalConstants) -> f64 {
        constants.kinetic_energy_over_hbar(self.v_r)
    }
}

/// The first symmetric peak tracked over a list of well depths.
#[derive(Debug, Clone)]
pub struct DepthScan {
    pub template: PotentialSpec,
    /// `(vw_over_hbar in 1/s, peak)`, depths strictly increasing.
    pub points: Vec<(f64, ResonancePeak)>,
    /// Depth at which tracking failed, if the scan was truncated.
    pub truncated_at: Option<f64>,
}

impl DepthScan {
    pub fn sharp_points(&self) -> impl Iterator<Item = &(f64, ResonancePeak)> {
        self.points
            .iter()
            .filter(|(_, p)| p.sharp && !p.clamped)
    }

    /// CSV with one row per depth, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "vw_over_hbar_per_s,v_R_cm_per_s,delta_v_R_cm_per_s,peak_transmittance,sharp,clamped"
        )?;
        for (vw, p) in &self.points {
            writeln!(
                w,
                "{vw:.11e},{:.11e},{:.11e},{:.11e},{},{}",
                p.v_r, p.delta_v_r, p.peak_transmittance, p.sharp, p.clamped
            )?;
        }
        Ok(())
    }
}

/// Result of fitting `E_R = E_R0 - alpha Vw` over the sharp points, with
/// `E_R0` anchored to the zero-depth peak (the law is an expansion around
/// `Vw = 0`), not fitted.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub e_r0_over_hbar: f64,
    pub v_r0: f64,
    /// RMS of the energy residuals, 1/s.
    pub rms_residual: f64,
    pub n_points: usize,
}

/// Result of fitting `ln dv_R = ln dv_R0 - beta Vw` over the sharp points,
/// excluding the near-threshold tail where the exponential law bends.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaFit {
    /// 1/(1/s) per unit of well depth over hbar.
    pub beta: f64,
    pub delta_v_r0_fitted: f64,
    /// The measured width at zero depth, when the scan contains it.
    pub delta_v_r0_observed: Option<f64>,
    /// RMS residual in log space (~relative width error).
    pub rms_log_residual: f64,
    pub n_points: usize,
    pub n_dropped: usize,
}

/// Locate the single transmittance maximum inside a velocity window
/// (cm/s). The window must bracket exactly one interior local maximum.
pub fn find_peak(
    spec: &PotentialSpec,
    window: (f64, f64),
) -> Result<ResonancePeak, ResonanceError> {
    find_peak_with(&|v| transmittance_at(spec, v), window)
}

/// Same as [`find_peak`] for an arbitrary transmittance model, e.g. the
/// pole approximations.
pub fn find_peak_of(
    f: &(dyn Fn(f64) -> f64 + Sync),
    window: (f64, f64),
) -> Result<ResonancePeak, ResonanceError> {
    find_peak_with(&|v| Ok(f(v)), window)
}

type CurveFn<'a> = &'a (dyn Fn(f64) -> Result<f64, ScatteringError> + Sync);

fn find_peak_with(f: CurveFn, window: (f64, f64)) -> Result<ResonancePeak, ResonanceError> {
    let (v_min, v_max) = window;
    if !(v_min >= 0.0 && v_max > v_min) {
        return Err(ResonanceError::NoPeak { v_min, v_max });
    }
    let (vs, ts) = sample(f, v_min, v_max, COARSE_POINTS)?;
    let maxima = interior_maxima(&ts);

    match maxima.len() {
        1 => peak_from_grid(f, &vs, &ts, maxima[0]),
        0 => {
            // Threshold convention: when the window effectively starts at
            // v = 0 and the transmittance decreases from the left edge, the
            // maximum sits at the origin limit.
            let spacing = vs[1] - vs[0];
            let edge_is_origin = v_min <= spacing.max((v_max - v_min) / 100.0);
            let left_edge_is_max = ts[0] >= ts[1] && ts[0] == max_of(&ts);
            if edge_is_origin && left_edge_is_max {
                clamped_peak_from_edge(f, &vs, &ts)
            } else {
                Err(ResonanceError::NoPeak { v_min, v_max })
            }
        }
        count => Err(ResonanceError::MultiplePeaks { count }),
    }
}

fn max_of(ts: &[f64]) -> f64 {
    ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn sample(f: CurveFn, v_min: f64, v_max: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), ResonanceError> {
    let dv = (v_max - v_min) / (n - 1) as f64;
    let vs: Vec<f64> = (0..n).map(|j| v_min + j as f64 * dv).collect();
    let values = parallel::map_collect(&vs, |v| f(*v));
    let mut ts = Vec::with_capacity(n);
    for value in values {
        ts.push(value?);
    }
    Ok((vs, ts))
}

fn interior_maxima(ts: &[f64]) -> Vec<usize> {
    (1..ts.len() - 1)
        .filter(|&i| ts[i] > ts[i - 1] && ts[i] > ts[i + 1])
        .collect()
}

fn peak_from_grid(
    f: CurveFn,
    vs: &[f64],
    ts: &[f64],
    i_pk: usize,
) -> Result<ResonancePeak, ResonanceError> {
    let (v_r, peak_t) = golden_max(f, vs[i_pk - 1], vs[i_pk + 1])?;
    let half = 0.5 * peak_t;

    // Right crossing: first coarse sample below half height.
    let mut right = None;
    for j in i_pk + 1..vs.len() {
        if ts[j] < half {
            right = Some(bisect_crossing(f, vs[j - 1].max(v_r), vs[j], half)?);
            break;
        }
    }
    let window = (vs[0], *vs.last().unwrap());
    let right = right.ok_or(ResonanceError::NoPeak {
        v_min: window.0,
        v_max: window.1,
    })?;

    // Left crossing: search inside the window first, then keep stepping
    // below it; if none exists above v = 0 the width is clamped to zero.
    let spacing = vs[1] - vs[0];
    let mut left = None;
    for j in (0..i_pk).rev() {
        if ts[j] < half {
            left = Some(bisect_crossing(f, vs[j], vs[j + 1].min(v_r), half)?);
            break;
        }
    }
    let mut clamped = false;
    if left.is_none() {
        let mut hi = vs[0];
        let mut hi_t = ts[0];
        loop {
            let lo = hi - spacing;
            if lo <= spacing * 1e-3 {
                clamped = true;
                break;
            }
            let lo_t = f(lo)?;
            if lo_t < half {
                left = Some(bisect_crossing(f, lo, hi, half)?);
                break;
            }
            hi = lo;
            hi_t = lo_t;
        }
        let _ = hi_t;
    }

    let left_edge = if clamped { 0.0 } else { left.unwrap() };
    Ok(make_peak(v_r, right - left_edge, peak_t, clamped))
}

fn clamped_peak_from_edge(
    f: CurveFn,
    vs: &[f64],
    ts: &[f64],
) -> Result<ResonancePeak, ResonanceError> {
    let peak_t = ts[0];
    let half = 0.5 * peak_t;
    for j in 1..vs.len() {
        if ts[j] < half {
            let cross = bisect_crossing(f, vs[j - 1], vs[j], half)?;
            return Ok(make_peak(vs[0], cross, peak_t, true));
        }
    }
    Err(ResonanceError::NoPeak {
        v_min: vs[0],
        v_max: *vs.last().unwrap(),
    })
}

fn make_peak(v_r: f64, delta_v_r: f64, peak_transmittance: f64, clamped: bool) -> ResonancePeak {
    ResonancePeak {
        v_r,
        delta_v_r,
        peak_transmittance,
        sharp: peak_transmittance > SHARP_THRESHOLD,
        clamped,
    }
}

fn golden_max(f: CurveFn, mut a: f64, mut b: f64) -> Result<(f64, f64), ResonanceError> {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    const INVPHI2: f64 = 1.0 - INVPHI;
    let mut x1 = a + INVPHI2 * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > REFINE_REL_TOL * 0.5 * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INVPHI2 * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Root of `f(v) = level` inside `[lo, hi]`, assuming a single crossing.
fn bisect_crossing(f: CurveFn, mut lo: f64, mut hi: f64, level: f64) -> Result<f64, ResonanceError> {
    let mut f_lo = f(lo)? - level;
    for _ in 0..200 {
        if hi - lo <= REFINE_REL_TOL * 0.5 * (lo.abs() + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)? - level;
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locate the lowest-velocity resonance below the barrier-top wavenumber.
/// Used to seed depth scans when no window is supplied.
pub fn first_peak(spec: &PotentialSpec) -> Result<ResonancePeak, ResonanceError> {
    let kb = spec.wavenumber_scales().kb;
    let v_hi = spec.constants.wavenumber_to_velocity(0.985 * kb);
    let v_lo = v_hi / 4000.0;
    let f = |v: f64| transmittance_at(spec, v);
    let (vs, ts) = sample(&f, v_lo, v_hi, 4000)?;
    let maxima = interior_maxima(&ts);
    let &i_pk = maxima.first().ok_or(ResonanceError::NoPeak {
        v_min: v_lo,
        v_max: v_hi,
    })?;
    peak_from_grid(&f, &vs, &ts, i_pk)
}

/// Track the first symmetric peak over increasing well depths, re-centering
/// each search window on the previous position. Tracking loss (expected
/// just past the bound-state threshold) truncates the scan; the failed
/// depth is recorded in [`DepthScan::truncated_at`].
pub fn scan_depth(
    template: &PotentialSpec,
    depths: &[f64],
    first_window: Option<(f64, f64)>,
) -> Result<DepthScan, ResonanceError> {
    if depths.is_empty() {
        return Err(ResonanceError::InsufficientData {
            reason: "empty depth list".into(),
        });
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) || depths[0] < 0.0 {
        return Err(ResonanceError::InsufficientData {
            reason: "depths must be non-negative and strictly increasing".into(),
        });
    }

    let mut points: Vec<(f64, ResonancePeak)> = Vec::with_capacity(depths.len());
    let mut truncated_at = None;

    for (idx, &vw) in depths.iter().enumerate() {
        let spec = template.with_well_depth(vw);
        spec.validate().map_err(ScatteringError::Spec)?;

        let result = if idx == 0 {
            match first_window {
                Some(w) => find_peak(&spec, w),
                None => first_peak(&spec),
            }
        } else {
            let (prev_vw, prev) = *points.last().unwrap();
            let slope = if points.len() >= 2 {
                let (vw2, p2) = points[points.len() - 2];
                ((p2.v_r - prev.v_r) / (prev_vw - vw2)).abs()
            } else {
                0.0
            };
            let drift = slope * (vw - prev_vw);
            let w = (8.0 * prev.delta_v_r)
                .max(2.5 * drift)
                .max(1e-3 * prev.v_r);
            let attempt = find_peak(&spec, ((prev.v_r - w).max(1e-7), prev.v_r + w));
            match attempt {
                Ok(p) => Ok(p),
                Err(ResonanceError::Scattering(e)) => Err(ResonanceError::Scattering(e)),
                Err(_) => {
                    let w3 = 3.0 * w;
                    find_peak(&spec, ((prev.v_r - w3).max(1e-7), prev.v_r + w3))
                }
            }
        };

        match result {
            Ok(peak) => points.push((vw, peak)),
            Err(e @ ResonanceError::Scattering(_)) => return Err(e),
            Err(e) if idx == 0 => return Err(e),
            Err(_) => {
                truncated_at = Some(vw);
                break;
            }
        }
    }

    Ok(DepthScan {
        template: *template,
        points,
        truncated_at,
    })
}

/// Least squares of `E_R = E_R0 - alpha Vw` over the sharp subset, with
/// `E_R0` taken from the zero-depth point.
pub fn fit_alpha(scan: &DepthScan) -> Result<AlphaFit, ResonanceError> {
    let constants = scan.template.constants;
    let anchor = scan
        .points
        .iter()
        .find(|(vw, _)| *vw == 0.0)
        .ok_or_else(|| ResonanceError::InsufficientData {
            reason: "alpha fit needs the zero-depth peak as anchor".into(),
        })?;
    let e0 = anchor.1.energy_over_hbar(&constants);
    let v_r0 = anchor.1.v_r;

    let data: Vec<(f64, f64)> = scan
        .sharp_points()
        .map(|(vw, p)| (*vw, p.energy_over_hbar(&constants)))
        .collect();
    if data.len() < 5 {
        return Err(ResonanceError::InsufficientData {
            reason: format!("alpha fit needs >= 5 sharp points, got {}", data.len()),
        });
    }

    let num: f64 = data.iter().map(|(vw, e)| vw * (e0 - e)).sum();
    let den: f64 = data.iter().map(|(vw, _)| vw * vw).sum();
    let alpha = num / den;

    let ss: f64 = data
        .iter()
        .map(|(vw, e)| {
            let r = e - (e0 - alpha * vw);
            r * r
        })
        .sum();
    Ok(AlphaFit {
        alpha,
        e_r0_over_hbar: e0,
        v_r0,
        rms_residual: (ss / data.len() as f64).sqrt(),
        n_points: data.len(),
    })
}

/// Least squares of `ln dv_R = ln dv_R0 - beta Vw` over the sharp subset.
/// Trailing near-threshold points that break the log-linear trend are
/// dropped (largest-depth point first, while its residual exceeds 2.5x the
/// RMS of the rest).
pub fn fit_beta(scan: &DepthScan) -> Result<BetaFit, ResonanceError> {
    let mut data: Vec<(f64, f64)> = scan
        .sharp_points()
        .filter(|(_, p)| p.delta_v_r > 0.0)
        .map(|(vw, p)| (*vw, p.delta_v_r.ln()))
        .collect();
    if data.len() < 5 {
        return Err(ResonanceError::InsufficientData {
            reason: format!("beta fit needs >= 5 sharp points, got {}", data.len()),
        });
    }
    let observed0 = scan
        .points
        .iter()
        .find(|(vw, _)| *vw == 0.0)
        .map(|(_, p)| p.delta_v_r);

    let max_drop = (data.len() / 5).max(2);
    let mut dropped = 0;
    let (mut intercept, mut slope) = line_fit(&data);
    while dropped < max_drop && data.len() > 5 {
        let (vw_t, y_t) = *data.last().unwrap();
        let rest = &data[..data.len() - 1];
        let (c, m) = line_fit(rest);
        let tail_res = (y_t - (c + m * vw_t)).abs();
        let rms_rest = rms_residual(rest, c, m);
        if rms_rest > 0.0 && tail_res > 2.5 * rms_rest {
            data.pop();
            dropped += 1;
            intercept = c;
            slope = m;
        } else {
            break;
        }
    }

    Ok(BetaFit {
        beta: -slope,
        delta_v_r0_fitted: intercept.exp(),
        delta_v_r0_observed: observed0,
        rms_log_residual: rms_residual(&data, intercept, slope),
        n_points: data.len(),
        n_dropped: dropped,
    })
}

fn line_fit(data: &[(f64, f64)]) -> (f64, f64) {
    let n = data.len() as f64;
    let sx: f64 = data.iter().map(|(x, _)| x).sum();
    let sy: f64 = data.iter().map(|(_, y)| y).sum();
    let sxx: f64 = data.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = data.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (intercept, slope)
}

fn rms_residual(data: &[(f64, f64)], intercept: f64, slope: f64) -> f64 {
    let ss: f64 = data
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (ss / data.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poles;
    use approx::assert_relative_eq;

    /// Independent oracle: argmax and half-height crossings off a dense
    /// grid, no bracketing or refinement.
    fn dense_peak(spec: &PotentialSpec, v_lo: f64, v_hi: f64, n: usize) -> (f64, f64) {
        let dv = (v_hi - v_lo) / (n - 1) as f64;
        let vs: Vec<f64> = (0..n).map(|j| v_lo + j as f64 * dv).collect();
        let ts: Vec<f64> = crate::parallel::map_collect(&vs, |v| {
            transmittance_at(spec, *v).unwrap()
        });
        let i_pk = (0..n).max_by(|a, b| ts[*a].total_cmp(&ts[*b])).unwrap();
        let half = ts[i_pk] / 2.0;
        let interp = |a: usize, b: usize| {
            let f = (half - ts[a]) / (ts[b] - ts[a]);
            vs[a] + f * (vs[b] - vs[a])
        };
        let mut right = v_hi;
        for j in i_pk + 1..n {
            if ts[j] < half {
                right = interp(j - 1, j);
                break;
            }
        }
        let mut left = v_lo;
        for j in (0..i_pk).rev() {
            if ts[j] < half {
                left = interp(j + 1, j);
                break;
            }
        }
        (vs[i_pk], right - left)
    }

    #[test]
    fn zero_depth_peak_is_sharp() {
        let spec = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let peak = first_peak(&spec).unwrap();
        assert!(peak.peak_transmittance > 0.995, "{peak:?}");
        assert!(peak.sharp);
        assert!(!peak.clamped);
        assert!(peak.v_r > 0.0 && peak.delta_v_r > 0.0);
    }

    #[test]
    fn matches_dense_grid_oracle() {
        let spec = PotentialSpec::square(400.0, 150.0, 5.0).unwrap();
        let rough = first_peak(&spec).unwrap();
        let window = (0.5 * rough.v_r, 1.5 * rough.v_r);
        let peak = find_peak(&spec, window).unwrap();
        let (v_oracle, dv_oracle) = dense_peak(&spec, window.0, window.1, 1_000_000);
        assert_relative_eq!(peak.v_r, v_oracle, max_relative = 1e-6);
        assert_relative_eq!(peak.delta_v_r, dv_oracle, max_relative = 1e-6);
    }

    #[test]
    fn rejects_window_with_two_peaks() {
        // d = 12 um puts two resonances under the barrier top.
        let spec = PotentialSpec::square(300.0, 0.0, 12.0).unwrap();
        let kb = spec.wavenumber_scales().kb;
        let v_hi = spec.constants.wavenumber_to_velocity(0.98 * kb);
        let err = find_peak(&spec, (1e-4 * v_hi, v_hi)).unwrap_err();
        assert!(matches!(err, ResonanceError::MultiplePeaks { .. }), "{err}");
    }

    #[test]
    fn rejects_monotone_window() {
        let spec = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let peak = first_peak(&spec).unwrap();
        // Entirely on the rising flank.
        let err = find_peak(&spec, (0.2 * peak.v_r, 0.8 * peak.v_r)).unwrap_err();
        assert!(matches!(err, ResonanceError::NoPeak { .. }), "{err}");
    }

    #[test]
    fn clamped_width_at_threshold_matches_kappa() {
        let template = PotentialSpec::square(400.0, 1.0, 5.0).unwrap();
        let thres = poles::threshold_depth(&template).unwrap();
        let spec = template.with_well_depth(thres.vw_thres);
        let window_hi = 6.0 * thres.delta_v_thres;
        let peak = find_peak(&spec, (window_hi / 5000.0, window_hi)).unwrap();
        assert!(peak.clamped, "{peak:?}");
        // In wavenumber units the clamped width is kappa_thres.
        let width_k = spec.constants.velocity_to_wavenumber(peak.delta_v_r);
        assert_relative_eq!(width_k, thres.kappa_thres, max_relative = 0.02);
    }

    #[test]
    fn scan_tracks_decreasing_resonance() {
        let template = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let depths: Vec<f64> = (0..8).map(|i| 20.0 * i as f64).collect();
        let scan = scan_depth(&template, &depths, None).unwrap();
        assert_eq!(scan.points.len(), 8);
        assert!(scan.truncated_at.is_none());
        for w in scan.points.windows(2) {
            assert!(w[1].1.v_r < w[0].1.v_r, "{:?}", scan.points);
        }
    }

    #[test]
    fn alpha_fit_needs_anchor_and_enough_points() {
        let template = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let scan = scan_depth(&template, &[0.0, 30.0, 60.0], None).unwrap();
        let err = fit_alpha(&scan).unwrap_err();
        assert!(matches!(err, ResonanceError::InsufficientData { .. }));
        let scan = scan_depth(&template, &[10.0, 30.0, 50.0, 70.0, 90.0, 110.0], None).unwrap();
        let err = fit_alpha(&scan).unwrap_err();
        assert!(matches!(err, ResonanceError::InsufficientData { .. }));
    }

    #[test]
    fn alpha_and_beta_on_short_square_scan() {
        let template = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let depths: Vec<f64> = (0..9).map(|i| 15.0 * i as f64).collect();
        let scan = scan_depth(&template, &depths, None).unwrap();
        let alpha = fit_alpha(&scan).unwrap();
        assert!(alpha.alpha > 0.0 && alpha.alpha <= 1.2, "{alpha:?}");
        assert!(alpha.rms_residual.is_finite());
        let beta = fit_beta(&scan).unwrap();
        assert!(beta.beta > 0.0, "{beta:?}");
        assert!(beta.delta_v_r0_observed.is_some());
        // Widths shrink with depth in the Breit-Wigner regime.
        let widths: Vec<f64> = scan.sharp_points().map(|(_, p)| p.delta_v_r).collect();
        for w in widths.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn scan_csv_format() {
        let template = PotentialSpec::square(300.0, 0.0, 5.0).unwrap();
        let scan = scan_depth(&template, &[0.0, 25.0], None).unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "vw_over_hbar_per_s,v_R_cm_per_s,delta_v_R_cm_per_s,peak_transmittance,sharp,clamped\n"
        ));
        assert!(text.contains(",true,false"));
    }
}
