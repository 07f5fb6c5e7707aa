//! Built-in presets reproducing the reference datasets: transmittance
//! curve families, depth scans with the alpha/beta fits, pole trajectories
//! around the collision, and the condensate filtering runs.

use std::path::Path;

use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::json;

use fpfilter::poles::{self, StepControl};
use fpfilter::resonance;
use fpfilter::scattering;
use fpfilter::wavepacket::{self, CondensateParams, FilterConfig, Grid};
use fpfilter::PotentialSpec;

use crate::output::{write_atomic, write_json};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn reproduce(figure: FigureId, out_dir: &Path) -> Result<(), CliError> {
    match figure {
        FigureId::Fig2 => fig2(&out_dir.join("fig2")),
        FigureId::Fig3 => fig3(&out_dir.join("fig3")),
        FigureId::Fig4 => fig4(&out_dir.join("fig4")),
        FigureId::Fig5 => fig5(&out_dir.join("fig5")),
    }
}

/// Transmittance versus velocity for well depths 0, 150, 180.2, 180.25 and
/// 180.5 1/s; Gaussian profile, barrier 300 1/s, d = 6 um, sigma = 2 um.
fn fig2(dir: &Path) -> Result<(), CliError> {
    let depths = [0.0, 150.0, 180.2, 180.25, 180.5];
    let (v_min, v_max, n) = (1e-4, 0.13, 1500);
    let mut files = Vec::new();
    for vw in depths {
        let spec = PotentialSpec::gaussian(300.0, vw, 6.0, 2.0).map_err(numerical)?;
        let curve = scattering::transmittance_curve(&spec, v_min, v_max, n).map_err(numerical)?;
        let name = format!("curve_vw{vw}.csv");
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).map_err(numerical)?;
        write_atomic(&dir.join(&name), &buf)?;
        files.push(name);
    }
    write_json(
        &dir.join("manifest.json"),
        &json!({
            "figure": "fig2",
            "potential": {
                "shape": "gaussian",
                "vb_over_hbar_per_s": 300.0,
                "d_um": 6.0,
                "sigma_um": 2.0,
            },
            "vw_over_hbar_per_s": depths,
            "v_window_cm_per_s": [v_min, v_max],
            "n_points": n,
            "files": files,
        }),
    )?;
    println!("fig2: {} curves -> {}", depths.len(), dir.display());
    Ok(())
}

/// Resonance velocity and width versus well depth for the four model
/// families, with the alpha/beta fits and the square-model two-pole
/// threshold markers.
fn fig3(dir: &Path) -> Result<(), CliError> {
    struct Family {
        name: &'static str,
        spec: PotentialSpec,
        depth_stop: f64,
        depth_step: f64,
    }
    let families = [
        Family {
            name: "square_vb300",
            spec: PotentialSpec::square(300.0, 0.0, 5.0).map_err(numerical)?,
            depth_stop: 176.0,
            depth_step: 2.5,
        },
        Family {
            name: "square_vb500",
            spec: PotentialSpec::square(500.0, 0.0, 5.0).map_err(numerical)?,
            depth_stop: 214.0,
            depth_step: 2.5,
        },
        Family {
            name: "gaussian_vb300",
            spec: PotentialSpec::gaussian(300.0, 0.0, 6.0, 2.0).map_err(numerical)?,
            depth_stop: 179.0,
            depth_step: 4.0,
        },
        Family {
            name: "gaussian_vb500",
            spec: PotentialSpec::gaussian(500.0, 0.0, 6.0, 2.0).map_err(numerical)?,
            depth_stop: 220.0,
            depth_step: 4.0,
        },
    ];

    let mut fits = serde_json::Map::new();
    let mut files = Vec::new();
    for family in &families {
        let n = (family.depth_stop / family.depth_step).floor() as usize + 1;
        let depths: Vec<f64> = (0..n).map(|i| i as f64 * family.depth_step).collect();
        let scan = resonance::scan_depth(&family.spec, &depths, None).map_err(numerical)?;
        let name = format!("scan_{}.csv", family.name);
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).map_err(numerical)?;
        write_atomic(&dir.join(&name), &buf)?;
        files.push(name);

        let alpha = resonance::fit_alpha(&scan).map_err(numerical)?;
        let beta = resonance::fit_beta(&scan).map_err(numerical)?;
        println!(
            "fig3 {}: alpha = {:.4}, beta = {:.4e} ({} sharp points)",
            family.name, alpha.alpha, beta.beta, alpha.n_points
        );
        fits.insert(
            family.name.to_string(),
            json!({
                "alpha": alpha,
                "beta": beta,
                "truncated_at": scan.truncated_at,
            }),
        );
    }

    // Two-pole threshold markers (circles) for the square families.
    let mut thresholds = serde_json::Map::new();
    for (name, vb) in [("square_vb300", 300.0), ("square_vb500", 500.0)] {
        let template = PotentialSpec::square(vb, 0.0, 5.0).map_err(numerical)?;
        let t = poles::threshold_depth(&template).map_err(numerical)?;
        thresholds.insert(name.to_string(), serde_json::to_value(t).unwrap());
    }

    write_json(
        &dir.join("manifest.json"),
        &json!({
            "figure": "fig3",
            "square": { "d_um": 5.0 },
            "gaussian": { "d_um": 6.0, "sigma_um": 2.0 },
            "vb_over_hbar_per_s": [300.0, 500.0],
            "fits": fits,
            "thresholds_two_pole": thresholds,
            "files": files,
        }),
    )?;
    println!("fig3: {} scans -> {}", families.len(), dir.display());
    Ok(())
}

/// Pole motion of the square model with barrier 400 1/s through the
/// resonance-antiresonance collision, plus the peak position and width
/// against the signed pole distance to the collision point.
fn fig4(dir: &Path) -> Result<(), CliError> {
    let template = PotentialSpec::square(400.0, 1.0, 5.0).map_err(numerical)?;
    let traj =
        poles::track_poles(&template, 199.0, 199.95, StepControl::default()).map_err(numerical)?;
    let vw_coll = traj
        .vw_coll
        .ok_or_else(|| CliError::Runtime("tracking did not reach the collision".into()))?;
    let kappa_coll = traj.kappa_coll.unwrap();
    let vw_thres = traj
        .vw_thres
        .ok_or_else(|| CliError::Runtime("tracking did not reach the threshold".into()))?;

    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(numerical)?;
    write_atomic(&dir.join("trajectory.csv"), &buf)?;
    write_json(&dir.join("summary.json"), &traj.summary())?;

    // Pole pairs at the four caption depths (the two landmarks use the
    // tracked values).
    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(buf, "label,vw_over_hbar_per_s,re_k1,im_k1,re_k2,im_k2").map_err(numerical)?;
        for (label, vw) in [
            ("pre_collision", 199.884),
            ("collision", vw_coll),
            ("threshold", vw_thres),
            ("post_threshold", 199.92),
        ] {
            let (k1, k2) = poles::pole_pair_at(&template, vw, &traj).map_err(numerical)?;
            writeln!(
                buf,
                "{label},{vw:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                k1.re, k1.im, k2.re, k2.im
            )
            .map_err(numerical)?;
        }
    }
    write_atomic(&dir.join("pole_positions.csv"), &buf)?;

    // Peak position/width versus the signed distance of k1 to the
    // collision point, with the 1- and 2-pole approximations.
    let k_coll = Complex64::new(0.0, -kappa_coll);
    let constants = template.constants;
    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(
            buf,
            "vw_over_hbar_per_s,lambda_per_um,v_R_cm_per_s,delta_v_R_cm_per_s,v_R_two_pole,delta_v_R_two_pole,v_R_one_pole,delta_v_R_one_pole"
        )
        .map_err(numerical)?;
        for p in traj.points.iter().filter(|p| p.vw >= 199.80) {
            let spec = template.with_well_depth(p.vw);
            let lambda = (p.k1 - k_coll).norm() * if p.vw < vw_coll { -1.0 } else { 1.0 };
            let v_hi = constants
                .wavenumber_to_velocity((8.0 * kappa_coll).max(2.0 * p.k1.norm()));
            let window = (v_hi / 5000.0, v_hi);

            let exact = resonance::find_peak(&spec, window).map_err(numerical)?;
            let two = resonance::find_peak_of(
                &|v| {
                    poles::two_pole_transmittance(
                        p.k1,
                        p.k2,
                        constants.velocity_to_wavenumber(v),
                    )
                    .unwrap_or(f64::NAN)
                },
                window,
            )
            .map_err(numerical)?;
            let one = resonance::find_peak_of(
                &|v| {
                    poles::one_pole_transmittance(p.k1, constants.velocity_to_wavenumber(v))
                        .unwrap_or(f64::NAN)
                },
                window,
            )
            .map_err(numerical)?;
            writeln!(
                buf,
                "{:.11e},{lambda:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                p.vw, exact.v_r, exact.delta_v_r, two.v_r, two.delta_v_r, one.v_r, one.delta_v_r
            )
            .map_err(numerical)?;
        }
    }
    write_atomic(&dir.join("peaks_vs_lambda.csv"), &buf)?;

    write_json(
        &dir.join("manifest.json"),
        &json!({
            "figure": "fig4",
            "potential": { "shape": "square", "vb_over_hbar_per_s": 400.0, "d_um": 5.0 },
            "caption_depths_per_s": [199.884, 199.898, 199.901, 199.92],
            "tracked": traj.summary(),
            "files": ["trajectory.csv", "pole_positions.csv", "peaks_vs_lambda.csv"],
        }),
    )?;
    println!(
        "fig4: vw_coll = {vw_coll:.6}, vw_thres = {vw_thres:.6} -> {}",
        dir.display()
    );
    Ok(())
}

/// Momentum distributions of the released condensate before and after the
/// velocity selection, for well depths 140, 150 and 160 1/s.
fn fig5(dir: &Path) -> Result<(), CliError> {
    let depths = [140.0, 150.0, 160.0];
    let condensate = CondensateParams {
        n_atoms: 5e4,
        scattering_length_m: 2.93e-9,
        omega_x: 5.0,
        omega_yz: 100.0,
        v0: 0.0336,
        x_trap: -600.0,
    };
    let v_window = [-0.02, 0.08];

    let mut resonances = serde_json::Map::new();
    let mut files = Vec::new();
    for vw in depths {
        let potential = PotentialSpec::gaussian(300.0, vw, 6.0, 2.0).map_err(numerical)?;

        // The circles: resonance velocity of the stationary problem.
        let peak = resonance::first_peak(&potential).map_err(numerical)?;
        resonances.insert(
            format!("vw{vw}"),
            json!({ "v_R_cm_per_s": peak.v_r, "delta_v_R_cm_per_s": peak.delta_v_r }),
        );

        let config = FilterConfig {
            potential,
            condensate,
            grid: Grid::default_filter_grid(),
            dt_s: 1e-4,
            t_final_s: 8.0,
            snapshot_times_s: vec![0.0, 0.8, 8.0],
        };
        let report = wavepacket::filter_experiment(&config).map_err(numerical)?;
        for snapshot in &report.snapshots {
            let name = format!("vw{vw}_t{}.csv", snapshot.time);
            let mut buf = Vec::new();
            snapshot
                .momentum
                .window(v_window[0], v_window[1])
                .write_csv(&mut buf)
                .map_err(numerical)?;
            write_atomic(&dir.join(&name), &buf)?;
            files.push(name);
        }
        write_json(&dir.join(format!("vw{vw}_report.json")), &report.summary())?;
        println!(
            "fig5 vw = {vw}: transmitted fraction = {:.4}, v_R = {:.4e} cm/s",
            report.transmitted_fraction, peak.v_r
        );
    }

    write_json(
        &dir.join("manifest.json"),
        &json!({
            "figure": "fig5",
            "potential": { "shape": "gaussian", "vb_over_hbar_per_s": 300.0, "d_um": 6.0, "sigma_um": 2.0 },
            "vw_over_hbar_per_s": depths,
            "condensate": {
                "n_atoms": 5e4,
                "scattering_length_m": 2.93e-9,
                "omega_x_per_s": 5.0,
                "omega_yz_per_s": 100.0,
                "v0_cm_per_s": 0.0336,
                "x_trap_um": -600.0,
            },
            "snapshot_times_s": [0.0, 0.8, 8.0],
            "v_window_cm_per_s": v_window,
            "resonances": resonances,
            "files": files,
        }),
    )?;
    println!("fig5: {} runs -> {}", depths.len(), dir.display());
    Ok(())
}
