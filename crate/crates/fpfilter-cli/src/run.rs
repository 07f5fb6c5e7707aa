//! Dispatch one configured command and write its artifacts.

use std::path::{Path, PathBuf};

use fpfilter::poles::{self, StepControl};
use fpfilter::resonance::{self, DepthScan};
use fpfilter::scattering;
use fpfilter::wavepacket::{self, FilterConfig, Grid};

use crate::config::{self, Command, FitLaw, RunConfig};
use crate::output::{write_atomic, write_json};
use crate::CliError;

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn out_path(out_dir: &Path, config: &RunConfig, default_name: &str) -> PathBuf {
    let rel = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name));
    out_dir.join(rel)
}

pub fn run_config(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let config = config::load(config_path)?;
    match config.command {
        Command::Curve => run_curve(&config, out_dir),
        Command::Scan => run_scan(&config, out_dir),
        Command::Fit => run_fit(&config, out_dir),
        Command::Poles => run_poles(&config, out_dir),
        Command::Threshold => run_threshold(&config, out_dir),
        Command::Wavepacket => run_wavepacket(&config, out_dir),
    }
}

fn run_curve(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let section = config
        .curve
        .as_ref()
        .ok_or_else(|| CliError::Config("command = \"curve\" needs a [curve] section".into()))?;
    let curve = scattering::transmittance_curve(
        &config.potential,
        section.v_min_cm_per_s,
        section.v_max_cm_per_s,
        section.n_points,
    )
    .map_err(numerical)?;
    let path = out_path(out_dir, config, "curve.csv");
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).map_err(numerical)?;
    write_atomic(&path, &buf)?;

    let peak = curve
        .points
        .iter()
        .cloned()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!(
        "curve: {} points, max |T|^2 = {:.6} at v = {:.4e} cm/s -> {}",
        curve.points.len(),
        peak.1,
        peak.0,
        path.display()
    );
    Ok(())
}

fn scan_from_config(config: &RunConfig) -> Result<DepthScan, CliError> {
    let section = config
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs a [scan] section".into()))?;
    let depths = section.depths()?;
    let window = section.first_window_cm_per_s.map(|w| (w[0], w[1]));
    resonance::scan_depth(&config.potential, &depths, window).map_err(numerical)
}

fn run_scan(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let scan = scan_from_config(config)?;
    let path = out_path(out_dir, config, "scan.csv");
    let mut buf = Vec::new();
    scan.write_csv(&mut buf).map_err(numerical)?;
    write_atomic(&path, &buf)?;

    let last = scan.points.last().unwrap();
    println!(
        "scan: {} depths{}, last v_R = {:.4e} cm/s at vw = {} 1/s -> {}",
        scan.points.len(),
        match scan.truncated_at {
            Some(vw) => format!(" (tracking lost at {vw})"),
            None => String::new(),
        },
        last.1.v_r,
        last.0,
        path.display()
    );
    Ok(())
}

fn run_fit(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let law = config
        .fit
        .as_ref()
        .ok_or_else(|| CliError::Config("command = \"fit\" needs a [fit] section".into()))?
        .law;
    let scan = scan_from_config(config)?;

    let path = out_path(out_dir, config, "fit.json");
    let scan_path = path.with_extension("scan.csv");
    let mut buf = Vec::new();
    scan.write_csv(&mut buf).map_err(numerical)?;
    write_atomic(&scan_path, &buf)?;

    let alpha = match law {
        FitLaw::Alpha | FitLaw::Both => Some(resonance::fit_alpha(&scan).map_err(numerical)?),
        FitLaw::Beta => None,
    };
    let beta = match law {
        FitLaw::Beta | FitLaw::Both => Some(resonance::fit_beta(&scan).map_err(numerical)?),
        FitLaw::Alpha => None,
    };

    #[derive(serde::Serialize)]
    struct FitOutput {
        alpha: Option<resonance::AlphaFit>,
        beta: Option<resonance::BetaFit>,
        n_scanned: usize,
        truncated_at: Option<f64>,
    }
    write_json(
        &path,
        &FitOutput {
            alpha,
            beta,
            n_scanned: scan.points.len(),
            truncated_at: scan.truncated_at,
        },
    )?;

    let mut parts = Vec::new();
    if let Some(a) = &alpha {
        parts.push(format!(
            "alpha = {:.4} (rms {:.2e} 1/s, {} pts)",
            a.alpha, a.rms_residual, a.n_points
        ));
    }
    if let Some(b) = &beta {
        parts.push(format!(
            "beta = {:.4e} s (rms {:.2e}, {} pts)",
            b.beta, b.rms_log_residual, b.n_points
        ));
    }
    println!("fit: {} -> {}", parts.join(", "), path.display());
    Ok(())
}

fn run_poles(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let section = config
        .poles
        .as_ref()
        .ok_or_else(|| CliError::Config("command = \"poles\" needs a [poles] section".into()))?;
    let traj = poles::track_poles(
        &config.potential,
        section.vw_start_per_s,
        section.vw_end_per_s,
        StepControl::default(),
    )
    .map_err(numerical)?;

    let path = out_path(out_dir, config, "poles.csv");
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(numerical)?;
    write_atomic(&path, &buf)?;
    let summary_path = path.with_extension("summary.json");
    write_json(&summary_path, &traj.summary())?;

    println!(
        "poles: {} samples, vw_coll = {}, vw_thres = {} -> {}",
        traj.points.len(),
        traj.vw_coll.map_or("none".into(), |v| format!("{v:.6}")),
        traj.vw_thres.map_or("none".into(), |v| format!("{v:.6}")),
        path.display()
    );
    Ok(())
}

fn run_threshold(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let thres = poles::threshold_depth(&config.potential).map_err(numerical)?;
    let path = out_path(out_dir, config, "threshold.json");
    write_json(&path, &thres)?;
    println!(
        "threshold: vw_thres/hbar = {:.6} 1/s, kappa_thres = {:.6e} 1/um, delta_v_thres = {:.6e} cm/s",
        thres.vw_thres, thres.kappa_thres, thres.delta_v_thres
    );
    Ok(())
}

fn run_wavepacket(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let section = config.wavepacket.as_ref().ok_or_else(|| {
        CliError::Config("command = \"wavepacket\" needs a [wavepacket] section".into())
    })?;
    let filter_config = FilterConfig {
        potential: config.potential,
        condensate: section.condensate(),
        grid: section.grid.unwrap_or_else(Grid::default_filter_grid),
        dt_s: section.dt_s,
        t_final_s: section.t_final_s,
        snapshot_times_s: section.snapshot_times_s.clone(),
    };
    let report = wavepacket::filter_experiment(&filter_config).map_err(numerical)?;

    let dir = out_path(out_dir, config, "wavepacket");
    for snapshot in &report.snapshots {
        let dist = match section.v_window_cm_per_s {
            Some([lo, hi]) => snapshot.momentum.window(lo, hi),
            None => snapshot.momentum.clone(),
        };
        let mut buf = Vec::new();
        dist.write_csv(&mut buf).map_err(numerical)?;
        write_atomic(&dir.join(format!("snapshot_t{}.csv", snapshot.time)), &buf)?;
    }
    write_json(&dir.join("report.json"), &report.summary())?;

    println!(
        "wavepacket: transmitted fraction = {:.6}, {} snapshots -> {}",
        report.transmitted_fraction,
        report.snapshots.len(),
        dir.display()
    );
    Ok(())
}
