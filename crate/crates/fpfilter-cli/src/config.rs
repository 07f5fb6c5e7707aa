//! The TOML run configuration. Unknown keys are rejected; every physical
//! value passes through the library's own validation before any
//! computation starts.

use serde::Deserialize;
use std::path::PathBuf;

use fpfilter::wavepacket::{CondensateParams, Grid};
use fpfilter::PotentialSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Curve,
    Scan,
    Fit,
    Poles,
    Threshold,
    Wavepacket,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Output file (or directory for `wavepacket`), relative to `--out`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub curve: Option<CurveSection>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub poles: Option<PolesSection>,
    #[serde(default)]
    pub wavepacket: Option<WavepacketSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub v_min_cm_per_s: f64,
    pub v_max_cm_per_s: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Explicit depth list, 1/s.
    #[serde(default)]
    pub depths_per_s: Option<Vec<f64>>,
    /// Alternatively a uniform range.
    #[serde(default)]
    pub depth_start_per_s: Option<f64>,
    #[serde(default)]
    pub depth_stop_per_s: Option<f64>,
    #[serde(default)]
    pub depth_step_per_s: Option<f64>,
    /// Search window for the first depth; found automatically if absent.
    #[serde(default)]
    pub first_window_cm_per_s: Option<[f64; 2]>,
}

impl ScanSection {
    pub fn depths(&self) -> Result<Vec<f64>, CliError> {
        match (
            &self.depths_per_s,
            self.depth_start_per_s,
            self.depth_stop_per_s,
            self.depth_step_per_s,
        ) {
            (Some(list), None, None, None) => Ok(list.clone()),
            (None, Some(start), Some(stop), Some(step)) => {
                if !(step > 0.0 && stop > start) {
                    return Err(CliError::Config(
                        "scan: depth range needs depth_step_per_s > 0 and stop > start".into(),
                    ));
                }
                let n = ((stop - start) / step).floor() as usize + 1;
                Ok((0..n).map(|i| start + i as f64 * step).collect())
            }
            _ => Err(CliError::Config(
                "scan: give either depths_per_s or the depth_start/stop/step trio".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitLaw {
    Alpha,
    Beta,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub law: FitLaw,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolesSection {
    pub vw_start_per_s: f64,
    pub vw_end_per_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavepacketSection {
    pub n_atoms: f64,
    #[serde(default = "default_scattering_length")]
    pub scattering_length_m: f64,
    pub omega_x_per_s: f64,
    pub omega_yz_per_s: f64,
    pub v0_cm_per_s: f64,
    pub x_trap_um: f64,
    #[serde(default = "default_t_final")]
    pub t_final_s: f64,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_snapshots")]
    pub snapshot_times_s: Vec<f64>,
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Restrict snapshot CSV rows to this velocity window, cm/s.
    #[serde(default)]
    pub v_window_cm_per_s: Option<[f64; 2]>,
}

fn default_scattering_length() -> f64 {
    2.93e-9
}

fn default_t_final() -> f64 {
    8.0
}

fn default_dt() -> f64 {
    1e-4
}

fn default_snapshots() -> Vec<f64> {
    vec![0.0, 0.8, 8.0]
}

impl WavepacketSection {
    pub fn condensate(&self) -> CondensateParams {
        CondensateParams {
            n_atoms: self.n_atoms,
            scattering_length_m: self.scattering_length_m,
            omega_x: self.omega_x_per_s,
            omega_yz: self.omega_yz_per_s,
            v0: self.v0_cm_per_s,
            x_trap: self.x_trap_um,
        }
    }
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config
        .potential
        .validate()
        .map_err(|e| CliError::Config(format!("potential: {e}")))?;
    Ok(config)
}
