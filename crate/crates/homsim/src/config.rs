//! Scenario configuration: named presets, config-file loading, and flag
//! overrides.
//!
//! Precedence, lowest to highest: named-scenario defaults, then the
//! config file, then command-line flags. A `custom` scenario starts from
//! the same apparatus defaults as `hom_overlapped` and relies on the file
//! to reshape it.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use clap::ValueEnum;
use hom_core::clicksim::{DetectorModel, PulseTrainConfig};
use hom_core::field::DelayGeometry;
use hom_core::phase::PhaseProcess;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Default repetition period: 85 MHz pulse rate.
pub const DEFAULT_PERIOD_NS: f64 = 1000.0 / 85.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Scenario {
    /// Mach-Zehnder style fringes: one RF drive for both inputs, fixed
    /// phase offset, fine delay grid.
    MzSynchronized,
    /// Same fine grid with independent drives: singles go flat.
    MzIndependent,
    /// Two-photon dip with zero electronic delay.
    HomOverlapped,
    /// Two-photon dip with the coincidence window pairing slots 18 apart.
    HomDelayed,
    /// Overlapped dip with FM-noisy drives.
    HomFmOverlapped,
    /// Delayed coincidence window with FM-noisy drives.
    HomFmDelayed,
    /// Whatever the config file says.
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::MzSynchronized => "mz_synchronized",
            Scenario::MzIndependent => "mz_independent",
            Scenario::HomOverlapped => "hom_overlapped",
            Scenario::HomDelayed => "hom_delayed",
            Scenario::HomFmOverlapped => "hom_fm_overlapped",
            Scenario::HomFmDelayed => "hom_fm_delayed",
            Scenario::Custom => "custom",
        };
        f.write_str(name)
    }
}

/// Phase relation between the two RF drives, in config-file form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    Synchronized {
        phi0: f64,
    },
    IndependentRf {
        dphi_ij: f64,
    },
    IndependentRfFmNoise {
        dphi_ij: f64,
        rf_frequency_mhz: f64,
        deviation_fraction: f64,
    },
}

impl PhaseSpec {
    pub fn to_process(self) -> PhaseProcess {
        match self {
            PhaseSpec::Synchronized { phi0 } => PhaseProcess::Synchronized { phi0 },
            PhaseSpec::IndependentRf { dphi_ij } => PhaseProcess::IndependentRf { dphi_ij },
            PhaseSpec::IndependentRfFmNoise { dphi_ij, rf_frequency_mhz, deviation_fraction } => {
                PhaseProcess::IndependentRfFmNoise {
                    dphi_ij,
                    rf_frequency_mhz,
                    deviation_fraction,
                }
            }
        }
    }

    fn dphi_ij(&self) -> Option<f64> {
        match *self {
            PhaseSpec::Synchronized { .. } => None,
            PhaseSpec::IndependentRf { dphi_ij }
            | PhaseSpec::IndependentRfFmNoise { dphi_ij, .. } => Some(dphi_ij),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub start_um: f64,
    pub stop_um: f64,
    pub step_um: f64,
}

impl ScanGrid {
    /// The delay offsets the grid enumerates, start to stop inclusive.
    pub fn deltas(&self) -> Vec<f64> {
        let n = ((self.stop_um - self.start_um) / self.step_um).round() as usize;
        let mut deltas = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let dl = self.start_um + k as f64 * self.step_um;
            if dl <= self.stop_um + 1e-9 * self.step_um {
                deltas.push(dl);
            }
        }
        deltas
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub wavelength_nm: f64,
    pub fwhm_bandwidth_nm: f64,
    pub period_ns: f64,
    pub mean_photons: f64,
    pub intensity_ratio: f64,
    pub efficiency: f64,
    pub slot_offset_m: u32,
    pub phase: PhaseSpec,
}

/// A fully resolved run: what executes, and what the metadata side-car
/// echoes so the output regenerates itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub seed: u64,
    pub trials_per_point: u64,
    pub scan: ScanGrid,
    pub physics: Physics,
}

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut cfg = Self {
            schema_version: SCHEMA_VERSION,
            scenario,
            seed: 42,
            trials_per_point: 100_000,
            scan: ScanGrid { start_um: -60.0, stop_um: 60.0, step_um: 1.0 },
            physics: Physics {
                wavelength_nm: 780.0,
                fwhm_bandwidth_nm: 15.0,
                period_ns: DEFAULT_PERIOD_NS,
                mean_photons: 0.1,
                intensity_ratio: 1.0,
                efficiency: 0.6,
                slot_offset_m: 0,
                phase: PhaseSpec::IndependentRf { dphi_ij: 0.0 },
            },
        };
        match scenario {
            Scenario::MzSynchronized => {
                // The fringe period equals the wavelength, far below the
                // 1 um dip grid; these scenarios need the fine grid.
                cfg.scan = ScanGrid { start_um: -3.0, stop_um: 3.0, step_um: 0.05 };
                cfg.physics.phase = PhaseSpec::Synchronized { phi0: FRAC_PI_2 };
            }
            Scenario::MzIndependent => {
                cfg.scan = ScanGrid { start_um: -3.0, stop_um: 3.0, step_um: 0.05 };
            }
            Scenario::HomDelayed | Scenario::HomFmDelayed => {
                cfg.physics.slot_offset_m = 18;
            }
            _ => {}
        }
        if matches!(scenario, Scenario::HomFmOverlapped | Scenario::HomFmDelayed) {
            cfg.physics.phase = PhaseSpec::IndependentRfFmNoise {
                dphi_ij: 0.0,
                rf_frequency_mhz: 40.0,
                deviation_fraction: 0.5,
            };
        }
        cfg
    }

    pub fn pulse_train(&self) -> PulseTrainConfig {
        PulseTrainConfig {
            wavelength_nm: self.physics.wavelength_nm,
            fwhm_bandwidth_nm: self.physics.fwhm_bandwidth_nm,
            period_ns: self.physics.period_ns,
            mean_photons: self.physics.mean_photons,
            intensity_ratio: self.physics.intensity_ratio,
        }
    }

    pub fn process(&self) -> PhaseProcess {
        self.physics.phase.to_process()
    }

    pub fn detector(&self) -> Result<DetectorModel, String> {
        DetectorModel::new(self.physics.efficiency).map_err(|e| e.to_string())
    }

    /// Full consistency check with config-level diagnostics.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let ScanGrid { start_um, stop_um, step_um } = self.scan;
        if !step_um.is_finite() || step_um <= 0.0 {
            return Err(format!("scan step_um {step_um} must be positive"));
        }
        if !start_um.is_finite() || !stop_um.is_finite() || start_um >= stop_um {
            return Err(format!("scan range [{start_um}, {stop_um}] must satisfy start < stop"));
        }
        if self.trials_per_point == 0 {
            return Err("trials_per_point must be at least 1".into());
        }
        self.pulse_train().validate().map_err(|e| e.to_string())?;
        self.detector()?;
        self.process().validate().map_err(|e| e.to_string())?;
        // The widest scan offset must stay well inside a slot spacing.
        let extreme = if start_um.abs() > stop_um.abs() { start_um } else { stop_um };
        DelayGeometry::new(
            extreme,
            self.physics.period_ns,
            self.physics.slot_offset_m,
            self.physics.wavelength_nm,
        )
        .map_err(|e| e.to_string())?;
        if self.physics.slot_offset_m == 0 {
            if let Some(d) = self.physics.phase.dphi_ij() {
                if d != 0.0 {
                    return Err(format!(
                        "dphi_ij {d} with slot_offset_m = 0: a train offset of zero pairs a slot \
                         with itself, so the slot-to-slot phase offset must be 0"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Config-file form: everything optional, layered over scenario defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    pub trials_per_point: Option<u64>,
    pub scan: Option<ScanGrid>,
    pub physics: Option<PhysicsFile>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsFile {
    pub wavelength_nm: Option<f64>,
    pub fwhm_bandwidth_nm: Option<f64>,
    pub period_ns: Option<f64>,
    pub mean_photons: Option<f64>,
    pub intensity_ratio: Option<f64>,
    pub efficiency: Option<f64>,
    pub slot_offset_m: Option<u32>,
    pub phase: Option<PhaseSpec>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config file: {e}"))
    }
}

/// Command-line overrides that outrank the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

/// Layers defaults, file, and flags into one validated config.
pub fn resolve(
    file: Option<&ConfigFile>,
    overrides: &Overrides,
) -> Result<ScenarioConfig, String> {
    if let Some(f) = file {
        if f.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                f.schema_version
            ));
        }
    }
    let scenario = overrides
        .scenario
        .or(file.and_then(|f| f.scenario))
        .ok_or("no scenario: pass --scenario or set one in the config file")?;
    let mut cfg = ScenarioConfig::defaults(scenario);
    if let Some(f) = file {
        if let Some(seed) = f.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = f.trials_per_point {
            cfg.trials_per_point = trials;
        }
        if let Some(scan) = f.scan {
            cfg.scan = scan;
        }
        if let Some(p) = &f.physics {
            let dst = &mut cfg.physics;
            dst.wavelength_nm = p.wavelength_nm.unwrap_or(dst.wavelength_nm);
            dst.fwhm_bandwidth_nm = p.fwhm_bandwidth_nm.unwrap_or(dst.fwhm_bandwidth_nm);
            dst.period_ns = p.period_ns.unwrap_or(dst.period_ns);
            dst.mean_photons = p.mean_photons.unwrap_or(dst.mean_photons);
            dst.intensity_ratio = p.intensity_ratio.unwrap_or(dst.intensity_ratio);
            dst.efficiency = p.efficiency.unwrap_or(dst.efficiency);
            dst.slot_offset_m = p.slot_offset_m.unwrap_or(dst.slot_offset_m);
            if let Some(phase) = p.phase {
                dst.phase = phase;
            }
        }
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = overrides.trials {
        cfg.trials_per_point = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}
