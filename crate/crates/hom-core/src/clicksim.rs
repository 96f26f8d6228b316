//! Monte Carlo simulation at the detector-click level.
//!
//! Time is discretized into pulse slots. A trial draws the relative phase
//! at the two slots a coincidence window pairs (i and j = i + m), splits
//! the four weak pulses on the beamsplitter, and samples non-resolving
//! detector clicks with probability 1 - exp(-eta * I). Detector D1 gates
//! on output C at slot i, D2 on output D at slot j; a coincidence is both
//! firing in the same trial.
//!
//! Every trial owns a private window of a counter-mode random stream
//! (`TrialKey`), so a scan is reproducible bit for bit under any thread
//! count or evaluation order.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{ensure_nonnegative, ensure_positive, Error};
use crate::field::{
    beamsplitter_intensities, coherence_envelope, wrap_phase, DelayGeometry, OpticalField,
    SpectralModel,
};
use crate::phase::{PhaseProcess, TrialKey};

/// Physical parameters of the two input pulse trains. Both trains share
/// one spectral line and repetition period; input B carries
/// `intensity_ratio` times the mean photon number of input A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrainConfig {
    pub wavelength_nm: f64,
    pub fwhm_bandwidth_nm: f64,
    pub period_ns: f64,
    pub mean_photons: f64,
    pub intensity_ratio: f64,
}

impl PulseTrainConfig {
    pub fn validate(&self) -> Result<(), Error> {
        ensure_positive("wavelength_nm", self.wavelength_nm)?;
        ensure_positive("fwhm_bandwidth_nm", self.fwhm_bandwidth_nm)?;
        ensure_positive("period_ns", self.period_ns)?;
        ensure_nonnegative("mean_photons", self.mean_photons)?;
        ensure_nonnegative("intensity_ratio", self.intensity_ratio)
    }

    pub fn mu_a(&self) -> f64 {
        self.mean_photons
    }

    pub fn mu_b(&self) -> f64 {
        self.mean_photons * self.intensity_ratio
    }

    pub fn spectrum(&self) -> Result<SpectralModel, Error> {
        SpectralModel::new(self.wavelength_nm, self.fwhm_bandwidth_nm)
    }
}

/// The four weak pulses a trial sees (inputs A, B at slots i, j) and the
/// total relative phase at each slot, geometric delay term included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialFields {
    pub i_a_i: f64,
    pub i_a_j: f64,
    pub i_b_i: f64,
    pub i_b_j: f64,
    pub dphi_i: f64,
    pub dphi_j: f64,
}

/// Non-resolving threshold detector; dark counts and dead time are out of
/// scope and fixed at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64) -> Result<Self, Error> {
        if !efficiency.is_finite() || efficiency <= 0.0 || efficiency > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "efficiency {efficiency} must lie in (0, 1]"
            )));
        }
        Ok(Self { efficiency })
    }
}

/// Accumulated counts at one scan position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub delta_l_um: f64,
    pub singles_d1: u64,
    pub singles_d2: u64,
    pub coincidences: u64,
    pub trials: u64,
    pub rate: f64,
    pub rate_stderr: f64,
}

/// One full scan over the optical delay, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
}

/// Dip visibility extracted from a scan curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub visibility: f64,
    pub stderr: f64,
    pub dip_position_um: f64,
    pub floor: f64,
    pub baseline: f64,
}

/// Probability that a threshold detector fires on a pulse of the given
/// mean photon number: p = 1 - exp(-efficiency * intensity).
pub fn click_probability(intensity: f64, det: &DetectorModel) -> f64 {
    debug_assert!(intensity >= 0.0);
    -(-det.efficiency * intensity).exp_m1()
}

fn trial_fields(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    geometry: &DelayGeometry,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> TrialFields {
    let (pi, pj) = process.sample_pair(geometry.tau_d_ns(), rng);
    let theta = geometry.delay_phase();
    TrialFields {
        i_a_i: config.mu_a(),
        i_a_j: config.mu_a(),
        i_b_i: config.mu_b(),
        i_b_j: config.mu_b(),
        dphi_i: wrap_phase(pi + theta),
        dphi_j: wrap_phase(pj + theta),
    }
}

/// Synthesizes the four pulses of one trial. The optical-delay phase
/// 2*pi*delta_l/lambda enters both slots identically: the delay stage
/// shifts the whole train, leaving the i-to-j spacing untouched.
pub fn synthesize_trial(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    geometry: &DelayGeometry,
    key: TrialKey,
) -> Result<TrialFields, Error> {
    config.validate()?;
    process.validate()?;
    Ok(trial_fields(config, process, geometry, &mut key.rng()))
}

/// Runs `trials` Monte Carlo trials at one scan position. Trial t draws
/// from the stream window of `TrialKey { trial: t, ..key_base }`.
pub fn run_point(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    geometry: &DelayGeometry,
    det: &DetectorModel,
    trials: u64,
    key_base: TrialKey,
) -> Result<ScanPoint, Error> {
    config.validate()?;
    process.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let gamma = coherence_envelope(geometry.delta_l_um, &config.spectrum()?);
    let (mut singles_d1, mut singles_d2, mut coincidences) = (0u64, 0u64, 0u64);
    for t in 0..trials {
        let mut rng = TrialKey { trial: t, ..key_base }.rng();
        let f = trial_fields(config, process, geometry, &mut rng);
        let slot_i = (
            OpticalField { intensity: f.i_a_i, phase: 0.0 },
            OpticalField { intensity: f.i_b_i, phase: 0.0 },
        );
        let slot_j = (
            OpticalField { intensity: f.i_a_j, phase: 0.0 },
            OpticalField { intensity: f.i_b_j, phase: 0.0 },
        );
        let (i_c, _) = beamsplitter_intensities(&slot_i.0, &slot_i.1, f.dphi_i, gamma);
        let (_, i_d) = beamsplitter_intensities(&slot_j.0, &slot_j.1, f.dphi_j, gamma);
        let d1 = rng.random::<f64>() < click_probability(i_c, det);
        let d2 = rng.random::<f64>() < click_probability(i_d, det);
        singles_d1 += u64::from(d1);
        singles_d2 += u64::from(d2);
        coincidences += u64::from(d1 && d2);
    }
    let n = trials as f64;
    let rate = coincidences as f64 / n;
    Ok(ScanPoint {
        delta_l_um: geometry.delta_l_um,
        singles_d1,
        singles_d2,
        coincidences,
        trials,
        rate,
        rate_stderr: (rate * (1.0 - rate) / n).sqrt(),
    })
}

/// Runs a scan over the given optical-delay positions, in parallel across
/// positions. Results depend only on (config, process, det, m, grid,
/// trials, seed), never on the thread count.
#[allow(clippy::too_many_arguments)]
pub fn run_scan(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    det: &DetectorModel,
    slot_offset_m: u32,
    deltas_um: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ScanResult, Error> {
    if deltas_um.is_empty() {
        return Err(Error::InvalidParameter("scan grid is empty".into()));
    }
    if deltas_um.len() > u32::MAX as usize {
        return Err(Error::InvalidParameter("scan grid too large".into()));
    }
    let points = deltas_um
        .par_iter()
        .enumerate()
        .map(|(idx, &delta_l)| {
            let geometry =
                DelayGeometry::new(delta_l, config.period_ns, slot_offset_m, config.wavelength_nm)?;
            run_point(
                config,
                process,
                &geometry,
                det,
                trials,
                TrialKey { seed, point: idx as u32, trial: 0 },
            )
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ScanResult { points })
}

/// Inverts a symmetric positive-definite 3x3 matrix via its adjugate.
fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if !det.is_finite() || det.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let sub: Vec<f64> = (0..3)
                .filter(|&i| i != c)
                .flat_map(|i| (0..3).filter(|&j| j != r).map(move |j| m[i][j]))
                .collect();
            let cof = sub[0] * sub[3] - sub[1] * sub[2];
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            inv[r][c] = sign * cof / det;
        }
    }
    Some(inv)
}

/// Estimates the dip visibility of a scan curve.
///
/// Two stages: a boxcar mean of half-width about l_c/2 locates the dip
/// position; a local quadratic least-squares fit over the same window
/// reads off the floor there, immune to picking a single downward noise
/// fluctuation as the minimum. The baseline is the plain mean over points
/// farther than 3*l_c from the dip; at least five such points are
/// required. V = (baseline - floor)/baseline, with the standard error
/// propagated from the per-point counting errors.
pub fn estimate_visibility(
    points: &[ScanPoint],
    spectrum: &SpectralModel,
) -> Result<VisibilityEstimate, Error> {
    if points.len() < 3 {
        return Err(Error::UnsuitableScan(format!(
            "{} scan points cannot locate a dip",
            points.len()
        )));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].delta_l_um.partial_cmp(&points[b].delta_l_um).unwrap());
    let d: Vec<f64> = order.iter().map(|&k| points[k].delta_l_um).collect();
    let r: Vec<f64> = order.iter().map(|&k| points[k].rate).collect();
    let s: Vec<f64> = order.iter().map(|&k| points[k].rate_stderr).collect();
    if d.iter().any(|x| !x.is_finite()) || r.iter().any(|x| !x.is_finite()) {
        return Err(Error::UnsuitableScan("non-finite scan data".into()));
    }

    let mut gaps: Vec<f64> = d.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let step = gaps[gaps.len() / 2];
    if step <= 0.0 {
        return Err(Error::UnsuitableScan("scan grid has duplicate positions".into()));
    }

    let lc = spectrum.coherence_hwhm_um();
    // Half-window of the dip neighborhood, snapped to the grid.
    let hw = (0.5 * lc / step).ceil() * step;
    let in_window = |center: f64, x: f64| (x - center).abs() <= hw * (1.0 + 1e-9);

    // Stage 1: boxcar mean locates the dip.
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..d.len() {
        let (mut sum, mut n) = (0.0, 0u32);
        for i in 0..d.len() {
            if in_window(d[k], d[i]) {
                sum += r[i];
                n += 1;
            }
        }
        let mean = sum / f64::from(n);
        if mean < best.0 {
            best = (mean, k);
        }
    }
    let center = d[best.1];

    // Stage 2: quadratic least squares over the dip window, evaluated at
    // the located center.
    let window: Vec<usize> = (0..d.len()).filter(|&i| in_window(center, d[i])).collect();
    if window.len() < 3 {
        return Err(Error::UnsuitableScan(format!(
            "only {} points inside the dip window",
            window.len()
        )));
    }
    let mut xtx = [[0.0; 3]; 3];
    let mut xtr = [0.0; 3];
    for &i in &window {
        let x = d[i] - center;
        let row = [1.0, x, x * x];
        for a in 0..3 {
            for b in 0..3 {
                xtx[a][b] += row[a] * row[b];
            }
            xtr[a] += row[a] * r[i];
        }
    }
    let inv = invert3(xtx)
        .ok_or_else(|| Error::UnsuitableScan("degenerate dip-window geometry".into()))?;
    let floor = (0..3).map(|a| inv[0][a] * xtr[a]).sum::<f64>();
    // floor = sum_i e_i r_i with e_i the first row of (X^T X)^-1 X^T.
    let mut var_floor = 0.0;
    for &i in &window {
        let x = d[i] - center;
        let e = inv[0][0] + inv[0][1] * x + inv[0][2] * x * x;
        var_floor += e * e * s[i] * s[i];
    }

    let baseline_idx: Vec<usize> =
        (0..d.len()).filter(|&i| (d[i] - center).abs() > 3.0 * lc).collect();
    if baseline_idx.len() < 5 {
        return Err(Error::InsufficientBaseline { needed: 5, found: baseline_idx.len() });
    }
    let nb = baseline_idx.len() as f64;
    let baseline = baseline_idx.iter().map(|&i| r[i]).sum::<f64>() / nb;
    let var_base = baseline_idx.iter().map(|&i| s[i] * s[i]).sum::<f64>() / (nb * nb);
    if baseline <= 0.0 {
        return Err(Error::UnsuitableScan("baseline rate is zero".into()));
    }

    let visibility = (baseline - floor) / baseline;
    let var_v = var_floor / (baseline * baseline)
        + (floor * floor / baseline.powi(4)) * var_base;
    Ok(VisibilityEstimate {
        visibility,
        stderr: var_v.sqrt(),
        dip_position_um: center,
        floor,
        baseline,
    })
}
