//! Relative-phase processes between the two pulse trains, and the
//! deterministic per-trial random stream they are sampled from.
//!
//! A Monte Carlo trial looks at two pulse slots, i and j = i + m: detector
//! D1 gates on slot i, D2 on slot j. What interference sees is the
//! relative phase dphi_AB at each of those slots. Three source models:
//!
//! * `Synchronized`: both trains carved from one laser, dphi_AB pinned to
//!   a constant phi0 at every slot.
//! * `IndependentRf`: free-running lasers locked to a common RF reference.
//!   The common phase of a trial is uniform on [0, 2*pi), but slots i and
//!   j are rigidly offset by dphi_ij.
//! * `IndependentRfFmNoise`: as above, plus FM noise that diffuses the
//!   phase between the two slots by a Gaussian of width
//!   sigma = 2*pi * (deviation * f_rf / sqrt(3)) * tau_d.
//!
//! Slot convention: slot j carries the common phase u (plus diffusion when
//! present) and slot i leads by the rigid offset,
//!
//! ```text
//!   dphi_AB(i) = u + dphi_ij,    dphi_AB(j) = u (+ xi),
//! ```
//!
//! so dphi_AB(i) - dphi_AB(j) = dphi_ij holds exactly in the noiseless
//! processes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::error::{ensure_finite, ensure_nonnegative, ensure_positive, Error};
use crate::field::wrap_phase;

/// Words of the counter-mode stream reserved for one trial: 16 u32 words,
/// i.e. eight f64 draws. No trial may consume more.
pub const WORDS_PER_TRIAL: u128 = 16;

/// Addresses one Monte Carlo trial: the scan seed, the scan-point index,
/// and the trial index within that point. Every trial owns a disjoint
/// 16-word window of a counter-mode cipher stream, so results are
/// byte-identical no matter how points or trials are scheduled across
/// threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialKey {
    pub seed: u64,
    pub point: u32,
    pub trial: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl TrialKey {
    /// The generator positioned at this trial's private stream window.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(u64::from(self.point));
        rng.set_word_pos(u128::from(self.trial) * WORDS_PER_TRIAL);
        rng
    }
}

/// Root-mean-square phase diffusion accumulated over the detection-window
/// separation `tau_d_ns` by a per-trial frequency offset drawn uniformly
/// within +-(deviation_fraction * rf_frequency):
///
/// ```text
///   sigma = 2*pi * (deviation_fraction * f_rf / sqrt(3)) * tau_d
/// ```
///
/// (1/sqrt(3) is the RMS of a unit uniform deviate). Zero delay or zero
/// deviation gives zero diffusion.
pub fn phase_diffusion_sigma(
    rf_frequency_mhz: f64,
    deviation_fraction: f64,
    tau_d_ns: f64,
) -> Result<f64, Error> {
    ensure_positive("rf_frequency_mhz", rf_frequency_mhz)?;
    ensure_nonnegative("deviation_fraction", deviation_fraction)?;
    ensure_nonnegative("tau_d_ns", tau_d_ns)?;
    if deviation_fraction > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "deviation_fraction {deviation_fraction} must lie in [0, 1]"
        )));
    }
    // MHz * ns = 1e-3 cycles.
    Ok(TAU * (deviation_fraction * rf_frequency_mhz / 3.0_f64.sqrt()) * tau_d_ns * 1e-3)
}

/// How the relative phase dphi_AB behaves across the two detection slots
/// of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseProcess {
    /// Common master laser: dphi_AB = phi0 at every slot.
    Synchronized { phi0: f64 },
    /// Independent lasers on a shared RF reference: uniform common phase,
    /// slots i and j offset by `dphi_ij`.
    IndependentRf { dphi_ij: f64 },
    /// Independent lasers whose RF references carry FM noise, diffusing
    /// the phase between the two slots of a trial.
    IndependentRfFmNoise {
        dphi_ij: f64,
        rf_frequency_mhz: f64,
        deviation_fraction: f64,
    },
}

/// One centered normal via Box-Muller; always consumes exactly two draws.
fn sample_normal(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    // 1 - u1 lies in (0, 1], keeping the log finite.
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    sigma * r * (TAU * u2).cos()
}

impl PhaseProcess {
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            PhaseProcess::Synchronized { phi0 } => ensure_finite("phi0", phi0),
            PhaseProcess::IndependentRf { dphi_ij } => ensure_finite("dphi_ij", dphi_ij),
            PhaseProcess::IndependentRfFmNoise {
                dphi_ij,
                rf_frequency_mhz,
                deviation_fraction,
            } => {
                ensure_finite("dphi_ij", dphi_ij)?;
                phase_diffusion_sigma(rf_frequency_mhz, deviation_fraction, 0.0).map(|_| ())
            }
        }
    }

    /// Phase diffusion between slots separated by `tau_d_ns`; zero for the
    /// noiseless processes.
    pub fn sigma_xi(&self, tau_d_ns: f64) -> f64 {
        match *self {
            PhaseProcess::IndependentRfFmNoise { rf_frequency_mhz, deviation_fraction, .. } => {
                phase_diffusion_sigma(rf_frequency_mhz, deviation_fraction, tau_d_ns)
                    .expect("validated parameters")
            }
            _ => 0.0,
        }
    }

    /// Draws (dphi_AB at slot i, dphi_AB at slot j) for one trial, both
    /// wrapped to [0, 2*pi). Consumes at most three f64 draws from `rng`.
    pub fn sample_pair(&self, tau_d_ns: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
        match *self {
            PhaseProcess::Synchronized { phi0 } => {
                let p = wrap_phase(phi0);
                (p, p)
            }
            PhaseProcess::IndependentRf { dphi_ij } => {
                let u = rng.random::<f64>() * TAU;
                (wrap_phase(u + dphi_ij), u)
            }
            PhaseProcess::IndependentRfFmNoise { dphi_ij, .. } => {
                let u = rng.random::<f64>() * TAU;
                let xi = sample_normal(rng, self.sigma_xi(tau_d_ns));
                (wrap_phase(u + dphi_ij), wrap_phase(u + xi))
            }
        }
    }

    /// Whether the common phase is random from trial to trial.
    pub fn is_random(&self) -> bool {
        !matches!(self, PhaseProcess::Synchronized { .. })
    }
}

/// Keyed one-shot sampler: opens the trial's stream window and draws the
/// phase pair from its head.
pub fn sample_phase_pair(
    process: &PhaseProcess,
    tau_d_ns: f64,
    key: TrialKey,
) -> (f64, f64) {
    process.sample_pair(tau_d_ns, &mut key.rng())
}
