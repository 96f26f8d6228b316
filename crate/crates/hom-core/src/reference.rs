//! Exact click-level expectations, computed through routes independent of
//! the Monte Carlo sampler.
//!
//! For a threshold detector on a phase-averaged output, the no-click
//! probability is the average of exp(-eta * I) over the phase, which for
//! a uniform phase is a modified Bessel function:
//!
//! ```text
//!   E_u[ exp(z sin u) ] = I_0(z)
//! ```
//!
//! Everything here reduces to that identity plus, for FM-diffused slot
//! pairs, one numerical average over the wrapped-Gaussian phase offset.
//! These expectations validate the sampler; they share none of its code
//! path beyond the beamsplitter algebra.

use std::f64::consts::{PI, TAU};

use crate::clicksim::{DetectorModel, PulseTrainConfig};
use crate::correlator::{phase_pair_sin_correlation, same_slot_correlation, IntensityMoments};
use crate::error::Error;
use crate::field::{beamsplitter_intensities, coherence_envelope, DelayGeometry, OpticalField};
use crate::phase::PhaseProcess;

/// Modified Bessel function of the first kind, order zero, by power
/// series. Accurate to full precision for the small arguments used here
/// (|x| well below 10).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Average of a 2*pi-periodic function against the wrapped Gaussian of
/// standard deviation `sigma` centered at zero. Trapezoidal quadrature on
/// a periodic integrand converges spectrally; the image sum covers +-6
/// sigma. Normalizing by the summed density absorbs all constant factors.
fn wrapped_normal_average(f: impl Fn(f64) -> f64, sigma: f64) -> f64 {
    const M: usize = 2048;
    let images = (6.0 * sigma / TAU).ceil() as i64 + 1;
    let mut total = 0.0;
    let mut weight = 0.0;
    for k in 0..M {
        let t = TAU * k as f64 / M as f64 - PI;
        let mut dens = 0.0;
        for n in -images..=images {
            let z = (t + TAU * n as f64) / sigma;
            dens += (-0.5 * z * z).exp();
        }
        total += f(t) * dens;
        weight += dens;
    }
    total / weight
}

/// Expected sine product of the relative phases at the two detection
/// slots, the quantity the coincidence interference term is proportional
/// to. Pinned phase: sin^2 of the total phase. Uniform common phase:
/// cos(dphi_ij)/2, damped by exp(-sigma^2/2) when FM noise diffuses the
/// pair over tau_d.
pub fn pair_sin_mean(process: &PhaseProcess, tau_d_ns: f64, delay_phase: f64) -> f64 {
    match *process {
        PhaseProcess::Synchronized { phi0 } => {
            let s = (phi0 + delay_phase).sin();
            s * s
        }
        PhaseProcess::IndependentRf { dphi_ij } => phase_pair_sin_correlation(dphi_ij),
        PhaseProcess::IndependentRfFmNoise { dphi_ij, .. } => {
            let sigma = process.sigma_xi(tau_d_ns);
            phase_pair_sin_correlation(dphi_ij) * (-0.5 * sigma * sigma).exp()
        }
    }
}

/// Expected intensity-product observable <I_C(i) I_D(j)> for the given
/// scenario, from the closed-form correlation with the process's sine-pair
/// average.
pub fn expected_correlation(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    geometry: &DelayGeometry,
) -> Result<f64, Error> {
    config.validate()?;
    let gamma = coherence_envelope(geometry.delta_l_um, &config.spectrum()?);
    let m = IntensityMoments::constant(config.mu_a(), config.mu_b())?;
    same_slot_correlation(&m, pair_sin_mean(process, geometry.tau_d_ns(), geometry.delay_phase()), gamma)
}

/// Exact per-trial click probabilities at one scan position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedRates {
    pub singles_d1: f64,
    pub singles_d2: f64,
    pub coincidence: f64,
}

/// Exact expectations of the Monte Carlo click rates: D1 singles, D2
/// singles, and the coincidence rate.
pub fn expected_click_rates(
    config: &PulseTrainConfig,
    process: &PhaseProcess,
    geometry: &DelayGeometry,
    det: &DetectorModel,
) -> Result<ExpectedRates, Error> {
    config.validate()?;
    process.validate()?;
    let eta = det.efficiency;
    let (mu_a, mu_b) = (config.mu_a(), config.mu_b());
    let gamma = coherence_envelope(geometry.delta_l_um, &config.spectrum()?);
    let theta = geometry.delay_phase();

    if let PhaseProcess::Synchronized { phi0 } = *process {
        // Deterministic intensities: the two thresholds are independent.
        let a = OpticalField::new(mu_a, 0.0)?;
        let b = OpticalField::new(mu_b, 0.0)?;
        let (i_c, i_d) = beamsplitter_intensities(&a, &b, phi0 + theta, gamma);
        let p1 = -(-eta * i_c).exp_m1();
        let p2 = -(-eta * i_d).exp_m1();
        return Ok(ExpectedRates { singles_d1: p1, singles_d2: p2, coincidence: p1 * p2 });
    }

    let dphi_ij = match *process {
        PhaseProcess::IndependentRf { dphi_ij } => dphi_ij,
        PhaseProcess::IndependentRfFmNoise { dphi_ij, .. } => dphi_ij,
        PhaseProcess::Synchronized { .. } => unreachable!(),
    };
    let sigma = process.sigma_xi(geometry.tau_d_ns());
    let half = 0.5 * (mu_a + mu_b);
    let w = eta * gamma * (mu_a * mu_b).sqrt();
    let e = (-eta * half).exp();

    // Marginal of each slot phase is uniform, so both singles share one law.
    let single = 1.0 - e * bessel_i0(w);
    // No-click-on-both term: the two sine terms combine into one harmonic
    // of amplitude 2 w |sin((dphi_ij - xi)/2)|.
    let both_dark = |offset: f64| e * e * bessel_i0(2.0 * w * (0.5 * (dphi_ij - offset)).sin().abs());
    let cross = if sigma < 1e-12 {
        both_dark(0.0)
    } else {
        wrapped_normal_average(both_dark, sigma)
    };
    let coincidence = 1.0 - 2.0 * e * bessel_i0(w) + cross;
    Ok(ExpectedRates { singles_d1: single, singles_d2: single, coincidence })
}
