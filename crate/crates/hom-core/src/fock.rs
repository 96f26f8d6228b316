//! Photon-number treatment of one pulse pair on the beamsplitter.
//!
//! Everything here is built from the mode transform a -> (c + i d)/sqrt(2),
//! b -> (i c + d)/sqrt(2) acting on number states, with coherent pulses
//! expanded in that basis. It shares no algebra with the intensity-level
//! simulator, which makes it an independent check on the path-amplitude
//! bookkeeping in `paths` and on the closed-form click rates in
//! `reference`.
//!
//! States are truncated at 4 photons total. The neglected weight of a
//! two-pulse coherent input is the Poisson tail P(N >= 5) of mean
//! mu_a + mu_b, about 3e-12 at mu = 0.01 per input, so every comparison
//! below runs comfortably at 1e-9 or tighter.

use num_complex::Complex64;

use crate::clicksim::DetectorModel;
use crate::error::{ensure_finite, ensure_nonnegative, Error};

/// Photon-number truncation: coefficients with p + q above this are
/// dropped (and never populated).
pub const MAX_TOTAL_PHOTONS: usize = 4;

const DIM: usize = MAX_TOTAL_PHOTONS + 1;

fn factorial(n: usize) -> f64 {
    const TABLE: [f64; 9] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];
    TABLE[n]
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// i^k for integer k.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Number-state matrix element of the beamsplitter, <p,q|U|m,n>:
/// the amplitude for m photons in input a and n in input b to leave as
/// p in output c and q in output d.
///
/// Expanding (a -> (c + i d)/sqrt(2), b -> (i c + d)/sqrt(2)) binomially
/// and collecting the c-count at p gives
///
/// ```text
///   <p,q|U|m,n> = 2^-(m+n)/2 sqrt(p! q! / (m! n!))
///                 sum_k C(m,k) C(n,p-k) i^((m-k)+(p-k))
/// ```
///
/// with k over the overlap range. Photon number is conserved, so the
/// element vanishes unless p + q = m + n.
pub fn transition_amplitude(p: usize, q: usize, m: usize, n: usize) -> Complex64 {
    if p + q != m + n {
        return Complex64::new(0.0, 0.0);
    }
    let norm = (factorial(p) * factorial(q) / (factorial(m) * factorial(n))).sqrt()
        / 2f64.powi((m + n) as i32 / 2)
        / if (m + n) % 2 == 1 { std::f64::consts::SQRT_2 } else { 1.0 };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in p.saturating_sub(n)..=m.min(p) {
        sum += binomial(m, k) * binomial(n, p - k) * i_pow((m - k) + (p - k));
    }
    norm * sum
}

/// Number-basis coefficient of a coherent pulse of mean photon number
/// `mu` and phase `phase`:
///
/// ```text
///   c_n = exp(-mu/2) mu^(n/2) exp(i n phase) / sqrt(n!)
/// ```
pub fn coherent_coeff(mu: f64, phase: f64, n: usize) -> Complex64 {
    let mag = (-0.5 * mu).exp() * mu.powf(0.5 * n as f64) / factorial(n).sqrt();
    Complex64::from_polar(mag, phase * n as f64)
}

/// A two-mode photon-number state truncated at `MAX_TOTAL_PHOTONS`.
/// `coeffs[m][n]` is the amplitude of |m photons, n photons>.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    coeffs: [[Complex64; DIM]; DIM],
}

impl TwoModeState {
    /// Product of two coherent pulses, one per mode.
    pub fn coherent_input(
        mu_a: f64,
        phase_a: f64,
        mu_b: f64,
        phase_b: f64,
    ) -> Result<Self, Error> {
        ensure_nonnegative("mu_a", mu_a)?;
        ensure_nonnegative("mu_b", mu_b)?;
        ensure_finite("phase_a", phase_a)?;
        ensure_finite("phase_b", phase_b)?;
        let mut coeffs = [[Complex64::new(0.0, 0.0); DIM]; DIM];
        for (m, row) in coeffs.iter_mut().enumerate() {
            for (n, c) in row.iter_mut().enumerate() {
                if m + n <= MAX_TOTAL_PHOTONS {
                    *c = coherent_coeff(mu_a, phase_a, m) * coherent_coeff(mu_b, phase_b, n);
                }
            }
        }
        Ok(Self { coeffs })
    }

    pub fn coefficient(&self, p: usize, q: usize) -> Complex64 {
        self.coeffs[p][q]
    }

    /// Applies the beamsplitter transform. Photon number is conserved,
    /// so each total-number sector maps within itself and the truncation
    /// loses nothing beyond what the input already lacked.
    pub fn apply_beamsplitter(&self) -> Self {
        let mut out = [[Complex64::new(0.0, 0.0); DIM]; DIM];
        for total in 0..=MAX_TOTAL_PHOTONS {
            for p in 0..=total {
                let q = total - p;
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..=total {
                    let n = total - m;
                    let c = self.coeffs[m][n];
                    if c.norm_sqr() > 0.0 {
                        acc += c * transition_amplitude(p, q, m, n);
                    }
                }
                out[p][q] = acc;
            }
        }
        Self { coeffs: out }
    }

    /// Total probability held below the truncation.
    pub fn total_probability(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Probability that a threshold detector of the given efficiency on
    /// the first mode fires: each photon escapes notice with probability
    /// 1 - eta, independently.
    pub fn click_probability_first(&self, det: &DetectorModel) -> f64 {
        self.click_probability(det, |p, _| p)
    }

    /// Same detector on the second mode.
    pub fn click_probability_second(&self, det: &DetectorModel) -> f64 {
        self.click_probability(det, |_, q| q)
    }

    fn click_probability(&self, det: &DetectorModel, count: fn(usize, usize) -> usize) -> f64 {
        let miss = 1.0 - det.efficiency;
        let mut total = 0.0;
        for (p, row) in self.coeffs.iter().enumerate() {
            for (q, c) in row.iter().enumerate() {
                total += c.norm_sqr() * (1.0 - miss.powi(count(p, q) as i32));
            }
        }
        total
    }
}

/// The four cross-slot coincidence amplitudes of `paths::enumerate_paths`,
/// rebuilt from number-state machinery: each is the product of the
/// coherent coefficients that select one photon configuration of the four
/// pulses with the two single-photon beamsplitter elements that route it
/// into a D1(slot i), D2(slot j) coincidence. Returned in
/// [direct, exchanged, both-from-A, both-from-B] order.
pub fn path_amplitudes_from_fock(
    mu: f64,
    dphi_i: f64,
    dphi_j: f64,
) -> Result<[Complex64; 4], Error> {
    ensure_nonnegative("mu", mu)?;
    ensure_finite("dphi_i", dphi_i)?;
    ensure_finite("dphi_j", dphi_j)?;
    // Input A carries the reference phase; input B sits dphi above it.
    let vac = coherent_coeff(mu, 0.0, 0);
    let one_a = coherent_coeff(mu, 0.0, 1);
    let one_b_i = coherent_coeff(mu, dphi_i, 1);
    let one_b_j = coherent_coeff(mu, dphi_j, 1);
    // Single photons routed to D1 (first output) or D2 (second output).
    let a_to_d1 = transition_amplitude(1, 0, 1, 0);
    let b_to_d1 = transition_amplitude(1, 0, 0, 1);
    let a_to_d2 = transition_amplitude(0, 1, 1, 0);
    let b_to_d2 = transition_amplitude(0, 1, 0, 1);
    let direct = (one_a * vac * a_to_d1) * (vac * one_b_j * b_to_d2);
    let exchanged = (vac * one_b_i * b_to_d1) * (one_a * vac * a_to_d2);
    let both_a = (one_a * vac * a_to_d1) * (one_a * vac * a_to_d2);
    let both_b = (vac * one_b_i * b_to_d1) * (vac * one_b_j * b_to_d2);
    Ok([direct, exchanged, both_a, both_b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clicksim::PulseTrainConfig;
    use crate::field::DelayGeometry;
    use crate::paths::{
        baseline_probability, coincidence_probability, enumerate_paths, SourceKind, SourceModel,
    };
    use crate::phase::PhaseProcess;
    use crate::reference::expected_click_rates;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_photon_elements() {
        let r = FRAC_1_SQRT_2;
        assert!((transition_amplitude(1, 0, 1, 0) - c(r, 0.0)).norm() < 1e-15);
        assert!((transition_amplitude(1, 0, 0, 1) - c(0.0, r)).norm() < 1e-15);
        assert!((transition_amplitude(0, 1, 1, 0) - c(0.0, r)).norm() < 1e-15);
        assert!((transition_amplitude(0, 1, 0, 1) - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_photon_interference_elements() {
        // One photon per input never leaves one per output: the
        // Hong-Ou-Mandel cancellation, straight from the matrix element.
        assert!(transition_amplitude(1, 1, 1, 1).norm() < 1e-15);
        let r = FRAC_1_SQRT_2;
        assert!((transition_amplitude(2, 0, 1, 1) - c(0.0, r)).norm() < 1e-15);
        assert!((transition_amplitude(0, 2, 1, 1) - c(0.0, r)).norm() < 1e-15);
    }

    #[test]
    fn photon_number_is_conserved() {
        assert_eq!(transition_amplitude(1, 0, 1, 1), c(0.0, 0.0));
        assert_eq!(transition_amplitude(2, 1, 1, 1), c(0.0, 0.0));
    }

    #[test]
    fn transform_is_unitary_within_each_sector() {
        for total in 0..=MAX_TOTAL_PHOTONS {
            for m in 0..=total {
                let n = total - m;
                for m2 in 0..=total {
                    let n2 = total - m2;
                    let mut overlap = c(0.0, 0.0);
                    for p in 0..=total {
                        let q = total - p;
                        overlap +=
                            transition_amplitude(p, q, m, n).conj() * transition_amplitude(p, q, m2, n2);
                    }
                    let expected = if m == m2 { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - c(expected, 0.0)).norm() < 1e-10,
                        "columns ({m},{n}) vs ({m2},{n2}): {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn truncated_coherent_input_is_normalized() {
        let state = TwoModeState::coherent_input(0.01, 0.3, 0.01, 1.9).unwrap();
        assert!((state.total_probability() - 1.0).abs() < 1e-10);
        let split = state.apply_beamsplitter();
        // Unitary per sector: splitting costs no probability.
        assert!((split.total_probability() - state.total_probability()).abs() < 1e-12);
    }

    #[test]
    fn splitting_coherent_pulses_gives_coherent_outputs() {
        // The defining property of the transform on classical pulses:
        // coherent in, coherent out, with amplitudes mixed the same way
        // the field-level model mixes them.
        let (mu_a, mu_b) = (0.012, 0.007);
        let (phase_a, phase_b) = (0.4, 2.6);
        let split = TwoModeState::coherent_input(mu_a, phase_a, mu_b, phase_b)
            .unwrap()
            .apply_beamsplitter();
        let alpha = Complex64::from_polar(mu_a.sqrt(), phase_a);
        let beta = Complex64::from_polar(mu_b.sqrt(), phase_b);
        let i = c(0.0, 1.0);
        let alpha_c = (alpha + i * beta) * FRAC_1_SQRT_2;
        let alpha_d = (i * alpha + beta) * FRAC_1_SQRT_2;
        for p in 0..=MAX_TOTAL_PHOTONS {
            for q in 0..=MAX_TOTAL_PHOTONS - p {
                let expected = coherent_coeff(alpha_c.norm_sqr(), alpha_c.arg(), p)
                    * coherent_coeff(alpha_d.norm_sqr(), alpha_d.arg(), q);
                assert!(
                    (split.coefficient(p, q) - expected).norm() < 1e-12,
                    "coefficient ({p},{q})"
                );
            }
        }
    }

    #[test]
    fn click_rates_on_split_pulses_follow_the_exponential_law() {
        let (mu_a, mu_b) = (0.01, 0.01);
        let dphi = 0.9;
        let split =
            TwoModeState::coherent_input(mu_a, 0.0, mu_b, dphi).unwrap().apply_beamsplitter();
        let det = DetectorModel::new(0.6).unwrap();
        let root = (mu_a * mu_b).sqrt();
        let i_c = 0.5 * (mu_a + mu_b) - root * dphi.sin();
        let i_d = 0.5 * (mu_a + mu_b) + root * dphi.sin();
        let p_c = -(-det.efficiency * i_c).exp_m1();
        let p_d = -(-det.efficiency * i_d).exp_m1();
        assert!((split.click_probability_first(&det) - p_c).abs() < 1e-9);
        assert!((split.click_probability_second(&det) - p_d).abs() < 1e-9);
    }

    #[test]
    fn path_amplitudes_match_the_enumerated_paths() {
        let mu = 0.01;
        let (dphi_i, dphi_j) = (0.4, 2.2);
        let from_fock = path_amplitudes_from_fock(mu, dphi_i, dphi_j).unwrap();
        let source =
            SourceModel { kind: SourceKind::WeakCoherent { mu }, within_input_coherent: true };
        let enumerated = enumerate_paths(&source, dphi_i, dphi_j).unwrap();
        for (got, want) in from_fock.iter().zip(&enumerated) {
            assert!(
                (got - want.amplitude).norm() < 1e-12,
                "{:?}: fock {got} vs path {}",
                want.label,
                want.amplitude
            );
        }
    }

    /// Coincidence-pattern amplitude for one photon at D1 in slot i and
    /// one at D2 in slot j, from two independent slot evolutions at the
    /// given pulse phases.
    fn pattern_probability(mu: f64, phases: [f64; 4]) -> f64 {
        let [a_i, b_i, a_j, b_j] = phases;
        let slot_i = TwoModeState::coherent_input(mu, a_i, mu, b_i).unwrap().apply_beamsplitter();
        let slot_j = TwoModeState::coherent_input(mu, a_j, mu, b_j).unwrap().apply_beamsplitter();
        (slot_i.coefficient(1, 0) * slot_j.coefficient(0, 1)).norm_sqr()
    }

    #[test]
    fn phase_averaged_pattern_probability_reproduces_the_class_sums() {
        let mu = 0.01;
        // Phase-locked inputs: only the A-to-B offset is random. The
        // averaged pattern probability must match adding the two pairings
        // as amplitudes while the both-from-one-input paths stand alone.
        let k = 12;
        let mut avg = 0.0;
        for step in 0..k {
            let delta = TAU * step as f64 / k as f64;
            avg += pattern_probability(mu, [0.0, delta, 0.0, delta]);
        }
        avg /= k as f64;
        let coherent =
            SourceModel { kind: SourceKind::WeakCoherent { mu }, within_input_coherent: true };
        let class_sum =
            coincidence_probability(&enumerate_paths(&coherent, 0.7, 0.7).unwrap(), 0.0);
        assert!((avg - class_sum).abs() < 1e-12, "locked: {avg} vs {class_sum}");

        // All four pulse phases independent: every path distinguishable,
        // so the average must land on the plain sum of probabilities.
        let k = 6;
        let mut avg = 0.0;
        for s2 in 0..k {
            for s3 in 0..k {
                for s4 in 0..k {
                    let (u2, u3, u4) = (
                        TAU * s2 as f64 / k as f64,
                        TAU * s3 as f64 / k as f64,
                        TAU * s4 as f64 / k as f64,
                    );
                    avg += pattern_probability(mu, [0.0, u2, u3, u4]);
                }
            }
        }
        avg /= (k * k * k) as f64;
        let incoherent =
            SourceModel { kind: SourceKind::WeakCoherent { mu }, within_input_coherent: false };
        let baseline = baseline_probability(&enumerate_paths(&incoherent, 0.0, 0.0).unwrap());
        assert!((avg - baseline).abs() < 1e-12, "independent: {avg} vs {baseline}");
    }

    #[test]
    fn averaged_click_rates_match_the_closed_forms() {
        // Photon-number route to the Monte Carlo expectations: build each
        // slot's split state at fixed phases, read threshold-detector
        // probabilities, average over the uniform inter-train offset.
        // Grid averaging is exact here: the integrands' Fourier content
        // decays far below 1e-12 well before the 16th harmonic.
        let mu = 0.01;
        let dphi_ij = 1.1;
        let det = DetectorModel::new(0.6).unwrap();
        let k = 16;
        let (mut d1, mut d2, mut coinc) = (0.0, 0.0, 0.0);
        for step in 0..k {
            let u = TAU * step as f64 / k as f64;
            let slot_i =
                TwoModeState::coherent_input(mu, 0.0, mu, u + dphi_ij).unwrap().apply_beamsplitter();
            let slot_j = TwoModeState::coherent_input(mu, 0.0, mu, u).unwrap().apply_beamsplitter();
            let p1 = slot_i.click_probability_first(&det);
            let p2 = slot_j.click_probability_second(&det);
            d1 += p1;
            d2 += p2;
            coinc += p1 * p2;
        }
        let (d1, d2, coinc) = (d1 / k as f64, d2 / k as f64, coinc / k as f64);

        let config = PulseTrainConfig {
            wavelength_nm: 780.0,
            fwhm_bandwidth_nm: 15.0,
            period_ns: 1000.0 / 85.0,
            mean_photons: mu,
            intensity_ratio: 1.0,
        };
        let geometry = DelayGeometry::new(0.0, config.period_ns, 0, 780.0).unwrap();
        let process = PhaseProcess::IndependentRf { dphi_ij };
        let rates = expected_click_rates(&config, &process, &geometry, &det).unwrap();
        assert!((d1 - rates.singles_d1).abs() < 1e-9, "D1 {d1} vs {}", rates.singles_d1);
        assert!((d2 - rates.singles_d2).abs() < 1e-9, "D2 {d2} vs {}", rates.singles_d2);
        assert!((coinc - rates.coincidence).abs() < 1e-9, "coinc {coinc} vs {}", rates.coincidence);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TwoModeState::coherent_input(-0.1, 0.0, 0.1, 0.0).is_err());
        assert!(TwoModeState::coherent_input(0.1, f64::NAN, 0.1, 0.0).is_err());
        assert!(path_amplitudes_from_fock(-1.0, 0.0, 0.0).is_err());
    }
}
