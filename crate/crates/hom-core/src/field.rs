//! Single-slot field optics.
//!
//! A pulse slot at each beamsplitter input is described by an intensity
//! (mean photon number per pulse) and an optical phase. The 50:50
//! beamsplitter maps input fields (E_A, E_B) to
//!
//! ```text
//!   E_C = (E_A + i E_B) / sqrt(2)
//!   E_D = (i E_A + E_B) / sqrt(2)
//! ```
//!
//! so with dphi = phase(B) - phase(A) the output intensities are
//!
//! ```text
//!   I_C = I_A/2 + I_B/2 - sqrt(I_A I_B) sin(dphi)
//!   I_D = I_A/2 + I_B/2 + sqrt(I_A I_B) sin(dphi)
//! ```
//!
//! Partial spectral overlap scales the interference cross term by the
//! coherence envelope gamma in [0, 1]; the non-overlapping remainder of
//! each field splits 50:50 without interfering.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{ensure_finite, ensure_nonnegative, ensure_positive, Error};

/// Speed of light in micrometres per nanosecond.
pub const SPEED_OF_LIGHT_UM_PER_NS: f64 = 299_792.458;

/// Wraps an angle to the canonical interval [0, 2*pi).
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// One optical pulse slot: intensity in mean photons per pulse, phase in
/// radians, canonical in [0, 2*pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalField {
    pub intensity: f64,
    pub phase: f64,
}

impl OpticalField {
    pub fn new(intensity: f64, phase: f64) -> Result<Self, Error> {
        ensure_nonnegative("intensity", intensity)?;
        ensure_finite("phase", phase)?;
        Ok(Self { intensity, phase: wrap_phase(phase) })
    }

    /// Complex field amplitude sqrt(I) * exp(i*phase).
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.intensity.sqrt(), self.phase)
    }

    fn from_amplitude(e: Complex64) -> Self {
        let intensity = e.norm_sqr();
        let phase = if intensity == 0.0 { 0.0 } else { wrap_phase(e.arg()) };
        Self { intensity, phase }
    }
}

/// Gaussian spectral line of the two (identical) input trains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralModel {
    pub center_wavelength_nm: f64,
    pub fwhm_bandwidth_nm: f64,
}

impl SpectralModel {
    pub fn new(center_wavelength_nm: f64, fwhm_bandwidth_nm: f64) -> Result<Self, Error> {
        ensure_positive("center_wavelength_nm", center_wavelength_nm)?;
        ensure_positive("fwhm_bandwidth_nm", fwhm_bandwidth_nm)?;
        Ok(Self { center_wavelength_nm, fwhm_bandwidth_nm })
    }

    /// Half-width l_c of the coherence envelope in micrometres: the
    /// path-length offset at which `coherence_envelope` falls to 1/2,
    ///
    /// ```text
    ///   l_c = (2 ln 2 / pi) * lambda^2 / d_lambda
    /// ```
    pub fn coherence_hwhm_um(&self) -> f64 {
        let lc_nm = (2.0 * std::f64::consts::LN_2 / std::f64::consts::PI)
            * self.center_wavelength_nm
            * self.center_wavelength_nm
            / self.fwhm_bandwidth_nm;
        lc_nm * 1e-3
    }
}

/// First-order coherence between the two inputs after a path-length
/// offset `delta_l_um`: gamma = exp(-ln2 * (delta_l / l_c)^2).
///
/// gamma(0) = 1, gamma(l_c) = 1/2, even in delta_l.
pub fn coherence_envelope(delta_l_um: f64, spectrum: &SpectralModel) -> f64 {
    let lc = spectrum.coherence_hwhm_um();
    let r = delta_l_um / lc;
    (-std::f64::consts::LN_2 * r * r).exp()
}

/// Geometry of the delay line and the coincidence slot pairing.
///
/// `delta_l_um` is the fine path-length offset scanned around zero;
/// `slot_offset_m` counts how many pulse slots separate the two detection
/// windows (0 = same slot). The fine offset must stay far below one slot
/// spacing c*T_p so it never re-pairs pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayGeometry {
    pub delta_l_um: f64,
    pub slot_period_ns: f64,
    pub slot_offset_m: u32,
    pub wavelength_nm: f64,
}

impl DelayGeometry {
    pub fn new(
        delta_l_um: f64,
        slot_period_ns: f64,
        slot_offset_m: u32,
        wavelength_nm: f64,
    ) -> Result<Self, Error> {
        ensure_finite("delta_l_um", delta_l_um)?;
        ensure_positive("slot_period_ns", slot_period_ns)?;
        ensure_positive("wavelength_nm", wavelength_nm)?;
        let slot_spacing_um = SPEED_OF_LIGHT_UM_PER_NS * slot_period_ns;
        if delta_l_um.abs() > 0.01 * slot_spacing_um {
            return Err(Error::InvalidParameter(format!(
                "delta_l_um {} exceeds 1% of the slot spacing {} um; the scan offset must not re-pair pulse slots",
                delta_l_um, slot_spacing_um
            )));
        }
        Ok(Self { delta_l_um, slot_period_ns, slot_offset_m, wavelength_nm })
    }

    /// Detection-window separation tau_d = m * T_p in nanoseconds.
    pub fn tau_d_ns(&self) -> f64 {
        f64::from(self.slot_offset_m) * self.slot_period_ns
    }

    /// Phase 2*pi*delta_l/lambda accumulated over the path-length offset.
    pub fn delay_phase(&self) -> f64 {
        TAU * (self.delta_l_um * 1e3) / self.wavelength_nm
    }
}

/// Total relative phase between the two inputs at one slot:
/// the intrinsic phase difference `dphi_ab` plus the geometric term
/// 2*pi*delta_l/lambda. `delta_l` and `wavelength` must share a unit.
/// Result is wrapped to [0, 2*pi).
pub fn relative_phase(dphi_ab: f64, delta_l: f64, wavelength: f64) -> Result<f64, Error> {
    ensure_finite("dphi_ab", dphi_ab)?;
    ensure_finite("delta_l", delta_l)?;
    ensure_positive("wavelength", wavelength)?;
    Ok(wrap_phase(dphi_ab + TAU * delta_l / wavelength))
}

/// Output intensities (I_C, I_D) of the 50:50 beamsplitter for the given
/// relative phase and coherence envelope gamma in [0, 1].
///
/// Only the intensities of `a` and `b` are read here; the relative phase
/// is the explicit `dphi` argument so callers can fold in the geometric
/// delay term. Conserves energy exactly: I_C + I_D = I_A + I_B.
pub fn beamsplitter_intensities(
    a: &OpticalField,
    b: &OpticalField,
    dphi: f64,
    gamma: f64,
) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&gamma), "gamma must lie in [0, 1]");
    let half = 0.5 * (a.intensity + b.intensity);
    let cross = gamma * (a.intensity * b.intensity).sqrt() * dphi.sin();
    // AM-GM: |cross| <= half, so both outputs are nonnegative up to rounding.
    ((half - cross).max(0.0), (half + cross).max(0.0))
}

/// Full complex beamsplitter transfer E_C = (E_A + i E_B)/sqrt(2),
/// E_D = (i E_A + E_B)/sqrt(2). The relative phase is taken from the
/// fields' own stored phases.
pub fn beamsplitter_fields(a: &OpticalField, b: &OpticalField) -> (OpticalField, OpticalField) {
    let ea = a.amplitude();
    let eb = b.amplitude();
    let i = Complex64::new(0.0, 1.0);
    let root_half = std::f64::consts::FRAC_1_SQRT_2;
    let ec = (ea + i * eb) * root_half;
    let ed = (i * ea + eb) * root_half;
    (OpticalField::from_amplitude(ec), OpticalField::from_amplitude(ed))
}

/// Beamsplitter output intensities with partial spectral overlap, computed
/// through the complex-field route: the fraction gamma of field B that
/// shares A's temporal mode interferes, the orthogonal remainder
/// (1 - gamma^2) I_B splits 50:50 incoherently.
///
/// Agrees with `beamsplitter_intensities(a, b, b.phase - a.phase, gamma)`
/// to rounding; the two routes are independent implementations.
pub fn beamsplitter_with_overlap(
    a: &OpticalField,
    b: &OpticalField,
    gamma: f64,
) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&gamma), "gamma must lie in [0, 1]");
    let b_matched = OpticalField {
        intensity: gamma * gamma * b.intensity,
        phase: b.phase,
    };
    let (c, d) = beamsplitter_fields(a, &b_matched);
    let remainder = 0.5 * (1.0 - gamma * gamma) * b.intensity;
    (c.intensity + remainder, d.intensity + remainder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

    fn field(i: f64, p: f64) -> OpticalField {
        OpticalField::new(i, p).unwrap()
    }

    #[test]
    fn relative_phase_adds_geometric_term() {
        // 2*pi * 195/780 = pi/2, so pi/3 + pi/2 = 5*pi/6.
        let got = relative_phase(FRAC_PI_3, 195.0, 780.0).unwrap();
        assert!((got - 5.0 * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn relative_phase_wraps_full_wavelength_to_zero() {
        let got = relative_phase(0.0, 780.0, 780.0).unwrap();
        assert!(got.abs() < 1e-12 || (got - TAU).abs() < 1e-12);
        assert!(got < TAU);
    }

    #[test]
    fn relative_phase_rejects_bad_input() {
        assert!(relative_phase(f64::NAN, 0.0, 780.0).is_err());
        assert!(relative_phase(0.0, f64::INFINITY, 780.0).is_err());
        assert!(relative_phase(0.0, 0.0, 0.0).is_err());
        assert!(relative_phase(0.0, 0.0, -780.0).is_err());
    }

    #[test]
    fn beamsplitter_steers_all_light_at_quarter_phase() {
        let (c, d) = beamsplitter_intensities(&field(1.0, 0.0), &field(1.0, 0.0), FRAC_PI_2, 1.0);
        assert!(c.abs() < 1e-12);
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn beamsplitter_halves_single_input() {
        for dphi in [0.0, 0.7, FRAC_PI_2, 4.0] {
            let (c, d) = beamsplitter_intensities(&field(1.0, 0.0), &field(0.0, 0.0), dphi, 1.0);
            assert!((c - 0.5).abs() < 1e-12);
            assert!((d - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn beamsplitter_partial_phase_splits_unevenly() {
        let (c, d) = beamsplitter_intensities(&field(1.0, 0.0), &field(1.0, 0.0), FRAC_PI_6, 1.0);
        assert!((c - 0.5).abs() < 1e-12);
        assert!((d - 1.5).abs() < 1e-12);
    }

    #[test]
    fn beamsplitter_conserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let ia: f64 = rng.random::<f64>() * 4.0;
            let ib: f64 = rng.random::<f64>() * 4.0;
            let dphi = rng.random::<f64>() * TAU;
            let gamma = rng.random::<f64>();
            let (c, d) = beamsplitter_intensities(&field(ia, 0.0), &field(ib, 0.0), dphi, gamma);
            let total = ia + ib;
            assert!((c + d - total).abs() <= 1e-12 * total.max(1.0));
            assert!(c >= 0.0 && d >= 0.0);
        }
    }

    #[test]
    fn beamsplitter_swap_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let a = field(rng.random::<f64>() * 3.0, 0.0);
            let b = field(rng.random::<f64>() * 3.0, 0.0);
            let dphi = rng.random::<f64>() * TAU;
            let gamma = rng.random::<f64>();
            let (c1, d1) = beamsplitter_intensities(&a, &b, dphi, gamma);
            let (c2, d2) = beamsplitter_intensities(&b, &a, -dphi, gamma);
            assert!((c1 - d2).abs() < 1e-12 && (d1 - c2).abs() < 1e-12);
        }
    }

    #[test]
    fn field_route_matches_intensity_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let a = field(rng.random::<f64>() * 3.0, rng.random::<f64>() * TAU);
            let b = field(rng.random::<f64>() * 3.0, rng.random::<f64>() * TAU);
            let dphi = b.phase - a.phase;
            let (ci, di) = beamsplitter_intensities(&a, &b, dphi, 1.0);
            let (cf, df) = beamsplitter_fields(&a, &b);
            let scale = (a.intensity + b.intensity).max(1.0);
            assert!((ci - cf.intensity).abs() <= 1e-12 * scale);
            assert!((di - df.intensity).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn field_route_example_full_destructive() {
        let (c, d) = beamsplitter_fields(&field(1.0, 0.0), &field(1.0, FRAC_PI_2));
        assert!(c.intensity < 1e-12);
        assert!((d.intensity - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_route_matches_intensity_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10_000 {
            let a = field(rng.random::<f64>() * 3.0, rng.random::<f64>() * TAU);
            let b = field(rng.random::<f64>() * 3.0, rng.random::<f64>() * TAU);
            let gamma = rng.random::<f64>();
            let dphi = b.phase - a.phase;
            let (ci, di) = beamsplitter_intensities(&a, &b, dphi, gamma);
            let (co, d_o) = beamsplitter_with_overlap(&a, &b, gamma);
            let scale = (a.intensity + b.intensity).max(1.0);
            assert!((ci - co).abs() <= 1e-12 * scale);
            assert!((di - d_o).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn coherence_hwhm_matches_gaussian_line_formula() {
        let s = SpectralModel::new(780.0, 15.0).unwrap();
        let lc = s.coherence_hwhm_um();
        let expected_nm = (2.0 * 2.0_f64.ln() / PI) * 780.0 * 780.0 / 15.0;
        assert!((lc - expected_nm * 1e-3).abs() < 1e-12);
        assert!((lc - 17.9).abs() < 0.01, "l_c = {lc} um, expected about 17.9 um");
    }

    #[test]
    fn coherence_envelope_shape() {
        let s = SpectralModel::new(780.0, 15.0).unwrap();
        let lc = s.coherence_hwhm_um();
        assert!((coherence_envelope(0.0, &s) - 1.0).abs() < 1e-15);
        assert!((coherence_envelope(lc, &s) - 0.5).abs() < 1e-12);
        assert!((coherence_envelope(17.9, &s) - 0.5).abs() < 1e-3);
        let mut prev = 1.0;
        for k in 1..=80 {
            let g = coherence_envelope(k as f64, &s);
            assert!(g < prev && g > 0.0);
            assert!((g - coherence_envelope(-(k as f64), &s)).abs() < 1e-15);
            prev = g;
        }
    }

    #[test]
    fn delay_geometry_slot_arithmetic() {
        let tp = 1000.0 / 85.0;
        let g = DelayGeometry::new(30.0, tp, 18, 780.0).unwrap();
        assert!((g.tau_d_ns() - 211.7647058823529).abs() < 1e-9);
        // 30 um = 30000 nm; 30000/780 wavelengths.
        let expected = wrap_phase(TAU * 30_000.0 / 780.0);
        assert!((g.delay_phase().rem_euclid(TAU) - expected).abs() < 1e-9);
    }

    #[test]
    fn delay_geometry_rejects_offsets_near_slot_spacing() {
        let tp = 1000.0 / 85.0;
        // Slot spacing is about 3.5 m; 10 cm is over the 1% guard.
        assert!(DelayGeometry::new(1e5, tp, 0, 780.0).is_err());
        assert!(DelayGeometry::new(60.0, tp, 0, 780.0).is_ok());
    }

    #[test]
    fn optical_field_validation() {
        assert!(OpticalField::new(-0.1, 0.0).is_err());
        assert!(OpticalField::new(f64::NAN, 0.0).is_err());
        assert!(OpticalField::new(1.0, f64::INFINITY).is_err());
        let f = OpticalField::new(1.0, -0.5).unwrap();
        assert!((0.0..TAU).contains(&f.phase));
    }

    #[test]
    fn wrap_phase_stays_in_range() {
        for x in [-1e-17, -0.0, 0.0, TAU, -TAU, 7.0 * TAU + 0.1, -123.456] {
            let w = wrap_phase(x);
            assert!((0.0..TAU).contains(&w), "wrap_phase({x}) = {w}");
        }
    }
}
