//! Two-photon path-amplitude analysis of a cross-slot coincidence.
//!
//! A coincidence (D1 at slot i, D2 at slot j) can arise four ways:
//!
//! * direct pairing: the photon from input A at slot i reaches D1, the
//!   photon from input B at slot j reaches D2;
//! * exchanged pairing: B's slot-i photon reaches D1, A's slot-j photon
//!   reaches D2;
//! * both photons from input A (slots i and j);
//! * both photons from input B.
//!
//! Each path carries beamsplitter factors (transmission 1/sqrt(2),
//! reflection i/sqrt(2)) and the input phases. Paths in the same
//! distinguishability class add as amplitudes; distinct classes add as
//! probabilities. The direct and exchanged pairings cancel at zero
//! detuning (1/2 + i^2/2 = 0); whether the both-from-one-input paths
//! join the interference is what separates a V = 1 single-photon dip from
//! the V = 0.5 ceiling of phase-randomized attenuated lasers.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error};

/// Which coincidence history a path amplitude describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLabel {
    DirectPairing,
    ExchangedPairing,
    BothFromA,
    BothFromB,
}

/// One coincidence history: its complex amplitude and the
/// distinguishability class it belongs to. Equal class tags interfere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAmplitude {
    pub label: PathLabel,
    pub amplitude: Complex64,
    pub class: u8,
}

/// What feeds the two beamsplitter inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Attenuated laser pulses of mean photon number `mu` per pulse.
    WeakCoherent { mu: f64 },
    /// Heralded single photons: exactly one photon per input, never two
    /// from the same side.
    SingleHeralded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    pub kind: SourceKind,
    /// Whether slots i and j of the same input hold a fixed phase and
    /// equal intensity relation. Required for the pairings to interfere
    /// across slots; broken, every path is distinguishable.
    pub within_input_coherent: bool,
}

impl SourceModel {
    pub fn validate(&self) -> Result<(), Error> {
        match self.kind {
            SourceKind::WeakCoherent { mu } => {
                ensure_finite("mu", mu)?;
                if mu <= 0.0 {
                    return Err(Error::InvalidParameter(format!("mu {mu} must be positive")));
                }
                Ok(())
            }
            SourceKind::SingleHeralded => Ok(()),
        }
    }
}

/// Enumerates the four coincidence paths for the given relative phases
/// dphi(i), dphi(j) of input B against input A at the two slots.
///
/// Amplitudes, with the common phase of input A factored out and
/// f the source amplitude scale:
///
/// ```text
///   direct     =  f/2 * exp(i dphi_j)
///   exchanged  = -f/2 * exp(i dphi_i)
///   both from A =  i f/2
///   both from B =  i f/2 * exp(i (dphi_i + dphi_j))
/// ```
///
/// For weak coherent pulses f = mu * exp(-2 mu), the two-photon component
/// of four pulses of mean mu; single heralded photons have f = 1 and the
/// both-from-one-input paths vanish.
pub fn enumerate_paths(
    source: &SourceModel,
    dphi_i: f64,
    dphi_j: f64,
) -> Result<Vec<PathAmplitude>, Error> {
    source.validate()?;
    ensure_finite("dphi_i", dphi_i)?;
    ensure_finite("dphi_j", dphi_j)?;
    let f = match source.kind {
        SourceKind::WeakCoherent { mu } => mu * (-2.0 * mu).exp(),
        SourceKind::SingleHeralded => 1.0,
    };
    let single_only = matches!(source.kind, SourceKind::SingleHeralded);
    let i = Complex64::new(0.0, 1.0);
    let pair_scale = if single_only { Complex64::new(0.0, 0.0) } else { i * (0.5 * f) };
    // The two pairings always share a class: they end in the same
    // detection pattern fed by the same pair of pulses. The
    // both-from-one-input paths join nothing unless the within-input
    // phase relation makes their origin unreadable; without it every
    // path is distinguishable.
    let classes: [u8; 4] = if source.within_input_coherent { [0, 0, 1, 2] } else { [0, 1, 2, 3] };
    Ok(vec![
        PathAmplitude {
            label: PathLabel::DirectPairing,
            amplitude: Complex64::from_polar(0.5 * f, dphi_j),
            class: classes[0],
        },
        PathAmplitude {
            label: PathLabel::ExchangedPairing,
            amplitude: -Complex64::from_polar(0.5 * f, dphi_i),
            class: classes[1],
        },
        PathAmplitude { label: PathLabel::BothFromA, amplitude: pair_scale, class: classes[2] },
        PathAmplitude {
            label: PathLabel::BothFromB,
            amplitude: pair_scale * Complex64::from_polar(1.0, dphi_i + dphi_j),
            class: classes[3],
        },
    ])
}

/// Coincidence probability of a path set: within each distinguishability
/// class amplitudes add, across classes probabilities add.
/// `phase_detuning` is the relative phase the optical delay imprints
/// between the two pairings (twice the single-pass phase shift); it
/// multiplies the exchanged pairing.
pub fn coincidence_probability(paths: &[PathAmplitude], phase_detuning: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, phase_detuning);
    let mut classes: Vec<(u8, Complex64)> = Vec::with_capacity(paths.len());
    for p in paths {
        let amp =
            if p.label == PathLabel::ExchangedPairing { p.amplitude * rot } else { p.amplitude };
        match classes.iter_mut().find(|(c, _)| *c == p.class) {
            Some((_, sum)) => *sum += amp,
            None => classes.push((p.class, amp)),
        }
    }
    classes.iter().map(|(_, sum)| sum.norm_sqr()).sum()
}

/// The non-interfering reference level: every path distinguishable.
pub fn baseline_probability(paths: &[PathAmplitude]) -> f64 {
    paths.iter().map(|p| p.amplitude.norm_sqr()).sum()
}

/// Minimum of `coincidence_probability` over the detuning. Only the class
/// containing the two pairings depends on the detuning; its floor is the
/// squared difference of the summed-magnitude split, reached when the
/// detuning anti-aligns the exchanged pairing with the rest of its class.
pub fn minimum_probability(paths: &[PathAmplitude]) -> f64 {
    let exchanged = paths
        .iter()
        .find(|p| p.label == PathLabel::ExchangedPairing)
        .map(|p| (p.class, p.amplitude))
        .expect("path set always contains the exchanged pairing");
    let mut total = 0.0;
    let mut classmates = Complex64::new(0.0, 0.0);
    let mut classes_seen: Vec<(u8, Complex64)> = Vec::new();
    for p in paths {
        if p.label == PathLabel::ExchangedPairing {
            continue;
        }
        if p.class == exchanged.0 {
            classmates += p.amplitude;
        } else {
            match classes_seen.iter_mut().find(|(c, _)| *c == p.class) {
                Some((_, sum)) => *sum += p.amplitude,
                None => classes_seen.push((p.class, p.amplitude)),
            }
        }
    }
    total += classes_seen.iter().map(|(_, s)| s.norm_sqr()).sum::<f64>();
    let a = classmates.norm();
    let b = exchanged.1.norm();
    total + (a - b) * (a - b)
}

/// Dip visibility the path structure admits:
/// V = 1 - min_detuning P / baseline P.
pub fn oracle_visibility(source: &SourceModel) -> Result<f64, Error> {
    let paths = enumerate_paths(source, 0.0, 0.0)?;
    let baseline = baseline_probability(&paths);
    if baseline <= 0.0 {
        return Err(Error::DegenerateMoments);
    }
    Ok(1.0 - minimum_probability(&paths) / baseline)
}
