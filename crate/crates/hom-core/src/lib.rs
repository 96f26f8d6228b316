//! Simulation of two-photon interference between weak coherent optical
//! pulse trains on a 50:50 beamsplitter.
//!
//! The crate is organized in layers:
//!
//! * [`field`]: single-slot optics; beamsplitter transfer, relative phase
//!   accumulated over a path-length offset, and the spectral coherence
//!   envelope of a Gaussian line.
//! * [`phase`]: the per-trial random phase processes of the two input
//!   trains, with a counter-based RNG scheme that makes every trial an
//!   independent, reproducible random stream.
//! * [`correlator`]: analytic intensity-correlation formulas; the
//!   same-slot and cross-slot coincidence expectations and the classical
//!   visibility bound they imply.
//! * [`clicksim`]: Monte Carlo click simulation of a path-length scan
//!   with non-number-resolving detectors, plus the dip visibility
//!   estimator applied to the resulting curves.
//! * [`paths`]: two-photon path-amplitude analysis: the four ways a
//!   coincidence can occur, grouped into distinguishability classes.
//! * [`fock`]: brute-force truncated Fock-space beamsplitter transform
//!   used to cross-check the path amplitudes and click probabilities.
//! * [`reference`]: detector-level expected rates by quadrature,
//!   independent of the Monte Carlo sampling path.

pub mod clicksim;
pub mod correlator;
pub mod error;
pub mod field;
pub mod fock;
pub mod paths;
pub mod phase;
pub mod reference;

pub use error::Error;
