//! Numerical verification of the loss-landscape theory: expected-maximum
//! constants, Monte Carlo estimates of the infinite-data aligning function,
//! sign-flip critical candidates, equidistance and dihedral-angle geometry,
//! torus loss grids with a Morse census, and the pure-noise phase-alignment
//! phenomenon.

mod criticals;
mod gaussian_max;
mod mc;
mod noise;
mod torus;

pub use criticals::{
    dihedral_angles, enumerate_sign_criticals, equidistance_check, sign_masked_signal,
    verify_critical, CriticalCandidate, CriticalClass,
};
pub use gaussian_max::{expected_max_gaussian, EXPECTED_MAX_TABLE};
pub use mc::{mc_expected_align, mc_loss_comparison, sinusoid_local_min_check, LossComparison};
pub use noise::{noise_phase_alignment, NoiseAlignmentReport};
pub use torus::{morse_census, torus_loss_grid, CensusReport, TorusGrid};
