//! Multireference alignment toolkit.
//!
//! Recovers a signal from noisy, randomly shifted copies. The centerpiece is
//! moment-constrained alignment — iterated template alignment projected onto
//! the manifold of signals with a fixed power spectrum — alongside EM,
//! bispectrum-inversion, template, and known-shifts-oracle baselines, a
//! numerical verification suite for the loss-landscape theory, and a
//! benchmark harness. See the `examples/` directory for one runnable program
//! per capability.

pub mod alignment;
pub mod baselines;
pub mod error;
mod fft;
pub mod manifold;
pub mod mca;
pub mod landscape;
pub mod reconstruction;
pub mod rng;
pub mod sample;
pub mod signal;
pub mod util;

pub use alignment::{
    align_sample, averaged_align, best_shift, empirical_loss, tangent_gradient, AlignmentOutcome,
};
pub use error::{MraError, Result};
pub use manifold::{
    manifold_point_from_sample, project_to_manifold, random_manifold_point, rotate_on_manifold,
    signal_with_phases, tangent_project, AmplitudeProfile,
};
pub use mca::{mca_reconstruct, mca_step, InitMode, McaConfig};
pub use reconstruction::{ReconstructionResult, Warning};
pub use sample::{
    estimate_mean, estimate_power_spectrum, estimate_power_spectrum_with, generate_samples,
    raw_power_spectrum, NoiseBias, SampleSet,
};
pub use signal::{
    apply_rotation, autocorrelation, circular_shift, cross_correlation, dft, flip, idft, nrmse,
    CirculantRotation, Signal, Spectrum,
};
