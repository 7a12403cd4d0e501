//! Aligning a template with pure noise: the averaged output keeps the
//! template's Fourier phases and has (nearly) zero mean.

use crate::alignment::averaged_align;
use crate::sample::generate_samples;
use crate::signal::{dft, Signal};

#[derive(Debug, Clone)]
pub struct NoiseAlignmentReport {
    /// Largest angular difference between the averaged output's phase and
    /// the template's phase over the supported frequencies.
    pub max_phase_error: f64,
    pub output_mean: f64,
    pub average: Signal,
}

/// Aligns `N` pure-noise samples (`x = 0`, noise level `τ`) to the template
/// and compares Fourier phases bin by bin. The template must have full
/// support: every free frequency nonzero.
pub fn noise_phase_alignment(z: &Signal, tau: f64, n: usize, seed: u64) -> NoiseAlignmentReport {
    assert!(tau > 0.0);
    let l = z.len();
    let zh = dft(z);
    let scale = zh.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    for k in 1..l {
        assert!(
            zh.coeffs()[k].norm() > 1e-12 * scale,
            "template must have full spectral support (bin {k} vanishes)"
        );
    }

    let (set, _) = generate_samples(&Signal::zeros(l), tau, n, seed);
    let average = averaged_align(z, &set).average;
    let ah = dft(&average);
    let mut max_err = 0.0f64;
    for k in 1..=(l - 1) / 2 {
        let rel = (ah.coeffs()[k] * zh.coeffs()[k].conj()).arg().abs();
        max_err = max_err.max(rel);
    }
    NoiseAlignmentReport { max_phase_error: max_err, output_mean: average.mean(), average }
}
