//! Monte Carlo estimates of the infinite-data aligning function and paired
//! loss comparisons with common random numbers.

use crate::alignment::{CorrScratch, TemplateCorrelator};
use crate::manifold::{rotate_on_manifold, AmplitudeProfile};
use crate::rng::standard_normal_vec;
use crate::signal::Signal;
use crate::util::{add_assign, par_chunk_map};

const DRAW_STREAM: u64 = 0x6d635f64726177;

/// Monte Carlo estimate of `σ̄_τ(z; x)`: align `x + ε_m` to the template for
/// `M` independent noise draws and average. Draw `m` comes from its own
/// counter-derived stream, so two calls with the same seed see the same
/// noise regardless of the template — the common-random-numbers device used
/// by every paired comparison here.
pub fn mc_expected_align(z: &Signal, x: &Signal, tau: f64, m: usize, seed: u64) -> Signal {
    assert!(m >= 1);
    assert!(!z.is_constant(), "alignment needs a non-constant template");
    assert_eq!(z.len(), x.len());
    let l = x.len();
    let corr = TemplateCorrelator::new(z);
    let chunks = par_chunk_map(m, |range| {
        let mut scratch = CorrScratch::new();
        let mut acc = vec![0.0; l];
        for draw in range {
            let noise = standard_normal_vec(seed, &[DRAW_STREAM, draw as u64], l);
            let xi = Signal::new(
                x.values()
                    .iter()
                    .zip(&noise)
                    .map(|(&v, &e)| v + tau * e)
                    .collect(),
            );
            let r = corr.best_shift(&xi, &mut scratch);
            for n_idx in 0..l {
                acc[n_idx] += xi[(n_idx + l - r) % l];
            }
        }
        acc
    });
    let mut total = vec![0.0; l];
    for c in chunks {
        add_assign(&mut total, &c);
    }
    for v in &mut total {
        *v /= m as f64;
    }
    Signal::new(total)
}

/// Paired difference `loss(candidate) − loss(base)` under common noise.
#[derive(Debug, Clone, Copy)]
pub struct LossComparison {
    pub mean_diff: f64,
    pub se_diff: f64,
}

impl LossComparison {
    /// The candidate's loss exceeds the base's by at least `k` standard
    /// errors.
    pub fn exceeds_by(&self, k: f64) -> bool {
        self.mean_diff > k * self.se_diff
    }
}

/// For each candidate, the paired Monte Carlo estimate of
/// `L_τ(candidate; x) − L_τ(base; x)` with one common noise draw per term.
/// Pairing cancels most of the noise variance, so nearby points on the
/// manifold can be ranked with modest `M`.
pub fn mc_loss_comparison(
    base: &Signal,
    candidates: &[Signal],
    x: &Signal,
    tau: f64,
    m: usize,
    seed: u64,
) -> Vec<LossComparison> {
    assert!(m >= 2);
    let l = x.len();
    let base_corr = TemplateCorrelator::new(base);
    let base_sq = base.norm_squared();
    let cand_corr: Vec<TemplateCorrelator> =
        candidates.iter().map(TemplateCorrelator::new).collect();
    let cand_sq: Vec<f64> = candidates.iter().map(|c| c.norm_squared()).collect();

    let chunks = par_chunk_map(m, |range| {
        let mut scratch = CorrScratch::new();
        let mut sums = vec![0.0; candidates.len()];
        let mut sq_sums = vec![0.0; candidates.len()];
        for draw in range {
            let noise = standard_normal_vec(seed, &[DRAW_STREAM, draw as u64], l);
            let xi = Signal::new(
                x.values()
                    .iter()
                    .zip(&noise)
                    .map(|(&v, &e)| v + tau * e)
                    .collect(),
            );
            let xi_sq = xi.norm_squared();
            let loss_of = |corr: &TemplateCorrelator, z_sq: f64, scratch: &mut CorrScratch| {
                let c = corr.correlations(&xi, scratch);
                let best = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                0.5 * (z_sq + xi_sq - 2.0 * best).max(0.0)
            };
            let base_loss = loss_of(&base_corr, base_sq, &mut scratch);
            for (j, corr) in cand_corr.iter().enumerate() {
                let diff = loss_of(corr, cand_sq[j], &mut scratch) - base_loss;
                sums[j] += diff;
                sq_sums[j] += diff * diff;
            }
        }
        (sums, sq_sums)
    });

    let mut sums = vec![0.0; candidates.len()];
    let mut sq_sums = vec![0.0; candidates.len()];
    for (s, q) in chunks {
        add_assign(&mut sums, &s);
        add_assign(&mut sq_sums, &q);
    }
    (0..candidates.len())
        .map(|j| {
            let mean = sums[j] / m as f64;
            let var = ((sq_sums[j] / m as f64 - mean * mean) * m as f64 / (m - 1) as f64).max(0.0);
            LossComparison { mean_diff: mean, se_diff: (var / m as f64).sqrt() }
        })
        .collect()
}

/// Checks that a pure sinusoid is a strict local minimum of the expected
/// loss on its circle manifold: compares the loss at `x` against rotations
/// by `±0.05·j` radians for `j = 1..=n_directions`, demanding a margin of
/// three paired standard errors everywhere.
pub fn sinusoid_local_min_check(
    l: usize,
    k: usize,
    c: f64,
    tau: f64,
    m: usize,
    n_directions: usize,
    seed: u64,
) -> bool {
    assert!(l % 2 == 1, "circle-manifold check expects odd length");
    assert!(k % l != 0, "carrier frequency must be nonzero mod L");
    assert!(c > 0.0 && n_directions >= 1);
    let x = Signal::new(
        (0..l)
            .map(|n| c * (std::f64::consts::TAU * (k * n) as f64 / l as f64).cos())
            .collect(),
    );
    let profile = AmplitudeProfile::from_signal(&x);
    let mut candidates = Vec::new();
    for j in 1..=n_directions {
        let theta = 0.05 * j as f64;
        for sign in [-1.0, 1.0] {
            candidates.push(rotate_on_manifold(&x, &profile, &[sign * theta]));
        }
    }
    mc_loss_comparison(&x, &candidates, &x, tau, m, seed)
        .iter()
        .all(|comp| comp.exceeds_by(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::gaussian_max::expected_max_gaussian;

    #[test]
    fn near_zero_noise_reduces_to_clean_alignment() {
        let z = Signal::new(vec![1.0, 0.2, -0.7, 0.4, 0.0]);
        let x = Signal::new(vec![0.3, 1.1, -0.2, 0.0, 0.5]);
        let mc = mc_expected_align(&z, &x, 1e-10, 100, 1);
        let clean = crate::alignment::align_sample(&z, &x);
        for (a, b) in mc.values().iter().zip(clean.values()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn delta_template_against_noise_gives_expected_max() {
        // z = scaled delta, x = 0, τ = 1: the aligned average puts the max
        // of L normals at coordinate 0 and −a_L/(L−1) elsewhere.
        let l = 5;
        let z = Signal::new(vec![3.0, 0.0, 0.0, 0.0, 0.0]);
        let x = Signal::zeros(l);
        let m = 1_000_000;
        let out = mc_expected_align(&z, &x, 1.0, m, 42);
        let a5 = expected_max_gaussian(5, 64);
        assert!((out[0] - a5).abs() < 0.01, "coordinate 0: {} vs {a5}", out[0]);
        for n in 1..l {
            assert!((out[n] + a5 / 4.0).abs() < 0.01, "coordinate {n}: {}", out[n]);
        }
    }

    #[test]
    fn mean_is_preserved() {
        let z = Signal::new(vec![1.0, -0.5, 0.3, 0.0, 0.2, -0.6, 0.1]);
        let x = Signal::new(vec![0.4, 0.4, -0.1, 0.3, 0.0, -0.2, 0.6]);
        let m = 200_000;
        let out = mc_expected_align(&z, &x, 0.8, m, 7);
        let band = 4.0 * 0.8 / ((7 * m) as f64).sqrt();
        assert!((out.mean() - x.mean()).abs() < band);
    }

    #[test]
    fn scale_law_with_common_random_numbers() {
        // σ̄_τ(z; x) = τ·σ̄_1(z/τ; x/τ) draw-for-draw under a shared seed.
        let z = Signal::new(vec![1.0, 0.1, -0.4, 0.2, -0.3]);
        let x = Signal::new(vec![0.2, 0.9, -0.5, 0.0, 0.1]);
        let tau = 0.6;
        let m = 5_000;
        let lhs = mc_expected_align(&z, &x, tau, m, 11);
        let rhs = mc_expected_align(&z.scaled(1.0 / tau), &x.scaled(1.0 / tau), 1.0, m, 11)
            .scaled(tau);
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sinusoid_is_a_local_minimum() {
        assert!(sinusoid_local_min_check(5, 1, 1.0, 0.5, 200_000, 2, 3));
    }

    #[test]
    fn near_clean_rotations_are_strictly_worse() {
        // τ → 0: loss at x vanishes while any rotation pays the geometry.
        assert!(sinusoid_local_min_check(5, 1, 1.0, 1e-8, 2_000, 2, 5));
    }
}
