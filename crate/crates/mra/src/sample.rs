//! Observation sets `ξ_i = σ_{r_i}(x) + ε_i` and their moment estimators.

use crate::manifold::AmplitudeProfile;
use crate::rng::stream_rng;
use crate::signal::{circular_shift, dft, Signal};
use crate::util::{add_assign, par_chunk_map, par_sum};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// `N` observed signals of a common length plus the known noise level `τ`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    samples: Vec<Signal>,
    tau: f64,
}

impl SampleSet {
    pub fn new(samples: Vec<Signal>, tau: f64) -> Self {
        assert!(!samples.is_empty(), "sample set needs at least one signal");
        assert!(tau >= 0.0 && tau.is_finite());
        let l = samples[0].len();
        assert!(samples.iter().all(|s| s.len() == l), "samples must share a length");
        Self { samples, tau }
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn signal_len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn samples(&self) -> &[Signal] {
        &self.samples
    }
}

/// Which per-bin constant the power-spectrum estimator subtracts to remove
/// the noise contribution `E|ε̂[k]|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseBias {
    /// `L·τ²` — the expectation of `|ε̂[k]|²` under the unnormalized
    /// transform; keeps the estimator unbiased.
    #[default]
    LTauSquared,
    /// `τ²` — kept available for comparison with formulations that assume a
    /// normalized transform.
    TauSquared,
}

/// Sample estimate of the signal mean: `(1/(NL))·Σ_j Σ_n ξ_j[n]`.
pub fn estimate_mean(x: &SampleSet) -> f64 {
    let n = x.n();
    let l = x.signal_len();
    par_sum(n, |i| x.samples()[i].values().iter().sum::<f64>()) / (n as f64 * l as f64)
}

/// Per-bin averages `(1/N)·Σ_j (|ξ̂_j[k]|² − bias)` before clamping; exposed
/// so the estimator's unbiasedness can be checked directly.
pub fn raw_power_spectrum(x: &SampleSet, bias: NoiseBias) -> Vec<f64> {
    let n = x.n();
    let l = x.signal_len();
    let sub = match bias {
        NoiseBias::LTauSquared => l as f64 * x.tau() * x.tau(),
        NoiseBias::TauSquared => x.tau() * x.tau(),
    };
    let chunks = par_chunk_map(n, |range| {
        let mut acc = vec![0.0; l];
        for i in range {
            let s = dft(&x.samples()[i]);
            for k in 0..l {
                acc[k] += s.coeffs()[k].norm_sqr() - sub;
            }
        }
        acc
    });
    let mut total = vec![0.0; l];
    for c in chunks {
        add_assign(&mut total, &c);
    }
    for v in &mut total {
        *v /= n as f64;
    }
    total
}

/// Unbiased power-spectrum estimate turned into an amplitude profile:
/// `amps[k] = sqrt(max(raw[k], 0))` for `k ≥ 1`, DC replaced by
/// `L·estimate_mean` so the signed mean survives.
pub fn estimate_power_spectrum(x: &SampleSet) -> AmplitudeProfile {
    estimate_power_spectrum_with(x, NoiseBias::LTauSquared)
}

pub fn estimate_power_spectrum_with(x: &SampleSet, bias: NoiseBias) -> AmplitudeProfile {
    let raw = raw_power_spectrum(x, bias);
    let l = x.signal_len();
    let mean_coeff = l as f64 * estimate_mean(x);
    let mut amps = vec![0.0; l];
    amps[0] = mean_coeff.abs();
    for k in 1..=(l - 1) / 2 {
        let a = raw[k].max(0.0).sqrt();
        amps[k] = a;
        amps[l - k] = a;
    }
    if l % 2 == 0 {
        amps[l / 2] = raw[l / 2].max(0.0).sqrt();
    }
    AmplitudeProfile::new(amps, mean_coeff)
}

/// Draws `N` observations `σ_{r_i}(x) + ε_i` with uniform shifts and i.i.d.
/// `N(0, τ²)` noise. Sample `i` comes from its own counter-derived stream, so
/// it is reproducible independently of `N`; the shifts are drawn before the
/// noise, so they match across noise levels for a fixed seed.
pub fn generate_samples(x: &Signal, tau: f64, n: usize, seed: u64) -> (SampleSet, Vec<usize>) {
    assert!(n >= 1);
    let l = x.len();
    let chunks = par_chunk_map(n, |range| {
        let mut samples = Vec::with_capacity(range.len());
        let mut shifts = Vec::with_capacity(range.len());
        for i in range {
            let mut rng = stream_rng(seed, &[0x67656e, i as u64]);
            let r = rng.gen_range(0..l);
            let shifted = circular_shift(x, r as i64);
            let values = shifted
                .values()
                .iter()
                .map(|&v| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    v + tau * e
                })
                .collect();
            samples.push(Signal::new(values));
            shifts.push(r);
        }
        (samples, shifts)
    });
    let mut samples = Vec::with_capacity(n);
    let mut shifts = Vec::with_capacity(n);
    for (s, r) in chunks {
        samples.extend(s);
        shifts.extend(r);
    }
    (SampleSet::new(samples, tau), shifts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::circular_shift;

    fn square_wave(l: usize, width: usize, height: f64) -> Signal {
        let mut v = vec![0.0; l];
        for item in v.iter_mut().take(width) {
            *item = height;
        }
        Signal::new(v)
    }

    #[test]
    fn mean_of_noiseless_shifts_is_exact() {
        let x = square_wave(9, 4, 1.0);
        let shifts: Vec<Signal> = (0..9).map(|r| circular_shift(&x, r)).collect();
        let set = SampleSet::new(shifts, 0.0);
        assert!((estimate_mean(&set) - x.mean()).abs() < 1e-14);
    }

    #[test]
    fn mean_estimate_within_clt_band() {
        // τ=1, N=10⁵ Monte Carlo: the estimator is N(m1, τ²/(LN)).
        let x = square_wave(41, 21, 1.0);
        let (set, _) = generate_samples(&x, 1.0, 100_000, 424242);
        let est = estimate_mean(&set);
        let std = 1.0 / ((41.0 * 100_000.0) as f64).sqrt();
        assert!(
            (est - 21.0 / 41.0).abs() < 4.0 * std,
            "estimate {est} outside 4σ of {}",
            21.0 / 41.0
        );
    }

    #[test]
    fn noiseless_power_spectrum_is_exact() {
        let x = square_wave(11, 5, 1.0);
        let shifts: Vec<Signal> = (0..11).map(|r| circular_shift(&x, r)).collect();
        let set = SampleSet::new(shifts, 0.0);
        let profile = estimate_power_spectrum(&set);
        let exact = AmplitudeProfile::from_signal(&x);
        for k in 0..11 {
            assert!(
                (profile.amps()[k] - exact.amps()[k]).abs() < 1e-9,
                "bin {k}"
            );
        }
        assert!((profile.mean_coeff() - exact.mean_coeff()).abs() < 1e-9);
    }

    #[test]
    fn square_wave_dc_power_before_replacement() {
        let x = square_wave(41, 21, 1.0);
        let set = SampleSet::new(vec![x], 0.0);
        let raw = raw_power_spectrum(&set, NoiseBias::LTauSquared);
        assert!((raw[0] - 441.0).abs() < 1e-9);
    }

    #[test]
    fn pure_noise_spectrum_shrinks_with_n() {
        // x = 0, τ = 1: raw estimates concentrate around zero at rate
        // ~ L·τ²/√N per bin.
        let l = 7;
        let n = 100_000;
        let (set, _) = generate_samples(&Signal::zeros(l), 1.0, n, 77);
        let raw = raw_power_spectrum(&set, NoiseBias::LTauSquared);
        let band = 4.0 * (l as f64) / (n as f64).sqrt();
        for (k, &v) in raw.iter().enumerate() {
            assert!(v.abs() < band, "bin {k}: {v} exceeds {band}");
        }
    }

    #[test]
    fn unbiasedness_over_replicates() {
        // 200 seeded replicates at N=10³, τ=1: the mean of raw estimates per
        // bin stays within 4 standard errors of |x̂[k]|².
        let x = square_wave(9, 4, 1.0);
        let truth: Vec<f64> = dft(&x).coeffs().iter().map(|c| c.norm_sqr()).collect();
        let reps = 200;
        let n = 1000;
        let mut sums = vec![0.0; 9];
        let mut sq_sums = vec![0.0; 9];
        for rep in 0..reps {
            let (set, _) = generate_samples(&x, 1.0, n, 1000 + rep as u64);
            let raw = raw_power_spectrum(&set, NoiseBias::LTauSquared);
            for k in 0..9 {
                sums[k] += raw[k];
                sq_sums[k] += raw[k] * raw[k];
            }
        }
        for k in 0..9 {
            let mean = sums[k] / reps as f64;
            let var = (sq_sums[k] / reps as f64 - mean * mean).max(0.0);
            let se = (var / reps as f64).sqrt();
            assert!(
                (mean - truth[k]).abs() <= 4.0 * se + 1e-9,
                "bin {k}: mean {mean} vs truth {} (se {se})",
                truth[k]
            );
        }
    }

    #[test]
    fn generation_is_deterministic_and_n_independent() {
        let x = square_wave(8, 3, 1.0);
        let (a, sa) = generate_samples(&x, 0.5, 50, 5);
        let (b, sb) = generate_samples(&x, 0.5, 50, 5);
        assert_eq!(sa, sb);
        for (p, q) in a.samples().iter().zip(b.samples()) {
            assert_eq!(p.values(), q.values());
        }
        // Prefix property: the first samples do not depend on N.
        let (c, sc) = generate_samples(&x, 0.5, 10, 5);
        assert_eq!(&sa[..10], &sc[..]);
        for i in 0..10 {
            assert_eq!(a.samples()[i].values(), c.samples()[i].values());
        }
    }

    #[test]
    fn noiseless_samples_are_exact_shifts() {
        let x = square_wave(10, 4, 2.0);
        let (set, shifts) = generate_samples(&x, 0.0, 30, 3);
        for (s, &r) in set.samples().iter().zip(&shifts) {
            assert_eq!(s.values(), circular_shift(&x, r as i64).values());
        }
    }

    #[test]
    fn shift_histogram_is_uniform() {
        let x = square_wave(5, 2, 1.0);
        let n = 100_000;
        let (_, shifts) = generate_samples(&x, 0.0, n, 99);
        let mut counts = [0usize; 5];
        for &r in &shifts {
            counts[r] += 1;
        }
        let expect = n as f64 / 5.0;
        let sigma = (n as f64 * (1.0 / 5.0) * (4.0 / 5.0)).sqrt();
        for (r, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 5.0 * sigma,
                "shift {r}: count {c} vs {expect}"
            );
        }
    }
}
