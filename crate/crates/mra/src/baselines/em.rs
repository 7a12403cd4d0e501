//! Expectation–maximization for the marginalized likelihood.
//!
//! The E-step weights each candidate back-shift `s` of sample `ξ` by
//! `w_s ∝ exp(⟨z, σ_s(ξ)⟩/τ²)` — the norm terms of the Gaussian likelihood
//! cancel because shifts are isometries — and the M-step averages the
//! posterior-weighted back-shifted samples. Weights are computed with a
//! log-sum-exp shift for stability; at `τ = 0` the step degenerates to hard
//! assignment, i.e. plain aligned averaging.

use crate::alignment::{averaged_align, CorrScratch, TemplateCorrelator};
use crate::fft;
use crate::rng::stream_rng;
use crate::reconstruction::ReconstructionResult;
use crate::sample::SampleSet;
use crate::signal::Signal;
use crate::util::{add_assign, par_chunk_map};
use num_complex::Complex64;
use rand::seq::index::sample as index_sample;
use rand::Rng;
use std::time::Instant;

const FFT_CROSSOVER: usize = 24;

#[derive(Debug, Clone)]
pub struct EmConfig {
    /// Stop when the template changes by less than this in Euclidean norm.
    pub tol: f64,
    /// Cap on full-data iterations.
    pub max_iter: usize,
    /// Fixed number of warm-start iterations on a sample batch.
    pub warm_start_iters: usize,
    pub warm_start_batch: usize,
    pub seed: u64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
            warm_start_iters: 3000,
            warm_start_batch: 1000,
            seed: 0,
        }
    }
}

/// One EM update of the template estimate.
pub fn em_step(z: &Signal, x: &SampleSet) -> Signal {
    let tau = x.tau();
    if tau == 0.0 {
        return averaged_align(z, x).average;
    }
    let l = z.len();
    assert_eq!(l, x.signal_len());
    let corr = TemplateCorrelator::new(z);
    let inv_tau2 = 1.0 / (tau * tau);
    let n = x.n();
    let chunks = par_chunk_map(n, |range| {
        let mut scratch = CorrScratch::new();
        let mut weights = vec![0.0f64; l];
        let mut xi_hat: Vec<Complex64> = Vec::with_capacity(l);
        let mut w_hat: Vec<Complex64> = Vec::with_capacity(l);
        let mut acc = vec![0.0f64; l];
        for i in range {
            let xi = &x.samples()[i];
            let b = corr.correlations(xi, &mut scratch);
            let peak = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut norm = 0.0;
            for (w, &bs) in weights.iter_mut().zip(b) {
                *w = ((bs - peak) * inv_tau2).exp();
                norm += *w;
            }
            if l > FFT_CROSSOVER {
                // Σ_s w_s σ_s(ξ) is the circular convolution w ∗ ξ.
                xi_hat.clear();
                xi_hat.extend(xi.values().iter().map(|&v| Complex64::new(v, 0.0)));
                fft::analysis_inplace(&mut xi_hat);
                w_hat.clear();
                w_hat.extend(weights.iter().map(|&w| Complex64::new(w, 0.0)));
                fft::analysis_inplace(&mut w_hat);
                for (wh, xh) in w_hat.iter_mut().zip(&xi_hat) {
                    *wh *= xh;
                }
                fft::synthesis_inplace(&mut w_hat);
                let scale = 1.0 / (l as f64 * norm);
                for (a, v) in acc.iter_mut().zip(&w_hat) {
                    *a += v.re * scale;
                }
            } else {
                for (s, &w) in weights.iter().enumerate() {
                    let ws = w / norm;
                    for (n_idx, a) in acc.iter_mut().enumerate() {
                        *a += ws * xi[(n_idx + l - s) % l];
                    }
                }
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
    Signal::new(total)
}

/// Marginal log-likelihood of the data under template `z`, uniform shifts,
/// and Gaussian noise with the set's `τ`. Requires `τ > 0`.
pub fn marginal_log_likelihood(z: &Signal, x: &SampleSet) -> f64 {
    let tau = x.tau();
    assert!(tau > 0.0, "likelihood needs positive noise level");
    let l = z.len() as f64;
    let z_sq = z.norm_squared();
    let inv_tau2 = 1.0 / (tau * tau);
    let corr = TemplateCorrelator::new(z);
    let per_sample: f64 = par_chunk_map(x.n(), |range| {
        let mut scratch = CorrScratch::new();
        let mut acc = 0.0;
        for i in range {
            let xi = &x.samples()[i];
            let b = corr.correlations(xi, &mut scratch);
            let peak = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = peak * inv_tau2
                + b.iter()
                    .map(|&v| ((v - peak) * inv_tau2).exp())
                    .sum::<f64>()
                    .ln();
            acc += lse - 0.5 * (xi.norm_squared() + z_sq) * inv_tau2;
        }
        acc
    })
    .into_iter()
    .sum();
    per_sample
        - x.n() as f64 * (l.ln() + 0.5 * l * (std::f64::consts::TAU * tau * tau).ln())
}

/// Warm-started EM: a fixed number of iterations on a random batch, then
/// full-data iterations until the template change drops below `tol`. The
/// loss trace records the negative mean log-likelihood per full-data
/// iteration (empty at `τ = 0`).
pub fn em_reconstruct(x: &SampleSet, cfg: &EmConfig) -> ReconstructionResult {
    assert!(cfg.tol > 0.0);
    assert!(cfg.warm_start_batch <= x.n() || cfg.warm_start_iters == 0);
    let start = Instant::now();
    let mut rng = stream_rng(cfg.seed, &[0x656d]);
    let init_idx = rng.gen_range(0..x.n());
    let mut z = x.samples()[init_idx].clone();

    if cfg.warm_start_iters > 0 {
        let batch_size = cfg.warm_start_batch.min(x.n());
        let batch: Vec<Signal> = index_sample(&mut rng, x.n(), batch_size)
            .into_iter()
            .map(|i| x.samples()[i].clone())
            .collect();
        let batch_set = SampleSet::new(batch, x.tau());
        for _ in 0..cfg.warm_start_iters {
            z = em_step(&z, &batch_set);
        }
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let next = em_step(&z, x);
        iterations += 1;
        if x.tau() > 0.0 {
            trace.push(-marginal_log_likelihood(&next, x) / x.n() as f64);
        }
        let step: f64 = next
            .values()
            .iter()
            .zip(z.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        z = next;
        if step <= cfg.tol {
            converged = true;
            break;
        }
    }

    ReconstructionResult {
        signal: z,
        iterations,
        converged,
        loss_trace: trace,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        warning: None,
    }
}
