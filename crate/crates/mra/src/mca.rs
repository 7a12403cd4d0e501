//! Moment-constrained alignment: iterated template alignment with projection
//! back onto the estimated phase manifold.
//!
//! One step with step size `α` is
//! `z ← proj((1−α)·z + α·σ̄(z; X))`; at `α = 1` this is exactly the
//! align-then-project fixed-point iteration, which is the configuration used
//! throughout the experiments.

use crate::alignment::averaged_align;
use crate::manifold::{
    manifold_point_from_sample, project_to_manifold, random_manifold_point, AmplitudeProfile,
};
use crate::reconstruction::{ReconstructionResult, Warning};
use crate::rng::stream_rng;
use crate::sample::{estimate_power_spectrum, SampleSet};
use crate::signal::Signal;
use rand::Rng;
use std::time::Instant;

/// How the starting template is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Project a randomly chosen data sample onto the manifold.
    #[default]
    Sample,
    /// Independent uniform phases on the supported frequencies.
    RandomPhase,
}

#[derive(Debug, Clone)]
pub struct McaConfig {
    /// Fixed-point tolerance on `‖z_m − z_{m−1}‖`.
    pub delta: f64,
    /// Step size in `(0, 1]`.
    pub alpha: f64,
    pub max_iter: usize,
    pub init_seed: u64,
    pub init_mode: InitMode,
    /// Record the empirical loss after each step. Doubles the per-iteration
    /// cost, so timing runs switch it off.
    pub track_loss: bool,
}

impl Default for McaConfig {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            alpha: 1.0,
            max_iter: 5000,
            init_seed: 0,
            init_mode: InitMode::Sample,
            track_loss: true,
        }
    }
}

impl McaConfig {
    fn validate(&self) {
        assert!(self.delta > 0.0);
        assert!(self.alpha > 0.0 && self.alpha <= 1.0);
        assert!(self.max_iter >= 1);
    }
}

/// One projected-gradient step from a manifold point.
pub fn mca_step(z: &Signal, x: &SampleSet, profile: &AmplitudeProfile, alpha: f64) -> Signal {
    let avg = averaged_align(z, x).average;
    let blended = if alpha == 1.0 {
        avg
    } else {
        Signal::new(
            z.values()
                .iter()
                .zip(avg.values())
                .map(|(zi, ai)| (1.0 - alpha) * zi + alpha * ai)
                .collect(),
        )
    };
    project_to_manifold(&blended, profile)
}

/// Runs the fixed-point iteration until the step change drops below
/// `cfg.delta` or `cfg.max_iter` is reached. When no profile is supplied it
/// is estimated from the data.
pub fn mca_reconstruct(
    x: &SampleSet,
    cfg: &McaConfig,
    profile: Option<&AmplitudeProfile>,
) -> ReconstructionResult {
    cfg.validate();
    let start = Instant::now();
    let estimated;
    let profile = match profile {
        Some(p) => p,
        None => {
            estimated = estimate_power_spectrum(x);
            &estimated
        }
    };

    if profile.is_degenerate() {
        return ReconstructionResult {
            signal: profile.constant_signal(),
            iterations: 0,
            converged: true,
            loss_trace: Vec::new(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            warning: Some(Warning::DegenerateProfile),
        };
    }

    let mut z = match cfg.init_mode {
        InitMode::Sample => {
            let idx = stream_rng(cfg.init_seed, &[0x696e6974]).gen_range(0..x.n());
            manifold_point_from_sample(profile, &x.samples()[idx])
        }
        InitMode::RandomPhase => random_manifold_point(profile, cfg.init_seed),
    };

    let mut loss_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let next = mca_step(&z, x, profile, cfg.alpha);
        iterations += 1;
        let step_norm = step_norm(&next, &z);
        if cfg.track_loss {
            loss_trace.push(crate::alignment::empirical_loss(&next, x));
        }
        z = next;
        if step_norm <= cfg.delta {
            converged = true;
            break;
        }
    }

    ReconstructionResult {
        signal: z,
        iterations,
        converged,
        loss_trace,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        warning: None,
    }
}

fn step_norm(a: &Signal, b: &Signal) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::random_manifold_point;
    use crate::sample::generate_samples;
    use crate::signal::{circular_shift, dft, nrmse};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn square_wave(l: usize, width: usize) -> Signal {
        let mut v = vec![0.0; l];
        for item in v.iter_mut().take(width) {
            *item = 1.0;
        }
        Signal::new(v)
    }

    #[test]
    fn shifts_of_template_are_a_fixed_point() {
        let profile = AmplitudeProfile::new(vec![0.0, 1.0, 0.7, 0.7, 1.0], 0.0);
        let z = random_manifold_point(&profile, 3);
        let samples: Vec<Signal> = (0..5).map(|r| circular_shift(&z, r)).collect();
        let set = SampleSet::new(samples, 0.0);
        let next = mca_step(&z, &set, &profile, 1.0);
        for (a, b) in next.values().iter().zip(z.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_alpha_keeps_manifold_points_fixed() {
        let profile = AmplitudeProfile::new(vec![0.0, 1.0, 0.7, 0.7, 1.0], 0.0);
        let z = random_manifold_point(&profile, 4);
        let set = SampleSet::new(vec![Signal::new(vec![0.3, -0.1, 0.9, 0.0, -0.5])], 1.0);
        // α → 0 limit: the blend is z itself, and projection fixes it.
        let next = mca_step(&z, &set, &profile, 1e-12);
        for (a, b) in next.values().iter().zip(z.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn step_matches_bruteforce_align_project() {
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        let x = Signal::new(vec![1.0, -0.3, 0.4, 0.0, -0.8, 0.2, 0.6]);
        let profile = AmplitudeProfile::from_signal(&x);
        let samples: Vec<Signal> = (0..64)
            .map(|_| circular_shift(&x, rng.gen_range(0..7) as i64))
            .collect();
        let set = SampleSet::new(samples, 0.0);
        let z0 = random_manifold_point(&profile, 9);
        let fast = mca_step(&z0, &set, &profile, 1.0);

        // Independent O(NL²) reference: exhaustive shift search per sample.
        let mut sum = vec![0.0; 7];
        for xi in set.samples() {
            let mut best_r = 0;
            let mut best = f64::NEG_INFINITY;
            for r in 0..7 {
                let s = circular_shift(xi, r);
                let dot: f64 = z0
                    .values()
                    .iter()
                    .zip(s.values())
                    .map(|(a, b)| a * b)
                    .sum();
                if dot > best {
                    best = dot;
                    best_r = r;
                }
            }
            let s = circular_shift(xi, best_r);
            for (acc, v) in sum.iter_mut().zip(s.values()) {
                *acc += v / 64.0;
            }
        }
        let slow = crate::manifold::project_to_manifold(&Signal::new(sum), &profile);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn noiseless_reconstruction_is_exact() {
        let x = square_wave(41, 21);
        let (set, _) = generate_samples(&x, 0.0, 100, 7);
        let profile = AmplitudeProfile::from_signal(&x);
        let cfg = McaConfig::default();
        let out = mca_reconstruct(&set, &cfg, Some(&profile));
        assert!(out.converged);
        assert!(out.iterations <= 3, "took {} iterations", out.iterations);
        assert!(nrmse(&out.signal, &x).unwrap() <= 1e-10);
    }

    #[test]
    fn iterates_stay_on_manifold() {
        let x = square_wave(41, 21);
        let (set, _) = generate_samples(&x, 0.5, 500, 11);
        let cfg = McaConfig { max_iter: 30, ..Default::default() };
        let out = mca_reconstruct(&set, &cfg, None);
        let profile = estimate_power_spectrum(&set);
        let s = dft(&out.signal);
        for k in 1..41 {
            assert!((s.coeffs()[k].norm() - profile.amps()[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_is_deterministic() {
        let x = square_wave(21, 9);
        let (set, _) = generate_samples(&x, 1.0, 400, 13);
        let cfg = McaConfig { max_iter: 50, init_seed: 5, ..Default::default() };
        let a = mca_reconstruct(&set, &cfg, None);
        let b = mca_reconstruct(&set, &cfg, None);
        assert_eq!(a.signal.values(), b.signal.values());
        assert_eq!(a.loss_trace, b.loss_trace);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn degenerate_profile_short_circuits() {
        let set = SampleSet::new(vec![Signal::new(vec![1.0, 1.0, 1.0, 1.0])], 0.0);
        let profile = AmplitudeProfile::new(vec![0.0; 4], 4.0);
        let out = mca_reconstruct(&set, &McaConfig::default(), Some(&profile));
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.warning, Some(Warning::DegenerateProfile));
        for &v in out.signal.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_consistency_after_convergence() {
        let x = square_wave(21, 9);
        let (set, _) = generate_samples(&x, 0.3, 2000, 17);
        let cfg = McaConfig::default();
        let out = mca_reconstruct(&set, &cfg, None);
        assert!(out.converged);
        let profile = estimate_power_spectrum(&set);
        let again = mca_step(&out.signal, &set, &profile, 1.0);
        let step: f64 = again
            .values()
            .iter()
            .zip(out.signal.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(step <= cfg.delta);
    }

    #[test]
    fn equivariance_under_global_shift_of_data() {
        let x = square_wave(21, 9);
        let (set, _) = generate_samples(&x, 0.8, 500, 19);
        let shifted_set = SampleSet::new(
            set.samples().iter().map(|s| circular_shift(s, 4)).collect(),
            set.tau(),
        );
        let cfg = McaConfig { max_iter: 200, init_seed: 3, ..Default::default() };
        let a = mca_reconstruct(&set, &cfg, None);
        let b = mca_reconstruct(&shifted_set, &cfg, None);
        let ea = nrmse(&a.signal, &x).unwrap();
        let eb = nrmse(&b.signal, &x).unwrap();
        assert!((ea - eb).abs() < 1e-9, "{ea} vs {eb}");
    }
}
