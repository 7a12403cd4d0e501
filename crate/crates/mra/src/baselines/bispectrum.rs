//! Bispectrum inversion: estimate the third-order Fourier moment, recover
//! the Fourier phases by a multiplicative synchronization iteration, and
//! assemble the signal from the separately estimated amplitudes and mean.
//!
//! The bispectrum entry `B[k1,k2] = x̂[k1]·conj(x̂[k2])·x̂[k2−k1]` is
//! shift-invariant, so phases of shifted samples average coherently. Entries
//! on the DC slices and the diagonal only carry the sign of the mean; the
//! synchronization sum skips them and the reconstruction takes amplitudes
//! and DC from the bias-corrected second-moment estimators instead.

use crate::error::{MraError, Result};
use crate::fft;
use crate::manifold::AmplitudeProfile;
use crate::reconstruction::{ReconstructionResult, Warning};
use crate::rng::stream_rng;
use crate::sample::{estimate_power_spectrum, SampleSet};
use crate::signal::{idft, Signal, Spectrum};
use crate::util::par_chunk_map;
use num_complex::Complex64;
use rand::Rng;
use std::time::Instant;

/// Averaged third-moment estimates `B[k1,k2] ≈ x̂[k1]·conj(x̂[k2])·x̂[k2−k1]`,
/// stored row-major.
#[derive(Debug, Clone)]
pub struct Bispectrum {
    l: usize,
    values: Vec<Complex64>,
}

impl Bispectrum {
    pub fn signal_len(&self) -> usize {
        self.l
    }

    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.values[k1 * self.l + k2]
    }

    /// Bispectrum of a single clean signal (exact, no averaging).
    pub fn of_signal(x: &Signal) -> Bispectrum {
        let set = SampleSet::new(vec![x.clone()], 0.0);
        estimate_bispectrum(&set)
    }
}

/// `B[k1,k2] = (1/N)·Σ_j ξ̂_j[k1]·conj(ξ̂_j[k2])·ξ̂_j[(k2−k1) mod L]`.
pub fn estimate_bispectrum(x: &SampleSet) -> Bispectrum {
    let l = x.signal_len();
    let n = x.n();
    let chunks = par_chunk_map(n, |range| {
        let mut acc = vec![Complex64::new(0.0, 0.0); l * l];
        let mut buf: Vec<Complex64> = Vec::with_capacity(l);
        for i in range {
            buf.clear();
            buf.extend(
                x.samples()[i]
                    .values()
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0)),
            );
            fft::analysis_inplace(&mut buf);
            for k1 in 0..l {
                let a = buf[k1];
                let row = &mut acc[k1 * l..(k1 + 1) * l];
                for (k2, slot) in row.iter_mut().enumerate() {
                    *slot += a * buf[k2].conj() * buf[(k2 + l - k1) % l];
                }
            }
        }
        acc
    });
    let mut values = vec![Complex64::new(0.0, 0.0); l * l];
    for c in chunks {
        for (v, a) in values.iter_mut().zip(c) {
            *v += a;
        }
    }
    let inv_n = 1.0 / n as f64;
    for v in &mut values {
        *v *= inv_n;
    }
    Bispectrum { l, values }
}

/// Outcome of the synchronization iteration: a unit-modulus phase per
/// frequency, gauge-fixed to the integer shift that brings the phase of the
/// lowest supported frequency closest to zero.
#[derive(Debug, Clone)]
pub struct PhaseSync {
    pub phases: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest per-entry phase change at each iteration.
    pub residuals: Vec<f64>,
}

/// Recovers Fourier phases from the normalized bispectrum by the fixed-point
/// iteration `u[k1] ← phase(Σ_{k2} H[k1,k2]·conj(u[k2−k1])·u[k2])` over the
/// informative entries. `support` lists the carrier frequencies in
/// `1..=⌊L/2⌋`; conjugate bins follow by symmetry. A supported frequency with
/// no informative entries (e.g. an isolated sinusoid) is an error: its phase
/// is not determined by the bispectrum.
pub fn synchronize_phases(
    b: &Bispectrum,
    support: &[usize],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<PhaseSync> {
    assert!(tol > 0.0);
    assert!(max_iter >= 1);
    let l = b.signal_len();
    let nyquist = if l % 2 == 0 { l / 2 } else { usize::MAX };
    let free_bins: Vec<usize> = support.iter().copied().filter(|&k| k != nyquist).collect();
    let has_nyquist = support.contains(&nyquist);

    let mut full_support = vec![false; l];
    for &k in support {
        full_support[k] = true;
        full_support[(l - k) % l] = true;
    }

    let scale = b.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cutoff = scale * 1e-12;

    // Informative entries per target bin: skip DC slices and the diagonal,
    // and require all three involved frequencies to carry signal.
    let mut terms: Vec<Vec<(usize, usize, Complex64)>> = Vec::new();
    let mut targets: Vec<usize> = free_bins.clone();
    if has_nyquist {
        targets.push(nyquist);
    }
    for &k1 in &targets {
        let mut row = Vec::new();
        for k2 in 1..l {
            if k2 == k1 {
                continue;
            }
            let k3 = (k2 + l - k1) % l;
            if k3 == 0 || !full_support[k2] || !full_support[k3] {
                continue;
            }
            let v = b.get(k1, k2);
            if v.norm() <= cutoff {
                continue;
            }
            row.push((k2, k3, v / v.norm()));
        }
        if row.is_empty() {
            return Err(MraError::InsufficientSignal { freq: k1 });
        }
        terms.push(row);
    }

    // Sign of the DC coefficient, read off the diagonal slice whose entries
    // all share the phase of x̂[0].
    let diag_sum: Complex64 = (0..l).map(|k| b.get(k, k)).sum();
    let dc_sign = if diag_sum.re < 0.0 { -1.0 } else { 1.0 };

    let mut rng = stream_rng(seed, &[0x73796e63]);
    let mut u = vec![Complex64::new(0.0, 0.0); l];
    u[0] = Complex64::new(dc_sign, 0.0);
    for &k in &free_bins {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        u[k] = Complex64::from_polar(1.0, phase);
        u[l - k] = u[k].conj();
    }
    if has_nyquist {
        u[nyquist] = Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0);
    }

    let mut residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut next = u.clone();
        let mut delta = 0.0f64;
        for (t_idx, &k1) in targets.iter().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            for &(k2, k3, h) in &terms[t_idx] {
                sum += h * u[k3].conj() * u[k2];
            }
            let new = if k1 == nyquist {
                Complex64::new(if sum.re < 0.0 { -1.0 } else { 1.0 }, 0.0)
            } else if sum.norm() > 0.0 {
                sum / sum.norm()
            } else {
                u[k1]
            };
            delta = delta.max((new - u[k1]).norm());
            next[k1] = new;
            if k1 != nyquist {
                next[l - k1] = new.conj();
            }
        }
        u = next;
        residuals.push(delta);
        if delta <= tol {
            converged = true;
            break;
        }
    }

    // Gauge: among the L integer-shift ramps, pick the one that brings the
    // lowest supported frequency's phase closest to zero. Integer ramps are
    // the only shift ambiguity consistent with the wrapped triple products.
    let k0 = *support.iter().min().expect("support checked non-empty");
    let base = u[k0].arg();
    let mut best_s = 0usize;
    let mut best_err = f64::INFINITY;
    for s in 0..l {
        let angle = base - std::f64::consts::TAU * (s * k0 % l) as f64 / l as f64;
        let wrapped = angle.sin().atan2(angle.cos()).abs();
        if wrapped < best_err - 1e-15 {
            best_err = wrapped;
            best_s = s;
        }
    }
    if best_s != 0 {
        for (k, v) in u.iter_mut().enumerate() {
            let ramp =
                Complex64::from_polar(1.0, -std::f64::consts::TAU * (best_s * k % l) as f64 / l as f64);
            *v *= ramp;
        }
        // Keep the Nyquist and DC bins exactly real after the ramp.
        u[0] = Complex64::new(if u[0].re < 0.0 { -1.0 } else { 1.0 }, 0.0);
        if has_nyquist {
            u[nyquist] = Complex64::new(if u[nyquist].re < 0.0 { -1.0 } else { 1.0 }, 0.0);
        }
    }

    Ok(PhaseSync { phases: u, iterations, converged, residuals })
}

/// Full bispectrum inversion: amplitudes and DC from the second-moment
/// estimators, phases from synchronization, assembled by inverse transform.
pub fn bispectrum_reconstruct(
    x: &SampleSet,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<ReconstructionResult> {
    let start = Instant::now();
    let l = x.signal_len();
    let profile = estimate_power_spectrum(x);
    let mut support = profile.support();
    if profile.nyquist_supported() {
        support.push(l / 2);
    }
    if support.is_empty() {
        return Ok(ReconstructionResult {
            signal: profile.constant_signal(),
            iterations: 0,
            converged: true,
            loss_trace: Vec::new(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            warning: Some(Warning::DegenerateProfile),
        });
    }

    let b = estimate_bispectrum(x);
    let sync = synchronize_phases(&b, &support, tol, max_iter, seed)?;

    let mut coeffs = vec![Complex64::new(0.0, 0.0); l];
    coeffs[0] = Complex64::new(profile.mean_coeff(), 0.0);
    for k in 1..=(l - 1) / 2 {
        let v = sync.phases[k] * profile.amps()[k];
        coeffs[k] = v;
        coeffs[l - k] = v.conj();
    }
    if l % 2 == 0 {
        let sign = if sync.phases[l / 2].re < 0.0 { -1.0 } else { 1.0 };
        coeffs[l / 2] = Complex64::new(sign * profile.amps()[l / 2], 0.0);
    }
    let signal = idft(&Spectrum::new(coeffs));

    Ok(ReconstructionResult {
        signal,
        iterations: sync.iterations,
        converged: sync.converged,
        loss_trace: sync.residuals,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        warning: if sync.converged { None } else { Some(Warning::PhaseSyncNotConverged) },
    })
}

/// Convenience wrapper over [`AmplitudeProfile`] support plus Nyquist.
pub(crate) fn full_support_of(profile: &AmplitudeProfile) -> Vec<usize> {
    let mut support = profile.support();
    if profile.nyquist_supported() {
        support.push(profile.len() / 2);
    }
    support
}
