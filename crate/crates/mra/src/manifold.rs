//! The phase manifold: signals with a prescribed power spectrum.
//!
//! An [`AmplitudeProfile`] fixes a target amplitude `|ẑ[k]|` per frequency
//! plus the DC coefficient, which is carried separately because the mean has
//! no shift ambiguity and is pinned rather than searched. For odd `L` the
//! manifold is a `d`-torus where `d` is the number of supported free
//! frequencies; for even `L` the Nyquist bin contributes a sign choice,
//! splitting the manifold into two antipodal tori.

use crate::rng::stream_rng;
use crate::signal::{dft, idft, Signal, Spectrum};
use num_complex::Complex64;
use rand::Rng;

/// Relative cutoff below which an amplitude counts as unsupported.
const SUPPORT_EPS: f64 = 1e-12;

/// Target Fourier amplitudes of a phase manifold.
#[derive(Debug, Clone)]
pub struct AmplitudeProfile {
    amps: Vec<f64>,
    mean_coeff: f64,
}

impl AmplitudeProfile {
    /// `amps` must be symmetric (`amps[k] == amps[L−k]`) and nonnegative.
    /// `mean_coeff` is the signed target DC coefficient `ẑ[0] = L·mean`.
    pub fn new(amps: Vec<f64>, mean_coeff: f64) -> Self {
        let l = amps.len();
        assert!(l >= 2);
        for (k, &a) in amps.iter().enumerate() {
            assert!(a >= 0.0, "amplitude {k} negative");
            assert!(
                (a - amps[(l - k) % l]).abs() <= 1e-9 * a.abs().max(1.0),
                "amplitude profile not symmetric at bin {k}"
            );
        }
        Self { amps, mean_coeff }
    }

    /// Exact profile of a clean signal.
    pub fn from_signal(x: &Signal) -> Self {
        let s = dft(x);
        let amps = s.coeffs().iter().map(|c| c.norm()).collect();
        Self { amps, mean_coeff: s.coeffs()[0].re }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn mean_coeff(&self) -> f64 {
        self.mean_coeff
    }

    fn support_cutoff(&self) -> f64 {
        let max = self.amps.iter().fold(0.0f64, |a, &v| a.max(v));
        max * SUPPORT_EPS
    }

    /// Supported free frequencies: `k ∈ [1, ⌊(L−1)/2⌋]` with `amps[k] > 0`.
    /// Their count is the torus dimension `d`.
    pub fn support(&self) -> Vec<usize> {
        let cutoff = self.support_cutoff();
        (1..=(self.len() - 1) / 2)
            .filter(|&k| self.amps[k] > cutoff)
            .collect()
    }

    /// Whether the even-`L` Nyquist bin carries amplitude.
    pub fn nyquist_supported(&self) -> bool {
        let l = self.len();
        l % 2 == 0 && self.amps[l / 2] > self.support_cutoff()
    }

    /// True when no frequency above DC carries amplitude.
    pub fn is_degenerate(&self) -> bool {
        self.support().is_empty() && !self.nyquist_supported()
    }

    /// The constant signal with the profile's mean; the only point of a
    /// degenerate manifold.
    pub fn constant_signal(&self) -> Signal {
        Signal::new(vec![self.mean_coeff / self.len() as f64; self.len()])
    }

    /// Norm shared by every signal on the manifold.
    pub fn signal_norm(&self) -> f64 {
        (self.amps.iter().map(|a| a * a).sum::<f64>().max(0.0) / self.len() as f64).sqrt()
    }

    /// Largest deviation `| |ẑ[k]| − amps[k] |` over `k ≥ 1`, plus the DC
    /// mismatch; zero iff `z` lies on the manifold.
    pub fn deviation(&self, z: &Signal) -> f64 {
        let s = dft(z);
        let mut worst = (s.coeffs()[0].re - self.mean_coeff).abs();
        for k in 1..self.len() {
            worst = worst.max((s.coeffs()[k].norm() - self.amps[k]).abs());
        }
        worst
    }
}

/// Euclidean projection onto the manifold: keeps each free bin's phase,
/// rescales its magnitude to `amps[k]`, pins DC to `mean_coeff`, and for even
/// `L` keeps the Nyquist sign (`+` when the coefficient vanishes). A bin
/// whose input coefficient vanishes — below `1e-14` of the largest bin, so
/// transform round-off cannot masquerade as a phase — gets phase zero.
pub fn project_to_manifold(z: &Signal, profile: &AmplitudeProfile) -> Signal {
    assert_eq!(z.len(), profile.len(), "projection length mismatch");
    let l = z.len();
    let s = dft(z);
    let cutoff = 1e-14 * s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    out[0] = Complex64::new(profile.mean_coeff(), 0.0);
    for k in 1..=(l - 1) / 2 {
        let c = s.coeffs()[k];
        let mag = c.norm();
        let phase = if mag > cutoff { c / mag } else { Complex64::new(1.0, 0.0) };
        let v = phase * profile.amps()[k];
        out[k] = v;
        out[l - k] = v.conj();
    }
    if l % 2 == 0 {
        let c = s.coeffs()[l / 2].re;
        let sign = if c < -cutoff { -1.0 } else { 1.0 };
        out[l / 2] = Complex64::new(sign * profile.amps()[l / 2], 0.0);
    }
    idft(&Spectrum::new(out))
}

/// Builds the manifold point with the given phases on the supported free
/// frequencies (in ascending frequency order). Unsupported bins stay zero and
/// the even-`L` Nyquist bin takes `+amps[L/2]`.
pub fn signal_with_phases(profile: &AmplitudeProfile, phases: &[f64]) -> Signal {
    let support = profile.support();
    assert_eq!(phases.len(), support.len(), "one phase per supported frequency");
    let l = profile.len();
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    out[0] = Complex64::new(profile.mean_coeff(), 0.0);
    for (&k, &phi) in support.iter().zip(phases) {
        let v = Complex64::from_polar(profile.amps()[k], phi);
        out[k] = v;
        out[l - k] = v.conj();
    }
    if l % 2 == 0 {
        out[l / 2] = Complex64::new(profile.amps()[l / 2], 0.0);
    }
    idft(&Spectrum::new(out))
}

/// A manifold point with independent uniform phases on the supported
/// frequencies (and a random Nyquist sign for even `L`). A degenerate profile
/// yields its constant signal.
pub fn random_manifold_point(profile: &AmplitudeProfile, seed: u64) -> Signal {
    if profile.is_degenerate() {
        return profile.constant_signal();
    }
    let mut rng = stream_rng(seed, &[0x6d70]);
    let support = profile.support();
    let phases: Vec<f64> = (0..support.len())
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let mut z = signal_with_phases(profile, &phases);
    if profile.nyquist_supported() && rng.gen_bool(0.5) {
        let l = profile.len();
        let mut s = dft(&z);
        s.coeffs_mut()[l / 2] = -s.coeffs()[l / 2];
        z = idft(&s);
    }
    z
}

/// Algorithm-style initialization: projects a data sample onto the manifold.
pub fn manifold_point_from_sample(profile: &AmplitudeProfile, sample: &Signal) -> Signal {
    if profile.is_degenerate() {
        return profile.constant_signal();
    }
    project_to_manifold(sample, profile)
}

/// Projects an ambient vector onto the tangent space of the manifold at `z`:
/// per supported free frequency only the component along `i·ẑ[k]` survives;
/// DC, unsupported bins, and the even-`L` Nyquist bin carry no tangent
/// directions.
pub fn tangent_project(g: &Signal, z: &Signal, profile: &AmplitudeProfile) -> Signal {
    assert_eq!(g.len(), z.len());
    assert_eq!(g.len(), profile.len());
    let l = g.len();
    let gh = dft(g);
    let zh = dft(z);
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for k in profile.support() {
        let zc = zh.coeffs()[k];
        let mag = zc.norm();
        if mag <= 0.0 {
            continue;
        }
        let t = Complex64::new(0.0, 1.0) * zc / mag;
        let coef = (gh.coeffs()[k] * t.conj()).re;
        out[k] = t * coef;
        out[l - k] = out[k].conj();
    }
    idft(&Spectrum::new(out))
}

/// Moves `z` along the manifold by rotating each supported free frequency's
/// phase by the matching entry of `deltas`.
pub fn rotate_on_manifold(z: &Signal, profile: &AmplitudeProfile, deltas: &[f64]) -> Signal {
    let support = profile.support();
    assert_eq!(deltas.len(), support.len());
    let l = z.len();
    let mut s = dft(z);
    for (&k, &d) in support.iter().zip(deltas) {
        let rot = Complex64::from_polar(1.0, d);
        let v = s.coeffs()[k] * rot;
        s.coeffs_mut()[k] = v;
        s.coeffs_mut()[l - k] = v.conj();
    }
    idft(&s)
}
