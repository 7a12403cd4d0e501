//! Template alignment: best-shift search, aligned averaging, the empirical
//! loss, and its manifold-tangent gradient.
//!
//! `best_shift(z, ξ)` returns the `r` maximizing `⟨z, σ_r(ξ)⟩`, i.e. the
//! shift that brings `ξ` closest to the template, so
//! `circular_shift(ξ, best_shift(z, ξ))` is the nearest element of the shift
//! orbit of `ξ`. Exact ties resolve to the smallest shift index, which keeps
//! runs reproducible.

use crate::fft;
use crate::manifold::{tangent_project, AmplitudeProfile};
use crate::sample::SampleSet;
use crate::signal::{circular_shift, dft, Signal};
use crate::util::{add_assign, par_chunk_map};
use num_complex::Complex64;

/// Cross-correlations below this length are cheaper by direct summation.
const FFT_CROSSOVER: usize = 24;

/// Per-sample shifts chosen against a template plus the aligned average.
#[derive(Debug, Clone)]
pub struct AlignmentOutcome {
    /// Shift applied to each sample: `average = (1/N)·Σ σ_{shifts[i]}(ξ_i)`.
    pub shifts: Vec<usize>,
    pub average: Signal,
    /// Set when the template is constant, making every shift tie.
    pub degenerate_template: bool,
}

/// Reusable cross-correlator for one template.
pub(crate) struct TemplateCorrelator {
    len: usize,
    z_values: Vec<f64>,
    z_hat: Vec<Complex64>,
}

/// Per-thread scratch for [`TemplateCorrelator`].
pub(crate) struct CorrScratch {
    corr: Vec<f64>,
    buf: Vec<Complex64>,
}

impl CorrScratch {
    pub fn new() -> Self {
        Self { corr: Vec::new(), buf: Vec::new() }
    }
}

impl TemplateCorrelator {
    pub fn new(z: &Signal) -> Self {
        Self {
            len: z.len(),
            z_values: z.values().to_vec(),
            z_hat: dft(z).coeffs().to_vec(),
        }
    }

    /// Fills `scratch.corr` with `c[r] = ⟨z, σ_r(ξ)⟩` for every `r`.
    pub fn correlations<'a>(&self, xi: &Signal, scratch: &'a mut CorrScratch) -> &'a [f64] {
        let l = self.len;
        debug_assert_eq!(xi.len(), l);
        scratch.corr.clear();
        if l > FFT_CROSSOVER {
            let buf = &mut scratch.buf;
            buf.clear();
            buf.extend(xi.values().iter().map(|&v| Complex64::new(v, 0.0)));
            fft::analysis_inplace(buf);
            for (b, zh) in buf.iter_mut().zip(&self.z_hat) {
                *b = zh * b.conj();
            }
            fft::synthesis_inplace(buf);
            scratch.corr.extend(buf.iter().map(|c| c.re / l as f64));
        } else {
            for r in 0..l {
                let mut acc = 0.0;
                for n in 0..l {
                    acc += self.z_values[n] * xi[(n + l - r) % l];
                }
                scratch.corr.push(acc);
            }
        }
        &scratch.corr
    }

    pub fn best_shift(&self, xi: &Signal, scratch: &mut CorrScratch) -> usize {
        argmax_first(self.correlations(xi, scratch))
    }
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = values[0];
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// The shift `r*` maximizing `⟨z, σ_r(ξ)⟩`; ties break to the smallest index,
/// so a constant template returns 0.
pub fn best_shift(z: &Signal, xi: &Signal) -> usize {
    let mut scratch = CorrScratch::new();
    TemplateCorrelator::new(z).best_shift(xi, &mut scratch)
}

/// The closest shifted copy of `ξ` to the template: `σ_{r*}(ξ)`.
pub fn align_sample(z: &Signal, xi: &Signal) -> Signal {
    circular_shift(xi, best_shift(z, xi) as i64)
}

/// Aligns every sample to the template and averages, recording the applied
/// shifts. The reduction runs over fixed chunks, so results are identical for
/// any thread count.
pub fn averaged_align(z: &Signal, x: &SampleSet) -> AlignmentOutcome {
    let l = z.len();
    assert_eq!(l, x.signal_len(), "template length mismatch");
    let degenerate = z.is_constant();
    let corr = TemplateCorrelator::new(z);
    let n = x.n();
    let chunks = par_chunk_map(n, |range| {
        let mut scratch = CorrScratch::new();
        let mut sum = vec![0.0; l];
        let mut shifts = Vec::with_capacity(range.len());
        for i in range {
            let xi = &x.samples()[i];
            let r = corr.best_shift(xi, &mut scratch);
            for n_idx in 0..l {
                sum[n_idx] += xi[(n_idx + l - r) % l];
            }
            shifts.push(r);
        }
        (sum, shifts)
    });
    let mut total = vec![0.0; l];
    let mut shifts = Vec::with_capacity(n);
    for (sum, s) in chunks {
        add_assign(&mut total, &sum);
        shifts.extend(s);
    }
    for v in &mut total {
        *v /= n as f64;
    }
    AlignmentOutcome { shifts, average: Signal::new(total), degenerate_template: degenerate }
}

/// Empirical loss `(1/2N)·Σ_i min_r ‖z − σ_r(ξ_i)‖²`, evaluated through the
/// correlation identity `‖z − σ_r(ξ)‖² = ‖z‖² + ‖ξ‖² − 2⟨z, σ_r(ξ)⟩`.
pub fn empirical_loss(z: &Signal, x: &SampleSet) -> f64 {
    assert_eq!(z.len(), x.signal_len());
    let corr = TemplateCorrelator::new(z);
    let z_sq = z.norm_squared();
    let n = x.n();
    let total: f64 = par_chunk_map(n, |range| {
        let mut scratch = CorrScratch::new();
        let mut acc = 0.0;
        for i in range {
            let xi = &x.samples()[i];
            let c = corr.correlations(xi, &mut scratch);
            let best = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            acc += (z_sq + xi.norm_squared() - 2.0 * best).max(0.0);
        }
        acc
    })
    .into_iter()
    .sum();
    total / (2.0 * n as f64)
}

/// Projection of the ambient empirical gradient `z − σ̄(z; X)` onto the
/// tangent space of the profile's manifold at `z`.
pub fn tangent_gradient(z: &Signal, x: &SampleSet, profile: &AmplitudeProfile) -> Signal {
    let avg = averaged_align(z, x).average;
    let ambient = Signal::new(
        z.values()
            .iter()
            .zip(avg.values())
            .map(|(a, b)| a - b)
            .collect(),
    );
    tangent_project(&ambient, z, profile)
}
