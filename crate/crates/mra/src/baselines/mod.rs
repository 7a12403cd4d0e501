//! Comparison methods: expectation–maximization, bispectrum inversion with
//! phase synchronization, one-pass template alignment, and the known-shifts
//! oracle.

mod bispectrum;
mod em;

pub use bispectrum::{
    bispectrum_reconstruct, estimate_bispectrum, synchronize_phases, Bispectrum, PhaseSync,
};
pub use em::{em_reconstruct, em_step, marginal_log_likelihood, EmConfig};

use crate::alignment::averaged_align;
use crate::error::{MraError, Result};
use crate::sample::SampleSet;
use crate::signal::{circular_shift, Signal};
use crate::util::{add_assign, par_chunk_map};

/// Averages the samples after undoing their true shifts. Lower-bounds every
/// method's error on the same data.
pub fn oracle_average(x: &SampleSet, true_shifts: &[usize]) -> Result<Signal> {
    if true_shifts.len() != x.n() {
        return Err(MraError::LengthMismatch { expected: x.n(), got: true_shifts.len() });
    }
    let l = x.signal_len();
    let chunks = par_chunk_map(x.n(), |range| {
        let mut acc = vec![0.0; l];
        for i in range {
            let unshifted = circular_shift(&x.samples()[i], -(true_shifts[i] as i64));
            add_assign(&mut acc, unshifted.values());
        }
        acc
    });
    let mut total = vec![0.0; l];
    for c in chunks {
        add_assign(&mut total, &c);
    }
    for v in &mut total {
        *v /= x.n() as f64;
    }
    Ok(Signal::new(total))
}

/// Single-pass template alignment: align every sample to the template and
/// average, with no projection and no iteration.
pub fn template_reconstruct(x: &SampleSet, template: &Signal) -> Signal {
    averaged_align(template, x).average
}
