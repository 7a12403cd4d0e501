//! Empirical loss evaluated over the 2-torus of Fourier phases, plus a
//! discrete Morse census of the resulting field.

use crate::error::{MraError, Result};
use crate::manifold::AmplitudeProfile;
use crate::sample::generate_samples;
use crate::signal::{dft, Signal};
use num_complex::Complex64;
use rayon::prelude::*;

/// Loss and tangent-gradient-norm fields over a `resolution²` phase grid.
/// Row-major: index `i1·resolution + i2` holds the cell at
/// `(φ1, φ2) = 2π·(i1, i2)/resolution`.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    pub freqs: [usize; 2],
    pub resolution: usize,
    pub loss: Vec<f64>,
    pub grad_norm: Vec<f64>,
}

impl TorusGrid {
    pub fn phase(&self, idx: usize) -> f64 {
        std::f64::consts::TAU * idx as f64 / self.resolution as f64
    }

    pub fn loss_at(&self, i1: usize, i2: usize) -> f64 {
        self.loss[i1 * self.resolution + i2]
    }

    /// Cell indices of the grid point nearest to the given phases.
    pub fn nearest_cell(&self, phi1: f64, phi2: f64) -> (usize, usize) {
        let res = self.resolution as f64;
        let wrap = |phi: f64| -> usize {
            let t = (phi / std::f64::consts::TAU).rem_euclid(1.0);
            ((t * res).round() as usize) % self.resolution
        };
        (wrap(phi1), wrap(phi2))
    }
}

/// Evaluates the empirical loss of `z(φ1, φ2)` — the manifold point of `x`'s
/// exact profile with those phases on its two supported frequencies — on a
/// `resolution²` grid, against one frozen sample set. Also records the
/// tangent-gradient norm per cell.
///
/// The per-cell work is folded down to the two supported bins: the full
/// cross-correlation of a grid signal with a sample has only five nonzero
/// spectral contributions, so each (cell, sample) pair costs `O(L)` flops
/// with no transforms in the inner loop.
pub fn torus_loss_grid(
    x: &Signal,
    tau: f64,
    n: usize,
    resolution: usize,
    seed: u64,
) -> Result<TorusGrid> {
    assert!(resolution >= 4);
    let profile = AmplitudeProfile::from_signal(x);
    let support = profile.support();
    let extra = usize::from(profile.nyquist_supported());
    if support.len() != 2 || extra != 0 {
        return Err(MraError::GridRequiresTwoTorus { found: support.len() + extra });
    }
    let (f1, f2) = (support[0], support[1]);
    let l = x.len();
    let (a1, a2) = (profile.amps()[f1], profile.amps()[f2]);
    let mean_coeff = profile.mean_coeff();

    let (set, _) = generate_samples(x, tau, n, seed);

    // Per-sample tables: for each shift r, the four coefficients of the
    // correlation term p·cosφ + q·sinφ at both supported frequencies,
    // interleaved as [p1, q1, p2, q2] per r.
    let stride = 4 * l;
    let mut table = vec![0.0f64; n * stride];
    let mut dc = vec![0.0f64; n];
    let mut xi_sq_sum = 0.0f64;
    for (i, xi) in set.samples().iter().enumerate() {
        let s = dft(xi);
        dc[i] = mean_coeff * s.coeffs()[0].re / l as f64;
        xi_sq_sum += xi.norm_squared();
        let row = &mut table[i * stride..(i + 1) * stride];
        for r in 0..l {
            for (slot, &(f, amp)) in [(f1, a1), (f2, a2)].iter().enumerate() {
                let w = s.coeffs()[f].conj()
                    * Complex64::from_polar(
                        1.0,
                        -std::f64::consts::TAU * ((r * f) % l) as f64 / l as f64,
                    );
                let scale = 2.0 * amp / l as f64;
                row[4 * r + 2 * slot] = scale * w.re;
                row[4 * r + 2 * slot + 1] = -scale * w.im;
            }
        }
    }
    let mean_xi_sq = xi_sq_sum / n as f64;
    let z_sq = (mean_coeff * mean_coeff + 2.0 * a1 * a1 + 2.0 * a2 * a2) / l as f64;

    let res = resolution;
    let trig: Vec<(f64, f64)> = (0..res)
        .map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / res as f64;
            (phi.cos(), phi.sin())
        })
        .collect();

    let mut loss = vec![0.0f64; res * res];
    let mut grad_norm = vec![0.0f64; res * res];
    loss.par_chunks_mut(res)
        .zip(grad_norm.par_chunks_mut(res))
        .enumerate()
        .for_each(|(i1, (loss_row, grad_row))| {
            let (c1, s1) = trig[i1];
            for i2 in 0..res {
                let (c2, s2) = trig[i2];
                let mut sum_c = 0.0f64;
                let mut acc = [0.0f64; 4];
                for i in 0..n {
                    let row = &table[i * stride..(i + 1) * stride];
                    let mut best = f64::NEG_INFINITY;
                    let mut best_r = 0usize;
                    for r in 0..l {
                        let v = row[4 * r] * c1
                            + row[4 * r + 1] * s1
                            + row[4 * r + 2] * c2
                            + row[4 * r + 3] * s2;
                        if v > best {
                            best = v;
                            best_r = r;
                        }
                    }
                    sum_c += dc[i] + best;
                    acc[0] += row[4 * best_r];
                    acc[1] += row[4 * best_r + 1];
                    acc[2] += row[4 * best_r + 2];
                    acc[3] += row[4 * best_r + 3];
                }
                loss_row[i2] = 0.5 * z_sq + 0.5 * mean_xi_sq - sum_c / n as f64;

                // Tangent gradient from the two spectral components of
                // z − σ̄: σ̄'s coefficient at f is (L/(2A·N))·(Σp, Σq).
                let avg1 = Complex64::new(acc[0], acc[1]) * (l as f64 / (2.0 * a1 * n as f64));
                let avg2 = Complex64::new(acc[2], acc[3]) * (l as f64 / (2.0 * a2 * n as f64));
                let z1 = Complex64::new(a1 * c1, a1 * s1);
                let z2 = Complex64::new(a2 * c2, a2 * s2);
                let g1 = ((z1 - avg1) * z1.conj()).im / a1;
                let g2 = ((z2 - avg2) * z2.conj()).im / a2;
                grad_row[i2] = (2.0 * (g1 * g1 + g2 * g2) / l as f64).sqrt();
            }
        });

    Ok(TorusGrid { freqs: [f1, f2], resolution: res, loss, grad_norm })
}

/// Counts of grid-local minima, saddles, and maxima. Saddles enter with
/// their multiplicity `(sign changes)/2 − 1`, which keeps the torus
/// alternating sum `minima − saddles + maxima` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusReport {
    pub minima: usize,
    pub saddles: usize,
    pub maxima: usize,
    /// Cells with an exactly-tied neighbor; excluded from the counts.
    pub unresolved: usize,
}

impl CensusReport {
    pub fn alternating_sum(&self) -> i64 {
        self.minima as i64 - self.saddles as i64 + self.maxima as i64
    }
}

fn box_smooth(field: &[f64], res: usize) -> Vec<f64> {
    let mut out = vec![0.0; res * res];
    for i in 0..res {
        for j in 0..res {
            let mut acc = 0.0;
            for di in [res - 1, 0, 1] {
                for dj in [res - 1, 0, 1] {
                    acc += field[((i + di) % res) * res + (j + dj) % res];
                }
            }
            out[i * res + j] = acc / 9.0;
        }
    }
    out
}

/// Classifies every cell of the (optionally box-smoothed) loss field by
/// comparing against its 8 neighbors in ring order: no descents → minimum,
/// no ascents → maximum, `t ≥ 4` sign changes → saddle of multiplicity
/// `t/2 − 1`. Exact ties mark the cell unresolved.
pub fn morse_census(grid: &TorusGrid, smoothing_passes: usize) -> CensusReport {
    let res = grid.resolution;
    let mut field = grid.loss.clone();
    for _ in 0..smoothing_passes {
        field = box_smooth(&field, res);
    }

    // 8-neighborhood in cyclic ring order.
    const RING: [(i64, i64); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
        (1, 0),
        (1, -1),
        (0, -1),
    ];

    let mut report = CensusReport { minima: 0, saddles: 0, maxima: 0, unresolved: 0 };
    for i in 0..res {
        for j in 0..res {
            let center = field[i * res + j];
            let mut diffs = [0.0f64; 8];
            let mut tied = false;
            for (idx, &(di, dj)) in RING.iter().enumerate() {
                let ni = (i as i64 + di).rem_euclid(res as i64) as usize;
                let nj = (j as i64 + dj).rem_euclid(res as i64) as usize;
                let d = field[ni * res + nj] - center;
                if d == 0.0 {
                    tied = true;
                }
                diffs[idx] = d;
            }
            if tied {
                report.unresolved += 1;
                continue;
            }
            if diffs.iter().all(|&d| d > 0.0) {
                report.minima += 1;
                continue;
            }
            if diffs.iter().all(|&d| d < 0.0) {
                report.maxima += 1;
                continue;
            }
            let mut transitions = 0;
            for idx in 0..8 {
                if (diffs[idx] > 0.0) != (diffs[(idx + 1) % 8] > 0.0) {
                    transitions += 1;
                }
            }
            if transitions >= 4 {
                report.saddles += transitions / 2 - 1;
            }
        }
    }
    report
}
