//! Sign-flip critical candidates, the equidistance property, and the
//! dihedral geometry of the alignment discriminant.

use crate::error::{MraError, Result};
use crate::landscape::mc::mc_expected_align;
use crate::manifold::{tangent_project, AmplitudeProfile};
use crate::signal::{autocorrelation, dft, idft, Signal, Spectrum};
use num_complex::Complex64;

/// Conjectured type of a sign-flip critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalClass {
    Minimum,
    Saddle,
    Maximum,
    Unresolved,
}

/// One of the `2^d` sign-flip configurations: the reference signal with a
/// subset of its supported Fourier coefficients negated.
#[derive(Debug, Clone)]
pub struct CriticalCandidate {
    /// One sign per supported free frequency, ascending; for even `L` with a
    /// supported Nyquist bin, its sign is appended last.
    pub sign_mask: Vec<i8>,
    pub signal: Signal,
    /// All-plus is the reference itself (minimum), all-minus its antipode
    /// (maximum), mixed masks are saddles — the conjectured labeling that the
    /// census and Monte Carlo checks test.
    pub classification: CriticalClass,
}

/// Enumerates all `2^d` candidates over the supported frequencies of `x`
/// (plus the Nyquist sign for even `L`, an extension beyond the odd-length
/// theory). Every candidate shares `x`'s amplitude profile.
pub fn enumerate_sign_criticals(x: &Signal) -> Vec<CriticalCandidate> {
    let profile = AmplitudeProfile::from_signal(x);
    let l = x.len();
    let mut bins = profile.support();
    if profile.nyquist_supported() {
        bins.push(l / 2);
    }
    let d = bins.len();
    assert!(d <= 24, "2^{d} candidates is not tractable");
    let s = dft(x);
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0u32..(1 << d) {
        let mut coeffs = s.coeffs().to_vec();
        let mut signs = Vec::with_capacity(d);
        for (bit, &k) in bins.iter().enumerate() {
            let sign: i8 = if mask & (1 << bit) != 0 { -1 } else { 1 };
            signs.push(sign);
            if sign < 0 {
                coeffs[k] = -coeffs[k];
                if k != l / 2 || l % 2 == 1 {
                    coeffs[l - k] = -coeffs[l - k];
                }
            }
        }
        let classification = if signs.iter().all(|&s| s > 0) {
            CriticalClass::Minimum
        } else if signs.iter().all(|&s| s < 0) {
            CriticalClass::Maximum
        } else {
            CriticalClass::Saddle
        };
        out.push(CriticalCandidate {
            sign_mask: signs,
            signal: idft(&Spectrum::new(coeffs)),
            classification,
        });
    }
    out
}

/// Tangent-space norm of `c − σ̄_τ(c; x)` estimated with `M` noise draws.
/// True critical points come out at the Monte Carlo floor `O(τ√(L/M))`;
/// generic manifold points sit far above it.
pub fn verify_critical(
    candidate: &CriticalCandidate,
    x: &Signal,
    tau: f64,
    m: usize,
    seed: u64,
) -> f64 {
    let profile = AmplitudeProfile::from_signal(x);
    let aligned = mc_expected_align(&candidate.signal, x, tau, m, seed);
    let ambient = Signal::new(
        candidate
            .signal
            .values()
            .iter()
            .zip(aligned.values())
            .map(|(a, b)| a - b)
            .collect(),
    );
    tangent_project(&ambient, &candidate.signal, &profile).norm()
}

/// Applies a circularly symmetric ±1 mask to the spectrum of `z`. The mask
/// covers bins `0..=⌊L/2⌋`; bin 0 flips the mean's sign, the rest mirror.
pub fn sign_masked_signal(z: &Signal, mask: &[i8]) -> Signal {
    let l = z.len();
    assert_eq!(mask.len(), l / 2 + 1, "one sign per non-mirrored bin");
    assert!(mask.iter().all(|&m| m == 1 || m == -1));
    let s = dft(z);
    let mut coeffs = s.coeffs().to_vec();
    for (k, &m) in mask.iter().enumerate() {
        if m < 0 {
            coeffs[k] = -coeffs[k];
            if k > 0 {
                coeffs[l - k] = -coeffs[l - k];
            }
        }
    }
    idft(&Spectrum::new(coeffs))
}

/// Largest violation of `‖z_u − σ_i(z)‖ = ‖z_u − σ_{−i}(z)‖` over all `i`,
/// where `z_u` is the sign-masked signal. Zero (to round-off) for every mask.
pub fn equidistance_check(z: &Signal, mask: &[i8]) -> f64 {
    let l = z.len();
    let z_u = sign_masked_signal(z, mask);
    let dist = |r: usize| -> f64 {
        let shifted = crate::signal::circular_shift(z, r as i64);
        z_u.values()
            .iter()
            .zip(shifted.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    (1..l)
        .map(|i| (dist(i) - dist(l - i)).abs())
        .fold(0.0, f64::max)
}

/// Absolute cosines of the dihedral angles between all pairs of discriminant
/// normals `n_{i,j} = σ_i(z) − σ_j(z)`, computed purely from the shift inner
/// products (i.e. from the second moment). Entry `[p][q]` corresponds to the
/// `p`-th and `q`-th pairs `(i, j)` with `i < j` in lexicographic order.
pub fn dihedral_angles(z: &Signal) -> Result<Vec<Vec<f64>>> {
    let l = z.len();
    // ⟨z, σ_k(z)⟩ = L·m2(z)[k]
    let gram: Vec<f64> = autocorrelation(z)
        .values()
        .iter()
        .map(|&v| v * l as f64)
        .collect();
    let g = |a: i64| -> f64 { gram[a.rem_euclid(l as i64) as usize] };

    let mut pairs = Vec::new();
    for i in 0..l {
        for j in (i + 1)..l {
            let norm_sq = 2.0 * (g(0) - g((j - i) as i64));
            if norm_sq <= 1e-12 * 2.0 * g(0).abs() {
                return Err(MraError::DegenerateDiscriminant { i, j });
            }
            pairs.push((i as i64, j as i64, norm_sq.sqrt()));
        }
    }

    let dot = |(i, j): (i64, i64), (ip, jp): (i64, i64)| -> f64 {
        g(i - ip) - g(i - jp) - g(j - ip) + g(j - jp)
    };

    let p = pairs.len();
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let (i, j, na) = pairs[a];
            let (ip, jp, nb) = pairs[b];
            out[a][b] = (dot((i, j), (ip, jp)).abs() / (na * nb)).min(1.0);
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn phases_of(s: &[Complex64]) -> Vec<f64> {
    s.iter().map(|c| c.arg()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::random_manifold_point;
    use crate::signal::{apply_rotation, circular_shift, CirculantRotation};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fig3_signal() -> Signal {
        Signal::new(vec![4.0 / 5.0, -1.0 / 5.0, -1.0 / 5.0, -1.0 / 5.0, -1.0 / 5.0])
    }

    #[test]
    fn sinusoid_has_two_candidates() {
        let x = Signal::new((0..5).map(|n| (std::f64::consts::TAU * n as f64 / 5.0).cos()).collect());
        let cands = enumerate_sign_criticals(&x);
        assert_eq!(cands.len(), 2);
        assert_eq!(cands[0].classification, CriticalClass::Minimum);
        assert_eq!(cands[1].classification, CriticalClass::Maximum);
    }

    #[test]
    fn fig3_example_has_four_candidates_on_the_manifold() {
        let x = fig3_signal();
        let cands = enumerate_sign_criticals(&x);
        assert_eq!(cands.len(), 4);
        let profile = AmplitudeProfile::from_signal(&x);
        for c in &cands {
            assert!(profile.deviation(&c.signal) < 1e-12 * 5.0);
        }
        // All-plus mask reproduces x itself.
        for (a, b) in cands[0].signal.values().iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn candidates_pass_the_tangent_test_and_random_points_fail() {
        let x = fig3_signal();
        let tau = 1.0;
        let m = 60_000;
        let bound = 5.0 * tau * (5.0 / m as f64).sqrt();
        for c in enumerate_sign_criticals(&x) {
            let norm = verify_critical(&c, &x, tau, m, 99);
            assert!(norm <= bound, "mask {:?}: {norm} > {bound}", c.sign_mask);
        }
        let profile = AmplitudeProfile::from_signal(&x);
        let mut failures = 0;
        for seed in 0..5 {
            let z = random_manifold_point(&profile, 1000 + seed);
            let cand = CriticalCandidate {
                sign_mask: vec![],
                signal: z,
                classification: CriticalClass::Unresolved,
            };
            if verify_critical(&cand, &x, tau, m, 99) >= 10.0 * bound {
                failures += 1;
            }
        }
        assert!(failures >= 4, "random points should fail the bound");
    }

    #[test]
    fn aligned_average_at_candidate_keeps_phases_mod_pi() {
        let x = fig3_signal();
        for c in enumerate_sign_criticals(&x) {
            let avg = mc_expected_align(&c.signal, &x, 1.0, 60_000, 5);
            let sa = dft(&avg);
            let sc = dft(&c.signal);
            for k in [1usize, 2] {
                let rel = (sa.coeffs()[k] * sc.coeffs()[k].conj()).arg();
                let dev = rel.sin().abs();
                assert!(dev < 0.15, "bin {k} mask {:?}: phase dev {dev}", c.sign_mask);
            }
        }
    }

    #[test]
    fn identity_mask_gives_zero_deviation() {
        let z = Signal::new(vec![0.5, -1.0, 0.25, 0.8, -0.3]);
        assert!(equidistance_check(&z, &[1, 1, 1]) < 1e-12);
    }

    #[test]
    fn all_minus_mask_is_negation_and_lands_on_discriminant() {
        let mut rng = ChaCha8Rng::seed_from_u64(220);
        for &l in &[5usize, 7, 9] {
            let z = Signal::new((0..l).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let mask = vec![-1i8; l / 2 + 1];
            let z_u = sign_masked_signal(&z, &mask);
            for (a, b) in z_u.values().iter().zip(z.values()) {
                assert!((a + b).abs() < 1e-10);
            }
            // Nearest shift to −z is non-zero and tied with its mirror.
            let dist = |r: usize| {
                let s = circular_shift(&z, r as i64);
                z_u.values()
                    .iter()
                    .zip(s.values())
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt()
            };
            let (best_r, best_d) = (0..l)
                .map(|r| (r, dist(r)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert_ne!(best_r, 0, "L={l}: distance to σ_0 is maximal, not minimal");
            assert!((best_d - dist(l - best_r)).abs() < 1e-10);
        }
    }

    #[test]
    fn random_masks_satisfy_equidistance() {
        let mut rng = ChaCha8Rng::seed_from_u64(221);
        for _ in 0..50 {
            let l = *[3usize, 5, 7, 9, 11].choose(&mut rng).unwrap();
            let z = Signal::new((0..l).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let mask: Vec<i8> = (0..=l / 2)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            assert!(equidistance_check(&z, &mask) <= 1e-10);
        }
    }

    #[test]
    fn l3_dihedral_angles_are_sixty_degrees() {
        let z = Signal::new(vec![1.0, -0.25, 0.4]);
        let cos = dihedral_angles(&z).unwrap();
        assert_eq!(cos.len(), 3);
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { 1.0 } else { 0.5 };
                assert!(
                    (cos[a][b] - expect).abs() < 1e-10,
                    "pair ({a},{b}): {}",
                    cos[a][b]
                );
            }
        }
    }

    #[test]
    fn dihedral_angles_are_rotation_and_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(222);
        let z = Signal::new((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let base = dihedral_angles(&z).unwrap();

        let phases: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let c = CirculantRotation::new(5, phases, 1.0);
        let rotated = dihedral_angles(&apply_rotation(&c, &z)).unwrap();
        let shifted = dihedral_angles(&circular_shift(&z, 2)).unwrap();
        for a in 0..base.len() {
            for b in 0..base.len() {
                assert!((base[a][b] - rotated[a][b]).abs() < 1e-10);
                assert!((base[a][b] - shifted[a][b]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn periodic_signal_is_degenerate() {
        // Period-2 signal on L=4: σ_0 and σ_2 coincide.
        let z = Signal::new(vec![1.0, -1.0, 1.0, -1.0]);
        assert!(matches!(
            dihedral_angles(&z),
            Err(MraError::DegenerateDiscriminant { .. })
        ));
    }
}
