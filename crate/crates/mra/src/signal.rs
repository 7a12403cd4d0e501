//! Signals, spectra, circular shifts, moments, and shift-minimized error.
//!
//! A [`Signal`] is a real vector of length `L ≥ 2` indexed modulo `L`. Its
//! [`Spectrum`] follows the convention `x̂[m] = Σ_n x[n]·exp(+2πi·nm/L)`, so
//! a circular shift by `r` multiplies bin `m` by `exp(+2πi·rm/L)`.

use crate::error::{MraError, Result};
use crate::fft;
use num_complex::Complex64;

/// Real-valued signal of length `L ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    /// Wraps a vector of samples. Panics on non-finite entries or `L < 2`.
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "signal length must be at least 2");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "signal entries must be finite"
        );
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Arithmetic mean `(1/L)·Σ x[n]` (the first moment).
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// True when every entry equals the first to within `1e-14` of the scale.
    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        let scale = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        self.values.iter().all(|v| (v - first).abs() <= 1e-14 * scale)
    }

    pub fn scaled(&self, factor: f64) -> Signal {
        Signal::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// DFT coefficients of a length-`L` signal (unnormalized analysis transform).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() >= 2);
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Largest violation of the realness symmetry `x̂[k] = conj(x̂[L−k])`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let l = self.len();
        (0..l)
            .map(|k| (self.coeffs[k] - self.coeffs[(l - k) % l].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Forward transform `x̂[m] = Σ_n x[n]·exp(+2πi·nm/L)`.
pub fn dft(x: &Signal) -> Spectrum {
    let mut buf: Vec<Complex64> = x.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::analysis_inplace(&mut buf);
    Spectrum::new(buf)
}

/// Exact inverse of [`dft`]; the imaginary residual of a conjugate-symmetric
/// spectrum is discarded.
pub fn idft(s: &Spectrum) -> Signal {
    let l = s.len();
    let mut buf = s.coeffs().to_vec();
    fft::synthesis_inplace(&mut buf);
    Signal::new(buf.iter().map(|c| c.re / l as f64).collect())
}

/// Circular shift `σ_r(x)[n] = x[(n − r) mod L]`; `r` may be any integer.
pub fn circular_shift(x: &Signal, r: i64) -> Signal {
    let l = x.len() as i64;
    let r = r.rem_euclid(l) as usize;
    let l = x.len();
    let mut out = Vec::with_capacity(l);
    for n in 0..l {
        out.push(x[(n + l - r) % l]);
    }
    Signal::new(out)
}

/// Time reversal `(flip x)[n] = x[(−n) mod L]`; an involution.
pub fn flip(x: &Signal) -> Signal {
    let l = x.len();
    let mut out = Vec::with_capacity(l);
    for n in 0..l {
        out.push(x[(l - n) % l]);
    }
    Signal::new(out)
}

/// Circular autocorrelation `(1/L)·Σ_{n2} x[n2]·x[n2 − n1]` (the second
/// moment). Its DFT equals `|x̂[k]|²/L`.
pub fn autocorrelation(x: &Signal) -> Signal {
    let l = x.len();
    let mut out = Vec::with_capacity(l);
    for n1 in 0..l {
        let mut acc = 0.0;
        for n2 in 0..l {
            acc += x[n2] * x[(n2 + l - n1) % l];
        }
        out.push(acc / l as f64);
    }
    Signal::new(out)
}

/// Cross-correlation `c[r] = ⟨z, σ_r(ξ)⟩` for all `r`, via FFT.
pub fn cross_correlation(z: &Signal, xi: &Signal) -> Vec<f64> {
    assert_eq!(z.len(), xi.len(), "cross-correlation length mismatch");
    let l = z.len();
    let zh = dft(z);
    let xih = dft(xi);
    let mut buf: Vec<Complex64> = (0..l).map(|k| zh.coeffs()[k] * xih.coeffs()[k].conj()).collect();
    fft::synthesis_inplace(&mut buf);
    buf.iter().map(|c| c.re / l as f64).collect()
}

/// Shift-minimized relative error `min_r ‖z − σ_r(x)‖ / ‖x‖`.
pub fn nrmse(z: &Signal, x: &Signal) -> Result<f64> {
    if z.len() != x.len() {
        return Err(MraError::LengthMismatch { expected: x.len(), got: z.len() });
    }
    let x_norm_sq = x.norm_squared();
    if x_norm_sq <= 0.0 {
        return Err(MraError::ZeroReferenceSignal);
    }
    let z_norm_sq = z.norm_squared();
    let corr = cross_correlation(z, x);
    let best = corr.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dist_sq = (z_norm_sq + x_norm_sq - 2.0 * best).max(0.0);
    Ok((dist_sq / x_norm_sq).sqrt())
}

/// Element of `CO(L)`: a per-frequency phase rotation. Stores angles for
/// bins `1..=⌊(L−1)/2⌋`; for even `L` the Nyquist bin can only flip sign.
#[derive(Debug, Clone)]
pub struct CirculantRotation {
    len: usize,
    phases: Vec<f64>,
    nyquist_sign: f64,
}

impl CirculantRotation {
    pub fn new(len: usize, phases: Vec<f64>, nyquist_sign: f64) -> Self {
        assert!(len >= 2);
        assert_eq!(phases.len(), (len - 1) / 2, "one phase per free frequency");
        assert!(nyquist_sign == 1.0 || nyquist_sign == -1.0);
        Self { len, phases, nyquist_sign }
    }

    pub fn identity(len: usize) -> Self {
        Self::new(len, vec![0.0; (len - 1) / 2], 1.0)
    }

    /// The rotation with `θ_k = 2πkr/L`, which equals the circular shift by `r`.
    pub fn shift_ramp(len: usize, r: i64) -> Self {
        let l = len as f64;
        let phases = (1..=(len - 1) / 2)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 * r as f64 / l)
            .collect();
        let nyquist_sign = if len % 2 == 0 && r.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        Self::new(len, phases, nyquist_sign)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn nyquist_sign(&self) -> f64 {
        self.nyquist_sign
    }

    /// Composition with another rotation on the same length.
    pub fn compose(&self, other: &CirculantRotation) -> CirculantRotation {
        assert_eq!(self.len, other.len);
        let phases = self
            .phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| a + b)
            .collect();
        CirculantRotation::new(self.len, phases, self.nyquist_sign * other.nyquist_sign)
    }
}

/// Applies a circulant rotation in the Fourier domain: bin `k` gains phase
/// `θ_k`, the DC bin is fixed, and the even-`L` Nyquist bin is multiplied by
/// the rotation's sign. Norm-preserving and shift-commuting.
pub fn apply_rotation(c: &CirculantRotation, x: &Signal) -> Signal {
    assert_eq!(c.len(), x.len(), "rotation length mismatch");
    let l = x.len();
    let mut s = dft(x);
    for (idx, &theta) in c.phases().iter().enumerate() {
        let k = idx + 1;
        let rot = Complex64::from_polar(1.0, theta);
        let v = s.coeffs()[k] * rot;
        s.coeffs_mut()[k] = v;
        s.coeffs_mut()[l - k] = v.conj();
    }
    if l % 2 == 0 {
        s.coeffs_mut()[l / 2] *= c.nyquist_sign();
    }
    idft(&s)
}
