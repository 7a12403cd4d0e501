//! Cached FFT plans shared by every transform in the crate.
//!
//! The transform convention used throughout is
//! `x̂[m] = Σ_n x[n]·exp(+2πi·nm/L)` with the inverse carrying the `1/L`
//! factor. In rustfft terms the forward analysis transform is therefore the
//! planner's *inverse* direction and vice versa.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

#[derive(Default)]
struct PlanCache {
    planner: Option<FftPlanner<f64>>,
    analysis: HashMap<usize, Arc<dyn Fft<f64>>>,
    synthesis: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl PlanCache {
    fn analysis(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.analysis
            .entry(len)
            .or_insert_with(|| planner.plan_fft_inverse(len))
            .clone()
    }

    fn synthesis(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.synthesis
            .entry(len)
            .or_insert_with(|| planner.plan_fft_forward(len))
            .clone()
    }
}

/// In-place `buf[m] ← Σ_n buf[n]·exp(+2πi·nm/L)`.
pub fn analysis_inplace(buf: &mut [Complex64]) {
    let plan = PLANS.with(|p| p.borrow_mut().analysis(buf.len()));
    plan.process(buf);
}

/// In-place unnormalized inverse: `buf[n] ← Σ_m buf[m]·exp(−2πi·nm/L)`.
/// Callers apply the `1/L` normalization themselves.
pub fn synthesis_inplace(buf: &mut [Complex64]) {
    let plan = PLANS.with(|p| p.borrow_mut().synthesis(buf.len()));
    plan.process(buf);
}
