//! Thread-local FFT plan cache.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static FORWARD: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
    static INVERSE: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward(buf: &mut [Complex64]) {
    let len = buf.len();
    let plan = FORWARD.with(|m| {
        m.borrow_mut()
            .entry(len)
            .or_insert_with(|| PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len)))
            .clone()
    });
    plan.process(buf);
}

/// Unnormalized inverse transform; callers divide by the length.
pub fn inverse(buf: &mut [Complex64]) {
    let len = buf.len();
    let plan = INVERSE.with(|m| {
        m.borrow_mut()
            .entry(len)
            .or_insert_with(|| PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len)))
            .clone()
    });
    plan.process(buf);
}

/// Smallest power of two >= n (FFT-friendly length).
pub fn good_len(n: usize) -> usize {
    n.next_power_of_two()
}
