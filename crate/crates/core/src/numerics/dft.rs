//! Discrete Fourier transforms.
//!
//! Forward: `X_k = sum_n x_n e^{-j 2 pi k n / L}` (unscaled).
//! Inverse: `x_n = (1/L) sum_k X_k e^{+j 2 pi k n / L}`.
//!
//! Fast transforms come from `rustfft`, which handles every length
//! (mixed radix, Rader, Bluestein). Plans are cached per thread.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;

use super::ComplexSequence;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Transform `buf` in place with the conventions in the module docs.
pub fn dft_in_place(buf: &mut [Complex64], inverse: bool) {
    let len = buf.len();
    if len <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    });
    plan.process(buf);
    if inverse {
        let scale = 1.0 / len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

pub fn dft(seq: &ComplexSequence, inverse: bool) -> ComplexSequence {
    let mut out = seq.as_slice().to_vec();
    dft_in_place(&mut out, inverse);
    ComplexSequence(out)
}

/// Direct `O(L^2)` evaluation of the same transform.
pub fn dft_direct(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let len = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = if inverse { 1.0 / len as f64 } else { 1.0 };
    (0..len)
        .map(|k| {
            let acc: Complex64 = x
                .iter()
                .enumerate()
                .map(|(n, &v)| {
                    // reduce k*n mod L before forming the angle
                    let idx = (k * n) % len;
                    v * Complex64::from_polar(1.0, sign * 2.0 * PI * idx as f64 / len as f64)
                })
                .sum();
            acc * scale
        })
        .collect()
}
