//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's special functions or designs.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // Seed with enough panels that oscillatory integrands are resolved.
    let panels = 64;
    let w = (b - a) / panels as f64;
    let mut stack: Vec<(f64, f64, f64)> = (0..panels)
        .map(|i| (a + i as f64 * w, a + (i + 1) as f64 * w, tol / panels as f64))
        .collect();
    let mut total = 0.0;
    while let Some((lo, hi, t)) = stack.pop() {
        let (v, err) = gk15(&f, lo, hi);
        if err <= t.max(1e-17) || (hi - lo) < 1e-12 * (b - a).abs() {
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
    }
    total
}

/// `J_k(x) = (1/pi) int_0^pi cos(k t - x sin t) dt`.
pub fn bessel_quad(k: i64, x: f64) -> f64 {
    integrate(|t| (k as f64 * t - x * t.sin()).cos(), 0.0, PI, 1e-14) / PI
}

/// Normalized Fresnel integrals by quadrature.
pub fn fresnel_quad(x: f64) -> (f64, f64) {
    let c = integrate(|u| (0.5 * PI * u * u).cos(), 0.0, x, 1e-14);
    let s = integrate(|u| (0.5 * PI * u * u).sin(), 0.0, x, 1e-14);
    (c, s)
}

/// Fourier coefficients `c_k, k in ks`, of the period-1 signal
/// `e^{j phase(tau)}` from `samples` uniform samples (direct sums).
pub fn sampled_fourier<P: Fn(f64) -> f64>(phase: P, ks: std::ops::RangeInclusive<i64>, samples: usize) -> Vec<Complex64> {
    let x: Vec<Complex64> = (0..samples)
        .map(|n| Complex64::from_polar(1.0, phase(n as f64 / samples as f64)))
        .collect();
    ks.map(|k| {
        let acc: Complex64 = x
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let idx = (k * n as i64).rem_euclid(samples as i64) as f64;
                v * Complex64::from_polar(1.0, -2.0 * PI * idx / samples as f64)
            })
            .sum();
        acc / samples as f64
    })
    .collect()
}

/// Linear-chirp phase `pi D (tau^2 - tau)`.
pub fn linear_phase(d: f64) -> impl Fn(f64) -> f64 {
    move |tau| PI * d * (tau * tau - tau)
}

/// Sinusoidal-chirp phase `(D/2) sin(2 pi tau)`.
pub fn sinusoidal_phase(d: f64) -> impl Fn(f64) -> f64 {
    move |tau| 0.5 * d * (2.0 * PI * tau).sin()
}

/// Triangular (down-first) chirp phase `(D/2) f(2 pi tau)` from the
/// piecewise-quadratic definition of `f`.
pub fn triangular_phase(d: f64) -> impl Fn(f64) -> f64 {
    move |tau| {
        let x = (2.0 * PI * tau + PI).rem_euclid(2.0 * PI) - PI;
        let f = if x < 0.0 { x * x / PI + x } else { -x * x / PI + x };
        0.5 * d * f
    }
}

/// `10 log10(sum |a - b|^2 / sum |b|^2)`.
pub fn nmse_db(estimate: &[Complex64], reference: &[Complex64]) -> f64 {
    assert_eq!(estimate.len(), reference.len());
    let err: f64 = estimate.iter().zip(reference).map(|(a, b)| (a - b).norm_sqr()).sum();
    let pow: f64 = reference.iter().map(|b| b.norm_sqr()).sum();
    10.0 * (err / pow).log10()
}

/// `sqrt(sum |a - b|^2 / sum |b|^2)`.
pub fn relative_rms(estimate: &[Complex64], reference: &[Complex64]) -> f64 {
    10f64.powf(nmse_db(estimate, reference) / 20.0)
}

/// Complex Gaussian Q-function oracle: `Q(x) = 0.5 erfc(x / sqrt 2)` by quadrature of the tail.
pub fn q_quad(x: f64) -> f64 {
    let upper = x + 40.0;
    integrate(|t| (-0.5 * t * t).exp(), x, upper, 1e-16) / (2.0 * PI).sqrt()
}
