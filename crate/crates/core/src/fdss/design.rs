//! Shaping-filter designs.
//!
//! Each `*_fourier_coeffs` function returns the raw Fourier coefficients of
//! one chirp period restricted to the band; the matching `design_*`
//! function normalizes them to unit average power.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{band_limits, triangular_trajectory, ChirpTrajectory, FdssFilter, Normalization};
use crate::error::{invalid, Result};
use crate::numerics::{bessel_j_sequence, convolve_full, fresnel, IndexedSequence};

/// Bessel tails below this magnitude are dropped from harmonic factors.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;
/// Harmonic factors whose Bessel argument is below this are treated as a unit impulse.
pub const HARMONIC_SKIP_THRESHOLD: f64 = 1e-8;
/// Fourier harmonics kept for the triangular trajectory.
pub const DEFAULT_HARMONICS: usize = 64;

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("subcarrier count M must be at least 1"));
    }
    Ok(())
}

fn check_deviation(deviation: f64, m: usize, allow_zero: bool) -> Result<()> {
    check_m(m)?;
    if !deviation.is_finite() || deviation < 0.0 || (!allow_zero && deviation == 0.0) {
        return Err(invalid(format!("deviation D must be positive and finite, got {deviation}")));
    }
    if deviation > m as f64 {
        return Err(invalid(format!(
            "deviation D = {deviation} exceeds the subcarrier count M = {m}"
        )));
    }
    Ok(())
}

/// All-ones filter, i.e. plain DFT-s-OFDM.
pub fn design_plain(m: usize) -> Result<FdssFilter> {
    check_m(m)?;
    FdssFilter::new(vec![Complex64::new(1.0, 0.0); m], Normalization::UnitAveragePower, None)
}

/// `c_k = J_k(D/2)`: Jacobi-Anger expansion of `e^{j (D/2) sin(2 pi t / T_s)}`.
pub fn sinusoidal_fourier_coeffs(deviation: f64, m: usize) -> Result<FdssFilter> {
    check_deviation(deviation, m, true)?;
    let (l_d, l_u) = band_limits(m);
    let max_order = l_d.unsigned_abs().max(l_u.unsigned_abs()) as usize;
    let j = bessel_j_sequence(0.5 * deviation, max_order)?;
    let coeffs = (l_d..=l_u)
        .map(|k| {
            let v = j[k.unsigned_abs() as usize];
            let v = if k < 0 && k % 2 != 0 { -v } else { v };
            Complex64::new(v, 0.0)
        })
        .collect();
    FdssFilter::from_fourier(coeffs)
}

pub fn design_sinusoidal(deviation: f64, m: usize) -> Result<FdssFilter> {
    Ok(sinusoidal_fourier_coeffs(deviation, m)?.normalized())
}

/// Fourier coefficients of the linear chirp `e^{j pi D (tau^2 - tau)}`,
/// `tau = t / T_s in [0, 1)`, whose frequency ramps from `-D/2T_s` to `+D/2T_s`.
///
/// Completing the square gives
///
/// ```text
/// c_k = e^{-j pi D/4} e^{-j pi k - j pi k^2 / D} / sqrt(2D)
///       * (C(x1) + C(x2) + j S(x1) + j S(x2)),   x1,2 = (D/2 +- k) / sqrt(D/2)
/// ```
///
/// with `C`, `S` the normalized Fresnel integrals (`cos(pi u^2 / 2)` kernel).
/// Written with the angular deviation `D' = 2 pi D` this is the familiar
/// `sqrt(pi/D') e^{-j (2 pi k)^2 / 2D' - j pi k}` form with
/// `x1,2 = (D'/2 +- 2 pi k) / sqrt(pi D')`.
pub fn linear_fourier_coeffs(deviation: f64, m: usize) -> Result<FdssFilter> {
    check_deviation(deviation, m, false)?;
    let (l_d, l_u) = band_limits(m);
    let d = deviation;
    let root = (0.5 * d).sqrt();
    let amp = 1.0 / (2.0 * d).sqrt();
    let mut coeffs = Vec::with_capacity(m);
    for k in l_d..=l_u {
        let kf = k as f64;
        let (c1, s1) = fresnel((0.5 * d + kf) / root)?;
        let (c2, s2) = fresnel((0.5 * d - kf) / root)?;
        // pi k and pi k^2 / D reduced separately; k^2/D may be large.
        let parity = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let quad = -PI * ((kf * kf / d) + 0.25 * d);
        let phase = Complex64::from_polar(amp * parity, quad);
        coeffs.push(phase * Complex64::new(c1 + c2, s1 + s2));
    }
    FdssFilter::from_fourier(coeffs)
}

pub fn design_linear(deviation: f64, m: usize) -> Result<FdssFilter> {
    Ok(linear_fourier_coeffs(deviation, m)?.normalized())
}

/// Order-`m` Bessel values `J_m(z)` for `|m| <= m_max`, where `m_max` is the
/// last order with `|J_m(z)| >= tail_eps`.
fn bessel_factor(z: f64, tail_eps: f64) -> Result<Vec<f64>> {
    let az = z.abs();
    let cap = (az + 30.0 + 12.0 * az.cbrt()).ceil() as usize;
    let j = bessel_j_sequence(z, cap)?;
    let keep = j.iter().rposition(|v| v.abs() >= tail_eps).unwrap_or(0);
    Ok(j[..=keep].to_vec())
}

/// Places `value(m) * J_m` at index `spacing * m` for `|m| <= m_max`.
fn upsampled_factor(j: &[f64], spacing: usize, rotate: bool) -> IndexedSequence {
    let m_max = j.len() as i64 - 1;
    let spacing_i = spacing as i64;
    let mut values = vec![Complex64::new(0.0, 0.0); (2 * m_max * spacing_i + 1) as usize];
    for order in -m_max..=m_max {
        let mag = j[order.unsigned_abs() as usize];
        let v = if order < 0 && order % 2 != 0 { -mag } else { mag };
        let c = if rotate {
            // j^order
            match order.rem_euclid(4) {
                0 => Complex64::new(v, 0.0),
                1 => Complex64::new(0.0, v),
                2 => Complex64::new(-v, 0.0),
                _ => Complex64::new(0.0, -v),
            }
        } else {
            Complex64::new(v, 0.0)
        };
        values[((order + m_max) * spacing_i) as usize] = c;
    }
    IndexedSequence::new(-m_max * spacing_i, values)
}

/// Raw Fourier coefficients of `e^{j (D/2) f(2 pi t / T_s)}` for an
/// arbitrary trajectory, as the convolution over harmonics `n` of
///
/// * the cosine factor: `j^m J_m(a_n D / 2)` at index `n m`, and
/// * the sine factor: `J_m(b_n D / 2)` at index `n m`,
///
/// times the global phase `e^{j D a0 / 4}`, then cut to the band.
pub fn trajectory_fourier_coeffs(traj: &ChirpTrajectory, m: usize, tail_eps: f64) -> Result<FdssFilter> {
    check_deviation(traj.deviation(), m, false)?;
    if !(tail_eps.is_finite() && tail_eps > 0.0) {
        return Err(invalid(format!("tail_eps must be positive, got {tail_eps}")));
    }
    let half_d = 0.5 * traj.deviation();
    let mut acc = IndexedSequence::delta();
    for (i, (&a, &b)) in traj.cos_coeffs().iter().zip(traj.sin_coeffs()).enumerate() {
        let n = i + 1;
        for (coef, rotate) in [(a, true), (b, false)] {
            let z = coef * half_d;
            if z.abs() < HARMONIC_SKIP_THRESHOLD {
                continue;
            }
            let factor = upsampled_factor(&bessel_factor(z, tail_eps)?, n, rotate);
            acc = convolve_full(&acc, &factor);
        }
    }
    let global = Complex64::from_polar(1.0, 0.5 * half_d * traj.a0());
    let (l_d, l_u) = band_limits(m);
    let coeffs = (l_d..=l_u).map(|k| global * acc.get(k)).collect();
    FdssFilter::from_fourier(coeffs)
}

/// Design for an arbitrary trajectory. The returned filter's
/// [`FdssFilter::truncation_loss`] exposes the power that fell outside the band.
pub fn design_arbitrary(traj: &ChirpTrajectory, m: usize, tail_eps: f64) -> Result<FdssFilter> {
    Ok(trajectory_fourier_coeffs(traj, m, tail_eps)?.normalized())
}

/// Triangular chirp with `harmonics` Fourier terms.
pub fn design_triangular(deviation: f64, m: usize, harmonics: usize, down_first: bool) -> Result<FdssFilter> {
    let traj = triangular_trajectory(harmonics, down_first, deviation)?;
    design_arbitrary(&traj, m, DEFAULT_TAIL_EPS)
}
