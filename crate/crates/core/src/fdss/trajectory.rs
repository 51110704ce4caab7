use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Periodic frequency trajectory of a chirp.
///
/// The chirp phase over one period `T_s` is `(D/2) f(2 pi t / T_s)` with
///
/// ```text
/// f(x) = a0/2 + sum_{n=1}^{N_h} (a_n cos(n x) + b_n sin(n x))
/// ```
///
/// and `f'` sweeping `[-1, 1]`, so the instantaneous frequency spans
/// `+-D / (2 T_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpTrajectory {
    a0: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
    deviation: f64,
}

/// Allowed relative error on `max f' = 1` and `min f' = -1`.
const SLOPE_TOLERANCE: f64 = 0.01;

impl ChirpTrajectory {
    pub fn new(a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>, deviation: f64) -> Result<Self> {
        if cos_coeffs.is_empty() || cos_coeffs.len() != sin_coeffs.len() {
            return Err(invalid(format!(
                "need N_h >= 1 cosine and sine coefficients of equal count, got {} and {}",
                cos_coeffs.len(),
                sin_coeffs.len()
            )));
        }
        if !a0.is_finite() || cos_coeffs.iter().chain(&sin_coeffs).any(|v| !v.is_finite()) {
            return Err(invalid("trajectory coefficients must be finite"));
        }
        if !(deviation.is_finite() && deviation > 0.0) {
            return Err(invalid(format!("deviation must be positive, got {deviation}")));
        }
        let traj = Self {
            a0,
            cos_coeffs,
            sin_coeffs,
            deviation,
        };
        let (lo, hi) = traj.slope_range();
        if (hi - 1.0).abs() > SLOPE_TOLERANCE || (lo + 1.0).abs() > SLOPE_TOLERANCE {
            return Err(invalid(format!(
                "trajectory slope must span [-1, 1] within {SLOPE_TOLERANCE}, found [{lo:.4}, {hi:.4}]"
            )));
        }
        Ok(traj)
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn harmonics(&self) -> usize {
        self.cos_coeffs.len()
    }

    /// Same shape, different deviation.
    pub fn with_deviation(&self, deviation: f64) -> Result<Self> {
        Self::new(self.a0, self.cos_coeffs.clone(), self.sin_coeffs.clone(), deviation)
    }

    /// `f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        self.harmonic_terms()
            .fold(0.5 * self.a0, |acc, (n, a, b)| {
                let (s, c) = (n * x).sin_cos();
                acc + a * c + b * s
            })
    }

    /// `f'(x)`.
    pub fn slope(&self, x: f64) -> f64 {
        self.harmonic_terms().fold(0.0, |acc, (n, a, b)| {
            let (s, c) = (n * x).sin_cos();
            acc + n * (b * c - a * s)
        })
    }

    /// `(min f', max f')` over a dense sweep of one period.
    pub fn slope_range(&self) -> (f64, f64) {
        let points = (64 * self.harmonics()).max(4096);
        (0..points)
            .map(|i| self.slope(2.0 * PI * i as f64 / points as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    fn harmonic_terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.cos_coeffs
            .iter()
            .zip(&self.sin_coeffs)
            .enumerate()
            .map(|(i, (&a, &b))| ((i + 1) as f64, a, b))
    }
}

/// Triangular (down-then-up or up-then-down) frequency trajectory.
///
/// One period of `f` is the odd parabola pair `x - x^2/pi` on `[0, pi)`
/// and `x + x^2/pi` on `[-pi, 0)`, whose sine series has
/// `b_n = (4 - 2 pi n sin(pi n) - 4 cos(pi n)) / (pi^2 n^3)`:
/// `8 / (pi^2 n^3)` for odd `n` and zero for even `n`. With `down_first`
/// the frequency falls during the first half period; otherwise every
/// `b_n` is negated.
///
/// The truncated series only reaches the unit-slope requirement once the
/// dropped tail `sum_{odd n > N_h} 8 / (pi^2 n^2)` is under one percent, so
/// fewer than about 41 harmonics is rejected.
pub fn triangular_trajectory(harmonics: usize, down_first: bool, deviation: f64) -> Result<ChirpTrajectory> {
    if harmonics == 0 {
        return Err(invalid("triangular trajectory needs at least one harmonic"));
    }
    let sign = if down_first { 1.0 } else { -1.0 };
    let sin_coeffs = (1..=harmonics)
        .map(|n| {
            if n % 2 == 1 {
                let n = n as f64;
                sign * 8.0 / (PI * PI * n * n * n)
            } else {
                0.0
            }
        })
        .collect();
    ChirpTrajectory::new(0.0, vec![0.0; harmonics], sin_coeffs, deviation)
}
