//! Frequency-domain spectral shaping (FDSS) filters.
//!
//! A filter holds one complex coefficient `c_k` per occupied subcarrier
//! `k = L_d ..= L_u`, with `L_d = floor(M/2) - M + 1` and `L_u = floor(M/2)`.
//! When the coefficients are the Fourier-series coefficients of one period
//! of `e^{j phi(t)}`, the DFT-s-OFDM transmitter emits circularly-shifted
//! copies of that chirp, one per data symbol.
//!
//! Designs return filters scaled to `sum |c_k|^2 = M`
//! ([`Normalization::UnitAveragePower`]), which makes the all-ones plain
//! filter and every chirp filter power-comparable. The raw Fourier
//! coefficients stay recoverable through [`FdssFilter::raw_coeffs`], and
//! their power shortfall is reported as [`FdssFilter::truncation_loss`].

mod csv;
mod design;
mod trajectory;

pub use design::{
    design_arbitrary, design_linear, design_plain, design_sinusoidal, design_triangular,
    linear_fourier_coeffs, sinusoidal_fourier_coeffs, trajectory_fourier_coeffs,
    DEFAULT_HARMONICS, DEFAULT_TAIL_EPS, HARMONIC_SKIP_THRESHOLD,
};
pub use trajectory::{triangular_trajectory, ChirpTrajectory};

use num_complex::Complex64;
use std::fmt;

use crate::error::{invalid, Result};

/// Lowest and highest occupied subcarrier index for an `M`-subcarrier band.
pub fn band_limits(m: usize) -> (i64, i64) {
    let m = m as i64;
    (m / 2 - m + 1, m / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Fourier coefficients of a unit-modulus signal, `sum |c_k|^2 <= 1`.
    RawFourier,
    /// Scaled to `sum |c_k|^2 = M`.
    UnitAveragePower,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::RawFourier => "raw_fourier",
            Normalization::UnitAveragePower => "unit_average_power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "raw_fourier" => Some(Normalization::RawFourier),
            "unit_average_power" => Some(Normalization::UnitAveragePower),
            _ => None,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shaping coefficients over `k = L_d ..= L_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdssFilter {
    coeffs: Vec<Complex64>,
    normalization: Normalization,
    /// `sum |c_k|^2` of the underlying Fourier coefficients, when known.
    raw_power: Option<f64>,
}

impl FdssFilter {
    /// Wraps coefficients ordered from `L_d` to `L_u`; `M` is their count.
    pub fn new(
        coeffs: Vec<Complex64>,
        normalization: Normalization,
        raw_power: Option<f64>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("filter needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("filter coefficients must be finite"));
        }
        Ok(Self {
            coeffs,
            normalization,
            raw_power,
        })
    }

    /// Raw Fourier coefficients; the raw power is their own power.
    pub fn from_fourier(coeffs: Vec<Complex64>) -> Result<Self> {
        let power = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Self::new(coeffs, Normalization::RawFourier, Some(power))
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn l_d(&self) -> i64 {
        band_limits(self.m()).0
    }

    pub fn l_u(&self) -> i64 {
        band_limits(self.m()).1
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Coefficients in subcarrier order `L_d ..= L_u`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, or zero outside the band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let off = k - self.l_d();
        if off < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(off as usize).copied().unwrap_or_default()
    }

    /// `(k, c_k)` pairs in subcarrier order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let l_d = self.l_d();
        self.coeffs.iter().enumerate().map(move |(i, &c)| (l_d + i as i64, c))
    }

    /// `sum |c_k|^2`.
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn raw_power(&self) -> Option<f64> {
        self.raw_power
    }

    /// Power of the ideal periodic signal that falls outside the band,
    /// `1 - sum |c_k|^2` over the raw coefficients.
    pub fn truncation_loss(&self) -> Option<f64> {
        self.raw_power.map(|p| 1.0 - p)
    }

    /// The unscaled Fourier coefficients, when the raw power is known.
    pub fn raw_coeffs(&self) -> Option<Vec<Complex64>> {
        let raw = self.raw_power?;
        let now = self.power();
        if now == 0.0 {
            return Some(self.coeffs.clone());
        }
        let g = (raw / now).sqrt();
        Some(self.coeffs.iter().map(|c| c * g).collect())
    }

    /// Rescales to `sum |c_k|^2 = M`. A filter with zero power is returned
    /// unchanged apart from the label.
    pub fn normalized(mut self) -> Self {
        let p = self.power();
        if p > 0.0 {
            let g = (self.m() as f64 / p).sqrt();
            for c in self.coeffs.iter_mut() {
                *c *= g;
            }
        }
        self.normalization = Normalization::UnitAveragePower;
        self
    }

    /// `max |c_k| / min |c_k|`; infinite if some coefficient vanishes.
    pub fn magnitude_ratio(&self) -> f64 {
        let (lo, hi) = self.coeffs.iter().map(|c| c.norm()).fold(
            (f64::INFINITY, 0.0f64),
            |(lo, hi), v| (lo.min(v), hi.max(v)),
        );
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Time-domain periodic signal `sum_k c_k e^{j 2 pi k n / n_samples}`
    /// for `n = 0 .. n_samples`, using the raw Fourier coefficients when
    /// available. This is one chirp period sampled `n_samples` times.
    pub fn synthesize_period(&self, n_samples: usize) -> Vec<Complex64> {
        let coeffs = self.raw_coeffs().unwrap_or_else(|| self.coeffs.clone());
        let mut grid = vec![Complex64::new(0.0, 0.0); n_samples];
        let n = n_samples as i64;
        for (i, c) in coeffs.iter().enumerate() {
            let k = self.l_d() + i as i64;
            grid[k.rem_euclid(n) as usize] += c;
        }
        crate::numerics::dft_in_place(&mut grid, true);
        for v in grid.iter_mut() {
            *v *= n_samples as f64;
        }
        grid
    }
}
