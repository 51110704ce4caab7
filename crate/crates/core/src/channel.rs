//! AWGN and tapped-delay-line multipath channels.
//!
//! Fading is block fading: one realization per frame, constant over it.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::ComplexSequence;

/// Power delay profile with a Rician first tap.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub tap_powers_db: Vec<f64>,
    /// Linear K-factor of tap 0.
    pub rician_k: f64,
    pub tap_delays: Vec<usize>,
}

impl Default for ChannelProfile {
    fn default() -> Self {
        Self {
            tap_powers_db: vec![0.0, -10.0, -20.0],
            rician_k: 10.0,
            tap_delays: vec![0, 1, 2],
        }
    }
}

impl ChannelProfile {
    pub fn new(tap_powers_db: Vec<f64>, rician_k: f64, tap_delays: Vec<usize>) -> Result<Self> {
        let p = Self {
            tap_powers_db,
            rician_k,
            tap_delays,
        };
        p.validate()?;
        Ok(p)
    }

    /// A single deterministic unit tap: the pure AWGN channel.
    pub fn awgn() -> Self {
        Self {
            tap_powers_db: vec![0.0],
            rician_k: f64::INFINITY,
            tap_delays: vec![0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tap_powers_db.is_empty() || self.tap_powers_db.len() != self.tap_delays.len() {
            return Err(invalid(format!(
                "need one power per delay, got {} powers and {} delays",
                self.tap_powers_db.len(),
                self.tap_delays.len()
            )));
        }
        if self.tap_powers_db.iter().any(|p| !p.is_finite()) {
            return Err(invalid("tap powers must be finite"));
        }
        if !(self.rician_k >= 0.0) {
            return Err(invalid(format!("K-factor must be >= 0, got {}", self.rician_k)));
        }
        if self.tap_delays.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("tap delays must be strictly increasing"));
        }
        Ok(())
    }

    /// Checks that every delay fits inside a CP of `cp_len` samples.
    pub fn check_cp(&self, cp_len: usize) -> Result<()> {
        match self.max_delay() {
            d if d < cp_len || d == 0 => Ok(()),
            d => Err(invalid(format!("max tap delay {d} is not below the CP length {cp_len}"))),
        }
    }

    pub fn max_delay(&self) -> usize {
        self.tap_delays.last().copied().unwrap_or(0)
    }

    /// Linear tap powers normalized to unit sum.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.tap_powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }
}

/// Tap gains of one channel draw, aligned with the profile delays.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<Complex64>,
    pub delays: Vec<usize>,
}

impl ChannelRealization {
    pub fn identity() -> Self {
        Self {
            taps: vec![Complex64::new(1.0, 0.0)],
            delays: vec![0],
        }
    }

    pub fn new(taps: Vec<Complex64>, delays: Vec<usize>) -> Result<Self> {
        if taps.is_empty() || taps.len() != delays.len() {
            return Err(invalid("taps and delays must be nonempty and of equal length"));
        }
        if taps.iter().any(|t| !(t.re.is_finite() && t.im.is_finite())) {
            return Err(invalid("taps must be finite"));
        }
        Ok(Self { taps, delays })
    }

    pub fn power(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Circular complex Gaussian with `E|z|^2 = var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Draws one realization: tap 0 Rician with the profile's K, the rest Rayleigh.
pub fn draw<R: Rng + ?Sized>(profile: &ChannelProfile, rng: &mut R) -> ChannelRealization {
    let powers = profile.normalized_powers();
    let taps = powers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == 0 {
                let k = profile.rician_k;
                if k.is_infinite() {
                    return Complex64::new(p.sqrt(), 0.0);
                }
                Complex64::new((p * k / (k + 1.0)).sqrt(), 0.0) + complex_gaussian(rng, p / (k + 1.0))
            } else {
                complex_gaussian(rng, p)
            }
        })
        .collect();
    ChannelRealization {
        taps,
        delays: profile.tap_delays.clone(),
    }
}

/// Linear convolution truncated to the input length, plus AWGN of
/// per-sample variance `noise_var`.
pub fn apply<R: Rng + ?Sized>(
    signal: &[Complex64],
    ch: &ChannelRealization,
    noise_var: f64,
    rng: &mut R,
) -> Result<ComplexSequence> {
    let max_delay = ch.delays.iter().copied().max().unwrap_or(0);
    if signal.len() < max_delay.max(1) {
        return Err(invalid(format!(
            "signal of {} samples is shorter than the max delay {max_delay}",
            signal.len()
        )));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(invalid(format!("noise variance must be finite and >= 0, got {noise_var}")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); signal.len()];
    for (&tap, &d) in ch.taps.iter().zip(&ch.delays) {
        for (o, &s) in out[d..].iter_mut().zip(signal) {
            *o += tap * s;
        }
    }
    if noise_var > 0.0 {
        for o in &mut out {
            *o += complex_gaussian(rng, noise_var);
        }
    }
    ComplexSequence::new(out)
}

/// `H_k = sum_i tap_i exp(-j 2 pi k d_i / N)` for `k = 0..N` (natural order).
pub fn freq_response(ch: &ChannelRealization, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            ch.taps
                .iter()
                .zip(&ch.delays)
                .map(|(&t, &d)| {
                    let ang = -2.0 * PI * ((k * d) % n) as f64 / n as f64;
                    t * Complex64::from_polar(1.0, ang)
                })
                .sum()
        })
        .collect()
}
