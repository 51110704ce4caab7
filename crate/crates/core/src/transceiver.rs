//! DFT-s-OFDM transmitter with FDSS and the matching MMSE-FDE receiver.
//!
//! # Subcarrier alignment
//!
//! Subcarrier `k` (`L_d <= k <= L_u`) is read from M-point DFT output bin
//! `k mod M` and written to N-point IDFT input bin `k mod N`; negative
//! subcarriers wrap to the top of each transform (natural FFT order).
//!
//! # Scaling
//!
//! The time-domain body is `x_n = (sqrt(R) N / M) * IDFT_N(Y)_n` where
//! `Y_k = c_k X_k` and `X = DFT_M` of the (decimated) data vector. With unit
//! energy symbols and `sum |c_k|^2 = M` this gives unit mean sample power.
//! The receiver scales the N-point DFT by `sqrt(M) / N`, so that received
//! subcarriers read `r_k = H_k c_k X~_k + w_k` with `E|X~_k|^2 = 1`.
//! A per-sample time-domain noise variance `s2` then shows up as a
//! per-subcarrier noise variance `s2 * M / N`; see
//! [`FrameConfig::sample_noise_variance`].

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{invalid, Error, Result};
use crate::fdss::{band_limits, FdssFilter};
use crate::numerics::{dft_in_place, ComplexSequence};

/// Chirp (OFDM symbol) duration of the reference numerology, seconds.
pub const SYMBOL_DURATION_S: f64 = 193.4e-9;
/// Cyclic-prefix duration of the reference numerology, seconds.
pub const CP_DURATION_S: f64 = 36.3e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    Qpsk,
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Qpsk => 2,
        }
    }
}

/// Frame numerology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    /// Occupied subcarriers (DFT-spreading size).
    pub m: usize,
    /// IDFT size.
    pub n: usize,
    pub cp_len: usize,
    /// Repetition factor: data occupies every `R`-th DFT input bin.
    pub repetition: usize,
    pub constellation: Constellation,
}

impl Default for FrameConfig {
    /// `M = 336`, `N = 512`, CP of 96 samples (36.3 ns at 193.4 ns / 512), `R = 1`.
    fn default() -> Self {
        Self {
            m: 336,
            n: 512,
            cp_len: cp_len_for(512),
            repetition: 1,
            constellation: Constellation::Qpsk,
        }
    }
}

/// CP length in samples for an `n`-point IDFT of the reference numerology.
pub fn cp_len_for(n: usize) -> usize {
    (CP_DURATION_S / (SYMBOL_DURATION_S / n as f64)).round() as usize
}

impl FrameConfig {
    pub fn new(m: usize, n: usize, cp_len: usize, repetition: usize) -> Result<Self> {
        let cfg = Self {
            m,
            n,
            cp_len,
            repetition,
            constellation: Constellation::Qpsk,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_repetition(mut self, repetition: usize) -> Result<Self> {
        self.repetition = repetition;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(invalid("M and N must be positive"));
        }
        if self.m > self.n {
            return Err(invalid(format!("M = {} exceeds N = {}", self.m, self.n)));
        }
        if self.cp_len >= self.n {
            return Err(invalid(format!("CP length {} must be below N = {}", self.cp_len, self.n)));
        }
        if self.repetition == 0 || !self.m.is_multiple_of(self.repetition) {
            return Err(invalid(format!(
                "repetition factor {} must divide M = {}",
                self.repetition, self.m
            )));
        }
        Ok(())
    }

    /// Data symbols per frame, `M / R`.
    pub fn symbols_per_frame(&self) -> usize {
        self.m / self.repetition
    }

    pub fn bits_per_frame(&self) -> usize {
        self.symbols_per_frame() * self.constellation.bits_per_symbol()
    }

    /// Samples per frame including the CP.
    pub fn frame_len(&self) -> usize {
        self.n + self.cp_len
    }

    /// Time-domain per-sample noise variance that produces the given
    /// per-subcarrier noise variance at the receiver.
    pub fn sample_noise_variance(&self, subcarrier_noise_var: f64) -> f64 {
        subcarrier_noise_var * self.n as f64 / self.m as f64
    }
}

/// Gray-mapped QPSK: `(b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(invalid(format!("QPSK needs an even number of bits, got {}", bits.len())));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(invalid("bits must be 0 or 1"));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|p| {
            Complex64::new(
                (1.0 - 2.0 * p[0] as f64) * FRAC_1_SQRT_2,
                (1.0 - 2.0 * p[1] as f64) * FRAC_1_SQRT_2,
            )
        })
        .collect())
}

/// Quadrant slicer, the inverse of [`qpsk_map`]. Insensitive to any
/// positive real scaling of the symbols.
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|s| [(s.re < 0.0) as u8, (s.im < 0.0) as u8])
        .collect()
}

/// Per-bit soft values proportional to the LLR; positive favours bit 0.
pub fn qpsk_soft_bits(symbols: &[Complex64]) -> Vec<f64> {
    symbols
        .iter()
        .flat_map(|s| [s.re * std::f64::consts::SQRT_2, s.im * std::f64::consts::SQRT_2])
        .collect()
}

/// Data symbols of one frame, with the bits they came from when known.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFrame {
    pub symbols: Vec<Complex64>,
    pub bits: Option<Vec<u8>>,
}

impl DataFrame {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        let symbols = qpsk_map(&bits)?;
        Ok(Self {
            symbols,
            bits: Some(bits),
        })
    }

    /// Arbitrary symbols (e.g. a single active chirp for inspection).
    pub fn from_symbols(symbols: Vec<Complex64>) -> Self {
        Self { symbols, bits: None }
    }

    /// Uniform random QPSK frame.
    pub fn random<R: Rng + ?Sized>(n_symbols: usize, rng: &mut R) -> Self {
        let bits: Vec<u8> = (0..2 * n_symbols).map(|_| rng.random_range(0..=1u8)).collect();
        Self::from_bits(bits).expect("even bit count")
    }
}

/// One transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TxSignal {
    /// CP followed by the N-sample body.
    pub samples: ComplexSequence,
    /// Shaped subcarrier symbols `c_k X_k` for `k = L_d ..= L_u`.
    pub freq_symbols: Vec<Complex64>,
    cp_len: usize,
}

impl TxSignal {
    /// The N samples after the cyclic prefix.
    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.cp_len..]
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }
}

/// Receiver output for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    pub symbols: Vec<Complex64>,
    pub soft_bits: Vec<f64>,
}

impl Demodulated {
    pub fn hard_bits(&self) -> Vec<u8> {
        qpsk_demap(&self.symbols)
    }
}

/// Transmitter and receiver bound to one filter and numerology.
#[derive(Debug, Clone)]
pub struct Modem {
    filter: FdssFilter,
    cfg: FrameConfig,
}

impl Modem {
    pub fn new(filter: FdssFilter, cfg: FrameConfig) -> Result<Self> {
        cfg.validate()?;
        if filter.m() != cfg.m {
            return Err(invalid(format!(
                "filter has M = {} coefficients but the frame uses M = {}",
                filter.m(),
                cfg.m
            )));
        }
        Ok(Self { filter, cfg })
    }

    pub fn filter(&self) -> &FdssFilter {
        &self.filter
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    fn subcarriers(&self) -> impl Iterator<Item = i64> {
        let (l_d, l_u) = band_limits(self.cfg.m);
        l_d..=l_u
    }

    pub fn modulate(&self, data: &DataFrame) -> Result<TxSignal> {
        let FrameConfig { m, n, cp_len, repetition, .. } = self.cfg;
        if data.symbols.len() != self.cfg.symbols_per_frame() {
            return Err(Error::LengthMismatch {
                expected: self.cfg.symbols_per_frame(),
                actual: data.symbols.len(),
            });
        }
        let mut spread = vec![Complex64::new(0.0, 0.0); m];
        for (i, &d) in data.symbols.iter().enumerate() {
            spread[i * repetition] = d;
        }
        dft_in_place(&mut spread, false);

        let mut grid = vec![Complex64::new(0.0, 0.0); n];
        let freq_symbols: Vec<Complex64> = self
            .subcarriers()
            .zip(self.filter.coeffs())
            .map(|(k, &c)| {
                let y = c * spread[k.rem_euclid(m as i64) as usize];
                grid[k.rem_euclid(n as i64) as usize] = y;
                y
            })
            .collect();
        dft_in_place(&mut grid, true);
        let scale = (repetition as f64).sqrt() * n as f64 / m as f64;
        let mut samples = Vec::with_capacity(n + cp_len);
        samples.extend(grid[n - cp_len..].iter().map(|v| v * scale));
        samples.extend(grid.iter().map(|v| v * scale));
        Ok(TxSignal {
            samples: ComplexSequence::new(samples)?,
            freq_symbols,
            cp_len,
        })
    }

    /// Equalized, despread symbol estimates.
    ///
    /// `channel_freq` is the channel response on the N-point grid in natural
    /// order (as from [`crate::channel::freq_response`]); `None` means an
    /// ideal channel. `noise_var` is the per-subcarrier noise variance
    /// `1 / rho`; zero gives zero-forcing.
    pub fn demodulate(
        &self,
        rx: &[Complex64],
        channel_freq: Option<&[Complex64]>,
        noise_var: f64,
    ) -> Result<Demodulated> {
        let FrameConfig { m, n, cp_len, repetition, .. } = self.cfg;
        if rx.is_empty() {
            return Err(invalid("received frame is empty"));
        }
        if rx.len() != n + cp_len {
            return Err(Error::LengthMismatch {
                expected: n + cp_len,
                actual: rx.len(),
            });
        }
        if let Some(h) = channel_freq {
            if h.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: h.len(),
                });
            }
        }
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return Err(invalid(format!("noise variance must be finite and >= 0, got {noise_var}")));
        }

        let mut spectrum = rx[cp_len..].to_vec();
        dft_in_place(&mut spectrum, false);
        let rx_scale = (m as f64).sqrt() / n as f64;

        // received value and effective gain per subcarrier, in k order
        let (received, gains): (Vec<Complex64>, Vec<Complex64>) = self
            .subcarriers()
            .zip(self.filter.coeffs())
            .map(|(k, &c)| {
                let bin = k.rem_euclid(n as i64) as usize;
                let h = channel_freq.map_or(Complex64::new(1.0, 0.0), |h| h[bin]);
                (spectrum[bin] * rx_scale, h * c)
            })
            .unzip();

        let per_copy = m / repetition;
        let (l_d, _) = band_limits(m);
        let mut equalized = vec![Complex64::new(0.0, 0.0); per_copy];
        for i in 0..per_copy {
            let mut combined = Complex64::new(0.0, 0.0);
            let mut gain = 0.0;
            for u in 0..repetition {
                let idx = i + u * per_copy;
                combined += gains[idx].conj() * received[idx];
                gain += gains[idx].norm_sqr();
            }
            let denom = gain + noise_var;
            let z = if denom > 0.0 { combined / denom } else { Complex64::new(0.0, 0.0) };
            // subcarrier l_d + i feeds DFT bin (l_d + i) mod (M/R)
            let bin = (l_d + i as i64).rem_euclid(per_copy as i64) as usize;
            equalized[bin] = z;
        }
        dft_in_place(&mut equalized, true);
        let despread = (per_copy as f64).sqrt();
        let symbols: Vec<Complex64> = equalized.iter().map(|v| v * despread).collect();
        let soft_bits = qpsk_soft_bits(&symbols);
        Ok(Demodulated { symbols, soft_bits })
    }
}

/// Convenience wrapper around [`Modem::modulate`].
pub fn modulate(data: &DataFrame, filter: &FdssFilter, cfg: &FrameConfig) -> Result<TxSignal> {
    Modem::new(filter.clone(), *cfg)?.modulate(data)
}

/// Convenience wrapper around [`Modem::demodulate`].
pub fn demodulate(
    rx: &[Complex64],
    channel_freq: Option<&[Complex64]>,
    filter: &FdssFilter,
    cfg: &FrameConfig,
    noise_var: f64,
) -> Result<Demodulated> {
    Modem::new(filter.clone(), *cfg)?.demodulate(rx, channel_freq, noise_var)
}
