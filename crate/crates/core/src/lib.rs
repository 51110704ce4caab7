//! Circularly-shifted chirps (CSCs) over DFT-spread OFDM.
//!
//! A DFT-s-OFDM transmitter whose frequency-domain spectral shaping (FDSS)
//! coefficients are the Fourier-series coefficients of one chirp period
//! emits a sum of chirps, circularly shifted in time, each carrying one
//! data symbol. This crate provides
//!
//! * [`numerics`]: Bessel functions of the first kind, Fresnel integrals,
//!   DFTs and indexed linear convolution;
//! * [`fdss`]: shaping-filter design for plain, sinusoidal, linear,
//!   triangular and arbitrary periodic frequency trajectories;
//! * [`transceiver`]: the DFT-s-OFDM modulator and the single-tap MMSE
//!   frequency-domain-equalizing receiver with repetition combining;
//! * [`channel`]: AWGN and tapped-delay-line Rician/Rayleigh block fading;
//! * [`analysis`]: post-equalization SNR theory, QPSK error rates and
//!   signal diagnostics (PSD, spectrogram, PAPR);
//! * [`simulation`]: a deterministic, parallel Monte Carlo BER sweep.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod fdss;
pub mod numerics;
pub mod simulation;
pub mod transceiver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
