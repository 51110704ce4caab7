//! Closed-form link theory and signal diagnostics.
//!
//! Post-equalization SNR of single-tap MMSE-FDE followed by IDFT despreading:
//!
//! ```text
//! sqrt(alpha) = (R/M) sum_kappa c'_kappa / (c'_kappa + 1/snr)
//! SNR_post    = 1 / (sqrt(1/alpha) - 1)
//! ```
//!
//! with `c'_kappa = sum_u |g_{kappa + u M/R}|^2` (just `|g_k|^2` for `R = 1`).
//! `snr` is the per-subcarrier SNR; after combining `R` copies the input SNR
//! of the despread symbol is `R * snr`, reported as [`SnrPostReport::snr_in`].

use num_complex::Complex64;
use std::f64::consts::SQRT_2;
use std::io::Write;

use crate::error::{invalid, Result};
use crate::fdss::{FdssFilter, Normalization};
use crate::numerics::dft_in_place;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPostReport {
    pub alpha_mmse: f64,
    /// `+inf` when `alpha == 1` (noise-free limit); see `saturated`.
    pub snr_post: f64,
    /// Input SNR of the combined symbol, `R * snr`.
    pub snr_in: f64,
    pub repetition: usize,
    pub saturated: bool,
}

/// Post-equalization SNR for a designed filter on an AWGN channel.
pub fn snr_post(filter: &FdssFilter, snr: f64, repetition: usize) -> Result<SnrPostReport> {
    if filter.normalization() != Normalization::UnitAveragePower {
        return Err(invalid("snr_post expects a unit-average-power filter"));
    }
    let gains: Vec<f64> = filter.coeffs().iter().map(|c| c.norm_sqr()).collect();
    snr_post_from_gains(&gains, snr, repetition)
}

/// Post-equalization SNR for arbitrary per-subcarrier power gains
/// `|H_k c_k|^2`, ordered `L_d ..= L_u`.
pub fn snr_post_from_gains(gains: &[f64], snr: f64, repetition: usize) -> Result<SnrPostReport> {
    let m = gains.len();
    if m == 0 {
        return Err(invalid("no subcarrier gains"));
    }
    if repetition == 0 || !m.is_multiple_of(repetition) {
        return Err(invalid(format!("repetition factor {repetition} must divide M = {m}")));
    }
    if !(snr > 0.0) || snr.is_nan() {
        return Err(invalid(format!("snr must be positive, got {snr}")));
    }
    let per_copy = m / repetition;
    // sqrt(alpha) = mean(s c' / (s c' + 1)); 1 - sqrt(alpha) = mean(1 / (s c' + 1))
    let (mut hit, mut miss) = (0.0, 0.0);
    for i in 0..per_copy {
        let c: f64 = (0..repetition).map(|u| gains[i + u * per_copy]).sum();
        if snr.is_infinite() {
            if c > 0.0 {
                hit += 1.0;
            } else {
                miss += 1.0;
            }
        } else {
            let sc = snr * c;
            hit += sc / (sc + 1.0);
            miss += 1.0 / (sc + 1.0);
        }
    }
    hit /= per_copy as f64;
    miss /= per_copy as f64;
    let saturated = miss == 0.0;
    Ok(SnrPostReport {
        alpha_mmse: hit * hit,
        snr_post: if saturated { f64::INFINITY } else { hit / miss },
        snr_in: repetition as f64 * snr,
        repetition,
        saturated,
    })
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Gray-QPSK bit error rate at symbol SNR `snr_post`: `Q(sqrt(snr_post))`.
pub fn theoretical_ber_qpsk(snr_post: f64) -> f64 {
    if snr_post.is_infinite() {
        return 0.0;
    }
    q_function(snr_post.max(0.0).sqrt())
}

/// Power spectrum on a centered frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Signed bin index, `-nfft/2 ..` upward.
    pub bins: Vec<i64>,
    pub db: Vec<f64>,
}

/// Averaged periodogram over `n_avg` consecutive rectangular segments of
/// `nfft` samples, normalized so the mean linear power over the in-band bins
/// `band.0 ..= band.1` is 0 dB.
pub fn psd(signal: &[Complex64], nfft: usize, n_avg: usize, band: (i64, i64)) -> Result<Spectrum> {
    if nfft == 0 || n_avg == 0 {
        return Err(invalid("nfft and n_avg must be positive"));
    }
    if signal.len() < nfft * n_avg {
        return Err(invalid(format!(
            "need {} samples for {n_avg} segments of {nfft}, got {}",
            nfft * n_avg,
            signal.len()
        )));
    }
    let half = (nfft / 2) as i64;
    if band.0 > band.1 || band.0 < -half || band.1 >= nfft as i64 - half {
        return Err(invalid(format!("band {band:?} outside the {nfft}-bin axis")));
    }
    let mut acc = vec![0.0; nfft];
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for seg in signal.chunks_exact(nfft).take(n_avg) {
        buf.copy_from_slice(seg);
        dft_in_place(&mut buf, false);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v.norm_sqr();
        }
    }
    let bins: Vec<i64> = (-half..nfft as i64 - half).collect();
    let at = |k: i64| acc[k.rem_euclid(nfft as i64) as usize];
    let ref_power = (band.0..=band.1).map(at).sum::<f64>() / (band.1 - band.0 + 1) as f64;
    if !(ref_power > 0.0) {
        return Err(invalid("no in-band power"));
    }
    let db = bins.iter().map(|&k| 10.0 * (at(k) / ref_power).log10()).collect();
    Ok(Spectrum { bins, db })
}

/// Short-time power spectra, one row per time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub win_len: usize,
    pub hop: usize,
    /// First sample of each window.
    pub starts: Vec<usize>,
    /// Signed frequency bins, `-win_len/2 ..` upward.
    pub bins: Vec<i64>,
    /// `db[t][f]`, referenced to the overall maximum.
    pub db: Vec<Vec<f64>>,
}

impl Spectrogram {
    /// Peak frequency bin of every time slice.
    pub fn ridge(&self) -> Vec<i64> {
        self.db
            .iter()
            .map(|row| {
                let (idx, _) = row
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
                self.bins[idx]
            })
            .collect()
    }

    /// Window centre of each slice, in samples.
    pub fn centres(&self) -> Vec<f64> {
        self.starts.iter().map(|&s| s as f64 + 0.5 * (self.win_len as f64 - 1.0)).collect()
    }
}

fn hann(win_len: usize) -> Vec<f64> {
    if win_len == 1 {
        return vec![1.0];
    }
    (0..win_len)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / win_len as f64).cos())
        .collect()
}

fn stft(signal: &[Complex64], win_len: usize, hop: usize, circular: bool) -> Result<Spectrogram> {
    if win_len == 0 || hop == 0 {
        return Err(invalid("window length and hop must be positive"));
    }
    if win_len > signal.len() {
        return Err(invalid(format!(
            "window of {win_len} exceeds signal length {}",
            signal.len()
        )));
    }
    let len = signal.len();
    let last = if circular { len } else { len - win_len + 1 };
    let starts: Vec<usize> = (0..last).step_by(hop).collect();
    let window = hann(win_len);
    let half = (win_len / 2) as i64;
    let bins: Vec<i64> = (-half..win_len as i64 - half).collect();
    let mut rows = Vec::with_capacity(starts.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); win_len];
    let mut peak: f64 = 0.0;
    for &s in &starts {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = signal[(s + i) % len] * window[i];
        }
        dft_in_place(&mut buf, false);
        let row: Vec<f64> = bins
            .iter()
            .map(|&k| buf[k.rem_euclid(win_len as i64) as usize].norm_sqr())
            .collect();
        peak = row.iter().copied().fold(peak, f64::max);
        rows.push(row);
    }
    let floor = if peak > 0.0 { peak } else { 1.0 };
    let db = rows
        .into_iter()
        .map(|r| r.into_iter().map(|p| 10.0 * (p / floor).max(1e-30).log10()).collect())
        .collect();
    Ok(Spectrogram {
        win_len,
        hop,
        starts,
        bins,
        db,
    })
}

/// Hann-windowed short-time DFT over windows that fit inside the signal.
pub fn spectrogram(signal: &[Complex64], win_len: usize, hop: usize) -> Result<Spectrogram> {
    stft(signal, win_len, hop, false)
}

/// As [`spectrogram`], treating the signal as one period of a periodic
/// signal so that windows wrap and cover every start position.
pub fn spectrogram_circular(signal: &[Complex64], win_len: usize, hop: usize) -> Result<Spectrogram> {
    stft(signal, win_len, hop, true)
}

/// Peak-to-average power ratio in dB.
pub fn papr(signal: &[Complex64]) -> Result<f64> {
    if signal.is_empty() {
        return Err(invalid("empty signal"));
    }
    let (max, sum) = signal
        .iter()
        .map(|v| v.norm_sqr())
        .fold((0.0f64, 0.0), |(m, s), p| (m.max(p), s + p));
    if sum == 0.0 {
        return Err(invalid("all-zero signal"));
    }
    Ok(10.0 * (max / (sum / signal.len() as f64)).log10())
}

fn write_meta<W: Write>(w: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

impl Spectrum {
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        write_meta(&mut w, metadata)?;
        writeln!(w, "bin,psd_db")?;
        for (k, v) in self.bins.iter().zip(&self.db) {
            writeln!(w, "{k},{v:.6}")?;
        }
        Ok(())
    }
}

impl Spectrogram {
    /// Long format: one `start,bin,power_db` row per grid cell.
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        write_meta(&mut w, metadata)?;
        writeln!(w, "# win_len: {}", self.win_len)?;
        writeln!(w, "# hop: {}", self.hop)?;
        writeln!(w, "start,bin,power_db")?;
        for (s, row) in self.starts.iter().zip(&self.db) {
            for (k, v) in self.bins.iter().zip(row) {
                writeln!(w, "{s},{k},{v:.4}")?;
            }
        }
        Ok(())
    }
}
