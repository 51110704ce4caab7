//! Monte Carlo BER sweeps of the uncoded QPSK link.
//!
//! Frames are processed in fixed-size batches; every frame draws from its
//! own ChaCha stream keyed by `(seed, grid point, frame index)`, and the
//! stopping rule is only checked between batches. Results are therefore
//! identical regardless of thread count or scheduling.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::io::Write;

use crate::analysis::{snr_post, snr_post_from_gains, theoretical_ber_qpsk};
use crate::channel::{self, ChannelProfile, ChannelRealization};
use crate::error::{invalid, Result};
use crate::fdss::{design_linear, design_plain, design_sinusoidal, design_triangular, FdssFilter, DEFAULT_HARMONICS};
use crate::transceiver::{DataFrame, FrameConfig, Modem};

/// Frames simulated between two checks of the stopping rule.
pub const BATCH_FRAMES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Waveform {
    Plain,
    Linear,
    Sinusoidal,
    Triangular,
}

impl Waveform {
    pub const ALL: [Waveform; 4] = [Waveform::Plain, Waveform::Linear, Waveform::Sinusoidal, Waveform::Triangular];

    pub fn as_str(self) -> &'static str {
        match self {
            Waveform::Plain => "plain",
            Waveform::Linear => "linear",
            Waveform::Sinusoidal => "sinusoidal",
            Waveform::Triangular => "triangular",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.as_str() == s)
    }
}

impl fmt::Display for Waveform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unit-average-power filter for a named waveform. `deviation` is ignored
/// for the plain filter; `harmonics` only affects the triangular one.
pub fn design_filter(waveform: Waveform, deviation: f64, m: usize, harmonics: usize) -> Result<FdssFilter> {
    match waveform {
        Waveform::Plain => design_plain(m),
        Waveform::Linear => design_linear(deviation, m),
        Waveform::Sinusoidal => design_sinusoidal(deviation, m),
        Waveform::Triangular => design_triangular(deviation, m, harmonics, true),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    Awgn,
    Multipath(ChannelProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub frame: FrameConfig,
    pub waveform: Waveform,
    pub deviation: f64,
    pub harmonics: usize,
    pub channel: ChannelModel,
    pub ebn0_grid_db: Vec<f64>,
    pub min_bits: u64,
    pub max_frames: u64,
    pub min_errors: u64,
    pub seed: u64,
}

impl LinkConfig {
    /// AWGN link with the default numerology and a 0..=10 dB grid.
    pub fn new(waveform: Waveform) -> Self {
        Self {
            frame: FrameConfig::default(),
            waveform,
            deviation: 318.0,
            harmonics: DEFAULT_HARMONICS,
            channel: ChannelModel::Awgn,
            ebn0_grid_db: (0..=10).map(f64::from).collect(),
            min_bits: 100_000,
            max_frames: 100_000,
            min_errors: 100,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        if self.ebn0_grid_db.is_empty() || self.ebn0_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(invalid("Eb/N0 grid must be nonempty and finite"));
        }
        if self.min_bits < 10_000 {
            return Err(invalid(format!("min_bits must be at least 10000, got {}", self.min_bits)));
        }
        if self.max_frames == 0 {
            return Err(invalid("max_frames must be positive"));
        }
        if let ChannelModel::Multipath(p) = &self.channel {
            p.validate()?;
            p.check_cp(self.frame.cp_len)?;
        }
        Ok(())
    }

    pub fn filter(&self) -> Result<FdssFilter> {
        design_filter(self.waveform, self.deviation, self.frame.m, self.harmonics)
    }
}

/// Per-subcarrier SNR `rho = (2 / R) Eb/N0` for QPSK.
pub fn ebn0_to_subcarrier_snr(ebn0_db: f64, cfg: &FrameConfig) -> f64 {
    let bits = cfg.constellation.bits_per_symbol() as f64;
    bits / cfg.repetition as f64 * 10f64.powf(ebn0_db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    /// Per-subcarrier SNR in dB.
    pub snr_db: f64,
    pub sim_ber: f64,
    /// Closed-form BER; for fading, averaged over the simulated channels.
    pub theory_ber: f64,
    pub bits: u64,
    pub errors: u64,
    pub frames: u64,
    /// False when `max_frames` stopped the point before `min_errors`.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
    pub metadata: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Simulated,
    Theory,
}

impl BerCurve {
    pub fn under_converged(&self) -> bool {
        self.points.iter().any(|p| !p.converged)
    }

    /// Eb/N0 where the curve crosses `target`, by linear interpolation of
    /// `log10(BER)` between the first bracketing pair of points.
    pub fn crossing(&self, target: f64, series: Series) -> Option<f64> {
        let value = |p: &BerPoint| match series {
            Series::Simulated => p.sim_ber,
            Series::Theory => p.theory_ber,
        };
        self.points.windows(2).find_map(|w| {
            let (a, b) = (value(&w[0]), value(&w[1]));
            if a >= target && b <= target && a > 0.0 && b > 0.0 && a != b {
                let t = (a.log10() - target.log10()) / (a.log10() - b.log10());
                Some(w[0].ebn0_db + t * (w[1].ebn0_db - w[0].ebn0_db))
            } else if a == target {
                Some(w[0].ebn0_db)
            } else {
                None
            }
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "ebn0_db,snr_db,sim_ber,theory_ber,bits,frames,errors,converged")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{:.6},{:.6e},{:.6e},{},{},{},{}",
                p.ebn0_db, p.snr_db, p.sim_ber, p.theory_ber, p.bits, p.frames, p.errors, p.converged
            )?;
        }
        Ok(())
    }
}

/// Random source for one frame; independent of scheduling.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    key[24..].copy_from_slice(b"cscframe");
    ChaCha8Rng::from_seed(key)
}

struct FrameOutcome {
    errors: u64,
    theory: f64,
}

fn run_frame(
    modem: &Modem,
    cfg: &LinkConfig,
    rho: f64,
    awgn_theory: f64,
    point: u64,
    frame: u64,
) -> Result<FrameOutcome> {
    let fc = modem.config();
    let mut rng = frame_rng(cfg.seed, point, frame);
    let data = DataFrame::random(fc.symbols_per_frame(), &mut rng);
    let tx = modem.modulate(&data)?;
    let (ch, h) = match &cfg.channel {
        ChannelModel::Awgn => (ChannelRealization::identity(), None),
        ChannelModel::Multipath(profile) => {
            let ch = channel::draw(profile, &mut rng);
            let h = channel::freq_response(&ch, fc.n);
            (ch, Some(h))
        }
    };
    let noise_var = 1.0 / rho;
    let rx = channel::apply(&tx.samples, &ch, fc.sample_noise_variance(noise_var), &mut rng)?;
    let out = modem.demodulate(&rx, h.as_deref(), noise_var)?;
    let sent = data.bits.as_deref().unwrap_or_default();
    let errors = out.hard_bits().iter().zip(sent).filter(|(a, b)| a != b).count() as u64;
    let theory = match &h {
        None => awgn_theory,
        Some(h) => {
            let gains = effective_gains(modem.filter(), h, fc.n);
            theoretical_ber_qpsk(snr_post_from_gains(&gains, rho, fc.repetition)?.snr_post)
        }
    };
    Ok(FrameOutcome { errors, theory })
}

/// AWGN Eb/N0 (dB) at which the closed-form BER equals `target`, by bisection
/// over [-20, 60] dB.
pub fn theory_ebn0_at_ber(filter: &FdssFilter, frame: &FrameConfig, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(invalid(format!("target BER must lie in (0, 0.5), got {target}")));
    }
    let ber = |e: f64| -> Result<f64> {
        let rho = ebn0_to_subcarrier_snr(e, frame);
        Ok(theoretical_ber_qpsk(snr_post(filter, rho, frame.repetition)?.snr_post))
    };
    let (mut lo, mut hi) = (-20.0, 60.0);
    if ber(lo)? < target || ber(hi)? > target {
        return Err(invalid(format!("target BER {target} not reached in [-20, 60] dB")));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if ber(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `|H_k c_k|^2` over the occupied band, from an N-point response.
pub fn effective_gains(filter: &FdssFilter, h: &[Complex64], n: usize) -> Vec<f64> {
    filter
        .iter()
        .map(|(k, c)| (h[k.rem_euclid(n as i64) as usize] * c).norm_sqr())
        .collect()
}

fn run_point(modem: &Modem, cfg: &LinkConfig, point: u64, ebn0_db: f64) -> Result<BerPoint> {
    let rho = ebn0_to_subcarrier_snr(ebn0_db, &cfg.frame);
    let awgn_theory = theoretical_ber_qpsk(snr_post(modem.filter(), rho, cfg.frame.repetition)?.snr_post);
    let bits_per_frame = cfg.frame.bits_per_frame() as u64;
    let (mut frames, mut errors, mut theory_sum) = (0u64, 0u64, 0.0f64);
    let done = |frames: u64, errors: u64| {
        frames >= cfg.max_frames || (frames * bits_per_frame >= cfg.min_bits && errors >= cfg.min_errors)
    };
    while !done(frames, errors) {
        let end = (frames + BATCH_FRAMES).min(cfg.max_frames);
        let outcomes = (frames..end)
            .into_par_iter()
            .map(|f| run_frame(modem, cfg, rho, awgn_theory, point, f))
            .collect::<Result<Vec<_>>>()?;
        for o in outcomes {
            errors += o.errors;
            theory_sum += o.theory;
        }
        frames = end;
    }
    let bits = frames * bits_per_frame;
    Ok(BerPoint {
        ebn0_db,
        snr_db: 10.0 * rho.log10(),
        sim_ber: errors as f64 / bits as f64,
        theory_ber: theory_sum / frames as f64,
        bits,
        errors,
        frames,
        converged: errors >= cfg.min_errors && bits >= cfg.min_bits,
    })
}

/// Runs the sweep over `cfg.ebn0_grid_db`.
pub fn run_ber_sweep(cfg: &LinkConfig) -> Result<BerCurve> {
    cfg.validate()?;
    let filter = cfg.filter()?;
    let modem = Modem::new(filter, cfg.frame)?;
    let points = cfg
        .ebn0_grid_db
        .iter()
        .enumerate()
        .map(|(i, &e)| run_point(&modem, cfg, i as u64, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(BerCurve {
        points,
        metadata: metadata(cfg),
    })
}

fn metadata(cfg: &LinkConfig) -> Vec<(String, String)> {
    let channel = match &cfg.channel {
        ChannelModel::Awgn => "awgn".to_string(),
        ChannelModel::Multipath(p) => format!(
            "multipath powers_db={:?} rician_k={} delays={:?}",
            p.tap_powers_db, p.rician_k, p.tap_delays
        ),
    };
    [
        ("generator", format!("cscsim {}", env!("CARGO_PKG_VERSION"))),
        ("waveform", cfg.waveform.to_string()),
        ("deviation", cfg.deviation.to_string()),
        ("harmonics", cfg.harmonics.to_string()),
        ("subcarriers", cfg.frame.m.to_string()),
        ("fft_size", cfg.frame.n.to_string()),
        ("cp_len", cfg.frame.cp_len.to_string()),
        ("repetition", cfg.frame.repetition.to_string()),
        ("channel", channel),
        ("min_bits", cfg.min_bits.to_string()),
        ("min_errors", cfg.min_errors.to_string()),
        ("max_frames", cfg.max_frames.to_string()),
        ("seed", cfg.seed.to_string()),
        ("snr_convention", "rho = 2 Eb/N0 / R per subcarrier".to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ebn0_conversion() {
        let cfg = FrameConfig::default();
        assert!((10.0 * ebn0_to_subcarrier_snr(0.0, &cfg).log10() - 3.0103).abs() < 1e-4);
        let r4 = cfg.with_repetition(4).unwrap();
        assert!((10.0 * ebn0_to_subcarrier_snr(0.0, &r4).log10() + 3.0103).abs() < 1e-4);
    }

    #[test]
    fn waveform_names_round_trip() {
        for w in Waveform::ALL {
            assert_eq!(Waveform::parse(w.as_str()), Some(w));
        }
        assert_eq!(Waveform::parse("square"), None);
    }

    #[test]
    fn config_validation() {
        let mut cfg = LinkConfig::new(Waveform::Plain);
        assert!(cfg.validate().is_ok());
        cfg.min_bits = 10;
        assert!(cfg.validate().is_err());
        let mut cfg = LinkConfig::new(Waveform::Plain);
        cfg.ebn0_grid_db.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = LinkConfig::new(Waveform::Plain);
        cfg.channel = ChannelModel::Multipath(ChannelProfile::new(vec![0.0, -3.0], 1.0, vec![0, 200]).unwrap());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn crossing_interpolates_in_log_domain() {
        let p = |e: f64, b: f64| BerPoint {
            ebn0_db: e,
            snr_db: 0.0,
            sim_ber: b,
            theory_ber: b,
            bits: 0,
            errors: 0,
            frames: 0,
            converged: true,
        };
        let curve = BerCurve {
            points: vec![p(0.0, 1e-1), p(1.0, 1e-2), p(2.0, 1e-4)],
            metadata: vec![],
        };
        assert!((curve.crossing(1e-3, Series::Simulated).unwrap() - 1.5).abs() < 1e-12);
        assert!((curve.crossing(1e-2, Series::Theory).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(curve.crossing(1e-6, Series::Simulated), None);
    }

    #[test]
    fn frame_streams_differ() {
        use rand::Rng;
        let a: u64 = frame_rng(1, 0, 0).random();
        let b: u64 = frame_rng(1, 0, 1).random();
        let c: u64 = frame_rng(1, 1, 0).random();
        assert!(a != b && a != c && b != c);
        let a2: u64 = frame_rng(1, 0, 0).random();
        assert_eq!(a, a2);
    }
}
