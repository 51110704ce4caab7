use csc_core::analysis::snr_post;
use csc_core::channel::{self, ChannelRealization};
use csc_core::numerics::dft_direct;
use csc_core::simulation::{design_filter, Waveform};
use csc_core::transceiver::{DataFrame, FrameConfig, Modem};
use csc_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn modem(w: Waveform, r: usize) -> Modem {
    let cfg = FrameConfig::default().with_repetition(r).unwrap();
    Modem::new(design_filter(w, 318.0, 336, 64).unwrap(), cfg).unwrap()
}

fn single(m: usize, idx: usize) -> DataFrame {
    let mut d = vec![zero(); m];
    d[idx] = Complex64::new(1.0, 0.0);
    DataFrame::from_symbols(d)
}

#[test]
fn single_symbol_freq_symbols_follow_shift_law() {
    for w in Waveform::ALL {
        let md = modem(w, 1);
        let base = md.modulate(&single(336, 0)).unwrap();
        for m in [1usize, 75, 200, 335] {
            let tx = md.modulate(&single(336, m)).unwrap();
            for ((k, c), (y, y0)) in md.filter().iter().zip(tx.freq_symbols.iter().zip(&base.freq_symbols)) {
                let phase = Complex64::from_polar(1.0, -2.0 * PI * (k * m as i64) as f64 / 336.0);
                // direct form c_k e^{-j 2 pi k m / M}
                assert!((y - c * phase).norm() < 1e-12, "{w} m={m} k={k}");
                if c.norm() > 1e-6 {
                    assert!((y / y0 - phase).norm() < 1e-12, "{w} ratio m={m} k={k}");
                }
            }
        }
    }
}

#[test]
fn modulation_is_linear() {
    let md = modem(Waveform::Sinusoidal, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d1 = DataFrame::random(336, &mut rng);
    let d2 = DataFrame::random(336, &mut rng);
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
    let mix = DataFrame::from_symbols(d1.symbols.iter().zip(&d2.symbols).map(|(x, y)| a * x + b * y).collect());
    let (t1, t2, tm) = (md.modulate(&d1).unwrap(), md.modulate(&d2).unwrap(), md.modulate(&mix).unwrap());
    for ((x, y), z) in t1.samples.iter().zip(t2.samples.iter()).zip(tm.samples.iter()) {
        assert!((a * x + b * y - z).norm() < 1e-12);
    }
}

#[test]
fn repetition_yields_identical_spectral_copies() {
    // Oracle: M/R-point direct DFT of the data, tiled R times, times c_k.
    let md = modem(Waveform::Triangular, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data = DataFrame::random(84, &mut rng);
    let tx = md.modulate(&data).unwrap();
    let small = dft_direct(&data.symbols, false);
    for (i, ((k, c), y)) in md.filter().iter().zip(&tx.freq_symbols).enumerate() {
        let pre = y / c;
        let want = small[k.rem_euclid(84) as usize];
        assert!((pre - want).norm() < 1e-9, "bin {i}");
        if i >= 84 {
            let earlier = tx.freq_symbols[i - 84] / md.filter().coeffs()[i - 84];
            assert!((pre - earlier).norm() < 1e-9);
        }
    }
}

#[test]
fn transmit_power_is_unity_for_every_filter() {
    for w in Waveform::ALL {
        for r in [1usize, 4] {
            let md = modem(w, r);
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            let frames = 200;
            let mut acc = 0.0;
            for _ in 0..frames {
                let tx = md.modulate(&DataFrame::random(336 / r, &mut rng)).unwrap();
                acc += tx.samples.mean_power();
            }
            let p = acc / frames as f64;
            assert!((p - 1.0).abs() < 0.02, "{w} R={r}: {p}");
        }
    }
}

#[test]
fn cyclic_prefix_holds_for_every_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for w in Waveform::ALL {
        let tx = modem(w, 1).modulate(&DataFrame::random(336, &mut rng)).unwrap();
        assert_eq!(&tx.samples[..96], &tx.samples[512..]);
    }
}

/// `(bias, SINR)` of estimates against the sent symbols.
fn measured_sinr(est: &[Complex64], sent: &[Complex64]) -> (f64, f64) {
    let n = sent.len() as f64;
    let bias = est.iter().zip(sent).map(|(e, s)| (e * s.conj()).re).sum::<f64>() / n;
    let err = est.iter().zip(sent).map(|(e, s)| (e - s * bias).norm_sqr()).sum::<f64>() / n;
    (bias, bias * bias / err)
}

fn empirical_sinr(w: Waveform, r: usize, rho: f64, symbols: usize) -> f64 {
    let md = modem(w, r);
    let cfg = *md.config();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut est, mut sent) = (Vec::new(), Vec::new());
    while sent.len() < symbols {
        let data = DataFrame::random(cfg.symbols_per_frame(), &mut rng);
        let tx = md.modulate(&data).unwrap();
        let rx = channel::apply(&tx.samples, &ChannelRealization::identity(), cfg.sample_noise_variance(1.0 / rho), &mut rng).unwrap();
        est.extend(md.demodulate(&rx, None, 1.0 / rho).unwrap().symbols);
        sent.extend(data.symbols);
    }
    measured_sinr(&est, &sent).1
}

#[test]
fn plain_filter_post_snr_equals_subcarrier_snr() {
    let rho = 10f64.powf(0.5);
    let sinr = empirical_sinr(Waveform::Plain, 1, rho, 100_000);
    let err_db = 10.0 * (sinr / rho).log10();
    assert!(err_db.abs() < 0.1, "{err_db} dB");
}

#[test]
fn sinusoidal_post_sinr_matches_closed_form() {
    let rho = 10.0;
    for r in [1usize, 4] {
        let sinr = empirical_sinr(Waveform::Sinusoidal, r, rho, 100_000);
        let md = modem(Waveform::Sinusoidal, r);
        let theory = snr_post(md.filter(), rho, r).unwrap().snr_post;
        let err_db = 10.0 * (sinr / theory).log10();
        assert!(err_db.abs() < 0.2, "R={r}: measured {sinr}, closed form {theory}");
    }
}

#[test]
fn frequency_selective_channel_is_equalized() {
    // Noise-free multipath with a CP: MMSE with tiny noise variance inverts it.
    let md = modem(Waveform::Linear, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let profile = csc_core::channel::ChannelProfile::default();
    for _ in 0..5 {
        let data = DataFrame::random(336, &mut rng);
        let tx = md.modulate(&data).unwrap();
        let ch = channel::draw(&profile, &mut rng);
        let rx = channel::apply(&tx.samples, &ch, 0.0, &mut rng).unwrap();
        let h = channel::freq_response(&ch, 512);
        let out = md.demodulate(&rx, Some(&h), 1e-12).unwrap();
        let rms = (out.symbols.iter().zip(&data.symbols).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 336.0).sqrt();
        assert!(rms < 1e-6, "{rms}");
    }
}
