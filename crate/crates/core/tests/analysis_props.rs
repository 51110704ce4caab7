mod common;

use common::q_quad;
use csc_core::analysis::{papr, psd, snr_post, spectrogram_circular, theoretical_ber_qpsk};
use csc_core::channel::complex_gaussian;
use csc_core::simulation::{design_filter, Waveform};
use csc_core::transceiver::{qpsk_demap, DataFrame, FrameConfig, Modem};
use csc_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn filter(w: Waveform) -> csc_core::fdss::FdssFilter {
    design_filter(w, 318.0, 336, 64).unwrap()
}

fn snr_grid() -> impl Iterator<Item = f64> {
    (-40..=60).map(|i| 10f64.powf(i as f64 / 20.0))
}

#[test]
fn post_snr_is_monotone_and_bounded() {
    for w in Waveform::ALL {
        let f = filter(w);
        for r in [1usize, 2, 4] {
            let mut prev = 0.0;
            for snr in snr_grid() {
                let rep = snr_post(&f, snr, r).unwrap();
                assert!(rep.snr_post >= prev, "{w} R={r} not monotone at {snr}");
                assert!(rep.snr_post <= rep.snr_in + 1e-9 * rep.snr_in.max(1.0), "{w} R={r} exceeds input at {snr}");
                assert!(rep.alpha_mmse > 0.0 && rep.alpha_mmse <= 1.0);
                prev = rep.snr_post;
            }
        }
    }
}

#[test]
fn post_snr_matches_literal_alpha_formula() {
    // alpha = ((R/M) sum c'/(c' + 1/snr))^2, SNR_post = 1/(sqrt(1/alpha) - 1)
    let f = filter(Waveform::Sinusoidal);
    for r in [1usize, 4] {
        for snr in [0.1, 1.0, 10.0, 100.0] {
            let per = 336 / r;
            let s: f64 = (0..per)
                .map(|i| {
                    let c: f64 = (0..r).map(|u| f.coeffs()[i + u * per].norm_sqr()).sum();
                    c / (c + 1.0 / snr)
                })
                .sum();
            let alpha = (s * r as f64 / 336.0).powi(2);
            let want = 1.0 / ((1.0 / alpha).sqrt() - 1.0);
            let got = snr_post(&f, snr, r).unwrap();
            assert!((got.alpha_mmse / alpha - 1.0).abs() < 1e-12);
            assert!((got.snr_post / want - 1.0).abs() < 1e-9, "R={r} snr={snr}");
        }
    }
}

#[test]
fn repetition_raises_post_snr_for_chirps() {
    for w in [Waveform::Sinusoidal, Waveform::Triangular] {
        let f = filter(w);
        assert!(snr_post(&f, 10.0, 4).unwrap().snr_post > snr_post(&f, 10.0, 1).unwrap().snr_post);
    }
}

#[test]
fn repetition_flattens_combined_gain() {
    for w in [Waveform::Sinusoidal, Waveform::Triangular] {
        let f = filter(w);
        let p: Vec<f64> = f.coeffs().iter().map(|c| c.norm_sqr()).collect();
        let spread = |v: &[f64]| v.iter().copied().fold(0.0, f64::max) / v.iter().copied().fold(f64::INFINITY, f64::min);
        let combined: Vec<f64> = (0..84).map(|i| (0..4).map(|u| p[i + 84 * u]).sum()).collect();
        assert!(spread(&combined) < spread(&p), "{w}: {} vs {}", spread(&combined), spread(&p));
    }
}

#[test]
fn ber_formula_agrees_with_quadrature_and_decreases() {
    let mut prev = 0.5 + 1e-12;
    for i in 0..200 {
        let snr = i as f64 * 0.1;
        let b = theoretical_ber_qpsk(snr);
        assert!(b < prev);
        assert!((b - q_quad(snr.sqrt())).abs() < 1e-12, "snr={snr}");
        prev = b;
    }
}

#[test]
fn qpsk_monte_carlo_matches_formula_at_9_5_db() {
    let snr = 10f64.powf(0.95);
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let symbols = 5_000_000usize;
    let data = DataFrame::random(symbols, &mut rng);
    let noisy: Vec<Complex64> = data.symbols.iter().map(|s| s + complex_gaussian(&mut rng, 1.0 / snr)).collect();
    let sent = data.bits.unwrap();
    let errors = qpsk_demap(&noisy).iter().zip(&sent).filter(|(a, b)| a != b).count();
    let ber = errors as f64 / sent.len() as f64;
    let theory = theoretical_ber_qpsk(snr);
    assert!((theory - 1.4e-3).abs() < 0.1e-3, "{theory}");
    assert!((ber / theory - 1.0).abs() < 0.1, "MC {ber} vs {theory}");
}

fn random_bodies(w: Waveform, frames: usize) -> Vec<Complex64> {
    let md = Modem::new(filter(w), FrameConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::with_capacity(frames * 512);
    for _ in 0..frames {
        out.extend_from_slice(md.modulate(&DataFrame::random(336, &mut rng)).unwrap().body());
    }
    out
}

#[test]
fn plain_psd_is_flat_in_band_with_empty_guard() {
    let s = psd(&random_bodies(Waveform::Plain, 1000), 512, 1000, (-167, 168)).unwrap();
    for (k, v) in s.bins.iter().zip(&s.db) {
        if (-167..=168).contains(k) {
            assert!(v.abs() < 1.0, "bin {k}: {v}");
        } else {
            assert!(*v < -200.0, "guard bin {k}: {v}");
        }
    }
}

#[test]
fn sinusoidal_psd_emphasizes_band_edges() {
    let s = psd(&random_bodies(Waveform::Sinusoidal, 1000), 512, 1000, (-167, 168)).unwrap();
    let mean = |lo: i64, hi: i64| {
        let v: Vec<f64> = s.bins.iter().zip(&s.db).filter(|(k, _)| (lo..=hi).contains(*k)).map(|(_, v)| *v).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let edges = 0.5 * (mean(-159, -140) + mean(140, 159));
    let centre = mean(-20, 20);
    assert!(edges > centre + 3.0, "edges {edges} dB, centre {centre} dB");
}

/// Fraction of slices whose ridge lies within one bin of `expected`.
fn ridge_hit_rate(w: Waveform, expected: impl Fn(f64) -> f64) -> f64 {
    let md = Modem::new(filter(w), FrameConfig::default()).unwrap();
    let mut d = vec![Complex64::new(0.0, 0.0); 336];
    d[0] = Complex64::new(1.0, 0.0);
    let tx = md.modulate(&DataFrame::from_symbols(d)).unwrap();
    let sg = spectrogram_circular(tx.body(), 64, 8).unwrap();
    let bin_width = 512.0 / 64.0;
    let hits = sg
        .ridge()
        .iter()
        .zip(sg.centres())
        .filter(|(&r, c)| (r as f64 - expected(c / 512.0) / bin_width).abs() <= 1.0)
        .count();
    hits as f64 / sg.ridge().len() as f64
}

#[test]
fn sinusoidal_ridge_tracks_cosine_trajectory() {
    let rate = ridge_hit_rate(Waveform::Sinusoidal, |tau| 159.0 * (2.0 * PI * tau).cos());
    assert!(rate >= 0.9, "{rate}");
}

#[test]
fn triangular_ridge_tracks_down_then_up() {
    let rate = ridge_hit_rate(Waveform::Triangular, |tau| {
        let x = (2.0 * PI * tau).rem_euclid(2.0 * PI);
        let slope = if x < PI { 1.0 - 2.0 * x / PI } else { -3.0 + 2.0 * x / PI };
        159.0 * slope
    });
    assert!(rate >= 0.9, "{rate}");
}

fn single_chirp_papr(w: Waveform) -> f64 {
    let md = Modem::new(filter(w), FrameConfig::default()).unwrap();
    let mut d = vec![Complex64::new(0.0, 0.0); 336];
    d[0] = Complex64::new(1.0, 0.0);
    papr(md.modulate(&DataFrame::from_symbols(d)).unwrap().body()).unwrap()
}

#[test]
fn chirp_papr_ordering() {
    let sin = single_chirp_papr(Waveform::Sinusoidal);
    let lin = single_chirp_papr(Waveform::Linear);
    assert!(sin <= 1.0, "sinusoidal {sin} dB");
    assert!(lin > sin, "linear {lin} dB vs sinusoidal {sin} dB");
}
