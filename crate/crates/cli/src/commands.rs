use anyhow::{bail, Context, Result};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use csc_core::analysis::{papr, psd, snr_post, spectrogram, theoretical_ber_qpsk};
use csc_core::fdss::{design_triangular, FdssFilter};
use csc_core::simulation::{design_filter, run_ber_sweep, Waveform};
use csc_core::transceiver::{DataFrame, Modem};
use csc_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn version() -> String {
    format!("cscsim {}", env!("CARGO_PKG_VERSION"))
}

pub struct DesignArgs {
    pub waveform: String,
    pub deviation: f64,
    pub subcarriers: usize,
    pub harmonics: usize,
    pub up_first: bool,
    pub out: PathBuf,
}

pub fn design(a: &DesignArgs) -> Result<()> {
    let waveform = Waveform::parse(&a.waveform).with_context(|| format!("unknown waveform {:?}", a.waveform))?;
    let filter = if waveform == Waveform::Triangular && a.up_first {
        design_triangular(a.deviation, a.subcarriers, a.harmonics, false)?
    } else {
        design_filter(waveform, a.deviation, a.subcarriers, a.harmonics)?
    };
    let mut w = create(&a.out)?;
    filter.write_csv(
        &mut w,
        &meta(&[
            ("generator", version()),
            ("waveform", waveform.to_string()),
            ("deviation", a.deviation.to_string()),
            ("harmonics", a.harmonics.to_string()),
        ]),
    )?;
    w.flush()?;
    println!("wrote {} coefficients to {}", filter.m(), a.out.display());
    if let Some(loss) = filter.truncation_loss() {
        println!("truncation loss: {loss:.6e}");
    }
    println!("max/min |c_k|: {:.6e}", filter.magnitude_ratio());
    Ok(())
}

/// Parses `idx[=re[:im]]` items separated by commas, e.g. `0,75=1:-1`.
pub fn parse_symbols(spec: &str, count: usize) -> Result<Vec<Complex64>> {
    let mut d = vec![Complex64::new(0.0, 0.0); count];
    let mut any = false;
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (idx, val) = item.split_once('=').unwrap_or((item, "1"));
        let idx: usize = idx.trim().parse().with_context(|| format!("bad symbol index {idx:?}"))?;
        if idx >= count {
            bail!("symbol index {idx} out of range (frame has {count} symbols)");
        }
        let (re, im) = val.split_once(':').unwrap_or((val, "0"));
        let re: f64 = re.trim().parse().with_context(|| format!("bad value {val:?}"))?;
        let im: f64 = im.trim().parse().with_context(|| format!("bad value {val:?}"))?;
        d[idx] = Complex64::new(re, im);
        any = true;
    }
    if !any {
        bail!("no active symbols given");
    }
    Ok(d)
}

pub struct SynthArgs {
    pub symbols: String,
    pub win_len: usize,
    pub hop: usize,
    pub out_dir: Option<PathBuf>,
}

pub fn synthesize(cfg: &RunConfig, a: &SynthArgs) -> Result<()> {
    let link = cfg.link()?;
    let filter = link.filter()?;
    let modem = Modem::new(filter, link.frame)?;
    let d = parse_symbols(&a.symbols, link.frame.symbols_per_frame())?;
    let tx = modem.modulate(&DataFrame::from_symbols(d))?;
    let dir = cfg.output_dir(a.out_dir.as_deref());
    let common = meta(&[
        ("generator", version()),
        ("waveform", link.waveform.to_string()),
        ("deviation", link.deviation.to_string()),
        ("subcarriers", link.frame.m.to_string()),
        ("fft_size", link.frame.n.to_string()),
        ("cp_len", link.frame.cp_len.to_string()),
        ("repetition", link.frame.repetition.to_string()),
        ("symbols", a.symbols.clone()),
    ]);

    let sig_path = dir.join("signal.csv");
    let mut w = create(&sig_path)?;
    for (k, v) in &common {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "n,re,im")?;
    // sample index relative to the end of the CP
    let cp = link.frame.cp_len as i64;
    for (i, s) in tx.samples.iter().enumerate() {
        writeln!(w, "{},{:.16e},{:.16e}", i as i64 - cp, s.re, s.im)?;
    }
    w.flush()?;

    let sg = spectrogram(tx.body(), a.win_len, a.hop)?;
    let sg_path = dir.join("spectrogram.csv");
    let mut w = create(&sg_path)?;
    sg.write_csv(&mut w, &common)?;
    w.flush()?;
    println!("wrote {} and {}", sig_path.display(), sg_path.display());
    println!("PAPR (body): {:.3} dB", papr(tx.body())?);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    UnderConverged,
}

pub fn ber(cfg: &RunConfig, config_path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let link = cfg.link()?;
    let mut curve = run_ber_sweep(&link)?;
    curve
        .metadata
        .insert(0, ("config".to_string(), config_path.display().to_string()));
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir(None).join("ber.csv"));
    let mut w = create(&path)?;
    curve.write_csv(&mut w)?;
    w.flush()?;
    for p in &curve.points {
        println!(
            "Eb/N0 {:>6.2} dB  sim {:.3e}  theory {:.3e}  errors {:>7}  bits {:>10}{}",
            p.ebn0_db,
            p.sim_ber,
            p.theory_ber,
            p.errors,
            p.bits,
            if p.converged { "" } else { "  UNDER-CONVERGED" }
        );
    }
    println!("wrote {}", path.display());
    Ok(if curve.under_converged() {
        eprintln!("warning: some points stopped at max_frames before reaching min_errors / min_bits");
        Outcome::UnderConverged
    } else {
        Outcome::Converged
    })
}

pub struct AnalyzeArgs {
    pub mode: String,
    pub frames: usize,
    pub out: Option<PathBuf>,
}

pub fn analyze(cfg: &RunConfig, a: &AnalyzeArgs) -> Result<()> {
    if !["psd", "snrpost", "papr"].contains(&a.mode.as_str()) {
        bail!("unknown analysis mode {:?} (expected psd, papr or snrpost)", a.mode);
    }
    let link = cfg.link()?;
    let frame = link.frame;
    let filter = link.filter()?;
    let header = meta(&[
        ("generator", version()),
        ("mode", a.mode.clone()),
        ("waveform", link.waveform.to_string()),
        ("deviation", link.deviation.to_string()),
        ("subcarriers", frame.m.to_string()),
        ("fft_size", frame.n.to_string()),
        ("repetition", frame.repetition.to_string()),
        ("seed", link.seed.to_string()),
    ]);
    let path = a
        .out
        .clone()
        .unwrap_or_else(|| cfg.output_dir(None).join(format!("{}.csv", a.mode)));
    let mut w = create(&path)?;
    match a.mode.as_str() {
        "psd" => {
            if a.frames == 0 {
                bail!("--frames must be positive");
            }
            let modem = Modem::new(filter, frame)?;
            let mut rng = ChaCha8Rng::seed_from_u64(link.seed);
            let mut bodies = Vec::with_capacity(a.frames * frame.n);
            for _ in 0..a.frames {
                let tx = modem.modulate(&DataFrame::random(frame.symbols_per_frame(), &mut rng))?;
                bodies.extend_from_slice(tx.body());
            }
            let f = modem.filter();
            let mut h = header.clone();
            h.push(("frames".into(), a.frames.to_string()));
            psd(&bodies, frame.n, a.frames, (f.l_d(), f.l_u()))?.write_csv(&mut w, &h)?;
        }
        "snrpost" => {
            for (k, v) in &header {
                writeln!(w, "# {k}: {v}")?;
            }
            writeln!(w, "snr_db,snr_in_db,snr_post_db,alpha_mmse,theory_ber")?;
            for i in -10..=30 {
                let snr_db = i as f64;
                let r = snr_post(&filter, 10f64.powf(snr_db / 10.0), frame.repetition)?;
                writeln!(
                    w,
                    "{snr_db},{:.9},{:.9},{:.12e},{:.6e}",
                    10.0 * r.snr_in.log10(),
                    10.0 * r.snr_post.log10(),
                    r.alpha_mmse,
                    theoretical_ber_qpsk(r.snr_post)
                )?;
            }
        }
        "papr" => {
            for (k, v) in &header {
                writeln!(w, "# {k}: {v}")?;
            }
            writeln!(w, "waveform,single_chirp_papr_db,mean_frame_papr_db,max_frame_papr_db")?;
            for wf in Waveform::ALL {
                let f = design_filter(wf, link.deviation, frame.m, link.harmonics)?;
                let (single, mean, max) = papr_stats(&f, frame, a.frames.max(1), link.seed)?;
                println!("{wf:>10}: single chirp {single:.3} dB, random frames mean {mean:.3} dB, max {max:.3} dB");
                writeln!(w, "{wf},{single:.6},{mean:.6},{max:.6}")?;
            }
        }
        _ => unreachable!(),
    }
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn papr_stats(
    filter: &FdssFilter,
    frame: csc_core::transceiver::FrameConfig,
    frames: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let modem = Modem::new(filter.clone(), frame)?;
    let mut d = vec![Complex64::new(0.0, 0.0); frame.symbols_per_frame()];
    d[0] = Complex64::new(1.0, 0.0);
    let single = papr(modem.modulate(&DataFrame::from_symbols(d))?.body())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut max) = (0.0, f64::NEG_INFINITY);
    for _ in 0..frames {
        let p = papr(modem.modulate(&DataFrame::random(frame.symbols_per_frame(), &mut rng))?.body())?;
        sum += p;
        max = max.max(p);
    }
    Ok((single, sum / frames as f64, max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_spec_parsing() {
        let d = parse_symbols("0, 75=0.5:-1", 336).unwrap();
        assert_eq!(d[0], Complex64::new(1.0, 0.0));
        assert_eq!(d[75], Complex64::new(0.5, -1.0));
        assert_eq!(d.iter().filter(|v| v.norm() > 0.0).count(), 2);
        assert!(parse_symbols("", 10).is_err());
        assert!(parse_symbols("10", 10).is_err());
        assert!(parse_symbols("a", 10).is_err());
        assert!(parse_symbols("1=x", 10).is_err());
    }
}
