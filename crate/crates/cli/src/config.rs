//! TOML run configuration.
//!
//! Every section is optional and falls back to the reference numerology.
//! Unknown keys anywhere are rejected, all of them reported at once.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

use csc_core::channel::ChannelProfile;
use csc_core::fdss::DEFAULT_HARMONICS;
use csc_core::simulation::{ChannelModel, LinkConfig, Waveform};
use csc_core::transceiver::FrameConfig;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub frame: FrameSection,
    #[serde(default)]
    pub waveform: WaveformSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSection {
    pub subcarriers: usize,
    pub fft_size: usize,
    pub cp_len: usize,
    pub repetition: usize,
}

impl Default for FrameSection {
    fn default() -> Self {
        let f = FrameConfig::default();
        Self {
            subcarriers: f.m,
            fft_size: f.n,
            cp_len: f.cp_len,
            repetition: f.repetition,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSection {
    pub kind: String,
    pub deviation: f64,
    pub harmonics: usize,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self {
            kind: "sinusoidal".into(),
            deviation: 318.0,
            harmonics: DEFAULT_HARMONICS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub kind: String,
    pub tap_powers_db: Vec<f64>,
    pub rician_k: f64,
    pub tap_delays: Vec<usize>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let p = ChannelProfile::default();
        Self {
            kind: "awgn".into(),
            tap_powers_db: p.tap_powers_db,
            rician_k: p.rician_k,
            tap_delays: p.tap_delays,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub ebn0_db: Vec<f64>,
    pub min_bits: u64,
    pub max_frames: u64,
    pub min_errors: u64,
    pub seed: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        let l = LinkConfig::new(Waveform::Plain);
        Self {
            ebn0_db: l.ebn0_grid_db,
            min_bits: l.min_bits,
            max_frames: l.max_frames,
            min_errors: l.min_errors,
            seed: l.seed,
        }
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("frame", &["subcarriers", "fft_size", "cp_len", "repetition"]),
    ("waveform", &["kind", "deviation", "harmonics"]),
    ("channel", &["kind", "tap_powers_db", "rician_k", "tap_delays"]),
    ("sweep", &["ebn0_db", "min_bits", "max_frames", "min_errors", "seed"]),
];

/// Dotted paths of every key the schema does not know.
fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut bad = Vec::new();
    for (key, value) in table {
        if key == "output_dir" {
            continue;
        }
        match SCHEMA.iter().find(|(s, _)| s == key) {
            None => bad.push(key.clone()),
            Some((_, fields)) => {
                if let Some(inner) = value.as_table() {
                    bad.extend(inner.keys().filter(|k| !fields.contains(&k.as_str())).map(|k| format!("{key}.{k}")));
                }
            }
        }
    }
    bad
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().context("config is not valid TOML")?;
        let bad = unknown_keys(&table);
        if !bad.is_empty() {
            bail!("unknown config keys: {}", bad.join(", "));
        }
        let cfg: RunConfig = toml::from_str(text).context("config does not match the schema")?;
        cfg.link()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn frame(&self) -> Result<FrameConfig> {
        let f = &self.frame;
        Ok(FrameConfig::new(f.subcarriers, f.fft_size, f.cp_len, f.repetition)?)
    }

    pub fn waveform(&self) -> Result<Waveform> {
        Waveform::parse(&self.waveform.kind).with_context(|| {
            format!(
                "unknown waveform {:?} (expected plain, linear, sinusoidal or triangular)",
                self.waveform.kind
            )
        })
    }

    pub fn channel(&self) -> Result<ChannelModel> {
        let c = &self.channel;
        match c.kind.as_str() {
            "awgn" => Ok(ChannelModel::Awgn),
            "multipath" => Ok(ChannelModel::Multipath(ChannelProfile::new(
                c.tap_powers_db.clone(),
                c.rician_k,
                c.tap_delays.clone(),
            )?)),
            other => bail!("unknown channel kind {other:?} (expected awgn or multipath)"),
        }
    }

    pub fn link(&self) -> Result<LinkConfig> {
        let s = &self.sweep;
        let link = LinkConfig {
            frame: self.frame()?,
            waveform: self.waveform()?,
            deviation: self.waveform.deviation,
            harmonics: self.waveform.harmonics,
            channel: self.channel()?,
            ebn0_grid_db: s.ebn0_db.clone(),
            min_bits: s.min_bits,
            max_frames: s.max_frames,
            min_errors: s.min_errors,
            seed: s.seed,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        override_dir
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}
