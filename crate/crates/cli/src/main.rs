//! `cscsim`: chirp FDSS design, synthesis, diagnostics and BER sweeps.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 when a BER
//! sweep left some point under-converged.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{AnalyzeArgs, DesignArgs, Outcome, SynthArgs};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "cscsim", version, about = "Circularly-shifted chirps over DFT-s-OFDM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design an FDSS filter and write it as k,re,im CSV.
    Design {
        #[arg(long)]
        waveform: String,
        #[arg(long, default_value_t = 318.0)]
        deviation: f64,
        #[arg(long)]
        subcarriers: usize,
        #[arg(long, default_value_t = csc_core::fdss::DEFAULT_HARMONICS)]
        harmonics: usize,
        /// Triangular only: sweep up before down.
        #[arg(long)]
        up_first: bool,
        #[arg(long, default_value = "filter.csv")]
        out: PathBuf,
    },
    /// Synthesize one frame with selected active symbols; writes signal.csv and spectrogram.csv.
    Synthesize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Active symbols as idx[=re[:im]], comma separated, e.g. "0,75".
        #[arg(long)]
        symbols: String,
        #[arg(long, default_value_t = 64)]
        win_len: usize,
        #[arg(long, default_value_t = 8)]
        hop: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a Monte Carlo BER sweep.
    Ber {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PSD, PAPR or SNR_post tables for the configured link.
    Analyze {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        mode: String,
        /// Random frames to average (psd, papr).
        #[arg(long, default_value_t = 1000)]
        frames: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>) -> anyhow::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => RunConfig::parse(""),
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Design {
            waveform,
            deviation,
            subcarriers,
            harmonics,
            up_first,
            out,
        } => commands::design(&DesignArgs {
            waveform,
            deviation,
            subcarriers,
            harmonics,
            up_first,
            out,
        })?,
        Command::Synthesize {
            config,
            symbols,
            win_len,
            hop,
            out_dir,
        } => commands::synthesize(
            &load(config.as_ref())?,
            &SynthArgs {
                symbols,
                win_len,
                hop,
                out_dir,
            },
        )?,
        Command::Ber { config, out } => return commands::ber(&RunConfig::load(&config)?, &config, out.as_deref()),
        Command::Analyze {
            config,
            mode,
            frames,
            out,
        } => commands::analyze(&load(config.as_ref())?, &AnalyzeArgs { mode, frames, out })?,
    }
    Ok(Outcome::Converged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Converged) => ExitCode::SUCCESS,
        Ok(Outcome::UnderConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
