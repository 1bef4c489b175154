use std::path::PathBuf;

use clap::Subcommand;

use photon_stats::io::write_spectrum_csv;
use photon_stats::spectrum::{synthesize_spectrum, with_shot_noise};

use super::fit::spectrum_report;
use super::Context;
use crate::error::Result;
use crate::files::{write_file, write_text};

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Writes the configured synthetic spectrum as `wavelength_nm,intensity`.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Fits the ZPL and integrates the ZPL fraction of a spectrum CSV.
    Analyze {
        input: PathBuf,
        /// Report file; printed only when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(ctx: &Context, cmd: &SpectrumCommand) -> Result<()> {
    let cfg = &ctx.config;
    match cmd {
        SpectrumCommand::Synth { out } => {
            let (zpl, sideband) = cfg.spectrum_lines();
            let mut s =
                synthesize_spectrum(zpl, sideband, cfg.spectrum.baseline, &cfg.spectrum_grid())?;
            if let Some(n) = cfg.spectrum.peak_counts {
                s = with_shot_noise(&s, n, cfg.seed(ctx.seed))?;
            }
            write_file(out, |w| write_spectrum_csv(w, &s))?;
            println!("points = {}", s.len());
        }
        SpectrumCommand::Analyze { input, out } => {
            let (report, _) = spectrum_report(input, cfg.spectrum.analysis_baseline)?;
            print!("{report}");
            if let Some(path) = out {
                write_text(path, &report)?;
            }
        }
    }
    Ok(())
}
