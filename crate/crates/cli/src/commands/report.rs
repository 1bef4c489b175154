use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use photon_stats::estimators::EmitterEstimate;

use super::Context;
use crate::error::{in_file, Result};
use crate::files::{read_text, write_text};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Key-value reports from `fit`; earlier files win on conflicts.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Keys owned by the merged estimate; everything else is passed through.
const ESTIMATE_KEYS: &[&str] = &[
    "lifetime_s",
    "k21_per_s",
    "kappa_per_s_per_uW",
    "i_sat_cps",
    "p_sat_uW",
    "g2_0",
    "peak_rate_cps",
    "eta_detected",
    "eta_saturated",
    "classification",
];

/// Merges reports into one estimate, derives the collection efficiencies and
/// keeps the first occurrence of every other key.
pub fn merge_reports(texts: &[String]) -> photon_stats::Result<String> {
    let mut estimate = EmitterEstimate::default();
    let mut extra: Vec<(String, String)> = Vec::new();
    for text in texts {
        estimate.merge(&EmitterEstimate::from_report(text)?);
        for line in text.lines() {
            let Some((k, v)) = line.split_once('=') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if k.starts_with('#') || k == "mode" || ESTIMATE_KEYS.contains(&k) {
                continue;
            }
            if !extra.iter().any(|(e, _)| e == k) {
                extra.push((k.to_string(), v.to_string()));
            }
        }
    }
    estimate.derive_efficiencies();
    let mut out = estimate.to_report();
    for (k, v) in extra {
        let _ = writeln!(out, "{k} = {v}");
    }
    Ok(out)
}

pub fn run(_ctx: &Context, args: &ReportArgs) -> Result<()> {
    let mut texts = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        let text = read_text(path)?;
        EmitterEstimate::from_report(&text).map_err(in_file(path))?;
        texts.push(text);
    }
    let merged = merge_reports(&texts)?;
    print!("{merged}");
    if let Some(path) = &args.out {
        write_text(path, &merged)?;
    }
    Ok(())
}
