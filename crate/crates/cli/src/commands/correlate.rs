use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use photon_stats::correlator::{coincidence_histogram_chunked, normalize_g2};
use photon_stats::io::{read_tags, write_g2_csv, write_histogram_csv};
use photon_stats::pipeline::Geometry;
use photon_stats::PS_PER_S;

use super::Context;
use crate::error::{in_file, invalid, Result};
use crate::files::{
    create_dir, number, power_label, read_bytes, read_manifest, resolve, write_file, write_table,
};

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Tag file, binary or CSV.
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    /// `P_uW,tag_file[,duration_s]` manifest; every entry is correlated.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Bin width, ps.
    #[arg(long)]
    pub bin: Option<u64>,
    /// One-sided delay window, ps.
    #[arg(long)]
    pub window: Option<u64>,
    /// Acquisition length, s; inferred from the last tag when absent.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn duration_ps(seconds: Option<f64>) -> Result<Option<u64>> {
    match seconds {
        None => Ok(None),
        Some(s) if s > 0.0 && s.is_finite() => Ok(Some((s * PS_PER_S).round() as u64)),
        Some(s) => invalid(format!("--duration must be > 0, got {s}")),
    }
}

/// Histogram and g² of one tag file, written as `<stem>_hist.csv` and
/// `<stem>_g2.csv`. Returns the g² file name and a summary.
fn correlate_file(
    input: &Path,
    duration: Option<u64>,
    geometry: Geometry,
    out: &Path,
    stem: &str,
) -> Result<(String, String)> {
    let bytes = read_bytes(input)?;
    let stream = read_tags(&bytes, duration).map_err(in_file(input))?;
    drop(bytes);
    let chunks = rayon::current_num_threads();
    let h =
        coincidence_histogram_chunked(&stream, geometry.bin_width_ps, geometry.window_ps, chunks)?;
    drop(stream);
    let g = normalize_g2(&h).map_err(in_file(input))?;
    let hist_name = format!("{stem}_hist.csv");
    let g2_name = format!("{stem}_g2.csv");
    write_file(&out.join(&hist_name), |w| write_histogram_csv(w, &h))?;
    write_file(&out.join(&g2_name), |w| write_g2_csv(w, &g))?;
    let summary = format!(
        "input = {}\nclicks_a = {}\nclicks_b = {}\ncoincidences = {}\nmin_g2 = {:.6}\n",
        input.display(),
        h.n_a,
        h.n_b,
        h.total(),
        g.min_g2()
    );
    Ok((g2_name, summary))
}

pub fn run(ctx: &Context, args: &CorrelateArgs) -> Result<()> {
    let geometry = ctx.config.geometry(args.bin, args.window)?;
    let duration = duration_ps(args.duration)?;
    create_dir(&args.out)?;

    if let Some(input) = &args.input {
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "tags".into());
        let (_, summary) = correlate_file(input, duration, geometry, &args.out, &stem)?;
        print!("{summary}");
        return Ok(());
    }

    let manifest = args
        .manifest
        .as_ref()
        .expect("clap requires input or manifest");
    let rows = read_manifest(manifest, &["P_uW", "tag_file"], &["duration_s"])?;
    let mut entries = Vec::with_capacity(rows.len());
    for rec in &rows {
        let p = number(manifest, rec, 0, "P_uW")?;
        let d = match (duration, rec.get(2)) {
            (Some(d), _) => Some(d),
            (None, Some(_)) => duration_ps(Some(number(manifest, rec, 2, "duration_s")?))?,
            (None, None) => None,
        };
        entries.push((p, resolve(manifest, &rec[1]), d));
    }
    let results: Vec<Result<(String, String)>> = entries
        .par_iter()
        .map(|(p, path, d)| correlate_file(path, *d, geometry, &args.out, &power_label(*p)))
        .collect();
    let mut table = Vec::with_capacity(results.len());
    for ((p, _, _), r) in entries.iter().zip(results) {
        let (g2_name, summary) = r?;
        println!("P_uW = {p}\n{summary}");
        table.push(vec![p.to_string(), g2_name]);
    }
    write_table(&args.out.join("manifest.csv"), &["P_uW", "g2_file"], table)
}
