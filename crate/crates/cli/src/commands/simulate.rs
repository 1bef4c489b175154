use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use photon_stats::emitter::PumpPower;
use photon_stats::io::{write_tags_binary, write_tags_csv};
use photon_stats::pipeline::{noisy_saturation_points, predicted_rate, RunSpec};
use photon_stats::sim::{simulate_run, Channel, RunConfig, TimeTagStream};

use super::Context;
use crate::error::{invalid, Result};
use crate::files::{create_dir, power_label, write_file, write_table};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Pump power, μW.
    #[arg(long)]
    pub power: Option<f64>,
    /// Run length, s. Defaults to the configured duration or the length
    /// needed for `runs.target_tags` clicks.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Output file; a directory with --all.
    #[arg(long)]
    pub out: PathBuf,
    /// Simulate every configured power into `out`, with a `P_uW,tag_file,duration_s` manifest.
    #[arg(long, conflicts_with_all = ["power", "saturation"])]
    pub all: bool,
    /// Write a `P_uW,rate_cps,sigma_cps` saturation series instead of tags.
    #[arg(long, conflicts_with = "power")]
    pub saturation: bool,
}

fn summary(spec: &RunSpec, stream: &TimeTagStream, predicted: f64) -> String {
    let secs = stream.duration_ps() as f64 / photon_stats::PS_PER_S;
    let (a, b) = (stream.count(Channel::A), stream.count(Channel::B));
    format!(
        "power_uW = {}\nduration_s = {}\nseed = {}\nclicks_a = {a}\nclicks_b = {b}\n\
         rate_a_cps = {:.6e}\nrate_b_cps = {:.6e}\ntotal_rate_cps = {:.6e}\npredicted_rate_cps = {:.6e}\n",
        spec.power_uw,
        spec.duration_s,
        spec.seed,
        a as f64 / secs,
        b as f64 / secs,
        (a + b) as f64 / secs,
        predicted,
    )
}

fn write_tags(path: &Path, stream: &TimeTagStream, csv: bool) -> Result<()> {
    write_file(path, |w| {
        if csv {
            write_tags_csv(w, stream)
        } else {
            write_tags_binary(w, stream)
        }
    })
}

/// Simulates one run, writes it and returns its summary.
fn run_one(ctx: &Context, spec: &RunSpec, path: &Path) -> Result<String> {
    let cfg = &ctx.config;
    let model = cfg.model()?;
    let chain = cfg.chain(spec.power_uw)?;
    let run = RunConfig::new(spec.duration_s, spec.seed, PumpPower::new(spec.power_uw)?)?;
    let stream = simulate_run(&model, &chain, &run)?;
    write_tags(path, &stream, ctx.csv)?;
    Ok(summary(
        spec,
        &stream,
        predicted_rate(&model, &chain, spec.power_uw)?,
    ))
}

pub fn run(ctx: &Context, args: &SimulateArgs) -> Result<()> {
    let cfg = &ctx.config;
    if args.saturation {
        let model = cfg.model()?;
        let s = &cfg.saturation;
        let points = noisy_saturation_points(
            &model,
            cfg.detection.efficiency,
            &s.powers_uw,
            s.dwell_s,
            cfg.seed(ctx.seed),
        )?;
        write_table(
            &args.out,
            &["P_uW", "rate_cps", "sigma_cps"],
            points.iter().map(|p| {
                vec![
                    p.power_uw.to_string(),
                    p.rate.to_string(),
                    p.sigma.to_string(),
                ]
            }),
        )?;
        println!("points = {}\ndwell_s = {}", points.len(), s.dwell_s);
        return Ok(());
    }

    let ext = if ctx.csv { "csv" } else { "phtag" };
    if args.all {
        create_dir(&args.out)?;
        let mut specs = cfg.run_specs(ctx.seed)?;
        if let Some(d) = args.duration {
            specs.iter_mut().for_each(|s| s.duration_s = d);
        }
        let names: Vec<String> = specs
            .iter()
            .map(|s| format!("tags_{}.{ext}", power_label(s.power_uw)))
            .collect();
        let summaries: Vec<Result<String>> = specs
            .par_iter()
            .zip(&names)
            .map(|(spec, name)| run_one(ctx, spec, &args.out.join(name)))
            .collect();
        for s in summaries {
            println!("{}", s?);
        }
        write_table(
            &args.out.join("manifest.csv"),
            &["P_uW", "tag_file", "duration_s"],
            specs
                .iter()
                .zip(&names)
                .map(|(s, n)| vec![s.power_uw.to_string(), n.clone(), s.duration_s.to_string()]),
        )?;
        return Ok(());
    }

    let Some(power) = args.power else {
        return invalid("simulate needs --power, --all or --saturation");
    };
    let duration = match args.duration {
        Some(d) => d,
        None if cfg.runs.durations_s.len() == 1 => cfg.runs.durations_s[0],
        None => photon_stats::pipeline::duration_for_tags(
            &cfg.model()?,
            &cfg.chain(power)?,
            power,
            cfg.runs.target_tags,
        )?,
    };
    let spec = RunSpec {
        power_uw: power,
        duration_s: duration,
        seed: cfg.seed(ctx.seed),
    };
    print!("{}", run_one(ctx, &spec, &args.out)?);
    Ok(())
}
