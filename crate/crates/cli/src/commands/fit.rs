use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use photon_stats::correlator::G2Curve;
use photon_stats::estimators::{
    antibunching_g2, fit_antibunching_irf, EmitterEstimate, FitResult, RatePoint,
};
use photon_stats::io::{read_g2_csv, read_spectrum_csv};
use photon_stats::pipeline::{analyze_kt_sweep, analyze_saturation};
use photon_stats::spectrum::analyze_spectrum;

use super::{entry_error, Context};
use crate::error::{in_file, CliError, Result};
use crate::files::{
    create_dir, number, power_label, read_bytes, read_manifest, resolve, write_table, write_text,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// One g² curve: k_T, ρ² and g²(0).
    G2,
    /// `P_uW,g2_file` manifest: lifetime, κ, P_sat and level scheme.
    KtSweep,
    /// `P_uW,rate_cps,sigma_cps` manifest: I_sat and P_sat.
    Saturation,
    /// Spectrum CSV: ZPL center, FWHM and Huang-Rhys factor.
    Spectrum,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// g² CSV, manifest or spectrum CSV, depending on the mode.
    pub input: PathBuf,
    /// Directory for report.txt and the plot-data tables.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fix ρ instead of fitting it (overrides fit.fix_rho).
    #[arg(long)]
    pub fix_rho: Option<f64>,
    /// Timing response on the delay axis, ps (overrides fit.irf_sigma_ps).
    #[arg(long)]
    pub irf_sigma: Option<f64>,
}

pub(crate) struct Table {
    name: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Outcome {
    report: String,
    tables: Vec<Table>,
}

fn pair(out: &mut String, key: &str, v: f64, s: f64) {
    let _ = writeln!(out, "{key} = {v:.6e} {s:.3e}");
}

fn diagnostics(out: &mut String, prefix: &str, f: &FitResult) {
    let _ = writeln!(out, "{prefix}reduced_chi2 = {:.6}", f.reduced_chi2);
    let _ = writeln!(out, "{prefix}converged = {}", f.converged);
    let flags: Vec<String> = f.flags.iter().map(|f| f.to_string()).collect();
    let _ = writeln!(
        out,
        "{prefix}flags = {}",
        if flags.is_empty() {
            "none".into()
        } else {
            flags.join(",")
        }
    );
}

fn g2_table(name: String, curve: &G2Curve, fit: Option<&FitResult>, irf: f64) -> Table {
    let rows = (0..curve.len())
        .map(|i| {
            let model = fit.map_or(String::new(), |f| {
                antibunching_g2(curve.tau_ps[i], f.values[0], f.values[1], irf).to_string()
            });
            vec![
                curve.tau_ps[i].to_string(),
                curve.g2[i].to_string(),
                curve.sigma[i].to_string(),
                model,
            ]
        })
        .collect();
    Table {
        name,
        header: vec!["tau_ps", "g2", "sigma", "model"],
        rows,
    }
}

fn load_g2(path: &Path) -> Result<G2Curve> {
    read_g2_csv(read_bytes(path)?.as_slice()).map_err(in_file(path))
}

fn fit_g2(path: &Path, fix_rho: Option<f64>, irf: f64) -> Result<Outcome> {
    let curve = load_g2(path)?;
    let fit = fit_antibunching_irf(&curve, fix_rho, irf).map_err(in_file(path))?;
    let estimate = EmitterEstimate {
        g2_0: Some((1.0 - fit.values[1], fit.sigma("rho2").unwrap_or(0.0))),
        ..Default::default()
    };
    let mut report = String::from("mode = g2\n");
    report.push_str(&estimate.to_report());
    pair(
        &mut report,
        "k_T_per_s",
        fit.values[0],
        fit.sigma("k_T").unwrap_or(0.0),
    );
    pair(
        &mut report,
        "rho2",
        fit.values[1],
        fit.sigma("rho2").unwrap_or(0.0),
    );
    let _ = writeln!(report, "irf_sigma_ps = {irf}");
    diagnostics(&mut report, "", &fit);
    Ok(Outcome {
        report,
        tables: vec![g2_table("fig2_g2.csv".into(), &curve, Some(&fit), irf)],
    })
}

fn fit_kt_sweep(manifest: &Path, fix_rho: Option<f64>, irf: f64) -> Result<Outcome> {
    let rows = read_manifest(manifest, &["P_uW", "g2_file"], &[])?;
    let mut errors = Vec::new();
    let mut curves = Vec::new();
    for rec in &rows {
        let p = number(manifest, rec, 0, "P_uW")?;
        match load_g2(&resolve(manifest, &rec[1])) {
            Ok(c) => curves.push((p, c)),
            Err(e) => errors.push((p, e.to_string())),
        }
    }
    for (p, msg) in &errors {
        entry_error(&format!("P_uW={p}"), msg);
    }
    if curves.is_empty() {
        return Err(CliError::AllFitsFailed(
            "no sweep entry could be read".into(),
        ));
    }
    let analysis = analyze_kt_sweep(&curves, fix_rho, irf).map_err(|e| match e {
        photon_stats::Error::Fit(m) => CliError::AllFitsFailed(m),
        other => in_file(manifest)(other),
    })?;

    let mut report = String::from("mode = kt-sweep\n");
    report.push_str(&analysis.estimate.to_report());
    if let Some(kt) = &analysis.kt {
        let _ = writeln!(report, "kt_points = {}", kt_points(&analysis).len());
        diagnostics(&mut report, "kt_", &kt.fit);
    }
    if let Some(c) = &analysis.classification {
        if let Some(p) = c.power_uw {
            let _ = writeln!(report, "classification_power_uW = {p}");
        }
        if let Some(b) = &c.bunching {
            pair(
                &mut report,
                "bunching_amplitude",
                b.amplitude(),
                b.amplitude_sigma,
            );
            let _ = writeln!(report, "bunching_max_g2 = {:.6}", b.max_model_g2);
            let _ = writeln!(report, "bunching_excess_sigma = {:.3}", b.excess_sigma);
        }
    }
    let _ = writeln!(report, "irf_sigma_ps = {irf}");
    for (p, msg) in &errors {
        let _ = writeln!(report, "entry_{}_error = {msg}", power_label(*p));
    }

    let mut tables = Vec::new();
    for (entry, (_, curve)) in analysis.entries.iter().zip(sorted(&curves)) {
        let label = power_label(entry.power_uw);
        match &entry.fit {
            Ok(f) => {
                pair(
                    &mut report,
                    &format!("entry_{label}_k_T_per_s"),
                    f.values[0],
                    f.sigma("k_T").unwrap_or(0.0),
                );
                pair(
                    &mut report,
                    &format!("entry_{label}_rho2"),
                    f.values[1],
                    f.sigma("rho2").unwrap_or(0.0),
                );
                diagnostics(&mut report, &format!("entry_{label}_"), f);
            }
            Err(msg) => {
                entry_error(&format!("P_uW={}", entry.power_uw), msg);
                let _ = writeln!(report, "entry_{label}_error = {msg}");
            }
        }
        tables.push(g2_table(
            format!("fig2_g2_{label}.csv"),
            curve,
            entry.fit.as_ref().ok(),
            irf,
        ));
    }
    if let Some(kt) = &analysis.kt {
        let (k21, kappa) = (kt.fit.values[0], kt.fit.values[1]);
        tables.push(Table {
            name: "fig3_kt.csv".into(),
            header: vec!["P_uW", "k_T_per_s", "sigma_per_s", "model_per_s"],
            rows: kt_points(&analysis)
                .into_iter()
                .map(|(p, k, s)| {
                    vec![
                        p.to_string(),
                        k.to_string(),
                        s.to_string(),
                        (k21 + kappa * p).to_string(),
                    ]
                })
                .collect(),
        });
    }
    Ok(Outcome { report, tables })
}

fn sorted(curves: &[(f64, G2Curve)]) -> Vec<&(f64, G2Curve)> {
    let mut v: Vec<&(f64, G2Curve)> = curves.iter().collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// (P, k_T, σ) of the entries that entered the k_T(P) line.
fn kt_points(a: &photon_stats::pipeline::KtSweepAnalysis) -> Vec<(f64, f64, f64)> {
    a.entries
        .iter()
        .filter_map(|e| {
            let f = e.usable()?;
            let s = f.sigma("k_T")?;
            (s > 0.0).then(|| (e.power_uw, f.values[0], s))
        })
        .collect()
}

fn fit_saturation_manifest(manifest: &Path) -> Result<Outcome> {
    let rows = read_manifest(manifest, &["P_uW", "rate_cps", "sigma_cps"], &[])?;
    let mut points = Vec::with_capacity(rows.len());
    for rec in &rows {
        points.push(RatePoint {
            power_uw: number(manifest, rec, 0, "P_uW")?,
            rate: number(manifest, rec, 1, "rate_cps")?,
            sigma: number(manifest, rec, 2, "sigma_cps")?,
        });
    }
    let (fit, estimate) = analyze_saturation(&points).map_err(|e| match e {
        photon_stats::Error::Fit(m) => {
            CliError::AllFitsFailed(format!("saturation fit failed: {m}"))
        }
        other => in_file(manifest)(other),
    })?;
    let mut report = String::from("mode = saturation\n");
    report.push_str(&estimate.to_report());
    let _ = writeln!(report, "saturation_points = {}", points.len());
    diagnostics(&mut report, "saturation_", &fit);
    let (i_sat, p_sat) = (fit.values[0], fit.values[1]);
    let table = Table {
        name: "fig4_saturation.csv".into(),
        header: vec!["P_uW", "rate_cps", "sigma_cps", "model_cps"],
        rows: points
            .iter()
            .map(|p| {
                vec![
                    p.power_uw.to_string(),
                    p.rate.to_string(),
                    p.sigma.to_string(),
                    photon_stats::emitter::saturation_law(p.power_uw, i_sat, p_sat).to_string(),
                ]
            })
            .collect(),
    };
    Ok(Outcome {
        report,
        tables: vec![table],
    })
}

pub(crate) fn spectrum_report(path: &Path, baseline: Option<f64>) -> Result<(String, Table)> {
    let s = read_spectrum_csv(read_bytes(path)?.as_slice()).map_err(in_file(path))?;
    let a = analyze_spectrum(&s, baseline).map_err(|e| match e {
        e @ (photon_stats::Error::Fit(_) | photon_stats::Error::NoZpl(_)) => {
            CliError::AllFitsFailed(format!("{}: {e}", path.display()))
        }
        other => in_file(path)(other),
    })?;
    let mut report = String::from("mode = spectrum\n");
    report.push_str(&a.to_report());
    let _ = writeln!(report, "zpl_reduced_chi2 = {:.6e}", a.zpl.reduced_chi2);
    let table = Table {
        name: "fig1_spectrum.csv".into(),
        header: vec!["wavelength_nm", "intensity", "zpl_model"],
        rows: s
            .wavelengths()
            .iter()
            .zip(s.intensities())
            .map(|(&x, &y)| vec![x.to_string(), y.to_string(), a.zpl.zpl_value(x).to_string()])
            .collect(),
    };
    Ok((report, table))
}

pub fn run(ctx: &Context, args: &FitArgs) -> Result<()> {
    let cfg = &ctx.config;
    let fix_rho = args.fix_rho.or(cfg.fit.fix_rho);
    let irf = args.irf_sigma.unwrap_or_else(|| cfg.irf_sigma_ps());
    let outcome =
        match args.mode {
            Mode::G2 => fit_g2(&args.input, fix_rho, irf),
            Mode::KtSweep => fit_kt_sweep(&args.input, fix_rho, irf),
            Mode::Saturation => fit_saturation_manifest(&args.input),
            Mode::Spectrum => spectrum_report(&args.input, cfg.spectrum.analysis_baseline).map(
                |(report, table)| Outcome {
                    report,
                    tables: vec![table],
                },
            ),
        };
    // a single fit that fails is a fit failure, not a malformed input
    let outcome = outcome.map_err(|e| match e {
        CliError::InFile {
            source: photon_stats::Error::Fit(m),
            path,
        } => CliError::AllFitsFailed(format!("{}: {m}", path.display())),
        other => other,
    })?;
    print!("{}", outcome.report);
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_text(&dir.join("report.txt"), &outcome.report)?;
        for t in outcome.tables {
            write_table(&dir.join(&t.name), &t.header, t.rows)?;
        }
    }
    Ok(())
}
