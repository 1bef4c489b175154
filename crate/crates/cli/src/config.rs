//! Pipeline configuration: a TOML file whose keys carry their units.
//!
//! Every key is optional; missing keys take the defaults below, which
//! describe the reference emitter (τ₂ = 13.6 ns, P_sat ≈ 224 μW).

use std::path::Path;

use serde::Deserialize;

use photon_stats::emitter::{steady_state, EmitterModel, PumpPower};
use photon_stats::pipeline::{duration_for_tags, Geometry, RunSpec};
use photon_stats::sim::{background_for_signal_fraction, DetectionChain};
use photon_stats::spectrum::{linear_grid, Line, LineShape};

use crate::error::{invalid, io_err, CliError, Result};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub emitter: EmitterSection,
    pub detection: DetectionSection,
    pub runs: RunsSection,
    pub saturation: SaturationSection,
    pub correlator: CorrelatorSection,
    pub fit: FitSection,
    pub spectrum: SpectrumSection,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TwoLevel,
    ThreeLevel,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EmitterSection {
    pub scheme: Scheme,
    pub k21_per_s: f64,
    #[serde(rename = "kappa_per_s_per_uW")]
    pub kappa_per_s_per_uw: f64,
    /// Only read for the three-level scheme.
    pub k23_per_s: f64,
    pub k31_per_s: f64,
}

impl Default for EmitterSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::TwoLevel,
            k21_per_s: 7.3529e7,
            kappa_per_s_per_uw: 3.2825e5,
            k23_per_s: 5e6,
            k31_per_s: 3e5,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSection {
    pub efficiency: f64,
    pub split_ratio: f64,
    pub dead_time_ps: u64,
    pub dark_rate_cps: f64,
    pub background_rate_cps: f64,
    /// Signal share ρ of the clicks on each channel. When set, the background
    /// rate is chosen per power to reach it.
    pub signal_fraction: Option<f64>,
    pub jitter_sigma_ps: f64,
}

impl Default for DetectionSection {
    fn default() -> Self {
        Self {
            efficiency: 0.0245,
            split_ratio: 0.5,
            dead_time_ps: 50_000,
            dark_rate_cps: 50.0,
            background_rate_cps: 0.0,
            signal_fraction: None,
            jitter_sigma_ps: 350.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunsSection {
    #[serde(rename = "powers_uW")]
    pub powers_uw: Vec<f64>,
    /// One duration for all powers, one per power, or empty to size each
    /// run for `target_tags` clicks.
    pub durations_s: Vec<f64>,
    pub target_tags: u64,
    pub seed: u64,
}

impl Default for RunsSection {
    fn default() -> Self {
        Self {
            powers_uw: (1..=10).map(|i| 100.0 * i as f64).collect(),
            durations_s: Vec::new(),
            target_tags: 8_000_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SaturationSection {
    #[serde(rename = "powers_uW")]
    pub powers_uw: Vec<f64>,
    pub dwell_s: f64,
}

impl Default for SaturationSection {
    fn default() -> Self {
        Self {
            powers_uw: vec![
                25.0, 50.0, 100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 700.0, 1000.0, 1500.0, 2000.0,
            ],
            dwell_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelatorSection {
    pub bin_width_ps: u64,
    pub window_ps: u64,
}

impl Default for CorrelatorSection {
    fn default() -> Self {
        Self {
            bin_width_ps: 500,
            window_ps: 100_000,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Fixes ρ instead of fitting it; 1 means no background term.
    pub fix_rho: Option<f64>,
    /// Timing response on the delay axis; defaults to √2 × the click jitter.
    pub irf_sigma_ps: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Lorentzian,
    Gaussian,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub zpl_center_nm: f64,
    pub zpl_fwhm_nm: f64,
    pub zpl_area: f64,
    pub zpl_shape: Shape,
    pub sideband_center_nm: f64,
    pub sideband_fwhm_nm: f64,
    pub sideband_area: f64,
    pub baseline: f64,
    pub grid_start_nm: f64,
    pub grid_stop_nm: f64,
    pub grid_points: usize,
    /// Expected counts at the tallest sample; adds shot noise when set.
    pub peak_counts: Option<f64>,
    /// Baseline subtracted before integrating; estimated from the grid
    /// edges when unset.
    pub analysis_baseline: Option<f64>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            zpl_center_nm: 734.0,
            zpl_fwhm_nm: 4.1,
            zpl_area: 0.81,
            zpl_shape: Shape::Lorentzian,
            sideband_center_nm: 760.0,
            sideband_fwhm_nm: 40.0,
            sideband_area: 0.19,
            baseline: 0.0,
            grid_start_nm: 680.0,
            grid_stop_nm: 840.0,
            grid_points: 3201,
            peak_counts: None,
            analysis_baseline: None,
        }
    }
}

fn require(ok: bool, field: &str, msg: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        invalid(format!("config {field}: {msg}"))
    }
}

fn positive(v: f64, field: &str) -> Result<()> {
    require(
        v > 0.0 && v.is_finite(),
        field,
        format_args!("must be finite and > 0, got {v}"),
    )
}

fn non_negative(v: f64, field: &str) -> Result<()> {
    require(
        v >= 0.0 && v.is_finite(),
        field,
        format_args!("must be finite and >= 0, got {v}"),
    )
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text)
            .map_err(|e| CliError::Validation(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.emitter;
        positive(e.k21_per_s, "emitter.k21_per_s")?;
        positive(e.kappa_per_s_per_uw, "emitter.kappa_per_s_per_uW")?;
        if e.scheme == Scheme::ThreeLevel {
            positive(e.k23_per_s, "emitter.k23_per_s")?;
            positive(e.k31_per_s, "emitter.k31_per_s")?;
        }

        let d = &self.detection;
        require(
            d.efficiency > 0.0 && d.efficiency <= 1.0,
            "detection.efficiency",
            format_args!("must lie in (0, 1], got {}", d.efficiency),
        )?;
        require(
            (0.0..=1.0).contains(&d.split_ratio),
            "detection.split_ratio",
            format_args!("must lie in [0, 1], got {}", d.split_ratio),
        )?;
        non_negative(d.dark_rate_cps, "detection.dark_rate_cps")?;
        non_negative(d.background_rate_cps, "detection.background_rate_cps")?;
        non_negative(d.jitter_sigma_ps, "detection.jitter_sigma_ps")?;
        if let Some(rho) = d.signal_fraction {
            require(
                rho > 0.0 && rho <= 1.0,
                "detection.signal_fraction",
                format_args!("must lie in (0, 1], got {rho}"),
            )?;
            require(
                d.background_rate_cps == 0.0,
                "detection.signal_fraction",
                "cannot be combined with a nonzero background_rate_cps",
            )?;
        }

        let r = &self.runs;
        require(
            !r.powers_uw.is_empty(),
            "runs.powers_uW",
            "must not be empty",
        )?;
        for &p in &r.powers_uw {
            positive(p, "runs.powers_uW")?;
        }
        let mut sorted = r.powers_uw.clone();
        sorted.sort_by(f64::total_cmp);
        require(
            sorted.windows(2).all(|w| w[0] != w[1]),
            "runs.powers_uW",
            "powers must be distinct",
        )?;
        require(
            r.durations_s.len() <= 1 || r.durations_s.len() == r.powers_uw.len(),
            "runs.durations_s",
            format_args!(
                "give none, one, or one per power ({} powers, {} durations)",
                r.powers_uw.len(),
                r.durations_s.len()
            ),
        )?;
        for &t in &r.durations_s {
            positive(t, "runs.durations_s")?;
        }
        require(r.target_tags > 0, "runs.target_tags", "must be > 0")?;

        let s = &self.saturation;
        require(
            s.powers_uw.len() >= 3,
            "saturation.powers_uW",
            "needs at least 3 powers",
        )?;
        for &p in &s.powers_uw {
            positive(p, "saturation.powers_uW")?;
        }
        positive(s.dwell_s, "saturation.dwell_s")?;

        let c = &self.correlator;
        check_geometry(c.bin_width_ps, c.window_ps, "correlator")?;

        if let Some(rho) = self.fit.fix_rho {
            require(
                (0.0..=1.0).contains(&rho),
                "fit.fix_rho",
                format_args!("must lie in [0, 1], got {rho}"),
            )?;
        }
        if let Some(irf) = self.fit.irf_sigma_ps {
            non_negative(irf, "fit.irf_sigma_ps")?;
        }

        let sp = &self.spectrum;
        positive(sp.zpl_fwhm_nm, "spectrum.zpl_fwhm_nm")?;
        positive(sp.sideband_fwhm_nm, "spectrum.sideband_fwhm_nm")?;
        positive(sp.zpl_center_nm, "spectrum.zpl_center_nm")?;
        positive(sp.sideband_center_nm, "spectrum.sideband_center_nm")?;
        non_negative(sp.zpl_area, "spectrum.zpl_area")?;
        non_negative(sp.sideband_area, "spectrum.sideband_area")?;
        non_negative(sp.baseline, "spectrum.baseline")?;
        require(
            sp.grid_stop_nm > sp.grid_start_nm,
            "spectrum.grid_stop_nm",
            "must exceed grid_start_nm",
        )?;
        require(
            sp.grid_points >= 16,
            "spectrum.grid_points",
            "must be at least 16",
        )?;
        if let Some(n) = sp.peak_counts {
            positive(n, "spectrum.peak_counts")?;
        }
        if let Some(b) = sp.analysis_baseline {
            require(
                b.is_finite(),
                "spectrum.analysis_baseline",
                "must be finite",
            )?;
        }
        Ok(())
    }

    pub fn model(&self) -> Result<EmitterModel> {
        let e = &self.emitter;
        Ok(match e.scheme {
            Scheme::TwoLevel => EmitterModel::two_level(e.k21_per_s, e.kappa_per_s_per_uw)?,
            Scheme::ThreeLevel => EmitterModel::three_level(
                e.k21_per_s,
                e.k23_per_s,
                e.k31_per_s,
                e.kappa_per_s_per_uw,
            )?,
        })
    }

    /// Detection chain at one pump power; only the background depends on it,
    /// and only when a signal fraction is requested.
    pub fn chain(&self, power_uw: f64) -> Result<DetectionChain> {
        let d = &self.detection;
        let background_rate = match d.signal_fraction {
            None => d.background_rate_cps,
            Some(rho) => {
                let model = self.model()?;
                let detected =
                    steady_state(&model, PumpPower::new(power_uw)?, d.efficiency)?.detected_rate;
                background_for_signal_fraction(detected / 2.0, rho, d.dark_rate_cps)?
            }
        };
        Ok(DetectionChain {
            efficiency: d.efficiency,
            split_ratio: d.split_ratio,
            dead_time_ps: d.dead_time_ps,
            dark_rate: d.dark_rate_cps,
            background_rate,
            jitter_sigma_ps: d.jitter_sigma_ps,
        })
    }

    pub fn seed(&self, overridden: Option<u64>) -> u64 {
        overridden.unwrap_or(self.runs.seed)
    }

    /// Run duration at `power_uw`: the configured one, or long enough for
    /// `target_tags` clicks.
    pub fn duration_at(&self, index: usize, power_uw: f64) -> Result<f64> {
        let r = &self.runs;
        match r.durations_s.len() {
            0 => Ok(duration_for_tags(
                &self.model()?,
                &self.chain(power_uw)?,
                power_uw,
                r.target_tags,
            )?),
            1 => Ok(r.durations_s[0]),
            _ => Ok(r.durations_s[index]),
        }
    }

    pub fn run_specs(&self, seed: Option<u64>) -> Result<Vec<RunSpec>> {
        let base = self.seed(seed);
        self.runs
            .powers_uw
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                Ok(RunSpec {
                    power_uw: p,
                    duration_s: self.duration_at(i, p)?,
                    seed: base.wrapping_add(i as u64),
                })
            })
            .collect()
    }

    pub fn geometry(&self, bin_ps: Option<u64>, window_ps: Option<u64>) -> Result<Geometry> {
        let g = Geometry {
            bin_width_ps: bin_ps.unwrap_or(self.correlator.bin_width_ps),
            window_ps: window_ps.unwrap_or(self.correlator.window_ps),
        };
        check_geometry(g.bin_width_ps, g.window_ps, "correlator")?;
        Ok(g)
    }

    pub fn irf_sigma_ps(&self) -> f64 {
        self.fit
            .irf_sigma_ps
            .unwrap_or(std::f64::consts::SQRT_2 * self.detection.jitter_sigma_ps)
    }

    pub fn spectrum_lines(&self) -> (Line, Line) {
        let s = &self.spectrum;
        let zpl = Line {
            center_nm: s.zpl_center_nm,
            fwhm_nm: s.zpl_fwhm_nm,
            area: s.zpl_area,
            shape: match s.zpl_shape {
                Shape::Lorentzian => LineShape::Lorentzian,
                Shape::Gaussian => LineShape::Gaussian,
            },
        };
        (
            zpl,
            Line::gaussian(s.sideband_center_nm, s.sideband_fwhm_nm, s.sideband_area),
        )
    }

    pub fn spectrum_grid(&self) -> Vec<f64> {
        let s = &self.spectrum;
        linear_grid(s.grid_start_nm, s.grid_stop_nm, s.grid_points)
    }
}

fn check_geometry(bin: u64, window: u64, section: &str) -> Result<()> {
    require(bin > 0, &format!("{section}.bin_width_ps"), "must be > 0")?;
    require(
        window >= bin && window.is_multiple_of(bin),
        &format!("{section}.window_ps"),
        format_args!("must be a positive multiple of the bin width {bin} ps, got {window}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = Config::parse("").unwrap();
        assert_eq!(cfg, Config::default());
        let m = cfg.model().unwrap();
        assert!((m.saturation_power() - 224.0).abs() < 0.1);
    }

    #[test]
    fn sample_config_matches_defaults() {
        let text = include_str!("../../../configs/default.toml");
        assert_eq!(Config::parse(text).unwrap(), Config::default());
    }

    #[test]
    fn units_in_keys() {
        let cfg = Config::parse(
            "[emitter]\nkappa_per_s_per_uW = 1e5\n[runs]\npowers_uW = [10.0, 20.0]\ndurations_s = [0.5]\n",
        )
        .unwrap();
        assert_eq!(cfg.emitter.kappa_per_s_per_uw, 1e5);
        assert_eq!(cfg.run_specs(Some(9)).unwrap()[1].seed, 10);
        assert_eq!(cfg.run_specs(None).unwrap()[1].duration_s, 0.5);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("[emitter]\nk21_per_s = 0.0\n", "emitter.k21_per_s"),
            ("[detection]\nefficiency = 1.5\n", "detection.efficiency"),
            ("[runs]\ndurations_s = [0.0]\n", "runs.durations_s"),
            ("[runs]\npowers_uW = [1.0, 1.0]\n", "runs.powers_uW"),
            ("[correlator]\nwindow_ps = 750\n", "correlator.window_ps"),
            ("[fit]\nfix_rho = 2.0\n", "fit.fix_rho"),
            ("[emitter]\nk21 = 1.0\n", "k21"),
        ];
        for (text, field) in cases {
            let err = Config::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 2);
            assert!(err.to_string().contains(field), "{text:?} -> {err}");
        }
    }

    #[test]
    fn signal_fraction_sets_background() {
        let cfg =
            Config::parse("[detection]\nsignal_fraction = 0.9\ndark_rate_cps = 0.0\n").unwrap();
        let chain = cfg.chain(500.0).unwrap();
        let model = cfg.model().unwrap();
        let signal = steady_state(&model, PumpPower::new(500.0).unwrap(), 0.0245)
            .unwrap()
            .detected_rate
            / 2.0;
        let rho = signal / (signal + chain.background_rate);
        assert!((rho - 0.9).abs() < 1e-12);
    }
}
