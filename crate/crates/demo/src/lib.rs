//! Browser front end: three small experiments that run the photon-stats
//! library in WebAssembly. Each entry point is a plain function so the same
//! code is exercised by native tests.

use photon_stats::correlator::{coincidence_histogram, normalize_g2};
use photon_stats::emitter::{EmitterModel, PumpPower};
use photon_stats::estimators::{antibunching_g2, fit_antibunching_irf, fit_bunching};
use photon_stats::pipeline::{analyze_saturation, noisy_saturation_points};
use photon_stats::sim::{background_for_signal_fraction, simulate_run, DetectionChain, RunConfig};
use photon_stats::spectrum::{
    analyze_spectrum, linear_grid, synthesize_spectrum, with_shot_noise, Line,
};
use wasm_bindgen::prelude::*;

const K21: f64 = 7.3529e7;
const KAPPA: f64 = 3.2825e5;
const K23: f64 = 5e6;
const K31: f64 = 3e5;
const DARK_CPS: f64 = 50.0;

/// Longest acquisition the page will simulate, s.
const MAX_DURATION_S: f64 = 5.0;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct G2View {
    pub tau_ns: Vec<f64>,
    pub measured: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Closed form at the same delays, before timing jitter.
    pub theory: Vec<f64>,
    /// Antibunching fit; empty for the three-level emitter.
    pub fitted: Vec<f64>,
    pub clicks: f64,
    pub k_t_per_s: f64,
    pub k_t_sigma: f64,
    pub g2_0: f64,
    /// Bunching excess over 1 in units of its σ; NaN for two-level.
    pub bunching_sigma: f64,
    pub note: String,
}

/// Simulates one HBT run and fits it.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn g2_explorer(
    three_level: bool,
    power_uw: f64,
    signal_fraction: f64,
    efficiency: f64,
    jitter_ps: f64,
    duration_s: f64,
    seed: u64,
) -> Result<G2View, String> {
    if !(duration_s > 0.0 && duration_s <= MAX_DURATION_S) {
        return Err(format!("duration must lie in (0, {MAX_DURATION_S}] s"));
    }
    if jitter_ps.is_nan() || jitter_ps < 0.0 {
        return Err("jitter must be >= 0".into());
    }
    let model = if three_level {
        EmitterModel::three_level(K21, K23, K31, KAPPA)
    } else {
        EmitterModel::two_level(K21, KAPPA)
    }
    .map_err(err)?;
    let power = PumpPower::new(power_uw).map_err(err)?;

    let emitted = photon_stats::emitter::steady_state(&model, power, efficiency)
        .map_err(err)?
        .detected_rate;
    let background =
        background_for_signal_fraction(emitted / 2.0, signal_fraction, DARK_CPS).map_err(err)?;
    let chain = DetectionChain {
        efficiency,
        split_ratio: 0.5,
        dead_time_ps: 0,
        dark_rate: DARK_CPS,
        background_rate: background,
        jitter_sigma_ps: jitter_ps,
    };
    let run = RunConfig::new(duration_s, seed, power).map_err(err)?;
    let stream = simulate_run(&model, &chain, &run).map_err(err)?;
    let window = if three_level { 1_000_000 } else { 100_000 };
    let bin = if three_level { 10_000 } else { 1_000 };
    let h = coincidence_histogram(&stream, bin, window).map_err(err)?;
    let curve = normalize_g2(&h).map_err(err)?;

    let theory = curve
        .tau_ps
        .iter()
        .map(|&t| model.g2(t * 1e-12, power, signal_fraction))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;

    let mut view = G2View {
        tau_ns: curve.tau_ps.iter().map(|t| t * 1e-3).collect(),
        measured: curve.g2.clone(),
        sigma: curve.sigma.clone(),
        theory,
        fitted: Vec::new(),
        clicks: stream.len() as f64,
        k_t_per_s: f64::NAN,
        k_t_sigma: f64::NAN,
        g2_0: f64::NAN,
        bunching_sigma: f64::NAN,
        note: String::new(),
    };
    let irf = std::f64::consts::SQRT_2 * jitter_ps;
    if three_level {
        match fit_bunching(&curve) {
            Ok(b) => view.bunching_sigma = b.excess_sigma,
            Err(e) => view.note = format!("bunching fit failed: {e}"),
        }
    } else {
        match fit_antibunching_irf(&curve, None, irf) {
            Ok(fit) => {
                let k = fit.get("k_T").unwrap_or(f64::NAN);
                let rho2 = fit.get("rho2").unwrap_or(f64::NAN);
                view.k_t_per_s = k;
                view.k_t_sigma = fit.sigma("k_T").unwrap_or(f64::NAN);
                view.g2_0 = 1.0 - rho2;
                view.fitted = curve
                    .tau_ps
                    .iter()
                    .map(|&t| antibunching_g2(t, k, rho2, irf))
                    .collect();
            }
            Err(e) => view.note = format!("fit failed: {e}"),
        }
    }
    Ok(view)
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct SaturationView {
    pub power_uw: Vec<f64>,
    pub rate_cps: Vec<f64>,
    pub sigma_cps: Vec<f64>,
    pub model_power_uw: Vec<f64>,
    pub model_cps: Vec<f64>,
    pub i_sat: f64,
    pub i_sat_sigma: f64,
    pub p_sat: f64,
    pub p_sat_sigma: f64,
    /// I_sat / k21 with the lifetime held at its nominal value.
    pub efficiency: f64,
}

/// Noisy count rates over a power sweep and their saturation fit.
#[wasm_bindgen]
pub fn saturation_fit(
    efficiency: f64,
    dwell_s: f64,
    max_power_uw: f64,
    seed: u64,
) -> Result<SaturationView, String> {
    if !(50.0..=1e5).contains(&max_power_uw) {
        return Err("maximum power must lie in [50, 100000] uW".into());
    }
    let model = EmitterModel::two_level(K21, KAPPA).map_err(err)?;
    let powers: Vec<f64> = (1..=14).map(|i| max_power_uw * i as f64 / 14.0).collect();
    let points =
        noisy_saturation_points(&model, efficiency, &powers, dwell_s, seed).map_err(err)?;
    let (fit, _) = analyze_saturation(&points).map_err(err)?;
    let (i_sat, p_sat) = (fit.values[0], fit.values[1]);
    let model_power_uw = linear_grid(0.0, max_power_uw, 200);
    let model_cps = model_power_uw
        .iter()
        .map(|&p| photon_stats::emitter::saturation_law(p, i_sat, p_sat))
        .collect();
    Ok(SaturationView {
        power_uw: points.iter().map(|p| p.power_uw).collect(),
        rate_cps: points.iter().map(|p| p.rate).collect(),
        sigma_cps: points.iter().map(|p| p.sigma).collect(),
        model_power_uw,
        model_cps,
        i_sat,
        i_sat_sigma: fit.sigma("i_sat").unwrap_or(f64::NAN),
        p_sat,
        p_sat_sigma: fit.sigma("p_sat").unwrap_or(f64::NAN),
        efficiency: i_sat / K21,
    })
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct SpectrumView {
    pub wavelength_nm: Vec<f64>,
    pub intensity: Vec<f64>,
    pub zpl_model: Vec<f64>,
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub huang_rhys: f64,
    pub window_fraction: f64,
}

/// Synthesizes a ZPL plus phonon sideband, adds shot noise and fits the ZPL.
#[wasm_bindgen]
pub fn spectrum_fit(
    zpl_center_nm: f64,
    zpl_fwhm_nm: f64,
    zpl_share: f64,
    peak_counts: f64,
    seed: u64,
) -> Result<SpectrumView, String> {
    if !(zpl_share > 0.0 && zpl_share < 1.0) {
        return Err("ZPL share must lie in (0, 1)".into());
    }
    let grid = linear_grid(680.0, 840.0, 1601);
    let clean = synthesize_spectrum(
        Line::lorentzian(zpl_center_nm, zpl_fwhm_nm, zpl_share),
        Line::lorentzian(760.0, 40.0, 1.0 - zpl_share),
        0.0,
        &grid,
    )
    .map_err(err)?;
    let s = if peak_counts > 0.0 {
        with_shot_noise(&clean, peak_counts, seed).map_err(err)?
    } else {
        clean
    };
    let a = analyze_spectrum(&s, Some(0.0)).map_err(err)?;
    let zpl_model = s
        .wavelengths()
        .iter()
        .map(|&x| a.zpl.zpl_value(x))
        .collect();
    Ok(SpectrumView {
        wavelength_nm: s.wavelengths().to_vec(),
        intensity: s.intensities().to_vec(),
        zpl_model,
        center_nm: a.zpl.center_nm,
        fwhm_nm: a.zpl.fwhm_nm,
        huang_rhys: a.zpl.huang_rhys,
        window_fraction: a.window_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_run_shows_a_dip_and_fits() {
        let v = g2_explorer(false, 400.0, 0.95, 0.0245, 350.0, 1.0, 1).unwrap();
        assert_eq!(v.tau_ns.len(), v.measured.len());
        assert_eq!(v.fitted.len(), v.measured.len());
        let want = K21 + KAPPA * 400.0;
        assert!(
            (v.k_t_per_s - want).abs() < 5.0 * v.k_t_sigma,
            "{} vs {want}",
            v.k_t_per_s
        );
        assert!(v.g2_0 < 0.3, "{}", v.g2_0);
        assert!(v.note.is_empty());
    }

    #[test]
    fn three_level_run_reports_bunching() {
        let v = g2_explorer(true, 1000.0, 0.95, 0.0245, 350.0, 2.0, 2).unwrap();
        assert!(v.fitted.is_empty());
        assert!(v.theory.iter().cloned().fold(0.0, f64::max) > 2.0);
        assert!(v.bunching_sigma > 3.0, "{}", v.bunching_sigma);
    }

    #[test]
    fn g2_explorer_rejects_bad_input() {
        assert!(g2_explorer(false, 400.0, 0.95, 0.0245, 350.0, 0.0, 1).is_err());
        assert!(g2_explorer(false, 400.0, 0.95, 0.0245, 350.0, 60.0, 1).is_err());
        assert!(g2_explorer(false, 400.0, 0.0, 0.0245, 350.0, 1.0, 1).is_err());
        assert!(g2_explorer(false, -1.0, 0.95, 0.0245, 350.0, 1.0, 1).is_err());
    }

    #[test]
    fn saturation_recovers_nominal_values() {
        let v = saturation_fit(0.0245, 1.0, 2000.0, 3).unwrap();
        assert_eq!(v.power_uw.len(), 14);
        assert!(
            (v.p_sat - 224.0).abs() < 4.0 * v.p_sat_sigma,
            "{} ± {}",
            v.p_sat,
            v.p_sat_sigma
        );
        assert!((v.efficiency - 0.0245).abs() < 0.001);
        assert!(saturation_fit(0.0245, 1.0, 10.0, 3).is_err());
    }

    #[test]
    fn spectrum_fit_finds_the_line() {
        let v = spectrum_fit(734.0, 4.1, 0.81, 20_000.0, 4).unwrap();
        assert!((v.center_nm - 734.0).abs() < 0.2);
        assert!((v.fwhm_nm / 4.1 - 1.0).abs() < 0.1);
        assert!((v.huang_rhys - 0.81).abs() < 0.03);
        assert_eq!(v.zpl_model.len(), v.wavelength_nm.len());
        assert!(spectrum_fit(734.0, 4.1, 1.5, 0.0, 4).is_err());
    }
}
