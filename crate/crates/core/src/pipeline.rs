//! Multi-run workflows: power sweeps simulated, correlated and fitted, and
//! saturation series.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::correlator::{coincidence_histogram, normalize_g2, CoincidenceHistogram, G2Curve};
use crate::emitter::{steady_state, EmitterModel, PumpPower};
use crate::error::{domain, Error, Result};
use crate::estimators::{
    classify_levels, fit_antibunching_irf, fit_kt_vs_power, fit_saturation, EmitterEstimate,
    FitFlag, FitResult, KtFit, KtPoint, LevelClassification, RatePoint,
};
use crate::sim::{simulate_run, Channel, DetectionChain, RunConfig};

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// One simulated acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub power_uw: f64,
    pub duration_s: f64,
    pub seed: u64,
}

/// Runs at each power with seeds `base_seed`, `base_seed + 1`, ...
pub fn sweep_specs(powers_uw: &[f64], durations_s: &[f64], base_seed: u64) -> Result<Vec<RunSpec>> {
    if durations_s.len() != 1 && durations_s.len() != powers_uw.len() {
        return domain(format!(
            "{} durations for {} powers; give one or one per power",
            durations_s.len(),
            powers_uw.len()
        ));
    }
    Ok(powers_uw
        .iter()
        .enumerate()
        .map(|(i, &p)| RunSpec {
            power_uw: p,
            duration_s: durations_s[if durations_s.len() == 1 { 0 } else { i }],
            seed: base_seed.wrapping_add(i as u64),
        })
        .collect())
}

/// Histogram bin width and one-sided window, ps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub bin_width_ps: u64,
    pub window_ps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedRun {
    pub spec: RunSpec,
    pub histogram: CoincidenceHistogram,
    pub curve: G2Curve,
}

impl CorrelatedRun {
    /// Clicks per second summed over both channels.
    pub fn detected_rate(&self) -> f64 {
        (self.histogram.n_a + self.histogram.n_b) as f64 * crate::PS_PER_S
            / self.histogram.duration_ps as f64
    }

    pub fn n_tags(&self) -> u64 {
        self.histogram.n_a + self.histogram.n_b
    }
}

/// Predicted clicks per second on both channels, before dead time.
pub fn predicted_rate(model: &EmitterModel, chain: &DetectionChain, power_uw: f64) -> Result<f64> {
    chain.validate()?;
    let ss = steady_state(model, PumpPower::new(power_uw)?, chain.efficiency)?;
    Ok(ss.detected_rate + 2.0 * (chain.dark_rate + chain.background_rate))
}

/// Shortest duration expected to yield `tags` clicks at `power_uw`.
pub fn duration_for_tags(
    model: &EmitterModel,
    chain: &DetectionChain,
    power_uw: f64,
    tags: u64,
) -> Result<f64> {
    let rate = predicted_rate(model, chain, power_uw)?;
    if !(rate > 0.0) {
        return domain("predicted click rate is zero");
    }
    Ok(tags as f64 / rate)
}

pub fn simulate_and_correlate(
    model: &EmitterModel,
    chain: &DetectionChain,
    spec: &RunSpec,
    geometry: Geometry,
) -> Result<CorrelatedRun> {
    let run = RunConfig::new(spec.duration_s, spec.seed, PumpPower::new(spec.power_uw)?)?;
    let stream = simulate_run(model, chain, &run)?;
    if stream.count(Channel::A) == 0 || stream.count(Channel::B) == 0 {
        return domain(format!(
            "run at {} μW produced an empty channel",
            spec.power_uw
        ));
    }
    let histogram = coincidence_histogram(&stream, geometry.bin_width_ps, geometry.window_ps)?;
    let curve = normalize_g2(&histogram)?;
    Ok(CorrelatedRun {
        spec: spec.clone(),
        histogram,
        curve,
    })
}

/// Every run of a sweep, executed concurrently; results keep the order of
/// `specs`.
pub fn simulate_sweep(
    model: &EmitterModel,
    chain: &DetectionChain,
    specs: &[RunSpec],
    geometry: Geometry,
) -> Result<Vec<CorrelatedRun>> {
    chain.validate()?;
    par_map(specs, |s| simulate_and_correlate(model, chain, s, geometry))
        .into_iter()
        .collect()
}

/// Antibunching fit of one sweep entry; failures are kept as messages.
#[derive(Debug, Clone)]
pub struct KtEntry {
    pub power_uw: f64,
    pub fit: std::result::Result<FitResult, String>,
}

impl KtEntry {
    /// Usable for the k_T(P) line: converged and showing a dip.
    pub fn usable(&self) -> Option<&FitResult> {
        self.fit
            .as_ref()
            .ok()
            .filter(|f| f.converged && !f.has_flag(FitFlag::NoAntibunching))
    }
}

#[derive(Debug, Clone)]
pub struct KtSweepAnalysis {
    pub entries: Vec<KtEntry>,
    pub kt: Option<KtFit>,
    pub classification: Option<LevelClassification>,
    pub estimate: EmitterEstimate,
}

/// σ of k21/κ by first-order propagation, including the intercept–slope
/// covariance.
pub fn saturation_power_sigma(kt: &KtFit) -> f64 {
    let (k, s) = (kt.fit.values[0], kt.fit.values[1]);
    let c = &kt.fit.covariance;
    let p = k / s;
    let var = p * p * (c[(0, 0)] / (k * k) + c[(1, 1)] / (s * s) - 2.0 * c[(0, 1)] / (k * s));
    var.max(0.0).sqrt()
}

/// Fits every curve, then the k_T(P) line, then classifies the level scheme.
/// `irf_sigma_ps` is the timing response on the delay axis (0 for none).
///
/// Fails only when no curve could be fitted at all.
pub fn analyze_kt_sweep(
    curves: &[(f64, G2Curve)],
    fix_rho: Option<f64>,
    irf_sigma_ps: f64,
) -> Result<KtSweepAnalysis> {
    if curves.is_empty() {
        return domain("no curves to analyze");
    }
    let mut order: Vec<usize> = (0..curves.len()).collect();
    order.sort_by(|&i, &j| curves[i].0.total_cmp(&curves[j].0));
    if order.windows(2).any(|w| curves[w[0]].0 == curves[w[1]].0) {
        return domain("each power may appear only once");
    }
    let sorted: Vec<&(f64, G2Curve)> = order.iter().map(|&i| &curves[i]).collect();
    let entries: Vec<KtEntry> = par_map(&sorted, |(p, c)| KtEntry {
        power_uw: *p,
        fit: fit_antibunching_irf(c, fix_rho, irf_sigma_ps).map_err(|e| e.to_string()),
    });
    if entries.iter().all(|e| e.fit.is_err()) {
        return Err(Error::Fit("every antibunching fit failed".into()));
    }

    let points: Vec<KtPoint> = entries
        .iter()
        .filter_map(|e| {
            e.usable().map(|f| KtPoint {
                power_uw: e.power_uw,
                k_t: f.get("k_T").expect("k_T"),
                sigma: f.sigma("k_T").expect("k_T"),
            })
        })
        .filter(|p| p.sigma > 0.0)
        .collect();
    let kt = fit_kt_vs_power(&points).ok();

    let mut estimate = EmitterEstimate::default();
    if let Some(first) = entries.iter().find_map(|e| e.usable()) {
        let rho2 = first.get("rho2").expect("rho2");
        estimate.g2_0 = Some((1.0 - rho2, first.sigma("rho2").expect("rho2")));
    }
    let mut classification = None;
    if let Some(k) = kt
        .as_ref()
        .filter(|k| !k.fit.has_flag(FitFlag::UnphysicalIntercept))
    {
        let (k21, kappa) = (k.fit.values[0], k.fit.values[1]);
        estimate.k21 = Some((k21, k.fit.sigma("k21").expect("k21")));
        estimate.kappa = Some((kappa, k.fit.sigma("kappa").expect("kappa")));
        estimate.lifetime_s = Some((k.lifetime, k.lifetime_sigma));
        if kappa > 0.0 {
            let p_sat = k.saturation_power();
            estimate.p_sat_uw = Some((p_sat, saturation_power_sigma(k)));
            let refs: Vec<(f64, &G2Curve)> = sorted.iter().map(|(p, c)| (*p, c)).collect();
            classification = classify_levels(&refs, p_sat).ok();
            estimate.classification = classification.as_ref().map(|c| c.verdict);
        }
    }
    Ok(KtSweepAnalysis {
        entries,
        kt,
        classification,
        estimate,
    })
}

/// Saturation fit of a rate series, reported as I_sat, P_sat and the peak rate.
pub fn analyze_saturation(points: &[RatePoint]) -> Result<(FitResult, EmitterEstimate)> {
    let fit = fit_saturation(points)?;
    let estimate = EmitterEstimate {
        i_sat: Some((fit.values[0], fit.sigma("i_sat").expect("i_sat"))),
        p_sat_uw: Some((fit.values[1], fit.sigma("p_sat").expect("p_sat"))),
        peak_rate_cps: points.iter().map(|p| p.rate).reduce(f64::max),
        ..Default::default()
    };
    Ok((fit, estimate))
}

/// Steady-state detected rates at each power, with the shot-noise σ of a
/// `dwell_s` acquisition.
pub fn saturation_points(
    model: &EmitterModel,
    efficiency: f64,
    powers_uw: &[f64],
    dwell_s: f64,
) -> Result<Vec<RatePoint>> {
    if !(dwell_s > 0.0) {
        return domain("dwell time must be > 0");
    }
    powers_uw
        .iter()
        .map(|&p| {
            let rate = steady_state(model, PumpPower::new(p)?, efficiency)?.detected_rate;
            Ok(RatePoint {
                power_uw: p,
                rate,
                sigma: (rate / dwell_s).sqrt().max(1.0 / dwell_s),
            })
        })
        .collect()
}

/// As [`saturation_points`], with each rate replaced by a Poisson count over
/// `dwell_s` divided by the dwell.
pub fn noisy_saturation_points(
    model: &EmitterModel,
    efficiency: f64,
    powers_uw: &[f64],
    dwell_s: f64,
    seed: u64,
) -> Result<Vec<RatePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    saturation_points(model, efficiency, powers_uw, dwell_s)?
        .into_iter()
        .map(|p| {
            let mean = p.rate * dwell_s;
            let n = if mean > 0.0 {
                Poisson::new(mean)
                    .map_err(|e| Error::Domain(e.to_string()))?
                    .sample(&mut rng)
            } else {
                0.0
            };
            Ok(RatePoint {
                power_uw: p.power_uw,
                rate: n / dwell_s,
                sigma: n.max(1.0).sqrt() / dwell_s,
            })
        })
        .collect()
}
