//! Estimators for the quantities reported about a single-photon emitter.
//!
//! * [`fit_antibunching`]: k_T and signal fraction ρ from one g²(τ) curve
//! * [`fit_kt_vs_power`]: linear k_T(P) whose intercept is k21 = 1/τ₂
//! * [`fit_saturation`]: I(P) = I_sat·P/(P_sat + P)
//! * [`collection_efficiency`]: detected rate over the saturated emission rate
//! * [`classify_levels`]: bunching test separating two- from three-level schemes

use std::fmt;

use nalgebra::DMatrix;

use crate::correlator::G2Curve;
use crate::emitter::saturation_law;
use crate::error::{domain, Error, Result};
use crate::lm::{levenberg_marquardt, LmOptions, LmOutcome, Model};

/// Conditions attached to a fit result instead of failing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFlag {
    NotConverged,
    /// min g² above 0.8; the curve shows no usable dip.
    NoAntibunching,
    /// Curve does not reach 3/k_T.
    WindowTooShort,
    /// Line through only two points.
    TwoPointLine,
    /// k_T(P) intercept ≤ 0, no physical lifetime.
    UnphysicalIntercept,
}

impl fmt::Display for FitFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FitFlag::NotConverged => "not-converged",
            FitFlag::NoAntibunching => "no-antibunching",
            FitFlag::WindowTooShort => "window-too-short",
            FitFlag::TwoPointLine => "two-point-line",
            FitFlag::UnphysicalIntercept => "unphysical-intercept",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub reduced_chi2: f64,
    pub n_iter: usize,
    pub converged: bool,
    pub flags: Vec<FitFlag>,
}

impl FitResult {
    fn from_lm(names: Vec<&'static str>, out: LmOutcome) -> Self {
        let mut flags = Vec::new();
        if !out.converged {
            flags.push(FitFlag::NotConverged);
        }
        Self {
            names,
            reduced_chi2: out.reduced_chi2(),
            values: out.params,
            covariance: out.covariance,
            n_iter: out.n_iter,
            converged: out.converged,
            flags,
        }
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.values[i])
    }

    /// One-standard-error uncertainty of `name` from the covariance diagonal.
    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.index(name)
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
    }

    pub fn has_flag(&self, flag: FitFlag) -> bool {
        self.flags.contains(&flag)
    }
}

fn tau_seconds(curve: &G2Curve) -> Vec<f64> {
    curve.tau_ps.iter().map(|t| t * 1e-12).collect()
}

fn check_curve(curve: &G2Curve) -> Result<()> {
    if curve.tau_ps.len() != curve.g2.len() || curve.g2.len() != curve.sigma.len() {
        return Err(Error::Fit("g² curve columns have different lengths".into()));
    }
    if curve.len() < 10 {
        return Err(Error::Fit(format!(
            "need at least 10 bins, got {}",
            curve.len()
        )));
    }
    if curve.sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Fit("all σ must be > 0".into()));
    }
    Ok(())
}

/// 1 − ρ²·h(τ), parameters [k_T, ρ²] or [k_T] with ρ² fixed. h is
/// exp(−k_T|τ|), convolved with a Gaussian instrument response of width
/// `irf_s` when that is nonzero.
struct AntibunchingModel {
    fixed_rho2: Option<f64>,
    irf_s: f64,
}

/// e^(u²)·erfc(u) for u ≥ 0.
fn erfcx(u: f64) -> f64 {
    if u < 25.0 {
        (u * u).exp() * libm::erfc(u)
    } else {
        let inv = 1.0 / (u * u);
        (1.0 - 0.5 * inv + 0.75 * inv * inv) / (u * std::f64::consts::PI.sqrt())
    }
}

/// exp(−k|τ|) convolved with a unit-area Gaussian of standard deviation s.
pub fn exp_gauss_conv(tau: f64, k: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return (-k * tau.abs()).exp();
    }
    let gauss = (-tau * tau / (2.0 * s * s)).exp();
    let half = |sign: f64| {
        // ½·e^(k²s²/2 ∓ kτ)·erfc((ks² ∓ τ)/(s√2))
        let u = (k * s * s - sign * tau) / (s * std::f64::consts::SQRT_2);
        if u >= 0.0 {
            0.5 * gauss * erfcx(u)
        } else {
            0.5 * (0.5 * k * k * s * s - sign * k * tau).exp() * libm::erfc(u)
        }
    };
    half(1.0) + half(-1.0)
}

impl Model for AntibunchingModel {
    fn n_params(&self) -> usize {
        if self.fixed_rho2.is_some() {
            1
        } else {
            2
        }
    }

    fn eval(&self, tau: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let rho2 = self.fixed_rho2.unwrap_or_else(|| p[1]);
        let (h, dh_dk) = if self.irf_s > 0.0 {
            let dk = 1e-6 * p[0];
            let h = exp_gauss_conv(tau, p[0], self.irf_s);
            let up = exp_gauss_conv(tau, p[0] + dk, self.irf_s);
            let down = exp_gauss_conv(tau, p[0] - dk, self.irf_s);
            (h, (up - down) / (2.0 * dk))
        } else {
            let t = tau.abs();
            let e = (-p[0] * t).exp();
            (e, -t * e)
        };
        grad[0] = -rho2 * dh_dk;
        if self.fixed_rho2.is_none() {
            grad[1] = -h;
        }
        1.0 - rho2 * h
    }

    fn feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && (self.fixed_rho2.is_some() || (0.0..=2.0).contains(&p[1]))
    }
}

/// Fit with each bin's σ iterated to the model's Poisson variance.
///
/// Fitted antibunching curve 1 − ρ²·h(τ) at a delay in ps.
pub fn antibunching_g2(tau_ps: f64, k_t: f64, rho2: f64, irf_sigma_ps: f64) -> f64 {
    1.0 - rho2 * exp_gauss_conv(tau_ps * 1e-12, k_t, irf_sigma_ps * 1e-12)
}

/// A curve's σ fixes the counts-to-g² scale s of its bins (σ² = c·s², and
/// σ = s for an empty bin). Weighting by observed counts pulls fits toward
/// bins that fluctuated low, which matters in a sparsely filled dip; the
/// fixed point of this reweighting is the Poisson maximum-likelihood fit.
fn poisson_weighted_fit<M: Model>(
    model: &M,
    xs: &[f64],
    curve: &G2Curve,
    p0: &[f64],
) -> Result<LmOutcome> {
    let opts = LmOptions::default();
    let scale: Vec<f64> = curve
        .g2
        .iter()
        .zip(&curve.sigma)
        .map(|(&g, &s)| if g > 0.0 { s * s / g } else { s })
        .collect();
    let mut out = levenberg_marquardt(model, xs, &curve.g2, &curve.sigma, p0, &opts)?;
    let mut grad = vec![0.0; p0.len()];
    for _ in 0..20 {
        let sigma: Vec<f64> = xs
            .iter()
            .zip(&scale)
            .map(|(&x, &sc)| {
                (model.eval(x, &out.params, &mut grad) * sc)
                    .max(sc * sc)
                    .sqrt()
            })
            .collect();
        let next = levenberg_marquardt(model, xs, &curve.g2, &sigma, &out.params, &opts)?;
        let settled = next
            .params
            .iter()
            .zip(&out.params)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1e-300));
        out = next;
        if settled {
            break;
        }
    }
    Ok(out)
}

/// Initial (k_T, ρ²) from the dip depth and the delay at which the curve
/// first recovers to 1 − (1 − g²_min)/e.
fn antibunching_guess(curve: &G2Curve) -> (f64, f64) {
    let g_min = curve.min_g2();
    let rho2 = (1.0 - g_min).clamp(0.05, 1.0);
    let target = 1.0 - (1.0 - g_min) / std::f64::consts::E;
    let mut order: Vec<usize> = (0..curve.len()).collect();
    order.sort_by(|&i, &j| curve.tau_ps[i].abs().total_cmp(&curve.tau_ps[j].abs()));
    let i_min = (0..curve.len())
        .min_by(|&i, &j| curve.g2[i].total_cmp(&curve.g2[j]))
        .unwrap_or(0);
    let tau_min = curve.tau_ps[i_min].abs();
    let crossing = order
        .iter()
        .map(|&i| (curve.tau_ps[i].abs(), curve.g2[i]))
        .find(|&(t, g)| t > tau_min && g >= target)
        .map(|(t, _)| t);
    let bin = curve
        .tau_ps
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min)
        .max(1.0);
    let tau_e = crossing
        .unwrap_or(curve.max_abs_tau_ps() / 3.0)
        .max(bin / 2.0);
    (1.0 / (tau_e * 1e-12), rho2)
}

/// Weighted fit of 1 − ρ²·exp(−k_T|τ|) to a g² curve.
///
/// With `fix_rho = Some(ρ)` only k_T is fitted. Returned parameters are
/// `k_T` (s⁻¹), `rho2` and `rho`; `rho` has the delta-method σ.
pub fn fit_antibunching(curve: &G2Curve, fix_rho: Option<f64>) -> Result<FitResult> {
    fit_antibunching_irf(curve, fix_rho, 0.0)
}

/// [`fit_antibunching`] with the model convolved with a Gaussian timing
/// response of standard deviation `irf_sigma_ps` on the delay axis. For two
/// detectors with independent click jitter σ_j this is σ_j·√2.
pub fn fit_antibunching_irf(
    curve: &G2Curve,
    fix_rho: Option<f64>,
    irf_sigma_ps: f64,
) -> Result<FitResult> {
    check_curve(curve)?;
    if !(irf_sigma_ps >= 0.0) || !irf_sigma_ps.is_finite() {
        return domain(format!(
            "instrument response σ must be finite and >= 0, got {irf_sigma_ps}"
        ));
    }
    if let Some(r) = fix_rho {
        if !(0.0..=1.0).contains(&r) {
            return domain(format!("fixed ρ must lie in [0, 1], got {r}"));
        }
    }
    let (kt0, rho2_0) = antibunching_guess(curve);
    let model = AntibunchingModel {
        fixed_rho2: fix_rho.map(|r| r * r),
        irf_s: irf_sigma_ps * 1e-12,
    };
    let xs = tau_seconds(curve);
    let p0: Vec<f64> = match fix_rho {
        Some(_) => vec![kt0],
        None => vec![kt0, rho2_0],
    };
    let out = poisson_weighted_fit(&model, &xs, curve, &p0)?;

    let kt = out.params[0];
    let rho2 = match fix_rho {
        Some(r) => r * r,
        None => out.params[1],
    };
    let rho = rho2.max(0.0).sqrt();
    // (k_T, ρ²) → (k_T, ρ², ρ) with dρ/dρ² = 1/(2ρ)
    let m = out.params.len();
    let jac = DMatrix::from_fn(3, m, |i, j| match (i, j) {
        (0, 0) | (1, 1) => 1.0,
        (2, 1) if rho > 0.0 => 0.5 / rho,
        _ => 0.0,
    });
    let covariance = &jac * &out.covariance * jac.transpose();
    let mut result = FitResult::from_lm(vec!["k_T", "rho2", "rho"], out);
    result.values = vec![kt, rho2, rho];
    result.covariance = covariance;
    if curve.min_g2() > 0.8 {
        result.flags.push(FitFlag::NoAntibunching);
    }
    if curve.max_abs_tau_ps() * 1e-12 < 3.0 / kt {
        result.flags.push(FitFlag::WindowTooShort);
    }
    Ok(result)
}

/// k_T measured at one pump power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtPoint {
    pub power_uw: f64,
    pub k_t: f64,
    pub sigma: f64,
}

/// Straight-line fit k_T = k21 + κ·P.
#[derive(Debug, Clone, PartialEq)]
pub struct KtFit {
    /// Parameters `k21` (intercept, s⁻¹) and `kappa` (slope, s⁻¹/μW).
    pub fit: FitResult,
    /// 1/k21 in seconds.
    pub lifetime: f64,
    /// Delta-method σ of the lifetime.
    pub lifetime_sigma: f64,
}

impl KtFit {
    /// k21/κ, the power at which k12 = k21.
    pub fn saturation_power(&self) -> f64 {
        self.fit.values[0] / self.fit.values[1]
    }
}

/// Weighted least-squares line through k_T(P).
pub fn fit_kt_vs_power(points: &[KtPoint]) -> Result<KtFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 powers, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| !(w[1].power_uw > w[0].power_uw)) {
        return domain("powers must be strictly increasing");
    }
    if points.iter().any(|p| !(p.sigma > 0.0)) {
        return Err(Error::Fit("all σ must be > 0".into()));
    }
    let w: Vec<f64> = points.iter().map(|p| 1.0 / (p.sigma * p.sigma)).collect();
    let sw: f64 = w.iter().sum();
    let x_bar = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * p.power_uw)
        .sum::<f64>()
        / sw;
    let y_bar = points.iter().zip(&w).map(|(p, w)| w * p.k_t).sum::<f64>() / sw;
    let sxx: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.power_uw - x_bar).powi(2))
        .sum();
    let sxy: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.power_uw - x_bar) * (p.k_t - y_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let var_slope = 1.0 / sxx;
    let var_intercept = 1.0 / sw + x_bar * x_bar / sxx;
    let cov = -x_bar / sxx;
    let chi2: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.k_t - intercept - slope * p.power_uw).powi(2))
        .sum();
    let dof = points.len() - 2;
    let mut flags = Vec::new();
    if points.len() == 2 {
        flags.push(FitFlag::TwoPointLine);
    }
    if intercept <= 0.0 {
        flags.push(FitFlag::UnphysicalIntercept);
    }
    let fit = FitResult {
        names: vec!["k21", "kappa"],
        values: vec![intercept, slope],
        covariance: DMatrix::from_row_slice(2, 2, &[var_intercept, cov, cov, var_slope]),
        reduced_chi2: if dof > 0 { chi2 / dof as f64 } else { 0.0 },
        n_iter: 1,
        converged: true,
        flags,
    };
    Ok(KtFit {
        lifetime: 1.0 / intercept,
        lifetime_sigma: var_intercept.sqrt() / (intercept * intercept),
        fit,
    })
}

/// Detected count rate at one pump power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub power_uw: f64,
    pub rate: f64,
    pub sigma: f64,
}

struct SaturationModel;

impl Model for SaturationModel {
    fn n_params(&self) -> usize {
        2
    }

    fn eval(&self, power: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let denom = p[1] + power;
        grad[0] = power / denom;
        grad[1] = -p[0] * power / (denom * denom);
        saturation_law(power, p[0], p[1])
    }

    fn feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[1] > 0.0
    }
}

/// Weighted fit of I_sat·P/(P_sat + P); parameters `i_sat` and `p_sat`.
///
/// Starts from I_sat = 2·max(rate) and P_sat at the interpolated power where
/// the data cross max(rate)/2.
pub fn fit_saturation(points: &[RatePoint]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|p| !(p.power_uw >= 0.0) || !(p.sigma > 0.0))
    {
        return domain("powers must be >= 0 and σ > 0");
    }
    let max_rate = points
        .iter()
        .map(|p| p.rate)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_rate > 0.0) {
        return Err(Error::Fit("no positive rates".into()));
    }
    let i0 = 2.0 * max_rate;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.power_uw.total_cmp(&b.power_uw));
    let half = max_rate / 2.0;
    let p0 = sorted
        .windows(2)
        .find(|w| w[0].rate < half && w[1].rate >= half)
        .map(|w| {
            let f = (half - w[0].rate) / (w[1].rate - w[0].rate);
            w[0].power_uw + f * (w[1].power_uw - w[0].power_uw)
        })
        .unwrap_or(sorted[sorted.len() / 2].power_uw)
        .max(1e-9);
    if !points.iter().any(|p| p.power_uw > p0) {
        return domain("no point above the initial saturation-power guess");
    }
    let xs: Vec<f64> = points.iter().map(|p| p.power_uw).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.rate).collect();
    let sig: Vec<f64> = points.iter().map(|p| p.sigma).collect();
    let out = levenberg_marquardt(
        &SaturationModel,
        &xs,
        &ys,
        &sig,
        &[i0, p0],
        &LmOptions::default(),
    )?;
    Ok(FitResult::from_lm(vec!["i_sat", "p_sat"], out))
}

/// η = detected / k21, taking a fully saturated two-level emitter to emit at k21.
pub fn collection_efficiency(detected_rate: f64, k21: f64) -> Result<f64> {
    if !(detected_rate > 0.0 && k21 > 0.0) {
        return domain("detected rate and k21 must be > 0");
    }
    if detected_rate > k21 {
        return domain(format!(
            "detected rate {detected_rate} exceeds the emission rate {k21}"
        ));
    }
    Ok(detected_rate / k21)
}

/// 1 − ρ²[(1+a)·e^(−k1|τ|) − a·e^(−k2|τ|)]; parameters [k1, ρ², a] at fixed k2
/// or [k1, ρ², a, k2].
struct BunchingModel {
    fixed_k2: Option<f64>,
}

impl Model for BunchingModel {
    fn n_params(&self) -> usize {
        if self.fixed_k2.is_some() {
            3
        } else {
            4
        }
    }

    fn eval(&self, tau: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let t = tau.abs();
        let (k1, rho2, a) = (p[0], p[1], p[2]);
        let k2 = self.fixed_k2.unwrap_or_else(|| p[3]);
        let e1 = (-k1 * t).exp();
        let e2 = (-k2 * t).exp();
        let shape = (1.0 + a) * e1 - a * e2;
        grad[0] = rho2 * (1.0 + a) * t * e1;
        grad[1] = -shape;
        grad[2] = -rho2 * (e1 - e2);
        if self.fixed_k2.is_none() {
            grad[3] = -rho2 * a * t * e2;
        }
        1.0 - rho2 * shape
    }

    fn feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0
            && (0.0..=2.0).contains(&p[1])
            && p[2] > -1.0
            && self
                .fixed_k2
                .map_or(p.get(3).is_some_and(|&k2| k2 > 0.0 && k2 < p[0]), |_| true)
    }
}

fn bunching_model_max(p: &[f64], k2: f64, tau_max: f64) -> f64 {
    let model = BunchingModel { fixed_k2: Some(k2) };
    let mut grad = [0.0; 3];
    (0..=4000)
        .map(|i| model.eval(tau_max * i as f64 / 4000.0, &p[..3], &mut grad))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TwoLevel,
    ThreeLevel,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::TwoLevel => "two-level",
            Classification::ThreeLevel => "three-level",
            Classification::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of fitting the bunching model to the highest-power curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BunchingFit {
    /// Parameters `k1`, `rho2`, `a`, `k2`.
    pub fit: FitResult,
    /// σ of the bunching amplitude `a`.
    pub amplitude_sigma: f64,
    /// Largest modeled g² over the sampled delay range.
    pub max_model_g2: f64,
    /// max_model_g2 − 1 divided by its delta-method σ.
    pub excess_sigma: f64,
}

impl BunchingFit {
    pub fn amplitude(&self) -> f64 {
        self.fit.values[2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelClassification {
    pub verdict: Classification,
    pub power_uw: Option<f64>,
    pub two_level: Option<FitResult>,
    pub bunching: Option<BunchingFit>,
}

/// Fits the bunching model 1 − ρ²[(1+a)e^(−k1|τ|) − a·e^(−k2|τ|)] with k2 < k1.
///
/// Both rates are first scanned on a log grid, where the model is linear in
/// (ρ², ρ²·a) and solved directly. The best grid point seeds a fit at fixed
/// k2 and then a joint refinement.
pub fn fit_bunching(curve: &G2Curve) -> Result<BunchingFit> {
    check_curve(curve)?;
    let xs = tau_seconds(curve);
    let tau_max = curve.max_abs_tau_ps() * 1e-12;
    let bin = curve
        .tau_ps
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min)
        * 1e-12;
    let k_lo = 0.1 / tau_max;
    let k_hi = 2.0 / bin;
    if !(k_hi > 20.0 * k_lo) {
        return Err(Error::Fit(
            "delay range too short to resolve a slow mode".into(),
        ));
    }
    let w: Vec<f64> = curve.sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let y: Vec<f64> = curve.g2.iter().map(|g| g - 1.0).collect();
    let syy: f64 = y.iter().zip(&w).map(|(y, w)| w * y * y).sum();
    let log_grid = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    };
    // (χ², k1, k2, ρ², a)
    let mut best: Option<(f64, f64, f64, f64, f64)> = None;
    for k1 in log_grid(10.0 * k_lo, k_hi, 60) {
        let e1: Vec<f64> = xs.iter().map(|t| (-k1 * t.abs()).exp()).collect();
        for k2 in log_grid(k_lo, k1 / 2.0, 40) {
            let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..xs.len() {
                let u = e1[i];
                let v = u - (-k2 * xs[i].abs()).exp();
                suu += w[i] * u * u;
                suv += w[i] * u * v;
                svv += w[i] * v * v;
                suy += w[i] * u * y[i];
                svy += w[i] * v * y[i];
            }
            // y ≈ −ρ²·u − b·v with b = ρ²·a
            let det = suu * svv - suv * suv;
            if !(det > 0.0) {
                continue;
            }
            let rho2 = -(svv * suy - suv * svy) / det;
            let b = -(suu * svy - suv * suy) / det;
            if !(rho2 > 0.0 && rho2 <= 2.0) || b / rho2 <= -1.0 {
                continue;
            }
            let chi2 = syy
                + 2.0 * rho2 * suy
                + 2.0 * b * svy
                + rho2 * rho2 * suu
                + 2.0 * rho2 * b * suv
                + b * b * svv;
            if best.is_none_or(|bst| chi2 < bst.0) {
                best = Some((chi2, k1, k2, rho2, b / rho2));
            }
        }
    }
    let (_, k1_0, k2_best, rho2_0, a_0) =
        best.ok_or_else(|| Error::Fit("no admissible bunching parameters on the grid".into()))?;
    let cond = poisson_weighted_fit(
        &BunchingModel {
            fixed_k2: Some(k2_best),
        },
        &xs,
        curve,
        &[k1_0, rho2_0, a_0],
    )?;

    let full = poisson_weighted_fit(
        &BunchingModel { fixed_k2: None },
        &xs,
        curve,
        &[cond.params[0], cond.params[1], cond.params[2], k2_best],
    )
    .ok()
    .filter(|f| f.converged && f.sigma(2).is_finite() && f.sigma(3).is_finite());

    let (fit, k2) = match full {
        Some(f) => {
            let k2 = f.params[3];
            (FitResult::from_lm(vec!["k1", "rho2", "a", "k2"], f), k2)
        }
        None => {
            let mut cov = DMatrix::zeros(4, 4);
            cov.view_mut((0, 0), (3, 3)).copy_from(&cond.covariance);
            let mut r = FitResult::from_lm(vec!["k1", "rho2", "a"], cond.clone());
            r.names.push("k2");
            r.values.push(k2_best);
            r.covariance = cov;
            (r, k2_best)
        }
    };
    let amplitude_sigma = fit.covariance[(2, 2)].max(0.0).sqrt();
    let max_model_g2 = bunching_model_max(&fit.values, k2, tau_max);

    // σ of the modeled maximum by finite-difference propagation through (k1, ρ², a, k2).
    let mut jac = [0.0; 4];
    for (j, slot) in jac.iter_mut().enumerate() {
        let h = 1e-6 * fit.values[j].abs().max(1e-6);
        let mut p = fit.values.clone();
        p[j] += h;
        let up = bunching_model_max(&p, p[3], tau_max);
        p[j] -= 2.0 * h;
        let down = bunching_model_max(&p, p[3], tau_max);
        *slot = (up - down) / (2.0 * h);
    }
    let mut var = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            var += jac[i] * fit.covariance[(i, j)] * jac[j];
        }
    }
    let excess_sigma = if var > 0.0 {
        (max_model_g2 - 1.0) / var.sqrt()
    } else {
        0.0
    };
    Ok(BunchingFit {
        fit,
        amplitude_sigma,
        max_model_g2,
        excess_sigma,
    })
}

/// Decides between two- and three-level kinetics from a power series of g²
/// curves.
///
/// Needs at least two powers, one of them ≥ 2·P_sat. The highest-power curve
/// is fitted with both models; a modeled maximum g² above 1.05 that exceeds 1
/// by more than 3σ indicates a shelving level.
pub fn classify_levels(curves: &[(f64, &G2Curve)], p_sat_uw: f64) -> Result<LevelClassification> {
    let inconclusive = LevelClassification {
        verdict: Classification::Inconclusive,
        power_uw: None,
        two_level: None,
        bunching: None,
    };
    if curves.len() < 2 {
        return Ok(inconclusive);
    }
    let Some(&(power, curve)) = curves.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
        return Ok(inconclusive);
    };
    if power < 2.0 * p_sat_uw {
        return Ok(inconclusive);
    }
    let two_level = fit_antibunching(curve, None)?;
    let bunching = fit_bunching(curve)?;
    let three = bunching.excess_sigma > 3.0 && bunching.max_model_g2 > 1.05;
    Ok(LevelClassification {
        verdict: if three {
            Classification::ThreeLevel
        } else {
            Classification::TwoLevel
        },
        power_uw: Some(power),
        two_level: Some(two_level),
        bunching: Some(bunching),
    })
}

/// Everything reported about one emitter. Fields an analysis did not reach
/// stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmitterEstimate {
    pub lifetime_s: Option<(f64, f64)>,
    pub k21: Option<(f64, f64)>,
    pub kappa: Option<(f64, f64)>,
    pub i_sat: Option<(f64, f64)>,
    pub p_sat_uw: Option<(f64, f64)>,
    /// Highest detected rate in a saturation series, counts/s.
    pub peak_rate_cps: Option<f64>,
    /// Highest measured rate over k21.
    pub eta_detected: Option<f64>,
    /// I_sat over k21.
    pub eta_saturated: Option<f64>,
    pub g2_0: Option<(f64, f64)>,
    pub classification: Option<Classification>,
}

impl EmitterEstimate {
    /// `key = value` lines; value and σ are space separated.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let mut pair = |key: &str, v: Option<(f64, f64)>| {
            if let Some((v, s)) = v {
                out.push_str(&format!("{key} = {v:.6e} {s:.3e}\n"));
            }
        };
        pair("lifetime_s", self.lifetime_s);
        pair("k21_per_s", self.k21);
        pair("kappa_per_s_per_uW", self.kappa);
        pair("i_sat_cps", self.i_sat);
        pair("p_sat_uW", self.p_sat_uw);
        pair("g2_0", self.g2_0);
        if let Some(v) = self.peak_rate_cps {
            out.push_str(&format!("peak_rate_cps = {v:.6e}\n"));
        }
        if let Some(v) = self.eta_detected {
            out.push_str(&format!("eta_detected = {v:.6e}\n"));
        }
        if let Some(v) = self.eta_saturated {
            out.push_str(&format!("eta_saturated = {v:.6e}\n"));
        }
        if let Some(c) = self.classification {
            out.push_str(&format!("classification = {c}\n"));
        }
        out
    }

    /// Inverse of [`to_report`](Self::to_report); unknown keys are ignored.
    pub fn from_report(text: &str) -> Result<Self> {
        let mut est = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Domain(format!(
                    "line {}: expected key = value",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let mut nums = value.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Domain(format!("line {}: bad number", lineno + 1)))
            };
            match key {
                "classification" => {
                    est.classification = Some(match value.trim() {
                        "two-level" => Classification::TwoLevel,
                        "three-level" => Classification::ThreeLevel,
                        _ => Classification::Inconclusive,
                    })
                }
                "peak_rate_cps" => est.peak_rate_cps = Some(parse(nums.next())?),
                "eta_detected" => est.eta_detected = Some(parse(nums.next())?),
                "eta_saturated" => est.eta_saturated = Some(parse(nums.next())?),
                _ => {
                    let slot = match key {
                        "lifetime_s" => &mut est.lifetime_s,
                        "k21_per_s" => &mut est.k21,
                        "kappa_per_s_per_uW" => &mut est.kappa,
                        "i_sat_cps" => &mut est.i_sat,
                        "p_sat_uW" => &mut est.p_sat_uw,
                        "g2_0" => &mut est.g2_0,
                        _ => continue,
                    };
                    *slot = Some((parse(nums.next())?, parse(nums.next())?));
                }
            }
        }
        Ok(est)
    }

    /// Fills every field still `None` from `other`.
    pub fn merge(&mut self, other: &EmitterEstimate) {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f; } )* };
        }
        fill!(
            lifetime_s,
            k21,
            kappa,
            i_sat,
            p_sat_uw,
            peak_rate_cps,
            eta_detected,
            eta_saturated,
            g2_0,
            classification
        );
    }

    /// Derives both efficiency figures where k21 and the rates are known.
    pub fn derive_efficiencies(&mut self) {
        let Some((k21, _)) = self.k21 else {
            return;
        };
        if let Some(r) = self.peak_rate_cps {
            self.eta_detected = collection_efficiency(r, k21).ok();
        }
        if let Some((i, _)) = self.i_sat {
            self.eta_saturated = collection_efficiency(i, k21).ok();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emitter::g2_analytic_two_level;

    fn analytic_curve(kt: f64, rho: f64, n: usize, span_ps: f64) -> G2Curve {
        let tau_ps: Vec<f64> = (0..n)
            .map(|i| -span_ps / 2.0 + (i as f64 + 0.5) * span_ps / n as f64)
            .collect();
        let g2 = tau_ps
            .iter()
            .map(|t| g2_analytic_two_level(t * 1e-12, kt, 0.0, rho).unwrap())
            .collect();
        G2Curve {
            sigma: vec![0.01; n],
            tau_ps,
            g2,
        }
    }

    #[test]
    fn antibunching_noiseless_recovery() {
        let curve = analytic_curve(1e8, 1.0, 200, 100_000.0);
        let fit = fit_antibunching(&curve, None).unwrap();
        assert!(fit.converged);
        assert!((fit.get("k_T").unwrap() - 1e8).abs() / 1e8 < 1e-6);
        assert!((fit.get("rho").unwrap() - 1.0).abs() < 1e-6);
        let fixed = fit_antibunching(&curve, Some(1.0)).unwrap();
        assert!((fixed.get("k_T").unwrap() - 1e8).abs() / 1e8 < 1e-6);
    }

    #[test]
    fn convolved_exponential_matches_quadrature() {
        let (k, sd) = (4e8, 495e-12);
        for &tau in &[0.0, 2e-10, -7e-10, 3e-9, 2e-8] {
            // trapezoid over ±10σ of the Gaussian
            let n = 20_000;
            let h = 20.0 * sd / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let u = -10.0 * sd + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                let g =
                    (-u * u / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
                acc += w * g * (-k * (tau - u).abs()).exp();
            }
            let num = acc * h;
            assert!((exp_gauss_conv(tau, k, sd) - num).abs() < 1e-7, "{tau}");
        }
        assert_eq!(exp_gauss_conv(1e-9, 1e8, 0.0), (-0.1f64).exp());
        // far tail: the plain exponential scaled by e^(k²s²/2)
        let far =
            exp_gauss_conv(5e-8, k, sd) / ((-k * 5e-8f64).exp() * (0.5 * k * k * sd * sd).exp());
        assert!((far - 1.0).abs() < 1e-9);
    }

    #[test]
    fn irf_fit_removes_jitter_bias() {
        let (kt, sd_ps) = (4e8, 495.0);
        let n = 200;
        let tau_ps: Vec<f64> = (0..n)
            .map(|i| -50_000.0 + (i as f64 + 0.5) * 500.0)
            .collect();
        let g2: Vec<f64> = tau_ps
            .iter()
            .map(|t| 1.0 - 0.9 * exp_gauss_conv(t * 1e-12, kt, sd_ps * 1e-12))
            .collect();
        let curve = G2Curve {
            sigma: vec![0.01; n],
            tau_ps,
            g2,
        };
        let plain = fit_antibunching(&curve, None).unwrap();
        let irf = fit_antibunching_irf(&curve, None, sd_ps).unwrap();
        assert!((irf.get("k_T").unwrap() - kt).abs() / kt < 1e-6);
        assert!((irf.get("rho2").unwrap() - 0.9).abs() < 1e-6);
        assert!(plain.get("k_T").unwrap() < 0.97 * kt);
        assert!(fit_antibunching_irf(&curve, None, -1.0).is_err());
    }

    #[test]
    fn antibunching_background_floor() {
        let rho = 0.84f64.sqrt();
        let curve = analytic_curve(1.47e8, rho, 200, 200_000.0);
        let fit = fit_antibunching(&curve, None).unwrap();
        assert!((fit.get("rho2").unwrap() - 0.84).abs() < 1e-8);
        // forcing ρ = 1 on background-limited data biases k_T
        let forced = fit_antibunching(&curve, Some(1.0)).unwrap();
        assert!((forced.get("k_T").unwrap() - 1.47e8).abs() / 1.47e8 > 1e-3);
    }

    #[test]
    fn antibunching_flags() {
        let flat = analytic_curve(1e8, 0.3, 50, 100_000.0);
        let fit = fit_antibunching(&flat, None).unwrap();
        assert!(fit.has_flag(FitFlag::NoAntibunching));
        let short = analytic_curve(1e7, 1.0, 50, 20_000.0);
        let fit = fit_antibunching(&short, None).unwrap();
        assert!(fit.has_flag(FitFlag::WindowTooShort));
        let tiny = analytic_curve(1e8, 1.0, 5, 100_000.0);
        assert!(fit_antibunching(&tiny, None).is_err());
        assert!(fit_antibunching(&flat, Some(1.5)).is_err());
    }

    #[test]
    fn kt_line_exact() {
        let k21 = 1.0 / 13.6e-9;
        let kappa = 3.2825e5;
        let pts: Vec<KtPoint> = (1..=10)
            .map(|i| {
                let p = 100.0 * i as f64;
                KtPoint {
                    power_uw: p,
                    k_t: k21 + kappa * p,
                    sigma: 1e6,
                }
            })
            .collect();
        let fit = fit_kt_vs_power(&pts).unwrap();
        assert!((fit.fit.values[0] - k21).abs() / k21 < 1e-12);
        assert!((fit.fit.values[1] - kappa).abs() / kappa < 1e-12);
        assert!((fit.lifetime - 13.6e-9).abs() / 13.6e-9 < 1e-9);
        assert!(fit.fit.flags.is_empty());
        assert!(fit.lifetime_sigma > 0.0);
        assert!((fit.saturation_power() - k21 / kappa).abs() < 1e-6);
    }

    #[test]
    fn kt_line_edge_cases() {
        let two = [
            KtPoint {
                power_uw: 100.0,
                k_t: 2.0,
                sigma: 1.0,
            },
            KtPoint {
                power_uw: 200.0,
                k_t: 3.0,
                sigma: 1.0,
            },
        ];
        let fit = fit_kt_vs_power(&two).unwrap();
        assert!(fit.fit.has_flag(FitFlag::TwoPointLine));
        assert!((fit.fit.values[0] - 1.0).abs() < 1e-12);
        assert!((fit.fit.values[1] - 0.01).abs() < 1e-15);
        let neg = [
            KtPoint {
                power_uw: 100.0,
                k_t: 1.0,
                sigma: 1.0,
            },
            KtPoint {
                power_uw: 200.0,
                k_t: 3.0,
                sigma: 1.0,
            },
            KtPoint {
                power_uw: 300.0,
                k_t: 5.0,
                sigma: 1.0,
            },
        ];
        assert!(fit_kt_vs_power(&neg)
            .unwrap()
            .fit
            .has_flag(FitFlag::UnphysicalIntercept));
        assert!(fit_kt_vs_power(&two[..1]).is_err());
        let unsorted = [two[1], two[0]];
        assert!(fit_kt_vs_power(&unsorted).is_err());
    }

    #[test]
    fn saturation_noiseless_recovery() {
        let pts: Vec<RatePoint> = [25.0, 50.0, 100.0, 200.0, 300.0, 500.0, 700.0, 1000.0]
            .iter()
            .map(|&p| {
                let rate = saturation_law(p, 1.8e6, 224.0);
                RatePoint {
                    power_uw: p,
                    rate,
                    sigma: rate.sqrt(),
                }
            })
            .collect();
        let fit = fit_saturation(&pts).unwrap();
        assert!(fit.converged);
        assert!((fit.get("i_sat").unwrap() - 1.8e6).abs() / 1.8e6 < 1e-8);
        assert!((fit.get("p_sat").unwrap() - 224.0).abs() / 224.0 < 1e-8);
        assert_eq!(saturation_law(224.0, 1.8e6, 224.0) / 1.8e6, 0.5);
        assert!(fit_saturation(&pts[..2]).is_err());
    }

    #[test]
    fn efficiency_examples() {
        let eta = collection_efficiency(1.6e6, 7.3529e7).unwrap();
        assert!((eta - 0.02176).abs() < 1e-5);
        assert!((eta * 100.0 - 2.17).abs() < 0.01);
        assert_eq!(collection_efficiency(7.3529e7, 7.3529e7).unwrap(), 1.0);
        let alt = collection_efficiency(1.8e6, 7.3529e7).unwrap();
        assert!((alt - 0.0245).abs() < 1e-4);
        assert!(collection_efficiency(2.0, 1.0).is_err());
        assert!(collection_efficiency(0.0, 1.0).is_err());
    }

    #[test]
    fn bunching_fit_on_exact_three_level() {
        use crate::emitter::g2_analytic_three_level;
        let n = 400;
        let tau_ps: Vec<f64> = (0..n)
            .map(|i| -200_000.0 + (i as f64 + 0.5) * 1000.0)
            .collect();
        let g2: Vec<f64> = tau_ps
            .iter()
            .map(|t| g2_analytic_three_level(t * 1e-12, 3.28e8, 7.35e7, 5e6, 3e5, 1.0).unwrap())
            .collect();
        let curve = G2Curve {
            sigma: vec![0.05; n],
            tau_ps,
            g2,
        };
        let fit = fit_bunching(&curve).unwrap();
        let modes = crate::emitter::ThreeLevelModes::new(3.28e8, 7.35e7, 5e6, 3e5).unwrap();
        let (_, tau2, a) = modes.bunching_form().unwrap();
        assert!(
            (fit.amplitude() - a).abs() / a < 1e-4,
            "{} vs {a}",
            fit.amplitude()
        );
        assert!((fit.fit.get("k2").unwrap() * tau2 - 1.0).abs() < 1e-4);
        assert!(fit.max_model_g2 > 1.05);
        let curves = [(100.0, &curve), (1000.0, &curve)];
        let c = classify_levels(&curves, 224.0).unwrap();
        assert_eq!(c.verdict, Classification::ThreeLevel);
        assert_eq!(
            classify_levels(&curves[..1], 224.0).unwrap().verdict,
            Classification::Inconclusive
        );
        assert_eq!(
            classify_levels(&curves, 600.0).unwrap().verdict,
            Classification::Inconclusive
        );
    }

    #[test]
    fn classify_exact_two_level() {
        let curve = analytic_curve(4.02e8, 1.0, 400, 400_000.0);
        let c = classify_levels(&[(100.0, &curve), (1000.0, &curve)], 224.0).unwrap();
        assert_eq!(c.verdict, Classification::TwoLevel);
    }

    #[test]
    fn report_round_trip() {
        let est = EmitterEstimate {
            lifetime_s: Some((13.6e-9, 0.2e-9)),
            p_sat_uw: Some((224.0, 5.0)),
            eta_detected: Some(0.0217),
            classification: Some(Classification::TwoLevel),
            ..Default::default()
        };
        let text = est.to_report();
        assert!(text.contains("classification = two-level"));
        let back = EmitterEstimate::from_report(&text).unwrap();
        assert_eq!(back.classification, est.classification);
        assert!((back.lifetime_s.unwrap().0 - 13.6e-9).abs() < 1e-15);
        assert!(back.i_sat.is_none());
    }

    #[test]
    fn merge_and_efficiencies() {
        let mut a = EmitterEstimate {
            k21: Some((7.3529e7, 1e6)),
            ..Default::default()
        };
        let b = EmitterEstimate {
            k21: Some((1.0, 0.0)),
            i_sat: Some((1.8e6, 1e4)),
            peak_rate_cps: Some(1.6e6),
            ..Default::default()
        };
        a.merge(&b);
        a.derive_efficiencies();
        assert_eq!(a.k21.unwrap().0, 7.3529e7);
        assert!((a.eta_detected.unwrap() - 0.02176).abs() < 1e-5);
        assert!((a.eta_saturated.unwrap() - 0.02448).abs() < 1e-5);
        let back = EmitterEstimate::from_report(&a.to_report()).unwrap();
        assert_eq!(back.peak_rate_cps, Some(1.6e6));
    }
}
