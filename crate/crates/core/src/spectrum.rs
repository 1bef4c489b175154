//! Photoluminescence spectra: synthetic fixtures, zero-phonon-line fitting
//! and the ZPL intensity fraction.
//!
//! The ZPL fraction is reported under the name Huang-Rhys factor, meaning the
//! share of the total emission contained in the zero-phonon line (what is
//! elsewhere called the Debye-Waller factor).

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Error, Result};
use crate::lm::{levenberg_marquardt, LmOptions, Model};

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavelengths: Vec<f64>,
    intensities: Vec<f64>,
}

impl Spectrum {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(wavelengths: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != intensities.len() {
            return domain("wavelength and intensity columns differ in length");
        }
        if wavelengths.len() < Self::MIN_SAMPLES {
            return domain(format!(
                "spectrum needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                wavelengths.len()
            ));
        }
        if wavelengths.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("wavelengths must be strictly increasing");
        }
        if intensities.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return domain("intensities must be finite and >= 0");
        }
        Ok(Self {
            wavelengths,
            intensities,
        })
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.wavelengths[0], self.wavelengths[self.len() - 1])
    }

    /// Same grid with every intensity multiplied by `factor` (≥ 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.wavelengths.clone(),
            self.intensities.iter().map(|v| v * factor).collect(),
        )
    }

    /// Trapezoidal integral of `intensity − baseline` over `[lo, hi]`, with
    /// linear interpolation at the interval ends.
    pub fn integrate(&self, lo: f64, hi: f64, baseline: f64) -> f64 {
        let x = &self.wavelengths;
        let y: Vec<f64> = self.intensities.iter().map(|v| v - baseline).collect();
        let (lo, hi) = (lo.max(x[0]), hi.min(x[x.len() - 1]));
        if !(hi > lo) {
            return 0.0;
        }
        let interp = |t: f64| -> f64 {
            let i = x.partition_point(|&v| v <= t).clamp(1, x.len() - 1);
            let f = (t - x[i - 1]) / (x[i] - x[i - 1]);
            y[i - 1] + f * (y[i] - y[i - 1])
        };
        let mut pts: Vec<(f64, f64)> = vec![(lo, interp(lo))];
        pts.extend(
            x.iter()
                .zip(&y)
                .filter(|(&xi, _)| xi > lo && xi < hi)
                .map(|(&xi, &yi)| (xi, yi)),
        );
        pts.push((hi, interp(hi)));
        pts.windows(2)
            .map(|w| 0.5 * (w[1].1 + w[0].1) * (w[1].0 - w[0].0))
            .sum()
    }
}

/// Evenly spaced wavelength grid including both ends.
pub fn linear_grid(start_nm: f64, stop_nm: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| start_nm + (stop_nm - start_nm) * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineShape {
    Lorentzian,
    Gaussian,
}

/// Spectral line with a given integrated area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub area: f64,
    pub shape: LineShape,
}

impl Line {
    pub fn lorentzian(center_nm: f64, fwhm_nm: f64, area: f64) -> Self {
        Self {
            center_nm,
            fwhm_nm,
            area,
            shape: LineShape::Lorentzian,
        }
    }

    pub fn gaussian(center_nm: f64, fwhm_nm: f64, area: f64) -> Self {
        Self {
            center_nm,
            fwhm_nm,
            area,
            shape: LineShape::Gaussian,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.shape {
            LineShape::Lorentzian => lorentzian(x, self.area, self.center_nm, self.fwhm_nm),
            LineShape::Gaussian => {
                let sigma = self.fwhm_nm / (8.0 * 2f64.ln()).sqrt();
                let z = (x - self.center_nm) / sigma;
                self.area / (sigma * (2.0 * PI).sqrt()) * (-0.5 * z * z).exp()
            }
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.fwhm_nm > 0.0) || !(self.area >= 0.0) || !self.center_nm.is_finite() {
            return domain(format!("{what}: width must be > 0 and area >= 0"));
        }
        Ok(())
    }
}

fn lorentzian(x: f64, area: f64, center: f64, fwhm: f64) -> f64 {
    let g = fwhm / 2.0;
    area * g / PI / ((x - center).powi(2) + g * g)
}

/// Fraction of a Lorentzian's area lying inside `[lo, hi]`.
fn lorentzian_mass(lo: f64, hi: f64, center: f64, fwhm: f64) -> f64 {
    let g = fwhm / 2.0;
    (((hi - center) / g).atan() - ((lo - center) / g).atan()) / PI
}

/// ZPL plus phonon sideband plus constant baseline sampled on `grid`.
pub fn synthesize_spectrum(
    zpl: Line,
    sideband: Line,
    baseline: f64,
    grid: &[f64],
) -> Result<Spectrum> {
    zpl.validate("ZPL")?;
    sideband.validate("sideband")?;
    if !(baseline >= 0.0) {
        return domain("baseline must be >= 0");
    }
    let (Some(&lo), Some(&hi)) = (grid.first(), grid.last()) else {
        return domain("empty wavelength grid");
    };
    if lo > zpl.center_nm - 5.0 * zpl.fwhm_nm || hi < zpl.center_nm + 5.0 * zpl.fwhm_nm {
        return domain(format!(
            "grid [{lo}, {hi}] nm does not cover the ZPL ± 5 FWHM"
        ));
    }
    let intensities = grid
        .iter()
        .map(|&x| zpl.value(x) + sideband.value(x) + baseline)
        .collect();
    Spectrum::new(grid.to_vec(), intensities)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZplFit {
    pub center_nm: f64,
    pub center_sigma: f64,
    pub fwhm_nm: f64,
    pub fwhm_sigma: f64,
    /// Area of the fitted Lorentzian, including tails beyond the grid.
    pub zpl_area: f64,
    /// Baseline-subtracted emission over the grid plus the ZPL tails beyond it.
    pub total_area: f64,
    /// zpl_area / total_area.
    pub huang_rhys: f64,
    /// Constant baseline subtracted before integrating.
    pub baseline: f64,
    pub reduced_chi2: f64,
}

impl ZplFit {
    /// Fitted ZPL on top of the integration baseline.
    pub fn zpl_value(&self, x: f64) -> f64 {
        self.baseline + lorentzian(x, self.zpl_area, self.center_nm, self.fwhm_nm)
    }
}

/// Lorentzian on a linear baseline: [area, center, fwhm, c0, c1].
struct ZplModel {
    pivot: f64,
}

impl Model for ZplModel {
    fn n_params(&self) -> usize {
        5
    }

    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let (area, c, w) = (p[0], p[1], p[2]);
        let g = w / 2.0;
        let d = x - c;
        let den = d * d + g * g;
        let l = area * g / PI / den;
        grad[0] = g / PI / den;
        grad[1] = area * g / PI * 2.0 * d / (den * den);
        // ∂/∂w = ½·∂/∂g; ∂/∂g [g/den] = (d² − g²)/den²
        grad[2] = 0.5 * area / PI * (d * d - g * g) / (den * den);
        grad[3] = 1.0;
        grad[4] = x - self.pivot;
        l + p[3] + p[4] * (x - self.pivot)
    }

    fn feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[2] > 0.0
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Robust noise scale from first differences (MAD-based).
fn noise_estimate(y: &[f64]) -> f64 {
    let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let m = median(diffs.clone());
    let mad = median(diffs.iter().map(|d| (d - m).abs()).collect());
    1.4826 * mad / 2f64.sqrt()
}

/// Fits the tallest line with a Lorentzian on a linear baseline over
/// ±4 FWHM-estimates, then integrates the spectrum to get the ZPL fraction.
///
/// The constant baseline for integration is the mean residual (data minus
/// fitted ZPL) over the outer 5 % of the grid on each side, unless `baseline`
/// is given.
pub fn fit_zpl(s: &Spectrum, baseline: Option<f64>) -> Result<ZplFit> {
    let x = s.wavelengths();
    let y = s.intensities();
    let n = s.len();
    let (i_peak, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("spectrum has samples");
    let level = median(y.to_vec());
    let noise = noise_estimate(y);
    let prominence = peak - level;
    if !(prominence > 3.0 * noise) || prominence <= 0.0 {
        return Err(Error::NoZpl(format!(
            "tallest peak rises {prominence:.3e} above the median, noise {noise:.3e}"
        )));
    }

    // Half-maximum crossings on either side of the peak.
    let half = level + prominence / 2.0;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = i_peak;
        for i in range {
            if y[i] < half {
                let f = (half - y[i]) / (y[prev] - y[i]);
                return Some(x[i] + f * (x[prev] - x[i]));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..i_peak).rev()).unwrap_or(x[0]);
    let right = cross(&mut (i_peak + 1..n)).unwrap_or(x[n - 1]);
    let spacing = (x[n - 1] - x[0]) / (n - 1) as f64;
    let fwhm0 = (right - left).max(spacing);

    let lo = x[i_peak] - 4.0 * fwhm0;
    let hi = x[i_peak] + 4.0 * fwhm0;
    let idx: Vec<usize> = (0..n).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
    if idx.len() < 8 {
        return Err(Error::NoZpl(format!(
            "only {} samples inside the fit window; the line is under-resolved",
            idx.len()
        )));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let sig = vec![1.0; xs.len()];
    let base0 = ys[0].min(ys[ys.len() - 1]);
    let area0 = (peak - base0).max(f64::MIN_POSITIVE) * PI * fwhm0 / 2.0;
    let model = ZplModel { pivot: x[i_peak] };
    let out = levenberg_marquardt(
        &model,
        &xs,
        &ys,
        &sig,
        &[area0, x[i_peak], fwhm0, base0, 0.0],
        &LmOptions::default(),
    )?;
    let (area, center, fwhm) = (out.params[0], out.params[1], out.params[2]);
    // Unit weights: scale the covariance by the residual variance.
    let s2 = out.reduced_chi2();

    let baseline = match baseline {
        Some(b) => b,
        None => {
            let k = (n / 20).max(1);
            let edge: Vec<usize> = (0..k).chain(n - k..n).collect();
            edge.iter()
                .map(|&i| y[i] - lorentzian(x[i], area, center, fwhm))
                .sum::<f64>()
                / edge.len() as f64
        }
    };
    let (gx0, gx1) = s.range();
    let outside = area * (1.0 - lorentzian_mass(gx0, gx1, center, fwhm));
    let total_area = s.integrate(gx0, gx1, baseline) + outside;
    if !(total_area > 0.0) {
        return domain("total baseline-subtracted area is not positive");
    }
    let huang_rhys = (area / total_area).clamp(0.0, 1.0);
    Ok(ZplFit {
        center_nm: center,
        center_sigma: (out.covariance[(1, 1)] * s2).sqrt(),
        fwhm_nm: fwhm,
        fwhm_sigma: (out.covariance[(2, 2)] * s2).sqrt(),
        zpl_area: area,
        total_area,
        huang_rhys,
        baseline,
        reduced_chi2: s2,
    })
}

/// Share of the baseline-subtracted emission inside `window` (nm), by
/// trapezoidal integration, clamped to [0, 1].
pub fn huang_rhys_factor(s: &Spectrum, window: (f64, f64), baseline: f64) -> Result<f64> {
    let (lo, hi) = s.range();
    if !(window.0 >= lo && window.1 <= hi && window.1 > window.0) {
        return domain(format!(
            "ZPL window [{}, {}] nm must lie inside the grid [{lo}, {hi}] nm",
            window.0, window.1
        ));
    }
    let total = s.integrate(lo, hi, baseline);
    if !(total > 0.0) {
        return domain("zero total area");
    }
    Ok((s.integrate(window.0, window.1, baseline) / total).clamp(0.0, 1.0))
}

/// Photon-counting version of `s`: intensities rescaled so the tallest sample
/// expects `peak_counts`, then replaced by Poisson draws.
pub fn with_shot_noise(s: &Spectrum, peak_counts: f64, seed: u64) -> Result<Spectrum> {
    if !(peak_counts > 0.0) || !peak_counts.is_finite() {
        return domain(format!(
            "peak counts must be finite and > 0, got {peak_counts}"
        ));
    }
    let peak = s.intensities().iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return domain("spectrum is identically zero");
    }
    let scale = peak_counts / peak;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = s
        .intensities()
        .iter()
        .map(|&v| match Poisson::new(v * scale) {
            Ok(d) => d.sample(&mut rng),
            Err(_) => 0.0,
        })
        .collect();
    Spectrum::new(s.wavelengths().to_vec(), counts)
}

/// ZPL fit plus the window-integrated fraction over center ± 2·FWHM.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumAnalysis {
    pub zpl: ZplFit,
    pub window: (f64, f64),
    pub window_fraction: f64,
}

impl SpectrumAnalysis {
    pub fn to_report(&self) -> String {
        let z = &self.zpl;
        format!(
            "zpl_center_nm = {:.6} {:.3e}\n\
             zpl_fwhm_nm = {:.6} {:.3e}\n\
             zpl_area = {:.6e}\n\
             total_area = {:.6e}\n\
             baseline = {:.6e}\n\
             huang_rhys = {:.6}\n\
             zpl_window_nm = {:.4} {:.4}\n\
             huang_rhys_window = {:.6}\n",
            z.center_nm,
            z.center_sigma,
            z.fwhm_nm,
            z.fwhm_sigma,
            z.zpl_area,
            z.total_area,
            z.baseline,
            z.huang_rhys,
            self.window.0,
            self.window.1,
            self.window_fraction,
        )
    }
}

/// Default window half-width, in units of the fitted FWHM.
pub const ZPL_WINDOW_FWHM: f64 = 2.0;

pub fn analyze_spectrum(s: &Spectrum, baseline: Option<f64>) -> Result<SpectrumAnalysis> {
    let zpl = fit_zpl(s, baseline)?;
    let (lo, hi) = s.range();
    let window = (
        (zpl.center_nm - ZPL_WINDOW_FWHM * zpl.fwhm_nm).max(lo),
        (zpl.center_nm + ZPL_WINDOW_FWHM * zpl.fwhm_nm).min(hi),
    );
    let window_fraction = huang_rhys_factor(s, window, zpl.baseline)?;
    Ok(SpectrumAnalysis {
        zpl,
        window,
        window_fraction,
    })
}
