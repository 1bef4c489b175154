//! Weighted nonlinear least squares by Levenberg–Marquardt.
//!
//! Minimizes χ² = Σ ((y − f(x; p)) / σ)² with Marquardt's diagonal scaling.
//! Parameters of very different magnitude (rates ~1e8 s⁻¹ next to
//! dimensionless fractions) are handled by solving in the column-scaled
//! system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Converged when every |Δp_j| ≤ xtol·(|p_j| + xtol).
    pub xtol: f64,
    /// Converged when the scaled gradient falls below this.
    pub gtol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            xtol: 1e-8,
            gtol: 1e-12,
            initial_lambda: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// (JᵀWJ)⁻¹ at the solution.
    pub covariance: DMatrix<f64>,
    pub chi2: f64,
    pub n_points: usize,
    pub n_iter: usize,
    pub converged: bool,
    /// Scaled gradient max-norm at the solution.
    pub gradient_norm: f64,
}

impl LmOutcome {
    pub fn dof(&self) -> usize {
        self.n_points.saturating_sub(self.params.len())
    }

    pub fn reduced_chi2(&self) -> f64 {
        match self.dof() {
            0 => 0.0,
            d => self.chi2 / d as f64,
        }
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.covariance[(j, j)].max(0.0).sqrt()
    }
}

/// A model f(x; p) with analytic gradient ∂f/∂p written into `grad`.
pub trait Model {
    fn n_params(&self) -> usize;
    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64;
    /// Rejects parameter vectors outside the model's domain.
    fn feasible(&self, _p: &[f64]) -> bool {
        true
    }
}

struct Linearization {
    jac: DMatrix<f64>,
    resid: DVector<f64>,
    chi2: f64,
}

fn linearize<M: Model>(model: &M, xs: &[f64], ys: &[f64], sig: &[f64], p: &[f64]) -> Linearization {
    let n = xs.len();
    let m = p.len();
    let mut jac = DMatrix::zeros(n, m);
    let mut resid = DVector::zeros(n);
    let mut grad = vec![0.0; m];
    for i in 0..n {
        let f = model.eval(xs[i], p, &mut grad);
        resid[i] = (ys[i] - f) / sig[i];
        for j in 0..m {
            jac[(i, j)] = grad[j] / sig[i];
        }
    }
    let chi2 = resid.norm_squared();
    Linearization { jac, resid, chi2 }
}

fn chi2_at<M: Model>(model: &M, xs: &[f64], ys: &[f64], sig: &[f64], p: &[f64]) -> f64 {
    let mut grad = vec![0.0; p.len()];
    xs.iter()
        .zip(ys)
        .zip(sig)
        .map(|((&x, &y), &s)| {
            let r = (y - model.eval(x, p, &mut grad)) / s;
            r * r
        })
        .sum()
}

/// Inverse of a symmetric positive semidefinite matrix; falls back to the
/// pseudo-inverse when Cholesky fails.
pub fn spd_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let d: DVector<f64> = DVector::from_fn(n, |i, _| {
        let v = a[(i, i)];
        if v > 0.0 {
            1.0 / v.sqrt()
        } else {
            1.0
        }
    });
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let inv = match scaled.clone().cholesky() {
        Some(c) => c.inverse(),
        None => scaled
            .pseudo_inverse(1e-14)
            .unwrap_or_else(|_| DMatrix::from_element(n, n, f64::INFINITY)),
    };
    let mut out = DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * d[i] * d[j]);
    // symmetrize round-off
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Fits `model` to (xs, ys) with standard errors `sigma`, starting at `p0`.
pub fn levenberg_marquardt<M: Model>(
    model: &M,
    xs: &[f64],
    ys: &[f64],
    sigma: &[f64],
    p0: &[f64],
    opts: &LmOptions,
) -> Result<LmOutcome> {
    let m = model.n_params();
    if p0.len() != m {
        return Err(Error::Fit(format!(
            "expected {m} initial parameters, got {}",
            p0.len()
        )));
    }
    if xs.len() != ys.len() || xs.len() != sigma.len() {
        return Err(Error::Fit("x, y and σ lengths differ".into()));
    }
    if xs.len() < m {
        return Err(Error::Fit(format!(
            "{} points cannot constrain {m} parameters",
            xs.len()
        )));
    }
    if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::Fit("all σ must be finite and > 0".into()));
    }
    if !model.feasible(p0) || p0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit(
            "initial parameters outside the model domain".into(),
        ));
    }

    let mut p = p0.to_vec();
    let mut lin = linearize(model, xs, ys, sigma, &p);
    let mut lambda = opts.initial_lambda;
    let mut converged = false;
    let mut n_iter = 0;

    while n_iter < opts.max_iter {
        n_iter += 1;
        let jtj = lin.jac.transpose() * &lin.jac;
        let g = lin.jac.transpose() * &lin.resid;
        let scale: Vec<f64> = (0..m)
            .map(|j| {
                let d = jtj[(j, j)].sqrt();
                if d > 0.0 {
                    d
                } else {
                    1.0
                }
            })
            .collect();
        let gnorm = (0..m).map(|j| (g[j] / scale[j]).abs()).fold(0.0, f64::max)
            / lin.chi2.sqrt().max(f64::MIN_POSITIVE);
        if lin.chi2 == 0.0 || gnorm <= opts.gtol {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda < 1e20 {
            // (D⁻¹JᵀJD⁻¹ + λI)·(Dδ) = D⁻¹g
            let a = DMatrix::from_fn(m, m, |i, j| {
                jtj[(i, j)] / (scale[i] * scale[j]) + if i == j { lambda } else { 0.0 }
            });
            let b = DVector::from_fn(m, |i, _| g[i] / scale[i]);
            let Some(step) = a.cholesky().map(|c| c.solve(&b)) else {
                lambda *= 10.0;
                continue;
            };
            let delta: Vec<f64> = (0..m).map(|j| step[j] / scale[j]).collect();
            let trial: Vec<f64> = p.iter().zip(&delta).map(|(a, d)| a + d).collect();
            if !model.feasible(&trial) || trial.iter().any(|v| !v.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            let chi2 = chi2_at(model, xs, ys, sigma, &trial);
            if chi2 <= lin.chi2 {
                let small = delta
                    .iter()
                    .zip(&trial)
                    .all(|(d, v)| d.abs() <= opts.xtol * (v.abs() + opts.xtol));
                p = trial;
                lin = linearize(model, xs, ys, sigma, &p);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if small {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // No downhill step at any damping: a minimum up to round-off.
            let small_g = gnorm <= 1e-6;
            converged = small_g;
            break;
        }
    }

    let jtj = lin.jac.transpose() * &lin.jac;
    let g = lin.jac.transpose() * &lin.resid;
    let gradient_norm = (0..m)
        .map(|j| {
            let d = jtj[(j, j)].sqrt();
            if d > 0.0 {
                (g[j] / d).abs()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
        / lin.chi2.sqrt().max(f64::MIN_POSITIVE);
    Ok(LmOutcome {
        covariance: spd_inverse(&jtj),
        params: p,
        chi2: lin.chi2,
        n_points: xs.len(),
        n_iter,
        converged,
        gradient_norm: if lin.chi2 == 0.0 { 0.0 } else { gradient_norm },
    })
}
