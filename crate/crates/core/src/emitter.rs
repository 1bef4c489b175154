//! Rate-equation emitter models.
//!
//! Levels are numbered from 1 so that `rate(1, 2)` is the pump rate k12 and
//! `rate(2, 1)` the radiative decay k21. The three-level scheme adds a
//! non-radiative shelving path 2 → 3 → 1.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::error::{domain, Error, Result};

/// Continuous-wave pump power in μW.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PumpPower(f64);

impl PumpPower {
    pub fn new(microwatts: f64) -> Result<Self> {
        if !(microwatts >= 0.0) || !microwatts.is_finite() {
            return domain(format!(
                "pump power must be finite and >= 0 μW, got {microwatts}"
            ));
        }
        Ok(Self(microwatts))
    }

    pub fn microwatts(self) -> f64 {
        self.0
    }
}

/// Number of electronic levels taking part in the kinetics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelScheme {
    TwoLevel,
    ThreeLevel,
}

impl LevelScheme {
    pub fn n_levels(self) -> usize {
        match self {
            LevelScheme::TwoLevel => 2,
            LevelScheme::ThreeLevel => 3,
        }
    }
}

/// Square matrix of transition rates in s⁻¹, indexed 1-based by (from, to).
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    rates: [[f64; 3]; 3],
}

impl RateMatrix {
    pub fn n_levels(&self) -> usize {
        self.n
    }

    /// Rate from level `from` to level `to` (1-based).
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        assert!(
            (1..=self.n).contains(&from) && (1..=self.n).contains(&to),
            "level index out of range"
        );
        self.rates[from - 1][to - 1]
    }

    /// Total rate out of `level` (1-based).
    pub fn exit_rate(&self, level: usize) -> f64 {
        (1..=self.n).map(|to| self.rate(level, to)).sum()
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Generator of the master equation dp/dt = G·p.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                -self.exit_rate(i + 1)
            } else {
                self.rates[j][i]
            }
        })
    }
}

/// Two- or three-level emitter with a linear pump coupling k12 = κ·P.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterModel {
    scheme: LevelScheme,
    k21: f64,
    k23: f64,
    k31: f64,
    pump_coupling: f64,
}

impl EmitterModel {
    /// `pump_coupling` is κ in s⁻¹ per μW.
    pub fn two_level(k21: f64, pump_coupling: f64) -> Result<Self> {
        let m = Self {
            scheme: LevelScheme::TwoLevel,
            k21,
            k23: 0.0,
            k31: 0.0,
            pump_coupling,
        };
        m.validate()?;
        Ok(m)
    }

    /// Adds shelving 2 → 3 at `k23` and deshelving 3 → 1 at `k31`. The
    /// deshelving rate must be positive so the shelf is not absorbing.
    pub fn three_level(k21: f64, k23: f64, k31: f64, pump_coupling: f64) -> Result<Self> {
        let m = Self {
            scheme: LevelScheme::ThreeLevel,
            k21,
            k23,
            k31,
            pump_coupling,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidModel(format!(
                "{what} must be finite and > 0, got {v}"
            )))
        };
        if !(self.k21 > 0.0) || !self.k21.is_finite() {
            return bad("k21", self.k21);
        }
        if !(self.pump_coupling > 0.0) || !self.pump_coupling.is_finite() {
            return bad("pump coupling", self.pump_coupling);
        }
        if self.scheme == LevelScheme::ThreeLevel {
            if !(self.k23 >= 0.0) || !self.k23.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "k23 must be >= 0, got {}",
                    self.k23
                )));
            }
            if !(self.k31 > 0.0) || !self.k31.is_finite() {
                return bad("k31", self.k31);
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> LevelScheme {
        self.scheme
    }

    pub fn k21(&self) -> f64 {
        self.k21
    }

    pub fn k23(&self) -> f64 {
        self.k23
    }

    pub fn k31(&self) -> f64 {
        self.k31
    }

    pub fn pump_coupling(&self) -> f64 {
        self.pump_coupling
    }

    /// Excited-state lifetime 1/k21 in seconds.
    pub fn lifetime(&self) -> f64 {
        1.0 / self.k21
    }

    /// Pump power at which a two-level emitter reaches half its saturated
    /// population, k21/κ.
    pub fn saturation_power(&self) -> f64 {
        self.k21 / self.pump_coupling
    }

    pub fn pump_rate(&self, power: PumpPower) -> f64 {
        self.pump_coupling * power.microwatts()
    }

    /// Full rate matrix at the given pump power.
    pub fn rates_at(&self, power: PumpPower) -> RateMatrix {
        let mut rates = [[0.0; 3]; 3];
        rates[0][1] = self.pump_rate(power);
        rates[1][0] = self.k21;
        if self.scheme == LevelScheme::ThreeLevel {
            rates[1][2] = self.k23;
            rates[2][0] = self.k31;
        }
        RateMatrix {
            n: self.scheme.n_levels(),
            rates,
        }
    }

    /// Closed-form g²(τ) at the given power; τ in seconds.
    pub fn g2(&self, tau: f64, power: PumpPower, rho: f64) -> Result<f64> {
        let k12 = self.pump_rate(power);
        match self.scheme {
            LevelScheme::TwoLevel => g2_analytic_two_level(tau, k12, self.k21, rho),
            LevelScheme::ThreeLevel => {
                g2_analytic_three_level(tau, k12, self.k21, self.k23, self.k31, rho)
            }
        }
    }
}

/// k12 = κ·P.
pub fn pump_rate_from_power(power: f64, pump_coupling: f64) -> Result<f64> {
    let p = PumpPower::new(power)?;
    if !(pump_coupling > 0.0) || !pump_coupling.is_finite() {
        return domain(format!("pump coupling must be > 0, got {pump_coupling}"));
    }
    Ok(pump_coupling * p.microwatts())
}

/// Antibunching rate k_T = k12 + k21.
pub fn total_rate(k12: f64, k21: f64) -> f64 {
    k12 + k21
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return domain(format!("signal fraction must lie in [0, 1], got {rho}"));
    }
    Ok(())
}

/// g²(τ) = 1 − ρ²·exp(−(k12 + k21)|τ|).
///
/// ρ is the fraction of detected counts coming from the emitter; the rest is
/// uncorrelated background.
pub fn g2_analytic_two_level(tau: f64, k12: f64, k21: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(k12 >= 0.0 && k21 >= 0.0) {
        return domain("rates must be >= 0");
    }
    Ok(1.0 - rho * rho * (-(k12 + k21) * tau.abs()).exp())
}

/// Relative eigenvalue gap below which the confluent form is used.
const DEGENERACY_GAP: f64 = 1e-9;

/// Decomposition of the three-level correlation into its two relaxation modes.
///
/// The unit-signal correlation is
/// `g²(τ) = 1 + Re(c_fast·exp(λ_fast·τ) + c_slow·exp(λ_slow·τ))`, or the
/// repeated-root form `1 + (c_fast + c_slow·τ)·exp(λ·τ)` when the eigenvalues
/// coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelModes {
    pub lambda_fast: Complex<f64>,
    pub lambda_slow: Complex<f64>,
    pub c_fast: Complex<f64>,
    pub c_slow: Complex<f64>,
    pub confluent: bool,
}

impl ThreeLevelModes {
    pub fn new(k12: f64, k21: f64, k23: f64, k31: f64) -> Result<Self> {
        if !(k21 > 0.0) {
            return domain("k21 must be > 0");
        }
        if !(k12 >= 0.0 && k23 >= 0.0 && k31 >= 0.0) {
            return domain("rates must be >= 0");
        }
        // Non-zero eigenvalues of the generator solve λ² + Sλ + D = 0.
        let s = k12 + k21 + k23 + k31;
        let d = k12 * k23 + k12 * k31 + k21 * k31 + k23 * k31;
        if d <= 0.0 {
            return domain("rate matrix has no unique steady state");
        }
        let p2_inf = k12 * k31 / d;
        if p2_inf <= 0.0 {
            return domain("excited state is never populated; g² undefined");
        }
        let disc = Complex::new(s * s - 4.0 * d, 0.0).sqrt();
        let q = -(Complex::new(s, 0.0) + disc) / 2.0;
        let lambda_fast = q;
        let lambda_slow = Complex::new(d, 0.0) / q;
        let gap = (lambda_fast - lambda_slow).abs();
        // p₂(0) = 0 and ṗ₂(0) = k12 starting from the ground state.
        if gap <= DEGENERACY_GAP * lambda_fast.abs() {
            let lambda = Complex::new(-s / 2.0, 0.0);
            let c_fast = Complex::new(-1.0, 0.0);
            let c_slow = Complex::new(k12 / p2_inf, 0.0) + lambda;
            return Ok(Self {
                lambda_fast: lambda,
                lambda_slow: lambda,
                c_fast,
                c_slow,
                confluent: true,
            });
        }
        let c_fast =
            (Complex::new(k12, 0.0) + lambda_slow * p2_inf) / (lambda_fast - lambda_slow) / p2_inf;
        let c_slow = Complex::new(-1.0, 0.0) - c_fast;
        Ok(Self {
            lambda_fast,
            lambda_slow,
            c_fast,
            c_slow,
            confluent: false,
        })
    }

    /// Unit-signal correlation at |τ| (seconds).
    pub fn g2_signal(&self, tau: f64) -> f64 {
        let t = tau.abs();
        let v = if self.confluent {
            (self.c_fast + self.c_slow * t) * (self.lambda_fast * t).exp()
        } else {
            self.c_fast * (self.lambda_fast * t).exp() + self.c_slow * (self.lambda_slow * t).exp()
        };
        1.0 + v.re
    }

    /// `(τ₁, τ₂, a)` of g² = 1 − (1+a)e^(−τ/τ₁) + a·e^(−τ/τ₂), available when
    /// both eigenvalues are real and distinct.
    pub fn bunching_form(&self) -> Option<(f64, f64, f64)> {
        let real = self.lambda_fast.im == 0.0 && self.lambda_slow.im == 0.0;
        if self.confluent || !real {
            return None;
        }
        Some((
            -1.0 / self.lambda_fast.re,
            -1.0 / self.lambda_slow.re,
            self.c_slow.re,
        ))
    }
}

/// Three-level g²(τ) with shelving 2 → 3 → 1, damped by the signal fraction ρ.
pub fn g2_analytic_three_level(
    tau: f64,
    k12: f64,
    k21: f64,
    k23: f64,
    k31: f64,
    rho: f64,
) -> Result<f64> {
    check_rho(rho)?;
    let modes = ThreeLevelModes::new(k12, k21, k23, k31)?;
    Ok(1.0 + rho * rho * (modes.g2_signal(tau) - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Level occupancies, index 0 = ground.
    pub occupancies: Vec<f64>,
    /// Photons per second leaving on the 2 → 1 transition.
    pub emission_rate: f64,
    /// Counts per second after collection efficiency η.
    pub detected_rate: f64,
}

impl SteadyState {
    pub fn excited(&self) -> f64 {
        self.occupancies[1]
    }
}

/// Solves the balance equations G·p = 0, Σp = 1.
pub fn steady_state(
    model: &EmitterModel,
    power: PumpPower,
    efficiency: f64,
) -> Result<SteadyState> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return domain(format!("efficiency must lie in (0, 1], got {efficiency}"));
    }
    let rates = model.rates_at(power);
    let occupancies = solve_balance(&rates)?;
    let emission_rate = model.k21 * occupancies[1];
    Ok(SteadyState {
        occupancies,
        emission_rate,
        detected_rate: efficiency * emission_rate,
    })
}

fn solve_balance(rates: &RateMatrix) -> Result<Vec<f64>> {
    let n = rates.n_levels();
    let mut a = rates.generator();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let p = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidModel("rate matrix has no unique steady state".into()))?;
    // Clamp round-off below zero; renormalize so Σp = 1 holds to rounding.
    let mut p: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

/// Detected rate at each power of `grid`.
pub fn saturation_curve(
    model: &EmitterModel,
    efficiency: f64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("power grid must be sorted");
    }
    grid.iter()
        .map(|&p| {
            let ss = steady_state(model, PumpPower::new(p)?, efficiency)?;
            Ok((p, ss.detected_rate))
        })
        .collect()
}

/// Two-level saturation law I_sat·P/(P_sat + P).
pub fn saturation_law(power: f64, i_sat: f64, p_sat: f64) -> f64 {
    i_sat * power / (p_sat + power)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K21: f64 = 1.0 / 13.6e-9;
    const KAPPA: f64 = K21 / 224.0;

    fn p(x: f64) -> PumpPower {
        PumpPower::new(x).unwrap()
    }

    #[test]
    fn pump_rate_examples() {
        assert_eq!(pump_rate_from_power(0.0, 3.2825e5).unwrap(), 0.0);
        let k12 = pump_rate_from_power(224.0, 7.3529e7 / 224.0).unwrap();
        assert!((k12 - 7.3529e7).abs() / 7.3529e7 < 1e-12);
        let k12 = pump_rate_from_power(1000.0, 3.2825e5).unwrap();
        assert!((k12 - 3.2825e8).abs() < 1e-3);
        assert!(pump_rate_from_power(-1.0, 1.0).is_err());
        assert!(pump_rate_from_power(1.0, 0.0).is_err());
    }

    #[test]
    fn total_rate_examples() {
        assert_eq!(total_rate(0.0, 7.3529e7), 7.3529e7);
        assert!((total_rate(7.3529e7, 7.3529e7) - 1.47058e8).abs() < 1.0);
        assert_eq!(total_rate(0.0, 0.0), 0.0);
    }

    #[test]
    fn two_level_examples() {
        assert_eq!(g2_analytic_two_level(0.0, 1e8, 7e7, 1.0).unwrap(), 0.0);
        assert!((g2_analytic_two_level(1.0, 1e8, 7e7, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let kt = 1.7e8;
        let v = g2_analytic_two_level(1.0 / kt, 1e8, 7e7, 1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!((v - 0.63212).abs() < 1e-5);
        let rho = 0.84f64.sqrt();
        assert!((rho - 0.91652).abs() < 1e-5);
        let v = g2_analytic_two_level(0.0, 1e8, 7e7, rho).unwrap();
        assert!((v - 0.16).abs() < 1e-12);
        assert!(g2_analytic_two_level(0.0, 1e8, 7e7, 1.1).is_err());
        assert!(g2_analytic_two_level(0.0, 1e8, 7e7, -0.1).is_err());
        // symmetric in τ
        assert_eq!(
            g2_analytic_two_level(-3e-9, 1e8, 7e7, 1.0).unwrap(),
            g2_analytic_two_level(3e-9, 1e8, 7e7, 1.0).unwrap()
        );
    }

    #[test]
    fn three_level_reduces_to_two_level() {
        for &k31 in &[3e5, 1e7, 5e9] {
            for i in 0..400 {
                let tau = i as f64 * 0.5e-9;
                let a = g2_analytic_three_level(tau, 5e7, K21, 0.0, k31, 0.9).unwrap();
                let b = g2_analytic_two_level(tau, 5e7, K21, 0.9).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "τ={tau} {a} {b}");
            }
        }
    }

    #[test]
    fn three_level_zero_delay_is_zero() {
        let v = g2_analytic_three_level(0.0, 5e7, 7.35e7, 5e6, 3e5, 1.0).unwrap();
        assert!(v.abs() < 1e-12);
    }

    /// Master equation integrated with classical RK4 from the ground state;
    /// g²(τ) = p₂(τ)/p₂(∞).
    fn rk4_g2(rates: &RateMatrix, taus: &[f64], dt: f64) -> Vec<f64> {
        let g = rates.generator();
        let n = rates.n_levels();
        let p_inf = solve_balance(rates).unwrap();
        let mut p = DVector::<f64>::zeros(n);
        p[0] = 1.0;
        let mut t = 0.0;
        let mut out = Vec::new();
        for &target in taus {
            while t + dt <= target + 1e-18 {
                let k1 = &g * &p;
                let k2 = &g * (&p + &k1 * (dt / 2.0));
                let k3 = &g * (&p + &k2 * (dt / 2.0));
                let k4 = &g * (&p + &k3 * dt);
                p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
                t += dt;
            }
            out.push(p[1] / p_inf[1]);
        }
        out
    }

    #[test]
    fn three_level_matches_master_equation_and_bunches() {
        let model = EmitterModel::three_level(7.35e7, 5e6, 3e5, 1.0).unwrap();
        let power = p(5e7);
        let rates = model.rates_at(power);
        let taus: Vec<f64> = (0..=200).map(|i| i as f64 * 5e-9).collect();
        let oracle = rk4_g2(&rates, &taus, 1e-11);
        let mut max = 0.0f64;
        for (tau, want) in taus.iter().zip(&oracle) {
            let got = g2_analytic_three_level(*tau, 5e7, 7.35e7, 5e6, 3e5, 1.0).unwrap();
            assert!(
                (got - want).abs() < 1e-6 * want.max(1.0),
                "τ={tau}: {got} vs {want}"
            );
            max = max.max(*want);
        }
        assert!(max > 1.0, "no bunching shoulder, max {max}");
    }

    #[test]
    fn three_level_complex_and_confluent_modes() {
        // All rates equal makes the discriminant vanish.
        let k = 1e8;
        let m = ThreeLevelModes::new(k, k, k, k).unwrap();
        assert!(m.confluent);
        let model = EmitterModel::three_level(k, k, k, 1.0).unwrap();
        let rates = model.rates_at(p(k));
        let taus: Vec<f64> = (0..=60).map(|i| i as f64 * 1e-9).collect();
        let oracle = rk4_g2(&rates, &taus, 1e-12);
        for (tau, want) in taus.iter().zip(&oracle) {
            let got = g2_analytic_three_level(*tau, k, k, k, k, 1.0).unwrap();
            assert!((got - want).abs() < 1e-8, "τ={tau}: {got} vs {want}");
        }
        // Strong shelving relative to pumping gives complex eigenvalues.
        let (k12, k21, k23, k31) = (2e8, 1e7, 3e8, 1e8);
        let m = ThreeLevelModes::new(k12, k21, k23, k31).unwrap();
        assert!(m.lambda_fast.im != 0.0);
        let model = EmitterModel::three_level(k21, k23, k31, 1.0).unwrap();
        let rates = model.rates_at(p(k12));
        let oracle = rk4_g2(&rates, &taus, 1e-12);
        for (tau, want) in taus.iter().zip(&oracle) {
            let got = g2_analytic_three_level(*tau, k12, k21, k23, k31, 1.0).unwrap();
            assert!((got - want).abs() < 1e-8, "τ={tau}: {got} vs {want}");
        }
    }

    #[test]
    fn bunching_form_matches_modes() {
        let m = ThreeLevelModes::new(5e7, 7.35e7, 5e6, 3e5).unwrap();
        let (t1, t2, a) = m.bunching_form().unwrap();
        assert!(t1 < t2 && a > 0.0);
        for i in 0..50 {
            let tau = i as f64 * 7e-9;
            let form = 1.0 - (1.0 + a) * (-tau / t1).exp() + a * (-tau / t2).exp();
            assert!((form - m.g2_signal(tau)).abs() < 1e-12);
        }
    }

    #[test]
    fn steady_state_examples() {
        let model = EmitterModel::two_level(7.3529e7, 3.2825e5).unwrap();
        let ss = steady_state(&model, p(0.0), 0.5).unwrap();
        assert_eq!(ss.occupancies, vec![1.0, 0.0]);
        assert_eq!(ss.detected_rate, 0.0);

        let model = EmitterModel::two_level(7.3529e7, 7.3529e7 / 224.0).unwrap();
        let ss = steady_state(&model, p(224.0), 0.0245).unwrap();
        assert!((ss.excited() - 0.5).abs() < 1e-12);
        assert!((ss.detected_rate - 0.0245 * 7.3529e7 / 2.0).abs() < 1e-6);
        assert!((ss.detected_rate - 0.9e6).abs() / 0.9e6 < 1e-3);

        let three = EmitterModel::three_level(7.3529e7, 5e6, 3e5, 7.3529e7 / 224.0).unwrap();
        let ss = steady_state(&three, p(224.0), 0.0245).unwrap();
        // direct 3×3 solve: p3 = p2·k23/k31, p1 = p2·(k21+k23)/k12
        let k12 = 7.3529e7;
        let r1 = (7.3529e7 + 5e6) / k12;
        let r3 = 5e6 / 3e5;
        let p2 = 1.0 / (1.0 + r1 + r3);
        assert!((ss.excited() - p2).abs() < 1e-12);
        assert!(ss.excited() < 0.5);

        assert!(steady_state(&model, p(1.0), 0.0).is_err());
        assert!(steady_state(&model, p(1.0), 1.5).is_err());
    }

    #[test]
    fn steady_state_solves_balance() {
        for model in [
            EmitterModel::two_level(K21, KAPPA).unwrap(),
            EmitterModel::three_level(K21, 5e6, 3e5, KAPPA).unwrap(),
        ] {
            for pw in [0.0, 10.0, 224.0, 1000.0, 1e5] {
                let ss = steady_state(&model, p(pw), 1.0).unwrap();
                let rates = model.rates_at(p(pw));
                let pv = DVector::from_vec(ss.occupancies.clone());
                let resid = (rates.generator() * pv).amax();
                assert!(resid < 1e-10 * rates.max_rate(), "residual {resid}");
                let sum: f64 = ss.occupancies.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(ss.occupancies.iter().all(|&x| (0.0..=1.0).contains(&x)));
            }
        }
    }

    #[test]
    fn saturation_curve_examples() {
        let eta = 1.8e6 / K21;
        let model = EmitterModel::two_level(K21, KAPPA).unwrap();
        let curve = saturation_curve(&model, eta, &[224.0, 1e9]).unwrap();
        assert!((curve[0].1 - 0.9e6).abs() < 1e-6);
        assert!((curve[1].1 - 1.8e6).abs() / 1.8e6 < 1e-6);
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 10.0).collect();
        let curve = saturation_curve(&model, eta, &grid).unwrap();
        for (pw, rate) in &curve {
            let law = saturation_law(*pw, eta * K21, K21 / KAPPA);
            assert!((rate - law).abs() <= 1e-9 * law);
        }
        assert!(saturation_curve(&model, eta, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(EmitterModel::two_level(0.0, 1.0).is_err());
        assert!(EmitterModel::two_level(1.0, 0.0).is_err());
        assert!(EmitterModel::three_level(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(EmitterModel::three_level(1.0, 1.0, 0.0, 1.0).is_err());
        let m = EmitterModel::two_level(K21, KAPPA).unwrap();
        let r = m.rates_at(p(100.0));
        assert_eq!(r.rate(1, 1), 0.0);
        assert_eq!(r.rate(2, 2), 0.0);
        assert_eq!(r.rate(2, 1), K21);
        assert!((r.rate(1, 2) - KAPPA * 100.0).abs() < 1e-6);
        assert!((m.saturation_power() - 224.0).abs() < 1e-9);
    }
}
