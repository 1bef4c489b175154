use photon_stats::correlator::{coincidence_histogram, normalize_g2};
use photon_stats::emitter::{steady_state, EmitterModel, PumpPower};
use photon_stats::estimators::{fit_antibunching, fit_saturation, RatePoint};
use photon_stats::sim::{simulate_run, Channel, DetectionChain, RunConfig};

fn split_chain(efficiency: f64) -> DetectionChain {
    DetectionChain {
        efficiency,
        split_ratio: 0.5,
        ..DetectionChain::identity()
    }
}

/// Bins away from zero delay against the closed-form three-level g².
#[test]
fn three_level_histogram_follows_closed_form() {
    let model = EmitterModel::three_level(7.3529e7, 5e6, 3e5, 3.2825e5).unwrap();
    let power = PumpPower::new(500.0).unwrap();
    let run = RunConfig::new(2.0, 17, power).unwrap();
    let stream = simulate_run(&model, &split_chain(0.05), &run).unwrap();
    let h = coincidence_histogram(&stream, 4000, 400_000).unwrap();
    let curve = normalize_g2(&h).unwrap();

    let mut chi2 = 0.0;
    let mut n = 0;
    for i in 0..curve.len() {
        let tau = curve.tau_ps[i];
        if tau.abs() < 20_000.0 {
            continue;
        }
        let want = model.g2(tau * 1e-12, power, 1.0).unwrap();
        let z = (curve.g2[i] - want) / curve.sigma[i];
        chi2 += z * z;
        n += 1;
    }
    let reduced = chi2 / n as f64;
    assert!(
        (0.6..1.5).contains(&reduced),
        "reduced chi2 {reduced} over {n} bins"
    );
    // the shelving bunching is visible well above 1
    assert!(curve.g2.iter().cloned().fold(0.0, f64::max) > 1.5);
}

#[test]
fn channel_counts_follow_steady_state() {
    let model = EmitterModel::two_level(7.3529e7, 3.2825e5).unwrap();
    let power = PumpPower::new(250.0).unwrap();
    let run = RunConfig::new(0.5, 3, power).unwrap();
    let eta = 0.02;
    let stream = simulate_run(&model, &split_chain(eta), &run).unwrap();
    let ss = steady_state(&model, power, eta).unwrap();
    let want = ss.detected_rate * run.duration_s() / 2.0;
    for ch in [Channel::A, Channel::B] {
        let got = stream.count(ch) as f64;
        assert!(
            (got - want).abs() < 5.0 * want.sqrt(),
            "{ch:?}: {got} vs {want}"
        );
    }
}

#[test]
fn antibunching_fit_recovers_total_rate() {
    let (k21, kappa) = (7.3529e7, 3.2825e5);
    let model = EmitterModel::two_level(k21, kappa).unwrap();
    for (p, seed) in [(200.0, 1), (800.0, 2)] {
        let run = RunConfig::new(4.0, seed, PumpPower::new(p).unwrap()).unwrap();
        let stream = simulate_run(&model, &split_chain(0.0245), &run).unwrap();
        let curve = normalize_g2(&coincidence_histogram(&stream, 500, 100_000).unwrap()).unwrap();
        let fit = fit_antibunching(&curve, None).unwrap();
        let k_t = fit.get("k_T").unwrap();
        let sigma = fit.sigma("k_T").unwrap();
        let want = k21 + kappa * p;
        assert!(
            (k_t - want).abs() < 4.0 * sigma,
            "{p} uW: {k_t} ± {sigma} vs {want}"
        );
        let rho2 = fit.get("rho2").unwrap();
        assert!(
            (rho2 - 1.0).abs() < 4.0 * fit.sigma("rho2").unwrap(),
            "rho2 {rho2}"
        );
    }
}

#[test]
fn saturation_fit_on_simulated_counts() {
    let model = EmitterModel::two_level(7.3529e7, 3.2825e5).unwrap();
    let eta = 0.0245;
    let points: Vec<RatePoint> = [25.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0]
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let run = RunConfig::new(0.2, 100 + i as u64, PumpPower::new(p).unwrap()).unwrap();
            let s = simulate_run(&model, &split_chain(eta), &run).unwrap();
            let n = s.len() as f64;
            RatePoint {
                power_uw: p,
                rate: n / 0.2,
                sigma: n.sqrt() / 0.2,
            }
        })
        .collect();
    let fit = fit_saturation(&points).unwrap();
    let p_sat = fit.get("p_sat").unwrap();
    let i_sat = fit.get("i_sat").unwrap();
    assert!((p_sat - model.saturation_power()).abs() < 4.0 * fit.sigma("p_sat").unwrap());
    assert!((i_sat - eta * 7.3529e7).abs() < 4.0 * fit.sigma("i_sat").unwrap());
}
