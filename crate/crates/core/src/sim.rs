//! Event-driven photon emission and the detector chain that turns emissions
//! into channel-tagged clicks.
//!
//! Emission follows the exact stochastic simulation of the rate matrix: the
//! dwell time in each level is exponential in that level's exit rate, the next
//! level is chosen in proportion to the outgoing rates, and every 2 → 1 jump
//! produces a photon. [`simulate_run`] samples the collected photons directly
//! instead (see [`CollectedIter`]). The chain then applies, in order: thinning by η,
//! beamsplitter routing, Poisson dark/background injection, Gaussian jitter,
//! sorting and quantization to 1 ps, and per-channel non-paralyzable dead time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Geometric, Poisson, StandardNormal};

use crate::emitter::{EmitterModel, PumpPower, RateMatrix};
use crate::error::{domain, Error, Result};
use crate::PS_PER_S;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    A,
    B,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::A => 0,
            Channel::B => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(Channel::A),
            1 => Some(Channel::B),
            _ => None,
        }
    }
}

/// Detector click: integer picoseconds since run start plus channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeTag {
    pub t: u64,
    pub channel: Channel,
}

/// Time-ordered clicks from both detectors over a fixed run duration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeTagStream {
    tags: Vec<TimeTag>,
    duration_ps: u64,
    counts: [u64; 2],
}

impl TimeTagStream {
    /// Checks ordering and that every tag lies inside `[0, duration)`.
    pub fn new(tags: Vec<TimeTag>, duration_ps: u64) -> Result<Self> {
        if duration_ps == 0 {
            return domain("stream duration must be > 0 ps");
        }
        if let Some(i) = tags.windows(2).position(|w| w[1].t < w[0].t) {
            return domain(format!("tags not sorted at index {}", i + 1));
        }
        if let Some(last) = tags.last() {
            if last.t >= duration_ps {
                return domain(format!(
                    "tag at {} ps outside run duration {} ps",
                    last.t, duration_ps
                ));
            }
        }
        let mut counts = [0u64; 2];
        for tag in &tags {
            counts[tag.channel.index()] += 1;
        }
        Ok(Self {
            tags,
            duration_ps,
            counts,
        })
    }

    pub fn empty(duration_ps: u64) -> Result<Self> {
        Self::new(Vec::new(), duration_ps)
    }

    pub fn tags(&self) -> &[TimeTag] {
        &self.tags
    }

    pub fn duration_ps(&self) -> u64 {
        self.duration_ps
    }

    pub fn count(&self, channel: Channel) -> u64 {
        self.counts[channel.index()]
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Timestamps of one channel, in order.
    pub fn channel_times(&self, channel: Channel) -> Vec<u64> {
        self.tags
            .iter()
            .filter(|t| t.channel == channel)
            .map(|t| t.t)
            .collect()
    }

    /// Total click rate in counts/s.
    pub fn rate(&self) -> f64 {
        self.tags.len() as f64 * PS_PER_S / self.duration_ps as f64
    }

    /// Same clicks with channels A and B exchanged.
    pub fn swap_channels(&self) -> Self {
        let tags = self
            .tags
            .iter()
            .map(|t| TimeTag {
                t: t.t,
                channel: match t.channel {
                    Channel::A => Channel::B,
                    Channel::B => Channel::A,
                },
            })
            .collect();
        Self {
            tags,
            duration_ps: self.duration_ps,
            counts: [self.counts[1], self.counts[0]],
        }
    }

    fn from_channels(a: Vec<u64>, b: Vec<u64>, duration_ps: u64) -> Self {
        let counts = [a.len() as u64, b.len() as u64];
        let mut tags = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] <= b[j]) {
                tags.push(TimeTag {
                    t: a[i],
                    channel: Channel::A,
                });
                i += 1;
            } else {
                tags.push(TimeTag {
                    t: b[j],
                    channel: Channel::B,
                });
                j += 1;
            }
        }
        Self {
            tags,
            duration_ps,
            counts,
        }
    }
}

/// Sorted merge of two runs of equal duration; ties keep `a` first.
pub fn merge_streams(a: &TimeTagStream, b: &TimeTagStream) -> Result<TimeTagStream> {
    if a.duration_ps != b.duration_ps {
        return Err(Error::Geometry(format!(
            "stream durations differ: {} ps vs {} ps",
            a.duration_ps, b.duration_ps
        )));
    }
    let mut tags = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.tags.len() || j < b.tags.len() {
        if j == b.tags.len() || (i < a.tags.len() && a.tags[i].t <= b.tags[j].t) {
            tags.push(a.tags[i]);
            i += 1;
        } else {
            tags.push(b.tags[j]);
            j += 1;
        }
    }
    Ok(TimeTagStream {
        tags,
        duration_ps: a.duration_ps,
        counts: [a.counts[0] + b.counts[0], a.counts[1] + b.counts[1]],
    })
}

/// Detector-side parameters of the HBT setup.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionChain {
    /// Overall collection × detection efficiency η.
    pub efficiency: f64,
    /// Probability that a collected photon goes to channel A.
    pub split_ratio: f64,
    /// Non-paralyzable dead time per channel, ps.
    pub dead_time_ps: u64,
    /// Dark counts per channel, counts/s.
    pub dark_rate: f64,
    /// Uncorrelated background per channel, counts/s.
    pub background_rate: f64,
    /// Gaussian timing jitter per click, ps.
    pub jitter_sigma_ps: f64,
}

impl DetectionChain {
    /// Passes every emission to channel A untouched.
    pub fn identity() -> Self {
        Self {
            efficiency: 1.0,
            split_ratio: 1.0,
            dead_time_ps: 0,
            dark_rate: 0.0,
            background_rate: 0.0,
            jitter_sigma_ps: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return domain(format!(
                "efficiency must lie in (0, 1], got {}",
                self.efficiency
            ));
        }
        if !(0.0..=1.0).contains(&self.split_ratio) {
            return domain(format!(
                "split ratio must lie in [0, 1], got {}",
                self.split_ratio
            ));
        }
        for (name, v) in [
            ("dark rate", self.dark_rate),
            ("background rate", self.background_rate),
            ("jitter sigma", self.jitter_sigma_ps),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return domain(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// Per-channel background rate that makes the emitter's share of a channel
/// equal `rho`, given the emitter's detected rate on that channel. Dark counts
/// already present are subtracted from the budget.
pub fn background_for_signal_fraction(signal_rate: f64, rho: f64, dark_rate: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return domain(format!("signal fraction must lie in (0, 1], got {rho}"));
    }
    let needed = signal_rate * (1.0 - rho) / rho;
    if needed < dark_rate {
        return domain("dark counts alone exceed the requested background");
    }
    Ok(needed - dark_rate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub duration_ps: u64,
    pub seed: u64,
    pub power: PumpPower,
}

impl RunConfig {
    pub fn new(duration_s: f64, seed: u64, power: PumpPower) -> Result<Self> {
        let duration_ps = (duration_s * PS_PER_S).round();
        if !(duration_ps >= 1.0) || duration_ps > u64::MAX as f64 {
            return domain(format!("run duration must be > 0, got {duration_s} s"));
        }
        Ok(Self {
            duration_ps: duration_ps as u64,
            seed,
            power,
        })
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_ps as f64 / PS_PER_S
    }
}

// Independent ChaCha streams derived from the run seed.
const STREAM_EMISSION: u64 = 0;
const STREAM_ROUTING: u64 = 1;
const STREAM_INJECT_A: u64 = 2;
const STREAM_INJECT_B: u64 = 3;
const STREAM_JITTER: u64 = 4;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
struct LevelExits {
    total: f64,
    /// (target level index, cumulative probability)
    targets: Vec<(usize, f64)>,
}

/// Lazily generated emission times (continuous picoseconds) of one run.
#[derive(Debug, Clone)]
pub struct EmissionIter {
    exits: Vec<LevelExits>,
    level: usize,
    t_ps: f64,
    end_ps: f64,
    rng: ChaCha8Rng,
}

impl EmissionIter {
    fn new(rates: &RateMatrix, run: &RunConfig) -> Self {
        let n = rates.n_levels();
        let exits = (1..=n)
            .map(|from| {
                let total = rates.exit_rate(from);
                let mut acc = 0.0;
                let mut targets: Vec<(usize, f64)> = (1..=n)
                    .filter(|&to| rates.rate(from, to) > 0.0)
                    .map(|to| {
                        acc += rates.rate(from, to) / total;
                        (to - 1, acc)
                    })
                    .collect();
                if let Some(last) = targets.last_mut() {
                    last.1 = 1.0;
                }
                LevelExits { total, targets }
            })
            .collect();
        Self {
            exits,
            level: 0,
            t_ps: 0.0,
            end_ps: run.duration_ps as f64,
            rng: rng_for(run.seed, STREAM_EMISSION),
        }
    }
}

impl Iterator for EmissionIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        loop {
            let exits = &self.exits[self.level];
            if exits.total <= 0.0 || self.t_ps >= self.end_ps {
                // Absorbing level or end of run.
                self.t_ps = self.end_ps;
                return None;
            }
            let dwell: f64 = Exp1.sample(&mut self.rng);
            self.t_ps += dwell / exits.total * PS_PER_S;
            if self.t_ps >= self.end_ps {
                return None;
            }
            let next = if exits.targets.len() == 1 {
                exits.targets[0].0
            } else {
                let u: f64 = self.rng.random();
                exits
                    .targets
                    .iter()
                    .find(|(_, c)| u < *c)
                    .map(|(to, _)| *to)
                    .unwrap_or(exits.targets[exits.targets.len() - 1].0)
            };
            let emitted = self.level == 1 && next == 0;
            self.level = next;
            if emitted {
                return Some(self.t_ps);
            }
        }
    }
}

/// Streaming form of [`simulate_emission`]; the run starts in the ground state.
pub fn emission_iter(model: &EmitterModel, run: &RunConfig) -> EmissionIter {
    EmissionIter::new(&model.rates_at(run.power), run)
}

/// All 2 → 1 emission times of one run, in ps.
pub fn simulate_emission(model: &EmitterModel, run: &RunConfig) -> Vec<f64> {
    emission_iter(model, run).collect()
}

/// Times (ps) of the photons that survive collection efficiency η, drawn
/// without visiting the discarded ones.
///
/// Every emission returns the emitter to the ground state, so gaps between
/// emissions are independent. The gap to the next collected photon spans
/// N ~ 1 + Geometric(η) emission cycles. Each excitation (rate k12) decays
/// from level 2 at k21 + k23 and emits with probability k21/(k21 + k23);
/// otherwise it shelves for an Exp(k31) dwell and the cycle restarts. With S
/// shelvings over N cycles the dwell sums are Gamma(N + S, k12),
/// Gamma(N + S, k21 + k23) and Gamma(S, k31), and S is negative binomial,
/// drawn as Poisson(Gamma(N, (1 − p)/p)).
#[derive(Debug, Clone)]
pub struct CollectedIter {
    k12: f64,
    k_decay: f64,
    k31: f64,
    p_emit: f64,
    cycles: Geometric,
    t_ps: f64,
    end_ps: f64,
    rng: ChaCha8Rng,
}

impl CollectedIter {
    pub fn new(model: &EmitterModel, run: &RunConfig, efficiency: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return domain(format!("efficiency must lie in (0, 1], got {efficiency}"));
        }
        let k_decay = model.k21() + model.k23();
        Ok(Self {
            k12: model.pump_rate(run.power),
            k_decay,
            k31: model.k31(),
            p_emit: model.k21() / k_decay,
            cycles: Geometric::new(efficiency).map_err(|e| Error::Domain(e.to_string()))?,
            t_ps: 0.0,
            end_ps: run.duration_ps as f64,
            rng: rng_for(run.seed, STREAM_EMISSION),
        })
    }

    fn gamma(&mut self, shape: f64, rate: f64) -> f64 {
        Gamma::new(shape, 1.0 / rate)
            .expect("positive shape and rate")
            .sample(&mut self.rng)
    }
}

impl Iterator for CollectedIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.k12 <= 0.0 || self.t_ps >= self.end_ps {
            return None;
        }
        let n = 1.0 + self.cycles.sample(&mut self.rng) as f64;
        let shelved = if self.p_emit < 1.0 {
            let mean = self.gamma(n, self.p_emit / (1.0 - self.p_emit));
            if mean > 0.0 {
                Poisson::new(mean)
                    .expect("positive mean")
                    .sample(&mut self.rng)
            } else {
                0.0
            }
        } else {
            0.0
        };
        let excitations = n + shelved;
        let mut dt = self.gamma(excitations, self.k12) + self.gamma(excitations, self.k_decay);
        if shelved > 0.0 {
            dt += self.gamma(shelved, self.k31);
        }
        self.t_ps += dt * PS_PER_S;
        if self.t_ps >= self.end_ps {
            self.t_ps = self.end_ps;
            return None;
        }
        Some(self.t_ps)
    }
}

fn poisson_times(rng: &mut ChaCha8Rng, rate: f64, end_ps: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if rate <= 0.0 {
        return out;
    }
    let mean_gap = PS_PER_S / rate;
    let mut t = 0.0;
    loop {
        let gap: f64 = Exp1.sample(rng);
        t += gap * mean_gap;
        if t >= end_ps {
            return out;
        }
        out.push(t);
    }
}

fn merge_sorted(a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out
}

fn apply_dead_time(times: &mut Vec<u64>, dead_time_ps: u64) {
    if dead_time_ps == 0 {
        return;
    }
    let mut last: Option<u64> = None;
    times.retain(|&t| match last {
        Some(l) if t - l < dead_time_ps => false,
        _ => {
            last = Some(t);
            true
        }
    });
}

/// Turns emission times (sorted, ps) into detector clicks.
///
/// Clicks pushed outside `[0, duration)` by jitter are dropped.
pub fn apply_detection_chain<I>(
    emissions: I,
    chain: &DetectionChain,
    run: &RunConfig,
) -> Result<TimeTagStream>
where
    I: IntoIterator<Item = f64>,
{
    chain.validate()?;
    let end_ps = run.duration_ps as f64;
    let mut routing = rng_for(run.seed, STREAM_ROUTING);
    let mut signal: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut last = f64::NEG_INFINITY;
    for t in emissions {
        if t < last {
            return domain("emission times must be sorted");
        }
        last = t;
        if chain.efficiency < 1.0 && routing.random::<f64>() >= chain.efficiency {
            continue;
        }
        let to_a = match chain.split_ratio {
            r if r >= 1.0 => true,
            r if r <= 0.0 => false,
            r => routing.random::<f64>() < r,
        };
        signal[if to_a { 0 } else { 1 }].push(t);
    }

    let inject_rate = chain.dark_rate + chain.background_rate;
    let mut jitter = rng_for(run.seed, STREAM_JITTER);
    let mut channels: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for (ch, stream) in [(0usize, STREAM_INJECT_A), (1usize, STREAM_INJECT_B)] {
        let mut rng = rng_for(run.seed, stream);
        let injected = poisson_times(&mut rng, inject_rate, end_ps);
        let clicks = merge_sorted(std::mem::take(&mut signal[ch]), injected);
        let mut out: Vec<u64> = Vec::with_capacity(clicks.len());
        for t in clicks {
            let t = if chain.jitter_sigma_ps > 0.0 {
                let z: f64 = StandardNormal.sample(&mut jitter);
                t + z * chain.jitter_sigma_ps
            } else {
                t
            };
            let q = t.round();
            if q >= 0.0 && q < end_ps {
                out.push(q as u64);
            }
        }
        out.sort_unstable();
        apply_dead_time(&mut out, chain.dead_time_ps);
        channels[ch] = out;
    }
    let [a, b] = channels;
    Ok(TimeTagStream::from_channels(a, b, run.duration_ps))
}

/// Collected photons of one run followed by the rest of the detection chain.
///
/// Statistically identical to thinning [`emission_iter`] by η, at a cost
/// proportional to the detected rather than the emitted photons.
pub fn simulate_run(
    model: &EmitterModel,
    chain: &DetectionChain,
    run: &RunConfig,
) -> Result<TimeTagStream> {
    chain.validate()?;
    let collected = CollectedIter::new(model, run, chain.efficiency)?;
    let rest = DetectionChain {
        efficiency: 1.0,
        ..chain.clone()
    };
    apply_detection_chain(collected, &rest, run)
}

/// Two independent Poisson channels at the given rates; useful as a
/// g² ≡ 1 reference.
pub fn poisson_stream(rate_a: f64, rate_b: f64, run: &RunConfig) -> Result<TimeTagStream> {
    if !(rate_a >= 0.0 && rate_b >= 0.0) {
        return domain("rates must be >= 0");
    }
    let end_ps = run.duration_ps as f64;
    let quantize = |v: Vec<f64>| -> Vec<u64> {
        let mut q: Vec<u64> = v
            .into_iter()
            .map(|t| t.round() as u64)
            .filter(|&t| t < run.duration_ps)
            .collect();
        q.sort_unstable();
        q
    };
    let a = quantize(poisson_times(
        &mut rng_for(run.seed, STREAM_INJECT_A),
        rate_a,
        end_ps,
    ));
    let b = quantize(poisson_times(
        &mut rng_for(run.seed, STREAM_INJECT_B),
        rate_b,
        end_ps,
    ));
    Ok(TimeTagStream::from_channels(a, b, run.duration_ps))
}
