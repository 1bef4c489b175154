//! Hanbury Brown–Twiss cross-correlation of two detector channels.
//!
//! Delays are τ = t_B − t_A. Every A/B pair with |τ| < W is counted (full
//! cross-correlation, not start-stop) into bin `floor(τ / bin) + W / bin`,
//! so bins are half-open `[lo, hi)` intervals.

use crate::error::{domain, Error, Result};
use crate::sim::{Channel, TimeTagStream};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoincidenceHistogram {
    pub bin_width_ps: u64,
    /// Half-width W of the delay window; delays span [−W, W).
    pub window_ps: u64,
    pub counts: Vec<u64>,
    pub n_a: u64,
    pub n_b: u64,
    pub duration_ps: u64,
}

impl CoincidenceHistogram {
    /// All-zero histogram with the given geometry.
    pub fn zeros(bin_width_ps: u64, window_ps: u64) -> Result<Self> {
        let n = n_bins(bin_width_ps, window_ps)?;
        Ok(Self {
            bin_width_ps,
            window_ps,
            counts: vec![0; n],
            n_a: 0,
            n_b: 0,
            duration_ps: 0,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    /// Delay at the centre of bin `i`, ps.
    pub fn bin_center_ps(&self, i: usize) -> f64 {
        (i as f64 - (self.window_ps / self.bin_width_ps) as f64 + 0.5) * self.bin_width_ps as f64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn same_geometry(&self, other: &Self) -> bool {
        self.bin_width_ps == other.bin_width_ps && self.window_ps == other.window_ps
    }
}

fn n_bins(bin_width_ps: u64, window_ps: u64) -> Result<usize> {
    if bin_width_ps == 0 || window_ps == 0 {
        return domain("bin width and window must be > 0");
    }
    if !window_ps.is_multiple_of(bin_width_ps) {
        return domain(format!(
            "window {window_ps} ps is not a multiple of bin width {bin_width_ps} ps"
        ));
    }
    Ok((2 * window_ps / bin_width_ps) as usize)
}

/// Adds all pairs `a[i]`, `b[j]` with |b − a| < W to `counts`.
///
/// `b` must be sorted; `a` must be sorted for the sliding lower bound.
fn accumulate(a: &[u64], b: &[u64], bin_width: u64, window: u64, counts: &mut [u64]) {
    let half = (window / bin_width) as i64;
    let bw = bin_width as i64;
    let mut lo = 0usize;
    for &ta in a {
        while lo < b.len() && b[lo] + window <= ta {
            lo += 1;
        }
        let hi_t = ta + window;
        for &tb in &b[lo..] {
            if tb >= hi_t {
                break;
            }
            let d = tb as i64 - ta as i64;
            counts[(d.div_euclid(bw) + half) as usize] += 1;
        }
    }
}

/// Coincidence histogram of channel B against channel A.
pub fn coincidence_histogram(
    stream: &TimeTagStream,
    bin_width_ps: u64,
    window_ps: u64,
) -> Result<CoincidenceHistogram> {
    let mut h = CoincidenceHistogram::zeros(bin_width_ps, window_ps)?;
    let a = stream.channel_times(Channel::A);
    let b = stream.channel_times(Channel::B);
    accumulate(&a, &b, bin_width_ps, window_ps, &mut h.counts);
    h.n_a = a.len() as u64;
    h.n_b = b.len() as u64;
    h.duration_ps = stream.duration_ps();
    Ok(h)
}

/// Same histogram as [`coincidence_histogram`], accumulated over `chunks`
/// equal time slices. Each slice takes the A clicks inside it and the B
/// clicks inside it widened by a margin W on either side, so pairs that
/// straddle slice boundaries are counted exactly once.
#[cfg(feature = "parallel")]
pub fn coincidence_histogram_chunked(
    stream: &TimeTagStream,
    bin_width_ps: u64,
    window_ps: u64,
    chunks: usize,
) -> Result<CoincidenceHistogram> {
    use rayon::prelude::*;

    let mut h = CoincidenceHistogram::zeros(bin_width_ps, window_ps)?;
    let a = stream.channel_times(Channel::A);
    let b = stream.channel_times(Channel::B);
    let chunks = chunks.max(1) as u64;
    let duration = stream.duration_ps();
    let span = duration.div_ceil(chunks);
    let partials: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let t0 = k * span;
            let t1 = (t0 + span).min(duration);
            let a_lo = a.partition_point(|&t| t < t0);
            let a_hi = a.partition_point(|&t| t < t1);
            let b_lo = b.partition_point(|&t| t + window_ps <= t0);
            let b_hi = b.partition_point(|&t| t < t1.saturating_add(window_ps));
            let mut counts = vec![0u64; h.counts.len()];
            accumulate(
                &a[a_lo..a_hi],
                &b[b_lo..b_hi],
                bin_width_ps,
                window_ps,
                &mut counts,
            );
            counts
        })
        .collect();
    for part in partials {
        for (c, p) in h.counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    h.n_a = a.len() as u64;
    h.n_b = b.len() as u64;
    h.duration_ps = duration;
    Ok(h)
}

/// Bin-wise sum of two histograms from disjoint runs.
pub fn merge_histograms(
    h1: &CoincidenceHistogram,
    h2: &CoincidenceHistogram,
) -> Result<CoincidenceHistogram> {
    if !h1.same_geometry(h2) {
        return Err(Error::Geometry(format!(
            "histograms differ: bin {} ps / window {} ps vs bin {} ps / window {} ps",
            h1.bin_width_ps, h1.window_ps, h2.bin_width_ps, h2.window_ps
        )));
    }
    Ok(CoincidenceHistogram {
        bin_width_ps: h1.bin_width_ps,
        window_ps: h1.window_ps,
        counts: h1
            .counts
            .iter()
            .zip(&h2.counts)
            .map(|(a, b)| a + b)
            .collect(),
        n_a: h1.n_a + h2.n_a,
        n_b: h1.n_b + h2.n_b,
        duration_ps: h1.duration_ps + h2.duration_ps,
    })
}

/// Normalized second-order correlation with per-bin standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    pub tau_ps: Vec<f64>,
    pub g2: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl G2Curve {
    pub fn len(&self) -> usize {
        self.g2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g2.is_empty()
    }

    pub fn min_g2(&self) -> f64 {
        self.g2.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest |τ| sampled, ps.
    pub fn max_abs_tau_ps(&self) -> f64 {
        self.tau_ps.iter().map(|t| t.abs()).fold(0.0, f64::max)
    }
}

/// g²[i] = counts[i]·T / (n_A·n_B·Δτ).
///
/// Empty bins get σ of a single count, an upper bound on their uncertainty.
pub fn normalize_g2(h: &CoincidenceHistogram) -> Result<G2Curve> {
    if h.n_a == 0 || h.n_b == 0 {
        return domain("cannot normalize: a channel has no counts");
    }
    if h.duration_ps == 0 {
        return domain("cannot normalize: zero duration");
    }
    let scale = h.duration_ps as f64 / (h.n_a as f64 * h.n_b as f64 * h.bin_width_ps as f64);
    let tau_ps = (0..h.n_bins()).map(|i| h.bin_center_ps(i)).collect();
    let g2 = h.counts.iter().map(|&c| c as f64 * scale).collect();
    let sigma = h
        .counts
        .iter()
        .map(|&c| (c.max(1) as f64).sqrt() * scale)
        .collect();
    Ok(G2Curve { tau_ps, g2, sigma })
}


#[cfg(all(test, feature = "parallel"))]
mod proptests {
    use super::*;
    use crate::sim::TimeTag;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn total_counts_equal_pairs_in_window(
            mut a in proptest::collection::vec(0u64..1_000_000, 0..60),
            mut b in proptest::collection::vec(0u64..1_000_000, 0..60),
            bins in 1u64..40, bw in 1u64..5000,
        ) {
            a.sort_unstable();
            b.sort_unstable();
            let w = bins * bw;
            let mut tags: Vec<TimeTag> = a.iter().map(|&t| TimeTag { t, channel: Channel::A })
                .chain(b.iter().map(|&t| TimeTag { t, channel: Channel::B })).collect();
            tags.sort_by_key(|t| (t.t, t.channel));
            let s = TimeTagStream::new(tags, 1_000_000).unwrap();
            let h = coincidence_histogram(&s, bw, w).unwrap();
            let pairs = a.iter().flat_map(|x| b.iter().map(move |y| (*x as i64 - *y as i64).abs()))
                .filter(|&d| d < w as i64).count() as u64;
            prop_assert_eq!(h.total(), pairs);
            let c = coincidence_histogram_chunked(&s, bw, w, 5).unwrap();
            prop_assert_eq!(c, h);
        }
    }
}
