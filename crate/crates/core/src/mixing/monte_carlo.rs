use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{Labeler, StateSampler};
use crate::color::{region_census, RegionLabel};
use crate::error::{Error, Result};
use crate::lattice::DEFAULT_ENUMERATION_BITS;
use crate::rng::RngSeed;
use crate::stats::{wilson_interval, Interval};

/// Below `samples / |D|` of this the plug-in TV is dominated by its bias.
const ADEQUATE_SAMPLES_PER_STATE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTvEstimate {
    pub source: String,
    pub start: u64,
    pub samples: u64,
    pub seed: RngSeed,
    /// Plug-in estimate `½ Σ_Y |p̂(Y) − 1/|D||`, not bias-corrected.
    pub tv: f64,
    /// Upper bound `√(|D| / 4N)` on the plug-in bias at the uniform distribution.
    pub bias: f64,
    /// Sub-Gaussian scale `1/(2√N)` from bounded differences (one sample moves the estimate by ≤ 1/N).
    pub sigma: f64,
    pub distinct_count: f64,
    pub observed_support: u64,
    /// Samples that left the distinct tuples; always 0 for permutation samplers.
    pub left_distinct: u64,
    /// Fewer than 50·|D| samples.
    pub low_samples: bool,
}

fn draw_all(sampler: &dyn StateSampler, x: u64, samples: u64, seed: RngSeed) -> Vec<u64> {
    let mut out: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| sampler.sample(x, seed.child(i)))
        .collect();
    out.par_sort_unstable();
    out
}

/// Monte Carlo TV distance from `x`'s end state to uniform on distinct tuples.
/// Sample `i` uses stream `seed.child(i)`, so the result does not depend on
/// the thread count.
pub fn mc_tv_estimate(sampler: &dyn StateSampler, x: u64, samples: u64, seed: RngSeed) -> Result<McTvEstimate> {
    let shape = *sampler.shape();
    let labeler = Labeler::new(&shape)?;
    if labeler.label(x) == RegionLabel::Ident {
        return Err(Error::domain(format!("state {x} has two equal members")));
    }
    if samples == 0 {
        return Err(Error::domain("at least one sample is required"));
    }
    let census = region_census(&shape, DEFAULT_ENUMERATION_BITS)?;
    let d = census.distinct as f64;
    let outcomes = draw_all(sampler, x, samples, seed);
    let n = samples as f64;
    let mut l1 = 0.0;
    let mut support = 0u64;
    let mut left = 0u64;
    for run in outcomes.chunk_by(|a, b| a == b) {
        let p = run.len() as f64 / n;
        if labeler.label(run[0]) == RegionLabel::Ident {
            left += run.len() as u64;
            l1 += p;
        } else {
            support += 1;
            l1 += (p - 1.0 / d).abs();
        }
    }
    // unobserved distinct tuples each contribute 1/|D|
    l1 += (d - support as f64) / d;
    Ok(McTvEstimate {
        source: sampler.describe(),
        start: x,
        samples,
        seed,
        tv: (0.5 * l1).clamp(0.0, 1.0),
        bias: (d / (4.0 * n)).sqrt(),
        sigma: 0.5 / n.sqrt(),
        distinct_count: d,
        observed_support: support,
        left_distinct: left,
        low_samples: n < ADEQUATE_SAMPLES_PER_STATE * d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRate {
    pub source: String,
    pub start: u64,
    pub samples: u64,
    pub seed: RngSeed,
    pub hits: u64,
    pub rate: f64,
    /// Wilson 95% interval.
    pub interval: Interval,
    pub left_distinct: u64,
}

/// Fraction of trajectories from `x` that end in `B_coll`. `sampler` should
/// perform one row step then one column step.
pub fn mc_collision_rate(sampler: &dyn StateSampler, x: u64, samples: u64, seed: RngSeed) -> Result<CollisionRate> {
    let labeler = Labeler::new(sampler.shape())?;
    if labeler.label(x) == RegionLabel::Ident {
        return Err(Error::domain(format!("state {x} has two equal members")));
    }
    let (hits, left) = (0..samples)
        .into_par_iter()
        .map(|i| match labeler.label(sampler.sample(x, seed.child(i))) {
            RegionLabel::Coll => (1u64, 0u64),
            RegionLabel::Ident => (0, 1),
            RegionLabel::Safe => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(CollisionRate {
        source: sampler.describe(),
        start: x,
        samples,
        seed,
        hits,
        rate: if samples > 0 { hits as f64 / samples as f64 } else { 0.0 },
        interval: wilson_interval(hits, samples, 0.95),
        left_distinct: left,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HammingTail {
    pub slice_bits: u32,
    /// Pairs counted when their Hamming distance is at most this.
    pub threshold: u32,
    pub samples: u64,
    pub hits: u64,
    pub rate: f64,
    pub sigma: f64,
    /// `e^{−bits/16}`.
    pub bound: f64,
    pub pass: bool,
}

/// Empirical `Pr[d(y, y′) ≤ bits/4]` for a uniform pair of distinct `bits`-bit
/// slice values, against the Hoeffding-type bound `e^{−bits/16}`.
pub fn hamming_tail(slice_bits: u32, samples: u64, seed: RngSeed) -> Result<HammingTail> {
    if !(1..=64).contains(&slice_bits) {
        return Err(Error::domain(format!("slice width {slice_bits} must be in 1..=64")));
    }
    if samples == 0 {
        return Err(Error::domain("at least one sample is required"));
    }
    let mask = if slice_bits == 64 {
        u64::MAX
    } else {
        (1u64 << slice_bits) - 1
    };
    let threshold = slice_bits / 4;
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.child(i).rng();
            let a = rng.gen::<u64>() & mask;
            let b = loop {
                let b = rng.gen::<u64>() & mask;
                if b != a {
                    break b;
                }
            };
            ((a ^ b).count_ones() <= threshold) as u64
        })
        .sum();
    let n = samples as f64;
    let rate = hits as f64 / n;
    let sigma = (rate * (1.0 - rate) / n).sqrt();
    let bound = (-(slice_bits as f64) / 16.0).exp();
    Ok(HammingTail {
        slice_bits,
        threshold,
        samples,
        hits,
        rate,
        sigma,
        bound,
        pass: rate <= bound + 3.0 * sigma,
    })
}
