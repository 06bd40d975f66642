//! Monte Carlo estimate of how often two random elements of order `k`
//! generate the alternating or symmetric group.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{classify, Classification};
use crate::perm::{Parity, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimateError {
    #[error("unknown sampler {0:?} (expected max_disjoint_k_cycles or uniform_order_k)")]
    InvalidSampler(String),
    #[error("trials must be at least 1")]
    TrialsZero,
    #[error("no element of order {k} on {n} points")]
    NoSuchElement { k: usize, n: usize },
    #[error("exhaustive enumeration limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// `floor(n/k)` disjoint `k`-cycles placed uniformly at random.
    MaxDisjointKCycles,
    /// A uniform random permutation, conditioned on having order exactly `k`.
    UniformOrderK,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::MaxDisjointKCycles => "max_disjoint_k_cycles",
            Sampler::UniformOrderK => "uniform_order_k",
        })
    }
}

impl FromStr for Sampler {
    type Err = EstimateError;
    fn from_str(s: &str) -> Result<Self, EstimateError> {
        match s {
            "max_disjoint_k_cycles" | "max_disjoint" => Ok(Sampler::MaxDisjointKCycles),
            "uniform_order_k" | "uniform" => Ok(Sampler::UniformOrderK),
            other => Err(EstimateError::InvalidSampler(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub k: usize,
    pub n: usize,
    pub sampler: Sampler,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Wilson score interval at 95% confidence.
    pub interval: (f64, f64),
    pub seed: u64,
}

/// Standard normal 0.975 quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z_95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    // the closed form is exact at the ends; pin them against rounding
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn prime_power_parts(mut k: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut p = 2;
    while p * p <= k {
        if k.is_multiple_of(p) {
            let mut q = 1;
            while k.is_multiple_of(p) {
                k /= p;
                q *= p;
            }
            parts.push(q);
        }
        p += 1;
    }
    if k > 1 {
        parts.push(k);
    }
    parts
}

/// Some permutation of `n` points has order exactly `k`.
pub fn order_exists(k: usize, n: usize) -> bool {
    k >= 1 && prime_power_parts(k).iter().sum::<usize>() <= n
}

fn check_domain(k: usize, n: usize, sampler: Sampler) -> Result<(), EstimateError> {
    let ok = match sampler {
        Sampler::MaxDisjointKCycles => k >= 2 && k <= n,
        Sampler::UniformOrderK => k >= 2 && order_exists(k, n),
    };
    if ok {
        Ok(())
    } else {
        Err(EstimateError::NoSuchElement { k, n })
    }
}

fn sample(k: usize, n: usize, sampler: Sampler, rng: &mut ChaCha8Rng) -> Permutation {
    let mut points: Vec<usize> = (0..n).collect();
    match sampler {
        Sampler::MaxDisjointKCycles => {
            points.shuffle(rng);
            let cycles: Vec<&[usize]> = points[..(n / k) * k].chunks(k).collect();
            Permutation::from_cycles(n, &cycles).expect("disjoint cycles")
        }
        Sampler::UniformOrderK => loop {
            points.shuffle(rng);
            let p = Permutation::from_images(points.clone()).expect("a shuffle is a permutation");
            if p.has_order(k as u64) {
                return p;
            }
        },
    }
}

/// The pair generates `Sym(n)` (some generator odd) or `Alt(n)` (both even).
fn generates_target(x: &Permutation, y: &Permutation) -> bool {
    let target = if x.parity() == Parity::Odd || y.parity() == Parity::Odd {
        Classification::Symmetric
    } else {
        Classification::Alternating
    };
    classify(&[x.clone(), y.clone()]).is_ok_and(|c| c == target)
}

pub fn cmd_estimate(k: usize, n: usize, trials: u64, sampler: Sampler, seed: u64) -> Result<EstimatorResult, EstimateError> {
    if trials == 0 {
        return Err(EstimateError::TrialsZero);
    }
    check_domain(k, n, sampler)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for _ in 0..trials {
        let x = sample(k, n, sampler, &mut rng);
        let y = sample(k, n, sampler, &mut rng);
        if generates_target(&x, &y) {
            successes += 1;
        }
    }
    Ok(EstimatorResult {
        k,
        n,
        sampler,
        trials,
        successes,
        estimate: successes as f64 / trials as f64,
        interval: wilson_interval(successes, trials),
        seed,
    })
}

/// Largest degree the exhaustive oracle accepts.
pub const EXHAUSTIVE_MAX_N: usize = 7;

/// Exact `(successes, pairs)` over all ordered pairs in the sampler's support.
/// Both samplers are uniform on their support, so this is the exact rate.
pub fn exhaustive_rate(k: usize, n: usize, sampler: Sampler) -> Result<(u64, u64), EstimateError> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(EstimateError::TooLarge {
            n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    check_domain(k, n, sampler)?;
    let full_cycles = n / k;
    let support: Vec<Permutation> = all_permutations(n)
        .into_iter()
        .filter(|p| match sampler {
            Sampler::UniformOrderK => p.has_order(k as u64),
            Sampler::MaxDisjointKCycles => {
                let lens = p.cycle_lengths();
                lens.iter().filter(|&&l| l == k).count() == full_cycles && lens.iter().all(|&l| l == k)
            }
        })
        .collect();
    let mut successes = 0u64;
    for x in &support {
        for y in &support {
            if generates_target(x, y) {
                successes += 1;
            }
        }
    }
    let total = (support.len() as u64).pow(2);
    Ok((successes, total))
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut images, &mut out);
    out
}

fn heap_permute(m: usize, images: &mut Vec<usize>, out: &mut Vec<Permutation>) {
    if m <= 1 {
        out.push(Permutation::from_images(images.clone()).expect("rearrangement of 0..n"));
        return;
    }
    for i in 0..m {
        heap_permute(m - 1, images, out);
        let j = if m.is_multiple_of(2) { i } else { 0 };
        images.swap(j, m - 1);
    }
}

/// Exact rate as a float, for comparison with estimates.
pub fn rate(successes: u64, total: u64) -> f64 {
    successes.to_f64().unwrap_or(0.0) / total.to_f64().unwrap_or(1.0)
}
