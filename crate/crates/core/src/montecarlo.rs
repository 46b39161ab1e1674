//! Seeded Monte Carlo estimates for the distribution of `|Y|`.
//!
//! Draws are generated in fixed-size blocks. Each (block, contributor) pair
//! owns its own ChaCha8 stream keyed by the seed, so the sample does not
//! depend on how many threads produced it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ConfidenceLevel;
use crate::chain::StackChain;
use crate::error::{Error, Result};

pub const DEFAULT_DRAWS: usize = 200_000;
const MIN_DRAWS: usize = 1_000;
const WARN_DRAWS: usize = 10_000;
const BLOCK: usize = 8_192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    draws: usize,
    seed: u64,
}

impl McConfig {
    pub fn new(draws: usize, seed: u64) -> Result<Self> {
        if draws < MIN_DRAWS {
            return Err(Error::Domain(format!(
                "at least {MIN_DRAWS} Monte Carlo draws are required, got {draws}"
            )));
        }
        if draws < WARN_DRAWS {
            log::warn!("{draws} Monte Carlo draws is low; estimates will be noisy");
        }
        Ok(McConfig { draws, seed })
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// SplitMix64 finalizer; used to derive independent child seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `N` draws of `Y = Σ U_i`, `U_i ~ U[-w_i, w_i]`.
pub fn sample_sum(chain: &StackChain, cfg: &McConfig) -> Vec<f64> {
    let n = cfg.draws;
    let mut out = vec![0.0; n];
    out.par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| fill_block(chain, cfg.seed, b as u64, chunk));
    out
}

fn fill_block(chain: &StackChain, seed: u64, block: u64, chunk: &mut [f64]) {
    for (i, &w) in chain.weighted_bounds().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((block << 32) | i as u64);
        for y in chunk.iter_mut() {
            let u: f64 = rng.random();
            *y += w * (2.0 * u - 1.0);
        }
    }
}

fn sorted_abs(chain: &StackChain, cfg: &McConfig) -> Vec<f64> {
    let mut a: Vec<f64> = sample_sum(chain, cfg).into_iter().map(f64::abs).collect();
    a.par_sort_unstable_by(f64::total_cmp);
    a
}

/// Linear interpolation between order statistics at level `p`.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical `(1 - rho)` quantile of `|Y|`.
///
/// The standard error uses the asymptotic variance of a sample quantile,
/// `rho (1 - rho) / (N f²)`, with the density `f` estimated from the
/// spacing of two nearby quantiles.
pub fn mc_quantile(chain: &StackChain, rho: ConfidenceLevel, cfg: &McConfig) -> Estimate {
    let sorted = sorted_abs(chain, cfg);
    quantile_estimate(&sorted, rho.value())
}

pub(crate) fn quantile_estimate(sorted: &[f64], rho: f64) -> Estimate {
    let n = sorted.len() as f64;
    let p = 1.0 - rho;
    let value = quantile_sorted(sorted, p);
    let delta = (rho / 2.0).min(n.powf(-0.5)).max(10.0 / n);
    let (p_lo, p_hi) = ((p - delta).max(0.0), (p + delta).min(1.0));
    let spread = quantile_sorted(sorted, p_hi) - quantile_sorted(sorted, p_lo);
    let stderr = if spread > 0.0 {
        let density = (p_hi - p_lo) / spread;
        (rho * (1.0 - rho) / n).sqrt() / density
    } else {
        0.0
    };
    Estimate { value, stderr }
}

/// Fraction of draws with `|Y| >= t`, exact at the trivial ends.
pub fn mc_prob(chain: &StackChain, t: f64, cfg: &McConfig) -> Result<Estimate> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("t must be finite and nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(Estimate { value: 1.0, stderr: 0.0 });
    }
    if t >= chain.t_wc() {
        return Ok(Estimate { value: 0.0, stderr: 0.0 });
    }
    let hits = sample_sum(chain, cfg)
        .iter()
        .filter(|y| y.abs() >= t)
        .count();
    let n = cfg.draws as f64;
    let p = hits as f64 / n;
    Ok(Estimate {
        value: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
    })
}

/// Reusable sorted sample of `|Y|`, for sweeps over many levels.
#[derive(Debug, Clone)]
pub struct AbsSample {
    sorted: Vec<f64>,
}

impl AbsSample {
    pub fn draw(chain: &StackChain, cfg: &McConfig) -> Self {
        AbsSample {
            sorted: sorted_abs(chain, cfg),
        }
    }

    pub fn quantile(&self, rho: ConfidenceLevel) -> Estimate {
        quantile_estimate(&self.sorted, rho.value())
    }

    /// Fraction of the sample at or above `t`.
    pub fn exceedance(&self, t: f64) -> f64 {
        let below = self.sorted.partition_point(|&y| y < t);
        (self.sorted.len() - below) as f64 / self.sorted.len() as f64
    }
}
