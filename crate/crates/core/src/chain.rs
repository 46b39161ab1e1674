//! Stack-chain model, classical worst-case and RSS results, balance diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::h_unchecked;

/// One input feature of the stack: a symmetric tolerance `±half_width`
/// scaled by a geometric influence coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contributor {
    pub name: String,
    pub half_width: f64,
    #[serde(default = "default_influence")]
    pub influence: f64,
}

fn default_influence() -> f64 {
    1.0
}

impl Contributor {
    pub fn new(name: impl Into<String>, half_width: f64, influence: f64) -> Self {
        Contributor {
            name: name.into(),
            half_width,
            influence,
        }
    }

    /// Contributor with unit influence.
    pub fn unit(name: impl Into<String>, half_width: f64) -> Self {
        Self::new(name, half_width, 1.0)
    }

    /// `|influence| * half_width`.
    pub fn weighted_bound(&self) -> f64 {
        self.influence.abs() * self.half_width
    }
}

/// Immutable assembly model. Contributors with zero influence are dropped
/// at construction, so every weighted bound is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct StackChain {
    contributors: Vec<Contributor>,
    weighted: Vec<f64>,
}

impl StackChain {
    pub fn new(contributors: Vec<Contributor>) -> Result<Self> {
        if contributors.is_empty() {
            return Err(Error::EmptyChain);
        }
        for c in &contributors {
            if c.name.trim().is_empty() {
                return Err(Error::InvalidContributor {
                    name: c.name.clone(),
                    reason: "name is empty".into(),
                });
            }
            if !(c.half_width.is_finite() && c.half_width > 0.0) {
                return Err(Error::InvalidContributor {
                    name: c.name.clone(),
                    reason: format!("tolerance must be positive and finite, got {}", c.half_width),
                });
            }
            if !c.influence.is_finite() {
                return Err(Error::InvalidContributor {
                    name: c.name.clone(),
                    reason: format!("influence must be finite, got {}", c.influence),
                });
            }
        }
        let contributors: Vec<_> = contributors
            .into_iter()
            .filter(|c| c.influence != 0.0)
            .collect();
        if contributors.is_empty() {
            return Err(Error::EmptyChain);
        }
        let weighted = contributors.iter().map(Contributor::weighted_bound).collect();
        Ok(StackChain {
            contributors,
            weighted,
        })
    }

    /// Chain of unit-influence contributors named `X1..Xn`.
    pub fn from_half_widths(half_widths: &[f64]) -> Result<Self> {
        Self::new(
            half_widths
                .iter()
                .enumerate()
                .map(|(i, &v)| Contributor::unit(format!("X{}", i + 1), v))
                .collect(),
        )
    }

    pub fn contributors(&self) -> &[Contributor] {
        &self.contributors
    }

    pub fn weighted_bounds(&self) -> &[f64] {
        &self.weighted
    }

    pub fn len(&self) -> usize {
        self.weighted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weighted.is_empty()
    }

    /// Returns a copy with every half-width multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.contributors
                .iter()
                .map(|c| Contributor::new(c.name.clone(), c.half_width * factor, c.influence))
                .collect(),
        )
    }

    pub(crate) fn mean(&self) -> f64 {
        self.t_wc() / self.len() as f64
    }

    pub(crate) fn min_bound(&self) -> f64 {
        self.weighted.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Worst case: the sum of weighted bounds.
    pub fn t_wc(&self) -> f64 {
        self.weighted.iter().sum()
    }

    /// Root sum of squares of the weighted bounds.
    pub fn t_rss(&self) -> f64 {
        self.weighted.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn balance_report(&self) -> BalanceReport {
        BalanceReport::of(self)
    }
}

/// Build a chain from raw contributors.
pub fn build_chain(contributors: Vec<Contributor>) -> Result<StackChain> {
    StackChain::new(contributors)
}

pub fn t_wc(chain: &StackChain) -> f64 {
    chain.t_wc()
}

pub fn t_rss(chain: &StackChain) -> f64 {
    chain.t_rss()
}

/// Dispersion of the weighted bounds around their mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub mean: f64,
    /// Population variance (divides by `n`).
    pub variance: f64,
    pub abs_dev_sum: f64,
    /// Imbalance term `S_λ` evaluated at `λ = 1`.
    pub s1: f64,
    /// `(max w - mean) / Σ w`.
    pub d_factor: f64,
}

impl BalanceReport {
    fn of(chain: &StackChain) -> Self {
        let w = chain.weighted_bounds();
        let n = w.len() as f64;
        let total = chain.t_wc();
        let mean = total / n;
        let variance = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let abs_dev_sum = w.iter().map(|x| (x - mean).abs()).sum();
        let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        BalanceReport {
            mean,
            variance,
            abs_dev_sum,
            s1: imbalance(w, mean, 1.0),
            d_factor: ((max - mean) / total).max(0.0),
        }
    }
}

/// `Σ [h(2λ w_i) - h(2λ mean)]`, clamped at zero against rounding.
pub(crate) fn imbalance(w: &[f64], mean: f64, lambda: f64) -> f64 {
    let centre = h_unchecked(2.0 * lambda * mean);
    w.iter()
        .map(|&x| h_unchecked(2.0 * lambda * x) - centre)
        .sum::<f64>()
        .max(0.0)
}
