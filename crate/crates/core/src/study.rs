//! Batch studies over randomly generated stack chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{gaussian_l, tolerance, ConfidenceLevel, Method};
use crate::chain::{Contributor, StackChain};
use crate::error::{Error, Result};
use crate::montecarlo::{mc_quantile, mix_seed, McConfig, DEFAULT_DRAWS};

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub n_inputs: usize,
    pub bound_lo: f64,
    pub bound_hi: f64,
    pub n_chains: usize,
    pub rho: ConfidenceLevel,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Monte Carlo draws per chain; `None` skips the Monte Carlo column.
    pub mc_draws: Option<usize>,
}

impl StudySpec {
    /// Five inputs with bounds in `[1, 5]`, all analytic methods,
    /// 200 000 Monte Carlo draws per chain.
    pub fn new(n_chains: usize, rho: ConfidenceLevel, seed: u64) -> Self {
        StudySpec {
            n_inputs: 5,
            bound_lo: 1.0,
            bound_hi: 5.0,
            n_chains,
            rho,
            seed,
            methods: Method::ANALYTIC.to_vec(),
            mc_draws: Some(DEFAULT_DRAWS),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 {
            return Err(Error::Domain("a study chain needs at least one input".into()));
        }
        if self.n_chains == 0 {
            return Err(Error::Domain("a study needs at least one chain".into()));
        }
        check_bounds(self.bound_lo, self.bound_hi)?;
        if self.methods.contains(&Method::MonteCarlo) {
            return Err(Error::Domain(
                "MONTE_CARLO is reported through mc_draws, not as a method".into(),
            ));
        }
        if let Some(n) = self.mc_draws {
            McConfig::new(n, 0)?;
        }
        Ok(())
    }
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi {
        Ok(())
    } else {
        Err(Error::Domain(format!("need 0 < lo < hi, got lo = {lo}, hi = {hi}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub method: Method,
    pub t: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub chain_id: u64,
    pub s1: f64,
    pub d_factor: f64,
    pub entries: Vec<MethodEntry>,
    pub mc_t: Option<f64>,
}

impl StudyRow {
    pub fn entry(&self, method: Method) -> Option<&MethodEntry> {
        self.entries.iter().find(|e| e.method == method)
    }
}

/// `n` unit-influence contributors with half-widths i.i.d. `U[lo, hi]`.
pub fn random_chain<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Result<StackChain> {
    check_bounds(lo, hi)?;
    let contributors = (0..n)
        .map(|i| {
            let v = lo + (hi - lo) * rng.random::<f64>();
            Contributor::unit(format!("X{}", i + 1), v)
        })
        .collect();
    StackChain::new(contributors)
}

/// Deterministic generator for chain `chain_id` of a study seeded with `seed`.
pub fn chain_rng(seed: u64, chain_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain_id);
    rng
}

/// Runs every chain of the study; rows come back ordered by `chain_id`
/// whatever the thread count.
pub fn run_study(spec: &StudySpec) -> Result<Vec<StudyRow>> {
    spec.validate()?;
    (0..spec.n_chains as u64)
        .into_par_iter()
        .map(|id| {
            let chain = random_chain(
                spec.n_inputs,
                spec.bound_lo,
                spec.bound_hi,
                &mut chain_rng(spec.seed, id),
            )?;
            study_row(spec, id, &chain)
        })
        .collect()
}

/// Row for one given chain.
pub fn study_row(spec: &StudySpec, chain_id: u64, chain: &StackChain) -> Result<StudyRow> {
    let balance = chain.balance_report();
    let scale = gaussian_l(spec.rho) * chain.t_rss();
    let entries = spec
        .methods
        .iter()
        .map(|&m| {
            let t = tolerance(m, chain, spec.rho)?.t;
            Ok(MethodEntry { method: m, t, f: t / scale })
        })
        .collect::<Result<Vec<_>>>()?;
    let mc_t = match spec.mc_draws {
        Some(draws) => {
            let cfg = McConfig::new(draws, mix_seed(spec.seed, chain_id))?;
            Some(mc_quantile(chain, spec.rho, &cfg).value)
        }
        None => None,
    };
    Ok(StudyRow {
        chain_id,
        s1: balance.s1,
        d_factor: balance.d_factor,
        entries,
        mc_t,
    })
}

/// Pearson correlation; NaN when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation, ties given their average rank.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}
