//! Reference implementations used as oracles by the integration tests.
//! Nothing here calls into the library's numerical code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tolstack::StackChain;

pub const CASE_STUDY: [f64; 10] = [1.0, 0.5, 0.25, 0.23, 0.2, 0.2, 0.15, 0.13, 0.1, 0.09];
pub const FIVE: [f64; 5] = [5.0, 4.0, 3.0, 2.0, 1.0];

pub fn chain(w: &[f64]) -> StackChain {
    StackChain::from_half_widths(w).expect("valid chain")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_widths(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// `ln(sinh x / x)` straight from the definition, with the asymptotic
/// form where `sinh` would overflow.
pub fn lsx(x: f64) -> f64 {
    if x < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x < 700.0 {
        (x.sinh() / x).ln()
    } else {
        x - std::f64::consts::LN_2 - x.ln()
    }
}

/// `h(x) = ln((1 - e^{-x}) / x)` from the definition.
pub fn h_naive(x: f64) -> f64 {
    ((1.0 - (-x).exp()) / x).ln()
}

/// `P(|Y| >= t)` for `Y = Σ U_i`, `U_i ~ U[-w_i, w_i]`, by
/// inclusion-exclusion over the corners of the box. Intended for small n.
pub fn exact_tail(w: &[f64], t: f64) -> f64 {
    let total: f64 = w.iter().sum();
    if t <= 0.0 {
        return 1.0;
    }
    if t >= total {
        return 0.0;
    }
    // P(Y >= t) = P(S <= W - t) with S = Σ V_i, V_i ~ U[0, 2 w_i].
    let x = total - t;
    let n = w.len();
    let b: Vec<f64> = w.iter().map(|v| 2.0 * v).collect();
    let mut acc = 0.0;
    for mask in 0u32..(1 << n) {
        let shift: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).sum();
        let d = x - shift;
        if d > 0.0 {
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * d.powi(n as i32);
        }
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let vol: f64 = b.iter().product();
    (2.0 * acc / (fact * vol)).clamp(0.0, 1.0)
}

/// Minimum of `f` over `points` log-spaced values of `[lo, hi]`.
pub fn grid_min<F: Fn(f64) -> f64 + Sync>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points)
        .into_par_iter()
        .map(|k| {
            let x = lo * (step * k as f64).exp();
            (x, f(x))
        })
        .reduce(
            || (f64::NAN, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        )
}

/// Smallest `t` in `[lo, hi]` with `p(t) <= target`, for nonincreasing `p`.
pub fn bisect<P: Fn(f64) -> f64>(p: P, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    assert!(p(hi) <= target, "upper end does not satisfy the target");
    while hi - lo > tol * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if p(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub const GRID_POINTS: usize = 1_000_000;

fn mean(w: &[f64]) -> f64 {
    w.iter().sum::<f64>() / w.len() as f64
}

fn lambda_range(w: &[f64]) -> (f64, f64) {
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    (1e-6 / mean(w), 1e3 / wmin)
}

/// Two-sided Chernoff bound, exponent minimized on a dense grid.
pub fn grid_chernov_prob(w: &[f64], t: f64) -> f64 {
    let (lo, hi) = lambda_range(w);
    let (_, m) = grid_min(|l| w.iter().map(|&v| lsx(l * v)).sum::<f64>() - l * t, lo, hi, GRID_POINTS);
    (2.0 * m.exp()).min(1.0)
}

/// Lipschitz relaxation of the Chernoff exponent, minimized on a grid.
pub fn grid_lipschitz_prob(w: &[f64], t: f64) -> f64 {
    let (lo, hi) = lambda_range(w);
    let n = w.len() as f64;
    let m = mean(w);
    let a: f64 = w.iter().map(|v| (v - m).abs()).sum();
    let (_, e) = grid_min(|l| n * lsx(l * m) + l * a - l * t, lo, hi, GRID_POINTS);
    (2.0 * e.exp()).min(1.0)
}

/// Variance relaxation (constant `c`) of the Chernoff exponent.
pub fn grid_quadratic_prob(w: &[f64], t: f64, c: f64) -> f64 {
    let (lo, hi) = lambda_range(w);
    let n = w.len() as f64;
    let m = mean(w);
    let var = w.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let (_, e) = grid_min(|l| n * lsx(l * m) + c * n * l * l * var - l * t, lo, hi, GRID_POINTS);
    (2.0 * e.exp()).min(1.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
