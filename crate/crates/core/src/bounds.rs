//! Output tolerance intervals for a stack of independent uniform inputs.
//!
//! Every method answers the same question: the half-width `t` such that
//! `P(|Y| >= t) <= rho` for `Y = Σ U_i`, `U_i ~ U[-w_i, w_i]`. The
//! Chernoff family (Chernov, Lipschitz, Quadratic) works with the log of
//! the moment generating function and minimizes an exponent over `λ`
//! numerically; the half-width then comes from a bisection in `t`.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{imbalance, StackChain};
use crate::error::{Error, Result};
use crate::numerics::{
    invert_monotone, log_sinh_over_x_unchecked, minimize_1d, Bracket, LAMBDA_REL_TOL, T_REL_TOL,
};

/// Two-sided probability `rho` of falling outside `[-t, t]`, in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    /// The 6σ convention: 0.27 % outside the interval.
    pub const SIX_SIGMA: f64 = 0.0027;

    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho < 1.0 {
            Ok(ConfidenceLevel(rho))
        } else {
            Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Wc,
    Rss,
    Gaussian,
    Hoeffding,
    Chernov,
    Lipschitz,
    Quadratic,
    Airbus,
    MonteCarlo,
}

impl Method {
    /// The analytic methods, in reporting order.
    pub const ANALYTIC: [Method; 8] = [
        Method::Wc,
        Method::Rss,
        Method::Gaussian,
        Method::Hoeffding,
        Method::Chernov,
        Method::Lipschitz,
        Method::Quadratic,
        Method::Airbus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Wc => "WC",
            Method::Rss => "RSS",
            Method::Gaussian => "GAUSSIAN",
            Method::Hoeffding => "HOEFFDING",
            Method::Chernov => "CHERNOV",
            Method::Lipschitz => "LIPSCHITZ",
            Method::Quadratic => "QUADRATIC",
            Method::Airbus => "AIRBUS",
            Method::MonteCarlo => "MONTE_CARLO",
        }
    }

    /// Lower-case name used as a CSV column prefix.
    pub fn column_prefix(self) -> String {
        self.name().to_ascii_lowercase()
    }

    /// Whether the method guarantees `P(|Y| >= t) <= rho` for uniform inputs.
    pub fn is_guaranteed(self) -> bool {
        matches!(
            self,
            Method::Wc | Method::Hoeffding | Method::Chernov | Method::Lipschitz | Method::Quadratic
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let m = match key.as_str() {
            "WC" | "WORST_CASE" => Method::Wc,
            "RSS" => Method::Rss,
            "GAUSSIAN" => Method::Gaussian,
            "HOEFFDING" => Method::Hoeffding,
            "CHERNOV" | "CHERNOFF" => Method::Chernov,
            "LIPSCHITZ" => Method::Lipschitz,
            "QUADRATIC" => Method::Quadratic,
            "AIRBUS" => Method::Airbus,
            "MONTE_CARLO" | "MC" => Method::MonteCarlo,
            _ => return Err(Error::Domain(format!("unknown method '{s}'"))),
        };
        Ok(m)
    }
}

/// Half-width computed by one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceResult {
    pub method: Method,
    /// Raw half-width, possibly above the worst case.
    pub t: f64,
    /// `min(t, worst case)`.
    pub t_clamped: f64,
    /// Shape coefficient `t / (l_rho * T_RSS)`; absent without a `rho`.
    pub f: Option<f64>,
    /// `t / T_RSS`.
    pub coverage: f64,
    pub rho: Option<f64>,
}

impl ToleranceResult {
    pub fn new(method: Method, t: f64, chain: &StackChain, rho: Option<ConfidenceLevel>) -> Self {
        let rss = chain.t_rss();
        ToleranceResult {
            method,
            t,
            t_clamped: t.min(chain.t_wc()),
            f: rho.map(|r| t / (gaussian_l(r) * rss)),
            coverage: t / rss,
            rho: rho.map(ConfidenceLevel::value),
        }
    }
}

/// Constant `c` in the variance relaxation `S_λ <= c · n λ² Var(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadraticConstant {
    /// `1/2`, obtained from the Lipschitz constant of `h'`.
    #[default]
    Half,
    /// `1/6`, from `sup h'' = 1/12` and the vanishing first-order term.
    Sixth,
}

impl QuadraticConstant {
    pub fn value(self) -> f64 {
        match self {
            QuadraticConstant::Half => 0.5,
            QuadraticConstant::Sixth => 1.0 / 6.0,
        }
    }
}

/// Gaussian deviation factor `l_rho = sqrt(2 ln(2/rho)) / 3`.
pub fn gaussian_l(rho: ConfidenceLevel) -> f64 {
    gaussian_l_raw(rho.value())
}

fn gaussian_l_raw(rho: f64) -> f64 {
    (2.0 * (2.0 / rho).ln()).sqrt() / 3.0
}

pub fn worst_case(chain: &StackChain, rho: Option<ConfidenceLevel>) -> ToleranceResult {
    ToleranceResult::new(Method::Wc, chain.t_wc(), chain, rho)
}

pub fn rss(chain: &StackChain, rho: Option<ConfidenceLevel>) -> ToleranceResult {
    ToleranceResult::new(Method::Rss, chain.t_rss(), chain, rho)
}

/// Interval for Gaussian inputs with σ_i = w_i / 3: `l_rho · T_RSS`.
pub fn gaussian_t(chain: &StackChain, rho: ConfidenceLevel) -> ToleranceResult {
    ToleranceResult::new(Method::Gaussian, gaussian_l(rho) * chain.t_rss(), chain, Some(rho))
}

/// Hoeffding: `t = sqrt(2 ln(2/rho) Σ w²)`, i.e. `f = 3`.
pub fn hoeffding_t(chain: &StackChain, rho: ConfidenceLevel) -> ToleranceResult {
    ToleranceResult::new(Method::Hoeffding, hoeffding_raw(chain, rho), chain, Some(rho))
}

fn hoeffding_raw(chain: &StackChain, rho: ConfidenceLevel) -> f64 {
    let sum_sq: f64 = chain.weighted_bounds().iter().map(|w| w * w).sum();
    (2.0 * (2.0 / rho.value()).ln() * sum_sq).sqrt()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be positive, got {lambda}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("t must be finite and nonnegative, got {t}")))
    }
}

/// Chernoff exponent `Σ log(sinh(λ w_i) / (λ w_i)) - λ t`.
pub fn phi(chain: &StackChain, lambda: f64, t: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(phi_unchecked(chain, lambda, t))
}

fn phi_unchecked(chain: &StackChain, lambda: f64, t: f64) -> f64 {
    chain
        .weighted_bounds()
        .iter()
        .map(|&w| log_sinh_over_x_unchecked(lambda * w))
        .sum::<f64>()
        - lambda * t
}

/// Imbalance `S_λ = Σ [h(2λ w_i) - h(2λ w̄)]`, zero iff all bounds are equal.
pub fn s_lambda(chain: &StackChain, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(imbalance(chain.weighted_bounds(), chain.mean(), lambda))
}

/// Exponent common to ψ and ψ̃: `-λt + λ n w̄ + n h(2λ w̄)`, evaluated as
/// `n log(sinh(λ w̄)/(λ w̄)) - λt` to avoid cancellation at small λ.
fn balanced_exponent(chain: &StackChain, lambda: f64, t: f64) -> f64 {
    chain.len() as f64 * log_sinh_over_x_unchecked(lambda * chain.mean()) - lambda * t
}

/// Lipschitz relaxation of φ: `S_λ` replaced by `λ Σ |w_i - w̄|`.
pub fn psi(chain: &StackChain, lambda: f64, t: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(psi_unchecked(chain, lambda, t, chain.balance_report().abs_dev_sum))
}

fn psi_unchecked(chain: &StackChain, lambda: f64, t: f64, abs_dev_sum: f64) -> f64 {
    balanced_exponent(chain, lambda, t) + lambda * abs_dev_sum
}

/// Variance relaxation of φ: `S_λ` replaced by `n λ² Var(v) / 2`.
pub fn psi_tilde(chain: &StackChain, lambda: f64, t: f64) -> Result<f64> {
    psi_tilde_with(chain, lambda, t, QuadraticConstant::Half)
}

pub fn psi_tilde_with(
    chain: &StackChain,
    lambda: f64,
    t: f64,
    constant: QuadraticConstant,
) -> Result<f64> {
    check_lambda(lambda)?;
    let var = chain.balance_report().variance;
    Ok(psi_tilde_unchecked(chain, lambda, t, var, constant.value()))
}

fn psi_tilde_unchecked(chain: &StackChain, lambda: f64, t: f64, variance: f64, c: f64) -> f64 {
    balanced_exponent(chain, lambda, t) + c * chain.len() as f64 * lambda * lambda * variance
}

const LAMBDA_LO: f64 = 1e-9;
const LAMBDA_HI: f64 = 500.0;
const LAMBDA_EXPANSIONS: usize = 16;

/// Minimum over λ of a convex exponent, on `[1e-9 / w̄, 500 / w_min]`,
/// widened ten-fold on whichever side the minimum lands. Near the worst
/// case the minimizer grows like `1 / (t_wc - t)`, hence the generous cap.
fn min_over_lambda<F>(chain: &StackChain, exponent: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut lo = LAMBDA_LO / chain.mean();
    let mut hi = LAMBDA_HI / chain.min_bound();
    let mut best = minimize_1d(&exponent, Bracket::new(lo, hi)?, LAMBDA_REL_TOL)?;
    for _ in 0..LAMBDA_EXPANSIONS {
        if best.0 <= lo * (1.0 + 1e-6) {
            lo /= 10.0;
        } else if best.0 >= hi * (1.0 - 1e-6) {
            hi *= 10.0;
        } else {
            break;
        }
        best = minimize_1d(&exponent, Bracket::new(lo, hi)?, LAMBDA_REL_TOL)?;
    }
    Ok(best.1)
}

fn prob_from_exponent(min_exponent: f64) -> f64 {
    (2.0 * min_exponent.exp()).min(1.0)
}

/// `min(1, 2 inf_λ exp(φ(λ, t)))`; zero at and beyond the worst case.
pub fn chernov_prob(chain: &StackChain, t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if t >= chain.t_wc() {
        return Ok(0.0);
    }
    let m = min_over_lambda(chain, |l| phi_unchecked(chain, l, t))?;
    Ok(prob_from_exponent(m))
}

/// Probability bound from ψ. Beyond `Σw + Σ|w - w̄|` the infimum is zero.
pub fn lipschitz_prob(chain: &StackChain, t: f64) -> Result<f64> {
    check_t(t)?;
    let a = chain.balance_report().abs_dev_sum;
    if t == 0.0 {
        return Ok(1.0);
    }
    if t >= chain.t_wc() + a {
        return Ok(0.0);
    }
    let m = min_over_lambda(chain, |l| psi_unchecked(chain, l, t, a))?;
    Ok(prob_from_exponent(m))
}

/// Probability bound from ψ̃.
pub fn quadratic_prob(chain: &StackChain, t: f64, constant: QuadraticConstant) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let var = chain.balance_report().variance;
    let c = constant.value();
    let m = min_over_lambda(chain, |l| psi_tilde_unchecked(chain, l, t, var, c))?;
    Ok(prob_from_exponent(m))
}

/// Smallest `t` in `[0, hi]` with `prob(t) <= rho`.
fn invert_bound<P>(prob: P, rho: ConfidenceLevel, hi: f64) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |t: f64| match prob(t) {
        Ok(p) => p,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let out = invert_monotone(g, rho.value(), Bracket::new(0.0, hi)?, T_REL_TOL);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

pub fn chernov_t(chain: &StackChain, rho: ConfidenceLevel) -> Result<ToleranceResult> {
    let t = invert_bound(|t| chernov_prob(chain, t), rho, chain.t_wc())?;
    Ok(ToleranceResult::new(Method::Chernov, t, chain, Some(rho)))
}

pub fn lipschitz_t(chain: &StackChain, rho: ConfidenceLevel) -> Result<ToleranceResult> {
    let support = chain.t_wc() + chain.balance_report().abs_dev_sum;
    // The Hoeffding half-width usually suffices as an upper end, but a large
    // Σ|w - w̄| can push the ψ bound above rho there.
    let mut hi = hoeffding_raw(chain, rho).min(support);
    if lipschitz_prob(chain, hi)? > rho.value() {
        hi = support;
    }
    let t = invert_bound(|t| lipschitz_prob(chain, t), rho, hi)?;
    Ok(ToleranceResult::new(Method::Lipschitz, t, chain, Some(rho)))
}

pub fn quadratic_t(chain: &StackChain, rho: ConfidenceLevel) -> Result<ToleranceResult> {
    quadratic_t_with(chain, rho, QuadraticConstant::Half)
}

pub fn quadratic_t_with(
    chain: &StackChain,
    rho: ConfidenceLevel,
    constant: QuadraticConstant,
) -> Result<ToleranceResult> {
    // ψ̃ never exceeds the Hoeffding exponent, so this end already straddles;
    // the doubling only absorbs minimizer round-off.
    let mut hi = hoeffding_raw(chain, rho);
    for _ in 0..8 {
        if quadratic_prob(chain, hi, constant)? <= rho.value() {
            break;
        }
        hi *= 2.0;
    }
    let t = invert_bound(|t| quadratic_prob(chain, t, constant), rho, hi)?;
    Ok(ToleranceResult::new(Method::Quadratic, t, chain, Some(rho)))
}

/// Industrial regression rule `1.6 (1.04 - 0.56 D) T_RSS`.
pub fn airbus_t(chain: &StackChain) -> ToleranceResult {
    let d = chain.balance_report().d_factor;
    let t = 1.6 * (1.04 - 0.56 * d) * chain.t_rss();
    ToleranceResult::new(Method::Airbus, t, chain, None)
}

/// Result of a single analytic method. Monte Carlo is not analytic and
/// is rejected here; see [`crate::montecarlo`].
pub fn tolerance(method: Method, chain: &StackChain, rho: ConfidenceLevel) -> Result<ToleranceResult> {
    match method {
        Method::Wc => Ok(worst_case(chain, Some(rho))),
        Method::Rss => Ok(rss(chain, Some(rho))),
        Method::Gaussian => Ok(gaussian_t(chain, rho)),
        Method::Hoeffding => Ok(hoeffding_t(chain, rho)),
        Method::Chernov => chernov_t(chain, rho),
        Method::Lipschitz => lipschitz_t(chain, rho),
        Method::Quadratic => quadratic_t(chain, rho),
        Method::Airbus => Ok(airbus_t(chain)),
        Method::MonteCarlo => Err(Error::Domain(
            "MONTE_CARLO is not an analytic method; use the mc workflow".into(),
        )),
    }
}

/// All eight analytic methods in reporting order.
pub fn analyze_all(chain: &StackChain, rho: ConfidenceLevel) -> Result<Vec<ToleranceResult>> {
    Method::ANALYTIC
        .iter()
        .map(|&m| tolerance(m, chain, rho))
        .collect()
}

/// One `(rho, method, t)` point of a bound-versus-confidence curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rho: f64,
    pub method: Method,
    pub t: f64,
}

/// `points` confidence levels from `rho_min` to `rho_max` inclusive,
/// geometrically spaced when `log_scale` is set.
pub fn rho_grid(rho_min: f64, rho_max: f64, points: usize, log_scale: bool) -> Result<Vec<ConfidenceLevel>> {
    let lo = ConfidenceLevel::new(rho_min)?;
    let hi = ConfidenceLevel::new(rho_max)?;
    if rho_min >= rho_max {
        return Err(Error::Domain(format!("need rho_min < rho_max, got {rho_min} >= {rho_max}")));
    }
    if points < 2 {
        return Err(Error::Domain(format!("a sweep needs at least 2 points, got {points}")));
    }
    let last = (points - 1) as f64;
    let mut grid = Vec::with_capacity(points);
    grid.push(lo);
    for i in 1..points - 1 {
        let s = i as f64 / last;
        let r = if log_scale {
            (rho_min.ln() + s * (rho_max.ln() - rho_min.ln())).exp()
        } else {
            rho_min + s * (rho_max - rho_min)
        };
        grid.push(ConfidenceLevel::new(r)?);
    }
    grid.push(hi);
    Ok(grid)
}

/// Half-width of each method at each level, grouped by level.
pub fn bound_curve(
    chain: &StackChain,
    rhos: &[ConfidenceLevel],
    methods: &[Method],
) -> Result<Vec<CurvePoint>> {
    use rayon::prelude::*;
    let rows: Vec<Vec<CurvePoint>> = rhos
        .par_iter()
        .map(|&r| {
            methods
                .iter()
                .map(|&m| {
                    Ok(CurvePoint {
                        rho: r.value(),
                        method: m,
                        t: tolerance(m, chain, r)?.t,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(w: &[f64]) -> StackChain {
        StackChain::from_half_widths(w).unwrap()
    }

    fn rho(r: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(r).unwrap()
    }

    #[test]
    fn confidence_level_domain() {
        for r in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(ConfidenceLevel::new(r).is_err());
        }
        assert_eq!(ConfidenceLevel::new(0.05).unwrap().value(), 0.05);
    }

    #[test]
    fn gaussian_factor_values() {
        assert!((gaussian_l(rho(0.0027)) - 1.211_761_865_726_632).abs() < 1e-12);
        assert!((gaussian_l(rho(0.05)) - 0.905_401_010_493_746_3).abs() < 1e-12);
        // Limit at rho = 1, outside the admissible domain.
        assert!((gaussian_l_raw(1.0) - 0.392_470_007_505_158_2).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_examples() {
        let c = chain(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        let r = hoeffding_t(&c, rho(0.05));
        assert!((r.t - 20.143_900_812_715_82).abs() < 1e-10);
        assert_eq!(r.t_clamped, 15.0);
        assert!((r.f.unwrap() - 3.0).abs() < 1e-12);
        let r = hoeffding_t(&chain(&[1.0]), rho(0.0027));
        assert!((r.t - 3.635_285_597_179_897).abs() < 1e-10);
        assert_eq!(r.t_clamped, 1.0);
    }

    #[test]
    fn phi_values() {
        let c = chain(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!((phi(&c, 0.1, 5.0).unwrap() - (-0.408_870_106_093_369)).abs() < 1e-12);
        assert!((phi(&chain(&[1.0]), 1.0, 0.0).unwrap() - 0.161_439_361_571_195_6).abs() < 1e-12);
        for l in [1e-8, 1e-3, 0.5, 3.0, 1e3, 1e6] {
            assert!(phi(&c, l, 0.0).unwrap() >= 0.0);
            assert!(phi(&c, l, 0.0).unwrap().is_finite());
        }
        assert!(phi(&c, 0.0, 1.0).is_err());
        assert!(phi(&c, -1.0, 1.0).is_err());
    }

    #[test]
    fn s_lambda_values() {
        let c = chain(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!((s_lambda(&c, 1.0).unwrap() - 0.551_217_193_471_147_6).abs() < 1e-12);
        assert!((s_lambda(&c, 0.1).unwrap() - 0.016_353_616_808_275_375).abs() < 1e-12);
        assert_eq!(s_lambda(&c, 1.0).unwrap(), c.balance_report().s1);
        assert!(s_lambda(&c, 1e-6).unwrap() <= 1e-9);
        assert_eq!(s_lambda(&chain(&[2.0; 6]), 0.7).unwrap(), 0.0);
        assert!(s_lambda(&c, 0.0).is_err());
    }

    #[test]
    fn psi_and_psi_tilde_offsets() {
        let c = chain(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        let (p, q, r) = (
            phi(&c, 0.1, 5.0).unwrap(),
            psi(&c, 0.1, 5.0).unwrap(),
            psi_tilde(&c, 0.1, 5.0).unwrap(),
        );
        assert!((q - p - (0.6 - 0.016_353_616_808_275_375)).abs() < 1e-12);
        assert!((r - q - (0.05 - 0.6)).abs() < 1e-12);
        let sharp = psi_tilde_with(&c, 0.1, 5.0, QuadraticConstant::Sixth).unwrap();
        assert!((r - sharp - 5.0 * 0.01 * 2.0 * (0.5 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn equal_chain_relaxations_collapse() {
        let c = chain(&[1.5; 7]);
        for l in [1e-4, 0.1, 1.0, 30.0] {
            for t in [0.0, 2.0, 9.0] {
                let p = phi(&c, l, t).unwrap();
                assert!((psi(&c, l, t).unwrap() - p).abs() <= 1e-12 * (1.0 + p.abs()));
                assert!((psi_tilde(&c, l, t).unwrap() - p).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn chernov_prob_endpoints() {
        let c = chain(&[1.0, 1.0]);
        assert_eq!(chernov_prob(&c, 0.0).unwrap(), 1.0);
        assert_eq!(chernov_prob(&c, 2.0).unwrap(), 0.0);
        assert_eq!(chernov_prob(&c, 5.0).unwrap(), 0.0);
        let t = 2.0 - 2.0 * 0.05f64.sqrt();
        let p = chernov_prob(&c, t).unwrap();
        assert!(p > 0.05 && p <= 1.0, "{p}");
        assert!(chernov_prob(&c, -1.0).is_err());
    }

    #[test]
    fn chernov_single_uniform() {
        let r = chernov_t(&chain(&[1.0]), rho(0.1)).unwrap();
        assert!(r.t > 0.9 && r.t < 1.0, "{}", r.t);
        assert_eq!(r.t, r.t_clamped);
        // For one uniform the bound is e(1 - t) once below 1.
        assert!((r.t - (1.0 - 0.1 / std::f64::consts::E)).abs() < 1e-8);
    }

    #[test]
    fn airbus_examples() {
        let c = chain(&[1.0, 0.5, 0.25, 0.23, 0.2, 0.2, 0.15, 0.13, 0.1, 0.09]);
        assert!((airbus_t(&c).t - 1.764_373_099_886_391).abs() < 1e-9);
        assert!(airbus_t(&c).rho.is_none() && airbus_t(&c).f.is_none());
        let c = chain(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!((airbus_t(&c).t - 11.454_565_769_935_49).abs() < 1e-9);
        let c = chain(&[2.0; 3]);
        assert!((airbus_t(&c).t - 1.664 * c.t_rss()).abs() < 1e-12);
    }

    #[test]
    fn analyze_all_shape() {
        let c = chain(&[1.0, 0.5, 0.25, 0.23, 0.2, 0.2, 0.15, 0.13, 0.1, 0.09]);
        let all = analyze_all(&c, rho(0.0027)).unwrap();
        let methods: Vec<_> = all.iter().map(|r| r.method).collect();
        assert_eq!(methods, Method::ANALYTIC.to_vec());
        assert!((all[0].t - 2.85).abs() < 1e-12);
        assert!((all[1].t - 1.23).abs() < 5e-3);
        assert!((all[2].f.unwrap() - 1.0).abs() < 1e-12);
        let ch = all[4].t;
        assert!(ch <= all[3].t && ch <= all[5].t && ch <= all[6].t);
        assert!(tolerance(Method::MonteCarlo, &c, rho(0.1)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ANALYTIC.iter().chain([Method::MonteCarlo].iter()) {
            assert_eq!(m.name().parse::<Method>().unwrap(), *m);
            assert_eq!(m.column_prefix().parse::<Method>().unwrap(), *m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn rho_grid_shapes() {
        let g = rho_grid(1e-4, 1e-1, 50, true).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0].value(), 1e-4);
        assert_eq!(g[49].value(), 1e-1);
        assert!(g.windows(2).all(|w| w[0].value() < w[1].value()));
        let g = rho_grid(0.1, 0.2, 3, false).unwrap();
        assert!((g[1].value() - 0.15).abs() < 1e-15);
        assert!(rho_grid(0.2, 0.1, 3, true).is_err());
        assert!(rho_grid(0.1, 0.2, 1, true).is_err());
        assert!(rho_grid(0.0, 0.2, 5, true).is_err());
    }

    #[test]
    fn curve_cardinality() {
        let c = chain(&[3.0, 1.0]);
        let g = rho_grid(0.01, 0.1, 5, true).unwrap();
        let m = [Method::Chernov, Method::Hoeffding, Method::Rss, Method::Quadratic];
        let curve = bound_curve(&c, &g, &m).unwrap();
        assert_eq!(curve.len(), 20);
        assert_eq!(curve[0].method, Method::Chernov);
        assert_eq!(curve[4].rho, g[1].value());
    }
}
