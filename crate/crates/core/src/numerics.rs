//! Special functions and one-dimensional solvers shared by the bound engines.
//!
//! Everything here is pure; all functions can be called from any thread.

use crate::error::{Error, Result};

/// Default relative tolerance on the minimizing λ.
pub const LAMBDA_REL_TOL: f64 = 1e-10;
/// Default relative tolerance on an inverted half-width `t`.
pub const T_REL_TOL: f64 = 1e-9;

const H_SERIES_SWITCH: f64 = 1e-3;
const H_SINH_SWITCH: f64 = 2.0;
const MAX_ITER: usize = 1000;

/// Search interval `[lo, hi]` for a scalar solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    /// Both ends must be finite with `0 <= lo < hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::InvalidBracket { lo, hi });
        }
        Ok(Bracket { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a finite x > 0, got {x}")))
    }
}

/// `h(x) = log((1 - e^(-x)) / x)` for `x > 0`.
///
/// Three regimes: a short Taylor series below `1e-3`, the identity
/// `h(x) = -x/2 + log(sinh(x/2) / (x/2))` up to 2, and
/// `log(-expm1(-x)) - log(x)` above. The middle branch avoids the
/// cancellation between two logarithms of similar size that the last
/// form suffers for small `x`.
pub fn h_stable(x: f64) -> Result<f64> {
    check_positive("h", x)?;
    Ok(h_unchecked(x))
}

pub(crate) fn h_unchecked(x: f64) -> f64 {
    if x < H_SERIES_SWITCH {
        let x2 = x * x;
        -0.5 * x + x2 / 24.0 - x2 * x2 / 2880.0
    } else if x < H_SINH_SWITCH {
        let y = 0.5 * x;
        -y + sinh_over_x_minus_one(y).ln_1p()
    } else {
        (-(-x).exp_m1()).ln() - x.ln()
    }
}

/// `sinh(x)/x - 1` by its power series, accurate for `0 < x <= 2`.
fn sinh_over_x_minus_one(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x2 / 6.0;
    let mut sum = term;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        k += 2.0;
        term *= x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
    }
    sum
}

/// `log(sinh(x) / x)` for `x > 0`, safe against overflow for large `x`.
///
/// Uses `log(sinh(x)/x) = x + h(2x)` above 1 and a cancellation-free
/// series for `sinh(x)/x - 1` below. The result is never negative.
pub fn log_sinh_over_x(x: f64) -> Result<f64> {
    check_positive("log_sinh_over_x", x)?;
    Ok(log_sinh_over_x_unchecked(x))
}

pub(crate) fn log_sinh_over_x_unchecked(x: f64) -> f64 {
    let v = if x < 1.0 {
        sinh_over_x_minus_one(x).ln_1p()
    } else {
        x + h_unchecked(2.0 * x)
    };
    v.max(0.0)
}

/// Minimizes a unimodal `f` over a strictly positive bracket.
///
/// Golden-section search on `log x`, so the stopping rule is a relative
/// width `rel_tol` on the argument. The original endpoints are compared
/// against the final interior estimate, so a monotone `f` returns the
/// matching endpoint exactly. Returns `(argmin, min_value)`.
pub fn minimize_1d<F>(f: F, bracket: Bracket, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if bracket.lo <= 0.0 {
        return Err(Error::InvalidBracket {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x })
        }
    };

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (bracket.lo.ln(), bracket.hi.ln());
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c.exp())?;
    let mut fd = eval(d.exp())?;
    let mut iter = 0;
    while b - a > rel_tol && iter < MAX_ITER {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d.exp())?;
        }
        iter += 1;
    }

    let mut best = if fc <= fd { (c.exp(), fc) } else { (d.exp(), fd) };
    for x in [bracket.lo, bracket.hi] {
        let v = eval(x)?;
        if v < best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Solves `g(t) = target` for a nonincreasing `g` by bisection.
///
/// Requires `g(lo) >= target >= g(hi)`. The returned point always
/// satisfies `g(t) <= target`, i.e. it is the upper end of the final
/// interval, whose relative width is at most `rel_tol`.
pub fn invert_monotone<G>(g: G, target: f64, bracket: Bracket, rel_tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let eval = |t: f64| -> Result<f64> {
        let v = g(t);
        if v.is_nan() {
            Err(Error::NonFinite { x: t })
        } else {
            Ok(v)
        }
    };
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let g_lo = eval(lo)?;
    let g_hi = eval(hi)?;
    if g_lo < target || g_hi > target {
        return Err(Error::NoStraddle {
            lo,
            hi,
            target,
            g_lo,
            g_hi,
        });
    }
    if g_lo <= target {
        return Ok(lo);
    }
    for _ in 0..MAX_ITER {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
