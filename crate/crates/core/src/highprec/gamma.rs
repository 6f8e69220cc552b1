use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BigReal, PrecisionContext};
use crate::error::{Error, Result};

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// Even-index Bernoulli numbers `B_0, B_2, …, B_{2k}` (exact).
fn bernoulli_even(k: usize) -> Vec<BigRational> {
    let mut cache = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    let need = 2 * k + 1;
    if cache.is_empty() {
        cache.push(BigRational::one());
    }
    while cache.len() < need {
        // B_m = −1/(m+1) · Σ_{j<m} C(m+1, j) B_j
        let m = cache.len();
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, b) in cache.iter().enumerate() {
            acc += b * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        cache.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    cache.iter().step_by(2).take(k + 1).cloned().collect()
}

/// `log Γ(x)` for `0 < x ≤ 1`.
pub fn log_gamma(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    log_gamma_with_shift(x, ctx, 0)
}

/// `log Γ(x)` through Stirling's series at `x + N`, where `N` is the default
/// shift plus `extra`.
pub fn log_gamma_with_shift(x: &BigReal, ctx: &PrecisionContext, extra: usize) -> Result<BigReal> {
    let one = ctx.one();
    if !x.is_positive() || *x > one {
        return Err(Error::Domain { arg: x.to_sci(20), domain: "(0, 1]" });
    }
    let wp = ctx.wp();
    let x = x.with_precision(wp);
    if x == one {
        return Ok(ctx.zero());
    }
    let n = (wp as f64 * 0.25).ceil() as usize + extra;

    // log Γ(x) = log Γ(x + N) − log ∏_{j<N} (x + j)
    let mut prod = x.clone();
    for j in 1..n {
        prod = prod * (&x + &ctx.int(j as i64));
    }
    let y = &x + &ctx.int(n as i64);

    let half = ctx.frac(1, 2);
    let two_pi = ctx.pi().mul_i64(2);
    let mut s = (&y - &half) * y.ln() - &y + two_pi.ln() * &half;

    let target = ctx.eps().with_precision(64) * BigReal::pow2(-(ctx.guard() as i64));
    let y2 = y.sqr();
    let mut ypow = y.clone();
    let mut last = None;
    for k in 1.. {
        let b = &bernoulli_even(k)[k];
        let coef = b / BigRational::from_integer(BigInt::from(2 * k * (2 * k - 1)));
        let term = ctx.rational(&coef) / &ypow;
        let size = term.abs();
        if let Some(prev) = &last {
            if size > *prev {
                return Err(Error::Precision(
                    "Stirling series diverged before reaching the target accuracy".into(),
                ));
            }
        }
        s = s + &term;
        // For real y > 0 the remainder is bounded by the first omitted term.
        if size < target {
            break;
        }
        last = Some(size);
        ypow = ypow * &y2;
    }
    Ok(s - prod.ln())
}
