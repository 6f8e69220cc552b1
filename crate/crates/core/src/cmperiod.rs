//! Period matrices of CM abelian surfaces over a real quadratic field
//! `F = ℚ(√Δ)`, the cusp-distance function `μ`, and the index identity
//! `2^g N(ω₁) ∏ Im φ_l(ω₂/ω₁) = N(𝔄)|Δ_K|^{1/2}` as a numeric residual.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{check_discriminant, module_norm, IntPolynomial, QuadElement, QuadModule};
use crate::highprec::poly_roots;
use crate::highprec::{BigComplex, BigReal, PrecisionContext};
use crate::theta::PeriodMatrix;

/// How `(τ₁, τ₂)` are supplied.
#[derive(Clone, Debug, PartialEq)]
pub enum TauSpec {
    /// Integer quartic with exactly two roots in the upper half-plane.
    Quartic(IntPolynomial),
    /// Two decimal complex numbers written `re+im*i`.
    Values(String, String),
}

/// CM data of one job.
#[derive(Clone, Debug, PartialEq)]
pub struct CMInput {
    pub delta_f: i64,
    pub f_k: i64,
    pub tau: TauSpec,
    pub character: String,
}

impl CMInput {
    pub fn new(delta_f: i64, f_k: i64, tau: TauSpec, character: String) -> Result<Self> {
        check_discriminant(&BigInt::from(delta_f))?;
        if f_k < 1 {
            return Err(Error::Input(format!("conductor f_K = {f_k} must be positive")));
        }
        Ok(Self { delta_f, f_k, tau, character })
    }

    /// `Δ_K = f_K² Δ_F`.
    pub fn delta_k(&self) -> BigInt {
        BigInt::from(self.f_k).pow(2) * self.delta_f
    }
}

/// Significant decimal digits of a plain decimal literal (sign, point and
/// exponent ignored; leading zeros not counted).
fn significant_digits(s: &str) -> usize {
    let mant = s.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len()
}

/// Parses `re+im*i`, `re-im*i`, `im*i` or `re`. Every nonzero component must
/// carry at least `⌈bits/3⌉` significant digits.
pub fn parse_complex(s: &str, ctx: &PrecisionContext) -> Result<BigComplex> {
    parse_complex_with(s, ctx, ctx.bits().div_ceil(3))
}

/// [`parse_complex`] with an explicit digit requirement.
pub fn parse_complex_with(s: &str, ctx: &PrecisionContext, need: usize) -> Result<BigComplex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Tau(format!("cannot parse complex number {s:?}"));
    let (re_s, im_s) = if let Some(body) = t.strip_suffix("*i") {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        }
    } else {
        (t.as_str(), "0")
    };
    let part = |x: &str| -> Result<BigReal> {
        let v = BigReal::parse(x.trim_start_matches('+'), ctx.wp()).map_err(|_| bad())?;
        if !v.is_zero() && significant_digits(x) < need {
            return Err(Error::Tau(format!(
                "{x:?} has {} significant digits; {need} are needed at {} bits",
                significant_digits(x),
                ctx.bits()
            )));
        }
        Ok(v)
    };
    Ok(BigComplex::new(part(re_s)?, part(im_s)?))
}

fn canonical_order(mut a: BigComplex, mut b: BigComplex, ctx: &PrecisionContext) -> (BigComplex, BigComplex) {
    if crate::highprec::roots::cmp_roots(&a, &b, &ctx.tol()) == std::cmp::Ordering::Greater {
        std::mem::swap(&mut a, &mut b);
    }
    (a, b)
}

/// `(τ₁, τ₂)` in canonical order (ascending real part, then imaginary part);
/// `swapped` returns the other ordering.
pub fn select_tau(spec: &TauSpec, swapped: bool, ctx: &PrecisionContext) -> Result<(BigComplex, BigComplex)> {
    let (a, b) = match spec {
        TauSpec::Quartic(p) => {
            if p.degree() != Some(4) {
                return Err(Error::Tau(format!("{p} is not a quartic")));
            }
            let upper: Vec<BigComplex> = poly_roots(p, ctx)?
                .into_iter()
                .filter(|z| z.im > ctx.tol())
                .collect();
            if upper.len() != 2 {
                return Err(Error::Tau(format!("{p} has {} roots in the upper half-plane, need 2", upper.len())));
            }
            let mut it = upper.into_iter();
            (it.next().expect("two"), it.next().expect("two"))
        }
        TauSpec::Values(x, y) => {
            let (a, b) = (parse_complex(x, ctx)?, parse_complex(y, ctx)?);
            if !a.im.is_positive() || !b.im.is_positive() {
                return Err(Error::Tau("τ values must have positive imaginary part".into()));
            }
            (a, b)
        }
    };
    let (a, b) = canonical_order(a, b, ctx);
    Ok(if swapped { (b, a) } else { (a, b) })
}

fn period_matrix_with(
    tau1: &BigComplex,
    tau2: &BigComplex,
    delta: i64,
    theta: &BigReal,
    theta_c: &BigReal,
) -> Result<PeriodMatrix> {
    let inv = BigReal::from_i64(delta, theta.precision()).recip();
    let z11 = (tau1 + tau2).scale(&inv);
    let z12 = -&(&tau1.scale(theta_c) + &tau2.scale(theta)).scale(&inv);
    let z22 = (&tau1.scale(&theta_c.sqr()) + &tau2.scale(&theta.sqr())).scale(&inv);
    PeriodMatrix::new(z11, z12, z22)
}

/// `Z = (1/Δ)[[τ₁+τ₂, −τ₁θ′−τ₂θ], [−τ₁θ′−τ₂θ, τ₁θ′²+τ₂θ²]]` with
/// `θ = (Δ+√Δ)/2`, `θ′ = (Δ−√Δ)/2`.
pub fn period_matrix(tau1: &BigComplex, tau2: &BigComplex, delta: i64, ctx: &PrecisionContext) -> Result<PeriodMatrix> {
    check_discriminant(&BigInt::from(delta))?;
    if !tau1.im.is_positive() || !tau2.im.is_positive() {
        return Err(Error::Tau("τ values must have positive imaginary part".into()));
    }
    let (t1, t2) = (tau1.with_precision(ctx.wp()), tau2.with_precision(ctx.wp()));
    let (theta, theta_c) = thetas(delta, ctx);
    period_matrix_with(&t1, &t2, delta, &theta, &theta_c)
}

fn thetas(delta: i64, ctx: &PrecisionContext) -> (BigReal, BigReal) {
    let d = ctx.int(delta);
    let s = d.sqrt();
    ((&d + &s).div_i64(2), (&d - &s).div_i64(2))
}

/// `φ_l(x)` for `x = (u + v√Δ)/w`, with `φ₁(√Δ) = +√Δ` and `φ₂(√Δ) = −√Δ`.
fn embed(x: &QuadElement, second: bool, ctx: &PrecisionContext) -> BigReal {
    let (u, v, w) = x.parts();
    let s = ctx.rational(&BigRational::from_integer(x.delta().clone())).sqrt();
    let vs = ctx.rational(&BigRational::from_integer(v.clone())) * s;
    let num = ctx.rational(&BigRational::from_integer(u.clone())) + if second { -vs } else { vs };
    num / ctx.rational(&BigRational::from_integer(w.clone()))
}

/// `μ(η, τ) = N(αO_F + β𝔡⁻¹)² ∏_l Im τ_l / |φ_l(α) − φ_l(β)τ_l|²` for
/// `η = [α : β]`.
pub fn cusp_mu(
    alpha: &QuadElement,
    beta: &QuadElement,
    tau: (&BigComplex, &BigComplex),
    delta: i64,
    ctx: &PrecisionContext,
) -> Result<BigReal> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(Error::Cusp("η = [0 : 0] is not a cusp".into()));
    }
    let m = QuadModule::ideal_combination(alpha, beta, &QuadModule::inverse_different(delta)?)?;
    let n = ctx.rational(&module_norm(&m)?);
    let mut mu = n.sqr();
    for (l, t) in [tau.0, tau.1].into_iter().enumerate() {
        let t = t.with_precision(ctx.wp());
        let a = BigComplex::from_real(embed(alpha, l == 1, ctx));
        let b = embed(beta, l == 1, ctx);
        let d = (&a - &t.scale(&b)).norm_sqr();
        if d <= ctx.eps() {
            return Err(Error::Cusp(format!("τ_{} sits on the boundary point φ(α/β)", l + 1)));
        }
        mu = mu * &t.im / d;
    }
    Ok(mu)
}

/// `|2²·N(ω₁)·Im τ₁·Im τ₂ − N(𝔄)·√Δ_K|`.
pub fn check_lemma_easy(
    norm_omega1: &BigReal,
    im_taus: (&BigReal, &BigReal),
    ideal_norm: &BigRational,
    delta_k: &BigInt,
    ctx: &PrecisionContext,
) -> BigReal {
    let lhs = norm_omega1.with_precision(ctx.wp()).mul_i64(4) * im_taus.0 * im_taus.1;
    let rhs = ctx.rational(ideal_norm) * ctx.rational(&BigRational::from_integer(delta_k.clone())).sqrt();
    (lhs - rhs).abs()
}
