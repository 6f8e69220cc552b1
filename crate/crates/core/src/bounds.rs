//! Lower bounds for theta constants and for `χ₁₀` on `ℱ₂`, checked
//! numerically against the evaluated values.
//!
//! * `a = 0`: `|θ_ab| ≥ 0.44`;
//! * `a ∉ {0, (½,½)}`: `|θ_ab| ≥ 0.75·e^{−π aᵀYa}`;
//! * `a = (½,½)`, `b = (ν/2, ν/2)`: `|θ_ab| ≥ 1.12·|1 + (−1)^ν e^{πi z₁₂}|·e^{−π(aᵀYa − y₁₂)}`;
//! * `|χ₁₀| ≥ c₀·min(1, π|z₁₂|)²·e^{−2π(Tr Y − y₁₂)}` with `c₀ = 8·10⁻⁵`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::highprec::{BigComplex, BigReal, PrecisionContext};
use crate::siegel::{in_fundamental_domain, reduce};
use crate::theta::{chi10, even_characteristics, even_theta_constants, theta_constant, PeriodMatrix, ThetaCharacteristic, ThetaValue};

pub const C0: f64 = 8e-5;

#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub rule: &'static str,
    pub bound: BigReal,
    pub value: BigReal,
    pub error: BigReal,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct Chi10Check {
    pub sharp: BigReal,
    pub weak: BigReal,
    pub value: BigReal,
    pub error: BigReal,
    pub pass: bool,
}

fn ensure_reduced(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<()> {
    if !in_fundamental_domain(z, &ctx.tol().mul_i64(2)) {
        return Err(Error::OutsideFundamentalDomain);
    }
    Ok(())
}

fn theta_bound(ch: ThetaCharacteristic, z: &PeriodMatrix, ctx: &PrecisionContext) -> (&'static str, BigReal) {
    let z = z.with_precision(ctx.wp());
    let (y11, y12, y22) = (&z.z11.im, &z.z12.im, &z.z22.im);
    match ch.a {
        [0, 0] => ("0.44", ctx.frac(44, 100)),
        [1, 1] => {
            let aya = (y11 + &y12.mul_i64(2) + y22).div_i64(4);
            let w = BigComplex::new(-(&z.z12.im * &ctx.pi()), &z.z12.re * &ctx.pi()).exp();
            let sign = if ch.b[0] == 1 { -&w } else { w };
            let f = (&BigComplex::one(ctx.wp()) + &sign).abs();
            let e = (-(ctx.pi() * (aya - y12))).exp();
            ("1.12", ctx.frac(112, 100) * f * e)
        }
        [a1, _] => {
            let aya = if a1 == 1 { y11.div_i64(4) } else { y22.div_i64(4) };
            ("0.75", ctx.frac(75, 100) * (-(ctx.pi() * aya)).exp())
        }
    }
}

fn judge(ch: ThetaCharacteristic, z: &PeriodMatrix, t: &ThetaValue, ctx: &PrecisionContext) -> BoundCheck {
    let (rule, bound) = theta_bound(ch, z, ctx);
    let value = t.value.abs();
    let slack = &t.error + &ctx.eps();
    let pass = &value + &slack >= bound;
    BoundCheck { rule, bound, value, error: t.error.clone(), pass }
}

/// The applicable theta lower bound at `Z ∈ ℱ₂`.
pub fn check_theta_lb(ch: ThetaCharacteristic, z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<BoundCheck> {
    ensure_reduced(z, ctx)?;
    let t = theta_constant(ch, z, ctx)?;
    Ok(judge(ch, z, &t, ctx))
}

/// All ten theta bounds at `Z ∈ ℱ₂`, in the order of [`even_characteristics`].
pub fn check_all_theta_lb(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Vec<(ThetaCharacteristic, BoundCheck)>> {
    ensure_reduced(z, ctx)?;
    let ts = even_theta_constants(z, ctx)?;
    Ok(even_characteristics()
        .into_iter()
        .zip(&ts)
        .map(|(ch, t)| (ch, judge(ch, z, t, ctx)))
        .collect())
}

/// The `χ₁₀` lower bound (sharp and weak forms) at `Z ∈ ℱ₂`.
pub fn check_chi10_lb(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Chi10Check> {
    ensure_reduced(z, ctx)?;
    let zz = z.with_precision(ctx.wp());
    let c = chi10(&zz, ctx)?;
    let m = (ctx.pi() * zz.z12.abs()).min(&ctx.one());
    let base = BigReal::from_f64(C0, ctx.wp()) * m.sqr();
    let tr = zz.trace_im();
    let sharp = &base * &(-(ctx.pi().mul_i64(2) * (&tr - &zz.z12.im))).exp();
    let weak = &base * &(-(ctx.pi().mul_i64(2) * &tr)).exp();
    let value = c.value.abs();
    let pass = &value + &(&c.error + &ctx.eps()) >= sharp;
    Ok(Chi10Check { sharp, weak, value, error: c.error, pass })
}

/// `|e^{iz/2} + 1| ≥ 1` and `|e^{iz} − 1| ≥ (1 − e⁻¹)·min(1, |z|)` for
/// `|Re z| ≤ π`.
pub fn check_exp_ineq(z: &BigComplex, ctx: &PrecisionContext) -> Result<bool> {
    let z = z.with_precision(ctx.wp());
    if z.re.abs() > &ctx.pi() + &ctx.eps() {
        return Err(Error::Domain { arg: z.to_string(), domain: "|Re z| ≤ π" });
    }
    let one = BigComplex::one(ctx.wp());
    let iz = z.mul_i_pow(1);
    let half = iz.scale(&ctx.frac(1, 2)).exp();
    let first = (&half + &one).abs() + ctx.eps() >= ctx.one();
    let rhs = (ctx.one() - (-ctx.one()).exp()) * z.abs().min(&ctx.one());
    let second = (&iz.exp() - &one).abs() + ctx.eps() >= rhs;
    Ok(first && second)
}

/// `n` reduced matrices: real parts uniform in `[−½, ½]`, `Im z₁₁` uniform in
/// `[√3/2, 3]`, `Im z₁₂ ∈ [0, Im z₁₁/2]`, `Im z₂₂ ∈ [Im z₁₁, Im z₁₁ + 3]`,
/// then [`reduce`].
pub fn sample_fundamental_domain(n: usize, seed: u64, ctx: &PrecisionContext) -> Result<Vec<PeriodMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = 3f64.sqrt() / 2.0;
    (0..n)
        .map(|_| {
            let mut re = || rng.gen_range(-0.5..=0.5);
            let (x11, x12, x22) = (re(), re(), re());
            let y11 = rng.gen_range(lo..=3.0);
            let y12 = rng.gen_range(0.0..=y11 / 2.0);
            let y22 = y11 + rng.gen_range(0.0..=3.0);
            let z = PeriodMatrix::from_f64((x11, y11), (x12, y12), (x22, y22), ctx.wp())?;
            Ok(reduce(&z, ctx)?.z)
        })
        .collect()
}

/// A failed bound, with the matrix printed for replay.
#[derive(Clone, Debug)]
pub struct Failure {
    pub z: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct BoundsReport {
    pub samples: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

/// Every lemma bound on `n` seeded samples.
pub fn run_bounds_suite(n: usize, seed: u64, ctx: &PrecisionContext) -> Result<BoundsReport> {
    let mut report = BoundsReport { samples: n, ..Default::default() };
    for z in sample_fundamental_domain(n, seed, ctx)? {
        let show = || format!("{:.60}", z);
        for (ch, c) in check_all_theta_lb(&z, ctx)? {
            report.checks += 1;
            if !c.pass {
                report.failures.push(Failure {
                    z: show(),
                    detail: format!("{ch}: |θ| = {} < {} ({} rule)", c.value.to_sci(20), c.bound.to_sci(20), c.rule),
                });
            }
        }
        let c = check_chi10_lb(&z, ctx)?;
        report.checks += 1;
        if !c.pass || c.weak > c.sharp {
            report.failures.push(Failure {
                z: show(),
                detail: format!("χ₁₀: |χ₁₀| = {} vs sharp {} weak {}", c.value.to_sci(20), c.sharp.to_sci(20), c.weak.to_sci(20)),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{THETA1, THETA2};
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn identity_examples() {
        let c = ctx();
        let z = PeriodMatrix::i_identity(c.wp());
        let r = check_theta_lb(THETA1[0], &z, &c).unwrap();
        assert!(r.pass && r.rule == "0.44");
        assert!((r.value.to_f64() - 1.18034059901609).abs() < 1e-12);
        let r = check_theta_lb(THETA2[0], &z, &c).unwrap();
        assert!(r.pass && r.rule == "0.75");
        assert!((r.bound.to_f64() - 0.75 * (-std::f64::consts::PI / 4.0).exp()).abs() < 1e-15);
        let r = check_theta_lb(THETA2[5], &z, &c).unwrap();
        assert!(r.pass && (r.bound.is_zero() || r.bound.to_f64() < 1e-70));
        let x = check_chi10_lb(&z, &c).unwrap();
        assert!(x.pass && x.sharp.is_zero());
    }

    #[test]
    fn outside_domain_is_rejected() {
        let c = ctx();
        let z = PeriodMatrix::from_f64((0.9, 1.0), (0.0, 0.2), (0.0, 1.2), c.wp()).unwrap();
        assert!(matches!(check_theta_lb(THETA1[0], &z, &c), Err(Error::OutsideFundamentalDomain)));
        assert!(matches!(check_chi10_lb(&z, &c), Err(Error::OutsideFundamentalDomain)));
    }

    #[test]
    fn exp_examples() {
        let c = ctx();
        assert!(check_exp_ineq(&BigComplex::zero(c.wp()), &c).unwrap());
        assert!(check_exp_ineq(&BigComplex::from_real(c.pi()), &c).unwrap());
        assert!(check_exp_ineq(&BigComplex::from_f64(4.0, 0.0, c.wp()), &c).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_reduced() {
        let c = ctx();
        let a = sample_fundamental_domain(5, 7, &c).unwrap();
        let b = sample_fundamental_domain(5, 7, &c).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|z| in_fundamental_domain(z, &c.tol().mul_i64(2))));
    }

    #[test]
    fn small_suite_has_no_failures() {
        let c = ctx();
        let r = run_bounds_suite(8, 1, &c).unwrap();
        assert_eq!(r.checks, 8 * 11);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn exp_strip(x in -std::f64::consts::PI..std::f64::consts::PI, y in -5.0f64..5.0) {
            let c = PrecisionContext::new(64).unwrap();
            prop_assert!(check_exp_ineq(&BigComplex::from_f64(x, y, c.wp()), &c).unwrap());
        }
    }
}
