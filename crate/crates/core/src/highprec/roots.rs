use std::cmp::Ordering;

use super::{BigComplex, BigReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::exact::IntPolynomial;

const MAX_ITER: usize = 1000;

fn horner(c: &[BigComplex], z: &BigComplex) -> (BigComplex, BigComplex) {
    let p = z.precision();
    let mut v = BigComplex::zero(p);
    let mut d = BigComplex::zero(p);
    for a in c.iter().rev() {
        d = &(&d * z) + &v;
        v = &(&v * z) + a;
    }
    (v, d)
}

/// All complex roots of a squarefree polynomial, sorted by real part, then
/// imaginary part.
pub fn poly_roots(poly: &IntPolynomial, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
    let n = match poly.degree() {
        None | Some(0) => return Err(Error::Polynomial("need a polynomial of degree ≥ 1".into())),
        Some(n) => n,
    };
    if !poly.is_squarefree() {
        return Err(Error::Polynomial(format!("{poly} is not squarefree")));
    }
    let wp = ctx.wp();
    let coeffs: Vec<BigComplex> = poly
        .coeffs()
        .iter()
        .map(|a| BigComplex::from_real(ctx.rational(a)))
        .collect();
    let lead = coeffs[n].re.clone();

    // Fujiwara-style root radius estimate for the starting circle.
    let mut radius = 0f64;
    for k in 1..=n {
        let r = (&coeffs[n - k].re / &lead).abs().to_f64().powf(1.0 / k as f64);
        radius = radius.max(r);
    }
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.7;
            BigComplex::from_f64(radius * t.cos(), radius * t.sin(), wp)
        })
        .collect();

    let stop = BigReal::pow2(8 - wp as i64);
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut done = true;
        for k in 0..n {
            let (v, d) = horner(&coeffs, &z[k]);
            if v.is_zero() {
                continue;
            }
            let ratio = &v / &d;
            let mut s = BigComplex::zero(wp);
            for j in 0..n {
                if j != k {
                    s = &s + &(&z[k] - &z[j]).recip();
                }
            }
            let denom = &BigComplex::one(wp) - &(&ratio * &s);
            let w = &ratio / &denom;
            let scale = z[k].abs().max(&ctx.one());
            if w.abs() > &stop * &scale {
                done = false;
            }
            z[k] = &z[k] - &w;
        }
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootFinding(format!(
            "Aberth iteration did not converge for {poly} in {MAX_ITER} steps"
        )));
    }

    let tol = ctx.tol();
    for r in z.iter_mut() {
        for _ in 0..2 {
            let (v, d) = horner(&coeffs, r);
            if v.is_zero() {
                break;
            }
            *r = &*r - &(&v / &d);
        }
        let (v, d) = horner(&coeffs, r);
        let step = if v.is_zero() { ctx.zero() } else { (&v / &d).abs() };
        if step > &tol * &r.abs().max(&ctx.one()) {
            return Err(Error::RootFinding(format!(
                "root {r:.20} of {poly} fails the Newton residual check"
            )));
        }
    }
    z.sort_by(|a, b| cmp_roots(a, b, &tol));
    Ok(z)
}

/// Orders by real part, treating real parts within `tol` as equal, then by
/// imaginary part.
pub(crate) fn cmp_roots(a: &BigComplex, b: &BigComplex, tol: &BigReal) -> Ordering {
    let dr = &a.re - &b.re;
    if dr.abs() > *tol {
        return a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal);
    }
    a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, IntPolynomial};
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn x2_plus_1() {
        let c = ctx();
        let r = poly_roots(&IntPolynomial::from_i64(&[1, 0, 1]), &c).unwrap();
        assert_eq!(r.len(), 2);
        assert!((&r[0].im + &c.one()).abs() < c.eps());
        assert!((&r[1].im - &c.one()).abs() < c.eps());
        assert!(r[0].re.abs() < c.eps() && r[1].re.abs() < c.eps());
    }

    #[test]
    fn biquadratic_closed_form() {
        let c = ctx();
        let r = poly_roots(&IntPolynomial::from_i64(&[128, 0, 32, 0, 1]), &c).unwrap();
        let s2 = c.int(2).sqrt();
        let a = (c.int(16) - s2.mul_i64(8)).sqrt();
        let b = (c.int(16) + s2.mul_i64(8)).sqrt();
        let mut want = [-&b, -&a, a.clone(), b.clone()];
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut got: Vec<BigReal> = r.iter().map(|z| z.im.clone()).collect();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < c.eps().mul_i64(16));
        }
        for z in &r {
            assert!(z.re.abs() < c.eps().mul_i64(16));
        }
    }

    #[test]
    fn example_quartic_has_two_upper_roots() {
        let c = ctx();
        let p = IntPolynomial::from_i64(&[889319, -137677, 6039, -61, 1]);
        let r = poly_roots(&p, &c).unwrap();
        let upper: Vec<_> = r.iter().filter(|z| z.im.is_positive()).collect();
        assert_eq!(upper.len(), 2);
        let (a, b) = (upper[0].to_f64(), upper[1].to_f64());
        assert!((a.0 - 13.2974).abs() < 1e-4 && (a.1 - 1.7470).abs() < 1e-4, "{a:?}");
        assert!((b.0 - 17.2026).abs() < 1e-4 && (b.1 - 68.1777).abs() < 1e-4, "{b:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let c = ctx();
        assert!(poly_roots(&IntPolynomial::from_i64(&[1, 2, 1]), &c).is_err());
        assert!(poly_roots(&IntPolynomial::from_i64(&[5]), &c).is_err());
        assert!(poly_roots(&IntPolynomial::zero(), &c).is_err());
    }

    #[test]
    fn rational_coefficients_and_zero_root() {
        let c = ctx();
        let p = IntPolynomial::new(vec![int(0), crate::exact::rat(-1, 4), int(0), int(1)]);
        let r = poly_roots(&p, &c).unwrap();
        for (z, want) in r.iter().zip([-0.5, 0.0, 0.5]) {
            assert!((z.re.to_f64() - want).abs() < 1e-60 && z.im.to_f64().abs() < 1e-60);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn vieta(coeffs in prop::collection::vec(-30i64..=30, 2..6), lead in 1i64..=4) {
            let mut c = coeffs.clone();
            c.push(lead);
            let p = IntPolynomial::from_i64(&c);
            prop_assume!(p.is_squarefree());
            let ctx = ctx();
            let r = poly_roots(&p, &ctx).unwrap();
            let n = r.len();
            let wp = ctx.wp();
            let sum = r.iter().fold(BigComplex::zero(wp), |a, z| &a + z);
            let prod = r.iter().fold(BigComplex::one(wp), |a, z| &a * z);
            let want_sum = ctx.frac(-c[n - 1], lead);
            let sign = if n.is_multiple_of(2) { 1 } else { -1 };
            let want_prod = ctx.frac(sign * c[0], lead);
            let tol = ctx.tol();
            prop_assert!((&sum.re - &want_sum).abs() < tol && sum.im.abs() < tol);
            prop_assert!((&prod.re - &want_prod).abs() < tol && prod.im.abs() < tol);
        }
    }
}
