use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::BigReal;

/// Arbitrary-precision complex number.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.precision();
        Self { re, im: BigReal::from_i64(0, p) }
    }

    pub fn zero(p: usize) -> Self {
        Self::from_i64(0, 0, p)
    }

    pub fn one(p: usize) -> Self {
        Self::from_i64(1, 0, p)
    }

    pub fn i(p: usize) -> Self {
        Self::from_i64(0, 1, p)
    }

    pub fn from_i64(re: i64, im: i64, p: usize) -> Self {
        Self { re: BigReal::from_i64(re, p), im: BigReal::from_i64(im, p) }
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Self { re: BigReal::from_f64(re, p), im: BigReal::from_f64(im, p) }
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn with_precision(&self, p: usize) -> Self {
        Self { re: self.re.with_precision(p), im: self.im.with_precision(p) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> BigReal {
        BigReal::atan2(&self.im, &self.re)
    }

    pub fn scale(&self, s: &BigReal) -> Self {
        Self { re: &self.re * s, im: &self.im * s }
    }

    /// Multiplication by `i^k`.
    pub fn mul_i_pow(&self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => Self { re: -&self.im, im: self.re.clone() },
            2 => -self,
            _ => Self { re: self.im.clone(), im: -&self.re },
        }
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Self { re: &r * &self.im.cos(), im: &r * &self.im.sin() }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self { re: self.norm_sqr().ln().div_i64(2), im: self.arg() }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.precision();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        let two = BigReal::from_i64(2, p);
        let a = ((&r + &self.re.abs()) / &two).sqrt();
        let b = &self.im.abs() / &(&a * &two);
        match (self.re.is_negative(), self.im.is_negative()) {
            (false, _) => Self { re: a, im: if self.im.is_negative() { -b } else { b } },
            (true, false) => Self { re: b, im: a },
            (true, true) => Self { re: b, im: -a },
        }
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.precision());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.sqr();
            n >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(30);
        let im = self.im.to_sci(d);
        match im.strip_prefix('-') {
            Some(m) => write!(f, "{}-{}*i", self.re.to_sci(d), m),
            None => write!(f, "{}+{}*i", self.re.to_sci(d), im),
        }
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, o: &BigComplex) -> BigComplex {
        let n = o.norm_sqr();
        BigComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
}

macro_rules! owned_variants {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                (&self).$m(&o)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                (&self).$m(o)
            }
        }
        impl $tr<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                self.$m(&o)
            }
        }
    };
}

owned_variants!(Add, add);
owned_variants!(Sub, sub);
owned_variants!(Mul, mul);
owned_variants!(Div, div);

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -&self.re, im: -&self.im }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highprec::PrecisionContext;
    use proptest::prelude::*;

    fn close(a: &BigComplex, b: &BigComplex, tol: &BigReal) -> bool {
        (a - b).abs() <= *tol
    }

    #[test]
    fn basic_identities() {
        let p = 160;
        let i = BigComplex::i(p);
        assert!(close(&i.sqr(), &BigComplex::from_i64(-1, 0, p), &BigReal::pow2(-150)));
        let ctx = PrecisionContext::new(128).unwrap();
        let ipi = BigComplex::new(ctx.zero(), ctx.pi());
        assert!(close(&ipi.exp(), &BigComplex::from_i64(-1, 0, ctx.wp()), &ctx.eps()));
        assert_eq!(BigComplex::from_i64(3, 4, p).abs().to_f64(), 5.0);
        assert!(close(&i.mul_i_pow(3), &BigComplex::from_i64(1, 0, p), &BigReal::pow2(-150)));
        assert!(close(&i.mul_i_pow(-1), &BigComplex::from_i64(1, 0, p), &BigReal::pow2(-150)));
        assert!(BigComplex::zero(p).sqrt().is_zero());
    }

    #[test]
    fn display() {
        let z = BigComplex::from_f64(1.5, -0.25, 128);
        assert_eq!(format!("{z:.3}"), "1.50e0-2.50e-1*i");
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(re in -20.0f64..20.0, im in -20.0f64..20.0) {
            let ctx = PrecisionContext::default();
            let z = BigComplex::from_f64(re, im, ctx.wp());
            let s = z.sqrt();
            prop_assert!(!s.re.is_negative());
            let tol = &ctx.eps() * &(z.abs() + ctx.one());
            prop_assert!(close(&s.sqr(), &z, &tol));
        }

        #[test]
        fn exp_ln_roundtrip(re in -20.0f64..20.0, im in -20.0f64..20.0) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let ctx = PrecisionContext::default();
            let z = BigComplex::from_f64(re, im, ctx.wp());
            let tol = &ctx.eps() * &(z.abs() + ctx.one());
            prop_assert!(close(&z.ln().exp(), &z, &tol));
        }

        #[test]
        fn division_inverts_multiplication(a in -9.0f64..9.0, b in -9.0f64..9.0,
                                           c in 0.1f64..9.0, d in -9.0f64..9.0, n in 0u32..7) {
            let p = 288;
            let x = BigComplex::from_f64(a, b, p);
            let y = BigComplex::from_f64(c, d, p);
            prop_assert!(close(&(&(&x * &y) / &y), &x, &BigReal::pow2(-250)));
            prop_assert!(close(&(&y * &y.recip()), &BigComplex::one(p), &BigReal::pow2(-250)));
            let mut direct = BigComplex::one(p);
            for _ in 0..n { direct = &direct * &y; }
            let rel = &(&y.powi(n) - &direct).abs() / &direct.abs();
            prop_assert!(rel < BigReal::pow2(-270));
        }
    }
}
