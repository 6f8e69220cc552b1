//! Arbitrary-precision real and complex arithmetic on top of `astro-float`,
//! plus the two special routines the height engines need: `log Γ` on (0, 1]
//! and complex roots of rational polynomials.
//!
//! A [`BigReal`] remembers the precision it was created at; binary operations
//! round to the larger of the two operand precisions.

mod complex;
mod gamma;
pub(crate) mod roots;

pub use complex::BigComplex;
pub use gamma::{log_gamma, log_gamma_with_shift};
pub use roots::poly_roots;

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision settings shared by every high-precision routine.
#[derive(Clone)]
pub struct PrecisionContext {
    bits: usize,
    guard: usize,
    constants: Arc<OnceLock<(BigReal, BigReal)>>,
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrecisionContext {{ bits: {}, guard: {} }}", self.bits, self.guard)
    }
}

impl PartialEq for PrecisionContext {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.guard == other.guard
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(256).expect("default precision is valid")
    }
}

impl PrecisionContext {
    pub const DEFAULT_GUARD: usize = 32;
    pub const MIN_BITS: usize = 64;

    pub fn new(bits: usize) -> Result<Self> {
        Self::with_guard(bits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(bits: usize, guard: usize) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Precision(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        if bits > 1 << 20 {
            return Err(Error::Precision(format!("precision {bits} bits is unreasonably large")));
        }
        Ok(Self { bits, guard, constants: Arc::new(OnceLock::new()) })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Precision used internally: requested bits plus guard bits.
    pub fn wp(&self) -> usize {
        self.bits + self.guard
    }

    /// Context at twice the precision, for convergence cross-checks.
    pub fn doubled(&self) -> Self {
        Self::with_guard(2 * self.bits, self.guard).expect("doubling keeps a valid precision")
    }

    /// Default comparison slack `2^(−bits/2)`.
    pub fn tol(&self) -> BigReal {
        BigReal::pow2(-((self.bits / 2) as i64))
    }

    /// `2^(−bits)`, the target accuracy.
    pub fn eps(&self) -> BigReal {
        BigReal::pow2(-(self.bits as i64))
    }

    fn constants(&self) -> &(BigReal, BigReal) {
        self.constants.get_or_init(|| {
            let p = self.wp();
            with_consts(|cc| {
                (
                    BigReal { v: cc.pi(p, RM), p },
                    BigReal { v: cc.ln_2(p, RM), p },
                )
            })
        })
    }

    pub fn pi(&self) -> BigReal {
        self.constants().0.clone()
    }

    pub fn ln2(&self) -> BigReal {
        self.constants().1.clone()
    }

    pub fn zero(&self) -> BigReal {
        BigReal::from_i64(0, self.wp())
    }

    pub fn one(&self) -> BigReal {
        BigReal::from_i64(1, self.wp())
    }

    pub fn int(&self, n: i64) -> BigReal {
        BigReal::from_i64(n, self.wp())
    }

    pub fn rational(&self, q: &BigRational) -> BigReal {
        BigReal::from_rational(q, self.wp())
    }

    pub fn frac(&self, n: i64, d: i64) -> BigReal {
        self.int(n) / self.int(d)
    }
}

/// Arbitrary-precision real number.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    p: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        Self { v, p }
    }

    pub fn from_i64(n: i64, p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(n, p), p)
    }

    pub fn from_f64(x: f64, p: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, p), p)
    }

    /// Exact power of two at a small precision.
    pub fn pow2(k: i64) -> Self {
        let mut v = BigFloat::from_i64(1, 64);
        v.set_exponent((k + 1) as astro_float::Exponent);
        Self::wrap(v, 64)
    }

    pub fn from_bigint(n: &BigInt, p: usize) -> Self {
        if n.is_zero() {
            return Self::from_i64(0, p);
        }
        let words: Vec<Word> = n.magnitude().to_u64_digits().into_iter().map(|w| w as Word).collect();
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        let e = (words.len() * WORD_BIT_SIZE) as astro_float::Exponent;
        let exact = BigFloat::from_words(&words, sign, e);
        let mut v = exact.clone();
        if v.set_precision(p.max(64), RM).is_err() {
            v = exact;
        }
        Self::wrap(v, p)
    }

    pub fn from_rational(q: &BigRational, p: usize) -> Self {
        let n = Self::from_bigint(q.numer(), p + 64);
        let d = Self::from_bigint(q.denom(), p + 64);
        Self::wrap(n.v.div(&d.v, p, RM), p)
    }

    /// Parses a decimal literal such as `-1.25e-3`.
    pub fn parse(s: &str, p: usize) -> Result<Self> {
        let t = s.trim();
        let ok = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
            && t.chars().any(|c| c.is_ascii_digit());
        if !ok {
            return Err(Error::Input(format!("not a decimal number: {s:?}")));
        }
        let v = with_consts(|cc| BigFloat::parse(t, astro_float::Radix::Dec, p, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Input(format!("not a decimal number: {s:?}")));
        }
        Ok(Self::wrap(v, p))
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    /// Same value rounded to precision `p`.
    pub fn with_precision(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        let _ = v.set_precision(p.max(64), RM);
        Self::wrap(v, p)
    }

    pub fn to_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((m, _, s, e, _)) => {
                let Some(&top) = m.last() else { return 0.0 };
                if top == 0 {
                    return 0.0;
                }
                let mag = (top as f64) * 2f64.powi(e - WORD_BIT_SIZE as i32);
                if s == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    /// Binary exponent `e` with `2^(e−1) ≤ |x| < 2^e`, `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.v.exponent().map(i64::from)
        }
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.p, RM), self.p)
    }

    pub fn exp(&self) -> Self {
        with_consts(|cc| Self::wrap(self.v.exp(self.p, RM, cc), self.p))
    }

    /// Natural logarithm; NaN-free inputs only (caller checks positivity).
    pub fn ln(&self) -> Self {
        with_consts(|cc| Self::wrap(self.v.ln(self.p, RM, cc), self.p))
    }

    pub fn sin(&self) -> Self {
        with_consts(|cc| Self::wrap(self.v.sin(self.p, RM, cc), self.p))
    }

    pub fn cos(&self) -> Self {
        with_consts(|cc| Self::wrap(self.v.cos(self.p, RM, cc), self.p))
    }

    pub fn atan(&self) -> Self {
        with_consts(|cc| Self::wrap(self.v.atan(self.p, RM, cc), self.p))
    }

    /// Angle of the point `(x, y)` in `(−π, π]`.
    pub fn atan2(y: &Self, x: &Self) -> Self {
        let p = y.p.max(x.p);
        let pi = with_consts(|cc| Self::wrap(cc.pi(p, RM), p));
        if x.is_zero() {
            let half = &pi / &Self::from_i64(2, p);
            return match (y.is_positive(), y.is_negative()) {
                (true, _) => half,
                (_, true) => -half,
                _ => Self::from_i64(0, p),
            };
        }
        let base = (y / x).atan();
        if x.is_positive() {
            base
        } else if y.is_negative() {
            base - pi
        } else {
            base + pi
        }
    }

    pub fn powi(&self, n: u32) -> Self {
        Self::wrap(self.v.powi(n as usize, self.p, RM), self.p)
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self * &Self::from_i64(n, self.p)
    }

    pub fn div_i64(&self, n: i64) -> Self {
        self / &Self::from_i64(n, self.p)
    }

    pub fn max(&self, o: &Self) -> Self {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn min(&self, o: &Self) -> Self {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    /// Nearest integer (ties to even), exactly.
    pub fn round_to_bigint(&self) -> BigInt {
        let r = self.v.round(0, RM);
        Self::integral_to_bigint(&r)
    }

    pub fn floor_to_bigint(&self) -> BigInt {
        Self::integral_to_bigint(&self.v.floor())
    }

    fn integral_to_bigint(r: &BigFloat) -> BigInt {
        let Some((m, _, s, e, _)) = r.as_raw_parts() else { return BigInt::zero() };
        if r.is_zero() || e <= 0 {
            return BigInt::zero();
        }
        let digits: Vec<u64> = m.iter().copied().collect();
        let mant = BigUint::new(
            digits.iter().flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32]).collect(),
        );
        let total = (m.len() * WORD_BIT_SIZE) as i64;
        let shift = total - e as i64;
        let mag = if shift >= 0 { mant >> shift as usize } else { mant << (-shift) as usize };
        let n = BigInt::from(mag);
        if s == Sign::Neg {
            -n
        } else {
            n
        }
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1));
        }
        if !self.is_finite() {
            return "NaN".into();
        }
        let (mant, k) = self.decimal_digits(digits);
        let s = mant.magnitude().to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        if digits == 1 {
            format!("{sign}{s}e{k}")
        } else {
            format!("{sign}{}.{}e{k}", &s[..1], &s[1..])
        }
    }

    /// Fixed-point decimal with `frac` digits after the point.
    pub fn to_fixed(&self, frac: usize) -> String {
        let p = self.p.max(64) + 64;
        let scale = BigReal::from_bigint(&BigInt::from(10u32).pow(frac as u32), p);
        let n = (&self.with_precision(p) * &scale).round_to_bigint();
        let neg = n.is_negative();
        let s = n.magnitude().to_string();
        let s = if s.len() <= frac { format!("{}{}", "0".repeat(frac + 1 - s.len()), s) } else { s };
        let (int, fr) = s.split_at(s.len() - frac);
        let sign = if neg { "-" } else { "" };
        if frac == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{fr}")
        }
    }

    /// Integer `m` with `digits` digits and exponent `k` such that
    /// `self ≈ m · 10^(k − digits + 1)`.
    fn decimal_digits(&self, digits: usize) -> (BigInt, i64) {
        let p = self.p.max(64) + 64;
        let x = self.with_precision(p);
        let l2 = self.exponent().unwrap_or(0) as f64 - 0.5;
        let mut k = (l2 * std::f64::consts::LOG10_2).floor() as i64;
        for _ in 0..4 {
            let shift = digits as i64 - 1 - k;
            let ten = BigReal::from_bigint(&BigInt::from(10u32).pow(shift.unsigned_abs() as u32), p);
            let y = if shift >= 0 { &x * &ten } else { &x / &ten };
            let m = y.round_to_bigint();
            let len = m.magnitude().to_string().len();
            match len.cmp(&digits) {
                Ordering::Equal => return (m, k),
                Ordering::Greater => k += 1,
                Ordering::Less => k -= 1,
            }
        }
        unreachable!("decimal exponent estimate is off by more than two")
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.p as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_sci(digits))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(30))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                let p = self.p.max(o.p);
                BigReal::wrap(self.v.$m(&o.v, p, RM), p)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, o: BigReal) -> BigReal {
                (&self).$m(&o)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                (&self).$m(o)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, o: BigReal) -> BigReal {
                self.$m(&o)
            }
        }
    };
}

bin_op!(Add, add);
bin_op!(Sub, sub);
bin_op!(Mul, mul);
bin_op!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(mut self) -> BigReal {
        self.v.inv_sign();
        self
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -self.clone()
    }
}

/// Sum of a sequence, starting from zero at precision `p`.
pub fn sum<'a>(xs: impl IntoIterator<Item = &'a BigReal>, p: usize) -> BigReal {
    xs.into_iter().fold(BigReal::from_i64(0, p), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn context_rules() {
        assert!(PrecisionContext::new(63).is_err());
        let ctx = PrecisionContext::default();
        assert_eq!((ctx.bits(), ctx.guard(), ctx.wp()), (256, 32, 288));
        assert_eq!(ctx.doubled().bits(), 512);
        assert_eq!(ctx.tol().exponent(), Some(-127));
    }

    #[test]
    fn constants_to_many_digits() {
        let ctx = PrecisionContext::default();
        assert_eq!(
            ctx.pi().to_sci(60),
            "3.14159265358979323846264338327950288419716939937510582097494e0"
        );
        assert_eq!(
            ctx.ln2().to_sci(40),
            "6.931471805599453094172321214581765680755e-1"
        );
    }

    #[test]
    fn conversions() {
        let p = 200;
        let big: BigInt = "-123456789012345678901234567890123".parse().unwrap();
        let x = BigReal::from_bigint(&big, p);
        assert_eq!(x.round_to_bigint(), big);
        assert_eq!(BigReal::from_rational(&rat(-7, 2), p).round_to_bigint(), BigInt::from(-4));
        assert_eq!(BigReal::from_rational(&rat(7, 2), p).floor_to_bigint(), BigInt::from(3));
        assert_eq!(BigReal::from_f64(-0.3, p).floor_to_bigint(), BigInt::from(-1));
        assert_eq!(BigReal::from_rational(&rat(1, 3), p).to_f64(), 1.0 / 3.0);
        assert_eq!(BigReal::from_i64(-5, p).to_f64(), -5.0);
        assert_eq!(BigReal::pow2(-10).to_f64(), 1.0 / 1024.0);
        assert_eq!(BigReal::from_rational(&rat(-1, 8), p).to_fixed(4), "-0.1250");
        assert_eq!(BigReal::from_rational(&rat(2, 3), p).to_fixed(3), "0.667");
        assert_eq!(BigReal::from_i64(12345, p).to_sci(3), "1.23e4");
        assert_eq!(BigReal::from_rational(&rat(-1, 400), p).to_sci(2), "-2.5e-3");
        assert_eq!(BigReal::from_i64(0, p).to_sci(3), "0.00e0");
    }

    #[test]
    fn parsing() {
        let x = BigReal::parse("-1.25e-3", 128).unwrap();
        assert_eq!(x.to_sci(3), "-1.25e-3");
        assert!(BigReal::parse("abc", 128).is_err());
        assert!(BigReal::parse("", 128).is_err());
    }

    #[test]
    fn atan2_quadrants() {
        let p = 128;
        let one = BigReal::from_i64(1, p);
        let m1 = BigReal::from_i64(-1, p);
        let z = BigReal::from_i64(0, p);
        let q = |y: &BigReal, x: &BigReal| BigReal::atan2(y, x).to_f64();
        let pi = std::f64::consts::PI;
        assert!((q(&one, &one) - pi / 4.0).abs() < 1e-15);
        assert!((q(&one, &m1) - 3.0 * pi / 4.0).abs() < 1e-15);
        assert!((q(&m1, &m1) + 3.0 * pi / 4.0).abs() < 1e-15);
        assert!((q(&one, &z) - pi / 2.0).abs() < 1e-15);
        assert!((q(&z, &m1) - pi).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn exp_ln_roundtrip(x in 0.001f64..50.0) {
            let ctx = PrecisionContext::default();
            let a = BigReal::from_f64(x, ctx.wp());
            let err = (a.ln().exp() - &a).abs() / &a;
            prop_assert!(err < ctx.eps());
        }

        #[test]
        fn sin_cos_pythagoras(x in -10.0f64..10.0) {
            let ctx = PrecisionContext::default();
            let a = BigReal::from_f64(x, ctx.wp());
            let err = (a.sin().sqr() + a.cos().sqr() - ctx.one()).abs();
            prop_assert!(err < ctx.eps());
        }
    }
}
