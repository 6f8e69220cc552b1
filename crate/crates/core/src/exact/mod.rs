//! Exact arithmetic substrate: rationals with p-adic valuations, polynomials
//! with binary-form discriminants, and Z-lattices in a real quadratic field.
//!
//! Everything here is exact. Rationals are `num_rational::BigRational`, which
//! is always kept in lowest terms with a positive denominator.

mod poly;
mod quad;

pub use poly::{binary_form_discriminant, disc_n, IntPolynomial};
pub use poly::resultant;
pub use quad::{check_discriminant, module_norm, QuadElement, QuadModule};

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms.
pub type ExactRational = BigRational;

/// Bound used by [`factor_trial`] when the caller does not override it.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent of the prime `p` in the factorization of `x`.
pub fn valuation(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let p = BigInt::from(p);
    Ok(int_valuation(x.numer(), &p) as i64 - int_valuation(x.denom(), &p) as i64)
}

fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality test for 64-bit integers (Miller-Rabin with the
/// first twelve prime bases, which is exact below 3.3e24).
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin on arbitrary-size integers with fixed bases. Used only to
/// classify cofactors left over after trial division.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
    })
}

/// Result of trial division: prime powers found and the unfactored rest.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFactorization {
    pub factors: Vec<(u64, u32)>,
    pub cofactor: BigUint,
}

/// Divides out every prime up to `bound` (capped at [`TRIAL_DIVISION_BOUND`]).
pub fn factor_trial(n: &BigUint, bound: u64) -> TrialFactorization {
    let mut rest = n.clone();
    let mut factors = Vec::new();
    if rest.is_zero() {
        return TrialFactorization { factors, cofactor: rest };
    }
    for &p in small_primes() {
        if p > bound {
            break;
        }
        if rest.is_one() {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    TrialFactorization { factors, cofactor: rest }
}

/// Largest `k` with `n = r^k`, returned as `(r, k)`. `n > 1` expected.
pub fn perfect_power(n: &BigUint) -> (BigUint, u32) {
    for k in (2..=64u32).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *n {
            return (r, k);
        }
    }
    (n.clone(), 1)
}

/// Human-readable factored form such as `-2^25*3^-19*39079^5`.
///
/// Primes up to the trial-division bound are split out; any leftover
/// cofactor is printed as a perfect power when it is one.
pub fn factored_string(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<(BigUint, i64)> = Vec::new();
    for (n, sgn) in [(x.numer(), 1i64), (x.denom(), -1i64)] {
        let mag = n.magnitude();
        let tf = factor_trial(mag, TRIAL_DIVISION_BOUND);
        for (p, e) in tf.factors {
            parts.push((BigUint::from(p), sgn * e as i64));
        }
        if !tf.cofactor.is_one() {
            let (r, k) = perfect_power(&tf.cofactor);
            parts.push((r, sgn * k as i64));
        }
    }
    parts.sort();
    let body = if parts.is_empty() {
        "1".to_string()
    } else {
        parts
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    };
    if x.numer().sign() == Sign::Minus {
        format!("-{body}")
    } else {
        body
    }
}

/// Parses `"a/b"` or `"a"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&int(8), 2).unwrap(), 3);
        assert_eq!(valuation(&int(1), 7).unwrap(), 0);
        let x = -BigRational::new(
            BigInt::from(3u32).pow(10) * BigInt::from(2029u32).pow(5),
            BigInt::from(2u32).pow(24),
        );
        assert_eq!(valuation(&x, 2).unwrap(), -24);
        assert_eq!(valuation(&x, 3).unwrap(), 10);
        assert_eq!(valuation(&x, 2029).unwrap(), 5);
    }

    #[test]
    fn valuation_errors() {
        assert_eq!(valuation(&int(0), 2), Err(Error::ZeroValuation));
        assert!(matches!(valuation(&int(5), 6), Err(Error::NotPrime(_))));
        assert!(matches!(valuation(&int(5), 1), Err(Error::NotPrime(_))));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes.len(), 25);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_probable_prime(&"42488533591199".parse().unwrap()));
        assert!(is_probable_prime(&"19780292330676250264630993".parse().unwrap()));
        assert!(!is_probable_prime(&"19780292330676250264630995".parse().unwrap()));
    }

    #[test]
    fn factored_display() {
        let x = -BigRational::new(
            BigInt::from(3u32).pow(10) * BigInt::from(2029u32).pow(5),
            BigInt::from(2u32).pow(24),
        );
        assert_eq!(factored_string(&x), "-2^-24*3^10*2029^5");
        let big: BigInt = "42488533591199".parse().unwrap();
        let y = BigRational::from_integer(big.pow(5) * 7);
        assert_eq!(factored_string(&y), "7*42488533591199^5");
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("17").unwrap(), int(17));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in 1i64..1_000_000, b in 1i64..1_000_000,
                                 c in 1i64..1_000_000, d in 1i64..1_000_000,
                                 pi in 0usize..6) {
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            let x = rat(a, b);
            let y = rat(-c, d);
            let xy = &x * &y;
            prop_assert_eq!(valuation(&xy, p).unwrap(),
                            valuation(&x, p).unwrap() + valuation(&y, p).unwrap());
        }
    }
}
