use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Polynomial over ℚ, lowest degree first, carrying a formal degree used when
/// the polynomial is read as a binary form.
#[derive(Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigRational>,
    formal_degree: usize,
}

impl IntPolynomial {
    /// Builds a polynomial; `formal_degree` must be at least the actual degree.
    pub fn with_formal_degree(coeffs: Vec<BigRational>, formal_degree: usize) -> Result<Self> {
        let mut p = Self { coeffs, formal_degree: 0 };
        p.trim();
        if let Some(d) = p.degree() {
            if d > formal_degree {
                return Err(Error::Polynomial(format!(
                    "formal degree {formal_degree} below actual degree {d}"
                )));
            }
        }
        p.formal_degree = formal_degree;
        Ok(p)
    }

    /// Polynomial whose formal degree is its actual degree.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = Self { coeffs, formal_degree: 0 };
        p.trim();
        p.formal_degree = p.degree().unwrap_or(0);
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Actual degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn formal_degree(&self) -> usize {
        self.formal_degree
    }

    /// Same coefficients, new formal degree.
    pub fn homogenize(&self, n: usize) -> Result<Self> {
        Self::with_formal_degree(self.coeffs.clone(), n)
    }

    /// Coefficient of `x^i` (zero past the end).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(x + c)`, keeping the formal degree.
    pub fn shift(&self, c: &BigRational) -> Self {
        let lin = Self::new(vec![c.clone(), BigRational::one()]);
        let mut out = Self::zero();
        for a in self.coeffs.iter().rev() {
            out = out.mul(&lin).add(&Self::new(vec![a.clone()]));
        }
        out.formal_degree = self.formal_degree;
        out
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::Polynomial("division by the zero polynomial".into()))?;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (j, b) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * b;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok((Self::new(q), Self::new(r)))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&lead.recip())
    }

    /// True when the polynomial has no repeated complex root.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// All coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [formal degree {}]", self.formal_degree)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({}/{})", mag.numer(), mag.denom())?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Determinant by fraction-based Gaussian elimination.
fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut d = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let p = m[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    d
}

/// Resultant of two nonzero polynomials via the Sylvester matrix.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigRational> {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Err(Error::Polynomial("resultant with the zero polynomial".into()));
    };
    if m == 0 && n == 0 {
        return Ok(BigRational::one());
    }
    let size = m + n;
    let mut s = vec![vec![BigRational::zero(); size]; size];
    for row in 0..n {
        for (k, c) in f.coeffs().iter().rev().enumerate() {
            s[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in g.coeffs().iter().rev().enumerate() {
            s[n + row][row + k] = c.clone();
        }
    }
    Ok(det(s))
}

/// Discriminant of `p` read as a binary form of degree `n`.
///
/// With leading coefficient `a_n ≠ 0` this is `(−1)^{n(n−1)/2} Res(p, p′)/a_n`.
/// A root at infinity of multiplicity one gives `a_{n−1}² disc_{n−1}(p)`;
/// higher multiplicity at infinity gives 0.
pub fn binary_form_discriminant(p: &IntPolynomial, n: usize) -> Result<BigRational> {
    let d = p
        .degree()
        .ok_or_else(|| Error::Polynomial("discriminant of the zero polynomial".into()))?;
    if d > n {
        return Err(Error::Polynomial(format!("degree {d} exceeds the form degree {n}")));
    }
    if n == 0 {
        return Err(Error::Polynomial("binary form of degree 0".into()));
    }
    if d + 1 < n {
        return Ok(BigRational::zero());
    }
    if d + 1 == n {
        let a = p.leading();
        return Ok(&a * &a * binary_form_discriminant(p, n - 1)?);
    }
    if n == 1 {
        return Ok(BigRational::one());
    }
    let res = resultant(p, &p.derivative())?;
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    Ok(res / p.leading() * BigRational::from_integer(sign.into()))
}

/// `disc_n` for the quintic (`n = 5`, nonzero leading coefficient) and
/// sextic (`n = 6`, leading coefficient may vanish) cases.
pub fn disc_n(p: &IntPolynomial, n: usize) -> Result<BigRational> {
    match n {
        5 => {
            if p.degree() != Some(5) {
                return Err(Error::Polynomial(
                    "disc_5 needs a polynomial of exact degree 5".into(),
                ));
            }
        }
        6 => {}
        _ => return Err(Error::Polynomial(format!("disc_n defined for n in {{5, 6}}, got {n}"))),
    }
    binary_form_discriminant(p, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn pow2(k: u32) -> BigRational {
        BigRational::from_integer(BigInt::from(2).pow(k))
    }

    #[test]
    fn disc_examples() {
        let p = IntPolynomial::from_i64(&[-1, 0, 0, 0, 0, 1]);
        assert_eq!(disc_n(&p, 5).unwrap(), int(3125));
        assert_eq!(disc_n(&p.scale(&int(4)), 6).unwrap(), pow2(20) * int(3125));
        assert_eq!(disc_n(&IntPolynomial::from_i64(&[0, 0, 0, 0, 0, 1]), 5).unwrap(), int(0));
    }

    #[test]
    fn disc_low_degree_oracles() {
        // b² − 4ac
        let q = IntPolynomial::from_i64(&[3, 5, 7]);
        assert_eq!(binary_form_discriminant(&q, 2).unwrap(), int(25 - 84));
        // x³ + ax + b: −4a³ − 27b²
        let c = IntPolynomial::from_i64(&[2, -3, 0, 1]);
        assert_eq!(binary_form_discriminant(&c, 3).unwrap(), int(108 - 108));
        let c = IntPolynomial::from_i64(&[1, 1, 0, 1]);
        assert_eq!(binary_form_discriminant(&c, 3).unwrap(), int(-4 - 27));
        // ax + b as a binary quadratic a x y + b y²: disc = a²
        let l = IntPolynomial::from_i64(&[7, 3]);
        assert_eq!(binary_form_discriminant(&l, 2).unwrap(), int(9));
    }

    #[test]
    fn disc_errors() {
        assert!(disc_n(&IntPolynomial::zero(), 6).is_err());
        assert!(disc_n(&IntPolynomial::from_i64(&[1, 0, 0, 0, 1]), 5).is_err());
        assert!(disc_n(&IntPolynomial::from_i64(&[1, 1]), 4).is_err());
        let big = IntPolynomial::from_i64(&[1, 0, 0, 0, 0, 0, 0, 1]);
        assert!(disc_n(&big, 6).is_err());
        // degree 4 in a sextic form: double root at infinity
        assert_eq!(disc_n(&IntPolynomial::from_i64(&[1, 0, 0, 0, 1]), 6).unwrap(), int(0));
    }

    #[test]
    fn formal_degree_rules() {
        let p = IntPolynomial::from_i64(&[1, 2, 3]);
        assert_eq!(p.formal_degree(), 2);
        assert_eq!(p.homogenize(6).unwrap().formal_degree(), 6);
        assert!(p.homogenize(1).is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = IntPolynomial::from_i64(&[-1, 0, 1]); // (x−1)(x+1)
        let b = IntPolynomial::from_i64(&[1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, IntPolynomial::from_i64(&[-1, 1]));
        assert!(r.is_zero());
        let sq = a.mul(&b); // (x−1)(x+1)²
        assert!(!sq.is_squarefree());
        assert!(a.is_squarefree());
        assert_eq!(sq.gcd(&sq.derivative()), b);
        assert!(a.div_rem(&IntPolynomial::zero()).is_err());
    }

    #[test]
    fn display() {
        let p = IntPolynomial::new(vec![rat(1, 2), int(0), int(-1), int(3)]);
        assert_eq!(p.to_string(), "3*x^3 - x^2 + (1/2)");
    }

    fn quintic() -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-9i64..=9, 5).prop_map(|mut c| {
            c.push(1);
            IntPolynomial::from_i64(&c)
        })
    }

    proptest! {
        #[test]
        fn quintic_sextic_identity(p in quintic()) {
            let lhs = pow2(8) * disc_n(&p, 5).unwrap();
            let rhs = disc_n(&p.scale(&int(4)), 6).unwrap() / pow2(12);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn discriminant_translation_invariant(p in quintic(), c in -6i64..=6,
                                              lead in -3i64..=3) {
            let sext = p.add(&IntPolynomial::monomial(int(lead), 6)).homogenize(6).unwrap();
            prop_assert_eq!(disc_n(&sext.shift(&int(c)), 6).unwrap(), disc_n(&sext, 6).unwrap());
            prop_assert_eq!(disc_n(&p.shift(&int(c)), 5).unwrap(), disc_n(&p, 5).unwrap());
        }

        #[test]
        fn resultant_against_roots(r in prop::collection::vec(-5i64..=5, 1..4),
                                   s in prop::collection::vec(-5i64..=5, 1..4)) {
            // Res(∏(x−r_i), ∏(x−s_j)) = ∏(r_i − s_j)
            let build = |v: &[i64]| v.iter().fold(IntPolynomial::from_i64(&[1]),
                |acc, &t| acc.mul(&IntPolynomial::from_i64(&[-t, 1])));
            let expect: i64 = r.iter().flat_map(|a| s.iter().map(move |b| a - b)).product();
            prop_assert_eq!(resultant(&build(&r), &build(&s)).unwrap(), int(expect));
        }
    }
}
