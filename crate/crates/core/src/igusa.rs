//! Genus-2 Weierstrass equations `y² + Q(x)y = P(x)` over ℚ, their
//! discriminants and Igusa invariants, and the finite-place part of the
//! Faltings height.
//!
//! Invariants are computed from Clebsch transvectants of the binary sextic
//! `F = 4P + Q²`, converted to Igusa–Clebsch `I₂, I₄, I₆, I₁₀` and then to
//! `J₂, …, J₁₀` with `J₁₀ = I₁₀/4096 = Δ_E`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    disc_n, factor_trial, factored_string, is_probable_prime, IntPolynomial, TRIAL_DIVISION_BOUND,
};
use crate::highprec::{BigReal, PrecisionContext};

/// `y² + Q(x)·y = P(x)` with `deg P ≤ 6`, `deg Q ≤ 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassEquation {
    p: IntPolynomial,
    q: IntPolynomial,
}

impl WeierstrassEquation {
    pub fn new(p: IntPolynomial, q: IntPolynomial) -> Result<Self> {
        if p.degree().is_some_and(|d| d > 6) {
            return Err(Error::Curve(format!("deg P = {} exceeds 6", p.degree().unwrap())));
        }
        if q.degree().is_some_and(|d| d > 3) {
            return Err(Error::Curve(format!("deg Q = {} exceeds 3", q.degree().unwrap())));
        }
        let eq = Self { p, q };
        match eq.sextic_poly().degree() {
            Some(5 | 6) => Ok(eq),
            d => Err(Error::Curve(format!(
                "4P + Q² must have degree 5 or 6, found {}",
                d.map_or("−∞".to_string(), |d| d.to_string())
            ))),
        }
    }

    /// `y² = P(x)`.
    pub fn from_p(p: IntPolynomial) -> Result<Self> {
        Self::new(p, IntPolynomial::zero())
    }

    pub fn p(&self) -> &IntPolynomial {
        &self.p
    }

    pub fn q(&self) -> &IntPolynomial {
        &self.q
    }

    fn sextic_poly(&self) -> IntPolynomial {
        self.p.scale(&BigRational::from_integer(4.into())).add(&self.q.mul(&self.q))
    }

    /// `4P + Q²` read as a binary form of degree 6.
    pub fn sextic(&self) -> IntPolynomial {
        self.sextic_poly().homogenize(6).expect("degree checked at construction")
    }

    /// Change of variables `x = (a x' + b)/(c x' + d)`, `y = (e y' + H(x'))/(c x' + d)³`.
    pub fn transform(
        &self,
        [a, b, c, d]: [&BigRational; 4],
        e: &BigRational,
        h: &IntPolynomial,
    ) -> Result<Self> {
        if (a * d - b * c).is_zero() || e.is_zero() {
            return Err(Error::Curve("degenerate change of variables".into()));
        }
        if h.degree().is_some_and(|k| k > 3) {
            return Err(Error::Curve("H must have degree at most 3".into()));
        }
        let num = IntPolynomial::new(vec![b.clone(), a.clone()]);
        let den = IntPolynomial::new(vec![d.clone(), c.clone()]);
        let homog = |f: &IntPolynomial, n: usize| {
            (0..=n).fold(IntPolynomial::zero(), |acc, i| {
                let mut t = IntPolynomial::new(vec![f.coeff(i)]);
                for _ in 0..i {
                    t = t.mul(&num);
                }
                for _ in i..n {
                    t = t.mul(&den);
                }
                acc.add(&t)
            })
        };
        let pt = homog(&self.p, 6);
        let qt = homog(&self.q, 3);
        let q_new = h.scale(&BigRational::from_integer(2.into())).add(&qt).scale(&e.recip());
        let p_new = pt.sub(&h.mul(h)).sub(&qt.mul(h)).scale(&(e * e).recip());
        Self::new(p_new, q_new)
    }
}

impl fmt::Display for WeierstrassEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "y^2 = {}", self.p)
        } else {
            write!(f, "y^2 + ({})*y = {}", self.q, self.p)
        }
    }
}

/// `Δ_E = 2⁻¹² disc₆(4P + Q²)`.
pub fn discriminant(eq: &WeierstrassEquation) -> Result<BigRational> {
    let d = disc_n(&eq.sextic(), 6)? / BigRational::from_integer(BigInt::from(4096));
    if d.is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(d)
}

/// Binary form `Σ c_i x^i y^(m−i)` of degree `m`.
#[derive(Clone, Debug)]
struct Form {
    c: Vec<BigRational>,
}

impl Form {
    fn deg(&self) -> usize {
        self.c.len() - 1
    }

    fn constant(&self) -> BigRational {
        debug_assert_eq!(self.deg(), 0);
        self.c[0].clone()
    }

    /// `∂x^a ∂y^b`.
    fn partial(&self, a: usize, b: usize) -> Form {
        let m = self.deg();
        let out_deg = m - a - b;
        let mut c = vec![BigRational::zero(); out_deg + 1];
        for (i, ci) in self.c.iter().enumerate() {
            if i < a || m - i < b || ci.is_zero() {
                continue;
            }
            let f = falling(i, a) * falling(m - i, b);
            c[i - a] += ci * BigRational::from_integer(f);
        }
        Form { c }
    }

    fn mul(&self, o: &Form) -> Form {
        let mut c = vec![BigRational::zero(); self.deg() + o.deg() + 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Form { c }
    }

    fn add_scaled(&mut self, o: &Form, s: &BigRational) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b * s;
        }
    }
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

fn factorial(n: usize) -> BigInt {
    falling(n, n)
}

fn binomial(n: usize, k: usize) -> BigInt {
    falling(n, k) / factorial(k)
}

/// Transvectant `(f, g)_k`.
fn transvectant(f: &Form, g: &Form, k: usize) -> Form {
    let (m, n) = (f.deg(), g.deg());
    let mut out = Form { c: vec![BigRational::zero(); m + n - 2 * k + 1] };
    for j in 0..=k {
        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let term = f.partial(k - j, j).mul(&g.partial(j, k - j));
        out.add_scaled(&term, &BigRational::from_integer(sign * binomial(k, j)));
    }
    let norm = BigRational::new(
        factorial(m - k) * factorial(n - k),
        factorial(m) * factorial(n),
    );
    Form { c: out.c.into_iter().map(|x| x * &norm).collect() }
}

/// Igusa–Clebsch invariants `(I₂, I₄, I₆, I₁₀)` of a binary sextic.
pub fn igusa_clebsch(sextic: &IntPolynomial) -> [BigRational; 4] {
    let f = Form { c: (0..=6).map(|i| sextic.coeff(i)).collect() };
    let i = transvectant(&f, &f, 4);
    let delta = transvectant(&i, &i, 2);
    let y1 = transvectant(&f, &i, 4);
    let y2 = transvectant(&i, &y1, 2);
    let y3 = transvectant(&i, &y2, 2);
    let a = transvectant(&f, &f, 6).constant();
    let b = transvectant(&i, &i, 4).constant();
    let c = transvectant(&i, &delta, 4).constant();
    let d = transvectant(&y3, &y1, 2).constant();
    let n = |v: i64| BigRational::from_integer(BigInt::from(v));
    let i2 = n(-120) * &a;
    let i4 = n(-720) * &a * &a + n(6750) * &b;
    let i6 = n(8640) * &a * &a * &a - n(108000) * &a * &b + n(202500) * &c;
    let a2 = &a * &a;
    let i10 = n(-62208) * &a2 * &a2 * &a + n(972000) * &a2 * &a * &b + n(1620000) * &a2 * &c
        - n(3037500) * &a * &b * &b
        - n(6075000) * &b * &c
        - n(4556250) * &d;
    [i2, i4, i6, i10]
}

/// Igusa invariants `(J₂, J₄, J₆, J₈, J₁₀)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IgusaInvariants {
    pub j2: BigRational,
    pub j4: BigRational,
    pub j6: BigRational,
    pub j8: BigRational,
    pub j10: BigRational,
}

impl IgusaInvariants {
    pub fn from_igusa_clebsch([i2, i4, i6, i10]: [BigRational; 4]) -> Self {
        let n = |v: i64| BigRational::from_integer(BigInt::from(v));
        let j2 = &i2 / n(8);
        let j4 = (n(4) * &j2 * &j2 - &i4) / n(96);
        let j6 = (n(8) * &j2 * &j2 * &j2 - n(160) * &j2 * &j4 - &i6) / n(576);
        let j8 = (&j2 * &j6 - &j4 * &j4) / n(4);
        let j10 = &i10 / n(4096);
        Self { j2, j4, j6, j8, j10 }
    }

    pub fn as_array(&self) -> [&BigRational; 5] {
        [&self.j2, &self.j4, &self.j6, &self.j8, &self.j10]
    }

    /// `J_{2k}` for `k ∈ {1, …, 5}`.
    pub fn j(&self, k: u32) -> &BigRational {
        self.as_array()[(k - 1) as usize]
    }

    /// `J_{2k}⁵ / J₁₀^k`.
    pub fn ratio(&self, k: u32) -> BigRational {
        let num = num_traits::pow(self.j(k).clone(), 5);
        num / num_traits::pow(self.j10.clone(), k as usize)
    }
}

/// Igusa invariants of the sextic `4P + Q²`.
pub fn igusa_invariants(eq: &WeierstrassEquation) -> Result<IgusaInvariants> {
    discriminant(eq)?;
    let inv = IgusaInvariants::from_igusa_clebsch(igusa_clebsch(&eq.sextic()));
    if inv.j10.is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(inv)
}

/// `ι(p)`: 4 above 2, 3 above 3, 1 elsewhere.
pub fn iota(p: u64) -> u32 {
    match p {
        2 => 4,
        3 => 3,
        _ => 1,
    }
}

fn valuation_big(x: &BigRational, p: &BigUint) -> i64 {
    let p = BigInt::from(p.clone());
    let v = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return k;
            }
            n = q;
            k += 1;
        }
    };
    v(x.numer()) - v(x.denom())
}

fn iota_big(p: &BigUint) -> u32 {
    p.to_u64().map_or(1, iota)
}

/// `(1/ι)·max{0, −ord_p(J_{2ι}⁵/J₁₀^ι)}`.
pub fn minimal_disc_order(inv: &IgusaInvariants, p: &BigUint) -> Result<u64> {
    if !is_probable_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let i = iota_big(p);
    let r = inv.ratio(i);
    if r.is_zero() {
        return Ok(0);
    }
    let neg = (-valuation_big(&r, p)).max(0) as u64;
    if !neg.is_multiple_of(u64::from(i)) {
        return Err(Error::Consistency {
            p: p.to_u64().unwrap_or(0),
            detail: format!(
                "−ord_p(J_{}⁵/J₁₀^{i}) = {neg} is not divisible by ι = {i}",
                2 * i
            ),
        });
    }
    Ok(neg / u64::from(i))
}

/// One prime's share of the finite part.
#[derive(Clone, Debug)]
pub struct LocalContribution {
    pub p: BigUint,
    pub iota: u32,
    pub ord_min_disc: u64,
    /// Exact coefficient of `log p`, namely `ord_min_disc / 60`.
    pub coefficient: BigRational,
    pub height_term: BigReal,
}

/// The finite part `(1/60) Σ_p ord_p(Δ⁰_min)·log p` and its per-prime ledger.
#[derive(Clone, Debug)]
pub struct FinitePart {
    pub value: BigReal,
    pub contributions: Vec<LocalContribution>,
}

impl FinitePart {
    /// `N(Δ⁰_min) = ∏ p^ord`.
    pub fn min_disc_norm(&self) -> BigUint {
        self.contributions
            .iter()
            .fold(BigUint::one(), |acc, c| acc * c.p.pow(c.ord_min_disc as u32))
    }

    /// Human-readable exact form, e.g. `2/5*log(3) + 1/5*log(5)`.
    pub fn exact_string(&self) -> String {
        let terms: Vec<String> = self
            .contributions
            .iter()
            .filter(|c| !c.coefficient.is_zero())
            .map(|c| format!("{}*log({})", crate::exact::rational_to_string(&c.coefficient), c.p))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Primes that may contribute: 2, 3 and the primes in the denominator of
/// `J₂⁵/J₁₀` (trial division, plus any caller-supplied primes).
pub fn candidate_primes(inv: &IgusaInvariants, extra: &[u64]) -> Result<Vec<BigUint>> {
    let mut out: Vec<BigUint> = vec![2u32.into(), 3u32.into()];
    for &p in extra {
        if !crate::exact::is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        out.push(p.into());
    }
    let r = inv.ratio(1);
    if !r.is_zero() {
        let tf = factor_trial(r.denom().magnitude(), TRIAL_DIVISION_BOUND);
        out.extend(tf.factors.iter().map(|&(p, _)| BigUint::from(p)));
        let mut rest = tf.cofactor;
        for &p in extra {
            let bp = BigUint::from(p);
            while (&rest % &bp).is_zero() {
                rest /= &bp;
            }
        }
        if !rest.is_one() {
            if is_probable_prime(&rest) {
                out.push(rest);
            } else {
                return Err(Error::Factorization(rest.to_string()));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn finite_height_part(
    inv: &IgusaInvariants,
    extra_primes: &[u64],
    ctx: &PrecisionContext,
) -> Result<FinitePart> {
    let mut value = ctx.zero();
    let mut contributions = Vec::new();
    for p in candidate_primes(inv, extra_primes)? {
        let ord = minimal_disc_order(inv, &p)?;
        if ord == 0 {
            continue;
        }
        let coefficient = BigRational::new(BigInt::from(ord), BigInt::from(60));
        let height_term =
            ctx.rational(&coefficient) * BigReal::from_bigint(&BigInt::from(p.clone()), ctx.wp()).ln();
        value = value + &height_term;
        contributions.push(LocalContribution {
            iota: iota_big(&p),
            p,
            ord_min_disc: ord,
            coefficient,
            height_term,
        });
    }
    Ok(FinitePart { value, contributions })
}

/// Text lines listing the invariants and the three ratios in factored form.
pub fn describe(inv: &IgusaInvariants) -> Vec<(String, String)> {
    let mut rows = vec![];
    for (k, v) in inv.as_array().iter().enumerate() {
        rows.push((format!("J{}", 2 * (k + 1)), crate::exact::rational_to_string(v)));
    }
    for (k, name) in [(1, "J2^5/J10"), (3, "J6^5/J10^3"), (4, "J8^5/J10^4")] {
        rows.push((name.to_string(), factored_string(&inv.ratio(k))));
    }
    rows
}
