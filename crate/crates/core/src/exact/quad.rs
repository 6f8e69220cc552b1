use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Checks that `delta` can be the discriminant of a real quadratic field.
pub fn check_discriminant(delta: &BigInt) -> Result<()> {
    let r = delta.mod_floor(&BigInt::from(4));
    if !delta.is_positive() || !(r.is_zero() || r.is_one()) {
        return Err(Error::Input(format!(
            "Δ = {delta} is not a positive discriminant (need Δ > 0, Δ ≡ 0 or 1 mod 4)"
        )));
    }
    if *delta == BigInt::one() || delta.sqrt().pow(2) == *delta {
        return Err(Error::Input(format!("Δ = {delta} is a square")));
    }
    Ok(())
}

/// The element `(u + v√Δ)/w` of `F = ℚ(√Δ)`, stored in lowest terms, `w ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElement {
    u: BigInt,
    v: BigInt,
    w: BigInt,
    delta: BigInt,
}

impl QuadElement {
    pub fn new(u: BigInt, v: BigInt, w: BigInt, delta: BigInt) -> Result<Self> {
        check_discriminant(&delta)?;
        if w.is_zero() {
            return Err(Error::Input("zero denominator in a quadratic element".into()));
        }
        Ok(Self::normalized(u, v, w, delta))
    }

    fn normalized(mut u: BigInt, mut v: BigInt, mut w: BigInt, delta: BigInt) -> Self {
        if w.is_negative() {
            u = -u;
            v = -v;
            w = -w;
        }
        let g = u.gcd(&v).gcd(&w);
        if !g.is_zero() && !g.is_one() {
            u /= &g;
            v /= &g;
            w /= &g;
        }
        if u.is_zero() && v.is_zero() {
            w = BigInt::one();
        }
        Self { u, v, w, delta }
    }

    pub fn from_rational(q: &BigRational, delta: &BigInt) -> Result<Self> {
        Self::new(q.numer().clone(), BigInt::zero(), q.denom().clone(), delta.clone())
    }

    pub fn from_i64(n: i64, delta: i64) -> Result<Self> {
        Self::new(n.into(), 0.into(), 1.into(), delta.into())
    }

    pub fn sqrt_delta(delta: i64) -> Result<Self> {
        Self::new(0.into(), 1.into(), 1.into(), delta.into())
    }

    /// `θ = (Δ + √Δ)/2`, so that `O_F = ℤ + ℤθ`.
    pub fn theta(delta: i64) -> Result<Self> {
        Self::new(delta.into(), 1.into(), 2.into(), delta.into())
    }

    /// `θ′ = (Δ − √Δ)/2`.
    pub fn theta_conj(delta: i64) -> Result<Self> {
        Self::new(delta.into(), (-1).into(), 2.into(), delta.into())
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.u, &self.v, &self.w)
    }

    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.delta != other.delta {
            return Err(Error::Input(format!(
                "elements of different fields (Δ = {} and Δ = {})",
                self.delta, other.delta
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(Self::normalized(
            &self.u * &o.w + &o.u * &self.w,
            &self.v * &o.w + &o.v * &self.w,
            &self.w * &o.w,
            self.delta.clone(),
        ))
    }

    pub fn neg(&self) -> Self {
        Self::normalized(-&self.u, -&self.v, self.w.clone(), self.delta.clone())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(Self::normalized(
            &self.u * &o.u + &self.v * &o.v * &self.delta,
            &self.u * &o.v + &self.v * &o.u,
            &self.w * &o.w,
            self.delta.clone(),
        ))
    }

    pub fn conj(&self) -> Self {
        Self::normalized(self.u.clone(), -&self.v, self.w.clone(), self.delta.clone())
    }

    /// Field norm `(u² − v²Δ)/w²`.
    pub fn norm(&self) -> BigRational {
        BigRational::new(&self.u * &self.u - &self.v * &self.v * &self.delta, &self.w * &self.w)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Input("inverse of zero".into()));
        }
        // 1/x = x̄ / N(x)
        let n = self.norm();
        let c = self.conj();
        Ok(Self::normalized(
            &c.u * n.denom(),
            &c.v * n.denom(),
            &c.w * n.numer(),
            self.delta.clone(),
        ))
    }

    /// Coordinates `(a, b)` with `x = a + bθ`.
    pub fn coords(&self) -> (BigRational, BigRational) {
        // √Δ = 2θ − Δ
        (
            BigRational::new(&self.u - &self.v * &self.delta, self.w.clone()),
            BigRational::new(&self.v * 2, self.w.clone()),
        )
    }

    /// Real embedding sending `√Δ` to `sign·√Δ`, in double precision.
    pub fn embed_f64(&self, sign: i8) -> f64 {
        let s = (self.delta.to_string().parse::<f64>().unwrap()).sqrt();
        let f = |x: &BigInt| x.to_string().parse::<f64>().unwrap();
        (f(&self.u) + f64::from(sign) * f(&self.v) * s) / f(&self.w)
    }
}

impl fmt::Debug for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√{})/{}", self.u, self.v, self.delta, self.w)
    }
}

/// Finitely generated ℤ-submodule of `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadModule {
    gens: Vec<QuadElement>,
    delta: BigInt,
}

impl QuadModule {
    pub fn new(gens: Vec<QuadElement>) -> Result<Self> {
        let first = gens
            .first()
            .ok_or(Error::RankDeficient { rank: 0 })?
            .delta
            .clone();
        if gens.iter().any(|g| g.delta != first) {
            return Err(Error::Input("module generators lie in different fields".into()));
        }
        Ok(Self { gens, delta: first })
    }

    /// `αO_F + βM` for an O_F-module `M` given by ℤ-generators.
    pub fn ideal_combination(alpha: &QuadElement, beta: &QuadElement, m: &QuadModule) -> Result<Self> {
        let d = i64::try_from(&alpha.delta).map_err(|_| Error::Overflow("Δ"))?;
        let basis = [QuadElement::from_i64(1, d)?, QuadElement::theta(d)?];
        let mut gens = Vec::new();
        for b in &basis {
            gens.push(alpha.mul(b)?);
        }
        for g in &m.gens {
            for b in &basis {
                gens.push(beta.mul(g)?.mul(b)?);
            }
        }
        Self::new(gens)
    }

    /// The inverse different `(1/√Δ)O_F`.
    pub fn inverse_different(delta: i64) -> Result<Self> {
        let s = QuadElement::sqrt_delta(delta)?.inverse()?;
        Self::new(vec![s.clone(), s.mul(&QuadElement::theta(delta)?)?])
    }

    pub fn gens(&self) -> &[QuadElement] {
        &self.gens
    }

    pub fn delta(&self) -> &BigInt {
        &self.delta
    }
}

/// Row-style Hermite reduction of an integer `k × 2` matrix; returns the
/// two pivots (zero when the rank falls short).
fn hermite_pivots(mut rows: Vec<[BigInt; 2]>) -> (BigInt, BigInt) {
    let mut pivots = [BigInt::zero(), BigInt::zero()];
    for (col, pivot) in pivots.iter_mut().enumerate() {
        // Euclid down the column until one nonzero entry is left.
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    let row = rows.swap_remove(r);
                    *pivot = row[col].abs();
                }
                break;
            }
            let p = *nz
                .iter()
                .min_by_key(|&&r| rows[r][col].abs())
                .expect("nonempty");
            let prow = rows[p].clone();
            for &r in &nz {
                if r == p {
                    continue;
                }
                let q = rows[r][col].div_floor(&prow[col]);
                for c in 0..2 {
                    let t = &q * &prow[c];
                    rows[r][c] -= t;
                }
            }
        }
    }
    let [a, b] = pivots;
    (a, b)
}

/// Index-style norm of a full-rank ℤ-module relative to `O_F = ℤ + ℤθ`.
pub fn module_norm(m: &QuadModule) -> Result<BigRational> {
    let coords: Vec<(BigRational, BigRational)> = m.gens.iter().map(QuadElement::coords).collect();
    let l = coords
        .iter()
        .fold(BigInt::one(), |acc, (a, b)| acc.lcm(a.denom()).lcm(b.denom()));
    let lq = BigRational::from_integer(l.clone());
    let rows: Vec<[BigInt; 2]> = coords
        .iter()
        .map(|(a, b)| [(a * &lq).to_integer(), (b * &lq).to_integer()])
        .collect();
    let (d1, d2) = hermite_pivots(rows);
    let rank = [&d1, &d2].iter().filter(|d| !d.is_zero()).count();
    if rank < 2 {
        return Err(Error::RankDeficient { rank });
    }
    Ok(BigRational::new(d1 * d2, &l * &l))
}
