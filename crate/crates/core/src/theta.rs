//! Genus-2 theta constants with even characteristics, the cusp form `χ₁₀`,
//! the product `Θ(Z)` and the archimedean height term.
//!
//! Writing `m = 2(n + a)`, each lattice term is
//! `q₁₁^{m₁²} q₁₂^{m₁m₂} q₂₂^{m₂²} · i^{m₁β₁ + m₂β₂}` with
//! `q₁₁ = e^{iπz₁₁/4}`, `q₁₂ = e^{iπz₁₂/2}`, `q₂₂ = e^{iπz₂₂/4}` and `β = 2b`.
//! Rows in `m₁` are walked with a second-order multiplicative recurrence, so a
//! full sum costs three complex exponentials. All characteristics sharing the
//! same `a` are accumulated in one pass, bucketed by `m mod 4`.

use std::fmt;

use crate::error::{Error, Result};
use crate::highprec::{BigComplex, BigReal, PrecisionContext};

/// Symmetric 2×2 complex matrix with positive-definite imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub z11: BigComplex,
    pub z12: BigComplex,
    pub z22: BigComplex,
}

impl PeriodMatrix {
    pub fn new(z11: BigComplex, z12: BigComplex, z22: BigComplex) -> Result<Self> {
        let z = Self { z11, z12, z22 };
        if !z.z11.im.is_positive() || !z.det_im().is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(z)
    }

    pub fn from_f64(z11: (f64, f64), z12: (f64, f64), z22: (f64, f64), p: usize) -> Result<Self> {
        Self::new(
            BigComplex::from_f64(z11.0, z11.1, p),
            BigComplex::from_f64(z12.0, z12.1, p),
            BigComplex::from_f64(z22.0, z22.1, p),
        )
    }

    /// `i·I`.
    pub fn i_identity(p: usize) -> Self {
        Self {
            z11: BigComplex::i(p),
            z12: BigComplex::zero(p),
            z22: BigComplex::i(p),
        }
    }

    pub fn precision(&self) -> usize {
        self.z11.precision().max(self.z12.precision()).max(self.z22.precision())
    }

    pub fn with_precision(&self, p: usize) -> Self {
        Self {
            z11: self.z11.with_precision(p),
            z12: self.z12.with_precision(p),
            z22: self.z22.with_precision(p),
        }
    }

    /// Entry `(i, j)` with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> &BigComplex {
        match (i, j) {
            (0, 0) => &self.z11,
            (1, 1) => &self.z22,
            _ => &self.z12,
        }
    }

    pub fn det_im(&self) -> BigReal {
        &self.z11.im * &self.z22.im - self.z12.im.sqr()
    }

    pub fn trace_im(&self) -> BigReal {
        &self.z11.im + &self.z22.im
    }

    /// Smallest eigenvalue of `Im Z`.
    pub fn lambda_min(&self) -> BigReal {
        let (a, b, c) = (&self.z11.im, &self.z12.im, &self.z22.im);
        let d = a - c;
        let disc = (d.sqr() + b.sqr().mul_i64(4)).sqrt();
        // (a + c − disc)/2 loses digits when the eigenvalues differ a lot;
        // det/λ_max is stable.
        let lmax = (a + c + &disc).div_i64(2);
        self.det_im() / lmax
    }

    pub fn to_f64(&self) -> [[(f64, f64); 2]; 2] {
        let (a, b, c) = (self.z11.to_f64(), self.z12.to_f64(), self.z22.to_f64());
        [[a, b], [b, c]]
    }
}

impl fmt::Display for PeriodMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "[[{:.d$}, {:.d$}], [{:.d$}, {:.d$}]]", self.z11, self.z12, self.z12, self.z22)
    }
}

/// Theta characteristic `[a₁, a₂; b₁, b₂]` with entries in `{0, 1/2}`, stored
/// as bits (1 meaning 1/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaCharacteristic {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

impl ThetaCharacteristic {
    pub fn new(a: [u8; 2], b: [u8; 2]) -> Result<Self> {
        if a.iter().chain(&b).any(|&x| x > 1) {
            return Err(Error::Input("characteristic bits must be 0 or 1".into()));
        }
        let c = Self { a, b };
        if !c.is_even() {
            return Err(Error::Input(format!("characteristic {c} is odd")));
        }
        Ok(c)
    }

    pub const fn from_bits(bits: [u8; 4]) -> Self {
        Self { a: [bits[0], bits[1]], b: [bits[2], bits[3]] }
    }

    pub fn is_even(&self) -> bool {
        (self.a[0] * self.b[0] + self.a[1] * self.b[1]).is_multiple_of(2)
    }

    pub fn bits(&self) -> [u8; 4] {
        [self.a[0], self.a[1], self.b[0], self.b[1]]
    }

    /// Parses `"a1a2b1b2"` bits such as `"1001"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Input(format!("bad characteristic {s:?}"))),
            })
            .collect::<Result<_>>()?;
        if bits.len() != 4 {
            return Err(Error::Input(format!("characteristic {s:?} needs four bits")));
        }
        Self::new([bits[0], bits[1]], [bits[2], bits[3]])
    }
}

impl fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = |x: u8| if x == 1 { "1/2" } else { "0" };
        write!(f, "[{},{};{},{}]", h(self.a[0]), h(self.a[1]), h(self.b[0]), h(self.b[1]))
    }
}

/// `Θ₁`: the four characteristics with `a = 0`.
pub const THETA1: [ThetaCharacteristic; 4] = [
    ThetaCharacteristic::from_bits([0, 0, 0, 0]),
    ThetaCharacteristic::from_bits([0, 0, 0, 1]),
    ThetaCharacteristic::from_bits([0, 0, 1, 0]),
    ThetaCharacteristic::from_bits([0, 0, 1, 1]),
];

/// `Θ₂`: the remaining six even characteristics.
pub const THETA2: [ThetaCharacteristic; 6] = [
    ThetaCharacteristic::from_bits([1, 0, 0, 0]),
    ThetaCharacteristic::from_bits([0, 1, 0, 0]),
    ThetaCharacteristic::from_bits([1, 1, 0, 0]),
    ThetaCharacteristic::from_bits([0, 1, 1, 0]),
    ThetaCharacteristic::from_bits([1, 0, 0, 1]),
    ThetaCharacteristic::from_bits([1, 1, 1, 1]),
];

/// All ten even characteristics, `Θ₁` then `Θ₂`.
pub fn even_characteristics() -> [ThetaCharacteristic; 10] {
    let mut out = [THETA1[0]; 10];
    out[..4].copy_from_slice(&THETA1);
    out[4..].copy_from_slice(&THETA2);
    out
}

/// A computed value with an absolute error bound.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: BigComplex,
    pub error: BigReal,
    /// Truncation radius `R` of the box `‖n + a‖_∞ ≤ R`.
    pub radius: usize,
}

/// Lattice-sum plan shared by every characteristic at one `Z`.
struct Plan {
    radius: usize,
    tail: f64,
    lambda: f64,
}

/// `log` of the 2-D tail bound at radius `r` (see [`Plan`]).
fn log_tail(lambda: f64, r: usize) -> f64 {
    let rp = r as f64 + 0.5;
    let pl = std::f64::consts::PI * lambda;
    let one_d = 2f64.ln() - pl * rp * rp - (-(-2.0 * pl * rp).exp()).ln_1p();
    let full = (2.0 + 1.0 / lambda.sqrt()).ln();
    2f64.ln() + one_d + full
}

const MAX_RADIUS: usize = 4000;

fn plan(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Plan> {
    let lambda = z.lambda_min().to_f64() * (1.0 - 1e-9);
    if !(lambda > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let target = -(ctx.wp() as f64) * 2f64.ln();
    let mut r = 1usize;
    while log_tail(lambda, r) > target {
        r += 1;
        if r > MAX_RADIUS {
            return Err(Error::Precision(format!(
                "Im Z is too ill-conditioned for direct summation (λ_min = {lambda:e}); reduce Z first"
            )));
        }
    }
    Ok(Plan { radius: r, tail: log_tail(lambda, r), lambda })
}

/// Sums over `m ∈ 2ℤ² + a` in the box `|m_j| ≤ 2R`, bucketed by `m mod 4`.
fn bucket_sums(z: &PeriodMatrix, a: [u8; 2], radius: usize, ctx: &PrecisionContext) -> [[BigComplex; 4]; 4] {
    let wp = ctx.wp();
    let z = z.with_precision(wp);
    let ipi = |s: &BigComplex, d: i64| BigComplex::new(-(&s.im * &ctx.pi()), &s.re * &ctx.pi()).scale(&ctx.frac(1, d)).exp();
    let q11 = ipi(&z.z11, 4);
    let q12 = ipi(&z.z12, 2);
    let q22 = ipi(&z.z22, 4);
    let q11_8 = q11.powi(8);
    let pow = |q: &BigComplex, e: i64| if e >= 0 { q.powi(e as u32) } else { q.powi((-e) as u32).recip() };

    let zero = BigComplex::zero(wp);
    let mut buckets: [[BigComplex; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
    let lim = 2 * radius as i64 + 1;
    let range = |parity: u8| {
        let lo = if parity == 1 { -(lim) } else { -(lim - 1) };
        (lo..=lim).step_by(2).filter(move |m| m.abs() <= 2 * radius as i64 + parity as i64)
    };
    for m2 in range(a[1]) {
        let row = pow(&q22, m2 * m2);
        let mut ms = range(a[0]);
        let Some(m1) = ms.next() else { continue };
        // term(m1) = q11^{m1²} q12^{m1 m2}; ratio to the next = q11^{4m1+4} q12^{2m2}
        let mut term = &(&pow(&q11, m1 * m1) * &pow(&q12, m1 * m2)) * &row;
        let mut ratio = &pow(&q11, 4 * m1 + 4) * &pow(&q12, 2 * m2);
        let r2 = m2.rem_euclid(4) as usize;
        let mut cur = m1;
        loop {
            let r1 = cur.rem_euclid(4) as usize;
            buckets[r1][r2] = &buckets[r1][r2] + &term;
            if ms.next().is_none() {
                break;
            }
            cur += 2;
            term = &term * &ratio;
            ratio = &ratio * &q11_8;
        }
    }
    buckets
}

fn combine(buckets: &[[BigComplex; 4]; 4], b: [u8; 2], wp: usize) -> BigComplex {
    let mut s = BigComplex::zero(wp);
    for (r1, row) in buckets.iter().enumerate() {
        for (r2, v) in row.iter().enumerate() {
            let k = (r1 as i64 * b[0] as i64 + r2 as i64 * b[1] as i64) % 4;
            s = &s + &v.mul_i_pow(k);
        }
    }
    s
}

fn error_bound(plan: &Plan, ctx: &PrecisionContext) -> BigReal {
    let terms = (4 * plan.radius + 3).pow(2) as f64;
    let full = 2.0 + 1.0 / plan.lambda.sqrt();
    let rounding = (terms * full * full).ln() - (ctx.wp() as f64 - 8.0) * 2f64.ln();
    let log_err = plan.tail.max(rounding) + 2f64.ln();
    BigReal::from_f64(log_err, 64).exp()
}

/// `θ_{ab}(0, Z)` with an a-priori truncation radius.
pub fn theta_constant(ch: ThetaCharacteristic, z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<ThetaValue> {
    let pl = plan(z, ctx)?;
    theta_constant_with_radius(ch, z, pl.radius, ctx)
}

/// `θ_{ab}(0, Z)` summed over the box of radius `radius` (its error bound is
/// the one for that radius).
pub fn theta_constant_with_radius(
    ch: ThetaCharacteristic,
    z: &PeriodMatrix,
    radius: usize,
    ctx: &PrecisionContext,
) -> Result<ThetaValue> {
    if !ch.is_even() {
        return Err(Error::Input(format!("characteristic {ch} is odd")));
    }
    let mut pl = plan(z, ctx)?;
    pl.radius = radius;
    pl.tail = log_tail(pl.lambda, radius);
    let buckets = bucket_sums(z, ch.a, radius, ctx);
    Ok(ThetaValue { value: combine(&buckets, ch.b, ctx.wp()), error: error_bound(&pl, ctx), radius })
}

/// The ten even theta constants, in the order of [`even_characteristics`].
pub fn even_theta_constants(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Vec<ThetaValue>> {
    let pl = plan(z, ctx)?;
    let err = error_bound(&pl, ctx);
    let a_list: [[u8; 2]; 4] = [[0, 0], [1, 0], [0, 1], [1, 1]];
    let sums: Vec<[[BigComplex; 4]; 4]> = std::thread::scope(|s| {
        let handles: Vec<_> = a_list
            .iter()
            .map(|&a| s.spawn(move || bucket_sums(z, a, pl.radius, ctx)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("theta worker panicked")).collect()
    });
    Ok(even_characteristics()
        .iter()
        .map(|ch| {
            let idx = a_list.iter().position(|&a| a == ch.a).expect("a in list");
            ThetaValue {
                value: combine(&sums[idx], ch.b, ctx.wp()),
                error: err.clone(),
                radius: pl.radius,
            }
        })
        .collect())
}

/// Bound on `|∏ x_i − ∏ x̃_i|` given `|x_i − x̃_i| ≤ e_i`:
/// `∏(|x̃_i| + e_i) − ∏|x̃_i| ≤ ∏|x̃_i|·s·eˢ` with `s = Σ e_i/|x̃_i|`, which
/// avoids subtracting two nearly equal products.
fn product_error(vals: &[(BigReal, BigReal)]) -> BigReal {
    let p = 64;
    if vals.iter().any(|(abs, _)| abs.is_zero()) {
        return vals
            .iter()
            .fold(BigReal::from_i64(1, p), |acc, (abs, e)| acc * (abs.with_precision(p) + e));
    }
    let mut prod = BigReal::from_i64(1, p);
    let mut s = BigReal::from_i64(0, p);
    for (abs, e) in vals {
        let a = abs.with_precision(p);
        s = s + &(e.with_precision(p) / &a);
        prod = prod * a;
    }
    let bound = prod * &s * s.exp();
    // One ulp of headroom for the 64-bit arithmetic above.
    &bound + &bound.mul_i64(2).div_i64(1 << 60)
}

/// `χ₁₀(Z) = ∏_{m even} θ_m(0, Z)²` with an error bound.
pub fn chi10(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<ThetaValue> {
    let th = even_theta_constants(z, ctx)?;
    let wp = ctx.wp();
    let mut v = BigComplex::one(wp);
    let mut parts = Vec::new();
    for t in &th {
        let sq = t.value.sqr();
        let a = t.value.abs().with_precision(64);
        let e = (a.mul_i64(2) + &t.error) * &t.error;
        parts.push((sq.abs(), e));
        v = &v * &sq;
    }
    Ok(ThetaValue { value: v, error: product_error(&parts), radius: th[0].radius })
}

/// The five characteristics whose symmetric-difference sums index `Θ(Z)`.
const M: [[u8; 4]; 5] = [[1, 0, 0, 0], [1, 0, 1, 0], [0, 1, 1, 0], [0, 1, 1, 1], [0, 0, 1, 1]];

/// Characteristics `m_{T ∘ {1,3,5}}` for the ten 3-subsets `T ⊂ {1,…,5}`.
pub fn theta_big_characteristics() -> Vec<ThetaCharacteristic> {
    let mut out = Vec::new();
    for t in 0u8..32 {
        if t.count_ones() != 3 {
            continue;
        }
        let s = t ^ 0b10101;
        let mut bits = [0u8; 4];
        for (i, m) in M.iter().enumerate() {
            if s & (1 << i) != 0 {
                for k in 0..4 {
                    bits[k] ^= m[k];
                }
            }
        }
        out.push(ThetaCharacteristic::from_bits(bits));
    }
    out
}

/// `Θ(Z) = ∏_T θ_{m_{T∘{1,3,5}}}(0, Z)⁸`.
pub fn theta_big(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<BigComplex> {
    let th = even_theta_constants(z, ctx)?;
    let evens = even_characteristics();
    let mut v = BigComplex::one(ctx.wp());
    for ch in theta_big_characteristics() {
        let i = evens.iter().position(|e| *e == ch).ok_or_else(|| {
            Error::Input(format!("characteristic {ch} in Θ(Z) is not even"))
        })?;
        v = &v * &th[i].value.powi(8);
    }
    Ok(v)
}

/// Archimedean contribution of one period matrix.
#[derive(Clone, Debug)]
pub struct ArchimedeanTerm {
    /// `−(1/10)·log(|χ₁₀| det(Im Z)⁵)`.
    pub bare: BigReal,
    /// `bare − (1/10)·log(2⁸π¹⁰)`.
    pub value: BigReal,
    pub chi10_abs: BigReal,
    pub det_im: BigReal,
    pub error: BigReal,
}

/// `−(1/10)·log(2⁸π¹⁰ |χ₁₀(Z)| det(Im Z)⁵)`.
pub fn archimedean_term(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<ArchimedeanTerm> {
    let c = chi10(z, ctx)?;
    let abs = c.value.abs();
    if abs.is_zero() || abs <= c.error.mul_i64(2) {
        return Err(Error::Chi10Vanishes);
    }
    let det = z.with_precision(ctx.wp()).det_im();
    let bare = -(abs.ln() + det.ln().mul_i64(5)).div_i64(10);
    let norm = (ctx.ln2().mul_i64(8) + ctx.pi().ln().mul_i64(10)).div_i64(10);
    // d log|χ| ≤ err/|χ| to first order; doubled for safety.
    let error = (c.error.with_precision(64) / abs.with_precision(64)).div_i64(5);
    Ok(ArchimedeanTerm { value: &bare - &norm, bare, chi10_abs: abs, det_im: det, error })
}
