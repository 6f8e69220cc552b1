//! The action of `Sp₄(ℤ)` on the Siegel upper half-space, membership in the
//! fundamental domain `ℱ₂`, and reduction into it.
//!
//! Condition (i) of `ℱ₂` (`det Im γZ ≤ det Im Z` for all γ) reduces to finitely
//! many matrices (Gottschling, "Explizite Bestimmung der Randflächen des
//! Fundamentalbereiches der Modulgruppe zweiten Grades", Math. Ann. 138, 1959).
//! The set tested here contains those pairs `(C, D)`.

use std::fmt;

use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::highprec::{BigComplex, BigReal, PrecisionContext};
use crate::theta::PeriodMatrix;

/// A 4×4 integer matrix `[[A, B], [C, D]]` with `γᵀJγ = J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    m: [[i64; 4]; 4],
}

type Block = [[i64; 2]; 2];

impl SymplecticMatrix {
    pub fn new(m: [[i64; 4]; 4]) -> Result<Self> {
        let g = Self { m };
        if !g.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self { m }
    }

    /// `J = [[0, I], [−I, 0]]`.
    pub fn j() -> Self {
        Self { m: [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]] }
    }

    /// `Z ↦ Z + B` for symmetric integer `B`.
    pub fn translation(b: Block) -> Result<Self> {
        if b[0][1] != b[1][0] {
            return Err(Error::NotSymplectic);
        }
        Ok(Self { m: [[1, 0, b[0][0], b[0][1]], [0, 1, b[1][0], b[1][1]], [0, 0, 1, 0], [0, 0, 0, 1]] })
    }

    /// `Z ↦ U Z Uᵀ` for unimodular `U`.
    pub fn block(u: Block) -> Result<Self> {
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        if det.abs() != 1 {
            return Err(Error::NotSymplectic);
        }
        // U^{-T} = det · [[u22, −u21], [−u12, u11]]
        let w = [[det * u[1][1], -det * u[1][0]], [-det * u[0][1], det * u[0][0]]];
        Ok(Self {
            m: [
                [u[0][0], u[0][1], 0, 0],
                [u[1][0], u[1][1], 0, 0],
                [0, 0, w[0][0], w[0][1]],
                [0, 0, w[1][0], w[1][1]],
            ],
        })
    }

    pub fn entries(&self) -> [[i64; 4]; 4] {
        self.m
    }

    pub fn blocks(&self) -> (Block, Block, Block, Block) {
        let b = |r: usize, c: usize| [[self.m[r][c], self.m[r][c + 1]], [self.m[r + 1][c], self.m[r + 1][c + 1]]];
        (b(0, 0), b(0, 2), b(2, 0), b(2, 2))
    }

    fn is_symplectic(&self) -> bool {
        let j = Self::j().m;
        let mut ok = true;
        for r in 0..4 {
            for c in 0..4 {
                // (γᵀ J γ)_{rc} = Σ γ_{ir} J_{ij} γ_{jc}
                let mut s: i128 = 0;
                for i in 0..4 {
                    for k in 0..4 {
                        s += self.m[i][r] as i128 * j[i][k] as i128 * self.m[k][c] as i128;
                    }
                }
                ok &= s == j[r][c] as i128;
            }
        }
        ok
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut m = [[0i64; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let mut s: i64 = 0;
                for k in 0..4 {
                    s = self.m[r][k]
                        .checked_mul(o.m[k][c])
                        .and_then(|t| s.checked_add(t))
                        .ok_or(Error::Overflow("symplectic product"))?;
                }
                m[r][c] = s;
            }
        }
        Ok(Self { m })
    }

    /// `γ⁻¹ = [[Dᵀ, −Bᵀ], [−Cᵀ, Aᵀ]]`.
    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = self.blocks();
        let mut m = [[0; 4]; 4];
        for i in 0..2 {
            for k in 0..2 {
                m[i][k] = d[k][i];
                m[i][k + 2] = -b[k][i];
                m[i + 2][k] = -c[k][i];
                m[i + 2][k + 2] = a[k][i];
            }
        }
        Self { m }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

type CMat = [[BigComplex; 2]; 2];

fn cmat(z: &PeriodMatrix) -> CMat {
    [[z.z11.clone(), z.z12.clone()], [z.z12.clone(), z.z22.clone()]]
}

/// `X·Z + Y` for integer blocks `X`, `Y`.
fn affine(x: &Block, z: &CMat, y: &Block, p: usize) -> CMat {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let mut s = BigComplex::from_i64(y[r][c], 0, p);
            for k in 0..2 {
                if x[r][k] != 0 {
                    s = &s + &z[k][c].scale(&BigReal::from_i64(x[r][k], p));
                }
            }
            s
        })
    })
}

fn det2(m: &CMat) -> BigComplex {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

/// `det(CZ + D)`.
pub fn automorphy_det(g: &SymplecticMatrix, z: &PeriodMatrix) -> BigComplex {
    let (_, _, c, d) = g.blocks();
    det2(&affine(&c, &cmat(z), &d, z.precision()))
}

/// `γZ = (AZ + B)(CZ + D)⁻¹`, symmetrized.
pub fn act(g: &SymplecticMatrix, z: &PeriodMatrix) -> Result<PeriodMatrix> {
    let p = z.precision();
    let (a, b, c, d) = g.blocks();
    let zm = cmat(z);
    let num = affine(&a, &zm, &b, p);
    let den = affine(&c, &zm, &d, p);
    let det = det2(&den);
    if det.abs() <= BigReal::pow2(-(p as i64) / 2) {
        return Err(Error::SingularAction);
    }
    let inv_det = det.recip();
    let inv = [
        [&den[1][1] * &inv_det, -&(&den[0][1] * &inv_det)],
        [-&(&den[1][0] * &inv_det), &den[0][0] * &inv_det],
    ];
    let prod = |r: usize, col: usize| &(&num[r][0] * &inv[0][col]) + &(&num[r][1] * &inv[1][col]);
    let z12 = (&prod(0, 1) + &prod(1, 0)).scale(&BigReal::from_f64(0.5, p));
    PeriodMatrix::new(prod(0, 0), z12, prod(1, 1))
}

/// Pairs `(C, D)` whose condition `|det(CZ + D)| ≥ 1` cuts out `ℱ₂` inside
/// the Minkowski-reduced, real-part-bounded set.
pub fn gottschling_set() -> Vec<SymplecticMatrix> {
    let mut out = Vec::new();
    for d11 in -1..=1 {
        for d12 in -1..=1 {
            for d22 in -1..=1 {
                out.push(SymplecticMatrix {
                    m: [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, d11, d12], [0, 1, d12, d22]],
                });
            }
        }
    }
    for e in -1..=1 {
        let g1 = SymplecticMatrix { m: [[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, e, 0], [0, 0, 0, 1]] };
        out.push(g1);
        out.push(SymplecticMatrix { m: [[1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, e]] });
        for u in [[[1, -1], [0, 1]], [[1, 1], [0, 1]]] {
            let b = SymplecticMatrix::block(u).expect("unimodular");
            out.push(g1.mul(&b).expect("small entries"));
        }
    }
    out
}

/// Membership in `ℱ₂` with slack `tol` on every inequality.
pub fn in_fundamental_domain(z: &PeriodMatrix, tol: &BigReal) -> bool {
    let half = BigReal::from_f64(0.5, 64);
    let bound = &half + tol;
    for e in [&z.z11, &z.z12, &z.z22] {
        if e.re.abs() > bound {
            return false;
        }
    }
    let (y11, y12, y22) = (&z.z11.im, &z.z12.im, &z.z22.im);
    let two_y12 = y12.mul_i64(2);
    if two_y12 < -tol.clone() || two_y12 > y11 + tol || *y11 > y22 + tol {
        return false;
    }
    let one = BigReal::from_i64(1, 64);
    gottschling_set().iter().all(|g| automorphy_det(g, z).abs() >= &one - tol)
}

/// Result of [`reduce`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub gamma: SymplecticMatrix,
    pub z: PeriodMatrix,
    /// `det Im Z` after each outer iteration, starting with the input.
    pub det_history: Vec<BigReal>,
    pub gottschling_steps: usize,
}

pub const REDUCTION_CAP: usize = 500;

fn to_i64(x: &BigReal) -> Result<i64> {
    x.round_to_bigint().to_i64().ok_or(Error::Overflow("reduction step"))
}

/// Reduces `Z` into `ℱ₂`, returning `γ` with `γZ = Z_red`.
pub fn reduce(z: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Reduction> {
    let tol = ctx.tol();
    let mut z = z.with_precision(ctx.wp());
    let mut g = SymplecticMatrix::identity();
    let mut det_history = vec![z.det_im()];
    let mut steps = 0;
    let apply = |h: SymplecticMatrix, z: &mut PeriodMatrix, g: &mut SymplecticMatrix| -> Result<()> {
        *z = act(&h, z)?;
        *g = h.mul(g)?;
        Ok(())
    };
    let candidates = gottschling_set();
    for _ in 0..REDUCTION_CAP {
        // Lagrange–Gauss reduction of Im Z.
        let mut inner = 0;
        loop {
            inner += 1;
            if inner > REDUCTION_CAP {
                return Err(Error::ReductionCap(REDUCTION_CAP));
            }
            let (y11, y12, y22) = (&z.z11.im, &z.z12.im, &z.z22.im);
            let u = if *y22 < y11 - &tol {
                [[0, 1], [1, 0]]
            } else {
                let k = to_i64(&(y12 / y11))?;
                if k != 0 {
                    [[1, 0], [-k, 1]]
                } else if y12.is_negative() {
                    [[1, 0], [0, -1]]
                } else {
                    break;
                }
            };
            apply(SymplecticMatrix::block(u)?, &mut z, &mut g)?;
        }
        let x11 = to_i64(&z.z11.re)?;
        let x12 = to_i64(&z.z12.re)?;
        let x22 = to_i64(&z.z22.re)?;
        if x11 != 0 || x12 != 0 || x22 != 0 {
            apply(SymplecticMatrix::translation([[-x11, -x12], [-x12, -x22]])?, &mut z, &mut g)?;
        }
        // det Im γZ = det Im Z / |det(CZ+D)|²; pick the smallest |det(CZ+D)|.
        let one = ctx.one();
        let mut best: Option<(BigReal, SymplecticMatrix)> = None;
        for h in &candidates {
            let a = automorphy_det(h, &z).abs();
            if a < &one - &tol && best.as_ref().is_none_or(|(b, _)| a < *b) {
                best = Some((a, *h));
            }
        }
        match best {
            None => {
                det_history.push(z.det_im());
                let out = z.with_precision(ctx.wp());
                return Ok(Reduction { gamma: g, z: out, det_history, gottschling_steps: steps });
            }
            Some((_, h)) => {
                apply(h, &mut z, &mut g)?;
                steps += 1;
                det_history.push(z.det_im());
            }
        }
    }
    Err(Error::ReductionCap(REDUCTION_CAP))
}

/// Generators used for random words: `J`, elementary translations and
/// elementary unimodular blocks, with inverses.
pub fn generators() -> Vec<SymplecticMatrix> {
    let mut out = vec![SymplecticMatrix::j(), SymplecticMatrix::j().inverse()];
    for s in [1, -1] {
        for b in [[[s, 0], [0, 0]], [[0, 0], [0, s]], [[0, s], [s, 0]]] {
            out.push(SymplecticMatrix::translation(b).expect("symmetric"));
        }
        for u in [[[1, s], [0, 1]], [[1, 0], [s, 1]]] {
            out.push(SymplecticMatrix::block(u).expect("unimodular"));
        }
    }
    out.push(SymplecticMatrix::block([[0, 1], [1, 0]]).expect("unimodular"));
    out
}

/// Product of `len` generators drawn uniformly.
pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> Result<SymplecticMatrix> {
    let gens = generators();
    let mut g = SymplecticMatrix::identity();
    for _ in 0..len {
        g = gens[rng.gen_range(0..gens.len())].mul(&g)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::chi10;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(a: &PeriodMatrix, b: &PeriodMatrix, tol: &BigReal) -> bool {
        [(&a.z11, &b.z11), (&a.z12, &b.z12), (&a.z22, &b.z22)]
            .iter()
            .all(|(x, y)| (*x - *y).abs() < *tol)
    }

    #[test]
    fn generators_are_symplectic() {
        for g in generators().iter().chain(&gottschling_set()) {
            assert!(g.is_symplectic(), "{g}");
            assert!(g.mul(&g.inverse()).unwrap().is_identity());
        }
        assert_eq!(gottschling_set().len(), 39);
        assert!(SymplecticMatrix::new([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).is_err());
        assert!(SymplecticMatrix::translation([[1, 2], [3, 4]]).is_err());
        assert!(SymplecticMatrix::block([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn basic_actions() {
        let c = ctx();
        let z = PeriodMatrix::from_f64((0.1, 1.3), (0.2, 0.4), (-0.3, 1.9), c.wp()).unwrap();
        assert_eq!(act(&SymplecticMatrix::identity(), &z).unwrap(), z);
        let t = SymplecticMatrix::translation([[5, 0], [0, 7]]).unwrap();
        let got = act(&t, &z).unwrap();
        let want = PeriodMatrix::new(
            &z.z11 + &BigComplex::from_i64(5, 0, c.wp()),
            z.z12.clone(),
            &z.z22 + &BigComplex::from_i64(7, 0, c.wp()),
        )
        .unwrap();
        assert!(close(&got, &want, &c.eps().mul_i64(64)));
        let ii = PeriodMatrix::i_identity(c.wp());
        assert!(close(&act(&SymplecticMatrix::j(), &ii).unwrap(), &ii, &c.eps()));
    }

    #[test]
    fn domain_membership_examples() {
        let c = ctx();
        let tol = c.tol();
        assert!(in_fundamental_domain(&PeriodMatrix::i_identity(c.wp()), &tol));
        let shifted = act(&SymplecticMatrix::translation([[5, 0], [0, 0]]).unwrap(), &PeriodMatrix::i_identity(c.wp())).unwrap();
        assert!(!in_fundamental_domain(&shifted, &tol));
        let r = reduce(&shifted, &c).unwrap();
        assert!(close(&r.z, &PeriodMatrix::i_identity(c.wp()), &c.eps().mul_i64(16)));
        assert_eq!(r.gamma, SymplecticMatrix::translation([[-5, 0], [0, 0]]).unwrap());
    }

    #[test]
    fn reduced_input_is_fixed() {
        let c = ctx();
        let z = PeriodMatrix::from_f64((0.1, 1.3), (0.2, 0.4), (-0.3, 1.9), c.wp()).unwrap();
        assert!(in_fundamental_domain(&z, &c.tol()));
        let r = reduce(&z, &c).unwrap();
        assert!(r.gamma.is_identity());
        assert_eq!(r.gottschling_steps, 0);
        assert!(close(&r.z, &z, &c.eps()));
    }

    #[test]
    fn reduction_preserves_chi10_invariant() {
        let c = ctx();
        let z = PeriodMatrix::from_f64((0.3, 0.2), (0.1, 0.05), (0.2, 0.3), c.wp()).unwrap();
        let r = reduce(&z, &c).unwrap();
        assert!(r.gottschling_steps > 0);
        assert!(in_fundamental_domain(&r.z, &c.tol().mul_i64(2)));
        assert!(r.z.z11.im.to_f64() >= 3f64.sqrt() / 2.0 - 1e-30);
        for w in r.det_history.windows(2) {
            assert!(w[1] >= &w[0] - &(&w[0] * &c.tol()));
        }
        assert!(close(&act(&r.gamma, &z).unwrap(), &r.z, &c.tol()));
        let inv = |z: &PeriodMatrix| chi10(z, &c).unwrap().value.abs() * z.det_im().powi(5);
        let (a, b) = (inv(&z), inv(&r.z));
        assert!(((&a - &b) / &b).abs() < c.tol());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn action_is_a_group_action(seed in any::<u64>()) {
            let c = ctx();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g1 = random_word(&mut rng, 4).unwrap();
            let g2 = random_word(&mut rng, 4).unwrap();
            let z = PeriodMatrix::from_f64((0.1, 1.3), (0.2, 0.4), (-0.3, 1.9), c.wp()).unwrap();
            let lhs = act(&g1.mul(&g2).unwrap(), &z).unwrap();
            let rhs = act(&g1, &act(&g2, &z).unwrap()).unwrap();
            let scale = BigReal::from_f64(1.0 + lhs.z22.abs().to_f64() + lhs.z11.abs().to_f64(), 64);
            prop_assert!(close(&lhs, &rhs, &(c.tol() * scale)));
        }

        #[test]
        fn reduce_lands_in_domain(seed in any::<u64>(), len in 1usize..10) {
            let c = ctx();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_word(&mut rng, len).unwrap();
            let z0 = PeriodMatrix::from_f64((0.1, 1.3), (0.2, 0.4), (-0.3, 1.9), c.wp()).unwrap();
            let z = act(&g, &z0).unwrap();
            let r = reduce(&z, &c).unwrap();
            prop_assert!(in_fundamental_domain(&r.z, &c.tol().mul_i64(2)));
            prop_assert!(r.z.z11.im.to_f64() >= 3f64.sqrt() / 2.0 - 1e-30);
            for w in r.det_history.windows(2) {
                prop_assert!(w[1] >= &w[0] - &(&w[0] * &c.tol()));
            }
            let back = act(&r.gamma, &z).unwrap();
            prop_assert!(close(&back, &r.z, &c.tol()));
        }
    }
}
