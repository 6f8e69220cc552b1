//! The stable Faltings height by the local decomposition
//! `h = (1/60)·log N(Δ⁰_min) − (1/10)·Σ_σ log(2⁸π¹⁰|χ₁₀(Z_σ)| det(Im Z_σ)⁵)`,
//! the two-engine comparison, and conversions between normalizations.

use std::fmt;
use std::str::FromStr;

use crate::cmperiod::{period_matrix, select_tau};
use crate::colmez::{char_from_spec, colmez_height, DirichletCharacter};
use crate::error::{Error, Result};
use crate::highprec::{BigReal, PrecisionContext};
use crate::igusa::{finite_height_part, igusa_invariants, FinitePart, WeierstrassEquation};
use crate::job::Job;
use crate::siegel::{reduce, SymplecticMatrix};
use crate::theta::{archimedean_term, ArchimedeanTerm, PeriodMatrix};

/// Hypotheses under which the local decomposition equals the Faltings height.
pub const HYPOTHESES: [&str; 2] = [
    "the jacobian has good reduction at every finite place (caller hypothesis)",
    "End(A) is the full ring of integers of K (the appendix equalities for Examples 2 and 3 are conditional on this)",
];

/// One archimedean embedding.
#[derive(Clone, Debug)]
pub struct ArchEntry {
    pub label: String,
    pub input: PeriodMatrix,
    pub gamma: SymplecticMatrix,
    pub reduced: PeriodMatrix,
    pub term: ArchimedeanTerm,
}

#[derive(Clone, Debug)]
pub struct HeightBreakdown {
    pub finite: FinitePart,
    pub arch: Vec<ArchEntry>,
    /// Zero: the `2⁸π¹⁰` normalization is already inside each archimedean term.
    pub normalization_offset: BigReal,
    pub degree: usize,
    pub total: BigReal,
    pub error_bound: BigReal,
    pub notes: Vec<String>,
}

/// `(1/d)·[d·finite + Σ_σ archimedean_term(reduce(Z_σ))]`, one `Z_σ` per
/// embedding of the degree-`d` field of definition.
pub fn height_local(
    curve: &WeierstrassEquation,
    periods: &[PeriodMatrix],
    degree: usize,
    extra_primes: &[u64],
    ctx: &PrecisionContext,
) -> Result<HeightBreakdown> {
    if degree == 0 || periods.len() != degree {
        return Err(Error::Input(format!(
            "{} period matrices supplied for a field of degree {degree}",
            periods.len()
        )));
    }
    let inv = igusa_invariants(curve)?;
    let finite = finite_height_part(&inv, extra_primes, ctx)?;
    let arch = periods
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let r = reduce(z, ctx)?;
            let term = archimedean_term(&r.z, ctx)?;
            Ok(ArchEntry { label: format!("σ{}", i + 1), input: z.clone(), gamma: r.gamma, reduced: r.z, term })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = degree as i64;
    let arch_sum = arch.iter().fold(ctx.zero(), |acc, e| acc + &e.term.value);
    let total = (finite.value.mul_i64(d) + arch_sum).div_i64(d);
    let error_bound = arch
        .iter()
        .fold(ctx.eps().with_precision(64), |acc, e| acc + &e.term.error)
        .div_i64(d);
    Ok(HeightBreakdown {
        finite,
        arch,
        normalization_offset: ctx.zero(),
        degree,
        total,
        error_bound,
        notes: HYPOTHESES.iter().map(|s| s.to_string()).collect(),
    })
}

/// `−log(2^{4/5}π)`, the constant separating the bare term
/// `−(1/10)log(|χ₁₀| det⁵)` from the normalized one.
pub fn bare_offset(ctx: &PrecisionContext) -> BigReal {
    -(ctx.ln2().mul_i64(4).div_i64(5) + ctx.pi().ln())
}

/// Options for [`compare`].
#[derive(Clone, Debug, Default)]
pub struct CompareOptions {
    pub both_orderings: bool,
    pub extra_primes: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub character: DirichletCharacter,
    pub colmez: BigReal,
    pub local: HeightBreakdown,
    /// Local height with `τ₁ ↔ τ₂`, when requested.
    pub swapped: Option<HeightBreakdown>,
    pub discrepancy: BigReal,
    pub tolerance: f64,
    pub pass: bool,
}

/// Period matrix of a job in canonical (or swapped) τ order.
pub fn job_period_matrix(job: &Job, swapped: bool, ctx: &PrecisionContext) -> Result<PeriodMatrix> {
    let cm = job.cm.as_ref().ok_or_else(|| Error::Input("job has no CM data".into()))?;
    let (t1, t2) = select_tau(&cm.tau, swapped, ctx)?;
    period_matrix(&t1, &t2, cm.delta_f, ctx)
}

/// Local-engine height of a job (appendix mode: the single `Z` is repeated
/// for every embedding).
pub fn job_height_local(job: &Job, swapped: bool, extra_primes: &[u64], ctx: &PrecisionContext) -> Result<HeightBreakdown> {
    let curve = job.curve.as_ref().ok_or_else(|| Error::Input("job has no curve (P, Q)".into()))?;
    let z = job_period_matrix(job, swapped, ctx)?;
    height_local(curve, &vec![z; job.degree], job.degree, extra_primes, ctx)
}

/// Colmez-engine height of a job.
pub fn job_height_colmez(job: &Job, ctx: &PrecisionContext) -> Result<(DirichletCharacter, BigReal)> {
    let cm = job.cm.as_ref().ok_or_else(|| Error::Input("job has no CM data".into()))?;
    let f = u64::try_from(cm.f_k).map_err(|_| Error::Input("f_K must be positive".into()))?;
    let chi = char_from_spec(f, &cm.character)?;
    let h = colmez_height(&chi, ctx)?;
    Ok((chi, h))
}

/// Both engines on one job.
pub fn compare(job: &Job, opts: &CompareOptions, ctx: &PrecisionContext) -> Result<Comparison> {
    let (character, colmez) = job_height_colmez(job, ctx)?;
    let local = job_height_local(job, false, &opts.extra_primes, ctx)?;
    let swapped = if opts.both_orderings {
        Some(job_height_local(job, true, &opts.extra_primes, ctx)?)
    } else {
        None
    };
    let discrepancy = (&local.total - &colmez).abs();
    let pass = discrepancy.to_f64() < job.tolerance;
    Ok(Comparison { character, colmez, local, swapped, discrepancy, tolerance: job.tolerance, pass })
}

/// Height normalizations, related by
/// `deligne = bost = (g/2)log 2π + colmez = (g/2)log π + faltings = −(g/2)log 2π + fplus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Deligne,
    Bost,
    Colmez,
    Faltings,
    FPlus,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deligne" => Ok(Self::Deligne),
            "bost" => Ok(Self::Bost),
            "colmez" => Ok(Self::Colmez),
            "faltings" => Ok(Self::Faltings),
            "fplus" | "f+" => Ok(Self::FPlus),
            _ => Err(Error::Convention(s.to_string())),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Deligne => "deligne",
            Self::Bost => "bost",
            Self::Colmez => "colmez",
            Self::Faltings => "faltings",
            Self::FPlus => "fplus",
        };
        f.write_str(s)
    }
}

impl Convention {
    /// `c` with `h_deligne = h_self + c`.
    fn offset(self, g: u32, ctx: &PrecisionContext) -> BigReal {
        let two_pi = ctx.pi().mul_i64(2);
        let half_g = ctx.frac(g as i64, 2);
        match self {
            Self::Deligne | Self::Bost => ctx.zero(),
            Self::Colmez => half_g * two_pi.ln(),
            Self::Faltings => half_g * ctx.pi().ln(),
            Self::FPlus => -(half_g * two_pi.ln()),
        }
    }
}

/// Re-expresses a height given in convention `from` in convention `to`.
pub fn convert_normalization(h: &BigReal, from: &str, to: &str, g: u32, ctx: &PrecisionContext) -> Result<BigReal> {
    let (from, to): (Convention, Convention) = (from.parse()?, to.parse()?);
    Ok(h + &from.offset(g, ctx) - to.offset(g, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPolynomial;
    use crate::highprec::BigComplex;
    use crate::siegel::{act, random_word};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn ex3() -> (WeierstrassEquation, PeriodMatrix) {
        let c = ctx();
        let curve = WeierstrassEquation::from_p(IntPolynomial::from_i64(&[1, -3, -6, 2, 3, -1])).unwrap();
        let s2 = c.int(2).sqrt();
        let t1 = BigComplex::new(c.zero(), (c.int(16) - s2.mul_i64(8)).sqrt());
        let t2 = BigComplex::new(c.zero(), (c.int(16) + s2.mul_i64(8)).sqrt());
        (curve, period_matrix(&t1, &t2, 8, &c).unwrap())
    }

    #[test]
    fn conversions() {
        let c = ctx();
        let h = c.frac(3, 7);
        assert_eq!(convert_normalization(&h, "deligne", "deligne", 2, &c).unwrap(), h);
        let two_pi = c.pi().mul_i64(2).ln();
        let got = convert_normalization(&c.zero(), "colmez", "deligne", 2, &c).unwrap();
        assert!((got - &two_pi).abs() < c.eps());
        let got = convert_normalization(&c.zero(), "faltings", "deligne", 2, &c).unwrap();
        assert!((got - c.pi().ln()).abs() < c.eps());
        let got = convert_normalization(&c.zero(), "fplus", "bost", 2, &c).unwrap();
        assert!((got + &two_pi).abs() < c.eps());
        assert!(matches!(convert_normalization(&h, "arakelov", "deligne", 2, &c), Err(Error::Convention(_))));
        assert_eq!("FPlus".parse::<Convention>().unwrap().to_string(), "fplus");
    }

    #[test]
    fn example_three_local() {
        let c = ctx();
        let (curve, z) = ex3();
        let h = height_local(&curve, std::slice::from_ref(&z), 1, &[], &c).unwrap();
        assert!((h.total.to_f64() + 1.2016102497487).abs() < 1e-9);
        let bare = &h.arch[0].term.bare;
        assert!((bare.to_f64() - 0.428322662492607).abs() < 1e-12);
        assert!(h.error_bound.to_f64() < 1e-40);
        assert_eq!(h.notes.len(), 2);
        assert!(height_local(&curve, std::slice::from_ref(&z), 2, &[], &c).is_err());
        // degree 2 with the same Z twice gives the same height
        let h2 = height_local(&curve, &[z.clone(), z], 2, &[], &c).unwrap();
        assert!((h2.total - &h.total).abs() < c.eps().mul_i64(16));
    }

    #[test]
    fn unimodular_model_change_keeps_height() {
        let c = ctx();
        let (curve, z) = ex3();
        let one = crate::exact::int(1);
        let zero = crate::exact::int(0);
        let h = IntPolynomial::from_i64(&[0, 1, 1]);
        let other = curve.transform([&one, &one, &zero, &one], &one, &h).unwrap();
        let a = height_local(&curve, std::slice::from_ref(&z), 1, &[], &c).unwrap();
        let b = height_local(&other, &[z], 1, &[], &c).unwrap();
        assert!((a.total - b.total).abs() < c.eps().mul_i64(16));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn modular_invariance(seed in any::<u64>(), len in 1usize..8) {
            let c = ctx();
            let (curve, z) = ex3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_word(&mut rng, len).unwrap();
            let moved = act(&g, &z).unwrap();
            let a = height_local(&curve, &[z], 1, &[], &c).unwrap();
            let b = height_local(&curve, &[moved], 1, &[], &c).unwrap();
            prop_assert!((a.total - b.total).abs() < c.tol());
        }
    }
}
