//! Faltings heights of CM abelian surfaces with cyclic quartic CM field,
//! through an odd Dirichlet character `χ` of order 4 and conductor `f`:
//! `h = ½ log f + f·Re(Σ χ(m) log Γ(m/f) / Σ χ(m) m)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::highprec::{log_gamma, BigComplex, BigReal, PrecisionContext};

/// Character `(ℤ/fℤ)^× → {1, i, −1, −i}`, stored as exponents `k` with
/// `χ(m) = i^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    exps: Vec<Option<u8>>,
}

fn parse_value(v: &str) -> Result<u8> {
    match v.trim() {
        "1" | "+1" => Ok(0),
        "i" | "+i" => Ok(1),
        "-1" => Ok(2),
        "-i" => Ok(3),
        other => Err(Error::Character(format!("value {other:?} is not one of 1, i, -1, -i"))),
    }
}

fn value_str(k: u8) -> &'static str {
    ["1", "i", "-1", "-i"][k as usize % 4]
}

fn parse_assignments(body: &str, f: u64) -> Result<BTreeMap<u64, u8>> {
    let mut out = BTreeMap::new();
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (m, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Character(format!("expected m=v, found {item:?}")))?;
        let m: u64 = m
            .trim()
            .parse()
            .map_err(|_| Error::Character(format!("bad residue {m:?}")))?;
        let m = m % f;
        if m.gcd(&f) != 1 {
            return Err(Error::Character(format!("{m} is not a unit mod {f}")));
        }
        let k = parse_value(v)?;
        if out.insert(m, k).is_some_and(|old| old != k) {
            return Err(Error::Character(format!("residue {m} assigned twice")));
        }
    }
    Ok(out)
}

impl DirichletCharacter {
    /// Builds and validates a character from a full table of exponents.
    fn from_exps(modulus: u64, exps: Vec<Option<u8>>) -> Result<Self> {
        let chi = Self { modulus, exps };
        chi.validate()?;
        Ok(chi)
    }

    fn validate(&self) -> Result<()> {
        let f = self.modulus;
        for a in 1..f {
            for b in a..f {
                let (x, y, z) = (self.exp(a), self.exp(b), self.exp(a * b % f));
                let ok = match (x, y) {
                    (Some(x), Some(y)) => z == Some((x + y) % 4),
                    _ => z.is_none() || (a * b % f).gcd(&f) == 1,
                };
                if !ok {
                    return Err(Error::Character(format!("not multiplicative at {a}·{b} mod {f}")));
                }
            }
        }
        if self.order() != 4 {
            return Err(Error::Character(format!("character has order {}, need 4", self.order())));
        }
        if self.exp(f - 1) != Some(2) {
            return Err(Error::Character("character is even (χ(−1) ≠ −1)".into()));
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn exp(&self, m: u64) -> Option<u8> {
        self.exps[(m % self.modulus) as usize]
    }

    /// `χ(m)` as a Gaussian integer `(re, im)`.
    pub fn value(&self, m: u64) -> (i64, i64) {
        match self.exp(m) {
            None => (0, 0),
            Some(0) => (1, 0),
            Some(1) => (0, 1),
            Some(2) => (-1, 0),
            Some(_) => (0, -1),
        }
    }

    pub fn order(&self) -> u8 {
        let mut o = 1;
        for k in self.exps.iter().flatten() {
            o = o.max(match k % 4 {
                0 => 1,
                2 => 2,
                _ => 4,
            });
        }
        o
    }

    pub fn conj(&self) -> Self {
        Self { modulus: self.modulus, exps: self.exps.iter().map(|k| k.map(|k| (4 - k) % 4)).collect() }
    }

    /// `"χ"` if the smallest residue with a non-real value maps to `i`,
    /// `"χ̄"` otherwise; a character and its conjugate give the same height.
    pub fn branch(&self) -> &'static str {
        match self.exps.iter().flatten().find(|k| *k % 2 == 1) {
            Some(1) => "χ",
            _ => "χ̄",
        }
    }

    /// Units mod `f` with their values.
    pub fn table(&self) -> Vec<(u64, &'static str)> {
        (1..self.modulus)
            .filter_map(|m| self.exp(m).map(|k| (m, value_str(k))))
            .collect()
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table().iter().map(|(m, v)| format!("{m}={v}")).collect();
        write!(f, "table: {}", parts.join(", "))
    }
}

/// Parses `"table: m=v, …"` (every unit mod `f`) or `"gen: g=v, …"`
/// (generators, extended multiplicatively).
pub fn char_from_spec(f: u64, spec: &str) -> Result<DirichletCharacter> {
    if f < 3 {
        return Err(Error::Character(format!("modulus {f} admits no order-4 character")));
    }
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::Character(format!("expected 'table:' or 'gen:' in {spec:?}")))?;
    let given = parse_assignments(body, f)?;
    let units: Vec<u64> = (1..f).filter(|m| m.gcd(&f) == 1).collect();
    let mut exps: Vec<Option<u8>> = vec![None; f as usize];
    match kind.trim() {
        "table" => {
            for &m in &units {
                let k = given
                    .get(&m)
                    .ok_or_else(|| Error::Character(format!("table has no value for {m}")))?;
                exps[m as usize] = Some(*k);
            }
        }
        "gen" => {
            exps[1] = Some(0);
            let mut frontier = vec![1u64];
            while let Some(x) = frontier.pop() {
                let kx = exps[x as usize].expect("visited");
                for (&g, &kg) in &given {
                    let y = x * g % f;
                    let ky = (kx + kg) % 4;
                    match exps[y as usize] {
                        None => {
                            exps[y as usize] = Some(ky);
                            frontier.push(y);
                        }
                        Some(k) if k != ky => {
                            return Err(Error::Character(format!(
                                "generator values are inconsistent at {y} mod {f}"
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
            if let Some(m) = units.iter().find(|&&m| exps[m as usize].is_none()) {
                return Err(Error::Character(format!("generators do not reach {m} mod {f}")));
            }
        }
        other => return Err(Error::Character(format!("unknown character form {other:?}"))),
    }
    DirichletCharacter::from_exps(f, exps)
}

/// `Σ_{m=1}^{f−1} χ(m)·m` as `(re, im)`.
pub fn char_weighted_sum(chi: &DirichletCharacter) -> (i64, i64) {
    (1..chi.modulus).fold((0, 0), |(a, b), m| {
        let (x, y) = chi.value(m);
        (a + x * m as i64, b + y * m as i64)
    })
}

/// `Σ_{m=1}^{f−1} χ(m)`.
pub fn char_sum(chi: &DirichletCharacter) -> (i64, i64) {
    (1..chi.modulus).fold((0, 0), |(a, b), m| {
        let (x, y) = chi.value(m);
        (a + x, b + y)
    })
}

/// `½ log f + f·Re(Σ χ(m) log Γ(m/f) / Σ χ(m) m)`.
pub fn colmez_height(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<BigReal> {
    let f = chi.modulus;
    let (wr, wi) = char_weighted_sum(chi);
    if wr == 0 && wi == 0 {
        return Err(Error::Character("Σ χ(m) m vanishes".into()));
    }
    let wp = ctx.wp();
    let mut s = BigComplex::zero(wp);
    for m in 1..f {
        let (x, y) = chi.value(m);
        if x == 0 && y == 0 {
            continue;
        }
        let lg = log_gamma(&ctx.frac(m as i64, f as i64), ctx)?;
        s = &s + &BigComplex::new(lg.mul_i64(x), lg.mul_i64(y));
    }
    let ratio = &s / &BigComplex::from_i64(wr, wi, wp);
    let fi = ctx.int(f as i64);
    Ok(fi.ln().div_i64(2) + &fi * &ratio.re)
}

/// `Δ_K = f² Δ_F`.
pub fn discriminant_relation(f: u64, delta_f: u64) -> BigInt {
    BigInt::from(f).pow(2) * delta_f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EX1: &str = "table: 1=1, 2=i, 3=-i, 4=-1";
    const EX3: &str = "table: 1=1, 3=i, 5=i, 7=1, 9=-1, 11=-i, 13=-i, 15=-1";

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn specs_parse() {
        let a = char_from_spec(5, EX1).unwrap();
        assert_eq!(a, char_from_spec(5, "gen: 2=i").unwrap());
        assert_eq!(a.to_string(), EX1);
        assert_eq!(a.branch(), "χ");
        assert_eq!(a.conj().branch(), "χ̄");
        let c = char_from_spec(16, EX3).unwrap();
        assert_eq!(c, char_from_spec(16, "gen: 3=i, 15=-1").unwrap());
        assert_eq!(c.value(7), (1, 0));
        assert_eq!(c.value(2), (0, 0));
        assert!(char_from_spec(61, "gen: 2=i").is_ok());
    }

    #[test]
    fn bad_specs() {
        for (f, s) in [
            (5, "table: 1=1, 2=i, 3=-i"),
            (5, "table: 1=1, 2=-1, 3=-1, 4=1"),
            (5, "gen: 4=-1"),
            (5, "gen: 2=i, 3=i"),
            (5, "gen: 2=2"),
            (5, "list: 2=i"),
            (16, "gen: 3=i, 15=1"),
            (16, "table: 1=1, 2=i"),
            (17, "gen: 3=i"),
            (2, "gen: 1=1"),
        ] {
            assert!(matches!(char_from_spec(f, s), Err(Error::Character(_))), "{f} {s}");
        }
    }

    #[test]
    fn weighted_sums() {
        assert_eq!(char_weighted_sum(&char_from_spec(5, EX1).unwrap()), (-3, -1));
        assert_eq!(char_weighted_sum(&char_from_spec(61, "gen: 2=i").unwrap()), (-61, 61));
        assert_eq!(char_weighted_sum(&char_from_spec(16, EX3).unwrap()), (-16, -16));
    }

    #[test]
    fn heights() {
        let c = ctx();
        for (f, s, want) in [
            (5, EX1, -1.4525092396456),
            (61, "gen: 2=i", 0.2688651723313),
            (16, EX3, -1.2016102497487),
        ] {
            let h = colmez_height(&char_from_spec(f, s).unwrap(), &c).unwrap().to_f64();
            assert!((h - want).abs() < 1e-12, "{f}: {h}");
        }
    }

    #[test]
    fn closed_form_for_five() {
        let c = ctx();
        let lg = |k: i64| log_gamma(&c.frac(k, 5), &c).unwrap();
        let want = c.int(5).ln().div_i64(2) + (-lg(1).mul_i64(3) - lg(2) + lg(3) + lg(4).mul_i64(3)).div_i64(2);
        let got = colmez_height(&char_from_spec(5, EX1).unwrap(), &c).unwrap();
        assert!((got - want).abs() < c.eps().mul_i64(64));
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant_relation(5, 5), BigInt::from(125));
        assert_eq!(discriminant_relation(61, 61), BigInt::from(61).pow(3));
        assert_eq!(discriminant_relation(16, 8), BigInt::from(2048));
    }

    fn odd_quartic_characters() -> Vec<DirichletCharacter> {
        let mut out = Vec::new();
        for f in [5u64, 13, 16, 29, 37, 61] {
            for g in 2..f {
                for v in ["i", "-i"] {
                    if let Ok(c) = char_from_spec(f, &format!("gen: {g}={v}")) {
                        out.push(c);
                    }
                }
            }
        }
        out.push(char_from_spec(16, EX3).unwrap());
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn conjugate_invariance(idx in 0usize..1000) {
            let all = odd_quartic_characters();
            let chi = &all[idx % all.len()];
            let c = PrecisionContext::new(128).unwrap();
            let a = colmez_height(chi, &c).unwrap();
            let b = colmez_height(&chi.conj(), &c).unwrap();
            prop_assert!((a - b).abs() < c.eps().mul_i64(64));
            let (w, wc) = (char_weighted_sum(chi), char_weighted_sum(&chi.conj()));
            prop_assert_eq!(w.1 + wc.1, 0);
            prop_assert_eq!(w.0 + wc.0, 2 * w.0);
            prop_assert_eq!(char_sum(chi), (0, 0));
        }
    }
}
