//! Closed-form representation numbers r_G(α) for perceptive suborders of
//! class-number-one maximal orders.
//!
//! Every formula is a product of a generalized divisor sum σ over the part of
//! α coprime to the relevant primes and a weight depending on the valuations
//! of α at those primes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::catalog;
use crate::enumerate::{units1, EnumError};
use crate::lattice::{reduced_discriminant, LatticeError, Order};
use crate::numbers::{
    canonical_associate, factor, primes_above, BaseField, IdealFactorization, NumberError, RingInteger,
};
use crate::perceptive::{
    conductor_chain, intermediate_orders, is_perceptive_bruteforce, kind_of, quotient_shape, PerceptiveError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("no formula for this pair: {0}")]
    NoFormula(String),
    #[error("{0} is not totally positive")]
    NotTotallyPositive(String),
    #[error("descriptor is malformed: {0}")]
    BadDescriptor(String),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Perceptive(#[from] PerceptiveError),
}

type Result<T> = std::result::Result<T, FormulaError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cap {
    Excluded,
    AtMost(u32),
}

/// Per-prime exponent caps for σ. Primes not listed are uncapped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivisorSumSpec {
    caps: Vec<(RingInteger, Cap)>,
}

impl DivisorSumSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, prime: &RingInteger, cap: Cap) -> Self {
        let p = canonical_associate(prime);
        self.caps.retain(|(q, _)| *q != p);
        self.caps.push((p, cap));
        self
    }

    pub fn exclude(self, prime: &RingInteger) -> Self {
        self.with(prime, Cap::Excluded)
    }

    pub fn excluding<'a>(self, primes: impl IntoIterator<Item = &'a RingInteger>) -> Self {
        primes.into_iter().fold(self, |s, p| s.exclude(p))
    }

    pub fn cap(self, prime: &RingInteger, c: u32) -> Self {
        self.with(prime, Cap::AtMost(c))
    }

    fn limit(&self, prime: &RingInteger) -> Option<u32> {
        match self.caps.iter().find(|(q, _)| q == prime) {
            None => None,
            Some((_, Cap::Excluded)) => Some(0),
            Some((_, Cap::AtMost(c))) => Some(*c),
        }
    }

    /// σ evaluated on an existing factorization.
    pub fn eval(&self, f: &IdealFactorization) -> BigInt {
        f.factors.iter().fold(BigInt::one(), |acc, (p, e)| {
            let v = self.limit(p).map_or(*e, |c| c.min(*e));
            acc * geometric(&p.nm().abs(), v)
        })
    }
}

/// 1 + q + … + q^v.
fn geometric(q: &BigInt, v: u32) -> BigInt {
    let mut sum = BigInt::zero();
    let mut t = BigInt::one();
    for _ in 0..=v {
        sum += &t;
        t *= q;
    }
    sum
}

pub fn divisor_sum(alpha: &RingInteger, spec: &DivisorSumSpec) -> Result<BigInt> {
    Ok(spec.eval(&factor(alpha)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaKind {
    Max,
    Q,
    P,
    Q2,
    P2,
    QQ,
    PQ,
    P3,
    Q3,
    Q4,
    Gotzky,
}

impl fmt::Display for FormulaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormulaKind::Max => "MAX",
            FormulaKind::Q => "Q",
            FormulaKind::P => "P",
            FormulaKind::Q2 => "Q2",
            FormulaKind::P2 => "P2",
            FormulaKind::QQ => "QQ",
            FormulaKind::PQ => "PQ",
            FormulaKind::P3 => "P3",
            FormulaKind::Q3 => "Q3",
            FormulaKind::Q4 => "Q4",
            FormulaKind::Gotzky => "GOTZKY",
        };
        f.write_str(s)
    }
}

/// Which formula applies, with the data it needs.
///
/// `primes` lists the primes dividing [H:G]; for PQ the discrd prime comes
/// first. `discrd_primes` are the primes of discrd(H).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaDescriptor {
    pub kind: FormulaKind,
    pub field: BaseField,
    pub units: u64,
    pub primes: Vec<RingInteger>,
    pub discrd_primes: Vec<RingInteger>,
}

impl FormulaDescriptor {
    pub fn new(
        kind: FormulaKind,
        field: BaseField,
        units: u64,
        primes: Vec<RingInteger>,
        discrd_primes: Vec<RingInteger>,
    ) -> Self {
        let canon = |v: Vec<RingInteger>| v.iter().map(canonical_associate).collect();
        FormulaDescriptor { kind, field, units, primes: canon(primes), discrd_primes: canon(discrd_primes) }
    }

    fn expected_primes(&self) -> usize {
        match self.kind {
            FormulaKind::Max | FormulaKind::Gotzky => 0,
            FormulaKind::QQ | FormulaKind::PQ => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for FormulaDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |G1|={}", self.kind, self.units)?;
        if !self.primes.is_empty() {
            let p: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
            write!(f, " primes={}", p.join(","))?;
        }
        if !self.discrd_primes.is_empty() {
            let p: Vec<String> = self.discrd_primes.iter().map(|p| p.to_string()).collect();
            write!(f, " discrd={}", p.join(","))?;
        }
        Ok(())
    }
}

/// Weight of π^e in r_G when G sits at depth i of a cyclic chain
/// G = M_i ⊂ … ⊂ M_0 = H at a prime not dividing discrd(H), with
/// |M_{j}¹| = q·|M_{j+1}¹| below the top step.
pub fn q_chain_weight(q: &BigInt, i: u32, e: u32) -> BigInt {
    if e < i {
        return BigInt::from(e + 1) * q.pow(e);
    }
    BigInt::from(i) * q.pow(e) + q.pow(i - 1) * (q + 1u32) * geometric(q, e - i)
}

/// Same for a chain of length i at a prime dividing discrd(H).
pub fn p_chain_weight(q: &BigInt, i: u32, e: u32) -> BigInt {
    if e < i {
        q.pow(e)
    } else {
        q.pow(i - 1) * (q + 1u32)
    }
}

fn nm(p: &RingInteger) -> BigInt {
    p.nm().abs()
}

/// 2(q^a + … + q^e) for a ≤ e.
fn twice_sum(q: &BigInt, a: u32, e: u32) -> BigInt {
    (a..=e).map(|k| q.pow(k)).sum::<BigInt>() * 2
}

fn gotzky_two(field: BaseField) -> RingInteger {
    RingInteger::from_int(field, 2)
}

pub fn predict(desc: &FormulaDescriptor, alpha: &RingInteger) -> Result<BigInt> {
    if alpha.field() != desc.field {
        return Err(FormulaError::BadDescriptor(format!("{alpha} is not in {}", desc.field)));
    }
    if !alpha.is_totally_positive() {
        return Err(FormulaError::NotTotallyPositive(alpha.to_string()));
    }
    if desc.primes.len() != desc.expected_primes() {
        return Err(FormulaError::BadDescriptor(format!("{} takes {} primes", desc.kind, desc.expected_primes())));
    }
    let g = BigInt::from(desc.units);
    if alpha.is_unit() {
        return Ok(g);
    }
    let f = factor(alpha)?;
    let d = &desc.discrd_primes;
    let base = DivisorSumSpec::new().excluding(d);
    let pr = &desc.primes;
    let val = |p: &RingInteger| f.valuation(p);
    let r = match desc.kind {
        FormulaKind::Max => &g * base.eval(&f),
        FormulaKind::Q => {
            let q = &pr[0];
            &g * 2 * base.eval(&f) - &g * base.clone().exclude(q).eval(&f)
        }
        FormulaKind::P => &g * base.cap(&pr[0], 1).eval(&f),
        FormulaKind::Q2 => {
            let (p, q) = (&pr[0], nm(&pr[0]));
            let e = val(p);
            let w = match e {
                0 => BigInt::one(),
                1 => &q * 2,
                _ => twice_sum(&q, 1, e) + q.pow(e) - &q,
            };
            &g * base.exclude(p).eval(&f) * w
        }
        FormulaKind::P2 => {
            let (p, q) = (&pr[0], nm(&pr[0]));
            let w = match val(p) {
                0 => BigInt::one(),
                1 => q.clone(),
                _ => &q * &q + &q,
            };
            &g * base.exclude(p).eval(&f) * w
        }
        FormulaKind::QQ => {
            let (q1, q2) = (&pr[0], &pr[1]);
            &g * 4 * base.eval(&f)
                - &g * 2 * base.clone().exclude(q1).eval(&f)
                - &g * 2 * base.clone().exclude(q2).eval(&f)
                + &g * base.exclude(q1).exclude(q2).eval(&f)
        }
        FormulaKind::PQ => {
            let (p, q) = (&pr[0], &pr[1]);
            let s = base.cap(p, 1);
            &g * 2 * s.eval(&f) - &g * s.exclude(q).eval(&f)
        }
        FormulaKind::P3 => {
            let p = &pr[0];
            let w: u32 = match val(p) {
                0 => 1,
                1 => 2,
                2 => 4,
                _ => 12,
            };
            &g * base.exclude(p).eval(&f) * w
        }
        FormulaKind::Q3 | FormulaKind::Q4 => {
            let p = &pr[0];
            let two = BigInt::from(2);
            let e = val(p);
            let top = if desc.kind == FormulaKind::Q3 { 3 } else { 4 };
            let w = if e < top {
                BigInt::from(e + 1) * two.pow(e)
            } else {
                twice_sum(&two, top - 1, e) + BigInt::from(top - 1) * two.pow(e) - two.pow(top - 1)
            };
            &g * base.exclude(p).eval(&f) * w
        }
        FormulaKind::Gotzky => {
            // 8Σ_{δ|α} − 4Σ_{2|δ|α} + 8Σ_{4|δ|α}, with Σ_{c|δ|α} N(δ) = N(c)σ(α/c).
            let two = gotzky_two(desc.field);
            let sigma = DivisorSumSpec::new();
            let mut r = BigInt::from(8) * sigma.eval(&f);
            if let Some(a2) = alpha.div_exact(&two) {
                r -= BigInt::from(4) * nm(&two) * divisor_sum(&a2, &sigma)?;
                if let Some(a4) = a2.div_exact(&two) {
                    r += BigInt::from(8) * nm(&two).pow(2) * divisor_sum(&a4, &sigma)?;
                }
            }
            r
        }
    };
    debug_assert!(!r.is_negative());
    Ok(r)
}

/// The formula predicting r_G for the pair (G, H).
///
/// H must be a catalog order flagged maximal with class number one. The
/// three sporadic cases and Götzky's formula are matched by catalog name;
/// everything else is dispatched on kind_of and quotient_shape after a
/// perceptivity check.
pub fn formula_for(g: &Order, h: &Order) -> Result<FormulaDescriptor> {
    let field = h.field();
    let hname = catalog::name_of(h).ok_or_else(|| FormulaError::NoFormula("H is not a catalog order".into()))?;
    let entry = catalog::entry(hname).expect("named entry exists");
    if !(entry.maximal && entry.class_number_1) {
        return Err(FormulaError::NoFormula(format!("{hname} is not a maximal order of class number 1")));
    }
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained.into());
    }
    let d = reduced_discriminant(h)?;
    let discrd_primes: Vec<RingInteger> =
        if d.is_unit() { Vec::new() } else { factor(&d)?.factors.into_iter().map(|(p, _)| p).collect() };
    let units = units1(g)?.len() as u64;
    let desc = |kind, primes| FormulaDescriptor::new(kind, field, units, primes, discrd_primes.clone());
    if g == h {
        return Ok(desc(FormulaKind::Max, vec![]));
    }

    let sporadic = match (catalog::name_of(g), hname) {
        (Some("g_p3"), "hurwitz") => Some((FormulaKind::P3, 2, 2)),
        (Some("g_q3"), "cubian") => Some((FormulaKind::Q3, 2, 4)),
        (Some("g_q4"), "cubian") => Some((FormulaKind::Q4, 2, 2)),
        (Some("gotzky_g"), "icosian") => Some((FormulaKind::Gotzky, 0, 8)),
        _ => None,
    };
    if let Some((kind, p, expected_units)) = sporadic {
        if units != expected_units {
            return Err(FormulaError::NoFormula(format!("{kind} needs |G1| = {expected_units}, found {units}")));
        }
        let primes = if p == 0 { vec![] } else { primes_above(field, p).into_iter().take(1).collect() };
        return Ok(desc(kind, primes));
    }

    let kind = kind_of(g, h)?;
    let no = |why: &str| FormulaError::NoFormula(format!("kind {kind}: {why}"));
    match is_perceptive_bruteforce(g, h) {
        Ok(true) => {}
        Ok(false) => return Err(no("not perceptive")),
        Err(PerceptiveError::Capacity(n)) => return Err(no(&format!("perceptivity undecided ({n} cosets)"))),
        Err(e) => return Err(e.into()),
    }
    let parts = &kind.parts;
    let formula = match parts.as_slice() {
        [a] if a.exponent == 1 => {
            desc(if a.divides_discrd { FormulaKind::P } else { FormulaKind::Q }, vec![a.prime.clone()])
        }
        [a] if a.exponent == 2 => {
            if !a.divides_discrd && !quotient_shape(g, h)?.is_cyclic() {
                return Err(no("quotient is not cyclic"));
            }
            let poset = intermediate_orders(g, h)?;
            if !poset.is_linear() {
                return Err(no("poset of orders is not linear"));
            }
            if conductor_chain(g, h, &poset)?.iter().any(|l| l.generator.is_err()) {
                return Err(no("a conductor is not principal"));
            }
            desc(if a.divides_discrd { FormulaKind::P2 } else { FormulaKind::Q2 }, vec![a.prime.clone()])
        }
        [a, b] if a.exponent == 1 && b.exponent == 1 => match (a.divides_discrd, b.divides_discrd) {
            (false, false) => desc(FormulaKind::QQ, vec![a.prime.clone(), b.prime.clone()]),
            (true, false) => desc(FormulaKind::PQ, vec![a.prime.clone(), b.prime.clone()]),
            (false, true) => desc(FormulaKind::PQ, vec![b.prime.clone(), a.prime.clone()]),
            (true, true) => return Err(no("two discrd primes")),
        },
        _ => return Err(no("no formula for this kind")),
    };
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_weights_match_piecewise_cases() {
        let q = BigInt::from(2);
        let q3 = [1, 4, 12, 36, 84];
        let q4 = [1, 4, 12, 32, 88];
        for e in 0..5u32 {
            assert_eq!(q_chain_weight(&q, 3, e), BigInt::from(q3[e as usize]));
            assert_eq!(q_chain_weight(&q, 4, e), BigInt::from(q4[e as usize]));
        }
        let p3 = [1, 2, 4, 12, 12];
        for e in 0..5u32 {
            assert_eq!(p_chain_weight(&q, 3, e), BigInt::from(p3[e as usize]));
        }
    }
}
