//! Exact arithmetic in Q, Q(√2) and Q(√5) and in their rings of integers.
//!
//! Elements are written over the integral basis {1, ω} where ω² = sω + t.
//! For Q(√2) ω = √2, for Q(√5) ω = φ = (1+√5)/2.

use std::cmp::Ordering as CmpOrdering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("|nm| = {0} exceeds the trial-division bound {1}")]
    FactorLimitExceeded(BigInt, u64),
    #[error("{0} is not a totally positive unit")]
    NotATotallyPositiveUnit(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("cannot factor zero")]
    Zero,
    #[error("column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

static FACTOR_LIMIT: AtomicU64 = AtomicU64::new(1_000_000_000_000);

/// Largest |nm(x)| that [`factor`] will attempt.
pub fn factor_limit() -> u64 {
    FACTOR_LIMIT.load(Ordering::Relaxed)
}

pub fn set_factor_limit(limit: u64) {
    FACTOR_LIMIT.store(limit, Ordering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseField {
    Q,
    Sqrt2,
    Sqrt5,
}

impl BaseField {
    pub fn degree(self) -> usize {
        match self {
            BaseField::Q => 1,
            _ => 2,
        }
    }

    /// (s, t) with ω² = sω + t.
    pub fn omega_poly(self) -> (i64, i64) {
        match self {
            BaseField::Q => (0, 0),
            BaseField::Sqrt2 => (0, 2),
            BaseField::Sqrt5 => (1, 1),
        }
    }

    pub fn discriminant(self) -> i64 {
        match self {
            BaseField::Q => 1,
            BaseField::Sqrt2 => 8,
            BaseField::Sqrt5 => 5,
        }
    }

    /// 1+√2 or φ; `None` over Q.
    pub fn fundamental_unit(self) -> Option<RingInteger> {
        match self {
            BaseField::Q => None,
            BaseField::Sqrt2 => Some(RingInteger::from_pair(self, 1, 1)),
            BaseField::Sqrt5 => Some(RingInteger::from_pair(self, 0, 1)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseField::Q => "Q",
            BaseField::Sqrt2 => "Q(sqrt2)",
            BaseField::Sqrt5 => "Q(sqrt5)",
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseField {
    type Err = NumberError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "Q" => Ok(BaseField::Q),
            "Q(sqrt2)" => Ok(BaseField::Sqrt2),
            "Q(sqrt5)" => Ok(BaseField::Sqrt5),
            _ => Err(NumberError::Parse { col: 1, msg: format!("unknown field '{s}'") }),
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn round_half_up(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * &two))
}

/// An element a + bω of K with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    field: BaseField,
    a: BigRational,
    b: BigRational,
}

impl FieldElement {
    pub fn new(field: BaseField, a: BigRational, b: BigRational) -> Self {
        assert!(field != BaseField::Q || b.is_zero(), "ω-coordinate over Q must be zero");
        FieldElement { field, a, b }
    }

    pub fn from_int(field: BaseField, n: i64) -> Self {
        Self::new(field, rat(n), BigRational::zero())
    }

    pub fn from_ints(field: BaseField, a: i64, b: i64, den: i64) -> Self {
        let d = BigInt::from(den);
        Self::new(field, BigRational::new(BigInt::from(a), d.clone()), BigRational::new(BigInt::from(b), d))
    }

    pub fn zero(field: BaseField) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: BaseField) -> Self {
        Self::from_int(field, 1)
    }

    pub fn omega(field: BaseField) -> Self {
        Self::new(field, BigRational::zero(), BigRational::one())
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Galois conjugate (identity over Q).
    pub fn conj(&self) -> Self {
        let (s, _) = self.field.omega_poly();
        FieldElement { field: self.field, a: &self.a + &self.b * rat(s), b: -&self.b }
    }

    pub fn nm(&self) -> BigRational {
        if self.field == BaseField::Q {
            return self.a.clone();
        }
        let (s, t) = self.field.omega_poly();
        &self.a * &self.a + &self.a * &self.b * rat(s) - &self.b * &self.b * rat(t)
    }

    pub fn tr(&self) -> BigRational {
        if self.field == BaseField::Q {
            return self.a.clone();
        }
        let (s, _) = self.field.omega_poly();
        &self.a * rat(2) + &self.b * rat(s)
    }

    pub fn is_totally_positive(&self) -> bool {
        if self.field == BaseField::Q {
            self.a.is_positive()
        } else {
            self.tr().is_positive() && self.nm().is_positive()
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.nm();
        if self.field == BaseField::Q {
            return Some(Self::new(self.field, n.recip(), BigRational::zero()));
        }
        let c = self.conj();
        Some(FieldElement { field: self.field, a: &c.a / &n, b: &c.b / &n })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        FieldElement { field: self.field, a: &self.a * r, b: &self.b * r }
    }

    /// Least common denominator of both coordinates.
    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn to_ring_integer(&self) -> Option<RingInteger> {
        self.is_integral().then(|| RingInteger { field: self.field, a: self.a.to_integer(), b: self.b.to_integer() })
    }

    pub fn parse(field: BaseField, s: &str) -> Result<Self, NumberError> {
        parse_field_element(field, s, 0)
    }

    /// True when the printed form starts with a minus sign that can be
    /// pulled out front.
    pub fn displays_negative(&self) -> bool {
        if self.b.is_zero() {
            self.a.is_negative()
        } else {
            self.a.is_zero() && self.b.is_negative()
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let r = self.denominator();
        let p = (&self.a * BigRational::from_integer(r.clone())).to_integer();
        let q = (&self.b * BigRational::from_integer(r.clone())).to_integer();
        let wterm = |q: &BigInt| -> String {
            if q.is_one() {
                "w".to_string()
            } else {
                format!("{q}*w")
            }
        };
        let inner = if p.is_zero() {
            if q.is_negative() {
                format!("-{}", wterm(&-&q))
            } else {
                wterm(&q)
            }
        } else if q.is_negative() {
            format!("{p} - {}", wterm(&-&q))
        } else {
            format!("{p} + {}", wterm(&q))
        };
        if r.is_one() && p.is_zero() {
            write!(f, "{inner}")
        } else if r.is_one() {
            write!(f, "({inner})")
        } else {
            write!(f, "({inner})/{r}")
        }
    }
}

fn mul_coords<T>(s: i64, t: i64, a1: &T, b1: &T, a2: &T, b2: &T) -> (T, T)
where
    T: Clone + Add<Output = T> + Mul<Output = T> + From<i64>,
    for<'x> &'x T: Mul<&'x T, Output = T>,
{
    let bb = b1 * b2;
    let a = a1 * a2 + T::from(t) * bb.clone();
    let b = a1 * b2 + a2 * b1 + T::from(s) * bb;
    (a, b)
}

macro_rules! forward_binops {
    ($ty:ident) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, o: $ty) -> $ty {
                &self + &o
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, o: $ty) -> $ty {
                &self - &o
            }
        }
        impl Mul for $ty {
            type Output = $ty;
            fn mul(self, o: $ty) -> $ty {
                &self * &o
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                -&self
            }
        }
    };
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        assert_eq!(self.field, o.field, "field mismatch");
        FieldElement { field: self.field, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        assert_eq!(self.field, o.field, "field mismatch");
        FieldElement { field: self.field, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        assert_eq!(self.field, o.field, "field mismatch");
        let (s, t) = self.field.omega_poly();
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a + &bb * rat(t);
        let b = &self.a * &o.b + &o.a * &self.b + bb * rat(s);
        FieldElement { field: self.field, a, b }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field, a: -&self.a, b: -&self.b }
    }
}

forward_binops!(FieldElement);

/// An element of O_K = Z[ω].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingInteger {
    field: BaseField,
    a: BigInt,
    b: BigInt,
}

impl RingInteger {
    pub fn new(field: BaseField, a: BigInt, b: BigInt) -> Self {
        assert!(field != BaseField::Q || b.is_zero(), "ω-coordinate over Q must be zero");
        RingInteger { field, a, b }
    }

    pub fn from_pair(field: BaseField, a: i64, b: i64) -> Self {
        Self::new(field, BigInt::from(a), BigInt::from(b))
    }

    pub fn from_int(field: BaseField, n: i64) -> Self {
        Self::from_pair(field, n, 0)
    }

    pub fn from_bigint(field: BaseField, n: BigInt) -> Self {
        Self::new(field, n, BigInt::zero())
    }

    pub fn zero(field: BaseField) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: BaseField) -> Self {
        Self::from_int(field, 1)
    }

    pub fn omega(field: BaseField) -> Self {
        Self::from_pair(field, 0, 1)
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn to_field(&self) -> FieldElement {
        FieldElement {
            field: self.field,
            a: BigRational::from_integer(self.a.clone()),
            b: BigRational::from_integer(self.b.clone()),
        }
    }

    pub fn conj(&self) -> Self {
        let (s, _) = self.field.omega_poly();
        RingInteger { field: self.field, a: &self.a + &self.b * s, b: -&self.b }
    }

    pub fn nm(&self) -> BigInt {
        if self.field == BaseField::Q {
            return self.a.clone();
        }
        let (s, t) = self.field.omega_poly();
        &self.a * &self.a + &self.a * &self.b * s - &self.b * &self.b * t
    }

    pub fn tr(&self) -> BigInt {
        if self.field == BaseField::Q {
            return self.a.clone();
        }
        let (s, _) = self.field.omega_poly();
        &self.a * 2 + &self.b * s
    }

    pub fn is_totally_positive(&self) -> bool {
        if self.field == BaseField::Q {
            self.a.is_positive()
        } else {
            self.tr().is_positive() && self.nm().is_positive()
        }
    }

    pub fn is_unit(&self) -> bool {
        self.nm().abs().is_one()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = RingInteger::one(self.field);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Exact quotient `self / d` when it lies in O_K.
    pub fn div_exact(&self, d: &RingInteger) -> Option<RingInteger> {
        if d.is_zero() {
            return None;
        }
        let q = &self.to_field() * &d.to_field().inv()?;
        q.to_ring_integer()
    }

    pub fn divides(&self, x: &RingInteger) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.div_exact(self).is_some()
    }

    /// Unit ε^k for the fundamental unit ε (1 over Q).
    pub fn unit_power(field: BaseField, k: i64) -> RingInteger {
        let Some(eps) = field.fundamental_unit() else {
            return RingInteger::one(field);
        };
        // ε·conj(ε) = -1, so ε⁻¹ = -conj(ε).
        let base = if k >= 0 { eps.clone() } else { -&eps.conj() };
        base.pow(k.unsigned_abs() as u32)
    }

    pub fn parse(field: BaseField, s: &str) -> Result<Self, NumberError> {
        let x = FieldElement::parse(field, s)?;
        x.to_ring_integer().ok_or_else(|| NumberError::Parse { col: 1, msg: format!("'{s}' is not integral") })
    }
}

impl fmt::Display for RingInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_field().fmt(f)
    }
}

impl Add for &RingInteger {
    type Output = RingInteger;
    fn add(self, o: &RingInteger) -> RingInteger {
        assert_eq!(self.field, o.field, "field mismatch");
        RingInteger { field: self.field, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &RingInteger {
    type Output = RingInteger;
    fn sub(self, o: &RingInteger) -> RingInteger {
        assert_eq!(self.field, o.field, "field mismatch");
        RingInteger { field: self.field, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &RingInteger {
    type Output = RingInteger;
    fn mul(self, o: &RingInteger) -> RingInteger {
        assert_eq!(self.field, o.field, "field mismatch");
        let (s, t) = self.field.omega_poly();
        let (a, b) = mul_coords(s, t, &self.a, &self.b, &o.a, &o.b);
        RingInteger { field: self.field, a, b }
    }
}

impl Neg for &RingInteger {
    type Output = RingInteger;
    fn neg(self) -> RingInteger {
        RingInteger { field: self.field, a: -&self.a, b: -&self.b }
    }
}

forward_binops!(RingInteger);

/// Canonical associate of `x` and the unit `η` with `η·x` equal to it.
///
/// The canonical associate is the totally positive associate of minimal
/// trace, ties broken by the smaller ω-coordinate.
pub fn canonical_associate_with_unit(x: &RingInteger) -> (RingInteger, RingInteger) {
    let field = x.field;
    let one = RingInteger::one(field);
    if x.is_zero() {
        return (x.clone(), one);
    }
    if field == BaseField::Q {
        return if x.a.is_negative() { (-x, -&one) } else { (x.clone(), one) };
    }
    let eps = field.fundamental_unit().unwrap();
    let mut y = x.clone();
    let mut eta = one;
    if y.nm().is_negative() {
        y = &y * &eps;
        eta = eps.clone();
    }
    if y.tr().is_negative() {
        y = -&y;
        eta = -&eta;
    }
    let up = &eps * &eps;
    let down = RingInteger::unit_power(field, -2);
    // tr(y·ε^{2k}) is strictly convex in k, so walk downhill.
    loop {
        let cur = y.tr();
        let yu = &y * &up;
        let yd = &y * &down;
        if yu.tr() < cur {
            y = yu;
            eta = &eta * &up;
        } else if yd.tr() < cur {
            y = yd;
            eta = &eta * &down;
        } else {
            for (cand, step) in [(yu, &up), (yd, &down)] {
                if cand.tr() == cur && cand.b < y.b {
                    y = cand;
                    eta = &eta * step;
                }
            }
            return (y, eta);
        }
    }
}

pub fn canonical_associate(x: &RingInteger) -> RingInteger {
    canonical_associate_with_unit(x).0
}

/// Nearest-coordinate quotient and remainder with |nm(r)| < |nm(y)|.
pub fn euclid_div(x: &RingInteger, y: &RingInteger) -> (RingInteger, RingInteger) {
    let f = &x.to_field() * &y.to_field().inv().expect("division by zero");
    let q = RingInteger { field: x.field, a: round_half_up(&f.a), b: round_half_up(&f.b) };
    let r = x - &(&q * y);
    (q, r)
}

/// Returns (g, u, v) with u·x + v·y = g, g a generator of xO_K + yO_K
/// (not normalized).
pub fn ext_gcd(x: &RingInteger, y: &RingInteger) -> (RingInteger, RingInteger, RingInteger) {
    let field = x.field;
    let (mut r0, mut r1) = (x.clone(), y.clone());
    let (mut u0, mut u1) = (RingInteger::one(field), RingInteger::zero(field));
    let (mut v0, mut v1) = (RingInteger::zero(field), RingInteger::one(field));
    while !r1.is_zero() {
        let (q, r) = euclid_div(&r0, &r1);
        let u2 = &u0 - &(&q * &u1);
        let v2 = &v0 - &(&q * &v1);
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, u2);
        v0 = std::mem::replace(&mut v1, v2);
    }
    (r0, u0, v0)
}

pub fn euclid_gcd(x: &RingInteger, y: &RingInteger) -> RingInteger {
    canonical_associate(&ext_gcd(x, y).0)
}

/// Factorization x = unit · ∏ πᵢ^eᵢ into canonical prime elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealFactorization {
    pub unit: RingInteger,
    pub factors: Vec<(RingInteger, u32)>,
}

impl IdealFactorization {
    pub fn product(&self) -> RingInteger {
        self.factors.iter().fold(self.unit.clone(), |acc, (p, e)| &acc * &p.pow(*e))
    }

    pub fn valuation(&self, pi: &RingInteger) -> u32 {
        let pi = canonical_associate(pi);
        self.factors.iter().find(|(p, _)| *p == pi).map_or(0, |(_, e)| *e)
    }
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Square root of a quadratic residue n modulo an odd prime p.
fn sqrt_mod(n: u128, p: u128) -> u128 {
    let n = n % p;
    if n == 0 {
        return 0;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    r
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Roots of ω's minimal polynomial x² − sx − t modulo p.
fn omega_roots_mod(field: BaseField, p: u64) -> Vec<u64> {
    let (s, t) = field.omega_poly();
    let p128 = p as u128;
    let sm = s.rem_euclid(p as i64) as u128;
    let tm = t.rem_euclid(p as i64) as u128;
    if p == 2 {
        return (0..2u128).filter(|&r| (r * r + 2 * p128 - sm * r - tm).is_multiple_of(2)).map(|r| r as u64).collect();
    }
    let disc = (sm * sm + 4 * tm) % p128;
    let inv2 = p128.div_ceil(2);
    if disc == 0 {
        return vec![(sm * inv2 % p128) as u64];
    }
    if pow_mod(disc, (p128 - 1) / 2, p128) != 1 {
        return vec![];
    }
    let sq = sqrt_mod(disc, p128);
    let r1 = (sm + sq) % p128 * inv2 % p128;
    let r2 = (sm + p128 - sq) % p128 * inv2 % p128;
    vec![r1 as u64, r2 as u64]
}

/// Canonical prime elements of O_K lying over the rational prime p.
pub fn primes_above(field: BaseField, p: u64) -> Vec<RingInteger> {
    let pp = RingInteger::from_int(field, p as i64);
    if field == BaseField::Q {
        return vec![pp];
    }
    let roots = omega_roots_mod(field, p);
    if roots.is_empty() {
        return vec![pp];
    }
    let mut out: Vec<RingInteger> = roots
        .iter()
        .map(|&r| {
            let w = &RingInteger::omega(field) - &RingInteger::from_int(field, r as i64);
            euclid_gcd(&pp, &w)
        })
        .collect();
    out.sort_by(prime_order);
    out.dedup();
    out
}

fn prime_order(x: &RingInteger, y: &RingInteger) -> CmpOrdering {
    (x.nm().abs(), &x.a, &x.b).cmp(&(y.nm().abs(), &y.a, &y.b))
}

/// Complete factorization of a nonzero element by trial division on |nm(x)|.
pub fn factor(x: &RingInteger) -> Result<IdealFactorization, NumberError> {
    if x.is_zero() {
        return Err(NumberError::Zero);
    }
    let field = x.field;
    let limit = factor_limit();
    let n_big = x.nm().abs();
    let n = match n_big.to_u64() {
        Some(n) if n <= limit => n,
        _ => return Err(NumberError::FactorLimitExceeded(n_big, limit)),
    };
    let mut rational_primes = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            rational_primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        rational_primes.push(m);
    }
    let mut rest = x.clone();
    let mut factors = Vec::new();
    for p in rational_primes {
        for pi in primes_above(field, p) {
            let mut e = 0;
            while let Some(q) = rest.div_exact(&pi) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((pi, e));
            }
        }
    }
    factors.sort_by(|a, b| prime_order(&a.0, &b.0));
    debug_assert!(rest.is_unit());
    Ok(IdealFactorization { unit: rest, factors })
}

/// ε₀ with ε₀² = u for a totally positive unit u.
pub fn sqrt_totally_positive_unit(u: &RingInteger) -> Result<RingInteger, NumberError> {
    let field = u.field;
    if !(u.is_unit() && u.is_totally_positive()) {
        return Err(NumberError::NotATotallyPositiveUnit(u.to_string()));
    }
    if field == BaseField::Q {
        return Ok(RingInteger::one(field));
    }
    // u = ε^{2k}; tr(ε^{2k}) grows with |k| so the search is short.
    let up = RingInteger::unit_power(field, 2);
    let down = RingInteger::unit_power(field, -2);
    let (mut cur, mut k) = (u.clone(), 0i64);
    while !cur.is_one() {
        let a = &cur * &down;
        let b = &cur * &up;
        if a.tr() < cur.tr() {
            cur = a;
            k += 1;
        } else if b.tr() < cur.tr() {
            cur = b;
            k -= 1;
        } else {
            return Err(NumberError::NotATotallyPositiveUnit(u.to_string()));
        }
    }
    Ok(RingInteger::unit_power(field, k))
}

/// Every totally positive element of O_K with trace at most `max_trace`,
/// ordered by trace and then by ω-coordinate.
pub fn totally_positive_up_to_trace(field: BaseField, max_trace: i64) -> Vec<RingInteger> {
    let mut out = Vec::new();
    if field == BaseField::Q {
        return (1..=max_trace).map(|n| RingInteger::from_int(field, n)).collect();
    }
    for b in -max_trace..=max_trace {
        for a in -max_trace..=max_trace {
            let x = RingInteger::from_pair(field, a, b);
            if x.is_totally_positive() && x.tr() <= BigInt::from(max_trace) {
                out.push(x);
            }
        }
    }
    out.sort_by(|x, y| (x.tr(), &x.b).cmp(&(y.tr(), &y.b)));
    out
}

/// Element of a residue field O_K/π: u + v·ω̄ (v = 0 when f = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue(pub u64, pub u64);

/// The finite field O_K/π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    field: BaseField,
    pi: RingInteger,
    p: u64,
    f: u32,
    root: u64,
    s: u64,
    t: u64,
}

impl ResidueField {
    pub fn prime(&self) -> &RingInteger {
        &self.pi
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn zero(&self) -> Residue {
        Residue(0, 0)
    }

    pub fn one(&self) -> Residue {
        Residue(1 % self.p, 0)
    }

    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn neg(&self, x: Residue) -> Residue {
        Residue((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }

    pub fn sub(&self, x: Residue, y: Residue) -> Residue {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        let p = self.p as u128;
        let (a1, b1, a2, b2) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        if self.f == 1 {
            return Residue((a1 * a2 % p) as u64, 0);
        }
        let bb = b1 * b2 % p;
        let a = (a1 * a2 + self.t as u128 * bb) % p;
        let b = (a1 * b2 + a2 * b1 + self.s as u128 * bb) % p;
        Residue(a as u64, b as u64)
    }

    pub fn pow(&self, x: Residue, mut e: u64) -> Residue {
        let (mut r, mut b) = (self.one(), x);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, x: Residue) -> Option<Residue> {
        (x != self.zero()).then(|| self.pow(x, self.size() - 2))
    }

    pub fn elements(&self) -> Vec<Residue> {
        let vs = if self.f == 2 { self.p } else { 1 };
        (0..vs).flat_map(|v| (0..self.p).map(move |u| Residue(u, v))).collect()
    }

    pub fn reduce(&self, x: &RingInteger) -> Residue {
        let p = BigInt::from(self.p);
        let a = x.a.mod_floor(&p).to_u64().unwrap();
        let b = x.b.mod_floor(&p).to_u64().unwrap();
        if self.f == 2 {
            Residue(a, b)
        } else {
            let r = (a as u128 + b as u128 * self.root as u128) % self.p as u128;
            Residue(r as u64, 0)
        }
    }

    pub fn lift(&self, x: Residue) -> RingInteger {
        RingInteger::from_pair(self.field, x.0 as i64, x.1 as i64)
    }

    /// Whether x² − t·x + n has no root in this field.
    pub fn is_irreducible_quadratic(&self, t: Residue, n: Residue) -> bool {
        self.elements().into_iter().all(|x| {
            let v = self.add(self.sub(self.mul(x, x), self.mul(t, x)), n);
            v != self.zero()
        })
    }
}

pub fn residue_field_of(pi: &RingInteger) -> Result<ResidueField, NumberError> {
    let field = pi.field;
    let not_prime = || NumberError::NotPrime(pi.to_string());
    let n = pi.nm().abs().to_u64().ok_or_else(not_prime)?;
    let (s, t) = field.omega_poly();
    let mk = |p: u64, f: u32, root: u64| ResidueField {
        field,
        pi: canonical_associate(pi),
        p,
        f,
        root,
        s: s.rem_euclid(p as i64) as u64,
        t: t.rem_euclid(p as i64) as u64,
    };
    if is_prime_u64(n) {
        if field == BaseField::Q {
            return Ok(mk(n, 1, 0));
        }
        let w = RingInteger::omega(field);
        for r in omega_roots_mod(field, n) {
            if pi.divides(&(&w - &RingInteger::from_int(field, r as i64))) {
                return Ok(mk(n, 1, r));
            }
        }
        return Err(not_prime());
    }
    let p = n.isqrt();
    if field != BaseField::Q && p * p == n && is_prime_u64(p) && omega_roots_mod(field, p).is_empty() {
        return Ok(mk(p, 2, 0));
    }
    Err(not_prime())
}

fn parse_err(col: usize, msg: impl Into<String>) -> NumberError {
    NumberError::Parse { col, msg: msg.into() }
}

/// Parses "(p + q*w)/r" and the shorter forms "p", "p/r", "w", "p + q*w".
/// `col0` offsets reported columns.
pub(crate) fn parse_field_element(field: BaseField, s: &str, col0: usize) -> Result<FieldElement, NumberError> {
    let chars: Vec<(usize, char)> =
        s.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).map(|(i, c)| (i + 1 + col0, c)).collect();
    if chars.is_empty() {
        return Err(parse_err(col0 + 1, "empty field element"));
    }
    let mut pos = 0;
    let mut negate = false;
    let parenthesized = if chars[0].1 == '-' && chars.get(1).map(|c| c.1) == Some('(') {
        negate = true;
        pos = 1;
        true
    } else {
        chars[0].1 == '('
    };
    let (a, b, nterms) = if parenthesized {
        let close = chars.iter().rposition(|c| c.1 == ')').ok_or_else(|| parse_err(chars[pos].0, "unbalanced '('"))?;
        let r = parse_linear(&chars[pos + 1..close], field)?;
        pos = close + 1;
        r
    } else {
        let end = chars.iter().position(|c| c.1 == '/').unwrap_or(chars.len());
        let r = parse_linear(&chars[..end], field)?;
        pos = end;
        r
    };
    let mut den = BigInt::one();
    if pos < chars.len() {
        if chars[pos].1 != '/' {
            return Err(parse_err(chars[pos].0, "expected '/'"));
        }
        if !parenthesized && nterms > 1 {
            return Err(parse_err(chars[pos].0, "parenthesize a two-term numerator"));
        }
        let digits: String = chars[pos + 1..].iter().map(|c| c.1).collect();
        den = digits
            .parse::<BigInt>()
            .ok()
            .filter(|d| d.is_positive())
            .ok_or_else(|| parse_err(chars[pos].0 + 1, "expected a positive integer denominator"))?;
    }
    if field == BaseField::Q && !b.is_zero() {
        return Err(parse_err(chars[0].0, "'w' is not available over Q"));
    }
    let d = den;
    let mut x = FieldElement::new(field, BigRational::new(a, d.clone()), BigRational::new(b, d));
    if negate {
        x = -x;
    }
    Ok(x)
}

fn parse_linear(chars: &[(usize, char)], _field: BaseField) -> Result<(BigInt, BigInt, usize), NumberError> {
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut i = 0;
    let mut nterms = 0;
    if chars.is_empty() {
        return Err(parse_err(1, "empty expression"));
    }
    while i < chars.len() {
        let mut sign = 1;
        while i < chars.len() && (chars[i].1 == '+' || chars[i].1 == '-') {
            if chars[i].1 == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < chars.len() && chars[i].1.is_ascii_digit() {
            i += 1;
        }
        let coef: Option<BigInt> =
            (i > start).then(|| chars[start..i].iter().map(|c| c.1).collect::<String>().parse().unwrap());
        let mut is_w = false;
        if i < chars.len() && chars[i].1 == '*' {
            i += 1;
            if i >= chars.len() || chars[i].1 != 'w' {
                return Err(parse_err(chars.get(i).map_or(chars[i - 1].0, |c| c.0), "expected 'w'"));
            }
        }
        if i < chars.len() && chars[i].1 == 'w' {
            is_w = true;
            i += 1;
        }
        if coef.is_none() && !is_w {
            let col = chars.get(i).map_or(chars[chars.len() - 1].0, |c| c.0);
            return Err(parse_err(col, "expected a number or 'w'"));
        }
        if i < chars.len() && chars[i].1 != '+' && chars[i].1 != '-' {
            return Err(parse_err(chars[i].0, format!("unexpected '{}'", chars[i].1)));
        }
        let v = coef.unwrap_or_else(BigInt::one) * sign;
        if is_w {
            b += v;
        } else {
            a += v;
        }
        nterms += 1;
    }
    Ok((a, b, nterms))
}
