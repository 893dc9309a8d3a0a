//! Definite quaternion algebras (a,b | K) and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::numbers::{parse_field_element, BaseField, FieldElement, NumberError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuatError {
    #[error("quaternions belong to different algebras")]
    AlgebraMismatch,
    #[error("algebra ({0}, {1}) is not definite")]
    NotDefinite(String, String),
    #[error("parse error: {0}")]
    Parse(#[from] NumberError),
}

/// i² = a, j² = b, k = ij = −ji.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuaternionAlgebra {
    field: BaseField,
    a: FieldElement,
    b: FieldElement,
}

impl QuaternionAlgebra {
    /// Only totally negative a, b are accepted, so the algebra is definite.
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Arc<Self>, QuatError> {
        let field = a.field();
        assert_eq!(field, b.field(), "field mismatch");
        if !(-&a).is_totally_positive() || !(-&b).is_totally_positive() {
            return Err(QuatError::NotDefinite(a.to_string(), b.to_string()));
        }
        Ok(Arc::new(QuaternionAlgebra { field, a, b }))
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    /// Dimension over Q.
    pub fn rank(&self) -> usize {
        4 * self.field.degree()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quaternion {
    alg: Arc<QuaternionAlgebra>,
    c: [FieldElement; 4],
}

impl Quaternion {
    pub fn new(
        alg: &Arc<QuaternionAlgebra>,
        t: FieldElement,
        x: FieldElement,
        y: FieldElement,
        z: FieldElement,
    ) -> Self {
        Quaternion { alg: alg.clone(), c: [t, x, y, z] }
    }

    pub fn from_ints(alg: &Arc<QuaternionAlgebra>, c: [i64; 4]) -> Self {
        let f = alg.field;
        let [t, x, y, z] = c.map(|v| FieldElement::from_int(f, v));
        Self::new(alg, t, x, y, z)
    }

    pub fn scalar(alg: &Arc<QuaternionAlgebra>, s: FieldElement) -> Self {
        let z = FieldElement::zero(alg.field);
        Self::new(alg, s, z.clone(), z.clone(), z)
    }

    pub fn zero(alg: &Arc<QuaternionAlgebra>) -> Self {
        Self::scalar(alg, FieldElement::zero(alg.field))
    }

    pub fn one(alg: &Arc<QuaternionAlgebra>) -> Self {
        Self::scalar(alg, FieldElement::one(alg.field))
    }

    pub fn i(alg: &Arc<QuaternionAlgebra>) -> Self {
        Self::from_ints(alg, [0, 1, 0, 0])
    }

    pub fn j(alg: &Arc<QuaternionAlgebra>) -> Self {
        Self::from_ints(alg, [0, 0, 1, 0])
    }

    pub fn k(alg: &Arc<QuaternionAlgebra>) -> Self {
        Self::from_ints(alg, [0, 0, 0, 1])
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        &self.alg
    }

    pub fn coords(&self) -> &[FieldElement; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(FieldElement::is_zero)
    }

    pub fn conj(&self) -> Self {
        let [t, x, y, z] = &self.c;
        Quaternion { alg: self.alg.clone(), c: [t.clone(), -x, -y, -z] }
    }

    pub fn nrd(&self) -> FieldElement {
        let [t, x, y, z] = &self.c;
        let (a, b) = (&self.alg.a, &self.alg.b);
        &(&(t * t) - &(&(a * x) * x)) - &(&(&(b * y) * y) - &(&(&(a * b) * z) * z))
    }

    pub fn trd(&self) -> FieldElement {
        &self.c[0] + &self.c[0]
    }

    pub fn try_mul(&self, o: &Quaternion) -> Result<Quaternion, QuatError> {
        if self.alg != o.alg {
            return Err(QuatError::AlgebraMismatch);
        }
        let [t1, x1, y1, z1] = &self.c;
        let [t2, x2, y2, z2] = &o.c;
        let (a, b) = (&self.alg.a, &self.alg.b);
        let ab = a * b;
        let t = &(&(t1 * t2) + &(a * &(x1 * x2))) + &(&(b * &(y1 * y2)) - &(&ab * &(z1 * z2)));
        let x = &(&(t1 * x2) + &(x1 * t2)) + &(b * &(&(z1 * y2) - &(y1 * z2)));
        let y = &(&(t1 * y2) + &(y1 * t2)) + &(a * &(&(x1 * z2) - &(z1 * x2)));
        let z = &(&(t1 * z2) + &(z1 * t2)) + &(&(x1 * y2) - &(y1 * x2));
        Ok(Quaternion { alg: self.alg.clone(), c: [t, x, y, z] })
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Quaternion { alg: self.alg.clone(), c: self.c.clone().map(|v| s * &v) }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.nrd().inv()?;
        Some(self.conj().scale(&n))
    }

    /// q² − trd(q)·q + nrd(q) = 0.
    pub fn quadratic_identity_check(&self) -> bool {
        let lhs = &(self * self) - &self.scale(&self.trd());
        (&lhs + &Quaternion::scalar(&self.alg, self.nrd())).is_zero()
    }

    /// Coordinates over the Q-basis ω^c·{1,i,j,k}; index 4-component m and
    /// ω-power c map to m·d + c.
    pub fn to_rational_vec(&self) -> Vec<BigRational> {
        let d = self.alg.field.degree();
        let mut v = Vec::with_capacity(4 * d);
        for fe in &self.c {
            v.push(fe.a().clone());
            if d == 2 {
                v.push(fe.b().clone());
            }
        }
        v
    }

    pub fn from_rational_vec(alg: &Arc<QuaternionAlgebra>, v: &[BigRational]) -> Self {
        let f = alg.field;
        let d = f.degree();
        assert_eq!(v.len(), 4 * d);
        let fe = |m: usize| {
            let b = if d == 2 { v[m * d + 1].clone() } else { BigRational::zero() };
            FieldElement::new(f, v[m * d].clone(), b)
        };
        Quaternion { alg: alg.clone(), c: [fe(0), fe(1), fe(2), fe(3)] }
    }

    /// Parses "c0 + c1*i + c2*j + c3*k" with field-element coefficients.
    pub fn parse(alg: &Arc<QuaternionAlgebra>, s: &str) -> Result<Self, QuatError> {
        parse_quaternion(alg, s).map_err(QuatError::Parse)
    }
}

fn parse_quaternion(alg: &Arc<QuaternionAlgebra>, s: &str) -> Result<Quaternion, NumberError> {
    let field = alg.field;
    let mut c: [FieldElement; 4] = std::array::from_fn(|_| FieldElement::zero(field));
    let chars: Vec<char> = s.chars().collect();
    // Split into signed terms at depth-0 '+' / '-'.
    let mut terms: Vec<(bool, usize, String)> = Vec::new();
    let mut depth = 0i32;
    let mut neg = false;
    let mut cur = String::new();
    let mut cur_start = 0;
    for (idx, &ch) in chars.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let at_term_start = cur.trim().is_empty();
        let prev = cur.trim_end().chars().last();
        if depth == 0 && (ch == '+' || ch == '-') && !matches!(prev, Some('*') | Some('/')) {
            if at_term_start {
                if ch == '-' {
                    neg = !neg;
                }
                continue;
            }
            terms.push((neg, cur_start, std::mem::take(&mut cur)));
            neg = ch == '-';
            continue;
        }
        if cur.is_empty() {
            cur_start = idx;
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(NumberError::Parse { col: chars.len(), msg: "unbalanced parentheses".into() });
    }
    if cur.trim().is_empty() {
        return Err(NumberError::Parse { col: chars.len().max(1), msg: "missing term".into() });
    }
    terms.push((neg, cur_start, cur));
    for (neg, start, body) in terms {
        let t = body.trim();
        let (coef, slot) = match t.chars().last() {
            Some(u @ ('i' | 'j' | 'k')) => {
                let slot = match u {
                    'i' => 1,
                    'j' => 2,
                    _ => 3,
                };
                let head = t[..t.len() - 1].trim_end();
                let head = head.strip_suffix('*').unwrap_or(head);
                (if head.trim().is_empty() { "1" } else { head }, slot)
            }
            _ => (t, 0),
        };
        let mut v = parse_field_element(field, coef, start)?;
        if neg {
            v = -v;
        }
        c[slot] = &c[slot] + &v;
    }
    Ok(Quaternion { alg: alg.clone(), c })
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let neg = v.displays_negative();
            let abs = if neg { -v } else { v.clone() };
            let unit = ["", "i", "j", "k"][m];
            let body = match (m, abs.is_one()) {
                (0, _) => abs.to_string(),
                (_, true) => unit.to_string(),
                _ => format!("{abs}*{unit}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Quaternion {
    type Output = Quaternion;
    fn add(self, o: &Quaternion) -> Quaternion {
        assert!(self.alg == o.alg, "algebra mismatch");
        Quaternion { alg: self.alg.clone(), c: std::array::from_fn(|m| &self.c[m] + &o.c[m]) }
    }
}

impl Sub for &Quaternion {
    type Output = Quaternion;
    fn sub(self, o: &Quaternion) -> Quaternion {
        assert!(self.alg == o.alg, "algebra mismatch");
        Quaternion { alg: self.alg.clone(), c: std::array::from_fn(|m| &self.c[m] - &o.c[m]) }
    }
}

impl Mul for &Quaternion {
    type Output = Quaternion;
    fn mul(self, o: &Quaternion) -> Quaternion {
        self.try_mul(o).expect("algebra mismatch")
    }
}

impl Neg for &Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion { alg: self.alg.clone(), c: self.c.clone().map(|v| -v) }
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        &self + &o
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        &self - &o
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        &self * &o
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        -&self
    }
}
