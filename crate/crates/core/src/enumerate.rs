//! Exhaustive enumeration of lattice vectors by reduced norm.
//!
//! Everything is driven by the positive-definite form
//! v ↦ Tr_{K/Q}(nrd(Σ vᵢbᵢ)) on a Z-basis. Short vectors are found with a
//! Fincke–Pohst recursion over an exact rational LDLᵀ decomposition, so no
//! floating point is involved.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::lattice::{Lattice, LatticeError, Order, Side};
use crate::numbers::{
    euclid_gcd, factor, sqrt_totally_positive_unit, totally_positive_up_to_trace, BaseField, FieldElement, NumberError,
    RingInteger,
};
use crate::quat::Quaternion;

type R = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("trace form is not positive definite")]
    NotDefinite,
    #[error("no generator found for {0}")]
    NoGeneratorFound(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Number(#[from] NumberError),
}

/// Integer data of the trace form and the reduced norm on a Z-basis.
///
/// nrd(Σ vᵢbᵢ) = (vᵀAv + (vᵀBv)·ω)/den and the trace form is vᵀGv/den.
#[derive(Debug, Clone)]
pub struct TraceForm {
    field: BaseField,
    rows: Vec<Vec<BigRational>>,
    alg: std::sync::Arc<crate::quat::QuaternionAlgebra>,
    gram: Vec<Vec<i128>>,
    na: Vec<Vec<i128>>,
    nb: Vec<Vec<i128>>,
    den: i128,
    // Fincke–Pohst coefficients: diagonal pivots and the strict upper part.
    q: Vec<Vec<R>>,
}

fn to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("trace form entry fits in i128")
}

impl TraceForm {
    pub fn new(lat: &Lattice) -> Result<TraceForm, EnumError> {
        let basis = lat.basis();
        let n = basis.len();
        let field = lat.field();
        let mut half = vec![vec![FieldElement::zero(field); n]; n];
        let mut den = BigInt::one();
        for i in 0..n {
            for j in 0..n {
                let v = (&basis[i] * &basis[j].conj()).trd().scale(&BigRational::new(1.into(), 2.into()));
                den = den.lcm(&v.denominator());
                half[i][j] = v;
            }
        }
        let dr = BigRational::from_integer(den.clone());
        let (s, _) = field.omega_poly();
        let mut na = vec![vec![0i128; n]; n];
        let mut nb = vec![vec![0i128; n]; n];
        let mut gram = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let a = to_i128(&(half[i][j].a() * &dr).to_integer());
                let b = to_i128(&(half[i][j].b() * &dr).to_integer());
                na[i][j] = a;
                nb[i][j] = b;
                gram[i][j] = if field == BaseField::Q { a } else { 2 * a + s as i128 * b };
            }
        }
        let q = ldl(&gram).ok_or(EnumError::NotDefinite)?;
        Ok(TraceForm {
            field,
            rows: lat.rational_rows(),
            alg: lat.algebra().clone(),
            gram,
            na,
            nb,
            den: to_i128(&den),
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Integer Gram matrix and its denominator.
    pub fn gram(&self) -> (&[Vec<i128>], i128) {
        (&self.gram, self.den)
    }

    pub fn value(&self, v: &[i64]) -> i128 {
        quad(&self.gram, v)
    }

    /// Numerators of nrd(v) on 1 and ω, over `den`.
    fn nrd_num(&self, v: &[i64]) -> (i128, i128) {
        let b = if self.field == BaseField::Q { 0 } else { quad(&self.nb, v) };
        (quad(&self.na, v), b)
    }

    pub fn nrd(&self, v: &[i64]) -> FieldElement {
        let (a, b) = self.nrd_num(v);
        let d = BigInt::from(self.den);
        FieldElement::new(self.field, BigRational::new(a.into(), d.clone()), BigRational::new(b.into(), d))
    }

    pub fn quaternion(&self, v: &[i64]) -> Quaternion {
        let m = self.rows[0].len();
        let mut acc = vec![BigRational::zero(); m];
        for (x, row) in v.iter().zip(&self.rows) {
            if *x != 0 {
                let xr = BigRational::from_integer(BigInt::from(*x));
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += r * &xr;
                }
            }
        }
        Quaternion::from_rational_vec(&self.alg, &acc)
    }

    /// Numerator bound for trace-form value Tr(α).
    fn bound_for(&self, alpha: &RingInteger) -> i128 {
        to_i128(&alpha.tr()) * self.den
    }

    fn alpha_num(&self, alpha: &RingInteger) -> (i128, i128) {
        (to_i128(alpha.a()) * self.den, to_i128(alpha.b()) * self.den)
    }

    /// Folds `visit` over every v with vᵀGv ≤ `bound` (the zero vector
    /// included). The top coordinate is split across worker threads.
    pub fn fold_short<A, I, V, M>(&self, bound: i128, init: I, visit: V, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        V: Fn(&mut A, &[i64], i128) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let n = self.dim();
        let top = n - 1;
        let (lo, hi) = self.range(top, R::zero(), R::from_integer(bound));
        let task = |x: i64| {
            let mut acc = init();
            let mut v = vec![0i64; n];
            v[top] = x;
            let t = R::from_integer(x as i128);
            let used = self.q[top][top] * t * t;
            let rem = R::from_integer(bound) - used;
            if rem >= R::zero() {
                if top == 0 {
                    let val = self.value(&v);
                    visit(&mut acc, &v, val);
                } else {
                    self.descend(top - 1, &mut v, rem, &mut |w: &[i64]| {
                        let val = self.value(w);
                        visit(&mut acc, w, val)
                    });
                }
            }
            acc
        };
        #[cfg(feature = "parallel")]
        {
            (lo..=hi).into_par_iter().map(task).reduce(&init, &merge)
        }
        #[cfg(not(feature = "parallel"))]
        {
            (lo..=hi).map(task).fold(init(), &merge)
        }
    }

    /// Integer range containing every x with q_ii (x + c)² ≤ rem.
    fn range(&self, i: usize, c: R, rem: R) -> (i64, i64) {
        let s = rem / self.q[i][i];
        let r = isqrt_floor(&s);
        let mc = -c;
        let lo = mc.floor().to_integer() - r - 1;
        let hi = mc.ceil().to_integer() + r + 1;
        (lo as i64, hi as i64)
    }

    fn descend(&self, i: usize, v: &mut [i64], rem: R, visit: &mut dyn FnMut(&[i64])) {
        let n = self.dim();
        let mut c = R::zero();
        for j in i + 1..n {
            if v[j] != 0 {
                c += self.q[i][j] * R::from_integer(v[j] as i128);
            }
        }
        let (lo, hi) = self.range(i, c, rem);
        for x in lo..=hi {
            let t = R::from_integer(x as i128) + c;
            let used = self.q[i][i] * t * t;
            if used > rem {
                continue;
            }
            v[i] = x;
            if i == 0 {
                visit(v);
            } else {
                self.descend(i - 1, v, rem - used, visit);
            }
        }
        v[i] = 0;
    }

    /// All coordinate vectors with nrd exactly α, lexicographically sorted.
    pub fn vectors_of_norm(&self, alpha: &RingInteger) -> Vec<Vec<i64>> {
        if alpha.is_zero() {
            return vec![vec![0; self.dim()]];
        }
        if !alpha.is_totally_positive() {
            return Vec::new();
        }
        let bound = self.bound_for(alpha);
        let target = self.alpha_num(alpha);
        let mut out = self.fold_short(
            bound,
            Vec::new,
            |acc: &mut Vec<Vec<i64>>, v, val| {
                if val == bound && self.nrd_num(v) == target {
                    acc.push(v.to_vec());
                }
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        out.sort();
        out
    }
}

fn quad(m: &[Vec<i128>], v: &[i64]) -> i128 {
    let n = v.len();
    let mut s = 0i128;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        let mut row = 0i128;
        for j in 0..n {
            row += m[i][j] * v[j] as i128;
        }
        s += row * v[i] as i128;
    }
    s
}

/// floor(√s) for s ≥ 0.
fn isqrt_floor(s: &R) -> i128 {
    if *s <= R::zero() {
        return 0;
    }
    // floor(√(p/q)) = floor(isqrt(p·q)/q).
    let (p, q) = (*s.numer(), *s.denom());
    match p.checked_mul(q) {
        Some(pq) => pq.isqrt() / q,
        None => {
            let big = BigInt::from(p) * BigInt::from(q);
            (big.sqrt() / BigInt::from(q)).to_i128().expect("range fits")
        }
    }
}

/// Fincke–Pohst form of a symmetric matrix: Q(x) = Σ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼxⱼ)².
/// `None` unless every pivot, equivalently every leading minor, is positive.
fn ldl(g: &[Vec<i128>]) -> Option<Vec<Vec<R>>> {
    let n = g.len();
    let mut q: Vec<Vec<R>> = g.iter().map(|r| r.iter().map(|&x| R::from_integer(x)).collect()).collect();
    for i in 0..n {
        if q[i][i] <= R::zero() {
            return None;
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] = q[i][j] / q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let d = q[k][i] * q[i][l];
                q[k][l] -= d;
            }
        }
    }
    Some(q)
}

pub(crate) fn form_of(o: &Order) -> Result<&TraceForm, EnumError> {
    if let Some(f) = o.form.get() {
        return Ok(f);
    }
    let f = TraceForm::new(o.lattice())?;
    let _ = o.form.set(f);
    Ok(o.form.get().expect("just set"))
}

/// The reduced-norm-one group of an order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    elements: Vec<Quaternion>,
}

impl UnitGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Quaternion] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.elements.iter()
    }

    pub fn contains(&self, q: &Quaternion) -> bool {
        self.elements.contains(q)
    }
}

/// Closure under products and conjugation, checked on integer coordinates.
fn is_group(o: &Order, coords: &[Vec<i64>], els: &[Quaternion]) -> bool {
    let set: std::collections::HashSet<&Vec<i64>> = coords.iter().collect();
    els.iter().all(|u| {
        let Some(m) = left_action(o, u) else { return false };
        let conj_ok = o
            .coordinates(&u.conj())
            .and_then(|c| c.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>())
            .is_some_and(|c| set.contains(&c));
        conj_ok && coords.iter().all(|w| set.contains(&apply(&m, w)))
    })
}

pub fn units1(o: &Order) -> Result<UnitGroup, EnumError> {
    if let Some(u) = o.units.get() {
        return Ok(UnitGroup { elements: u.clone() });
    }
    let f = form_of(o)?;
    let one = RingInteger::one(o.field());
    let coords = f.vectors_of_norm(&one);
    let els: Vec<Quaternion> = coords.iter().map(|v| f.quaternion(v)).collect();
    assert!(is_group(o, &coords, &els), "unit enumeration is not a group");
    let _ = o.units.set(els.clone());
    Ok(UnitGroup { elements: els })
}

/// Every q ∈ O with nrd(q) = α, in lexicographic coordinate order.
pub fn representations(o: &Order, alpha: &RingInteger) -> Result<Vec<Quaternion>, EnumError> {
    Ok(representation_coords(o, alpha)?.iter().map(|v| form_of(o).unwrap().quaternion(v)).collect())
}

pub(crate) fn representation_coords(o: &Order, alpha: &RingInteger) -> Result<Vec<Vec<i64>>, EnumError> {
    let f = form_of(o)?;
    if alpha.is_unit() && alpha.is_totally_positive() && !alpha.is_one() {
        // nrd(ε₀u) = ε₀² for central ε₀, so these are ε₀·H¹.
        let e = sqrt_totally_positive_unit(alpha)?;
        let es = Quaternion::scalar(o.algebra(), e.to_field());
        let mut out: Vec<Vec<i64>> = units1(o)?
            .iter()
            .map(|u| {
                let c = o.coordinates(&(&es * u)).expect("unit multiple lies in the order");
                c.iter().map(|x| x.to_i64().expect("small coordinate")).collect()
            })
            .collect();
        out.sort();
        return Ok(out);
    }
    Ok(f.vectors_of_norm(alpha))
}

pub fn count_representations(o: &Order, alpha: &RingInteger) -> Result<usize, EnumError> {
    if alpha.is_one() {
        return Ok(units1(o)?.len());
    }
    Ok(representation_coords(o, alpha)?.len())
}

/// r_O(α) for every totally positive α with Tr(α) ≤ `max_trace`, in
/// (trace, ω-coordinate) order. One enumeration covers all of them.
pub fn counts_up_to(o: &Order, max_trace: i64) -> Result<Vec<(RingInteger, usize)>, EnumError> {
    let f = form_of(o)?;
    let bound = max_trace as i128 * f.den;
    let buckets = f.fold_short(
        bound,
        HashMap::new,
        |acc: &mut HashMap<(i128, i128), usize>, v, _| {
            *acc.entry(f.nrd_num(v)).or_insert(0) += 1;
        },
        |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        },
    );
    Ok(totally_positive_up_to_trace(o.field(), max_trace)
        .into_iter()
        .map(|alpha| {
            let key = f.alpha_num(&alpha);
            let c = buckets.get(&key).copied().unwrap_or(0);
            (alpha, c)
        })
        .collect())
}

/// Matrix of x ↦ u·x on the Z-basis of `l` (row-major, column j holds the
/// coordinates of u·bⱼ), or `None` if u·l ⊄ l.
pub(crate) fn left_action(l: &Lattice, u: &Quaternion) -> Option<Vec<Vec<i64>>> {
    let basis = l.basis();
    let n = basis.len();
    let mut m = vec![vec![0i64; n]; n];
    for (j, b) in basis.iter().enumerate() {
        let c = l.coordinates(&(u * b))?;
        for i in 0..n {
            m[i][j] = c[i].to_i64()?;
        }
    }
    Some(m)
}

pub(crate) fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Membership test for a full-rank sublattice G ⊆ H on H-coordinates.
pub(crate) struct SublatticeTest {
    // w = v·C⁻¹ with C⁻¹ = inv/den; v ∈ G iff every entry of v·inv is divisible by den.
    inv: Vec<Vec<i128>>,
    den: i128,
}

impl SublatticeTest {
    pub(crate) fn new(g: &Lattice, h: &Lattice) -> Option<SublatticeTest> {
        let c: Vec<Vec<BigRational>> = g
            .basis()
            .iter()
            .map(|b| h.coordinates(b).map(|v| v.into_iter().map(BigRational::from_integer).collect()))
            .collect::<Option<_>>()?;
        let inv = crate::linalg::rat_inverse(&c)?;
        let den = inv.iter().flatten().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let dr = BigRational::from_integer(den.clone());
        let inv = inv.iter().map(|r| r.iter().map(|x| to_i128(&(x * &dr).to_integer())).collect()).collect();
        Some(SublatticeTest { inv, den: to_i128(&den) })
    }

    pub(crate) fn contains(&self, v: &[i64]) -> bool {
        let n = v.len();
        (0..n).all(|j| (0..n).map(|i| v[i] as i128 * self.inv[i][j]).sum::<i128>() % self.den == 0)
    }
}

/// #(H¹q ∩ G) for each left H¹-orbit of representations(H, α), largest
/// first.
pub fn orbit_profile(g: &Order, h: &Order, alpha: &RingInteger) -> Result<Vec<usize>, EnumError> {
    if !h.contains_lattice(g) {
        return Err(EnumError::PreconditionViolated("G is not contained in H".into()));
    }
    if !alpha.is_totally_positive() {
        return Err(EnumError::PreconditionViolated(format!("{alpha} is not totally positive")));
    }
    let units = units1(h)?;
    let mats: Vec<Vec<Vec<i64>>> = units.iter().map(|u| left_action(h, u).expect("H¹ preserves H")).collect();
    let test = SublatticeTest::new(g, h).expect("G ⊆ H");
    let mut orbits: HashMap<Vec<i64>, usize> = HashMap::new();
    for v in representation_coords(h, alpha)? {
        let key = mats.iter().map(|m| apply(m, &v)).min().expect("H¹ is nonempty");
        let e = orbits.entry(key).or_insert(0);
        if test.contains(&v) {
            *e += 1;
        }
    }
    let mut out: Vec<usize> = orbits.into_values().collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Ordered factors of a quaternion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<Quaternion>,
}

impl Factorization {
    pub fn new(factors: Vec<Quaternion>) -> Self {
        Factorization { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn norms(&self) -> Vec<FieldElement> {
        self.factors.iter().map(|q| q.nrd()).collect()
    }

    pub fn product(&self) -> Option<Quaternion> {
        let mut it = self.factors.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, q| &acc * q))
    }
}

/// g with H·g = I for a left H-ideal I ⊆ H.
///
/// Among all generators the one with largest Tr(trd(g)) is returned, ties
/// going to the lexicographically smallest coordinates, so H itself gives 1.
pub fn principal_generator(i: &Lattice, h: &Order) -> Result<Quaternion, EnumError> {
    if !h.contains_lattice(i) || !i.contains_lattice(&h.product(i)) {
        return Err(EnumError::PreconditionViolated("not an integral left ideal".into()));
    }
    let idx = crate::lattice::index_ideal(h, i)?;
    let fac = factor(&idx)?;
    let mut nu = RingInteger::one(h.field());
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            return Err(EnumError::NoGeneratorFound(format!("index {idx} is not a square")));
        }
        nu = &nu * &p.pow(e / 2);
    }
    let form = TraceForm::new(i)?;
    let mut best: Option<(BigRational, Vec<i64>)> = None;
    for v in form.vectors_of_norm(&nu) {
        let t = form.quaternion(&v).trd().tr();
        if best.as_ref().is_none_or(|(bt, _)| t > *bt) {
            best = Some((t, v));
        }
    }
    let (_, v) = best.ok_or_else(|| EnumError::NoGeneratorFound(i.to_string()))?;
    let g = form.quaternion(&v);
    // Index equality already forces H·g = I; keep the check as a guard.
    if h.scale(&g, Side::Right)? != *i {
        return Err(EnumError::NoGeneratorFound(i.to_string()));
    }
    Ok(g)
}

/// q = a₁⋯aₙ with nrd(aᵢ) = partᵢ, built from the right.
pub fn coprime_split(q: &Quaternion, h: &Order, parts: &[RingInteger]) -> Result<Factorization, EnumError> {
    let bad = |m: &str| EnumError::PreconditionViolated(m.to_string());
    if parts.is_empty() {
        return Err(bad("no parts"));
    }
    if q.is_zero() || !h.contains(q) {
        return Err(bad("q must be a nonzero element of H"));
    }
    if parts.iter().any(|p| !p.is_totally_positive()) {
        return Err(bad("parts must be totally positive"));
    }
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            if !euclid_gcd(&parts[a], &parts[b]).is_unit() {
                return Err(bad("parts are not pairwise coprime"));
            }
        }
    }
    let f = h.field();
    let nq = q.nrd().to_ring_integer().ok_or_else(|| bad("nrd(q) is not integral"))?;
    let prod = parts.iter().fold(RingInteger::one(f), |a, p| &a * p);
    match nq.div_exact(&prod) {
        Some(u) if u.is_unit() && u.is_totally_positive() => {}
        _ => return Err(bad("parts do not multiply to nrd(q)")),
    }
    let hq = h.scale(q, Side::Right)?;
    let mut rest = q.clone();
    let mut out = Vec::with_capacity(parts.len());
    for part in parts[1..].iter().rev() {
        let ideal = h.scale(&rest, Side::Right)?.sum(&h.scale_scalar(&part.to_field())?);
        let mut g = principal_generator(&ideal, h)?;
        let nu = g.nrd().to_ring_integer().expect("integral");
        let eta = part.div_exact(&nu).ok_or_else(|| bad("generator norm does not divide part"))?;
        let e = sqrt_totally_positive_unit(&eta)?;
        g = g.scale(&e.to_field());
        rest = &rest * &g.inv().expect("nonzero");
        if !h.contains(&rest) {
            return Err(bad("remaining factor left H"));
        }
        out.push(g);
    }
    out.push(rest);
    out.reverse();
    debug_assert!(hq == h.scale(&Factorization::new(out.clone()).product().unwrap(), Side::Right)?);
    Ok(Factorization::new(out))
}

/// True iff f2 arises from f1 by unit migration inside H¹.
pub fn unit_migration_equivalent(f1: &Factorization, f2: &Factorization, h: &Order) -> bool {
    if f1.len() != f2.len() || f1.is_empty() || f1.product() != f2.product() {
        return false;
    }
    let alg = h.algebra();
    let is_unit = |u: &Quaternion| h.contains(u) && u.nrd().is_one();
    let n = f1.len();
    let mut u = Quaternion::one(alg);
    for i in 0..n - 1 {
        let Some(binv) = f2.factors[i].inv() else { return false };
        u = &(&binv * &u) * &f1.factors[i];
        if !is_unit(&u) {
            return false;
        }
    }
    f2.factors[n - 1] == &u * &f1.factors[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldl_rejects_indefinite() {
        assert!(ldl(&[vec![1, 2], vec![2, 1]]).is_none());
        assert!(ldl(&[vec![2, 1], vec![1, 2]]).is_some());
    }

    #[test]
    fn isqrt_of_rationals() {
        assert_eq!(isqrt_floor(&R::new(9, 4)), 1);
        assert_eq!(isqrt_floor(&R::new(16, 1)), 4);
        assert_eq!(isqrt_floor(&R::new(15, 1)), 3);
        assert_eq!(isqrt_floor(&R::zero()), 0);
    }
}
