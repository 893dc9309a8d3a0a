//! Perceptive suborders: finite quotients, cardinality criteria, posets of
//! intermediate orders, conductors and the suborder search.
//!
//! G ⊆ H is H-perceptive when every left H¹-orbit of H meets G.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::enumerate::{apply, left_action, units1, EnumError};
use crate::lattice::{colon_right, index_ideal, left_order, reduced_discriminant, Lattice, LatticeError, Order};
use crate::linalg;
use crate::numbers::{
    factor, is_prime_u64, primes_above, residue_field_of, BaseField, NumberError, Residue, ResidueField, RingInteger,
};
use crate::quat::Quaternion;

/// Largest quotient the brute-force check will materialize.
pub const MAX_QUOTIENT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PerceptiveError {
    #[error("suborder is not contained in the order")]
    NotContained,
    #[error("quotient is not cyclic")]
    NotCyclic,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("poset of intermediate orders is not linear")]
    PosetNotLinear,
    #[error("quotient has {0} cosets, above the limit of {MAX_QUOTIENT}")]
    Capacity(u128),
    #[error("conductor {0} is not principal over its left order")]
    GeneratorUnavailable(String),
    #[error("conductor index law fails at {0}")]
    IndexLaw(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Number(#[from] NumberError),
}

type Result<T> = std::result::Result<T, PerceptiveError>;

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("coordinate fits in i64")
}

fn abs_norm(x: &RingInteger) -> BigInt {
    x.nm().abs()
}

fn unit_count(o: &Order) -> Result<usize> {
    Ok(units1(o)?.len())
}

/// H/aH with canonical coset representatives.
///
/// Coordinates are taken in the Z-basis of H. A vector is reduced against the
/// row normal form of aH so that entry i lies in [0, pivotᵢ).
pub struct FiniteQuotient {
    order: Order,
    modulus: RingInteger,
    rows: Vec<Vec<i64>>,
    size: usize,
}

impl FiniteQuotient {
    pub fn new(h: &Order, a: &RingInteger) -> Result<FiniteQuotient> {
        let n = h.rank();
        let size = abs_norm(a).to_u128().unwrap_or(u128::MAX).saturating_pow(4);
        if size > MAX_QUOTIENT || a.is_zero() {
            return Err(PerceptiveError::Capacity(size));
        }
        let s = Quaternion::scalar(h.algebra(), a.to_field());
        let gens: Vec<Vec<BigInt>> = h.basis().iter().map(|b| h.coordinates(&(&s * b)).expect("aH ⊆ H")).collect();
        let hnf = linalg::hnf(&gens, n).expect("aH has full rank");
        let rows: Vec<Vec<i64>> = hnf.iter().map(|r| r.iter().map(to_i64).collect()).collect();
        let prod: u128 = rows.iter().enumerate().map(|(i, r)| r[i] as u128).product();
        debug_assert_eq!(prod, size);
        Ok(FiniteQuotient { order: h.clone(), modulus: a.clone(), rows, size: prod as usize })
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn modulus(&self) -> &RingInteger {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut w = v.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let q = w[i].div_euclid(row[i]);
            if q != 0 {
                for c in i..w.len() {
                    w[c] -= q * row[c];
                }
            }
        }
        w
    }

    pub fn reduce_quaternion(&self, q: &Quaternion) -> Option<Vec<i64>> {
        let c = self.order.coordinates(q)?;
        Some(self.reduce(&c.iter().map(to_i64).collect::<Vec<_>>()))
    }

    /// Mixed-radix index of a reduced representative.
    pub fn index(&self, v: &[i64]) -> usize {
        let mut idx = 0usize;
        for (i, row) in self.rows.iter().enumerate().rev() {
            idx = idx * row[i] as usize + v[i] as usize;
        }
        idx
    }

    /// Whether ⋃_{u∈H¹} u·(G/aH) covers H/aH. Requires aH ⊆ G ⊆ H.
    pub fn covered_by_orbits(&self, g: &Lattice) -> Result<bool> {
        let h = &self.order;
        if !h.contains_lattice(g) {
            return Err(PerceptiveError::NotContained);
        }
        let n = h.rank();
        // The subgroup generated by G's basis.
        let gens: Vec<Vec<i64>> = g.basis().iter().map(|b| self.reduce_quaternion(b).expect("G ⊆ H")).collect();
        let mut seen = vec![false; self.size];
        let zero = vec![0i64; n];
        seen[self.index(&zero)] = true;
        let mut sub = vec![zero];
        let mut head = 0;
        while head < sub.len() {
            let x = sub[head].clone();
            head += 1;
            for gv in &gens {
                let y: Vec<i64> = x.iter().zip(gv).map(|(a, b)| a + b).collect();
                let y = self.reduce(&y);
                let i = self.index(&y);
                if !seen[i] {
                    seen[i] = true;
                    sub.push(y);
                }
            }
        }
        // u·G depends only on the coset u·G¹.
        let units = units1(h)?;
        let g_units: Vec<Vec<i64>> = units
            .iter()
            .filter(|u| g.contains(u))
            .map(|u| h.coordinates(u).unwrap().iter().map(to_i64).collect())
            .collect();
        let mut used: HashSet<Vec<i64>> = HashSet::new();
        let mut covered = vec![false; self.size];
        let mut count = 0usize;
        for u in units.iter() {
            let uc: Vec<i64> = h.coordinates(u).unwrap().iter().map(to_i64).collect();
            if used.contains(&uc) {
                continue;
            }
            let m = left_action(h, u).expect("H¹ preserves H");
            for gc in &g_units {
                used.insert(apply(&m, gc));
            }
            for s in &sub {
                let i = self.index(&self.reduce(&apply(&m, s)));
                if !covered[i] {
                    covered[i] = true;
                    count += 1;
                }
            }
            if count == self.size {
                return Ok(true);
            }
        }
        Ok(count == self.size)
    }
}

/// Elementary divisors of H/G as an O_K-module, one (π, e) per cyclic
/// primary factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientShape {
    pub field: BaseField,
    pub factors: Vec<(RingInteger, u32)>,
}

impl QuotientShape {
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    /// O_K-index, the product of all divisors.
    pub fn product(&self) -> RingInteger {
        self.factors.iter().fold(RingInteger::one(self.field), |a, (p, e)| &a * &p.pow(*e))
    }
}

impl fmt::Display for QuotientShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { format!("O/({p})") } else { format!("O/({p})^{e}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn prime_key(p: &RingInteger) -> (BigInt, BigInt, BigInt) {
    (abs_norm(p), p.a().clone(), p.b().clone())
}

pub fn quotient_shape(g: &Order, h: &Order) -> Result<QuotientShape> {
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained);
    }
    let gb = g.ok_basis()?;
    let mut m = Vec::with_capacity(gb.len());
    for x in gb {
        let row: Option<Vec<RingInteger>> = h.ok_coordinates(x)?.iter().map(|c| c.to_ring_integer()).collect();
        m.push(row.ok_or(PerceptiveError::NotContained)?);
    }
    let mut factors = Vec::new();
    for d in linalg::ok_snf_diagonal(&m) {
        if d.is_unit() {
            continue;
        }
        factors.extend(factor(&d)?.factors);
    }
    factors.sort_by(|a, b| prime_key(&a.0).cmp(&prime_key(&b.0)).then(a.1.cmp(&b.1)));
    Ok(QuotientShape { field: h.field(), factors })
}

/// Brute-force check with a = [H:G]_{O_K}, which satisfies aH ⊆ G.
pub fn is_perceptive_bruteforce(g: &Order, h: &Order) -> Result<bool> {
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained);
    }
    let a = index_ideal(h, g)?;
    if a.is_unit() {
        return Ok(true);
    }
    is_perceptive_modulo(g, h, &a)
}

/// Brute-force check in H/aH for a given a with aH ⊆ G.
pub fn is_perceptive_modulo(g: &Lattice, h: &Order, a: &RingInteger) -> Result<bool> {
    let fq = FiniteQuotient::new(h, a)?;
    let ah = h.scale_scalar(&a.to_field())?;
    if !g.contains_lattice(&ah) {
        return Err(PerceptiveError::PreconditionViolated(format!("({a})H is not inside G")));
    }
    fq.covered_by_orbits(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub bound: BigInt,
    pub ratio: BigInt,
    pub perceptive: bool,
}

impl CriterionResult {
    fn new(bound: BigInt, ratio: BigInt) -> Self {
        let perceptive = bound == ratio;
        CriterionResult { bound, ratio, perceptive }
    }
}

fn unit_ratio(g: &Order, h: &Order) -> Result<BigInt> {
    let (hu, gu) = (unit_count(h)?, unit_count(g)?);
    Ok(BigInt::from(hu / gu))
}

/// For H/G ≅ O/πᵉ: perceptive iff |H¹|/|G¹| = qᵉ + q^{e−1}, q = Nm(π).
pub fn cyclic_criterion(g: &Order, h: &Order) -> Result<CriterionResult> {
    let shape = quotient_shape(g, h)?;
    if !shape.is_cyclic() {
        return Err(PerceptiveError::NotCyclic);
    }
    let (p, e) = &shape.factors[0];
    let q = abs_norm(p);
    let bound = num_traits::pow(q.clone(), *e as usize) + num_traits::pow(q, *e as usize - 1);
    Ok(CriterionResult::new(bound, unit_ratio(g, h)?))
}

/// The residue algebra F/πF on F's O_K-basis.
struct ResidueAlgebra {
    k: ResidueField,
    pi: RingInteger,
    basis: Vec<Quaternion>,
    mult: Vec<Vec<Vec<Residue>>>,
    one: Vec<Residue>,
}

impl ResidueAlgebra {
    fn new(f: &Order, pi: &RingInteger) -> Result<ResidueAlgebra> {
        let k = residue_field_of(pi)?;
        let basis = f.ok_basis()?.to_vec();
        let mut alg = ResidueAlgebra { k, pi: pi.clone(), basis: basis.clone(), mult: Vec::new(), one: Vec::new() };
        alg.one = alg.residues(f, &Quaternion::one(f.algebra())).expect("1 ∈ F");
        for x in &basis {
            let row = basis.iter().map(|y| alg.residues(f, &(x * y)).expect("F is a ring")).collect();
            alg.mult.push(row);
        }
        Ok(alg)
    }

    fn residues(&self, f: &Lattice, x: &Quaternion) -> Option<Vec<Residue>> {
        f.ok_coordinates(x).ok()?.iter().map(|c| c.to_ring_integer().map(|r| self.k.reduce(&r))).collect()
    }

    fn mul(&self, x: &[Residue], y: &[Residue]) -> Vec<Residue> {
        let k = &self.k;
        let mut out = vec![k.zero(); 4];
        for (a, xa) in x.iter().enumerate() {
            if *xa == k.zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if *yb == k.zero() {
                    continue;
                }
                let s = k.mul(*xa, *yb);
                for (o, m) in out.iter_mut().zip(&self.mult[a][b]) {
                    *o = k.add(*o, k.mul(s, *m));
                }
            }
        }
        out
    }

    fn lift(&self, x: &[Residue]) -> Quaternion {
        let alg = self.basis[0].algebra();
        x.iter().zip(&self.basis).fold(Quaternion::zero(alg), |acc, (c, b)| {
            if *c == self.k.zero() {
                acc
            } else {
                &acc + &b.scale(&self.k.lift(*c).to_field())
            }
        })
    }

    fn dot(&self, x: &[Residue], y: &[Residue]) -> Residue {
        x.iter().zip(y).fold(self.k.zero(), |acc, (a, b)| self.k.add(acc, self.k.mul(*a, *b)))
    }

    /// Whether span(1, w) is a field, via the characteristic polynomial of
    /// a lift.
    fn is_field_span(&self, w: &[Residue]) -> bool {
        let z = self.lift(w);
        let (Some(t), Some(n)) = (z.trd().to_ring_integer(), z.nrd().to_ring_integer()) else {
            return false;
        };
        self.k.is_irreducible_quadratic(self.k.reduce(&t), self.k.reduce(&n))
    }

    /// Generators of πF, to be added to lifted subspace bases.
    fn pi_f(&self) -> Vec<Quaternion> {
        let s = self.pi.to_field();
        self.basis.iter().map(|b| b.scale(&s)).collect()
    }

    /// Whether x is in span(1, w).
    fn in_plane(&self, w: &[Residue], x: &[Residue]) -> bool {
        let k = &self.k;
        let one = &self.one;
        // Pick columns (i, j) where [1; w] is invertible and solve there.
        for i in 0..4 {
            for j in i + 1..4 {
                let det = k.sub(k.mul(one[i], w[j]), k.mul(one[j], w[i]));
                let Some(dinv) = k.inv(det) else { continue };
                let a = k.mul(k.sub(k.mul(x[i], w[j]), k.mul(x[j], w[i])), dinv);
                let b = k.mul(k.sub(k.mul(one[i], x[j]), k.mul(one[j], x[i])), dinv);
                return (0..4).all(|c| k.add(k.mul(a, one[c]), k.mul(b, w[c])) == x[c]);
            }
        }
        false
    }
}

/// Subspaces of kⁿ of the given dimension, as reduced row echelon bases.
fn subspaces(k: &ResidueField, n: usize, dim: usize) -> Vec<Vec<Vec<Residue>>> {
    let elems = k.elements();
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn choose(n: usize, dim: usize, start: usize, cur: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if cur.len() == dim {
            all.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            choose(n, dim, c + 1, cur, all);
            cur.pop();
        }
    }
    choose(n, dim, 0, &mut Vec::new(), &mut pivots);
    for piv in pivots {
        let free: Vec<(usize, usize)> =
            (0..dim).flat_map(|r| (piv[r] + 1..n).filter(|c| !piv.contains(c)).map(move |c| (r, c))).collect();
        let total = elems.len().pow(free.len() as u32);
        for mut code in 0..total {
            let mut m = vec![vec![k.zero(); n]; dim];
            for r in 0..dim {
                m[r][piv[r]] = k.one();
            }
            for &(r, c) in &free {
                m[r][c] = elems[code % elems.len()];
                code /= elems.len();
            }
            out.push(m);
        }
    }
    out
}

/// Basis of the row space of `rows` over k.
fn row_basis(k: &ResidueField, rows: &[Vec<Residue>]) -> Vec<Vec<Residue>> {
    let mut m: Vec<Vec<Residue>> = rows.to_vec();
    let n = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != k.zero()) else { continue };
        m.swap(rank, p);
        let inv = k.inv(m[rank][c]).unwrap();
        m[rank] = m[rank].iter().map(|x| k.mul(*x, inv)).collect();
        for r in 0..m.len() {
            if r != rank && m[r][c] != k.zero() {
                let f = m[r][c];
                let pr = m[rank].clone();
                m[r] = m[r].iter().zip(&pr).map(|(x, y)| k.sub(*x, k.mul(f, *y))).collect();
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

/// Whether G/πH is a two-dimensional field inside H/πH.
fn is_field_pair(g: &Order, h: &Order, pi: &RingInteger) -> Result<bool> {
    let ra = ResidueAlgebra::new(h, pi)?;
    let rows: Vec<Vec<Residue>> =
        g.ok_basis()?.iter().map(|x| ra.residues(h, x).ok_or(PerceptiveError::NotContained)).collect::<Result<_>>()?;
    let b = row_basis(&ra.k, &rows);
    if b.len() != 2 {
        return Ok(false);
    }
    let w = b.iter().find(|r| row_basis(&ra.k, &[ra.one.clone(), r.to_vec()]).len() == 2);
    Ok(w.is_some_and(|w| ra.is_field_span(w)))
}

/// For H/G ≅ (O/π)² with G/πH a field: perceptive iff the unit ratio is
/// Nm(π)² + 1.
pub fn field_criterion(g: &Order, h: &Order) -> Result<CriterionResult> {
    let shape = quotient_shape(g, h)?;
    let pre = |m: &str| PerceptiveError::PreconditionViolated(m.to_string());
    let f = &shape.factors;
    if !(f.len() == 2 && f[0] == f[1] && f[0].1 == 1) {
        return Err(pre("H/G is not (O/π)²"));
    }
    if !is_field_pair(g, h, &f[0].0)? {
        return Err(pre("G/πH is not a field"));
    }
    let q = abs_norm(&f[0].0);
    Ok(CriterionResult::new(&q * &q + 1, unit_ratio(g, h)?))
}

/// All orders between G and H with the inclusion relation.
#[derive(Debug, Clone)]
pub struct OrderPoset {
    orders: Vec<Order>,
    leq: Vec<Vec<bool>>,
    linear: bool,
}

impl OrderPoset {
    fn from_orders(mut orders: Vec<Order>) -> OrderPoset {
        orders.sort();
        let n = orders.len();
        let leq: Vec<Vec<bool>> =
            (0..n).map(|i| (0..n).map(|j| orders[j].contains_lattice(&orders[i])).collect()).collect();
        let linear = (0..n).all(|i| (0..n).all(|j| leq[i][j] || leq[j][i]));
        OrderPoset { orders, leq, linear }
    }

    /// Orders from the bottom (G) up; a chain in inclusion order when
    /// linear.
    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn position(&self, o: &Order) -> Option<usize> {
        self.orders.iter().position(|x| x == o)
    }

    pub fn contains(&self, o: &Order) -> bool {
        self.position(o).is_some()
    }

    /// Whether orders()[i] ⊆ orders()[j].
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// The part of the poset lying above orders()[i].
    pub fn above(&self, i: usize) -> OrderPoset {
        OrderPoset::from_orders((0..self.len()).filter(|&j| self.leq[i][j]).map(|j| self.orders[j].clone()).collect())
    }
}

/// Orders N with M ⊊ N ⊆ H and N/M of dimension one or two over some
/// O_K/π; every minimal overorder of M inside H is among them.
fn small_overorders(m: &Order, h: &Order) -> Result<Vec<Order>> {
    let idx = index_ideal(h, m)?;
    if idx.is_unit() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (pi, _) in factor(&idx)?.factors {
        let ra = ResidueAlgebra::new(m, &pi)?;
        // A minimal overorder N satisfies πN ⊆ M, so πN/πM is a subspace
        // of (πH ∩ M)/πM.
        let y = h.scale_scalar(&pi.to_field())?.intersection(m);
        let rows: Vec<Vec<Residue>> = y.ok_basis()?.iter().map(|x| ra.residues(m, x).expect("πH ∩ M ⊆ M")).collect();
        let u = row_basis(&ra.k, &rows);
        let inv_pi = pi.to_field().inv().expect("nonzero");
        let mb = m.ok_basis()?.to_vec();
        for dim in 1..=u.len().min(2) {
            for sub in subspaces(&ra.k, u.len(), dim) {
                let mut gens = mb.clone();
                for coeffs in &sub {
                    let v: Vec<Residue> = (0..4)
                        .map(|c| {
                            coeffs.iter().zip(&u).fold(ra.k.zero(), |acc, (a, row)| ra.k.add(acc, ra.k.mul(*a, row[c])))
                        })
                        .collect();
                    gens.push(ra.lift(&v).scale(&inv_pi));
                }
                let lat = Lattice::canonicalize(m.algebra(), &gens, true)?;
                if let Ok(o) = Order::new(lat) {
                    out.push(o);
                }
            }
        }
    }
    Ok(out)
}

/// The poset of all orders between G and H, closed upward from G by
/// minimal steps.
pub fn intermediate_orders(g: &Order, h: &Order) -> Result<OrderPoset> {
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained);
    }
    let mut seen: HashSet<Order> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(g.clone());
    queue.push_back(g.clone());
    while let Some(m) = queue.pop_front() {
        for n in small_overorders(&m, h)? {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen.insert(h.clone());
    Ok(OrderPoset::from_orders(seen.into_iter().collect()))
}

/// For a linear poset G = M₁ ⊊ M₂ ⊊ … ⊊ H: perceptive iff
/// |H¹|/|G¹| = Nm[H:G] + Nm[H:M₂], given that M₂ is H-perceptive.
pub fn linear_poset_count_criterion(g: &Order, h: &Order, poset: &OrderPoset) -> Result<CriterionResult> {
    if !poset.is_linear() {
        return Err(PerceptiveError::PosetNotLinear);
    }
    let pre = |m: &str| PerceptiveError::PreconditionViolated(m.to_string());
    let gi = poset.position(g).ok_or_else(|| pre("G is not in the poset"))?;
    if !poset.contains(h) {
        return Err(pre("H is not in the poset"));
    }
    if g == h {
        return Err(pre("G equals H"));
    }
    let chain = poset.above(gi);
    let m2 = &chain.orders()[1];
    if m2 != h {
        let sub = chain.above(1);
        if !linear_poset_count_criterion(m2, h, &sub)?.perceptive {
            return Err(pre("M₂ is not H-perceptive"));
        }
    }
    let bound = abs_norm(&index_ideal(h, g)?) + abs_norm(&index_ideal(h, m2)?);
    Ok(CriterionResult::new(bound, unit_ratio(g, h)?))
}

/// F = G₀ ⊊ … ⊊ G_r = H with [G_i : G_{i−1}] = π_iᵉⁱ, via
/// G_i = F + (∏_{j>i} π_jᵉʲ)·H.
pub fn chain_decompose(f: &Order, h: &Order) -> Result<Vec<Order>> {
    if !h.contains_lattice(f) {
        return Err(PerceptiveError::NotContained);
    }
    let idx = index_ideal(h, f)?;
    if idx.is_unit() {
        return Ok(vec![f.clone()]);
    }
    let parts: Vec<RingInteger> = factor(&idx)?.factors.iter().map(|(p, e)| p.pow(*e)).collect();
    let field = f.field();
    let r = parts.len();
    let mut chain: Vec<Order> = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let c = parts[i..].iter().fold(RingInteger::one(field), |a, p| &a * p);
        let lat = f.sum(&h.scale_scalar(&c.to_field())?);
        let o = Order::new(lat)?;
        if i > 0 {
            let step = index_ideal(&o, &chain[i - 1])?;
            if step != crate::numbers::canonical_associate(&parts[i - 1]) {
                return Err(PerceptiveError::PreconditionViolated(format!("unexpected index {step}")));
            }
        }
        chain.push(o);
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindPart {
    pub prime: RingInteger,
    pub exponent: u32,
    pub divides_discrd: bool,
}

/// Factorization of [H:G] with each prime marked by whether it divides
/// discrd(H) (a 𝔭-prime) or not (a 𝔮-prime).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindDescriptor {
    pub parts: Vec<KindPart>,
}

impl fmt::Display for KindDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                let letter = if p.divides_discrd { 'p' } else { 'q' };
                if p.exponent == 1 {
                    format!("{letter}({})", p.prime)
                } else {
                    format!("{letter}({})^{}", p.prime, p.exponent)
                }
            })
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

pub fn kind_of(g: &Order, h: &Order) -> Result<KindDescriptor> {
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained);
    }
    let idx = index_ideal(h, g)?;
    let d = reduced_discriminant(h)?;
    let parts = if idx.is_unit() {
        Vec::new()
    } else {
        factor(&idx)?
            .factors
            .into_iter()
            .map(|(prime, exponent)| KindPart { divides_discrd: prime.divides(&d), prime, exponent })
            .collect()
    };
    Ok(KindDescriptor { parts })
}

#[derive(Debug, Clone)]
pub struct ConductorLink {
    pub order: Order,
    pub conductor: Lattice,
    pub generator: std::result::Result<Quaternion, PerceptiveError>,
}

/// (G:M) for each M of a linear poset, with a generator over M when M is
/// the left order of the conductor. Checks [G:(G:M)] = [M:G].
pub fn conductor_chain(g: &Order, h: &Order, poset: &OrderPoset) -> Result<Vec<ConductorLink>> {
    if !poset.is_linear() {
        return Err(PerceptiveError::PosetNotLinear);
    }
    if !h.contains_lattice(g) {
        return Err(PerceptiveError::NotContained);
    }
    let mut out = Vec::new();
    for m in poset.orders() {
        if !m.contains_lattice(g) || !h.contains_lattice(m) {
            continue;
        }
        let c = colon_right(g, m);
        if index_ideal(g, &c)? != index_ideal(m, g)? {
            return Err(PerceptiveError::IndexLaw(m.to_string()));
        }
        let generator = if left_order(&c) == *m {
            crate::enumerate::principal_generator(&c, m)
                .map_err(|_| PerceptiveError::GeneratorUnavailable(c.to_string()))
        } else {
            Err(PerceptiveError::GeneratorUnavailable(c.to_string()))
        };
        out.push(ConductorLink { order: m.clone(), conductor: c, generator });
    }
    Ok(out)
}

/// Primes π with Nm(π)+1 or Nm(π)²+1 dividing |H¹|/2.
fn candidate_primes(h: &Order) -> Result<Vec<RingInteger>> {
    let half = (unit_count(h)? / 2) as u64;
    let mut out = Vec::new();
    for p in 2..half.max(2) {
        if !is_prime_u64(p) {
            continue;
        }
        for pi in primes_above(h.field(), p) {
            let q = abs_norm(&pi).to_u64().expect("small prime");
            if half.is_multiple_of(q + 1) || half.is_multiple_of(q * q + 1) {
                out.push(pi);
            }
        }
    }
    Ok(out)
}

/// A suborder L of F with F/L of dimension one or two over O_K/π, and its
/// unit group.
struct Step {
    order: Order,
    units: Vec<Quaternion>,
}

/// S₁ ∪ S₂ for F at π, keeping only L with [G:L]_Z·|L¹| < |G¹|.
fn minimal_suborders(f: &Order, pi: &RingInteger, gf_index: &BigInt, g_units: usize) -> Result<Vec<Step>> {
    let q = abs_norm(pi);
    let passes = |codim: u32, l_units: usize| {
        gf_index * num_traits::pow(q.clone(), codim as usize) * l_units < BigInt::from(g_units)
    };
    // |L¹| ≥ 2, so whole families can fail the index test up front.
    let (want1, want2) = (passes(1, 2), passes(2, 2));
    if !want1 && !want2 {
        return Ok(Vec::new());
    }
    let ra = ResidueAlgebra::new(f, pi)?;
    let k = &ra.k;
    let f_units = units1(f)?;
    let unit_res: Vec<Vec<Residue>> = f_units.iter().map(|u| ra.residues(f, u).expect("F¹ ⊆ F")).collect();
    let pif = ra.pi_f();
    let alg = f.algebra().clone();
    let build = |gens: Vec<Quaternion>, keep: Vec<usize>| -> Option<Step> {
        let lat = Lattice::canonicalize(&alg, &gens, true).ok()?;
        let order = Order::new(lat).ok()?;
        let units: Vec<Quaternion> = keep.into_iter().map(|i| f_units.elements()[i].clone()).collect();
        Some(Step { order, units })
    };

    // S₁: kernels of functionals λ ≠ 0 with λ(1) = 0 that are closed under
    // multiplication.
    let s1 =
        || subspaces(k, 4, 1).into_iter().map(|mut l| l.pop().unwrap()).filter(|lam| ra.dot(lam, &ra.one) == k.zero());
    let s1_check = |lam: Vec<Residue>| -> Option<Step> {
        let keep: Vec<usize> = (0..unit_res.len()).filter(|&i| ra.dot(&lam, &unit_res[i]) == k.zero()).collect();
        if !passes(1, keep.len()) {
            return None;
        }
        let p = lam.iter().position(|x| *x != k.zero()).unwrap();
        let kernel: Vec<Vec<Residue>> = (0..4)
            .filter(|&c| c != p)
            .map(|c| {
                let mut v = vec![k.zero(); 4];
                v[c] = k.one();
                v[p] = k.neg(lam[c]);
                v
            })
            .collect();
        let closed = kernel.iter().all(|a| kernel.iter().all(|b| ra.dot(&lam, &ra.mul(a, b)) == k.zero()));
        if !closed {
            return None;
        }
        let mut gens: Vec<Quaternion> = kernel.iter().map(|v| ra.lift(v)).collect();
        gens.extend(pif.iter().cloned());
        build(gens, keep)
    };

    // S₂: span(1, w) for w on lines of a complement of 1, when a field.
    let p1 = ra.one.iter().position(|x| *x != k.zero()).expect("1 ≠ 0 mod π");
    let s2 = || {
        subspaces(k, 3, 1).into_iter().map(move |mut l| {
            let mut w = l.pop().unwrap();
            w.insert(p1, k.zero());
            w
        })
    };
    let s2_check = |w: Vec<Residue>| -> Option<Step> {
        let keep: Vec<usize> = (0..unit_res.len()).filter(|&i| ra.in_plane(&w, &unit_res[i])).collect();
        if !passes(2, keep.len()) || !ra.is_field_span(&w) {
            return None;
        }
        let mut gens = vec![Quaternion::one(&alg), ra.lift(&w)];
        gens.extend(pif.iter().cloned());
        build(gens, keep)
    };

    let s1: Vec<Vec<Residue>> = if want1 { s1().collect() } else { Vec::new() };
    let s2: Vec<Vec<Residue>> = if want2 { s2().collect() } else { Vec::new() };
    #[cfg(feature = "parallel")]
    let (a, b): (Vec<Step>, Vec<Step>) =
        (s1.into_par_iter().filter_map(s1_check).collect(), s2.into_par_iter().filter_map(s2_check).collect());
    #[cfg(not(feature = "parallel"))]
    let (a, b): (Vec<Step>, Vec<Step>) =
        (s1.into_iter().filter_map(s1_check).collect(), s2.into_iter().filter_map(s2_check).collect());
    let mut out = a;
    out.extend(b);
    Ok(out)
}

/// Decides whether L is G-perceptive when [G:L] is a power of π.
fn decide_step(l: &Order, g: &Order, pi: &RingInteger) -> Result<bool> {
    let shape = quotient_shape(l, g)?;
    if shape.is_trivial() {
        return Ok(true);
    }
    if shape.is_cyclic() {
        return Ok(cyclic_criterion(l, g)?.perceptive);
    }
    let f = &shape.factors;
    if f.len() == 2 && f[0] == f[1] && f[0].1 == 1 && is_field_pair(l, g, &f[0].0)? {
        return Ok(field_criterion(l, g)?.perceptive);
    }
    let e = f.iter().map(|(_, e)| *e).max().unwrap_or(0);
    is_perceptive_modulo(l, g, &pi.pow(e))
}

/// Every H-perceptive suborder of H (H included), smallest covolume first.
pub fn search_perceptive(h: &Order) -> Result<Vec<Order>> {
    let primes = candidate_primes(h)?;
    let mut omega: Vec<Order> = vec![h.clone()];
    for pi in &primes {
        let mut omega_new: HashSet<Order> = HashSet::new();
        for g in &omega {
            let g_units = unit_count(g)?;
            let mut gamma: Vec<Order> = vec![g.clone()];
            let mut in_gamma: HashSet<Order> = gamma.iter().cloned().collect();
            let mut verdicts: HashMap<Order, bool> = HashMap::new();
            while let Some(f) = gamma.pop() {
                in_gamma.remove(&f);
                omega_new.insert(f.clone());
                let gf = g.z_index(&f)?;
                for step in minimal_suborders(&f, pi, &gf, g_units)? {
                    let l = step.order;
                    if omega_new.contains(&l) {
                        continue;
                    }
                    let _ = l.units.set(step.units);
                    let ok = match verdicts.get(&l) {
                        Some(v) => *v,
                        None => {
                            let v = decide_step(&l, g, pi)?;
                            verdicts.insert(l.clone(), v);
                            v
                        }
                    };
                    if ok && !omega_new.contains(&l) && in_gamma.insert(l.clone()) {
                        gamma.push(l);
                    }
                }
            }
        }
        omega = omega_new.into_iter().collect();
        omega.sort();
    }
    omega.reverse();
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts() {
        let k = residue_field_of(&RingInteger::from_int(BaseField::Q, 3)).unwrap();
        assert_eq!(subspaces(&k, 4, 1).len(), 40);
        assert_eq!(subspaces(&k, 4, 2).len(), 130);
        assert_eq!(subspaces(&k, 3, 1).len(), 13);
        let k4 = residue_field_of(&RingInteger::from_int(BaseField::Sqrt5, 2)).unwrap();
        assert_eq!(subspaces(&k4, 4, 2).len(), 357);
    }
}
