//! Full-rank lattices and orders inside a quaternion algebra.
//!
//! A lattice is stored as `(1/den)·rowspan(H)` where `H` is the row Hermite
//! normal form over the Q-basis ω^c·{1,i,j,k}. Both parts are canonical, so
//! structural equality is lattice equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linalg;
use crate::numbers::{canonical_associate, euclid_gcd, BaseField, FieldElement, RingInteger};
use crate::quat::{QuatError, Quaternion, QuaternionAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("lattice is not O_K-stable")]
    NotStable,
    #[error("lattice is not contained in the other")]
    NotContained,
    #[error("{0} is not integral")]
    NotIntegral(String),
    #[error("lattice is not an order")]
    NotAnOrder,
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Quat(#[from] QuatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug)]
struct OkData {
    basis: Vec<Quaternion>,
    inv: Vec<Vec<FieldElement>>,
}

pub struct Lattice {
    alg: Arc<QuaternionAlgebra>,
    den: BigInt,
    hnf: Vec<Vec<BigInt>>,
    ok_stable: bool,
    ok: OnceLock<OkData>,
}

impl Clone for Lattice {
    fn clone(&self) -> Self {
        Lattice {
            alg: self.alg.clone(),
            den: self.den.clone(),
            hnf: self.hnf.clone(),
            ok_stable: self.ok_stable,
            ok: OnceLock::new(),
        }
    }
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.den == o.den && self.hnf == o.hnf && self.alg == o.alg
    }
}

impl Eq for Lattice {}

impl Hash for Lattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.den.hash(state);
        self.hnf.hash(state);
    }
}

impl PartialOrd for Lattice {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sort key: covolume first (larger lattices first), then the normal form.
impl Ord for Lattice {
    fn cmp(&self, o: &Self) -> Ordering {
        o.covolume().cmp(&self.covolume()).then_with(|| self.den.cmp(&o.den)).then_with(|| self.hnf.cmp(&o.hnf))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(den={}, hnf={:?})", self.den, self.hnf)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self.ok_basis() {
            Ok(b) => b.iter().map(|q| q.to_string()).collect(),
            Err(_) => self.basis().iter().map(|q| q.to_string()).collect(),
        };
        let sep = if self.ok_stable { "O_K<" } else { "Z<" };
        write!(f, "{sep}{}>", parts.join(", "))
    }
}

fn lcm_denominators<'a>(vals: impl Iterator<Item = &'a BigRational>) -> BigInt {
    vals.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

impl Lattice {
    /// Lattice spanned by rational coordinate rows.
    pub fn from_rational_rows(
        alg: &Arc<QuaternionAlgebra>,
        rows: &[Vec<BigRational>],
    ) -> Result<Lattice, LatticeError> {
        let n = alg.rank();
        let d = lcm_denominators(rows.iter().flatten());
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect())
            .collect();
        let h = linalg::hnf(&int_rows, n).ok_or(LatticeError::RankDeficient)?;
        let content = h.iter().flatten().fold(d.clone(), |g, x| g.gcd(x));
        let den = &d / &content;
        let hnf: Vec<Vec<BigInt>> = h.into_iter().map(|r| r.into_iter().map(|x| x / &content).collect()).collect();
        let mut lat = Lattice { alg: alg.clone(), den, hnf, ok_stable: false, ok: OnceLock::new() };
        lat.ok_stable = lat.compute_ok_stable();
        Ok(lat)
    }

    /// Canonical lattice spanned by `gens`; with `ok_span` the ω-multiples
    /// are adjoined so the result is the O_K-span.
    pub fn canonicalize(
        alg: &Arc<QuaternionAlgebra>,
        gens: &[Quaternion],
        ok_span: bool,
    ) -> Result<Lattice, LatticeError> {
        let mut rows: Vec<Vec<BigRational>> = gens.iter().map(|q| q.to_rational_vec()).collect();
        if ok_span && alg.field() != BaseField::Q {
            let w = FieldElement::omega(alg.field());
            rows.extend(gens.iter().map(|q| q.scale(&w).to_rational_vec()));
        }
        Self::from_rational_rows(alg, &rows)
    }

    fn compute_ok_stable(&self) -> bool {
        if self.alg.field() == BaseField::Q {
            return true;
        }
        let w = FieldElement::omega(self.alg.field());
        self.basis().iter().all(|b| self.contains(&b.scale(&w)))
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        &self.alg
    }

    pub fn field(&self) -> BaseField {
        self.alg.field()
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    pub fn is_ok_stable(&self) -> bool {
        self.ok_stable
    }

    pub fn rational_rows(&self) -> Vec<Vec<BigRational>> {
        self.hnf.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()).collect()
    }

    /// Z-basis (the rows of the normal form).
    pub fn basis(&self) -> Vec<Quaternion> {
        self.rational_rows().iter().map(|r| Quaternion::from_rational_vec(&self.alg, r)).collect()
    }

    /// |det| of the basis matrix; [L:M]_Z = covolume(M)/covolume(L).
    pub fn covolume(&self) -> BigRational {
        let p: BigInt = self.hnf.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        BigRational::new(p, num_traits::pow(self.den.clone(), self.rank()))
    }

    /// Integer coordinates of `q` in the Z-basis.
    pub fn coordinates(&self, q: &Quaternion) -> Option<Vec<BigInt>> {
        let v: Vec<BigRational> = q.to_rational_vec();
        let dq = BigRational::from_integer(self.den.clone());
        let mut w = Vec::with_capacity(v.len());
        for x in v {
            let y = x * &dq;
            if !y.is_integer() {
                return None;
            }
            w.push(y.to_integer());
        }
        linalg::hnf_solve(&self.hnf, &w)
    }

    pub fn contains(&self, q: &Quaternion) -> bool {
        self.coordinates(q).is_some()
    }

    pub fn contains_lattice(&self, o: &Lattice) -> bool {
        o.basis().iter().all(|q| self.contains(q))
    }

    /// [self : sub]_Z for a sublattice.
    pub fn z_index(&self, sub: &Lattice) -> Result<BigInt, LatticeError> {
        if !self.contains_lattice(sub) {
            return Err(LatticeError::NotContained);
        }
        Ok((sub.covolume() / self.covolume()).to_integer())
    }

    fn ok_data(&self) -> Result<&OkData, LatticeError> {
        if !self.ok_stable {
            return Err(LatticeError::NotStable);
        }
        Ok(self.ok.get_or_init(|| {
            let f = self.field();
            let d = f.degree();
            let rows: Vec<Vec<RingInteger>> = self
                .hnf
                .iter()
                .map(|r| {
                    (0..4)
                        .map(|m| {
                            let b = if d == 2 { r[m * d + 1].clone() } else { BigInt::zero() };
                            RingInteger::new(f, r[m * d].clone(), b)
                        })
                        .collect()
                })
                .collect();
            let h = linalg::ok_hnf(&rows, 4).expect("full-rank O_K-lattice");
            let inv_den = FieldElement::new(f, BigRational::new(BigInt::one(), self.den.clone()), BigRational::zero());
            let basis: Vec<Quaternion> = h
                .iter()
                .map(|r| {
                    let [t, x, y, z] = std::array::from_fn(|m| &r[m].to_field() * &inv_den);
                    Quaternion::new(&self.alg, t, x, y, z)
                })
                .collect();
            let mat: Vec<Vec<FieldElement>> = basis.iter().map(|q| q.coords().to_vec()).collect();
            let inv = linalg::field_inverse(&mat).expect("O_K-basis is invertible");
            OkData { basis, inv }
        }))
    }

    /// An O_K-basis (4 quaternions); requires O_K-stability.
    pub fn ok_basis(&self) -> Result<&[Quaternion], LatticeError> {
        Ok(&self.ok_data()?.basis)
    }

    /// K-coordinates of `q` in the O_K-basis.
    pub fn ok_coordinates(&self, q: &Quaternion) -> Result<Vec<FieldElement>, LatticeError> {
        let data = self.ok_data()?;
        let c = q.coords();
        Ok((0..4)
            .map(|j| (0..4).fold(FieldElement::zero(self.field()), |acc, m| &acc + &(&c[m] * &data.inv[m][j])))
            .collect())
    }

    fn ok_matrix(&self) -> Result<Vec<Vec<FieldElement>>, LatticeError> {
        Ok(self.ok_basis()?.iter().map(|q| q.coords().to_vec()).collect())
    }

    pub fn sum(&self, o: &Lattice) -> Lattice {
        let mut rows = self.rational_rows();
        rows.extend(o.rational_rows());
        Lattice::from_rational_rows(&self.alg, &rows).expect("sum of full-rank lattices")
    }

    /// Z-span of all products x·y with x ∈ self, y ∈ o.
    pub fn product(&self, o: &Lattice) -> Lattice {
        let (a, b) = (self.basis(), o.basis());
        let gens: Vec<Quaternion> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Lattice::canonicalize(&self.alg, &gens, false).expect("product of full-rank lattices")
    }

    /// q·L (Left) or L·q (Right).
    pub fn scale(&self, q: &Quaternion, side: Side) -> Result<Lattice, LatticeError> {
        let gens: Vec<Quaternion> = self
            .basis()
            .iter()
            .map(|b| match side {
                Side::Left => q * b,
                Side::Right => b * q,
            })
            .collect();
        Lattice::canonicalize(&self.alg, &gens, false)
    }

    pub fn scale_scalar(&self, s: &FieldElement) -> Result<Lattice, LatticeError> {
        self.scale(&Quaternion::scalar(&self.alg, s.clone()), Side::Left)
    }

    /// {x : b·x ∈ Z for every row b}, dual with respect to the coordinate
    /// dot product.
    pub fn coordinate_dual(&self) -> Lattice {
        let inv = linalg::rat_inverse(&self.rational_rows()).expect("full rank");
        Lattice::from_rational_rows(&self.alg, &linalg::rat_transpose(&inv)).expect("full rank")
    }

    pub fn intersection(&self, o: &Lattice) -> Lattice {
        self.coordinate_dual().sum(&o.coordinate_dual()).coordinate_dual()
    }
}

/// Matrix (acting on column coordinate vectors) of x ↦ q·x or x ↦ x·q.
fn mult_matrix(q: &Quaternion, side: Side) -> Vec<Vec<BigRational>> {
    let alg = q.algebra();
    let n = alg.rank();
    let cols: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let e: Vec<BigRational> =
                (0..n).map(|k| if k == j { BigRational::one() } else { BigRational::zero() }).collect();
            let ej = Quaternion::from_rational_vec(alg, &e);
            match side {
                Side::Left => q * &ej,
                Side::Right => &ej * q,
            }
            .to_rational_vec()
        })
        .collect();
    linalg::rat_transpose(&cols)
}

/// {x : A(x) ∈ target for every A in `maps`}.
fn preimage(target: &Lattice, maps: &[Vec<Vec<BigRational>>]) -> Lattice {
    let n = target.rank();
    // x ∈ preimage  ⇔  (Bc⁻¹·A)·x ∈ Zⁿ with Bc the column basis of target.
    let bt_inv = linalg::rat_inverse(&target.rational_rows()).expect("full rank");
    let bc_inv = linalg::rat_transpose(&bt_inv);
    let mut rows = Vec::with_capacity(n * maps.len());
    for a in maps {
        for r in 0..n {
            rows.push(
                (0..n)
                    .map(|c| (0..n).fold(BigRational::zero(), |acc, k| acc + &bc_inv[r][k] * &a[k][c]))
                    .collect::<Vec<_>>(),
            );
        }
    }
    Lattice::from_rational_rows(&target.alg, &rows).expect("full rank").coordinate_dual()
}

/// (L : M)_R = {x : M·x ⊆ L}.
pub fn colon_right(l: &Lattice, m: &Lattice) -> Lattice {
    let maps: Vec<_> = m.basis().iter().map(|h| mult_matrix(h, Side::Left)).collect();
    preimage(l, &maps)
}

/// (L : M)_L = {x : x·M ⊆ L}.
pub fn colon_left(l: &Lattice, m: &Lattice) -> Lattice {
    let maps: Vec<_> = m.basis().iter().map(|h| mult_matrix(h, Side::Right)).collect();
    preimage(l, &maps)
}

pub fn is_order(l: &Lattice) -> bool {
    if !l.contains(&Quaternion::one(&l.alg)) || !l.is_ok_stable() {
        return false;
    }
    let b = l.basis();
    b.iter().all(|x| b.iter().all(|y| l.contains(&(x * y))))
}

/// {x : x·L ⊆ L}.
pub fn left_order(l: &Lattice) -> Order {
    Order::new(colon_left(l, l)).expect("left order of a lattice is an order")
}

/// {x : L·x ⊆ L}.
pub fn right_order(l: &Lattice) -> Order {
    Order::new(colon_right(l, l)).expect("right order of a lattice is an order")
}

/// Canonical generator of [L:M]_{O_K}.
pub fn index_ideal(l: &Lattice, m: &Lattice) -> Result<RingInteger, LatticeError> {
    let dl = linalg::field_det(&l.ok_matrix()?);
    let dm = linalg::field_det(&m.ok_matrix()?);
    let q = &dm * &dl.inv().expect("nonzero determinant");
    let r = q.to_ring_integer().ok_or_else(|| LatticeError::NotIntegral(q.to_string()))?;
    Ok(canonical_associate(&r))
}

/// Canonical generator of discrd(L), the ideal generated by
/// trd((x₁x₂ − x₂x₁)·conj(x₃)).
pub fn reduced_discriminant(l: &Lattice) -> Result<RingInteger, LatticeError> {
    let b = l.ok_basis()?;
    let f = l.field();
    let mut vals = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let c = &(&b[i] * &b[j]) - &(&b[j] * &b[i]);
            for x3 in b {
                vals.push((&c * &x3.conj()).trd());
            }
        }
    }
    let n = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator()));
    let nf = FieldElement::from_int(f, 1).scale(&BigRational::from_integer(n.clone()));
    let g = vals.iter().map(|v| (v * &nf).to_ring_integer().unwrap()).fold(RingInteger::zero(f), |g, v| {
        if g.is_zero() {
            canonical_associate(&v)
        } else {
            euclid_gcd(&g, &v)
        }
    });
    let r = RingInteger::from_bigint(f, n);
    let q = g.div_exact(&r).ok_or_else(|| LatticeError::NotIntegral(format!("({g})/{}", r)))?;
    Ok(canonical_associate(&q))
}

pub fn lattice_sum(l: &Lattice, m: &Lattice) -> Lattice {
    l.sum(m)
}

pub fn lattice_product(l: &Lattice, m: &Lattice) -> Lattice {
    l.product(m)
}

pub fn contains(l: &Lattice, q: &Quaternion) -> bool {
    l.contains(q)
}

/// An order: a unital subring that is an O_K-lattice.
#[derive(Clone)]
pub struct Order {
    lat: Lattice,
    pub(crate) units: Arc<OnceLock<Vec<Quaternion>>>,
    pub(crate) form: Arc<OnceLock<crate::enumerate::TraceForm>>,
}

impl PartialEq for Order {
    fn eq(&self, o: &Self) -> bool {
        self.lat == o.lat
    }
}

impl Eq for Order {}

impl Hash for Order {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lat.hash(state)
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Order {
    fn cmp(&self, o: &Self) -> Ordering {
        self.lat.cmp(&o.lat)
    }
}

impl fmt::Debug for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Order({:?})", self.lat)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.lat.fmt(f)
    }
}

impl std::ops::Deref for Order {
    type Target = Lattice;
    fn deref(&self) -> &Lattice {
        &self.lat
    }
}

impl Order {
    pub fn new(lat: Lattice) -> Result<Order, LatticeError> {
        if !is_order(&lat) {
            return Err(LatticeError::NotAnOrder);
        }
        Ok(Order { lat, units: Arc::new(OnceLock::new()), form: Arc::new(OnceLock::new()) })
    }

    /// O_K-span of `gens`, checked to be an order.
    pub fn from_generators(alg: &Arc<QuaternionAlgebra>, gens: &[Quaternion]) -> Result<Order, LatticeError> {
        Order::new(Lattice::canonicalize(alg, gens, true)?)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    pub fn into_lattice(self) -> Lattice {
        self.lat
    }

    /// Text in the order-file format.
    pub fn to_order_file(&self) -> String {
        let alg = self.algebra();
        let mut s = format!("field: {}\nalgebra: a={} b={}\nbasis:\n", alg.field(), alg.a(), alg.b());
        for q in self.ok_basis().expect("orders are O_K-stable") {
            s.push_str(&q.to_string());
            s.push('\n');
        }
        s
    }
}

/// Parses the order-file format:
///
/// ```text
/// field: Q | Q(sqrt2) | Q(sqrt5)
/// algebra: a=<fieldelem> b=<fieldelem>
/// basis:
/// <quaternion>   (four lines; the order is their O_K-span)
/// ```
///
/// Blank lines and `#` comments are ignored.
pub fn parse_order_file(text: &str) -> Result<Order, LatticeError> {
    let perr = |line: usize, col: usize, msg: &str| LatticeError::Parse { line, col, msg: msg.to_string() };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut it = lines.into_iter();
    let (ln, l) = it.next().ok_or_else(|| perr(1, 1, "empty order file"))?;
    let rest = l.trim().strip_prefix("field:").ok_or_else(|| perr(ln, 1, "expected 'field:'"))?;
    let field: BaseField = rest.parse().map_err(|_| perr(ln, 8, "unknown field"))?;

    let (ln, l) = it.next().ok_or_else(|| perr(ln + 1, 1, "expected 'algebra:'"))?;
    let rest = l.trim().strip_prefix("algebra:").ok_or_else(|| perr(ln, 1, "expected 'algebra:'"))?;
    let rest = rest.trim();
    let a_pos = rest.find("a=").ok_or_else(|| perr(ln, 10, "expected 'a='"))?;
    let b_pos = rest.find("b=").ok_or_else(|| perr(ln, 10, "expected 'b='"))?;
    if b_pos < a_pos {
        return Err(perr(ln, 10, "expected 'a=' before 'b='"));
    }
    let col_of = |p: usize| l.find(rest).unwrap_or(0) + p + 3;
    let a = FieldElement::parse(field, &rest[a_pos + 2..b_pos]).map_err(|e| perr(ln, col_of(a_pos), &e.to_string()))?;
    let b = FieldElement::parse(field, &rest[b_pos + 2..]).map_err(|e| perr(ln, col_of(b_pos), &e.to_string()))?;
    let alg = QuaternionAlgebra::new(a, b).map_err(|e| perr(ln, 1, &e.to_string()))?;

    let (ln, l) = it.next().ok_or_else(|| perr(ln + 1, 1, "expected 'basis:'"))?;
    if l.trim() != "basis:" {
        return Err(perr(ln, 1, "expected 'basis:'"));
    }
    let mut gens = Vec::new();
    let mut last = ln;
    for (ln, l) in it {
        let q = Quaternion::parse(&alg, l).map_err(|e| match e {
            QuatError::Parse(crate::numbers::NumberError::Parse { col, msg }) => perr(ln, col, &msg),
            other => perr(ln, 1, &other.to_string()),
        })?;
        gens.push(q);
        last = ln;
    }
    if gens.len() != 4 {
        return Err(perr(last, 1, &format!("expected 4 basis lines, found {}", gens.len())));
    }
    let lat = Lattice::canonicalize(&alg, &gens, true).map_err(|e| perr(last, 1, &e.to_string()))?;
    Order::new(lat).map_err(|e| perr(last, 1, &e.to_string()))
}
