//! Normal forms and small exact matrix routines shared by the lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numbers::{canonical_associate_with_unit, euclid_div, ext_gcd, FieldElement, RingInteger};

/// Row-style Hermite normal form of the Z-span of `rows`.
///
/// Row i has its pivot in column i, zeros to the left, a positive pivot and
/// entries above each pivot reduced into [0, pivot). `None` if the span has
/// rank below `n`.
pub fn hnf(rows: &[Vec<BigInt>], n: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut basis: Vec<Option<Vec<BigInt>>> = vec![None; n];
    for row in rows {
        let mut v = row.clone();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            match basis[i].take() {
                None => {
                    if v[i].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    basis[i] = Some(v);
                    break;
                }
                Some(b) => {
                    let e = b[i].extended_gcd(&v[i]);
                    let (g, x, y) = (e.gcd, e.x, e.y);
                    let bi = &b[i] / &g;
                    let vi = &v[i] / &g;
                    let nb: Vec<BigInt> = (0..n).map(|k| &x * &b[k] + &y * &v[k]).collect();
                    let nv: Vec<BigInt> = (0..n).map(|k| &vi * &b[k] - &bi * &v[k]).collect();
                    basis[i] = Some(nb);
                    v = nv;
                    // Keep the running row short.
                    for k in i + 1..n {
                        if let Some(bk) = &basis[k] {
                            let q = v[k].div_floor(&bk[k]);
                            if !q.is_zero() {
                                for c in k..n {
                                    v[c] -= &q * &bk[c];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut h: Vec<Vec<BigInt>> = basis.into_iter().collect::<Option<_>>()?;
    for i in 0..n {
        if h[i][i].is_negative() {
            h[i].iter_mut().for_each(|x| *x = -&*x);
        }
        for r in 0..i {
            let q = h[r][i].div_floor(&h[i][i]);
            if !q.is_zero() {
                let (top, bot) = h.split_at_mut(i);
                for c in i..n {
                    top[r][c] -= &q * &bot[0][c];
                }
            }
        }
    }
    Some(h)
}

/// Integer coordinates of `v` in an HNF basis, if `v` lies in its span.
pub fn hnf_solve(h: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut w = v.to_vec();
    let mut c = vec![BigInt::zero(); n];
    for i in 0..n {
        let (q, r) = w[i].div_rem(&h[i][i]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for k in i..n {
                w[k] -= &q * &h[i][k];
            }
        }
        c[i] = q;
    }
    Some(c)
}

pub fn rat_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for k in 0..n {
            a[col][k] = &a[col][k] / &piv;
            inv[col][k] = &inv[col][k] / &piv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let (x, y) = (&a[col][k] * &f, &inv[col][k] * &f);
                    a[r][k] -= x;
                    inv[r][k] -= y;
                }
            }
        }
    }
    Some(inv)
}

pub fn rat_transpose(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    (0..m[0].len()).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn field_det(m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    let f = m[0][0].field();
    let mut a = m.to_vec();
    let mut det = FieldElement::one(f);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return FieldElement::zero(f);
        };
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        let inv = a[col][col].inv().unwrap();
        det = &det * &a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let fac = &a[r][col] * &inv;
                for k in col..n {
                    let x = &fac * &a[col][k];
                    a[r][k] = &a[r][k] - &x;
                }
            }
        }
    }
    det
}

pub fn field_inverse(m: &[Vec<FieldElement>]) -> Option<Vec<Vec<FieldElement>>> {
    let n = m.len();
    let f = m[0][0].field();
    let mut a = m.to_vec();
    let mut inv: Vec<Vec<FieldElement>> =
        (0..n).map(|i| (0..n).map(|j| FieldElement::from_int(f, (i == j) as i64)).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let pinv = a[col][col].inv().unwrap();
        for k in 0..n {
            a[col][k] = &a[col][k] * &pinv;
            inv[col][k] = &inv[col][k] * &pinv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let fac = a[r][col].clone();
                for k in 0..n {
                    let (x, y) = (&a[col][k] * &fac, &inv[col][k] * &fac);
                    a[r][k] = &a[r][k] - &x;
                    inv[r][k] = &inv[r][k] - &y;
                }
            }
        }
    }
    Some(inv)
}

/// Upper-triangular O_K-basis of the O_K-span of `rows` (n columns).
pub fn ok_hnf(rows: &[Vec<RingInteger>], n: usize) -> Option<Vec<Vec<RingInteger>>> {
    let mut basis: Vec<Option<Vec<RingInteger>>> = vec![None; n];
    for row in rows {
        let mut v = row.clone();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            match basis[i].take() {
                None => {
                    basis[i] = Some(v);
                    break;
                }
                Some(b) => {
                    let (g, x, y) = ext_gcd(&b[i], &v[i]);
                    let bi = b[i].div_exact(&g).unwrap();
                    let vi = v[i].div_exact(&g).unwrap();
                    let nb: Vec<RingInteger> = (0..n).map(|k| &(&x * &b[k]) + &(&y * &v[k])).collect();
                    let nv: Vec<RingInteger> = (0..n).map(|k| &(&vi * &b[k]) - &(&bi * &v[k])).collect();
                    basis[i] = Some(nb);
                    v = nv;
                }
            }
        }
    }
    let mut h: Vec<Vec<RingInteger>> = basis.into_iter().collect::<Option<_>>()?;
    for i in 0..n {
        let (_, eta) = canonical_associate_with_unit(&h[i][i]);
        h[i] = h[i].iter().map(|x| &eta * x).collect();
        for r in 0..i {
            let (q, _) = euclid_div(&h[r][i], &h[i][i]);
            if !q.is_zero() {
                let (top, bot) = h.split_at_mut(i);
                for c in i..n {
                    top[r][c] = &top[r][c] - &(&q * &bot[0][c]);
                }
            }
        }
    }
    Some(h)
}

/// Diagonal of a Smith form over O_K (canonical associates, unordered
/// divisibility not enforced).
pub fn ok_snf_diagonal(m: &[Vec<RingInteger>]) -> Vec<RingInteger> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize, BigInt)> = None;
            for r in t..n {
                for c in t..n {
                    if !a[r][c].is_zero() {
                        let nm = a[r][c].nm().abs();
                        if best.as_ref().is_none_or(|b| nm < b.2) {
                            best = Some((r, c, nm));
                        }
                    }
                }
            }
            let Some((r, c, _)) = best else {
                break;
            };
            a.swap(t, r);
            for row in a.iter_mut() {
                row.swap(t, c);
            }
            let mut clean = true;
            for r in t + 1..n {
                let (q, rem) = euclid_div(&a[r][t], &a[t][t]);
                if !q.is_zero() {
                    for k in t..n {
                        a[r][k] = &a[r][k] - &(&q * &a[t][k]);
                    }
                }
                clean &= rem.is_zero();
            }
            for c in t + 1..n {
                let (q, rem) = euclid_div(&a[t][c], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let x = &q * &row[t];
                        row[c] = &row[c] - &x;
                    }
                }
                clean &= rem.is_zero();
            }
            if clean {
                break;
            }
        }
        diag.push(canonical_associate_with_unit(&a[t][t]).0);
    }
    diag
}
