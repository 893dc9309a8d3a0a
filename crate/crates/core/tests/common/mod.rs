//! Box-search oracle shared by the integration tests.
//!
//! Candidates are enumerated coordinate by coordinate in the standard basis
//! 1, i, j, k with an exact integer bound on each diagonal term, then filtered
//! by exact reduced norm and lattice membership. It shares no code with the
//! Fincke–Pohst enumerator.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use quatlat::lattice::Order;
use quatlat::numbers::{BaseField, FieldElement, RingInteger};
use quatlat::quat::Quaternion;

/// (p, q) standing for p + q·ω.
type Pair = (i64, i64);

fn mul(f: BaseField, x: Pair, y: Pair) -> Pair {
    let (s, t) = f.omega_poly();
    (x.0 * y.0 + t * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + s * x.1 * y.1)
}

fn trace(f: BaseField, x: Pair) -> i64 {
    let (s, _) = f.omega_poly();
    if f == BaseField::Q {
        x.0
    } else {
        2 * x.0 + s * x.1
    }
}

fn embeddings(f: BaseField) -> (f64, f64) {
    match f {
        BaseField::Q => (0.0, 0.0),
        BaseField::Sqrt2 => (2f64.sqrt(), -(2f64.sqrt())),
        BaseField::Sqrt5 => ((1.0 + 5f64.sqrt()) / 2.0, (1.0 - 5f64.sqrt()) / 2.0),
    }
}

fn pair_of(x: &FieldElement) -> Pair {
    let r = x.to_ring_integer().expect("integral structure constant");
    (r.a().to_i64().unwrap(), r.b().to_i64().unwrap())
}

/// Every q ∈ O with nrd(q) = α, found by box search.
pub fn brute_representations(o: &Order, alpha: &RingInteger) -> Vec<Quaternion> {
    let alg = o.algebra();
    let f = alg.field();
    let d = o.denominator().to_i64().unwrap();
    let a = pair_of(alg.a());
    let b = pair_of(alg.b());
    let coef = [(1, 0), (-a.0, -a.1), (-b.0, -b.1), mul(f, a, b)];
    let t_alpha = alpha.tr().to_i64().unwrap();
    let limit = t_alpha * d * d;
    let (w1, w2) = embeddings(f);
    // Candidate numerators y (x = y/d) per slot with Tr(c·y²) ≤ limit.
    let slots: Vec<Vec<(Pair, i64)>> = coef
        .iter()
        .map(|&c| {
            let cmin = if f == BaseField::Q {
                c.0 as f64
            } else {
                (c.0 as f64 + c.1 as f64 * w1).min(c.0 as f64 + c.1 as f64 * w2)
            };
            let y = (limit as f64 / cmin).sqrt() + 1.0;
            let (qmax, pmax) = if f == BaseField::Q {
                (0, y.ceil() as i64)
            } else {
                let q = (2.0 * y / (w1 - w2).abs()).ceil() as i64 + 1;
                (q, (y + q as f64 * w1.abs().max(w2.abs())).ceil() as i64 + 1)
            };
            let mut out = Vec::new();
            for q in -qmax..=qmax {
                for p in -pmax..=pmax {
                    let v = mul(f, c, mul(f, (p, q), (p, q)));
                    let tr = trace(f, v);
                    if tr <= limit {
                        out.push(((p, q), tr));
                    }
                }
            }
            out
        })
        .collect();
    let target = (alpha.a().to_i64().unwrap() * d * d, alpha.b().to_i64().unwrap() * d * d);
    let mut out = Vec::new();
    let fe = |y: Pair| {
        FieldElement::new(
            f,
            BigRational::new(BigInt::from(y.0), BigInt::from(d)),
            BigRational::new(BigInt::from(y.1), BigInt::from(d)),
        )
    };
    for &(y0, t0) in &slots[0] {
        for &(y1, t1) in &slots[1] {
            if t0 + t1 > limit {
                continue;
            }
            for &(y2, t2) in &slots[2] {
                if t0 + t1 + t2 > limit {
                    continue;
                }
                for &(y3, t3) in &slots[3] {
                    if t0 + t1 + t2 + t3 != limit {
                        continue;
                    }
                    let ys = [y0, y1, y2, y3];
                    let mut n = (0, 0);
                    for m in 0..4 {
                        let v = mul(f, coef[m], mul(f, ys[m], ys[m]));
                        n = (n.0 + v.0, n.1 + v.1);
                    }
                    if n != target {
                        continue;
                    }
                    let q = Quaternion::new(alg, fe(y0), fe(y1), fe(y2), fe(y3));
                    if o.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

pub fn sorted_strings(v: &[Quaternion]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    s.sort();
    s
}
