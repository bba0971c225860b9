//! Incremental integer echelon form of a relation lattice, tracking how each
//! echelon row is built from the original relations so that membership
//! answers come with an explicit integer combination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type BigRow = Vec<(usize, BigInt)>;

/// `dst + q * src` on sorted sparse rows.
pub fn axpy(dst: &BigRow, q: &BigInt, src: &BigRow) -> BigRow {
    if q.is_zero() {
        return dst.clone();
    }
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j == src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i].clone());
            i += 1;
        } else if i == dst.len() || src[j].0 < dst[i].0 {
            out.push((src[j].0, q * &src[j].1));
            j += 1;
        } else {
            let v = &dst[i].1 + q * &src[j].1;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale(a: &BigRow, k: &BigInt) -> BigRow {
    if k.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(c, v)| (*c, v * k)).collect()
}

/// `x * a + y * b`.
fn combine(x: &BigInt, a: &BigRow, y: &BigInt, b: &BigRow) -> BigRow {
    axpy(&scale(a, x), y, b)
}

#[derive(Clone, Debug)]
struct EchelonRow {
    vec: BigRow,
    combo: BigRow,
}

#[derive(Clone, Debug, Default)]
pub struct Lattice {
    pivots: BTreeMap<usize, EchelonRow>,
}

impl Lattice {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds relation number `index` with the given sorted entries.
    pub fn insert(&mut self, index: usize, row: &[(usize, i64)]) {
        let vec: BigRow = row.iter().map(|&(c, v)| (c, BigInt::from(v))).collect();
        let combo = vec![(index, BigInt::one())];
        self.insert_row(EchelonRow { vec, combo });
    }

    fn insert_row(&mut self, mut r: EchelonRow) {
        loop {
            let Some((c, b)) = r.vec.first().cloned() else { return };
            let Some(e) = self.pivots.get(&c) else {
                if b.is_negative() {
                    r.vec = scale(&r.vec, &-BigInt::one());
                    r.combo = scale(&r.combo, &-BigInt::one());
                }
                self.pivots.insert(c, r);
                return;
            };
            let a = e.vec[0].1.clone();
            if (&b % &a).is_zero() {
                let q = -(&b / &a);
                r.vec = axpy(&r.vec, &q, &e.vec);
                r.combo = axpy(&r.combo, &q, &e.combo);
                continue;
            }
            let eg = a.extended_gcd(&b);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let new_pivot = EchelonRow {
                vec: combine(&s, &e.vec, &t, &r.vec),
                combo: combine(&s, &e.combo, &t, &r.combo),
            };
            let (ba, ab) = (&b / &g, -(&a / &g));
            let rest = EchelonRow {
                vec: combine(&ba, &e.vec, &ab, &r.vec),
                combo: combine(&ba, &e.combo, &ab, &r.combo),
            };
            self.pivots.insert(c, new_pivot);
            r = rest;
        }
    }

    /// If `v` lies in the lattice, the combination of inserted relations
    /// (by index) that produces it.
    pub fn solve(&self, v: &BigRow) -> Option<BigRow> {
        let mut r = v.clone();
        let mut combo: BigRow = Vec::new();
        while let Some((c, b)) = r.first().cloned() {
            let e = self.pivots.get(&c)?;
            let a = &e.vec[0].1;
            if !(&b % a).is_zero() {
                return None;
            }
            let q = &b / a;
            r = axpy(&r, &-&q, &e.vec);
            combo = axpy(&combo, &q, &e.combo);
        }
        Some(combo)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[(usize, i64)]) -> BigRow {
        v.iter().map(|&(c, x)| (c, BigInt::from(x))).collect()
    }

    #[test]
    fn membership_with_combination() {
        let mut l = Lattice::new();
        l.insert(0, &[(0, 1), (1, 1)]);
        l.insert(1, &[(0, 1), (1, -1)]);
        let c = l.solve(&big(&[(0, 2)])).unwrap();
        assert_eq!(c, big(&[(0, 1), (1, 1)]));
        assert!(l.solve(&big(&[(0, 1)])).is_none());
        assert_eq!(l.solve(&Vec::new()).unwrap(), Vec::new());
    }

    #[test]
    fn gcd_merging() {
        let mut l = Lattice::new();
        l.insert(0, &[(0, 4)]);
        l.insert(1, &[(0, 6)]);
        let c = l.solve(&big(&[(0, 2)])).unwrap();
        // 2 = -1*4 + 1*6
        let total: BigInt = c.iter().map(|(i, k)| k * BigInt::from([4, 6][*i])).sum();
        assert_eq!(total, BigInt::from(2));
    }
}
