//! Sparse multivariate polynomials over a prime field `F_p`.
//!
//! Terms are kept in strictly decreasing lexicographic order of their
//! exponent vectors (variable 0 is the most significant), with no zero
//! coefficients, so structural equality is polynomial equality.

use std::collections::BTreeMap;

pub const MAX_VARS: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var_pow(var: usize, k: u16) -> Self {
        let mut e = [0; MAX_VARS];
        e[var] = k;
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, var: usize) -> u16 {
        self.0[var]
    }

    pub fn mul(self, other: Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = a.checked_add(b).expect("monomial exponent overflow");
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    fn quotient_of(&self, other: &Self) -> Self {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0) {
            *a -= b;
        }
        Monomial(e)
    }

    fn without(mut self, var: usize) -> Self {
        self.0[var] = 0;
        self
    }

    fn var_mask(&self) -> u32 {
        let mut m = 0;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                m |= 1 << i;
            }
        }
        m
    }
}

// --- arithmetic in F_p; p < 2^31 so products fit in u64 ---

#[inline]
pub(crate) fn addp(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
pub(crate) fn subp(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

#[inline]
pub(crate) fn mulp(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn invp(a: u32, p: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u32
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    p: u32,
    terms: Vec<(Monomial, u32)>,
}

impl Poly {
    pub fn zero(p: u32) -> Self {
        Poly { p, terms: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u32, c: i64) -> Self {
        let c = c.rem_euclid(p as i64) as u32;
        if c == 0 {
            Self::zero(p)
        } else {
            Poly { p, terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(p: u32, var: usize) -> Self {
        Poly { p, terms: vec![(Monomial::var_pow(var, 1), 1)] }
    }

    pub fn term(p: u32, m: Monomial, c: u32) -> Self {
        if c.is_multiple_of(p) {
            Self::zero(p)
        } else {
            Poly { p, terms: vec![(m, c % p)] }
        }
    }

    /// Builds a polynomial from unordered terms, merging duplicates.
    pub fn from_terms(p: u32, mut terms: Vec<(Monomial, u32)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            let c = c % p;
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = addp(last.1, c, p),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Poly { p, terms: out }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (Monomial::ONE, 1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> u32 {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => *c,
            _ => 0,
        }
    }

    pub fn leading(&self) -> Option<(Monomial, u32)> {
        self.terms.first().copied()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|t| t.0.exp(var)).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms (the order of vanishing at the origin).
    pub fn low_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).min().unwrap_or(0)
    }

    pub fn var_mask(&self) -> u32 {
        self.terms.iter().fold(0, |m, t| m | t.0.var_mask())
    }

    /// The homogeneous component of the given total degree.
    pub fn homogeneous_part(&self, deg: u32) -> Poly {
        Poly {
            p: self.p,
            terms: self.terms.iter().copied().filter(|t| t.0.degree() == deg).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        let p = self.p;
        Poly { p, terms: self.terms.iter().map(|&(m, c)| (m, p - c)).collect() }
    }

    pub fn scale(&self, c: u32) -> Poly {
        let p = self.p;
        let c = c % p;
        if c == 0 {
            return Poly::zero(p);
        }
        Poly { p, terms: self.terms.iter().map(|&(m, d)| (m, mulp(c, d, p))).collect() }
    }

    pub fn mul_term(&self, m: Monomial, c: u32) -> Poly {
        let p = self.p;
        if c.is_multiple_of(p) {
            return Poly::zero(p);
        }
        Poly { p, terms: self.terms.iter().map(|&(n, d)| (n.mul(m), mulp(c, d, p))).collect() }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let p = self.p;
        debug_assert_eq!(p, other.p);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        let fix = |c: u32| if negate { p - c } else { c };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, fix(b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { subp(a[i].1, b[j].1, p) } else { addp(a[i].1, b[j].1, p) };
                    if c != 0 {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(m, c)| (m, fix(c))));
        Poly { p, terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(p);
        }
        if self.is_constant() {
            return other.scale(self.terms[0].1);
        }
        if other.is_constant() {
            return self.scale(other.terms[0].1);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(m, c) in &self.terms {
            for &(n, d) in &other.terms {
                prods.push((m.mul(n), mulp(c, d, p)));
            }
        }
        Poly::from_terms(p, prods)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Scales so the lexicographically leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => self.clone(),
            Some(&(_, 1)) => self.clone(),
            Some(&(_, c)) => self.scale(invp(c, self.p)),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p;
        if self.is_zero() {
            return Some(Poly::zero(p));
        }
        let (lm, lc) = d.terms[0];
        let lc_inv = invp(lc, p);
        if d.is_constant() {
            return Some(self.scale(lc_inv));
        }
        let mask = self.var_mask() | d.var_mask();
        if mask.count_ones() == 1 {
            let v = mask.trailing_zeros() as usize;
            let (q, r) = dense_divrem(&self.to_dense(v), &d.to_dense(v), p);
            return if r.is_empty() { Some(Poly::from_dense(p, v, &q)) } else { None };
        }
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some(&(m, c)) = r.terms.first() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.quotient_of(&m);
            let qc = mulp(c, lc_inv, p);
            q.push((qm, qc));
            r = r.sub(&d.mul_term(qm, qc));
        }
        Some(Poly { p, terms: q })
    }

    /// Coefficients with respect to `var`, keyed by the exponent of `var`.
    fn coeffs_in(&self, var: usize) -> BTreeMap<u16, Poly> {
        let mut groups: BTreeMap<u16, Vec<(Monomial, u32)>> = BTreeMap::new();
        for &(m, c) in &self.terms {
            groups.entry(m.exp(var)).or_default().push((m.without(var), c));
        }
        groups.into_iter().map(|(k, ts)| (k, Poly::from_terms(self.p, ts))).collect()
    }

    fn lead_coeff_in(&self, var: usize) -> (u16, Poly) {
        let d = self.degree_in(var);
        let ts = self
            .terms
            .iter()
            .filter(|t| t.0.exp(var) == d)
            .map(|&(m, c)| (m.without(var), c))
            .collect();
        (d, Poly::from_terms(self.p, ts))
    }

    fn content_in(&self, var: usize) -> Poly {
        let mut acc = Poly::zero(self.p);
        for c in self.coeffs_in(var).into_values() {
            acc = Poly::gcd(&acc, &c);
            if acc.is_constant() {
                return Poly::one(self.p);
            }
        }
        acc
    }

    fn primitive_in(&self, var: usize) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    fn prem_in(&self, g: &Poly, var: usize) -> Poly {
        let (dg, lg) = g.lead_coeff_in(var);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dg {
            let (dr, lr) = r.lead_coeff_in(var);
            let shift = Monomial::var_pow(var, dr - dg);
            r = r.mul(&lg).sub(&lr.mul(g).mul_term(shift, 1));
        }
        r
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let p = a.p;
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one(p);
        }
        let (ma, mb) = (a.var_mask(), b.var_mask());
        let mask = ma | mb;
        if mask.count_ones() == 1 {
            let v = mask.trailing_zeros() as usize;
            let g = dense_gcd(a.to_dense(v), b.to_dense(v), p);
            return Poly::from_dense(p, v, &g);
        }
        let v = mask.trailing_zeros() as usize;
        if ma & (1 << v) == 0 {
            return Poly::gcd(a, &b.content_in(v));
        }
        if mb & (1 << v) == 0 {
            return Poly::gcd(&a.content_in(v), b);
        }
        let (ca, cb) = (a.content_in(v), b.content_in(v));
        let c = Poly::gcd(&ca, &cb);
        let mut f = a.div_exact(&ca).expect("content divides");
        let mut g = b.div_exact(&cb).expect("content divides");
        if f.degree_in(v) < g.degree_in(v) {
            std::mem::swap(&mut f, &mut g);
        }
        loop {
            let r = f.prem_in(&g, v);
            if r.is_zero() {
                break;
            }
            if r.degree_in(v) == 0 {
                g = Poly::one(p);
                break;
            }
            f = g;
            g = r.primitive_in(v);
        }
        c.mul(&g.primitive_in(v)).monic()
    }

    /// Replaces `var` by the polynomial `q`.
    pub fn substitute(&self, var: usize, q: &Poly) -> Poly {
        let p = self.p;
        let mut powers = vec![Poly::one(p)];
        let mut acc = Poly::zero(p);
        for &(m, c) in &self.terms {
            let e = m.exp(var) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(q);
                powers.push(next);
            }
            acc = acc.add(&powers[e].mul_term(m.without(var), c));
        }
        acc
    }

    /// Multiplicity of the (non-constant) factor `f` in `self`, with the cofactor.
    pub fn split_factor(&self, f: &Poly) -> (u32, Poly) {
        let mut k = 0;
        let mut rest = self.clone();
        if rest.is_zero() || f.is_constant() {
            return (0, rest);
        }
        while let Some(q) = rest.div_exact(f) {
            rest = q;
            k += 1;
        }
        (k, rest)
    }

    fn to_dense(&self, var: usize) -> Vec<u32> {
        let mut out = vec![0; self.degree_in(var) as usize + 1];
        for &(m, c) in &self.terms {
            out[m.exp(var) as usize] = c;
        }
        trim(&mut out);
        out
    }

    fn from_dense(p: u32, var: usize, coeffs: &[u32]) -> Poly {
        let terms = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (Monomial::var_pow(var, k as u16), c))
            .collect();
        Poly { p, terms }
    }

    /// Renders with the given variable names, e.g. `3*x^2*y+x+6`.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, &(m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push('+');
            }
            let mut factors = Vec::new();
            if c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Dense univariate division with remainder; `b` must be non-zero.
fn dense_divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let inv = invp(b[db], p);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = mulp(r[k + db], inv, p);
        q[k] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = subp(r[k + j], mulp(c, bj, p), p);
            }
        }
    }
    r.truncate(db);
    trim(&mut r);
    (q, r)
}

fn dense_gcd(mut a: Vec<u32>, mut b: Vec<u32>, p: u32) -> Vec<u32> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = dense_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lc) = a.last() {
        let inv = invp(lc, p);
        for c in a.iter_mut() {
            *c = mulp(*c, inv, p);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(7, 0)
    }
    fn y() -> Poly {
        Poly::var(7, 1)
    }
    fn c(k: i64) -> Poly {
        Poly::constant(7, k)
    }

    #[test]
    fn univariate_gcd_and_division() {
        // (x+1)(x+2) and (x+1)(x+3)
        let a = x().add(&c(1)).mul(&x().add(&c(2)));
        let b = x().add(&c(1)).mul(&x().add(&c(3)));
        assert_eq!(Poly::gcd(&a, &b), x().add(&c(1)));
        assert_eq!(a.div_exact(&x().add(&c(1))), Some(x().add(&c(2))));
        assert_eq!(a.div_exact(&x().add(&c(3))), None);
    }

    #[test]
    fn bivariate_gcd() {
        let g = x().add(&y()).add(&c(2));
        let a = g.mul(&x().sub(&y()));
        let b = g.mul(&x().mul(&y()).add(&c(1)));
        assert_eq!(Poly::gcd(&a, &b), g.monic());
        let h = x().mul(&y());
        assert_eq!(Poly::gcd(&h.mul(&x()), &h.mul(&y())), h);
        assert!(Poly::gcd(&x(), &y()).is_one());
    }

    #[test]
    fn substitution_and_factor_splitting() {
        let f = x().pow(3).mul(&c(2).add(&x()));
        assert_eq!(f.split_factor(&x()), (3, c(2).add(&x())));
        let g = x().mul(&y()).add(&y());
        assert_eq!(g.substitute(1, &c(0)), c(0));
        assert_eq!(g.substitute(0, &y()), y().mul(&y()).add(&y()));
    }

    #[test]
    fn lex_order_puts_x_first() {
        let f = y().pow(5).add(&x());
        assert_eq!(f.leading().unwrap().0, Monomial::var_pow(0, 1));
        assert_eq!(f.render(&["x".into(), "y".into()]), "x+y^5");
    }

    #[test]
    fn inverse_mod_p() {
        for a in 1..7 {
            assert_eq!(mulp(a, invp(a, 7), 7), 1);
        }
    }
}
