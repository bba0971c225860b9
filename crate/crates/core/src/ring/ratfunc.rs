//! Reduced fractions of polynomials over `F_p`, and the localised rings
//! `F_p[vars]_(vars)[1/t_1, ..., 1/t_k]` they are used to model.

use super::poly::{invp, Poly, MAX_VARS};
use crate::error::{Error, Result};

/// A fraction `num/den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        let p = num.modulus();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(p) };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        let lc = den.leading().unwrap().1;
        if lc == 1 {
            RatFunc { num, den }
        } else {
            let inv = invp(lc, p);
            RatFunc { num: num.scale(inv), den: den.scale(inv) }
        }
    }

    pub fn from_poly(num: Poly) -> Self {
        let p = num.modulus();
        RatFunc { num, den: Poly::one(p) }
    }

    pub fn constant(p: u32, c: i64) -> Self {
        Self::from_poly(Poly::constant(p, c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn modulus(&self) -> u32 {
        self.num.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        if other.den.is_one() {
            return RatFunc { num: self.num.add(&other.num.mul(&self.den)), den: self.den.clone() };
        }
        if self.den.is_one() {
            return RatFunc { num: other.num.add(&self.num.mul(&other.den)), den: other.den.clone() };
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::reduce(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.modulus();
        if self.is_zero() || other.is_zero() {
            return RatFunc { num: Poly::zero(p), den: Poly::one(p) };
        }
        let g1 = Poly::gcd(&self.num, &other.den);
        let g2 = Poly::gcd(&other.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), other.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        // Both denominators stay monic, so the product is already normalised.
        RatFunc { num: a.mul(&c), den: b.mul(&d) }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Some(RatFunc { num: base.num.pow(k), den: base.den.pow(k) }.renormalise())
    }

    fn renormalise(self) -> Self {
        Self::reduce(self.num, self.den)
    }

    pub fn substitute(&self, var: usize, q: &Poly) -> Result<Self> {
        Self::new(self.num.substitute(var, q), self.den.substitute(var, q))
    }

    pub fn render(&self, names: &[String]) -> String {
        let wrap = |p: &Poly| {
            let s = p.render(names);
            if p.terms().len() > 1 || (p.terms().len() == 1 && s.contains('*')) {
                format!("({s})")
            } else {
                s
            }
        };
        if self.den.is_one() {
            self.num.render(names)
        } else {
            format!("{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

/// `A_{t_1...t_k}` where `A = F_p[vars]` localised at the origin and each
/// `t_i` is a monic linear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFuncSpec {
    pub p: u32,
    pub vars: Vec<String>,
    pub inverted: Vec<Poly>,
}

pub(crate) fn is_prime(n: u64) -> bool {
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

impl RatFuncSpec {
    pub fn new(p: u32, vars: Vec<String>, inverted: Vec<Poly>) -> Result<Self> {
        if !is_prime(p as u64) || p >= 1 << 31 {
            return Err(Error::InvalidRing(format!("{p} is not a supported prime")));
        }
        if vars.is_empty() || vars.len() > MAX_VARS {
            return Err(Error::InvalidRing(format!("between 1 and {MAX_VARS} variables are supported")));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidRing(format!("duplicate variable {v}")));
            }
        }
        let mut params: Vec<Poly> = Vec::new();
        for t in inverted {
            if !is_linear_form(&t) {
                return Err(Error::InvalidRing(
                    "inverted elements must be non-zero linear forms vanishing at the origin".into(),
                ));
            }
            let t = t.monic();
            // Associated parameters collapse onto the earliest representative.
            if !params.contains(&t) {
                params.push(t);
            }
        }
        Ok(RatFuncSpec { p, vars, inverted: params })
    }

    /// Divides out every inverted parameter; returns the cofactor and the
    /// multiplicities in declared order.
    pub fn strip_params(&self, f: &Poly) -> (Poly, Vec<u32>) {
        let mut rest = f.clone();
        let mut mult = Vec::with_capacity(self.inverted.len());
        for t in &self.inverted {
            let (k, r) = rest.split_factor(t);
            mult.push(k);
            rest = r;
        }
        (rest, mult)
    }

    fn is_local_unit_times_params(&self, f: &Poly) -> bool {
        if f.is_zero() {
            return false;
        }
        if f.constant_term() != 0 {
            return true;
        }
        self.strip_params(f).0.constant_term() != 0
    }

    pub fn contains(&self, x: &RatFunc) -> bool {
        self.is_local_unit_times_params(x.den())
    }

    pub fn is_unit(&self, x: &RatFunc) -> bool {
        self.contains(x) && self.is_local_unit_times_params(x.num())
    }

    /// Writes a unit as `w * prod t_i^{e_i}` with `w` a unit of the local
    /// ring at the origin, peeling parameters in declared order.
    pub fn decompose_params(&self, x: &RatFunc) -> Option<(RatFunc, Vec<i64>)> {
        if !self.is_unit(x) {
            return None;
        }
        let (n, en) = self.strip_params(x.num());
        let (d, ed) = self.strip_params(x.den());
        let exps = en.iter().zip(&ed).map(|(&a, &b)| a as i64 - b as i64).collect();
        Some((RatFunc::new(n, d).ok()?, exps))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn with_inverted(&self, t: &Poly) -> Result<Self> {
        let mut inv = self.inverted.clone();
        inv.push(t.clone());
        Self::new(self.p, self.vars.clone(), inv)
    }

    pub fn without_inverted(&self, t: &Poly) -> Self {
        let t = t.monic();
        RatFuncSpec {
            p: self.p,
            vars: self.vars.clone(),
            inverted: self.inverted.iter().filter(|s| **s != t).cloned().collect(),
        }
    }
}

pub fn is_linear_form(t: &Poly) -> bool {
    !t.is_zero() && t.terms().iter().all(|(m, _)| m.degree() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(7, 0)
    }
    fn c(k: i64) -> Poly {
        Poly::constant(7, k)
    }

    #[test]
    fn reduction_matches_hand_gcd() {
        // (2x^3 + x^4) / (3 + x) is already reduced: x^3 (2 + x) / (3 + x)
        let num = x().pow(3).scale(2).add(&x().pow(4));
        let f = RatFunc::new(num.clone(), c(3).add(&x())).unwrap();
        assert_eq!(f.num(), &num);
        assert_eq!(f.den(), &c(3).add(&x()));
        // (x^2 + 3x) / (x^2 + x) = (x + 3) / (x + 1)
        let g = RatFunc::new(x().pow(2).add(&x().scale(3)), x().pow(2).add(&x())).unwrap();
        assert_eq!(g.num(), &x().add(&c(3)));
        assert_eq!(g.den(), &x().add(&c(1)));
        // 4/6 = 2/3 = 3 in F_7
        assert_eq!(RatFunc::new(c(4), c(6)).unwrap(), RatFunc::constant(7, 3));
    }

    #[test]
    fn membership_in_localisation() {
        let base = RatFuncSpec::new(7, vec!["x".into()], vec![]).unwrap();
        let loc = base.with_inverted(&x()).unwrap();
        let inv_x = RatFunc::new(c(1), x()).unwrap();
        assert!(!base.contains(&inv_x));
        assert!(loc.contains(&inv_x));
        assert!(loc.is_unit(&inv_x));
        let f = RatFunc::new(c(3).add(&x()), c(1).add(&x().scale(2))).unwrap();
        assert!(base.is_unit(&f));
        assert!(!base.is_unit(&RatFunc::from_poly(x())));
        assert!(loc.is_unit(&RatFunc::from_poly(x())));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(RatFunc::new(c(1), c(0)), Err(Error::DivisionByZero));
    }
}
