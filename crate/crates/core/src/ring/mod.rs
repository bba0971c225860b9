//! Exact arithmetic for the supported family of rings.
//!
//! A [`RingDescriptor`] names one ring; an [`Element`] pairs a canonical
//! [`Value`] with the ring it lives in. Values of related rings (for example
//! `Z_(p)` and `Q`, or a localisation and its base) share one ambient
//! representation, and [`RingDescriptor::coerce`] moves elements between them
//! after checking membership.

pub mod context;
pub mod laurent;
pub mod parse;
pub mod poly;
pub mod ratfunc;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use laurent::{Laurent, LaurentSpec};
use poly::Poly;
use ratfunc::{is_prime, RatFunc, RatFuncSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingKind {
    /// `Z/m`.
    ZMod(u64),
    /// `F_p`.
    PrimeField(u64),
    /// `Q`.
    Rationals,
    /// `Z_(p)`: rationals whose reduced denominator is prime to `p`.
    LocalInt(u64),
    /// `F_p[vars]_(vars)` with finitely many linear forms inverted.
    RatFuncLocal(RatFuncSpec),
    /// `O((t))` modulo `t^precision`, `O = F_p[s]_(s)`.
    TruncLaurent(LaurentSpec),
}

/// Shared, immutable handle on a ring.
#[derive(Clone)]
pub struct RingDescriptor(Arc<RingKind>);

impl PartialEq for RingDescriptor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for RingDescriptor {}

impl Hash for RingDescriptor {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for RingDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for RingDescriptor {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl fmt::Debug for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            RingKind::ZMod(m) => write!(f, "zmod:{m}"),
            RingKind::PrimeField(p) => write!(f, "fp:{p}"),
            RingKind::Rationals => write!(f, "q"),
            RingKind::LocalInt(p) => write!(f, "zloc:{p}"),
            RingKind::RatFuncLocal(spec) => write!(f, "{}", ratfunc_spec_string(spec)),
            RingKind::TruncLaurent(spec) => {
                write!(f, "laurent({},prec={})", ratfunc_spec_string(&spec.base), spec.precision)
            }
        }
    }
}

fn ratfunc_spec_string(spec: &RatFuncSpec) -> String {
    let mut s = format!("ratfunc:{}:{}", spec.p, spec.vars.join(","));
    if !spec.inverted.is_empty() {
        let inv: Vec<String> = spec.inverted.iter().map(|t| t.render(&spec.vars)).collect();
        s.push_str(&format!("@invert({})", inv.join(",")));
    }
    s
}

/// Prime power decomposition `m = p^k`, if it exists.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > m {
        p = m;
    }
    let (mut r, mut k) = (m, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl RingDescriptor {
    pub fn new(kind: RingKind) -> Result<Self> {
        match &kind {
            RingKind::ZMod(m) if *m < 2 || *m > u32::MAX as u64 => {
                return Err(Error::InvalidRing(format!("modulus {m} out of range")))
            }
            RingKind::PrimeField(p) | RingKind::LocalInt(p) if !is_prime(*p) || *p >= 1 << 31 => {
                return Err(Error::InvalidRing(format!("{p} is not a supported prime")))
            }
            RingKind::TruncLaurent(spec) if spec.precision == 0 => {
                return Err(Error::InvalidRing("precision must be at least 1".into()))
            }
            _ => {}
        }
        Ok(RingDescriptor(Arc::new(kind)))
    }

    pub fn zmod(m: u64) -> Result<Self> {
        Self::new(RingKind::ZMod(m))
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(RingKind::PrimeField(p))
    }

    pub fn rationals() -> Self {
        RingDescriptor(Arc::new(RingKind::Rationals))
    }

    pub fn local_int(p: u64) -> Result<Self> {
        Self::new(RingKind::LocalInt(p))
    }

    pub fn ratfunc(spec: RatFuncSpec) -> Self {
        RingDescriptor(Arc::new(RingKind::RatFuncLocal(spec)))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn same(&self, other: &Self) -> bool {
        self == other
    }

    /// Modulus for `Z/m` and `F_p`.
    pub fn modulus(&self) -> Option<u64> {
        match self.kind() {
            RingKind::ZMod(m) | RingKind::PrimeField(m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    /// `Z/p^k` and `F_p` are local; other moduli are not.
    pub fn is_finite_local(&self) -> bool {
        match self.kind() {
            RingKind::ZMod(m) => prime_power(*m).is_some(),
            RingKind::PrimeField(_) => true,
            _ => false,
        }
    }

    pub fn ratfunc_spec(&self) -> Option<&RatFuncSpec> {
        match self.kind() {
            RingKind::RatFuncLocal(s) => Some(s),
            _ => None,
        }
    }

    /// The prime field characteristic when the ring is an `F_p`-algebra.
    pub fn char_p(&self) -> Option<u32> {
        match self.kind() {
            RingKind::PrimeField(p) => Some(*p as u32),
            RingKind::RatFuncLocal(s) => Some(s.p),
            RingKind::TruncLaurent(s) => Some(s.base.p),
            _ => None,
        }
    }

    fn wrap(&self, value: Value) -> Element {
        Element { ring: self.clone(), value }
    }

    pub fn from_int(&self, n: i64) -> Element {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Element {
        let v = match self.kind() {
            RingKind::ZMod(m) | RingKind::PrimeField(m) => {
                Value::Residue(n.mod_floor(&BigInt::from(*m)).to_u64().unwrap())
            }
            RingKind::Rationals | RingKind::LocalInt(_) => Value::Rational(BigRational::from_integer(n.clone())),
            RingKind::RatFuncLocal(s) => Value::Frac(RatFunc::constant(s.p, bigint_mod(n, s.p))),
            RingKind::TruncLaurent(s) => Value::Series(Laurent::constant(
                RatFunc::constant(s.base.p, bigint_mod(n, s.base.p)),
                s.precision,
            )),
        };
        self.wrap(v)
    }

    pub fn zero(&self) -> Element {
        self.from_int(0)
    }

    pub fn one(&self) -> Element {
        self.from_int(1)
    }

    /// The named generator of a polynomial-type ring (`t` is the series
    /// variable of a Laurent ring).
    pub fn var(&self, name: &str) -> Result<Element> {
        match self.kind() {
            RingKind::RatFuncLocal(s) => {
                let i = s.var_index(name).ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                Ok(self.wrap(Value::Frac(RatFunc::from_poly(Poly::var(s.p, i)))))
            }
            RingKind::TruncLaurent(s) => {
                if name == laurent::SERIES_VAR {
                    Ok(self.wrap(Value::Series(Laurent::monomial(RatFunc::constant(s.base.p, 1), 1, s.precision))))
                } else if s.base.var_index(name).is_some() {
                    let c = RatFunc::from_poly(Poly::var(s.base.p, 0));
                    Ok(self.wrap(Value::Series(Laurent::constant(c, s.precision))))
                } else {
                    Err(Error::Parse(format!("unknown variable {name}")))
                }
            }
            _ => Err(Error::Parse(format!("ring {self} has no variable {name}"))),
        }
    }

    pub fn from_ratfunc(&self, f: RatFunc) -> Result<Element> {
        self.element(Value::Frac(f))
    }

    /// Validates a raw value against this ring and returns it as an element.
    pub fn element(&self, value: Value) -> Result<Element> {
        let ok = match (self.kind(), &value) {
            (RingKind::ZMod(m) | RingKind::PrimeField(m), Value::Residue(r)) => {
                return Ok(self.wrap(Value::Residue(r % m)));
            }
            (RingKind::Rationals, Value::Rational(_)) => true,
            (RingKind::LocalInt(p), Value::Rational(q)) => !(q.denom() % BigInt::from(*p)).is_zero(),
            (RingKind::RatFuncLocal(s), Value::Frac(f)) => f.modulus() == s.p && s.contains(f),
            (RingKind::TruncLaurent(s), Value::Series(x)) => x.modulus() == s.base.p && x.coefficients_in(&s.base),
            _ => return Err(Error::InvalidRing(format!("value kind does not match ring {self}"))),
        };
        if ok {
            Ok(self.wrap(value))
        } else {
            Err(Error::NotMember(render_value(self, &value), self.to_string()))
        }
    }

    fn compatible(&self, other: &RingDescriptor) -> bool {
        match (self.kind(), other.kind()) {
            (RingKind::ZMod(a) | RingKind::PrimeField(a), RingKind::ZMod(b) | RingKind::PrimeField(b)) => a == b,
            (RingKind::Rationals | RingKind::LocalInt(_), RingKind::Rationals | RingKind::LocalInt(_)) => true,
            (RingKind::RatFuncLocal(a), RingKind::RatFuncLocal(b)) => a.p == b.p && a.vars == b.vars,
            (RingKind::TruncLaurent(a), RingKind::TruncLaurent(b)) => a == b,
            _ => false,
        }
    }

    /// Reinterprets an element of a ring with the same ambient representation
    /// (for instance `R` inside `R_t`, or back), checking membership.
    pub fn coerce(&self, x: &Element) -> Result<Element> {
        if x.ring == *self {
            return Ok(x.clone());
        }
        if !self.compatible(&x.ring) {
            return Err(Error::InvalidRing(format!("cannot move an element of {} into {}", x.ring, self)));
        }
        self.element(x.value.clone())
    }

    /// All elements of a finite ring in residue order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let m = self.modulus().ok_or_else(|| Error::Unsupported(format!("{self} is not finite")))?;
        Ok((0..m).map(|r| self.wrap(Value::Residue(r))).collect())
    }

    /// All units of a finite ring in residue order.
    pub fn units(&self) -> Result<Vec<Element>> {
        Ok(self.elements()?.into_iter().filter(|x| x.is_unit()).collect())
    }

    pub fn parse_element(&self, expr: &str) -> Result<Element> {
        parse::parse_element(self, expr)
    }

    pub fn parse(spec: &str) -> Result<Self> {
        parse::parse_ring(spec)
    }
}

fn bigint_mod(n: &BigInt, p: u32) -> i64 {
    n.mod_floor(&BigInt::from(p)).to_i64().unwrap()
}

/// Canonical datum of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Residue(u64),
    Rational(BigRational),
    Frac(RatFunc),
    Series(Laurent),
}

#[derive(Clone)]
pub struct Element {
    ring: RingDescriptor,
    value: Value,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.ring == other.ring
    }
}
impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state)
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then_with(|| self.ring.cmp(&other.ring))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_value(&self.ring, &self.value))
    }
}

fn render_value(ring: &RingDescriptor, v: &Value) -> String {
    match (ring.kind(), v) {
        (_, Value::Residue(r)) => r.to_string(),
        (_, Value::Rational(q)) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        (RingKind::RatFuncLocal(s), Value::Frac(f)) => f.render(&s.vars),
        (RingKind::TruncLaurent(s), Value::Series(x)) => x.render(&s.base.vars),
        (_, Value::Frac(f)) => f.render(&["x".into(), "y".into(), "z".into(), "w".into()]),
        (_, Value::Series(x)) => x.render(&["s".into()]),
    }
}

impl Element {
    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        match &self.value {
            Value::Frac(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match &self.value {
            Value::Residue(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_series(&self) -> Option<&Laurent> {
        match &self.value {
            Value::Series(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 0,
            Value::Rational(q) => q.is_zero(),
            Value::Frac(f) => f.is_zero(),
            Value::Series(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 1 % self.ring.modulus().unwrap(),
            Value::Rational(q) => q.is_one(),
            Value::Frac(f) => f.is_one(),
            Value::Series(x) => x.is_one(),
        }
    }

    /// Whether the element is invertible in its ring. For truncated series
    /// whose known coefficients all vanish this is `false`; use
    /// [`Element::try_is_unit`] to distinguish that case.
    pub fn is_unit(&self) -> bool {
        self.try_is_unit().unwrap_or(false)
    }

    pub fn try_is_unit(&self) -> Result<bool> {
        Ok(match (self.ring.kind(), &self.value) {
            (RingKind::ZMod(m) | RingKind::PrimeField(m), Value::Residue(r)) => r.gcd(m) == 1,
            (RingKind::Rationals, Value::Rational(q)) => !q.is_zero(),
            (RingKind::LocalInt(p), Value::Rational(q)) => !(q.numer() % BigInt::from(*p)).is_zero(),
            (RingKind::RatFuncLocal(s), Value::Frac(f)) => s.is_unit(f),
            (RingKind::TruncLaurent(s), Value::Series(x)) => x.is_unit(&s.base)?,
            _ => unreachable!("element value does not match its ring"),
        })
    }

    fn check_ring(&self, other: &Element, op: &str) {
        assert!(
            self.ring == other.ring,
            "cannot {op} elements of different rings ({} and {})",
            self.ring,
            other.ring
        );
    }

    fn with(&self, value: Value) -> Element {
        Element { ring: self.ring.clone(), value }
    }

    fn add_ref(&self, other: &Element) -> Element {
        self.check_ring(other, "add");
        let v = match (&self.value, &other.value) {
            (Value::Residue(a), Value::Residue(b)) => {
                let m = self.ring.modulus().unwrap();
                Value::Residue(((*a as u128 + *b as u128) % m as u128) as u64)
            }
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            (Value::Frac(a), Value::Frac(b)) => Value::Frac(a.add(b)),
            (Value::Series(a), Value::Series(b)) => Value::Series(a.add(b)),
            _ => unreachable!(),
        };
        self.with(v)
    }

    fn mul_ref(&self, other: &Element) -> Element {
        self.check_ring(other, "multiply");
        let v = match (&self.value, &other.value) {
            (Value::Residue(a), Value::Residue(b)) => {
                let m = self.ring.modulus().unwrap();
                Value::Residue(((*a as u128 * *b as u128) % m as u128) as u64)
            }
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (Value::Frac(a), Value::Frac(b)) => Value::Frac(a.mul(b)),
            (Value::Series(a), Value::Series(b)) => {
                let RingKind::TruncLaurent(s) = self.ring.kind() else { unreachable!() };
                Value::Series(a.mul(b, s.precision))
            }
            _ => unreachable!(),
        };
        self.with(v)
    }

    fn neg_ref(&self) -> Element {
        let v = match &self.value {
            Value::Residue(a) => {
                let m = self.ring.modulus().unwrap();
                Value::Residue(if *a == 0 { 0 } else { m - a })
            }
            Value::Rational(a) => Value::Rational(-a),
            Value::Frac(a) => Value::Frac(a.neg()),
            Value::Series(a) => Value::Series(a.neg()),
        };
        self.with(v)
    }

    /// The inverse, which must exist in this ring.
    pub fn inv(&self) -> Result<Element> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.try_is_unit()? {
            return Err(Error::NotUnit(self.to_string(), self.ring.to_string()));
        }
        Ok(self.with(self.ambient_inv().expect("units are invertible")))
    }

    /// Inverse in the ambient fraction field (or in the ring itself for
    /// finite and series rings); the result need not lie in this ring.
    fn ambient_inv(&self) -> Result<Value> {
        match (&self.value, self.ring.kind()) {
            (Value::Residue(a), _) => {
                let m = self.ring.modulus().unwrap();
                let e = BigInt::from(*a).extended_gcd(&BigInt::from(m));
                if !e.gcd.is_one() {
                    return Err(Error::NotUnit(self.to_string(), self.ring.to_string()));
                }
                Ok(Value::Residue(e.x.mod_floor(&BigInt::from(m)).to_u64().unwrap()))
            }
            (Value::Rational(a), _) => {
                if a.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Value::Rational(a.recip()))
                }
            }
            (Value::Frac(a), _) => a.inv().map(Value::Frac).ok_or(Error::DivisionByZero),
            (Value::Series(a), RingKind::TruncLaurent(s)) => Ok(Value::Series(a.inv(&s.base, s.precision)?)),
            _ => unreachable!(),
        }
    }

    /// Exact quotient `self / other`, which must lie in this ring.
    pub fn div(&self, other: &Element) -> Result<Element> {
        self.check_ring(other, "divide");
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let q = self.with(other.ambient_inv()?).mul_ref(self);
        self.ring.element(q.value)
    }

    pub fn pow(&self, e: i64) -> Result<Element> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        if let Value::Frac(f) = &base.value {
            return Ok(self.with(Value::Frac(f.pow(k as i64).unwrap())));
        }
        let mut acc = self.ring.one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Integer represented by a rational or residue element, if any.
    pub fn to_bigint(&self) -> Option<BigInt> {
        match &self.value {
            Value::Residue(r) => Some(BigInt::from(*r)),
            Value::Rational(q) if q.is_integer() => Some(q.numer().clone()),
            _ => None,
        }
    }

    pub fn is_negative_rational(&self) -> bool {
        matches!(&self.value, Value::Rational(q) if q.is_negative())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                self.$f(rhs)
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                (&self).$f(rhs)
            }
        }
        impl $tr<Element> for &Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                self.$f(&rhs)
            }
        }
    };
}

impl Element {
    fn sub_ref(&self, other: &Element) -> Element {
        self.check_ring(other, "subtract");
        self.add_ref(&other.neg_ref())
    }
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}
impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_and_units() {
        let z4 = RingDescriptor::zmod(4).unwrap();
        assert!(z4.from_int(3).is_unit());
        assert!(!z4.from_int(2).is_unit());
        let f7 = RingDescriptor::prime_field(7).unwrap();
        assert_eq!(f7.from_int(9), f7.from_int(2));
        assert_eq!(f7.from_int(3).inv().unwrap(), f7.from_int(5));
        assert_eq!(f7.from_int(-1).to_string(), "6");
    }

    #[test]
    fn rationals_reduce() {
        let q = RingDescriptor::rationals();
        let x = q.from_int(4).div(&q.from_int(6)).unwrap();
        assert_eq!(x.to_string(), "2/3");
        let z3 = RingDescriptor::local_int(3).unwrap();
        assert!(z3.coerce(&x).is_err());
        let y = q.from_int(3).div(&q.from_int(2)).unwrap();
        let y3 = z3.coerce(&y).unwrap();
        assert!(!y3.is_unit());
        assert!(z3.coerce(&q.from_int(5)).unwrap().is_unit());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert!(RingDescriptor::zmod(25).unwrap().is_finite_local());
        assert!(!RingDescriptor::zmod(6).unwrap().is_finite_local());
    }

    #[test]
    #[should_panic(expected = "different rings")]
    fn mixing_rings_panics() {
        let a = RingDescriptor::zmod(4).unwrap().one();
        let b = RingDescriptor::zmod(5).unwrap().one();
        let _ = a + b;
    }
}
